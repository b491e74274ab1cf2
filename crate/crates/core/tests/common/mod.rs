#![allow(dead_code)]

use freerat::rational::RatExpr;
use freerat::sample::{self, ExprShape};
use freerat::word::Word;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn w(s: &str) -> Word {
    s.parse().unwrap()
}

pub fn e(s: &str) -> RatExpr {
    s.parse().unwrap()
}

/// Random expressions of complexity at most 3 with leaf words of length at most 3.
pub fn rational_corpus(seed: u64, count: usize) -> Vec<RatExpr> {
    let mut rng = rng(seed);
    let shape = ExprShape {
        rank: 2,
        max_complexity: 3,
        leaf_len: 3,
        max_leaf_words: 2,
        positive_leaves: false,
    };
    (0..count).map(|_| sample::expr(&mut rng, &shape)).collect()
}

/// Rewrites a positive-leaf expression so that leaves carry cancelling
/// negative letters while the denoted set is unchanged.
pub fn disguise<R: Rng>(rng: &mut R, e: &RatExpr) -> RatExpr {
    use freerat::rational::RatKind;
    match e.kind() {
        RatKind::Finite(_) => e.clone(),
        RatKind::Union(l, r) => RatExpr::union(disguise(rng, l), disguise(rng, r)),
        RatKind::Product(l, r) => {
            let g = sample::word(rng, 2, 2);
            RatExpr::product(
                RatExpr::product(disguise(rng, l), RatExpr::single(g.clone())),
                RatExpr::product(RatExpr::single(g.inverse()), disguise(rng, r)),
            )
        }
        RatKind::Star(inner) => {
            let g = sample::word(rng, 2, 2);
            RatExpr::product_all([
                RatExpr::single(g.clone()),
                RatExpr::star(disguise(rng, inner).conjugate(&g)),
                RatExpr::single(g.inverse()),
            ])
        }
    }
}

/// Expressions over F₂ denoting subsets of X₂*: hand-picked ones followed
/// by disguised random positive expressions.
pub fn positive_corpus(seed: u64, count: usize) -> Vec<RatExpr> {
    let mut out: Vec<RatExpr> = [
        "(fin \"x1 x2\")",
        "(prod (fin \"x1 x2^-1\") (fin x2))",
        "(prod (fin x2) (star (fin \"x2^-1 x1 x2\")))",
        "(prod (union (fin \"x1 x2^-1\") (star (fin x1))) (fin \"x2 x1\"))",
        "(prod (fin x1^2) (star (fin \"x1^-1 x2 x1\")))",
        "(prod (prod (fin x2) (star (fin \"x2^-1 x1^2 x2\"))) (fin \"x2^-1 x1 x2\"))",
        "(star (prod (fin \"x1 x2^-1\") (prod (fin x2) (star (fin \"x2 x1\")))))",
        "(union (star (fin x1 x2)) (prod (fin \"x2 x1^-1\") (prod (fin x1) (star (fin x1)))))",
    ]
    .iter()
    .map(|s| e(s))
    .collect();
    let mut rng = rng(seed);
    let shape = ExprShape {
        rank: 2,
        max_complexity: 3,
        leaf_len: 3,
        max_leaf_words: 2,
        positive_leaves: true,
    };
    while out.len() < count {
        let p = sample::expr(&mut rng, &shape);
        out.push(disguise(&mut rng, &p));
    }
    out
}

/// Candidate descriptions of the positive squares: hand-picked sets followed
/// by random positive-leaf expressions.
pub fn candidate_corpus(seed: u64, count: usize) -> Vec<RatExpr> {
    let mut out: Vec<RatExpr> = [
        "(star (fin x1 x2))",
        "(star (fin \"x1^2\"))",
        "(star (fin \"x1^2\" \"x2^2\"))",
        "(star (fin \"x1 x2 x1 x2\" \"x1^2\" \"x2^2\"))",
        "(union (star (fin \"x1^2\")) (star (fin \"x2^2\")))",
        "(prod (star (fin \"x1^2\")) (star (fin \"x1 x2\")))",
        "(fin \"x1^2\" \"x2^2\" \"x1 x2 x1 x2\")",
        "(prod (fin \"x1^2 x2\") (prod (star (fin \"x2 x1\")) (fin \"x2\")))",
        "(star (prod (fin x1) (star (fin \"x2^2\"))))",
        "(prod (fin \"x1 x2^-1\") (prod (star (fin \"x2^2\")) (fin \"x2 x1\")))",
    ]
    .iter()
    .map(|s| e(s))
    .collect();
    let mut rng = rng(seed);
    let shape = ExprShape {
        rank: 2,
        max_complexity: 3,
        leaf_len: 3,
        max_leaf_words: 3,
        positive_leaves: true,
    };
    while out.len() < count {
        out.push(sample::expr(&mut rng, &shape));
    }
    out.truncate(count);
    out
}

/// Index of the lattice spanned by `vectors` in `ℤ^n`, by integer row reduction.
fn lattice_index(mut vectors: Vec<Vec<i64>>, n: usize) -> Option<u128> {
    let mut det: u128 = 1;
    for col in 0..n {
        loop {
            let nonzero: Vec<usize> = (0..vectors.len())
                .filter(|&i| vectors[i][col] != 0)
                .collect();
            if nonzero.len() <= 1 {
                break;
            }
            let pivot = *nonzero
                .iter()
                .min_by_key(|&&i| vectors[i][col].abs())
                .unwrap();
            let p = vectors[pivot].clone();
            for &i in &nonzero {
                if i != pivot {
                    let k = vectors[i][col] / p[col];
                    for (x, y) in vectors[i].iter_mut().zip(&p) {
                        *x -= k * y;
                    }
                }
            }
        }
        let i = (0..vectors.len()).find(|&i| vectors[i][col] != 0)?;
        det *= vectors[i][col].unsigned_abs() as u128;
        vectors.remove(i);
    }
    Some(det)
}

/// Index in `ℤ^rank` of the lattice spanned by the exponent vectors of
/// `w(g_1, ..., g_n)` with each `g_j` one of `1, x_1, ..., x_rank`.
pub fn substitution_lattice_index(word: &Word, rank: u32) -> Option<u128> {
    let arity = word.max_generator() as usize;
    let choices: Vec<Word> = std::iter::once(Word::identity())
        .chain((1..=rank).map(Word::generator))
        .collect();
    let mut vectors = Vec::new();
    let mut idx = vec![0usize; arity];
    loop {
        let images: Vec<Word> = idx.iter().map(|&i| choices[i].clone()).collect();
        let v = word.substitute(&images);
        vectors.push((1..=rank).map(|i| v.exponent_sum(i)).collect::<Vec<_>>());
        let Some(pos) = (0..arity).find(|&p| idx[p] + 1 < choices.len()) else {
            break;
        };
        idx[pos] += 1;
        for p in idx.iter_mut().take(pos) {
            *p = 0;
        }
    }
    lattice_index(vectors, rank as usize)
}
