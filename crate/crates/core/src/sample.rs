//! Seeded random generators for words, free-product elements and
//! expressions.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::free_product::{FPElement, Factor, FreeProduct, Syllable};
use crate::rational::RatExpr;
use crate::word::{Letter, Word};

/// A reduced word of length exactly `len` over `x1..x_rank`.
pub fn word_of_length<R: Rng + ?Sized>(rng: &mut R, rank: u32, len: usize) -> Word {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::new(rng.gen_range(1..=rank), rng.gen_bool(0.5));
        if letters.last().is_some_and(|&p| p == l.inverse()) {
            continue;
        }
        letters.push(l);
    }
    Word::reduce(letters)
}

/// A reduced word with length uniform in `0..=max_len`.
pub fn word<R: Rng + ?Sized>(rng: &mut R, rank: u32, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    word_of_length(rng, rank, len)
}

/// A positive word with length uniform in `0..=max_len`.
pub fn positive_word<R: Rng + ?Sized>(rng: &mut R, rank: u32, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::reduce((0..len).map(|_| Letter::new(rng.gen_range(1..=rank), false)))
}

fn exponent<R: Rng + ?Sized>(rng: &mut R, bound: i64, positive: bool) -> i64 {
    if positive {
        rng.gen_range(1..=bound)
    } else {
        let e = rng.gen_range(1..=bound);
        if rng.gen_bool(0.5) {
            -e
        } else {
            e
        }
    }
}

/// An element of syllable length exactly `len` with exponents in `±1..=bound`.
pub fn fp_of_length<R: Rng + ?Sized>(
    rng: &mut R,
    fp: &FreeProduct,
    len: usize,
    bound: i64,
    positive: bool,
) -> FPElement {
    let mut factor = if rng.gen_bool(0.5) {
        Factor::A
    } else {
        Factor::B
    };
    let mut syllables = Vec::with_capacity(len);
    while syllables.len() < len {
        let e = exponent(rng, bound, positive);
        if let Some(s) = fp.syllable(factor, e) {
            syllables.push(s);
            factor = factor.other();
        }
    }
    fp.normalize(syllables)
}

/// An element with syllable length uniform in `0..=max_len`.
pub fn fp_element<R: Rng + ?Sized>(
    rng: &mut R,
    fp: &FreeProduct,
    max_len: usize,
    bound: i64,
) -> FPElement {
    let len = rng.gen_range(0..=max_len);
    fp_of_length(rng, fp, len, bound, false)
}

pub fn positive_fp<R: Rng + ?Sized>(
    rng: &mut R,
    fp: &FreeProduct,
    max_len: usize,
    bound: i64,
) -> FPElement {
    let len = rng.gen_range(0..=max_len);
    fp_of_length(rng, fp, len, bound, true)
}

/// A random syllable with exponent in `±1..=bound`.
pub fn syllable<R: Rng + ?Sized>(rng: &mut R, fp: &FreeProduct, bound: i64) -> Syllable {
    loop {
        let factor = *[Factor::A, Factor::B].choose(rng).expect("non-empty");
        if let Some(s) = fp.syllable(factor, exponent(rng, bound, false)) {
            return s;
        }
    }
}

/// Shape parameters for [`expr`].
#[derive(Debug, Clone, Copy)]
pub struct ExprShape {
    pub rank: u32,
    pub max_complexity: u32,
    pub leaf_len: usize,
    pub max_leaf_words: usize,
    pub positive_leaves: bool,
}

/// A random expression whose structural complexity is at most
/// `shape.max_complexity`.
pub fn expr<R: Rng + ?Sized>(rng: &mut R, shape: &ExprShape) -> RatExpr {
    expr_at(rng, shape, shape.max_complexity)
}

fn leaf<R: Rng + ?Sized>(rng: &mut R, shape: &ExprShape) -> RatExpr {
    let k = rng.gen_range(1..=shape.max_leaf_words.max(1));
    RatExpr::finite((0..k).map(|_| {
        let len = rng.gen_range(1..=shape.leaf_len.max(1));
        if shape.positive_leaves {
            Word::reduce((0..len).map(|_| Letter::new(rng.gen_range(1..=shape.rank), false)))
        } else {
            word_of_length(rng, shape.rank, len)
        }
    }))
}

fn expr_at<R: Rng + ?Sized>(rng: &mut R, shape: &ExprShape, budget: u32) -> RatExpr {
    if budget == 0 || rng.gen_bool(0.2) {
        return leaf(rng, shape);
    }
    match rng.gen_range(0..3) {
        0 => RatExpr::union(
            expr_at(rng, shape, budget - 1),
            expr_at(rng, shape, budget - 1),
        ),
        1 => RatExpr::product(
            expr_at(rng, shape, budget - 1),
            expr_at(rng, shape, budget - 1),
        ),
        _ => RatExpr::star(expr_at(rng, shape, budget - 1)),
    }
}
