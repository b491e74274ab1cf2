mod common;

use freerat::free_product::{FPElement, Factor, FactorModel, FreeProduct, Syllable};
use freerat::rational::{Progression, ZRatSet};
use freerat::word::{bezout_substitution, exponent_profile, root_extract, Letter, Word};
use proptest::prelude::*;

/// Deletes one cancelling pair at a time until none is left.
fn naive_reduce(mut letters: Vec<Letter>) -> Vec<Letter> {
    loop {
        let Some(i) = (1..letters.len()).find(|&i| letters[i] == letters[i - 1].inverse()) else {
            return letters;
        };
        letters.drain(i - 1..=i);
    }
}

fn raw_letters(max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((1u32..=3, any::<bool>()), 0..=max_len)
        .prop_map(|v| v.into_iter().map(|(g, inv)| Letter::new(g, inv)).collect())
}

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    raw_letters(max_len).prop_map(Word::reduce)
}

/// Merges one adjacent same-factor pair at a time, reducing exponents by hand.
fn naive_fp(orders: (Option<i64>, Option<i64>), mut s: Vec<(Factor, i64)>) -> Vec<(Factor, i64)> {
    let norm = |f: Factor, e: i64| match (f, orders) {
        (Factor::A, (Some(m), _)) | (Factor::B, (_, Some(m))) => e.rem_euclid(m),
        _ => e,
    };
    loop {
        if let Some(i) = s.iter().position(|&(f, e)| norm(f, e) == 0) {
            s.remove(i);
            continue;
        }
        if let Some(i) = (1..s.len()).find(|&i| s[i].0 == s[i - 1].0) {
            let merged = (s[i].0, s[i - 1].1 + s[i].1);
            s.splice(i - 1..=i, [merged]);
            continue;
        }
        return s.into_iter().map(|(f, e)| (f, norm(f, e))).collect();
    }
}

fn raw_syllables() -> impl Strategy<Value = Vec<(Factor, i64)>> {
    prop::collection::vec(
        (prop_oneof![Just(Factor::A), Just(Factor::B)], -4i64..=4),
        0..=12,
    )
}

fn model(m: Option<i64>) -> FactorModel {
    m.map_or(FactorModel::InfiniteCyclic, |m| {
        FactorModel::FiniteCyclic(m as u32)
    })
}

fn orders() -> impl Strategy<Value = (Option<i64>, Option<i64>)> {
    (prop::option::of(2i64..=5), prop::option::of(2i64..=5))
}

fn element(fp: &FreeProduct, raw: &[(Factor, i64)]) -> FPElement {
    fp.element(
        &raw.iter()
            .map(|&(f, e)| Syllable::new(f, e))
            .collect::<Vec<_>>(),
    )
}

fn as_pairs(u: &FPElement) -> Vec<(Factor, i64)> {
    u.syllables().iter().map(|s| (s.factor, s.exp)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn reduction_matches_pair_deletion(raw in raw_letters(24)) {
        let w = Word::reduce(raw.clone());
        prop_assert_eq!(w.letters(), &naive_reduce(raw)[..]);
        prop_assert!(w.letters().windows(2).all(|p| p[1] != p[0].inverse()));
    }

    #[test]
    fn group_laws(u in word(10), v in word(10), x in word(10)) {
        prop_assert_eq!(u.mul(&v).mul(&x), u.mul(&v.mul(&x)));
        prop_assert!(u.mul(&u.inverse()).is_identity());
        prop_assert_eq!(u.mul(&Word::identity()), u.clone());
        prop_assert_eq!(u.mul(&v).inverse(), v.inverse().mul(&u.inverse()));
        let mut cat = u.letters().to_vec();
        cat.extend_from_slice(v.letters());
        prop_assert_eq!(u.mul(&v).letters().to_vec(), naive_reduce(cat));
    }

    #[test]
    fn powers_and_exponent_sums(u in word(8), k in -5i64..=5, j in -5i64..=5) {
        prop_assert_eq!(u.pow(k).mul(&u.pow(j)), u.pow(k + j));
        for g in 1..=3 {
            prop_assert_eq!(u.pow(k).exponent_sum(g), k * u.exponent_sum(g));
        }
    }

    #[test]
    fn cyclic_reduction(u in word(14)) {
        let (c, core) = u.cyclic_reduce();
        prop_assert_eq!(c.inverse().mul(&core).mul(&c), u);
        prop_assert!(core.is_cyclically_reduced());
    }

    #[test]
    fn roots_of_powers(h in word(8), e in 1u32..=4) {
        prop_assume!(!h.is_identity());
        let u = h.pow(e as i64);
        let r = root_extract(&u, e).expect("a power has a root");
        prop_assert_eq!(r.pow(e as i64), u.clone());
        prop_assert_eq!(r, h);
    }

    #[test]
    fn failed_roots_have_no_short_witness(u in word(6), e in 2u32..=3) {
        if root_extract(&u, e).is_none() {
            // every h with |h| ≤ |u| is ruled out directly
            let len = u.len();
            let mut stack = vec![Word::identity()];
            while let Some(h) = stack.pop() {
                prop_assert_ne!(h.pow(e as i64), u.clone());
                if h.len() < len {
                    for g in 1..=3 {
                        for inv in [false, true] {
                            let next = h.mul(&Word::reduce([Letter::new(g, inv)]));
                            if next.len() == h.len() + 1 {
                                stack.push(next);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn free_product_reduction_matches_rewriting(o in orders(), raw in raw_syllables()) {
        let fp = FreeProduct::new(model(o.0), model(o.1)).unwrap();
        prop_assert_eq!(as_pairs(&element(&fp, &raw)), naive_fp(o, raw));
    }

    #[test]
    fn free_product_group_laws(o in orders(), a in raw_syllables(), b in raw_syllables(), c in raw_syllables()) {
        let fp = FreeProduct::new(model(o.0), model(o.1)).unwrap();
        let (x, y, z) = (element(&fp, &a), element(&fp, &b), element(&fp, &c));
        prop_assert_eq!(fp.mul(&fp.mul(&x, &y), &z), fp.mul(&x, &fp.mul(&y, &z)));
        prop_assert!(fp.mul(&x, &fp.inv(&x)).is_identity());
        prop_assert!(fp.mul(&fp.inv(&x), &x).is_identity());
        prop_assert!(x.syllables().windows(2).all(|p| p[0].factor != p[1].factor));
    }

    #[test]
    fn cores_and_cyclic_forms(o in orders(), a in raw_syllables(), g in raw_syllables()) {
        let fp = FreeProduct::new(model(o.0), model(o.1)).unwrap();
        let x = element(&fp, &a);
        prop_assume!(!x.is_identity());
        let d = fp.core_decompose(&x).unwrap();
        prop_assert_eq!(fp.reassemble(&d), x.clone());
        let conj = fp.conjugate(&x, &element(&fp, &g));
        let (c0, c1) = (fp.cyclic_form(&x).unwrap(), fp.cyclic_form(&conj).unwrap());
        // conjugates share the cyclic form up to a cyclic permutation
        prop_assert_eq!(c0.len(), c1.len());
        let doubled: Vec<Syllable> = c0.syllables().iter().chain(c0.syllables()).copied().collect();
        prop_assert!(c1.is_empty() || doubled.windows(c1.len()).any(|w| w == c1.syllables()));
        prop_assert_eq!(c0.support(), c1.support());
    }

    #[test]
    fn integers_free_product_is_f2(u in word(12), v in word(12)) {
        let fp = FreeProduct::integers();
        let (u, v) = (Word::reduce(u.letters().iter().copied().filter(|l| l.generator() <= 2)), Word::reduce(v.letters().iter().copied().filter(|l| l.generator() <= 2)));
        let (x, y) = (fp.from_f2(&u).unwrap(), fp.from_f2(&v).unwrap());
        prop_assert_eq!(fp.to_f2(&fp.mul(&x, &y)).unwrap(), u.mul(&v));
        prop_assert_eq!(fp.to_f2(&fp.inv(&x)).unwrap(), u.inverse());
    }

    #[test]
    fn bezout_substitution_gives_the_power(u in word(8), e in 2i64..=4, g in word(6)) {
        // pad exponent sums to multiples of e
        let w = (1..=3).fold(u.clone(), |acc, i| acc.mul(&Word::power_of_generator(i, (-u.exponent_sum(i)).rem_euclid(e))));
        let w = if (1..=3).all(|i| w.exponent_sum(i) == 0) { w.mul(&Word::power_of_generator(1, e)) } else { w };
        let rank = w.max_generator().max(1) as usize;
        let p = exponent_profile(&w, rank).unwrap();
        prop_assert!(p.e >= 2);
        let coeffs = p.bezout.clone().unwrap();
        // independent evaluation letter by letter
        let mut value = Word::identity();
        for l in w.letters() {
            let r = coeffs[l.generator() as usize - 1];
            value = value.mul(&g.pow(if l.is_inverse() { -r } else { r }));
        }
        prop_assert_eq!(&value, &g.pow(p.e as i64));
        prop_assert_eq!(bezout_substitution(&w, rank, &g).unwrap(), value);
    }
}

fn zset() -> impl Strategy<Value = ZRatSet> {
    prop::collection::vec((-6i64..=6, -3i64..=3), 0..=3).prop_map(|ps| {
        ZRatSet::from_progressions(
            ps.into_iter()
                .map(|(base, step)| Progression { base, step }),
        )
    })
}

fn brute(p: &[(i64, i64)], x: i64) -> bool {
    p.iter().any(|&(b, s)| match s {
        0 => x == b,
        s => (x - b) % s == 0 && (x - b) / s >= 0,
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 400, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn progressions_match_brute_force(ps in prop::collection::vec((-6i64..=6, -3i64..=3), 0..=3)) {
        let set = ZRatSet::from_progressions(ps.iter().map(|&(base, step)| Progression { base, step }));
        for x in -40..=40 {
            prop_assert_eq!(set.contains(x), brute(&ps, x));
        }
    }

    #[test]
    fn boolean_operations_are_pointwise(a in zset(), b in zset()) {
        let (u, i, d, c) = (a.union(&b), a.intersect(&b), a.difference(&b), a.complement());
        for x in -40..=40 {
            prop_assert_eq!(u.contains(x), a.contains(x) || b.contains(x));
            prop_assert_eq!(i.contains(x), a.contains(x) && b.contains(x));
            prop_assert_eq!(d.contains(x), a.contains(x) && !b.contains(x));
            prop_assert_eq!(c.contains(x), !a.contains(x));
        }
        prop_assert_eq!(c.complement(), a.clone());
        prop_assert_eq!(ZRatSet::from_progressions(a.progressions()), a);
    }

    #[test]
    fn sumsets_and_stars(a in zset(), b in zset()) {
        let s = a.sumset(&b);
        let st = a.star();
        for x in -12..=12 {
            let direct = (-60..=60).any(|y| a.contains(y) && b.contains(x - y));
            prop_assert_eq!(s.contains(x), direct);
        }
        prop_assert!(st.contains(0));
        for x in -10..=10 {
            for y in -10..=10 {
                if st.contains(x) && st.contains(y) {
                    prop_assert!(st.contains(x + y));
                }
            }
            if a.contains(x) {
                prop_assert!(st.contains(x));
            }
        }
    }
}

#[test]
fn word_examples() {
    use common::w;
    assert_eq!(w("x1 x1^-1 x2"), w("x2"));
    assert_eq!(w("x1 x2").pow(2), w("x1 x2 x1 x2"));
    assert_eq!(w("x2 x1 x2^-1").cyclic_reduce(), (w("x2^-1"), w("x1")));
    assert_eq!(root_extract(&w("x1 x2 x1 x2"), 2), Some(w("x1 x2")));
    assert_eq!(root_extract(&w("x1^2 x2^2"), 2), None);
}
