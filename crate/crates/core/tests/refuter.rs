mod common;

use std::collections::BTreeSet;

use common::{candidate_corpus, e, w};
use freerat::rational::acceptor::intersect_positive;
use freerat::refuter::{decomposable, refute, replay, witness_word, DecompositionScheme, Outcome};
use freerat::word::{Letter, Word};
use proptest::prelude::*;

fn scheme(k: &[&str], n: usize) -> DecompositionScheme {
    DecompositionScheme {
        k_l: k.iter().map(|s| w(s)).collect(),
        n,
    }
}

/// Tries every placement of at most `n` (s, t) pairs.
fn brute_force(u: &[Letter], k: &BTreeSet<Word>, n: usize) -> bool {
    fn s_ok(part: &[Letter], k: &BTreeSet<Word>) -> bool {
        let mut i = 0;
        while i < part.len() {
            let mut j = i;
            while j < part.len() && part[j] == part[i] {
                j += 1;
            }
            if !k.contains(&Word::power_of_generator(
                part[i].generator(),
                (j - i) as i64,
            )) {
                return false;
            }
            i = j;
        }
        true
    }
    fn t_ok(part: &[Letter]) -> bool {
        part.iter().all(|&l| l == part[0])
    }
    if u.is_empty() {
        return true;
    }
    if n == 0 {
        return false;
    }
    for j in 0..=u.len() {
        if !s_ok(&u[..j], k) {
            continue;
        }
        for m in j..=u.len() {
            if t_ok(&u[j..m]) && m > 0 && brute_force(&u[m..], k, n - 1) {
                return true;
            }
        }
    }
    false
}

#[test]
fn candidate_corpus_reports_replay() {
    let square = w("x1^2");
    let mut kinds = BTreeSet::new();
    for expr in candidate_corpus(9, 20) {
        let report = refute(&expr, &square).unwrap_or_else(|err| panic!("{expr}: {err}"));
        replay(&report).unwrap_or_else(|err| panic!("{expr}: {err}"));
        let kind = serde_json::to_value(&report.outcome).unwrap()["kind"]
            .as_str()
            .unwrap()
            .to_string();
        if report.heuristic {
            assert_eq!(kind, "inconsistent-branch");
        }
        kinds.insert(kind);
    }
    assert!(
        kinds.contains("missing-value") && kinds.contains("foreign-element"),
        "{kinds:?}"
    );
}

#[test]
fn finite_positive_parts_are_missing_values() {
    for s in [
        "(fin \"x1^2\" x1 x2)",
        "(fin \"x1 x2^-1\" \"x2^2\")",
        "(prod (fin x1) (fin \"x1^-1 x2\"))",
        "(star (fin \"x1^-1\"))",
    ] {
        let expr = e(s);
        assert!(intersect_positive(&expr).is_finite());
        for word in ["x1^2", "x1^3 x2^3", "x1^2 x2^4 x1^-2"] {
            let report = refute(&expr, &w(word)).unwrap();
            assert!(
                matches!(report.outcome, Outcome::MissingValue { .. }),
                "{s} {word}"
            );
            replay(&report).unwrap();
        }
    }
}

#[test]
fn powers_of_one_generator_miss_a_square() {
    let report = refute(&e("(star (fin \"x1^2\"))"), &w("x1^2")).unwrap();
    let Outcome::MissingValue { witness } = &report.outcome else {
        panic!("{:?}", report.outcome)
    };
    assert!(witness.u.letters().iter().any(|l| l.generator() == 2));
    assert_eq!(witness.u.root(2).map(|r| r.pow(2)), Some(witness.u.clone()));
}

#[test]
fn all_positive_words_contain_a_non_square() {
    let report = refute(&e("(star (fin x1 x2))"), &w("x1^2")).unwrap();
    let Outcome::ForeignElement { element, .. } = &report.outcome else {
        panic!("{:?}", report.outcome)
    };
    assert_eq!(element, &w("x1"));
    assert!(element.root(2).is_none());
}

#[test]
fn reports_are_deterministic() {
    let expr = e("(prod (star (fin \"x1^2\")) (star (fin \"x1 x2\")))");
    let a = serde_json::to_string(&refute(&expr, &w("x1^2")).unwrap()).unwrap();
    let b = serde_json::to_string(&refute(&expr, &w("x1^2")).unwrap()).unwrap();
    assert_eq!(a, b);
}

fn positive_word(max_syllables: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((1u32..=2, 1i64..=3), 0..=max_syllables).prop_map(|parts| {
        parts.into_iter().fold(Word::identity(), |acc, (g, k)| {
            acc.mul(&Word::power_of_generator(g, k))
        })
    })
}

fn small_scheme() -> impl Strategy<Value = DecompositionScheme> {
    (
        prop::collection::btree_set((1u32..=2, 1i64..=3), 0..=4),
        1usize..=4,
    )
        .prop_map(|(k, n)| DecompositionScheme {
            k_l: k
                .into_iter()
                .map(|(g, e)| Word::power_of_generator(g, e))
                .collect(),
            n,
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn dp_matches_brute_force(u in positive_word(12), s in small_scheme()) {
        prop_assume!(u.len() <= 18);
        prop_assert_eq!(decomposable(&u, &s).unwrap(), brute_force(u.letters(), &s.k_l, s.n));
    }

    #[test]
    fn witnesses_escape_their_scheme(s in small_scheme(), e in 2i64..=4, extra in 0i64..=2) {
        let word = w("x1").pow(e).mul(&w("x2").pow(e * extra));
        let wit = witness_word(&word, &s).unwrap();
        prop_assert!(!s.k_l.contains(&Word::power_of_generator(1, wit.t as i64)));
        prop_assert!(wit.l > s.n);
        prop_assert!(wit.transcript.replay().is_ok());
        prop_assert!(!decomposable(&wit.u, &s).unwrap());
    }
}

#[test]
fn spec_scheme_examples() {
    let wit = witness_word(&w("x1^2"), &scheme(&["x1", "x2"], 2)).unwrap();
    assert_eq!(wit.u, w("x1^2 x2").pow(6));
    assert!(!decomposable(&wit.u, &scheme(&["x1", "x2"], 2)).unwrap());
}
