//! Per-candidate refutation of rational descriptions of `w[F₂] ∩ X₂*`.
//!
//! Given an expression `L` and a proper word `w`, [`refute`] produces a report
//! whose outcome carries a certificate that can be replayed with word and
//! acceptor primitives alone.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::free_product::{FPElement, Factor, FreeProduct};
use crate::positivize::{has_positive_leaves, positivize_total};
use crate::rational::acceptor::Acceptor;
use crate::rational::enumerate::enumerate_bounded;
use crate::rational::expr::RatExpr;
use crate::rational::standard_form::{standard_form, StandardForm};
use crate::verbal::{support_dichotomy_check, Dichotomy, FreeGroup, NonValue, VerbalQuery};
use crate::word::{
    as_generator_power, bezout_transcript, classify_word, BezoutTranscript, Word, WordClass,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RefuteError {
    #[error("{0} is the identity")]
    TrivialWord(Word),
    #[error(
        "{0} is a commutator word (e = 0); use an abelianization check on the expression instead"
    )]
    CommutatorWord(Word),
    #[error("{0} is improper (e = 1), so every element is a value")]
    ImproperWord(Word),
    #[error("expression uses x{0}; only F₂ is supported")]
    NotOverF2(u32),
    #[error("{0} is not a positive word")]
    NotPositive(Word),
    #[error("standard form has {0} summands, over the cap")]
    TooManySummands(usize),
    #[error("positive part could not be rewritten: {0}")]
    Positivize(String),
    #[error("branch classification failed: {0}")]
    Classification(String),
    #[error("witness {0} splits into the scheme; the scheme is inconsistent")]
    WitnessDecomposes(Word),
}

/// A finite set of positive syllables `K_L` and a block budget `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionScheme {
    /// Each entry is `x_i^k` with `k ≥ 1`.
    pub k_l: BTreeSet<Word>,
    pub n: usize,
}

impl DecompositionScheme {
    fn contains(&self, generator: u32, k: usize) -> bool {
        self.k_l
            .contains(&Word::power_of_generator(generator, k as i64))
    }

    fn max_exponent(&self, generator: u32) -> usize {
        self.k_l
            .iter()
            .filter_map(as_generator_power)
            .filter(|&(g, _)| g == generator)
            .map(|(_, k)| k as usize)
            .max()
            .unwrap_or(0)
    }
}

/// Classification of one starred factor `E_j` of one summand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub summand: usize,
    pub star: usize,
    pub factor: RatExpr,
    pub sample: usize,
    pub classification: Dichotomy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub t: usize,
    pub l: usize,
    pub u: Word,
    pub transcript: BezoutTranscript,
}

/// Minimal `(s, t)` block split found by [`decompose`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionTrace {
    pub decomposable: bool,
    /// Fewest pairs over all splits, when any split exists.
    pub min_pairs: Option<usize>,
    pub blocks: Vec<(Word, Word)>,
    pub states_explored: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    /// `u ∈ w[F₂] ∩ X₂*` but the positive part of the expression rejects it.
    MissingValue { witness: Witness },
    /// An accepted element that is provably not a value of `w`.
    ForeignElement {
        element: Word,
        certificate: NonValue,
        branch: Option<(usize, usize)>,
    },
    /// The witness is accepted yet does not split into the scheme; some
    /// branch classification is wrong but no certified non-value was found.
    InconsistentBranch {
        witness: Witness,
        trace: DecompositionTrace,
        branches: Vec<(usize, usize)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefutationReport {
    pub schema_version: u32,
    pub expr: RatExpr,
    pub w: Word,
    pub e: u64,
    pub positive_states: usize,
    pub summands: usize,
    pub branches: Vec<Branch>,
    pub scheme: Option<DecompositionScheme>,
    pub outcome: Outcome,
    /// Set when the outcome rests on the classification rather than on an
    /// exact membership oracle.
    pub heuristic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RefuteConfig {
    /// Words of `E` up to this length form the finite sample.
    pub sample_len: usize,
    /// At most this many shortest sample elements are used.
    pub sample_limit: usize,
    /// Products of up to this many sample elements are inspected.
    pub budget: usize,
    pub max_summands: usize,
    /// Accepted words up to this length are searched for non-values before a
    /// heuristic outcome is reported.
    pub fallback_len: usize,
}

impl Default for RefuteConfig {
    fn default() -> Self {
        RefuteConfig {
            sample_len: 6,
            sample_limit: 10,
            budget: 3,
            max_summands: 4096,
            fallback_len: 12,
        }
    }
}

fn check_word(w: &Word) -> Result<u64, RefuteError> {
    let rank = w.max_generator().max(1) as usize;
    match classify_word(w, rank).expect("rank covers w") {
        WordClass::Trivial => Err(RefuteError::TrivialWord(w.clone())),
        WordClass::Commutator => Err(RefuteError::CommutatorWord(w.clone())),
        WordClass::Improper => Err(RefuteError::ImproperWord(w.clone())),
        WordClass::Proper => Ok(crate::word::exponent_profile(w, rank)
            .expect("rank covers w")
            .e),
    }
}

/// Syllables of a positive word as `(generator, exponent)`.
fn runs(w: &Word) -> Vec<(u32, usize)> {
    let mut out: Vec<(u32, usize)> = Vec::new();
    for l in w.letters() {
        match out.last_mut() {
            Some((g, k)) if *g == l.generator() => *k += 1,
            _ => out.push((l.generator(), 1)),
        }
    }
    out
}

/// `K_L` and `n(L)` from a classified standard form. Returns `None` when a
/// branch was refuted.
pub fn extract_scheme(sf: &StandardForm, branches: &[Branch]) -> Option<DecompositionScheme> {
    let mut k_l = BTreeSet::new();
    for b in branches {
        match &b.classification {
            Dichotomy::Case1 { support, .. } => {
                for s in support {
                    let g = match s.factor {
                        Factor::A => 1,
                        Factor::B => 2,
                    };
                    k_l.insert(Word::power_of_generator(g, s.exp));
                }
            }
            Dichotomy::Case2 { .. } | Dichotomy::Inconclusive { .. } => {}
            Dichotomy::Refuted { .. } => return None,
        }
    }
    for s in &sf.summands {
        for a in &s.coefficients {
            for (g, k) in runs(a) {
                k_l.insert(Word::power_of_generator(g, k as i64));
            }
        }
    }
    let n = sf
        .summands
        .iter()
        .map(|s| s.stars.len() + s.coefficients.len())
        .max()
        .unwrap_or(1)
        .max(1);
    Some(DecompositionScheme { k_l, n })
}

/// `t = 1 + max x₁-exponent in K_L`, `l = n + 1`, `u = (x₁ᵗx₂)^{le}`.
pub fn witness_word(w: &Word, scheme: &DecompositionScheme) -> Result<Witness, RefuteError> {
    check_word(w)?;
    let t = scheme.max_exponent(1) + 1;
    let l = scheme.n + 1;
    let block = Word::power_of_generator(1, t as i64).mul(&Word::generator(2));
    let g = block.pow(l as i64);
    let rank = w.max_generator().max(1) as usize;
    let transcript =
        bezout_transcript(w, rank, &g).expect("proper words have a Bezout substitution");
    Ok(Witness {
        t,
        l,
        u: transcript.value.clone(),
        transcript,
    })
}

/// Whether `u = s_1 t_1 ⋯ s_n t_n` with every syllable of each `s_i` in
/// `K_L` and each `t_i` a power of one generator.
pub fn decomposable(u: &Word, scheme: &DecompositionScheme) -> Result<bool, RefuteError> {
    decompose(u, scheme).map(|t| t.decomposable)
}

pub fn decompose(
    u: &Word,
    scheme: &DecompositionScheme,
) -> Result<DecompositionTrace, RefuteError> {
    if !u.is_positive() {
        return Err(RefuteError::NotPositive(u.clone()));
    }
    let letters = u.letters();
    let len = letters.len();
    // s_ok[i][j]: every syllable of u[i..j] lies in K_L
    let mut s_ok = vec![vec![false; len + 1]; len + 1];
    for i in 0..=len {
        let mut closed_ok = true;
        let mut cur: Option<(u32, usize)> = None;
        s_ok[i][i] = true;
        for j in i..len {
            let g = letters[j].generator();
            cur = match cur {
                Some((h, k)) if h == g => Some((h, k + 1)),
                Some((h, k)) => {
                    closed_ok &= scheme.contains(h, k);
                    Some((g, 1))
                }
                None => Some((g, 1)),
            };
            let (h, k) = cur.expect("just set");
            s_ok[i][j + 1] = closed_ok && scheme.contains(h, k);
        }
    }
    // t-blocks run from i to any j inside the same syllable
    let mut run_end = vec![len; len + 1];
    for i in (0..len).rev() {
        run_end[i] = if i + 1 < len && letters[i + 1].generator() == letters[i].generator() {
            run_end[i + 1]
        } else {
            i + 1
        };
    }
    let inf = usize::MAX;
    let mut best = vec![inf; len + 1];
    let mut back: Vec<Option<(usize, usize)>> = vec![None; len + 1];
    best[0] = 0;
    let mut explored = 0usize;
    for i in 0..len {
        if best[i] == inf {
            continue;
        }
        for j in i..=len {
            if !s_ok[i][j] {
                continue;
            }
            let t_max = if j < len { run_end[j] } else { len };
            for k in j..=t_max {
                explored += 1;
                if k > i && best[i] + 1 < best[k] {
                    best[k] = best[i] + 1;
                    back[k] = Some((i, j));
                }
            }
        }
    }
    let min_pairs = (best[len] != inf).then_some(best[len]);
    let decomposable = min_pairs.is_some_and(|p| p <= scheme.n);
    let mut blocks = Vec::new();
    if min_pairs.is_some() {
        let mut k = len;
        while let Some((i, j)) = back[k] {
            blocks.push((
                Word::reduce(letters[i..j].iter().copied()),
                Word::reduce(letters[j..k].iter().copied()),
            ));
            k = i;
        }
        blocks.reverse();
    }
    Ok(DecompositionTrace {
        decomposable,
        min_pairs,
        blocks,
        states_explored: explored,
    })
}

fn to_element(fp: &FreeProduct, w: &Word) -> FPElement {
    fp.from_f2(w).expect("F₂ words")
}

/// A positive-leaf expression denoting the positive part of `expr`.
fn positive_part(expr: &RatExpr, positive: &Acceptor) -> Result<RatExpr, RefuteError> {
    if has_positive_leaves(expr) {
        return Ok(expr.clone());
    }
    let full = Acceptor::from_expr(expr, 2);
    if full.is_subset(&Acceptor::positive_words(2)) {
        return positivize_total(expr)
            .map(|p| p.expr)
            .map_err(|e| RefuteError::Positivize(e.to_string()));
    }
    Ok(positive.to_expr())
}

fn classify(
    sf: &StandardForm,
    w: &Word,
    config: &RefuteConfig,
) -> Result<Vec<Branch>, RefuteError> {
    let fp = FreeProduct::integers();
    let mut branches = Vec::new();
    for (si, s) in sf.summands.iter().enumerate() {
        for (j, factor) in s.stars.iter().enumerate() {
            let p = s.coefficients[..=j]
                .iter()
                .fold(Word::identity(), |acc, a| acc.mul(a));
            let q = s.coefficients[j + 1..]
                .iter()
                .fold(Word::identity(), |acc, a| acc.mul(a));
            let sample: Vec<FPElement> = enumerate_bounded(factor, config.sample_len)
                .map_err(|e| RefuteError::Classification(e.to_string()))?
                .into_iter()
                .filter(|x| !x.is_identity())
                .take(config.sample_limit)
                .map(|x| to_element(&fp, &x))
                .collect();
            let classification = support_dichotomy_check(
                &sample,
                &to_element(&fp, &p),
                &to_element(&fp, &q),
                w,
                config.budget,
            )
            .map_err(|e| RefuteError::Classification(e.to_string()))?;
            branches.push(Branch {
                summand: si,
                star: j,
                factor: factor.clone(),
                sample: sample.len(),
                classification,
            });
        }
    }
    Ok(branches)
}

pub fn refute(expr: &RatExpr, w: &Word) -> Result<RefutationReport, RefuteError> {
    refute_with(expr, w, &RefuteConfig::default())
}

pub fn refute_with(
    expr: &RatExpr,
    w: &Word,
    config: &RefuteConfig,
) -> Result<RefutationReport, RefuteError> {
    let e = check_word(w)?;
    if expr.max_generator() > 2 {
        return Err(RefuteError::NotOverF2(expr.max_generator()));
    }
    let fp = FreeProduct::integers();
    let positive = crate::rational::acceptor::intersect_positive(expr).minimize();
    let pos_expr = positive_part(expr, &positive)?;
    let sf = standard_form(&pos_expr);
    if sf.summands.len() > config.max_summands {
        return Err(RefuteError::TooManySummands(sf.summands.len()));
    }
    let branches = classify(&sf, w, config)?;
    let mut report = RefutationReport {
        schema_version: SCHEMA_VERSION,
        expr: expr.clone(),
        w: w.clone(),
        e,
        positive_states: positive.state_count(),
        summands: sf.summands.len(),
        branches,
        scheme: None,
        outcome: Outcome::MissingValue {
            witness: witness_word(
                w,
                &DecompositionScheme {
                    k_l: BTreeSet::new(),
                    n: 1,
                },
            )?,
        },
        heuristic: false,
    };

    for b in &report.branches {
        if let Dichotomy::Refuted {
            witness,
            certificate,
            ..
        } = &b.classification
        {
            let element = fp.to_f2(witness).expect("integer factors");
            if positive.accepts(&element) {
                report.outcome = Outcome::ForeignElement {
                    element,
                    certificate: certificate.clone(),
                    branch: Some((b.summand, b.star)),
                };
                return Ok(report);
            }
        }
    }

    let scheme = extract_scheme(&sf, &report.branches).expect("no refuted branch reached here");
    let witness = witness_word(w, &scheme)?;
    report.scheme = Some(scheme.clone());
    if !positive.accepts(&witness.u) {
        report.outcome = Outcome::MissingValue { witness };
        return Ok(report);
    }
    let trace = decompose(&witness.u, &scheme)?;
    if trace.decomposable {
        return Err(RefuteError::WitnessDecomposes(witness.u));
    }
    // the classification is wrong somewhere: look for an exact non-value first
    let query = VerbalQuery::new(FreeGroup { rank: 2 }, w.clone(), 0, 0);
    for g in positive.words_up_to_limit(config.fallback_len, 1 << 16) {
        if let Some(certificate) = query.non_value_certificate(&g) {
            report.outcome = Outcome::ForeignElement {
                element: g,
                certificate,
                branch: None,
            };
            return Ok(report);
        }
    }
    let suspects = report
        .branches
        .iter()
        .filter(|b| !matches!(b.classification, Dichotomy::Case2 { .. }))
        .map(|b| (b.summand, b.star))
        .collect();
    report.outcome = Outcome::InconsistentBranch {
        witness,
        trace,
        branches: suspects,
    };
    report.heuristic = true;
    Ok(report)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("transcript does not re-reduce: {0}")]
    Transcript(String),
    #[error("witness {0} does not have the form (x1^t x2)^(le)")]
    WitnessShape(Word),
    #[error("acceptor verdict on {word} changed to {accepted}")]
    Verdict { word: Word, accepted: bool },
    #[error("certificate for {0} does not replay")]
    Certificate(Word),
    #[error("decomposition verdict changed")]
    Decomposition,
    #[error("report inputs are invalid: {0}")]
    Input(String),
}

fn replay_witness(w: &Word, e: u64, witness: &Witness) -> Result<(), ReplayError> {
    witness
        .transcript
        .replay()
        .map_err(|err| ReplayError::Transcript(err.to_string()))?;
    let block = Word::power_of_generator(1, witness.t as i64).mul(&Word::generator(2));
    if &witness.transcript.word != w
        || witness.transcript.e != e
        || witness.transcript.base != block.pow(witness.l as i64)
        || witness.u != witness.transcript.value
    {
        return Err(ReplayError::WitnessShape(witness.u.clone()));
    }
    Ok(())
}

/// Re-derives every certificate of `report` from its inputs.
pub fn replay(report: &RefutationReport) -> Result<(), ReplayError> {
    let e = check_word(&report.w).map_err(|err| ReplayError::Input(err.to_string()))?;
    if e != report.e {
        return Err(ReplayError::Input(format!(
            "e = {e}, report says {}",
            report.e
        )));
    }
    let positive = crate::rational::acceptor::intersect_positive(&report.expr);
    match &report.outcome {
        Outcome::MissingValue { witness } => {
            replay_witness(&report.w, e, witness)?;
            if positive.accepts(&witness.u) {
                return Err(ReplayError::Verdict {
                    word: witness.u.clone(),
                    accepted: true,
                });
            }
        }
        Outcome::ForeignElement {
            element,
            certificate,
            ..
        } => {
            if !positive.accepts(element) {
                return Err(ReplayError::Verdict {
                    word: element.clone(),
                    accepted: false,
                });
            }
            if !certificate.replay(&report.w, element) {
                return Err(ReplayError::Certificate(element.clone()));
            }
        }
        Outcome::InconsistentBranch { witness, trace, .. } => {
            replay_witness(&report.w, e, witness)?;
            if !positive.accepts(&witness.u) {
                return Err(ReplayError::Verdict {
                    word: witness.u.clone(),
                    accepted: false,
                });
            }
            let scheme = report.scheme.as_ref().ok_or(ReplayError::Decomposition)?;
            let again = decompose(&witness.u, scheme).map_err(|_| ReplayError::Decomposition)?;
            if again != *trace || again.decomposable {
                return Err(ReplayError::Decomposition);
            }
        }
    }
    Ok(())
}
