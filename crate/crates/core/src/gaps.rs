//! Gap functions `δ_{b,k}`, `γ_{b,e}` on free products and the experiments
//! built on them.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::free_product::{FPElement, FpError, FreeProduct, Syllable};
use crate::sample;
use crate::sign::SignModel;
use crate::word::{classify_word, exponent_profile, root_extract, Word, WordClass};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GapError {
    #[error("{0} is not a syllable of this free product")]
    InvalidSyllable(Syllable),
    #[error("{0} is its own inverse")]
    SelfInverse(Syllable),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("word {word} is {class:?}; a proper word with e >= 2 is required")]
    NotProper { word: Word, class: WordClass },
    #[error("{0} is not positive")]
    NotPositive(FPElement),
    #[error("the core of v must have syllable length at least 2")]
    ShortCore,
    #[error("supp(u0) is contained in supp(v0); no distinguishing syllable")]
    NoDistinguishingSyllable,
    #[error(transparent)]
    Fp(#[from] FpError),
}

/// `k ↦ (δ_{b,k}, δ_{b⁻¹,k})` for the nonzero entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapProfile {
    pub b: Syllable,
    pub table: BTreeMap<usize, (usize, usize)>,
}

impl GapProfile {
    /// Number of `k` with `δ_{b,k} ≢ δ_{b⁻¹,k} (mod e)`.
    pub fn gamma(&self, e: u64) -> usize {
        let e = e as usize;
        self.table.values().filter(|(p, n)| p % e != n % e).count()
    }

    pub fn max_k(&self) -> usize {
        self.table.keys().next_back().copied().unwrap_or(0)
    }
}

fn check_syllable(fp: &FreeProduct, b: Syllable) -> Result<(), GapError> {
    if fp.syllable(b.factor, b.exp) != Some(b) {
        return Err(GapError::InvalidSyllable(b));
    }
    Ok(())
}

/// Half-distances between consecutive occurrences of `target`.
fn gap_lengths(u: &FPElement, target: Syllable) -> Vec<usize> {
    let pos: Vec<usize> = u
        .syllables()
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == target)
        .map(|(i, _)| i)
        .collect();
    pos.windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            debug_assert!(d % 2 == 0, "same-factor syllables sit at even distance");
            d / 2
        })
        .collect()
}

pub fn gap_profile(fp: &FreeProduct, u: &FPElement, b: Syllable) -> Result<GapProfile, GapError> {
    check_syllable(fp, b)?;
    let binv = fp.syllable_inverse(b);
    let mut table: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for k in gap_lengths(u, b) {
        table.entry(k).or_default().0 += 1;
    }
    if binv != b {
        for k in gap_lengths(u, binv) {
            table.entry(k).or_default().1 += 1;
        }
    } else {
        for (p, n) in table.values_mut() {
            *n = *p;
        }
    }
    Ok(GapProfile { b, table })
}

pub fn gamma(fp: &FreeProduct, u: &FPElement, b: Syllable, e: u64) -> Result<usize, GapError> {
    if e < 2 {
        return Err(GapError::BadModulus(e));
    }
    if fp.syllable_inverse(b) == b {
        return Err(GapError::SelfInverse(b));
    }
    Ok(gap_profile(fp, u, b)?.gamma(e))
}

fn proper_e(w: &Word) -> Result<u64, GapError> {
    let rank = w.max_generator().max(1) as usize;
    let class = classify_word(w, rank).expect("rank covers w");
    if class != WordClass::Proper {
        return Err(GapError::NotProper {
            word: w.clone(),
            class,
        });
    }
    Ok(exponent_profile(w, rank).expect("rank covers w").e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanConfig {
    pub seed: u64,
    pub samples: usize,
    /// Largest syllable length of each substituted element.
    pub max_len: usize,
    /// Largest absolute exponent of a sampled syllable.
    pub exp_bound: i64,
    /// Substitute only positive elements.
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanSample {
    #[serde(rename = "sample_id")]
    pub id: usize,
    pub syllable_length: usize,
    pub gamma: usize,
    pub max_k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub w: Word,
    pub e: u64,
    pub b: Syllable,
    pub config: ScanConfig,
    pub max_gamma: usize,
    /// `γ ↦ number of samples`.
    pub histogram: BTreeMap<usize, usize>,
    pub samples: Vec<ScanSample>,
}

/// `γ_{b,e(w)}` on random values of `w` in `fp`.
pub fn criterion_scan(
    fp: &FreeProduct,
    w: &Word,
    b: Syllable,
    config: &ScanConfig,
) -> Result<ScanReport, GapError> {
    let e = proper_e(w)?;
    check_syllable(fp, b)?;
    if fp.syllable_inverse(b) == b {
        return Err(GapError::SelfInverse(b));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let rank = w.max_generator() as usize;
    let mut samples = Vec::with_capacity(config.samples);
    let mut histogram = BTreeMap::new();
    for id in 0..config.samples {
        let images: Vec<FPElement> = (0..rank)
            .map(|_| {
                if config.positive {
                    sample::positive_fp(&mut rng, fp, config.max_len, config.exp_bound)
                } else {
                    sample::fp_element(&mut rng, fp, config.max_len, config.exp_bound)
                }
            })
            .collect();
        let value = fp.evaluate(w, &images);
        let profile = gap_profile(fp, &value, b)?;
        let g = profile.gamma(e);
        *histogram.entry(g).or_insert(0) += 1;
        samples.push(ScanSample {
            id,
            syllable_length: value.len(),
            gamma: g,
            max_k: profile.max_k(),
        });
    }
    Ok(ScanReport {
        w: w.clone(),
        e,
        b,
        config: *config,
        max_gamma: histogram.keys().next_back().copied().unwrap_or(0),
        histogram,
        samples,
    })
}

/// The largest `γ_{b,e}` over all `h^e` of syllable length at most
/// `max_len`, where `h` ranges over elements whose syllable exponents lie in
/// `±1..=exp_bound`. Returns the maximum and one element attaining it.
pub fn exhaustive_power_gamma(
    fp: &FreeProduct,
    e: u64,
    b: Syllable,
    max_len: usize,
    exp_bound: i64,
) -> Result<(usize, FPElement), GapError> {
    if e < 2 {
        return Err(GapError::BadModulus(e));
    }
    check_syllable(fp, b)?;
    if fp.syllable_inverse(b) == b {
        return Err(GapError::SelfInverse(b));
    }
    let alphabet: Vec<Syllable> = [
        crate::free_product::Factor::A,
        crate::free_product::Factor::B,
    ]
    .into_iter()
    .flat_map(|f| (-exp_bound..=exp_bound).filter_map(move |x| fp.syllable(f, x)))
    .collect::<BTreeSet<_>>()
    .into_iter()
    .collect();
    // h = c⁻¹ k c with k the core, so h^e = c⁻¹ k^e c and |h^e| = 2|c| + |k^e|
    let mut best = (0, FPElement::identity());
    let mut seen: BTreeSet<FPElement> = BTreeSet::new();
    let mut ks = Vec::new();
    // a core of length s ≥ 2 has |k^e| ≥ e·s − (e − 1)
    let k_max = max_len.div_ceil(e as usize);
    alternating(&alphabet, k_max.max(1), &mut Vec::new(), &mut ks);
    for k in &ks {
        let ke = fp.pow(&fp.element(k), e as i64);
        if ke.len() > max_len {
            continue;
        }
        let t_max = (max_len - ke.len()) / 2;
        let mut cs = Vec::new();
        alternating(&alphabet, t_max, &mut Vec::new(), &mut cs);
        for c in &cs {
            let c = fp.element(c);
            let value = fp.conjugate(&ke, &c);
            if value.len() > max_len || !seen.insert(value.clone()) {
                continue;
            }
            let g = gap_profile(fp, &value, b)?.gamma(e);
            if g > best.0 {
                best = (g, value);
            }
        }
    }
    Ok(best)
}

/// Every alternating syllable sequence over `alphabet` of length at most `max_len`.
fn alternating(
    alphabet: &[Syllable],
    max_len: usize,
    cur: &mut Vec<Syllable>,
    out: &mut Vec<Vec<Syllable>>,
) {
    out.push(cur.clone());
    if cur.len() == max_len {
        return;
    }
    for &s in alphabet {
        if cur.last().is_some_and(|l| l.factor == s.factor) {
            continue;
        }
        cur.push(s);
        alternating(alphabet, max_len, cur, out);
        cur.pop();
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyMember {
    pub n: usize,
    pub element: FPElement,
    pub syllable_length: usize,
    pub gamma: usize,
    /// Whether the member is an `e`-th power, decided exactly in `F₂`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub is_power: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub b: Syllable,
    pub e: u64,
    pub members: Vec<FamilyMember>,
}

impl FamilyReport {
    pub fn gammas(&self) -> Vec<usize> {
        self.members.iter().map(|m| m.gamma).collect()
    }

    pub fn non_decreasing(&self) -> bool {
        self.members.windows(2).all(|w| w[0].gamma <= w[1].gamma)
    }

    pub fn strict_increases(&self) -> usize {
        self.members
            .windows(2)
            .filter(|w| w[0].gamma < w[1].gamma)
            .count()
    }
}

/// Which family shape [`unbounded_family`] builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyShape {
    /// `p·uu·vⁿ·uu·q`.
    Single,
    /// `p·uu·v¹·uu·v²·uu ⋯ vⁿ·uu·q`: one long gap per exponent up to `n`.
    Cumulative,
}

/// A syllable of `supp(u⁰) ∖ supp(v⁰)` that differs from its inverse.
pub fn distinguishing_syllable(
    fp: &FreeProduct,
    u: &FPElement,
    v: &FPElement,
) -> Result<Syllable, GapError> {
    let su = fp.cyclic_form(u)?.support();
    let sv = fp.cyclic_form(v)?.support();
    su.difference(&sv)
        .copied()
        .find(|&s| fp.syllable_inverse(s) != s)
        .ok_or(GapError::NoDistinguishingSyllable)
}

#[allow(clippy::too_many_arguments)]
pub fn unbounded_family(
    fp: &FreeProduct,
    p: &FPElement,
    u: &FPElement,
    v: &FPElement,
    q: &FPElement,
    n_max: usize,
    e: u64,
    shape: FamilyShape,
) -> Result<FamilyReport, GapError> {
    if e < 2 {
        return Err(GapError::BadModulus(e));
    }
    let sign = SignModel::standard(*fp);
    for x in [p, u, v, q] {
        if !sign.is_positive(x) {
            return Err(GapError::NotPositive(x.clone()));
        }
    }
    if v.is_identity() || fp.core_decompose(v)?.core.len() < 2 {
        return Err(GapError::ShortCore);
    }
    let b = distinguishing_syllable(fp, u, v)?;
    let uu = fp.mul(u, u);
    let mut members = Vec::with_capacity(n_max);
    let mut acc = fp.mul(p, &uu);
    for n in 1..=n_max {
        let element = match shape {
            FamilyShape::Single => fp.mul(&fp.mul(&acc, &fp.pow(v, n as i64)), &fp.mul(&uu, q)),
            FamilyShape::Cumulative => {
                acc = fp.mul(&acc, &fp.mul(&fp.pow(v, n as i64), &uu));
                fp.mul(&acc, q)
            }
        };
        let gamma = gap_profile(fp, &element, b)?.gamma(e);
        let is_power = fp
            .to_f2(&element)
            .ok()
            .map(|w| root_extract(&w, e as u32).is_some());
        members.push(FamilyMember {
            n,
            syllable_length: element.len(),
            element,
            gamma,
            is_power,
        });
    }
    Ok(FamilyReport { b, e, members })
}
