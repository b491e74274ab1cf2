//! Sign functions on free products of cyclic groups and the constructive
//! split `ST ⊆ Pos ⟹ Su⁻¹ ⊆ Pos, uT ⊆ Pos`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::free_product::{FPElement, Factor, FactorModel, FreeProduct, Syllable};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignError {
    #[error("positive set of factor {factor:?} is invalid: {reason}")]
    BadFactorSign { factor: Factor, reason: String },
    #[error("both sets must be non-empty")]
    EmptyInput,
    #[error("precondition fails: {s} · {t} = {product} is not positive")]
    NotPositive {
        s: FPElement,
        t: FPElement,
        product: FPElement,
    },
    #[error("split construction failed: {0}")]
    ConstructionFailed(String),
}

/// Positivity rule on one cyclic factor. The identity is always positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FactorSign {
    /// `ℤ`: `a^k` is positive iff `k ≥ 0`.
    NonNegative,
    /// `ℤ/m`: the listed residues (a submonoid containing 0) are positive.
    Residues { positive: BTreeSet<i64> },
}

/// The standard free-product sign: an element is positive iff every
/// syllable is positive in its factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignModel {
    pub fp: FreeProduct,
    pub a: FactorSign,
    pub b: FactorSign,
}

fn default_sign(m: FactorModel) -> FactorSign {
    match m {
        FactorModel::InfiniteCyclic => FactorSign::NonNegative,
        FactorModel::FiniteCyclic(k) => FactorSign::Residues {
            positive: (0..k as i64).collect(),
        },
    }
}

impl SignModel {
    /// `ℤ` factors use non-negative exponents; finite factors are entirely positive.
    pub fn standard(fp: FreeProduct) -> SignModel {
        SignModel {
            fp,
            a: default_sign(fp.a),
            b: default_sign(fp.b),
        }
    }

    pub fn new(fp: FreeProduct, a: FactorSign, b: FactorSign) -> Result<SignModel, SignError> {
        for (factor, sign) in [(Factor::A, &a), (Factor::B, &b)] {
            let bad = |reason: &str| SignError::BadFactorSign {
                factor,
                reason: reason.to_string(),
            };
            match (fp.model(factor), sign) {
                (FactorModel::InfiniteCyclic, FactorSign::NonNegative) => {}
                (FactorModel::FiniteCyclic(m), FactorSign::Residues { positive }) => {
                    let m = m as i64;
                    if !positive.contains(&0) {
                        return Err(bad("must contain the identity"));
                    }
                    if positive.iter().any(|&r| !(0..m).contains(&r)) {
                        return Err(bad("residues must lie in 0..m"));
                    }
                    for &x in positive {
                        for &y in positive {
                            if !positive.contains(&((x + y) % m)) {
                                return Err(bad("not closed under the group operation"));
                            }
                        }
                    }
                }
                _ => return Err(bad("rule does not match the factor model")),
            }
        }
        Ok(SignModel { fp, a, b })
    }

    pub fn factor_sign(&self, factor: Factor) -> &FactorSign {
        match factor {
            Factor::A => &self.a,
            Factor::B => &self.b,
        }
    }

    /// Positivity of `factor^exp`; `exp` need not be canonical.
    pub fn factor_positive(&self, factor: Factor, exp: i64) -> bool {
        let e = self.fp.canonical_exp(factor, exp);
        match self.factor_sign(factor) {
            FactorSign::NonNegative => e >= 0,
            FactorSign::Residues { positive } => positive.contains(&e),
        }
    }

    pub fn syllable_positive(&self, s: Syllable) -> bool {
        self.factor_positive(s.factor, s.exp)
    }

    pub fn is_positive(&self, u: &FPElement) -> bool {
        u.syllables().iter().all(|&s| self.syllable_positive(s))
    }

    /// 1-based index of the first negative syllable.
    pub fn first_negative(&self, u: &FPElement) -> Option<usize> {
        u.syllables()
            .iter()
            .position(|&s| !self.syllable_positive(s))
            .map(|i| i + 1)
    }

    /// 1-based index of the last negative syllable.
    pub fn last_negative(&self, u: &FPElement) -> Option<usize> {
        u.syllables()
            .iter()
            .rposition(|&s| !self.syllable_positive(s))
            .map(|i| i + 1)
    }

    /// Some `b` with `s - b` and `b + t` positive in the factor for all
    /// `s ∈ ss`, `t ∈ ts`.
    pub fn factor_split(&self, factor: Factor, ss: &[i64], ts: &[i64]) -> Option<i64> {
        let ok = |b: i64| {
            ss.iter().all(|&s| self.factor_positive(factor, s - b))
                && ts.iter().all(|&t| self.factor_positive(factor, b + t))
        };
        let b = match self.fp.model(factor) {
            FactorModel::InfiniteCyclic => -ts.iter().copied().min().unwrap_or(0),
            FactorModel::FiniteCyclic(m) => (0..m as i64).find(|&b| ok(b))?,
        };
        ok(b).then_some(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitCase {
    BothPositive,
    /// The deepest negative syllables on both sides sit at the same depth.
    EqualDepth,
    /// The right-hand side reaches strictly deeper.
    DeeperRight,
}

/// How a splitting element was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitTrace {
    /// Deepest position of a first negative syllable in `S`, counted from the right.
    pub i0: usize,
    /// Deepest position of a last negative syllable in `T`.
    pub j0: usize,
    /// Common prefix that every element of `S` cancels.
    pub c: FPElement,
    /// Factor where the middle split happens, with the chosen exponent.
    pub factor: Option<Factor>,
    pub b: i64,
    pub u: FPElement,
    pub case: SplitCase,
    /// Solved on the reversed problem `(rev T, rev S)`.
    pub mirrored: bool,
}

fn i_value(sign: &SignModel, s: &FPElement) -> usize {
    sign.first_negative(s).map_or(0, |i| s.len() - i + 1)
}

fn j_value(sign: &SignModel, t: &FPElement) -> usize {
    sign.last_negative(t).unwrap_or(0)
}

/// Finds `u` with `S u⁻¹ ⊆ Pos` and `u T ⊆ Pos`, given `ST ⊆ Pos`.
pub fn split_product(
    s: &[FPElement],
    t: &[FPElement],
    sign: &SignModel,
) -> Result<SplitTrace, SignError> {
    if s.is_empty() || t.is_empty() {
        return Err(SignError::EmptyInput);
    }
    let fp = &sign.fp;
    for x in s {
        for y in t {
            let p = fp.mul(x, y);
            if !sign.is_positive(&p) {
                return Err(SignError::NotPositive {
                    s: x.clone(),
                    t: y.clone(),
                    product: p,
                });
            }
        }
    }
    let i0 = s.iter().map(|x| i_value(sign, x)).max().unwrap_or(0);
    let j0 = t.iter().map(|y| j_value(sign, y)).max().unwrap_or(0);
    let trace = if i0 == 0 && j0 == 0 {
        SplitTrace {
            i0,
            j0,
            c: FPElement::identity(),
            factor: None,
            b: 0,
            u: FPElement::identity(),
            case: SplitCase::BothPositive,
            mirrored: false,
        }
    } else if i0 <= j0 {
        split_deeper_right(s, t, sign, i0, j0)?
    } else {
        let rs: Vec<FPElement> = t.iter().map(|y| fp.reverse(y)).collect();
        let rt: Vec<FPElement> = s.iter().map(|x| fp.reverse(x)).collect();
        let inner = split_deeper_right(&rs, &rt, sign, j0, i0)?;
        SplitTrace {
            i0,
            j0,
            u: fp.inv(&fp.reverse(&inner.u)),
            mirrored: true,
            ..inner
        }
    };
    for x in s {
        let p = fp.mul(x, &fp.inv(&trace.u));
        if !sign.is_positive(&p) {
            return Err(SignError::ConstructionFailed(format!(
                "{x} · u⁻¹ = {p} is not positive"
            )));
        }
    }
    for y in t {
        let p = fp.mul(&trace.u, y);
        if !sign.is_positive(&p) {
            return Err(SignError::ConstructionFailed(format!(
                "u · {y} = {p} is not positive"
            )));
        }
    }
    Ok(trace)
}

fn split_deeper_right(
    s: &[FPElement],
    t: &[FPElement],
    sign: &SignModel,
    i0: usize,
    j0: usize,
) -> Result<SplitTrace, SignError> {
    let fp = &sign.fp;
    let deepest = t
        .iter()
        .find(|y| j_value(sign, y) == j0)
        .expect("j0 is attained");
    let c = fp.element(&deepest.syllables()[..j0 - 1]);
    let factor = deepest.syllables()[j0 - 1].factor;

    let mut ss = Vec::with_capacity(s.len());
    for x in s {
        let xc = fp.mul(x, &c);
        match xc.last() {
            Some(l) if l.factor == factor => ss.push(l.exp),
            _ => {
                return Err(SignError::ConstructionFailed(format!(
                    "{x} does not end in the inverse of the common prefix {c}"
                )))
            }
        }
    }
    let c_inv = fp.inv(&c);
    let ts: Vec<i64> = t
        .iter()
        .map(|y| match fp.mul(&c_inv, y).first() {
            Some(f) if f.factor == factor => f.exp,
            _ => 0,
        })
        .collect();
    let b = sign.factor_split(factor, &ss, &ts).ok_or_else(|| {
        SignError::ConstructionFailed(format!("no middle element in factor {factor:?}"))
    })?;
    let u = fp.mul(&fp.normalize([Syllable::new(factor, b)]), &c_inv);
    Ok(SplitTrace {
        i0,
        j0,
        c,
        factor: Some(factor),
        b,
        u,
        case: if i0 == j0 {
            SplitCase::EqualDepth
        } else {
            SplitCase::DeeperRight
        },
        mirrored: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zz() -> SignModel {
        SignModel::standard(FreeProduct::integers())
    }

    fn el(s: &str) -> FPElement {
        FreeProduct::integers().parse(s).unwrap()
    }

    #[test]
    fn positivity_examples() {
        let sg = zz();
        assert!(sg.is_positive(&FPElement::identity()));
        assert!(sg.is_positive(&el("a^2 b")));
        assert!(!sg.is_positive(&el("a^2 b^-1")));
    }

    #[test]
    fn both_positive_gives_identity() {
        let tr = split_product(&[el("a b")], &[el("b^2")], &zz()).unwrap();
        assert_eq!(tr.case, SplitCase::BothPositive);
        assert!(tr.u.is_identity());
    }

    #[test]
    fn split_through_negative_syllable() {
        let sg = zz();
        let s = [el("a b^-2")];
        let t = [el("b^2 a")];
        let tr = split_product(&s, &t, &sg).unwrap();
        let fp = sg.fp;
        assert!(sg.is_positive(&fp.mul(&s[0], &fp.inv(&tr.u))));
        assert!(sg.is_positive(&fp.mul(&tr.u, &t[0])));
    }

    #[test]
    fn mirrored_case() {
        let sg = zz();
        // S reaches deeper than T
        let s = [el("a b^-1 a^-1"), el("a^2 b a^-1")];
        let t = [el("a b a")];
        let tr = split_product(&s, &t, &sg).unwrap();
        assert!(tr.mirrored);
        assert!(tr.i0 > tr.j0);
    }

    #[test]
    fn precondition_reports_witness() {
        let err = split_product(&[el("a")], &[el("b^-1")], &zz()).unwrap_err();
        assert!(matches!(err, SignError::NotPositive { .. }));
        assert_eq!(
            split_product(&[], &[el("a")], &zz()),
            Err(SignError::EmptyInput)
        );
    }

    #[test]
    fn finite_factor_signs() {
        let fp =
            FreeProduct::new(FactorModel::FiniteCyclic(4), FactorModel::InfiniteCyclic).unwrap();
        let even = FactorSign::Residues {
            positive: [0, 2].into_iter().collect(),
        };
        let sg = SignModel::new(fp, even, FactorSign::NonNegative).unwrap();
        assert!(sg.factor_positive(Factor::A, 2));
        assert!(!sg.factor_positive(Factor::A, 1));
        let s = [fp.parse("b a").unwrap()];
        let t = [fp.parse("a^3 b").unwrap()];
        let tr = split_product(&s, &t, &sg).unwrap();
        assert!(sg.is_positive(&fp.mul(&s[0], &fp.inv(&tr.u))));
        assert!(sg.is_positive(&fp.mul(&tr.u, &t[0])));
        let bad = FactorSign::Residues {
            positive: [0, 1].into_iter().collect(),
        };
        assert!(SignModel::new(fp, bad, FactorSign::NonNegative).is_err());
    }

    #[test]
    fn integer_sign_is_strongly_reduced_on_a_window() {
        let sg = zz();
        for x in -30..0 {
            for y in -30..0 {
                assert!(!sg.factor_positive(Factor::A, x + y));
            }
        }
    }
}
