//! Normal forms in a free product `G = A ∗ B` of two cyclic factors.
//!
//! Elements are stored as alternating syllable sequences. Exponents in a
//! finite factor `ℤ/m` are kept canonical in `1..m`, so syllable equality is
//! plain structural equality.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::parse::{exponent_suffix, tokens, ParseError};
use crate::word::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FpError {
    #[error("operation undefined on the identity element")]
    IdentityInput,
    #[error("finite factor order must be at least 2, got {0}")]
    BadOrder(u32),
    #[error("the F2 identification needs both factors infinite cyclic")]
    FiniteFactor,
    #[error("word uses generator x{0}; only x1, x2 map into A ∗ B")]
    GeneratorOutOfRange(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Factor {
    A,
    B,
}

impl Factor {
    pub fn other(self) -> Factor {
        match self {
            Factor::A => Factor::B,
            Factor::B => Factor::A,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorModel {
    InfiniteCyclic,
    FiniteCyclic(u32),
}

impl FactorModel {
    pub fn order(self) -> Option<u32> {
        match self {
            FactorModel::InfiniteCyclic => None,
            FactorModel::FiniteCyclic(m) => Some(m),
        }
    }
}

/// A non-identity factor element `a^exp` or `b^exp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Syllable {
    pub factor: Factor,
    pub exp: i64,
}

impl Syllable {
    pub fn new(factor: Factor, exp: i64) -> Syllable {
        Syllable { factor, exp }
    }

    pub fn a(exp: i64) -> Syllable {
        Syllable::new(Factor::A, exp)
    }

    pub fn b(exp: i64) -> Syllable {
        Syllable::new(Factor::B, exp)
    }
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.factor {
            Factor::A => "a",
            Factor::B => "b",
        };
        if self.exp == 1 {
            f.write_str(name)
        } else {
            write!(f, "{name}^{}", self.exp)
        }
    }
}

/// An element of `A ∗ B` in reduced (alternating) form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FPElement {
    syllables: Vec<Syllable>,
}

impl FPElement {
    pub fn identity() -> FPElement {
        FPElement::default()
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    /// Syllable length.
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn support(&self) -> BTreeSet<Syllable> {
        self.syllables.iter().copied().collect()
    }

    pub fn first(&self) -> Option<Syllable> {
        self.syllables.first().copied()
    }

    pub fn last(&self) -> Option<Syllable> {
        self.syllables.last().copied()
    }
}

impl fmt::Display for FPElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("1");
        }
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// `u = r_t^-1 ... r_1^-1 · core · r_1 ... r_t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreDecomposition {
    /// `(r_1, ..., r_t)`, innermost first.
    pub conjugator: Vec<Syllable>,
    pub core: FPElement,
}

/// The group `A ∗ B` with both factors cyclic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeProduct {
    pub a: FactorModel,
    pub b: FactorModel,
}

impl Default for FreeProduct {
    fn default() -> Self {
        FreeProduct::integers()
    }
}

impl FreeProduct {
    pub fn new(a: FactorModel, b: FactorModel) -> Result<FreeProduct, FpError> {
        for m in [a, b] {
            if let FactorModel::FiniteCyclic(k) = m {
                if k < 2 {
                    return Err(FpError::BadOrder(k));
                }
            }
        }
        Ok(FreeProduct { a, b })
    }

    /// `ℤ ∗ ℤ`, identified with `F2 = ⟨x1⟩ ∗ ⟨x2⟩`.
    pub fn integers() -> FreeProduct {
        FreeProduct {
            a: FactorModel::InfiniteCyclic,
            b: FactorModel::InfiniteCyclic,
        }
    }

    pub fn model(&self, factor: Factor) -> FactorModel {
        match factor {
            Factor::A => self.a,
            Factor::B => self.b,
        }
    }

    pub fn is_free(&self) -> bool {
        self.a == FactorModel::InfiniteCyclic && self.b == FactorModel::InfiniteCyclic
    }

    /// Reduces an exponent into the factor's canonical range; 0 is the identity.
    pub fn canonical_exp(&self, factor: Factor, exp: i64) -> i64 {
        match self.model(factor) {
            FactorModel::InfiniteCyclic => exp,
            FactorModel::FiniteCyclic(m) => exp.rem_euclid(m as i64),
        }
    }

    /// The syllable for `factor^exp`, or `None` when that is the identity.
    pub fn syllable(&self, factor: Factor, exp: i64) -> Option<Syllable> {
        let e = self.canonical_exp(factor, exp);
        (e != 0).then_some(Syllable { factor, exp: e })
    }

    pub fn syllable_inverse(&self, s: Syllable) -> Syllable {
        self.syllable(s.factor, -s.exp)
            .expect("inverse of a non-identity syllable is non-identity")
    }

    /// Product of two syllables of the same factor.
    pub fn syllable_mul(&self, s: Syllable, t: Syllable) -> Option<Syllable> {
        debug_assert_eq!(s.factor, t.factor);
        self.syllable(s.factor, s.exp + t.exp)
    }

    pub fn normalize(&self, syllables: impl IntoIterator<Item = Syllable>) -> FPElement {
        let mut out: Vec<Syllable> = Vec::new();
        for s in syllables {
            let Some(s) = self.syllable(s.factor, s.exp) else {
                continue;
            };
            match out.last().copied() {
                Some(top) if top.factor == s.factor => {
                    out.pop();
                    if let Some(m) = self.syllable_mul(top, s) {
                        out.push(m);
                    }
                }
                _ => out.push(s),
            }
        }
        FPElement { syllables: out }
    }

    pub fn element(&self, syllables: &[Syllable]) -> FPElement {
        self.normalize(syllables.iter().copied())
    }

    pub fn mul(&self, u: &FPElement, v: &FPElement) -> FPElement {
        self.normalize(u.syllables.iter().chain(&v.syllables).copied())
    }

    pub fn inv(&self, u: &FPElement) -> FPElement {
        FPElement {
            syllables: u
                .syllables
                .iter()
                .rev()
                .map(|&s| self.syllable_inverse(s))
                .collect(),
        }
    }

    pub fn pow(&self, u: &FPElement, k: i64) -> FPElement {
        let mut base = if k < 0 { self.inv(u) } else { u.clone() };
        let mut n = k.unsigned_abs();
        let mut acc = FPElement::identity();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// `w(g_1, ..., g_n)`. Generators beyond `images` evaluate to the identity.
    pub fn evaluate(&self, w: &Word, images: &[FPElement]) -> FPElement {
        let inverses: Vec<FPElement> = images.iter().map(|g| self.inv(g)).collect();
        self.normalize(w.letters().iter().flat_map(|l| {
            let i = l.generator() as usize - 1;
            let img = if l.is_inverse() {
                inverses.get(i)
            } else {
                images.get(i)
            };
            img.map(|g| g.syllables.clone()).unwrap_or_default()
        }))
    }

    /// `g^-1 u g`.
    pub fn conjugate(&self, u: &FPElement, g: &FPElement) -> FPElement {
        self.mul(&self.inv(g), &self.mul(u, g))
    }

    /// Syllable order reversed. An anti-automorphism that preserves syllables.
    pub fn reverse(&self, u: &FPElement) -> FPElement {
        FPElement {
            syllables: u.syllables.iter().rev().copied().collect(),
        }
    }

    pub fn core_decompose(&self, u: &FPElement) -> Result<CoreDecomposition, FpError> {
        if u.is_identity() {
            return Err(FpError::IdentityInput);
        }
        let s = &u.syllables;
        let (mut lo, mut hi) = (0, s.len());
        let mut outer = Vec::new();
        while hi - lo > 1
            && s[lo].factor == s[hi - 1].factor
            && self.syllable_mul(s[lo], s[hi - 1]).is_none()
        {
            outer.push(s[hi - 1]);
            lo += 1;
            hi -= 1;
        }
        outer.reverse();
        Ok(CoreDecomposition {
            conjugator: outer,
            core: FPElement {
                syllables: s[lo..hi].to_vec(),
            },
        })
    }

    /// Reassembles `r^-1 · core · r` from a decomposition.
    pub fn reassemble(&self, d: &CoreDecomposition) -> FPElement {
        let r = self.element(&d.conjugator);
        self.conjugate(&d.core, &r)
    }

    /// The cyclically reduced form `u^0` of the core of `u`.
    pub fn cyclic_form(&self, u: &FPElement) -> Result<FPElement, FpError> {
        let core = self.core_decompose(u)?.core;
        let s = &core.syllables;
        let m = s.len();
        if m == 1 || s[0].factor != s[m - 1].factor {
            return Ok(core);
        }
        let merged = self.syllable_mul(s[m - 1], s[0]);
        Ok(self.normalize(s[1..m - 1].iter().copied().chain(merged)))
    }

    pub fn from_f2(&self, w: &Word) -> Result<FPElement, FpError> {
        if !self.is_free() {
            return Err(FpError::FiniteFactor);
        }
        let mut syllables = Vec::new();
        for &l in w.letters() {
            let factor = match l.generator() {
                1 => Factor::A,
                2 => Factor::B,
                g => return Err(FpError::GeneratorOutOfRange(g)),
            };
            syllables.push(Syllable::new(factor, if l.is_inverse() { -1 } else { 1 }));
        }
        Ok(self.normalize(syllables))
    }

    pub fn to_f2(&self, u: &FPElement) -> Result<Word, FpError> {
        if !self.is_free() {
            return Err(FpError::FiniteFactor);
        }
        Ok(u.syllables
            .iter()
            .flat_map(|s| {
                let g = match s.factor {
                    Factor::A => 1,
                    Factor::B => 2,
                };
                std::iter::repeat_n(Letter::new(g, s.exp < 0), s.exp.unsigned_abs() as usize)
            })
            .collect())
    }

    /// Parses `a^k b^k ...` (bare `a`, `b` mean exponent 1; `1` is the identity).
    pub fn parse(&self, s: &str) -> Result<FPElement, ParseError> {
        let mut syllables = Vec::new();
        for (at, tok) in tokens(s) {
            if tok == "1" {
                continue;
            }
            let factor = match tok.as_bytes()[0] {
                b'a' => Factor::A,
                b'b' => Factor::B,
                _ => {
                    return Err(ParseError::new(
                        at,
                        format!("expected `a^k`, `b^k` or `1`, got `{tok}`"),
                    ))
                }
            };
            let exp = exponent_suffix(&tok[1..], at + 1)?;
            syllables.push(Syllable::new(factor, exp));
        }
        Ok(self.normalize(syllables))
    }

    pub fn parse_syllable(&self, s: &str) -> Result<Syllable, ParseError> {
        let u = self.parse(s)?;
        match u.syllables() {
            [one] => Ok(*one),
            _ => Err(ParseError::new(
                0,
                format!("`{s}` is not a single non-identity syllable"),
            )),
        }
    }
}
