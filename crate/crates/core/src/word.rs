//! Exact arithmetic in free groups `F(X)`.
//!
//! A [`Word`] is always freely reduced: every constructor reduces, so equality
//! of `Word`s is equality of group elements. Generators are `x1, x2, ...`;
//! the identity prints as `1`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::parse::{exponent_suffix, tokens, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("generator x{generator} exceeds rank {rank}")]
    GeneratorOutOfRange { generator: u32, rank: usize },
    #[error("e(w) = 0: commutator words have no Bezout substitution")]
    CommutatorWord,
    #[error("Bezout substitution produced {got}, expected {expected}")]
    BezoutMismatch { got: Word, expected: Word },
}

/// A letter `x_i` or `x_i^-1`, stored as a signed generator index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter(i32);

impl Letter {
    pub fn new(generator: u32, inverse: bool) -> Letter {
        assert!(
            generator >= 1 && generator <= i32::MAX as u32,
            "generator index must be >= 1"
        );
        let g = generator as i32;
        Letter(if inverse { -g } else { g })
    }

    pub fn generator(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    /// Position of this letter in the alphabet `x1, x1^-1, x2, x2^-1, ...`.
    pub fn alphabet_index(self) -> usize {
        2 * (self.generator() as usize - 1) + self.is_inverse() as usize
    }

    pub fn from_alphabet_index(index: usize) -> Letter {
        Letter::new((index / 2 + 1) as u32, index % 2 == 1)
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.generator(), self.is_inverse()).cmp(&(other.generator(), other.is_inverse()))
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inverse() {
            write!(f, "x{}^-1", self.generator())
        } else {
            write!(f, "x{}", self.generator())
        }
    }
}

/// A freely reduced word. Ordered shortlex.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Word {
        Word::default()
    }

    pub fn generator(index: u32) -> Word {
        Word {
            letters: vec![Letter::new(index, false)],
        }
    }

    /// `x_index^exp`.
    pub fn power_of_generator(index: u32, exp: i64) -> Word {
        let letter = Letter::new(index, exp < 0);
        Word {
            letters: vec![letter; exp.unsigned_abs() as usize],
        }
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// True when no inverse letter occurs (an element of the free monoid `X*`).
    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|l| !l.is_inverse())
    }

    pub fn max_generator(&self) -> u32 {
        self.letters
            .iter()
            .map(|l| l.generator())
            .max()
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut k = 0;
        let (a, b) = (&self.letters, &other.letters);
        while k < a.len() && k < b.len() && a[a.len() - 1 - k] == b[k].inverse() {
            k += 1;
        }
        let mut letters = Vec::with_capacity(a.len() + b.len() - 2 * k);
        letters.extend_from_slice(&a[..a.len() - k]);
        letters.extend_from_slice(&b[k..]);
        Word { letters }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        if k == 0 || self.is_identity() {
            return Word::identity();
        }
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let (conj, core) = base.cyclic_reduce();
        let n = k.unsigned_abs() as usize;
        let mut letters = Vec::with_capacity(2 * conj.len() + n * core.len());
        letters.extend(conj.inverse().letters);
        for _ in 0..n {
            letters.extend_from_slice(&core.letters);
        }
        letters.extend_from_slice(&conj.letters);
        Word { letters }
    }

    /// `g^-1 · self · g`.
    pub fn conjugate(&self, g: &Word) -> Word {
        g.inverse().mul(self).mul(g)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&a), Some(&b)) => self.letters.len() == 1 || a != b.inverse(),
            _ => true,
        }
    }

    /// Returns `(conjugator, core)` with `self = conjugator^-1 · core · conjugator`
    /// and `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let l = &self.letters;
        let mut k = 0;
        while 2 * k + 1 < l.len() && l[k] == l[l.len() - 1 - k].inverse() {
            k += 1;
        }
        let conjugator = Word {
            letters: l[l.len() - k..].to_vec(),
        };
        let core = Word {
            letters: l[k..l.len() - k].to_vec(),
        };
        (conjugator, core)
    }

    /// Signed number of occurrences of `x_generator`.
    pub fn exponent_sum(&self, generator: u32) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.generator() == generator)
            .map(|l| if l.is_inverse() { -1 } else { 1 })
            .sum()
    }

    /// The endomorphism image under `x_i ↦ images[i-1]`. Generators beyond
    /// `images.len()` are fixed.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Word::identity();
        for l in &self.letters {
            let g = l.generator() as usize;
            let img = if g <= images.len() {
                images[g - 1].clone()
            } else {
                Word {
                    letters: vec![Letter::new(g as u32, false)],
                }
            };
            let img = if l.is_inverse() { img.inverse() } else { img };
            out = out.mul(&img);
        }
        out
    }

    /// The unique `h` with `h^e = self`, if it exists.
    pub fn root(&self, e: u32) -> Option<Word> {
        assert!(e >= 1, "root degree must be positive");
        let (conj, core) = self.cyclic_reduce();
        let e = e as usize;
        if core.len() % e != 0 {
            return None;
        }
        let m = core.len() / e;
        let prefix = &core.letters[..m];
        if m > 0 && core.letters.chunks(m).any(|c| c != prefix) {
            return None;
        }
        let h = Word {
            letters: prefix.to_vec(),
        };
        Some(h.conjugate(&conj))
    }

    fn runs(&self) -> Vec<(Letter, usize)> {
        let mut runs: Vec<(Letter, usize)> = Vec::new();
        for &l in &self.letters {
            match runs.last_mut() {
                Some((prev, n)) if *prev == l => *n += 1,
                _ => runs.push((l, 1)),
            }
        }
        runs
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word::reduce(iter)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("1");
        }
        for (i, (l, n)) in self.runs().into_iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let exp = if l.is_inverse() {
                -(n as i64)
            } else {
                n as i64
            };
            if exp == 1 {
                write!(f, "x{}", l.generator())?;
            } else {
                write!(f, "x{}^{}", l.generator(), exp)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Word, ParseError> {
        let mut letters = Vec::new();
        for (at, tok) in tokens(s) {
            if tok == "1" {
                continue;
            }
            let Some(body) = tok.strip_prefix('x') else {
                return Err(ParseError::new(
                    at,
                    format!("expected `x<k>` or `1`, got `{tok}`"),
                ));
            };
            let digits_end = body
                .find(|c: char| !c.is_ascii_digit())
                .unwrap_or(body.len());
            let generator: u32 = body[..digits_end]
                .parse()
                .map_err(|_| ParseError::new(at + 1, "missing generator index"))?;
            if generator == 0 || generator > i32::MAX as u32 {
                return Err(ParseError::new(at + 1, "generator index must be >= 1"));
            }
            let exp = exponent_suffix(&body[digits_end..], at + 1 + digits_end)?;
            let letter = Letter::new(generator, exp < 0);
            letters.extend(std::iter::repeat_n(letter, exp.unsigned_abs() as usize));
        }
        Ok(Word::reduce(letters))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exponent sums `t_i`, their gcd `e`, and Bezout coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentProfile {
    pub rank: usize,
    pub exponents: Vec<i64>,
    pub e: u64,
    pub bezout: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WordClass {
    Trivial,
    Commutator,
    Improper,
    Proper,
}

fn check_rank(w: &Word, rank: usize) -> Result<(), WordError> {
    let g = w.max_generator();
    if g as usize > rank {
        return Err(WordError::GeneratorOutOfRange { generator: g, rank });
    }
    Ok(())
}

/// Extended Euclid on non-negative inputs: `(g, x, y)` with `a x + b y = g`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0, s0, t0)
}

pub fn exponent_profile(w: &Word, rank: usize) -> Result<ExponentProfile, WordError> {
    check_rank(w, rank)?;
    let exponents: Vec<i64> = (1..=rank as u32).map(|i| w.exponent_sum(i)).collect();

    // Fold the extended gcd left to right, keeping the newest coefficient
    // as small as possible at each step.
    let mut g = 0i64;
    let mut coeffs = vec![0i64; rank];
    for (i, &t) in exponents.iter().enumerate() {
        if t == 0 {
            continue;
        }
        let a = t.abs();
        if g == 0 {
            g = a;
            coeffs[i] = t.signum();
            continue;
        }
        let (g2, mut x, mut y) = ext_gcd(g, a);
        let step_y = g / g2;
        let step_x = a / g2;
        let k = (y as f64 / step_y as f64).round() as i64;
        y -= k * step_y;
        x += k * step_x;
        for c in coeffs.iter_mut().take(i) {
            *c *= x;
        }
        coeffs[i] = y * t.signum();
        g = g2;
    }
    let e = g as u64;
    let bezout = (e > 0).then_some(coeffs);
    Ok(ExponentProfile {
        rank,
        exponents,
        e,
        bezout,
    })
}

pub fn classify_word(w: &Word, rank: usize) -> Result<WordClass, WordError> {
    let p = exponent_profile(w, rank)?;
    Ok(if w.is_identity() {
        WordClass::Trivial
    } else {
        match p.e {
            0 => WordClass::Commutator,
            1 => WordClass::Improper,
            _ => WordClass::Proper,
        }
    })
}

/// A replayable record of `w(g^{r_1}, ..., g^{r_n}) = g^e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BezoutTranscript {
    pub word: Word,
    pub rank: usize,
    pub base: Word,
    pub coefficients: Vec<i64>,
    pub images: Vec<Word>,
    pub e: u64,
    pub value: Word,
}

impl BezoutTranscript {
    /// Recomputes the substitution from scratch and checks `value = base^e`.
    pub fn replay(&self) -> Result<(), WordError> {
        let images: Vec<Word> = self
            .coefficients
            .iter()
            .map(|&r| self.base.pow(r))
            .collect();
        let got = self.word.substitute(&images);
        let expected = self.base.pow(self.e as i64);
        if images != self.images || got != self.value || got != expected {
            return Err(WordError::BezoutMismatch { got, expected });
        }
        Ok(())
    }
}

pub fn bezout_transcript(w: &Word, rank: usize, g: &Word) -> Result<BezoutTranscript, WordError> {
    let p = exponent_profile(w, rank)?;
    let coefficients = p.bezout.ok_or(WordError::CommutatorWord)?;
    let images: Vec<Word> = coefficients.iter().map(|&r| g.pow(r)).collect();
    let value = w.substitute(&images);
    let expected = g.pow(p.e as i64);
    if value != expected {
        return Err(WordError::BezoutMismatch {
            got: value,
            expected,
        });
    }
    Ok(BezoutTranscript {
        word: w.clone(),
        rank,
        base: g.clone(),
        coefficients,
        images,
        e: p.e,
        value,
    })
}

/// Substitutes `x_i ↦ g^{r_i}` into `w`; the result is checked to equal `g^e`.
pub fn bezout_substitution(w: &Word, rank: usize, g: &Word) -> Result<Word, WordError> {
    bezout_transcript(w, rank, g).map(|t| t.value)
}

pub fn root_extract(u: &Word, e: u32) -> Option<Word> {
    u.root(e)
}

/// If `w` is `x_i^k` for a single generator, returns `(i, k)`.
pub fn as_generator_power(w: &Word) -> Option<(u32, i64)> {
    let first = *w.letters().first()?;
    w.letters().iter().all(|&l| l == first).then(|| {
        (
            first.generator(),
            if first.is_inverse() {
                -(w.len() as i64)
            } else {
                w.len() as i64
            },
        )
    })
}
