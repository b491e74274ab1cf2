//! Verbal sets `w[G]`: bounded enumeration, membership with exact negative
//! certificates, `w`-length, abelianized data and the support dichotomy for
//! positive stars.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::free_product::{FPElement, Factor, FactorModel, FreeProduct, Syllable};
use crate::gaps::distinguishing_syllable;
use crate::sign::SignModel;
use crate::word::{as_generator_power, exponent_profile, root_extract, Letter, Word};

/// Largest number of substitution tuples or intermediate products examined.
pub const MAX_WORK: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerbalError {
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("{0} is not positive")]
    NotPositive(FPElement),
    #[error("dichotomy checks need integer factors")]
    FiniteFactor,
}

/// A group in which words can be evaluated and balls enumerated.
pub trait GroupModel {
    type Elem: Clone + Eq + Ord + Hash + fmt::Display + fmt::Debug;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn evaluate(&self, w: &Word, images: &[Self::Elem]) -> Self::Elem;
    /// All elements of length at most `radius`.
    fn ball(&self, radius: usize) -> Vec<Self::Elem>;
    /// Image in the abelianization as `(value, modulus)` per coordinate;
    /// modulus 0 stands for `ℤ`.
    fn abelian_image(&self, g: &Self::Elem) -> Vec<(i64, u64)>;
    /// `Some(root)` or `Some(None)` when roots are decidable here, `None` otherwise.
    fn root(&self, g: &Self::Elem, e: u32) -> Option<Option<Self::Elem>>;
}

/// `F(x1, ..., x_rank)`; length is letter length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeGroup {
    pub rank: u32,
}

impl GroupModel for FreeGroup {
    type Elem = Word;

    fn identity(&self) -> Word {
        Word::identity()
    }

    fn mul(&self, a: &Word, b: &Word) -> Word {
        a.mul(b)
    }

    fn inv(&self, a: &Word) -> Word {
        a.inverse()
    }

    fn evaluate(&self, w: &Word, images: &[Word]) -> Word {
        w.substitute(images)
    }

    fn ball(&self, radius: usize) -> Vec<Word> {
        let mut out = vec![Word::identity()];
        let mut layer = vec![Word::identity()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for w in &layer {
                for g in 1..=self.rank {
                    for inverse in [false, true] {
                        let l = Letter::new(g, inverse);
                        if w.letters().last() == Some(&l.inverse()) {
                            continue;
                        }
                        next.push(Word::reduce(w.letters().iter().copied().chain([l])));
                    }
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    fn abelian_image(&self, g: &Word) -> Vec<(i64, u64)> {
        (1..=self.rank.max(g.max_generator()))
            .map(|i| (g.exponent_sum(i), 0))
            .collect()
    }

    fn root(&self, g: &Word, e: u32) -> Option<Option<Word>> {
        Some(root_extract(g, e))
    }
}

/// `A ∗ B` with cyclic factors; balls use syllable length and exponents in
/// `±1..=exp_bound` (all residues for finite factors).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicProduct {
    pub fp: FreeProduct,
    pub exp_bound: i64,
}

impl CyclicProduct {
    fn syllables(&self, f: Factor) -> Vec<Syllable> {
        let set: BTreeSet<Syllable> = (-self.exp_bound..=self.exp_bound)
            .filter_map(|x| self.fp.syllable(f, x))
            .collect();
        set.into_iter().collect()
    }
}

impl GroupModel for CyclicProduct {
    type Elem = FPElement;

    fn identity(&self) -> FPElement {
        FPElement::identity()
    }

    fn mul(&self, a: &FPElement, b: &FPElement) -> FPElement {
        self.fp.mul(a, b)
    }

    fn inv(&self, a: &FPElement) -> FPElement {
        self.fp.inv(a)
    }

    fn evaluate(&self, w: &Word, images: &[FPElement]) -> FPElement {
        self.fp.evaluate(w, images)
    }

    fn ball(&self, radius: usize) -> Vec<FPElement> {
        let (sa, sb) = (self.syllables(Factor::A), self.syllables(Factor::B));
        let mut out = vec![FPElement::identity()];
        let mut layer = vec![FPElement::identity()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for u in &layer {
                let options: Vec<&[Syllable]> = match u.last().map(|s| s.factor) {
                    None => vec![&sa, &sb],
                    Some(Factor::A) => vec![&sb],
                    Some(Factor::B) => vec![&sa],
                };
                for &s in options.into_iter().flatten() {
                    next.push(self.fp.normalize(u.syllables().iter().copied().chain([s])));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    fn abelian_image(&self, g: &FPElement) -> Vec<(i64, u64)> {
        [Factor::A, Factor::B]
            .into_iter()
            .map(|f| {
                let sum: i64 = g
                    .syllables()
                    .iter()
                    .filter(|s| s.factor == f)
                    .map(|s| s.exp)
                    .sum();
                match self.fp.model(f) {
                    FactorModel::InfiniteCyclic => (sum, 0),
                    FactorModel::FiniteCyclic(m) => (sum.rem_euclid(m as i64), m as u64),
                }
            })
            .collect()
    }

    fn root(&self, g: &FPElement, e: u32) -> Option<Option<FPElement>> {
        let w = self.fp.to_f2(g).ok()?;
        Some(root_extract(&w, e).map(|h| self.fp.from_f2(&h).expect("free")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbalQuery<G> {
    pub group: G,
    pub w: Word,
    /// Largest length of each substituted element.
    pub len_cap: usize,
    /// Largest number of factors in `w`-length searches.
    pub product_cap: usize,
}

impl<G: GroupModel> VerbalQuery<G> {
    pub fn new(group: G, w: Word, len_cap: usize, product_cap: usize) -> Self {
        VerbalQuery {
            group,
            w,
            len_cap,
            product_cap,
        }
    }

    fn arity(&self) -> usize {
        self.w.max_generator() as usize
    }

    fn e(&self) -> u64 {
        exponent_profile(&self.w, self.arity())
            .expect("arity covers w")
            .e
    }

    /// Calls `f` on every substitution tuple drawn from the ball.
    fn for_each_tuple(&self, mut f: impl FnMut(&[G::Elem]) -> bool) -> Result<(), VerbalError> {
        let ball = self.group.ball(self.len_cap);
        let n = self.arity();
        let total = (ball.len() as u128).pow(n as u32);
        if total > MAX_WORK as u128 {
            return Err(VerbalError::CapExceeded(format!(
                "{total} substitution tuples exceed {MAX_WORK}"
            )));
        }
        let mut idx = vec![0usize; n];
        let mut tuple: Vec<G::Elem> = vec![self.group.identity(); n];
        loop {
            for (slot, &i) in tuple.iter_mut().zip(&idx) {
                *slot = ball[i].clone();
            }
            if !f(&tuple) {
                return Ok(());
            }
            let mut pos = 0;
            loop {
                if pos == n {
                    return Ok(());
                }
                idx[pos] += 1;
                if idx[pos] < ball.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Every `w(g_1, ..., g_n)` with each `|g_i| ≤ len_cap`.
    pub fn enumerate_values(&self) -> Result<BTreeSet<G::Elem>, VerbalError> {
        let mut out = BTreeSet::new();
        self.for_each_tuple(|t| {
            out.insert(self.group.evaluate(&self.w, t));
            true
        })?;
        Ok(out)
    }

    /// An exact reason why `g ∉ w[G]`, when one of the oracles applies.
    pub fn non_value_certificate(&self, g: &G::Elem) -> Option<NonValue> {
        let e = self.e();
        let image = self.group.abelian_image(g);
        if image.iter().any(|&(x, m)| !in_multiples(x, e, m)) {
            return Some(NonValue::Abelian {
                e,
                image: image.iter().map(|&(x, _)| x).collect(),
            });
        }
        let (_, k) = as_generator_power(&self.w)?;
        let k = k.unsigned_abs() as u32;
        match self.group.root(g, k)? {
            None => Some(NonValue::NoRoot { e: k }),
            Some(_) => None,
        }
    }

    pub fn is_value(&self, g: &G::Elem) -> Result<Membership<G::Elem>, VerbalError> {
        if let Some(certificate) = self.non_value_certificate(g) {
            return Ok(Membership::No { certificate });
        }
        if let Some((_, k)) = as_generator_power(&self.w) {
            if let Some(Some(h)) = self.group.root(g, k.unsigned_abs() as u32) {
                let h = if k < 0 { self.group.inv(&h) } else { h };
                let mut witness = vec![self.group.identity(); self.arity()];
                witness[self.arity() - 1] = h;
                if self.group.evaluate(&self.w, &witness) == *g {
                    return Ok(Membership::Yes { witness });
                }
            }
        }
        let mut found = None;
        self.for_each_tuple(|t| {
            if self.group.evaluate(&self.w, t) == *g {
                found = Some(t.to_vec());
                false
            } else {
                true
            }
        })?;
        Ok(match found {
            Some(witness) => Membership::Yes { witness },
            None => Membership::Unknown,
        })
    }

    /// Shortest product of values and their inverses equal to `g`, searched
    /// up to `product_cap` factors.
    pub fn w_length(&self, g: &G::Elem) -> Result<LengthReport<G::Elem>, VerbalError> {
        if *g == self.group.identity() {
            return Ok(LengthReport {
                length: Some(0),
                lower_bound: 0,
                factors: Vec::new(),
                outside_verbal_subgroup: false,
            });
        }
        if let Some(NonValue::Abelian { .. }) = self.non_value_certificate(g) {
            // the abelian image of every product of values is also a multiple
            return Ok(LengthReport {
                length: None,
                lower_bound: 0,
                factors: Vec::new(),
                outside_verbal_subgroup: true,
            });
        }
        let lower_bound = if self.non_value_certificate(g).is_some() {
            2
        } else {
            1
        };
        let values = self.enumerate_values()?;
        let gens: Vec<G::Elem> = values
            .iter()
            .flat_map(|v| [v.clone(), self.group.inv(v)])
            .filter(|v| *v != self.group.identity())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        // parent[x] = (previous product, last factor)
        let mut parent: HashMap<G::Elem, (G::Elem, G::Elem)> = HashMap::new();
        let mut seen: HashSet<G::Elem> = HashSet::from([self.group.identity()]);
        let mut layer = vec![self.group.identity()];
        for k in 1..=self.product_cap {
            let mut next = Vec::new();
            for x in &layer {
                for v in &gens {
                    let y = self.group.mul(x, v);
                    if seen.insert(y.clone()) {
                        parent.insert(y.clone(), (x.clone(), v.clone()));
                        next.push(y);
                    }
                }
                if seen.len() > MAX_WORK {
                    return Err(VerbalError::CapExceeded(format!(
                        "more than {MAX_WORK} products"
                    )));
                }
            }
            if seen.contains(g) {
                let mut factors = Vec::new();
                let mut cur = g.clone();
                while let Some((prev, v)) = parent.get(&cur) {
                    factors.push(v.clone());
                    cur = prev.clone();
                }
                factors.reverse();
                return Ok(LengthReport {
                    length: Some(k),
                    lower_bound,
                    factors,
                    outside_verbal_subgroup: false,
                });
            }
            layer = next;
        }
        Ok(LengthReport {
            length: None,
            lower_bound,
            factors: Vec::new(),
            outside_verbal_subgroup: false,
        })
    }
}

fn in_multiples(x: i64, e: u64, modulus: u64) -> bool {
    match (e, modulus) {
        (0, 0) => x == 0,
        (0, m) => x.rem_euclid(m as i64) == 0,
        (e, 0) => x % e as i64 == 0,
        (e, m) => x.rem_euclid(gcd(e, m) as i64) == 0,
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Why an element is not a value of `w`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NonValue {
    /// `w = x_i^{±e}` and the element has no `e`-th root.
    NoRoot { e: u32 },
    /// The abelianized image is not in `e(w)` times the abelianization.
    Abelian { e: u64, image: Vec<i64> },
}

impl NonValue {
    /// Re-derives the certificate for `g ∉ w[F]` from scratch.
    pub fn replay(&self, w: &Word, g: &Word) -> bool {
        let rank = w.max_generator().max(g.max_generator()) as usize;
        match self {
            NonValue::NoRoot { e } => {
                as_generator_power(w).is_some_and(|(_, k)| k.unsigned_abs() as u32 == *e)
                    && root_extract(g, *e).is_none()
            }
            NonValue::Abelian { e, image } => {
                let p = exponent_profile(w, rank.max(1)).expect("rank covers w");
                let sums: Vec<i64> = (1..=rank as u32).map(|i| g.exponent_sum(i)).collect();
                p.e == *e
                    && sums.iter().zip(image).all(|(a, b)| a == b)
                    && sums.iter().any(|&x| !in_multiples(x, *e, 0))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "answer", rename_all = "kebab-case")]
pub enum Membership<E> {
    Yes { witness: Vec<E> },
    No { certificate: NonValue },
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LengthReport<E> {
    pub length: Option<usize>,
    /// Certified lower bound on the length.
    pub lower_bound: usize,
    pub factors: Vec<E>,
    /// The element is outside the verbal subgroup, so no finite length exists.
    pub outside_verbal_subgroup: bool,
}

/// `e(w)` and the index `e^rank` of the verbal subgroup's image in `ℤ^rank`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AbelianizedVerbal {
    pub e: u64,
    /// `None` when the index is infinite.
    pub index: Option<u128>,
}

pub fn abelianized_verbal(w: &Word, rank: usize) -> AbelianizedVerbal {
    let e = exponent_profile(w, rank.max(w.max_generator() as usize))
        .expect("rank covers w")
        .e;
    AbelianizedVerbal {
        e,
        index: (e > 0).then(|| (e as u128).pow(rank as u32)),
    }
}

/// Outcome of classifying a positive star `pE*q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum Dichotomy {
    /// Every checked element of `E*` has length ≥ 2 with one common cyclic
    /// support; `support` is that support closed under divisor splittings.
    Case1 {
        support: BTreeSet<Syllable>,
        checked: usize,
    },
    /// `E*` lies on one axis.
    Case2 { axis: Factor },
    /// An explicit element of `pE*q` that is not a value of `w`.
    Refuted {
        witness: FPElement,
        certificate: NonValue,
        family: Option<FamilyWitness>,
    },
    /// Mixed structure, but no certified non-value within the budget.
    Inconclusive { u: FPElement, v: FPElement },
}

/// The gap family that produced a refutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyWitness {
    pub u: FPElement,
    pub v: FPElement,
    pub b: Syllable,
    pub n: usize,
    pub gamma: usize,
}

/// Divisor splittings `(X,i), (X,s−i)` of every syllable of `support`.
pub fn divisor_closure(support: &BTreeSet<Syllable>) -> BTreeSet<Syllable> {
    let mut out = support.clone();
    for s in support {
        for i in 1..s.exp {
            out.insert(Syllable::new(s.factor, i));
            out.insert(Syllable::new(s.factor, s.exp - i));
        }
    }
    out
}

/// Products of at most `budget` elements of `e`.
fn star_ball(
    fp: &FreeProduct,
    e: &[FPElement],
    budget: usize,
) -> Result<Vec<FPElement>, VerbalError> {
    let mut seen: BTreeSet<FPElement> = BTreeSet::from([FPElement::identity()]);
    let mut layer = vec![FPElement::identity()];
    for _ in 0..budget {
        let mut next = Vec::new();
        for x in &layer {
            for y in e {
                let z = fp.mul(x, y);
                if seen.insert(z.clone()) {
                    next.push(z);
                }
            }
        }
        if seen.len() > MAX_WORK {
            return Err(VerbalError::CapExceeded(format!(
                "more than {MAX_WORK} star elements"
            )));
        }
        layer = next;
    }
    Ok(seen.into_iter().collect())
}

/// Classifies `pE*q ⊆ X₂*` for `E ⊆ X₂*` finite, inspecting products of up
/// to `budget` elements of `E`.
pub fn support_dichotomy_check(
    e: &[FPElement],
    p: &FPElement,
    q: &FPElement,
    w: &Word,
    budget: usize,
) -> Result<Dichotomy, VerbalError> {
    let fp = FreeProduct::integers();
    let sign = SignModel::standard(fp);
    for x in e.iter().chain([p, q]) {
        if !sign.is_positive(x) {
            return Err(VerbalError::NotPositive(x.clone()));
        }
    }
    let gens: Vec<FPElement> = e.iter().filter(|x| !x.is_identity()).cloned().collect();
    if gens.is_empty() {
        return Ok(Dichotomy::Case1 {
            support: BTreeSet::new(),
            checked: 0,
        });
    }
    if gens.iter().all(|x| x.len() == 1) {
        let axis = gens[0].syllables()[0].factor;
        if gens.iter().all(|x| x.syllables()[0].factor == axis) {
            return Ok(Dichotomy::Case2 { axis });
        }
    }
    let members = star_ball(&fp, &gens, budget)?;
    let long: Vec<&FPElement> = members.iter().filter(|x| x.len() >= 2).collect();
    let short = members.iter().find(|x| x.len() == 1);
    let cyclic = |x: &FPElement| fp.cyclic_form(x).expect("non-identity").support();
    if short.is_none() {
        if let Some(first) = long.first() {
            let base = cyclic(first);
            if let Some(other) = long.iter().find(|x| cyclic(x) != base) {
                return refute_pair(&fp, first, other, p, q, w, &members);
            }
            return Ok(Dichotomy::Case1 {
                support: divisor_closure(&base),
                checked: members.len(),
            });
        }
    }
    // mixed lengths: u·vⁿ eventually changes cyclic support
    let u = long
        .first()
        .copied()
        .cloned()
        .unwrap_or_else(|| fp.mul(&gens[0], &gens[1]));
    let v = short.cloned().expect("some short member");
    let uv = (1..=8)
        .map(|n| fp.mul(&u, &fp.pow(&v, n)))
        .find(|x| cyclic(x) != cyclic(&u))
        .unwrap_or_else(|| fp.mul(&u, &v));
    refute_pair(&fp, &u, &uv, p, q, w, &members)
}

/// Looks for a non-value in the gap families of `(u, v)` and `(v, u)` and in
/// the enumerated part of `pE*q`. The reported witness is the shortlex least
/// certified member when there is one, otherwise the family member.
fn refute_pair(
    fp: &FreeProduct,
    u: &FPElement,
    v: &FPElement,
    p: &FPElement,
    q: &FPElement,
    w: &Word,
    members: &[FPElement],
) -> Result<Dichotomy, VerbalError> {
    use crate::gaps::{gap_profile, unbounded_family, FamilyShape};
    let query = VerbalQuery::new(FreeGroup { rank: 2 }, w.clone(), 0, 0);
    let as_word = |x: &FPElement| fp.to_f2(x).expect("integer factors");
    let mut family = None;
    'pairs: for (x, y) in [(u, v), (v, u)] {
        let long_core = fp
            .core_decompose(y)
            .map(|d| d.core.len() >= 2)
            .unwrap_or(false);
        if !long_core || distinguishing_syllable(fp, x, y).is_err() {
            continue;
        }
        let report = unbounded_family(fp, p, x, y, q, 24, 2, FamilyShape::Cumulative)
            .expect("checked inputs");
        for m in &report.members {
            if let Some(certificate) = query.non_value_certificate(&as_word(&m.element)) {
                let gamma = gap_profile(fp, &m.element, report.b)
                    .expect("valid")
                    .gamma(2);
                let info = FamilyWitness {
                    u: x.clone(),
                    v: y.clone(),
                    b: report.b,
                    n: m.n,
                    gamma,
                };
                family = Some((m.element.clone(), certificate, info));
                break 'pairs;
            }
        }
    }
    let mut sandwiched: Vec<(Word, FPElement)> = members
        .iter()
        .map(|m| {
            let x = fp.mul(&fp.mul(p, m), q);
            (as_word(&x), x)
        })
        .collect();
    sandwiched.sort_by(|a, b| a.0.cmp(&b.0));
    let shortest = sandwiched
        .into_iter()
        .find_map(|(g, x)| query.non_value_certificate(&g).map(|c| (x, c)));
    match (shortest, family) {
        (Some((witness, certificate)), family) => Ok(Dichotomy::Refuted {
            witness,
            certificate,
            family: family.map(|f| f.2),
        }),
        (None, Some((witness, certificate, info))) => Ok(Dichotomy::Refuted {
            witness,
            certificate,
            family: Some(info),
        }),
        (None, None) => Ok(Dichotomy::Inconclusive {
            u: u.clone(),
            v: v.clone(),
        }),
    }
}
