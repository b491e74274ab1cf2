//! Rational subsets of `ℤ`.
//!
//! A rational subset of `ℤ` is a finite union of arithmetic progressions
//! `base + step·ℕ`. Internally a set is kept in a canonical eventually
//! periodic form: an explicit window `[lo, hi)`, a periodic pattern for
//! `x ≥ hi` and another for `x < lo`, with minimal periods and the smallest
//! possible window. Two sets are equal iff their canonical forms are.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// `base + step·ℕ`; `step` may be negative, and 0 gives a singleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Progression {
    pub base: i64,
    pub step: i64,
}

impl fmt::Display for Progression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            0 => write!(f, "{{{}}}", self.base),
            s if s > 0 => write!(f, "{}+{}N", self.base, s),
            s => write!(f, "{}-{}N", self.base, -s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZRatSet {
    lo: i64,
    hi: i64,
    window: Vec<bool>,
    /// membership of `x ≥ hi` is `up[x mod up.len()]`
    up: Vec<bool>,
    /// membership of `x < lo` is `down[x mod down.len()]`
    down: Vec<bool>,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

fn minimal_period(pattern: &[bool]) -> Vec<bool> {
    let p = pattern.len();
    for d in 1..=p {
        if p.is_multiple_of(d) && (0..p).all(|r| pattern[r] == pattern[r % d]) {
            return pattern[..d].to_vec();
        }
    }
    unreachable!("the full length is always a period")
}

impl ZRatSet {
    /// Builds the canonical form from a membership oracle that is
    /// `p`-periodic on `[hi, ∞)` and `q`-periodic on `(-∞, lo)`.
    fn build(lo: i64, hi: i64, p: i64, q: i64, f: impl Fn(i64) -> bool) -> ZRatSet {
        assert!(lo <= hi && p >= 1 && q >= 1);
        let up_rep = |r: i64| hi + (r - hi).rem_euclid(p);
        let down_rep = |r: i64| lo - 1 - (lo - 1 - r).rem_euclid(q);
        let raw = ZRatSet {
            lo,
            hi,
            window: (lo..hi).map(&f).collect(),
            up: (0..p).map(|r| f(up_rep(r))).collect(),
            down: (0..q).map(|r| f(down_rep(r))).collect(),
        };
        raw.canonical()
    }

    fn up_at(&self, x: i64) -> bool {
        self.up[x.rem_euclid(self.up.len() as i64) as usize]
    }

    fn down_at(&self, x: i64) -> bool {
        self.down[x.rem_euclid(self.down.len() as i64) as usize]
    }

    fn canonical(self) -> ZRatSet {
        let up = minimal_period(&self.up);
        let down = minimal_period(&self.down);
        let member = |x: i64| self.contains(x);
        let mut s = ZRatSet {
            up,
            down,
            ..self.clone()
        };
        let (mut lo, mut hi) = (self.lo, self.hi);
        while hi > lo && member(hi - 1) == s.up_at(hi - 1) {
            hi -= 1;
        }
        while lo < hi && member(lo) == s.down_at(lo) {
            lo += 1;
        }
        if lo == hi {
            if s.up == s.down {
                lo = 0;
                hi = 0;
            } else {
                while s.up_at(hi - 1) == s.down_at(hi - 1) {
                    hi -= 1;
                }
                lo = hi;
            }
        }
        s.window = (lo..hi).map(member).collect();
        s.lo = lo;
        s.hi = hi;
        s
    }

    pub fn empty() -> ZRatSet {
        ZRatSet::build(0, 0, 1, 1, |_| false)
    }

    pub fn all() -> ZRatSet {
        ZRatSet::build(0, 0, 1, 1, |_| true)
    }

    pub fn finite(points: impl IntoIterator<Item = i64>) -> ZRatSet {
        let pts: BTreeSet<i64> = points.into_iter().collect();
        let lo = pts.first().copied().unwrap_or(0);
        let hi = pts.last().map_or(0, |&x| x + 1);
        ZRatSet::build(lo, hi, 1, 1, |x| pts.contains(&x))
    }

    pub fn progression(p: Progression) -> ZRatSet {
        let Progression { base, step } = p;
        match step {
            0 => ZRatSet::finite([base]),
            s if s > 0 => ZRatSet::build(base, base, s, 1, |x| x >= base && (x - base) % s == 0),
            s => ZRatSet::build(base + 1, base + 1, 1, -s, |x| {
                x <= base && (base - x) % s == 0
            }),
        }
    }

    pub fn from_progressions(ps: impl IntoIterator<Item = Progression>) -> ZRatSet {
        ps.into_iter()
            .map(ZRatSet::progression)
            .fold(ZRatSet::empty(), |acc, s| acc.union(&s))
    }

    /// All multiples of `g` (`g = 0` gives `{0}`).
    pub fn multiples(g: i64) -> ZRatSet {
        if g == 0 {
            return ZRatSet::finite([0]);
        }
        let g = g.abs();
        ZRatSet::build(0, 0, g, g, |x| x % g == 0)
    }

    pub fn contains(&self, x: i64) -> bool {
        if x >= self.hi {
            self.up_at(x)
        } else if x < self.lo {
            self.down_at(x)
        } else {
            self.window[(x - self.lo) as usize]
        }
    }

    fn pointwise(&self, other: &ZRatSet, op: impl Fn(bool, bool) -> bool) -> ZRatSet {
        let lo = self.lo.min(other.lo);
        let hi = self.hi.max(other.hi);
        let p = lcm(self.up.len() as i64, other.up.len() as i64);
        let q = lcm(self.down.len() as i64, other.down.len() as i64);
        ZRatSet::build(lo, hi, p, q, |x| op(self.contains(x), other.contains(x)))
    }

    pub fn union(&self, other: &ZRatSet) -> ZRatSet {
        self.pointwise(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &ZRatSet) -> ZRatSet {
        self.pointwise(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &ZRatSet) -> ZRatSet {
        self.pointwise(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> ZRatSet {
        let p = self.up.len() as i64;
        let q = self.down.len() as i64;
        ZRatSet::build(self.lo, self.hi, p, q, |x| !self.contains(x))
    }

    pub fn shift(&self, by: i64) -> ZRatSet {
        let p = self.up.len() as i64;
        let q = self.down.len() as i64;
        ZRatSet::build(self.lo + by, self.hi + by, p, q, |x| self.contains(x - by))
    }

    pub fn negate(&self) -> ZRatSet {
        let p = self.up.len() as i64;
        let q = self.down.len() as i64;
        ZRatSet::build(1 - self.hi, 1 - self.lo, q, p, |x| self.contains(-x))
    }

    /// `{k·x : x ∈ self}` for `k ≥ 1`.
    pub fn scale(&self, k: i64) -> ZRatSet {
        assert!(k >= 1, "scale factor must be positive");
        let p = self.up.len() as i64 * k;
        let q = self.down.len() as i64 * k;
        ZRatSet::build(self.lo * k, self.hi * k, p, q, |x| {
            x % k == 0 && self.contains(x / k)
        })
    }

    pub fn is_empty(&self) -> bool {
        self.window.iter().all(|&b| !b)
            && self.up.iter().all(|&b| !b)
            && self.down.iter().all(|&b| !b)
    }

    pub fn is_finite(&self) -> bool {
        self.up.iter().all(|&b| !b) && self.down.iter().all(|&b| !b)
    }

    /// A decomposition into progressions: window points as singletons, one
    /// progression per residue of each tail.
    pub fn progressions(&self) -> Vec<Progression> {
        let mut out: Vec<Progression> = (self.lo..self.hi)
            .filter(|&x| self.contains(x))
            .map(|x| Progression { base: x, step: 0 })
            .collect();
        let p = self.up.len() as i64;
        for r in 0..p {
            if self.up[r as usize] {
                let base = self.hi + (r - self.hi).rem_euclid(p);
                out.push(Progression { base, step: p });
            }
        }
        let q = self.down.len() as i64;
        for r in 0..q {
            if self.down[r as usize] {
                let base = self.lo - 1 - (self.lo - 1 - r).rem_euclid(q);
                out.push(Progression { base, step: -q });
            }
        }
        out
    }

    /// `{a + b : a ∈ self, b ∈ other}`.
    pub fn sumset(&self, other: &ZRatSet) -> ZRatSet {
        let mut acc = ZRatSet::empty();
        for a in self.progressions() {
            for b in other.progressions() {
                acc = acc.union(&progression_sum(a, b));
            }
        }
        acc
    }

    /// The submonoid generated by `self`.
    pub fn star(&self) -> ZRatSet {
        let ps: Vec<Progression> = self
            .progressions()
            .into_iter()
            .filter(|p| p.base != 0 || p.step != 0)
            .collect();
        if ps.is_empty() {
            return ZRatSet::finite([0]);
        }
        let g = ps.iter().fold(0, |acc, p| gcd(gcd(acc, p.base), p.step));
        let has_pos = ps.iter().any(|p| p.base > 0 || p.step > 0);
        let has_neg = ps.iter().any(|p| p.base < 0 || p.step < 0);
        if has_pos && has_neg {
            return ZRatSet::multiples(g);
        }
        let (positive, flip) = if has_pos {
            (self.clone(), false)
        } else {
            (self.negate(), true)
        };
        let reduced = positive.intersect(&ZRatSet::multiples(g));
        let monoid = numerical_monoid(|x| reduced.contains(x * g)).scale(g);
        if flip {
            monoid.negate()
        } else {
            monoid
        }
    }
}

/// The submonoid of `ℕ` generated by `{x ≥ 1 : member(x)}`, whose gcd is 1.
fn numerical_monoid(member: impl Fn(i64) -> bool) -> ZRatSet {
    let mut gens = Vec::new();
    let mut g = 0;
    let mut x = 1;
    while g != 1 {
        if member(x) {
            gens.push(x);
            g = gcd(g, x);
        }
        x += 1;
    }
    // Schur: every integer > (a_min - 1)(a_max - 1) - 1 is representable.
    let bound = (gens[0] - 1) * (gens[gens.len() - 1] - 1);
    let gens: Vec<i64> = (1..=bound.max(1)).filter(|&x| member(x)).collect();
    let mut reach = vec![false; bound.max(0) as usize + 1];
    reach[0] = true;
    for x in 1..=bound.max(0) {
        reach[x as usize] = gens.iter().any(|&a| a <= x && reach[(x - a) as usize]);
    }
    let small = ZRatSet::finite((0..bound.max(0)).filter(|&x| reach[x as usize]));
    small.union(&ZRatSet::progression(Progression {
        base: bound.max(0),
        step: 1,
    }))
}

fn progression_sum(a: Progression, b: Progression) -> ZRatSet {
    let base = a.base + b.base;
    let (s, t) = (a.step, b.step);
    if s == 0 || t == 0 {
        return ZRatSet::progression(Progression { base, step: s + t });
    }
    if (s > 0) != (t > 0) {
        return ZRatSet::multiples(gcd(s, t)).shift(base);
    }
    let g = gcd(s, t);
    let (m, n) = (s.abs() / g, t.abs() / g);
    let monoid = numerical_monoid(|x| x == m || x == n).scale(g);
    let monoid = if s < 0 { monoid.negate() } else { monoid };
    monoid.shift(base)
}

impl fmt::Display for ZRatSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps = self.progressions();
        if ps.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = ps.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" | "))
    }
}

impl Serialize for ZRatSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.progressions().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ZRatSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(ZRatSet::from_progressions(Vec::<Progression>::deserialize(
            d,
        )?))
    }
}
