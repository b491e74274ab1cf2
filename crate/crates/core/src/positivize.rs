//! Rewriting `u·L·v ⊆ X₂*` as an expression with positive leaves.
//!
//! Works over `F₂ = ℤ ∗ ℤ` with the positive-word sign. Every inclusion the
//! construction relies on is decided exactly with reduced-word acceptors;
//! bounded enumeration is used only to propose candidates (the split element
//! of a product, the negative member steering a star), which are then
//! checked exactly and re-proposed from a larger window on failure.

use serde::Serialize;

use crate::free_product::{FPElement, FreeProduct, Syllable};
use crate::rational::{Acceptor, RatExpr, RatKind};
use crate::sign::{split_product, SignError, SignModel};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PositivizeError {
    #[error("only expressions over x1, x2 are supported, found x{0}")]
    RankTooLarge(u32),
    #[error("the set contains the non-positive element {witness}")]
    NotPositive { witness: Word },
    #[error(transparent)]
    Split(#[from] SignError),
    #[error("no valid {node} construction within window {window}")]
    SearchExhausted { node: &'static str, window: usize },
    #[error("recursion depth {0} exceeded")]
    DepthExceeded(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct PositivizeLimits {
    pub max_depth: usize,
    /// Largest enumeration window used when proposing candidates.
    pub max_window: usize,
    /// Largest number of sample words per proposal.
    pub sample_limit: usize,
}

impl Default for PositivizeLimits {
    fn default() -> Self {
        PositivizeLimits {
            max_depth: 64,
            max_window: 24,
            sample_limit: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    Finite,
    Union,
    Product,
    /// `w·L₂*` with `L₂` already positive.
    StarPositive,
    /// `w'·(r L₂ r⁻¹)*·r`.
    StarShifted,
}

/// One node of the recursion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PosStep {
    pub depth: usize,
    pub kind: StepKind,
    pub u: Word,
    pub v: Word,
    /// Product: the split element. Star: `w = uv`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<Word>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Word>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b0: Option<i64>,
    /// Negative member `l` that fixed `r`, with the index of its last negative syllable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<(Word, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    pub acceptor_states: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Positivized {
    pub expr: RatExpr,
    pub trace: Vec<PosStep>,
}

/// An expression with positive leaves denoting `u·L·v`, which must lie in `X₂*`.
pub fn positivize(expr: &RatExpr, u: &Word, v: &Word) -> Result<Positivized, PositivizeError> {
    positivize_with(expr, u, v, &PositivizeLimits::default())
}

/// [`positivize`] with `u = v = 1`.
pub fn positivize_total(expr: &RatExpr) -> Result<Positivized, PositivizeError> {
    positivize(expr, &Word::identity(), &Word::identity())
}

pub fn positivize_with(
    expr: &RatExpr,
    u: &Word,
    v: &Word,
    limits: &PositivizeLimits,
) -> Result<Positivized, PositivizeError> {
    let top = expr
        .max_generator()
        .max(u.max_generator())
        .max(v.max_generator());
    if top > 2 {
        return Err(PositivizeError::RankTooLarge(top));
    }
    let mut ctx = Ctx {
        limits: *limits,
        fp: FreeProduct::integers(),
        sign: SignModel::standard(FreeProduct::integers()),
        trace: Vec::new(),
    };
    let expr = ctx.run(expr, u, v, 0)?;
    Ok(Positivized {
        expr,
        trace: ctx.trace,
    })
}

/// Whether every leaf of `expr` holds only positive words.
pub fn has_positive_leaves(expr: &RatExpr) -> bool {
    expr.leaves().iter().all(Word::is_positive)
}

fn acceptor(e: &RatExpr) -> Acceptor {
    Acceptor::from_expr(e, 2)
}

fn sandwich(u: &Word, e: &RatExpr, v: &Word) -> RatExpr {
    RatExpr::product_all([
        RatExpr::single(u.clone()),
        e.clone(),
        RatExpr::single(v.clone()),
    ])
}

fn negative_part(acc: &Acceptor) -> Acceptor {
    acc.difference(&Acceptor::positive_words(2))
}

fn all_positive(e: &RatExpr) -> bool {
    negative_part(&acceptor(e)).is_empty()
}

fn growing_windows(start: usize, max: usize) -> impl Iterator<Item = usize> {
    std::iter::successors(Some(start.max(1)), |&w| Some(w + (w / 2).max(2)))
        .take_while(move |&w| w <= max.max(start))
}

struct Ctx {
    limits: PositivizeLimits,
    fp: FreeProduct,
    sign: SignModel,
    trace: Vec<PosStep>,
}

impl Ctx {
    fn f2(&self, w: &Word) -> FPElement {
        self.fp.from_f2(w).expect("integer factors")
    }

    fn word(&self, x: &FPElement) -> Word {
        self.fp.to_f2(x).expect("integer factors")
    }

    fn step(
        &mut self,
        depth: usize,
        kind: StepKind,
        u: &Word,
        v: &Word,
        acceptor_states: usize,
    ) -> &mut PosStep {
        self.trace.push(PosStep {
            depth,
            kind,
            u: u.clone(),
            v: v.clone(),
            w: None,
            r: None,
            b0: None,
            l: None,
            window: None,
            acceptor_states,
        });
        self.trace.last_mut().expect("just pushed")
    }

    fn run(
        &mut self,
        e: &RatExpr,
        u: &Word,
        v: &Word,
        depth: usize,
    ) -> Result<RatExpr, PositivizeError> {
        if depth > self.limits.max_depth {
            return Err(PositivizeError::DepthExceeded(self.limits.max_depth));
        }
        let acc = acceptor(&sandwich(u, e, v));
        if let Some(witness) = negative_part(&acc).shortest_word() {
            return Err(PositivizeError::NotPositive { witness });
        }
        let states = acc.state_count();
        match e.kind() {
            RatKind::Finite(set) => {
                self.step(depth, StepKind::Finite, u, v, states);
                Ok(RatExpr::finite(set.iter().map(|x| u.mul(x).mul(v))))
            }
            RatKind::Union(l, r) => {
                self.step(depth, StepKind::Union, u, v, states);
                let l = self.run(l, u, v, depth + 1)?;
                let r = self.run(r, u, v, depth + 1)?;
                Ok(RatExpr::union(l, r))
            }
            RatKind::Product(l, r) => self.product(l, r, u, v, depth, states),
            RatKind::Star(inner) => self.star(inner, u, v, depth, states),
        }
    }

    fn product(
        &mut self,
        l: &RatExpr,
        r: &RatExpr,
        u: &Word,
        v: &Word,
        depth: usize,
        states: usize,
    ) -> Result<RatExpr, PositivizeError> {
        let left = RatExpr::product(RatExpr::single(u.clone()), l.clone());
        let right = RatExpr::product(r.clone(), RatExpr::single(v.clone()));
        let (sa, ta) = (acceptor(&left), acceptor(&right));
        let shortest = |a: &Acceptor| a.shortest_word().map_or(0, |w| w.len());
        let start = shortest(&sa).max(shortest(&ta)) + 2;
        let mut last = start;
        for window in growing_windows(start, self.limits.max_window) {
            last = window;
            let s: Vec<FPElement> = sa
                .words_up_to_limit(window, self.limits.sample_limit)
                .iter()
                .map(|w| self.f2(w))
                .collect();
            let t: Vec<FPElement> = ta
                .words_up_to_limit(window, self.limits.sample_limit)
                .iter()
                .map(|w| self.f2(w))
                .collect();
            let split = split_product(&s, &t, &self.sign)?;
            let w = self.word(&split.u);
            let winv = w.inverse();
            if all_positive(&RatExpr::product(
                left.clone(),
                RatExpr::single(winv.clone()),
            )) && all_positive(&RatExpr::product(RatExpr::single(w.clone()), right.clone()))
            {
                let step = self.step(depth, StepKind::Product, u, v, states);
                step.w = Some(w.clone());
                step.window = Some(window);
                let pl = self.run(l, u, &winv, depth + 1)?;
                let pr = self.run(r, &w, v, depth + 1)?;
                return Ok(RatExpr::product(pl, pr));
            }
        }
        Err(PositivizeError::SearchExhausted {
            node: "product",
            window: last,
        })
    }

    fn star(
        &mut self,
        inner: &RatExpr,
        u: &Word,
        v: &Word,
        depth: usize,
        states: usize,
    ) -> Result<RatExpr, PositivizeError> {
        let w = u.mul(v);
        let l2 = inner.conjugate(v);
        let neg = negative_part(&acceptor(&l2));
        let Some(first) = neg.shortest_word() else {
            let step = self.step(depth, StepKind::StarPositive, u, v, states);
            step.w = Some(w.clone());
            let p = self.run(&l2, &Word::identity(), &Word::identity(), depth + 1)?;
            return Ok(RatExpr::product(RatExpr::single(w), RatExpr::star(p)));
        };
        let start = (2 * neg.minimize().state_count()).max(first.len());
        let mut last = start;
        for window in growing_windows(start, self.limits.max_window.max(start)) {
            last = window;
            let Some((l, i)) = self.deepest_negative(&neg, window) else {
                continue;
            };
            if let Some((b0, r)) = self.shift(&w, &l2, &l, i) {
                let rinv = r.inverse();
                let w_pre = w.mul(&rinv);
                let step = self.step(depth, StepKind::StarShifted, u, v, states);
                step.w = Some(w.clone());
                step.r = Some(r.clone());
                step.b0 = Some(b0);
                step.l = Some((l, i));
                step.window = Some(window);
                let p = self.run(&l2, &r, &rinv, depth + 1)?;
                return Ok(RatExpr::product_all([
                    RatExpr::single(w_pre),
                    RatExpr::star(p),
                    RatExpr::single(r),
                ]));
            }
        }
        Err(PositivizeError::SearchExhausted {
            node: "star",
            window: last,
        })
    }

    /// A negative member whose last negative syllable sits furthest right.
    fn deepest_negative(&self, neg: &Acceptor, window: usize) -> Option<(Word, usize)> {
        let mut best: Option<(Word, usize)> = None;
        for l in neg.words_up_to_limit(window, self.limits.sample_limit) {
            let Some(i) = self.sign.last_negative(&self.f2(&l)) else {
                continue;
            };
            if best.as_ref().is_none_or(|(_, j)| i > *j) {
                best = Some((l, i));
            }
        }
        best
    }

    /// `r = b0·(l₁…l_{i−1})⁻¹` for the least workable `b0`.
    fn shift(&self, w: &Word, l2: &RatExpr, l: &Word, i: usize) -> Option<(i64, Word)> {
        let lf = self.f2(l);
        let b = lf.syllables()[i - 1];
        let prefix_inv = self.fp.inv(&self.fp.element(&lf.syllables()[..i - 1]));
        let lo = (-b.exp).max(0);
        let hi = lo.max(w.len() as i64 + 1);
        (lo..=hi).find_map(|b0| {
            let head = FPElement::identity();
            let head = if b0 == 0 {
                head
            } else {
                self.fp.element(&[Syllable::new(b.factor, b0)])
            };
            let r = self.word(&self.fp.mul(&head, &prefix_inv));
            let w_pre = w.mul(&r.inverse());
            let ok = r.is_positive()
                && w_pre.is_positive()
                && all_positive(&sandwich(&r, l2, &r.inverse()));
            ok.then_some((b0, r))
        })
    }
}
