//! Automata whose transitions carry group elements.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::expr::{RatExpr, RatKind};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transition {
    pub from: usize,
    pub label: Word,
    pub to: usize,
}

/// `(Q, δ, q0, F)` with `Q = 0..states`. Identity labels act as silent moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GAutomaton {
    pub states: usize,
    pub initial: usize,
    pub terminals: BTreeSet<usize>,
    pub transitions: Vec<Transition>,
}

impl GAutomaton {
    fn add_state(&mut self) -> usize {
        self.states += 1;
        self.states - 1
    }

    fn add(&mut self, from: usize, label: Word, to: usize) {
        self.transitions.push(Transition { from, label, to });
    }

    /// Thompson-style construction with one entry and one exit per fragment.
    pub fn from_expr(expr: &RatExpr) -> GAutomaton {
        let mut a = GAutomaton {
            states: 0,
            initial: 0,
            terminals: BTreeSet::new(),
            transitions: Vec::new(),
        };
        let (i, f) = a.build(expr);
        a.initial = i;
        a.terminals.insert(f);
        a
    }

    fn build(&mut self, e: &RatExpr) -> (usize, usize) {
        match e.kind() {
            RatKind::Finite(set) => {
                let (i, f) = (self.add_state(), self.add_state());
                for w in set {
                    self.add(i, w.clone(), f);
                }
                (i, f)
            }
            RatKind::Union(l, r) => {
                let (i, f) = (self.add_state(), self.add_state());
                for sub in [l, r] {
                    let (si, sf) = self.build(sub);
                    self.add(i, Word::identity(), si);
                    self.add(sf, Word::identity(), f);
                }
                (i, f)
            }
            RatKind::Product(l, r) => {
                let (li, lf) = self.build(l);
                let (ri, rf) = self.build(r);
                self.add(lf, Word::identity(), ri);
                (li, rf)
            }
            RatKind::Star(inner) => {
                let hub = self.add_state();
                let (si, sf) = self.build(inner);
                self.add(hub, Word::identity(), si);
                self.add(sf, Word::identity(), hub);
                (hub, hub)
            }
        }
    }

    pub fn max_generator(&self) -> u32 {
        self.transitions
            .iter()
            .map(|t| t.label.max_generator())
            .max()
            .unwrap_or(0)
    }

    /// State elimination back to an expression denoting the same set.
    pub fn to_expr(&self) -> RatExpr {
        let n = self.states;
        let (start, end) = (n, n + 1);
        let mut edges: BTreeMap<(usize, usize), RatExpr> = BTreeMap::new();
        let put = |edges: &mut BTreeMap<(usize, usize), RatExpr>, p, q, e: RatExpr| {
            let merged = match edges.remove(&(p, q)) {
                Some(old) => RatExpr::union(old, e),
                None => e,
            };
            edges.insert((p, q), merged);
        };
        put(&mut edges, start, self.initial, RatExpr::one());
        for &t in &self.terminals {
            put(&mut edges, t, end, RatExpr::one());
        }
        for t in &self.transitions {
            put(&mut edges, t.from, t.to, RatExpr::single(t.label.clone()));
        }

        let mut remaining: BTreeSet<usize> = (0..n).collect();
        while !remaining.is_empty() {
            // eliminate the state with the fewest in×out combinations
            let k = *remaining
                .iter()
                .min_by_key(|&&k| {
                    let ins = edges.keys().filter(|&&(p, q)| q == k && p != k).count();
                    let outs = edges.keys().filter(|&&(p, q)| p == k && q != k).count();
                    (ins * outs, k)
                })
                .expect("non-empty");
            remaining.remove(&k);
            let lp = edges
                .remove(&(k, k))
                .map(RatExpr::star)
                .unwrap_or_else(RatExpr::one);
            let ins: Vec<(usize, RatExpr)> = edges
                .iter()
                .filter(|(&(_, q), _)| q == k)
                .map(|(&(p, _), e)| (p, e.clone()))
                .collect();
            let outs: Vec<(usize, RatExpr)> = edges
                .iter()
                .filter(|(&(p, _), _)| p == k)
                .map(|(&(_, q), e)| (q, e.clone()))
                .collect();
            edges.retain(|&(p, q), _| p != k && q != k);
            for (p, ein) in &ins {
                for (q, eout) in &outs {
                    let path = RatExpr::product_all([ein.clone(), lp.clone(), eout.clone()]);
                    put(&mut edges, *p, *q, path);
                }
            }
        }
        // `start` has no incoming edges, so nothing else survives
        edges.remove(&(start, end)).unwrap_or_else(RatExpr::empty)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn finite_is_two_states() {
        let a = GAutomaton::from_expr(&RatExpr::single(w("x1 x2")));
        assert_eq!(a.states, 2);
        assert_eq!(a.transitions.len(), 1);
        assert_eq!(a.transitions[0].label, w("x1 x2"));
        assert_eq!(a.to_expr(), RatExpr::single(w("x1 x2")));
    }

    #[test]
    fn star_loops_at_hub() {
        let e = RatExpr::star(RatExpr::single(w("x1")));
        let a = GAutomaton::from_expr(&e);
        assert!(a.terminals.contains(&a.initial));
        let back = a.to_expr();
        assert_eq!(back.complexity(), 1);
        assert_eq!(back, e);
    }
}
