//! Bounded enumeration of the set denoted by an expression.
//!
//! [`enumerate_bounded`] works on reduced words directly. Leaf words are
//! spelled out letter by letter, then two passes run:
//!
//! 1. Find every state pair joined by a path that reads the identity. Such a
//!    path is a sequence of blocks `a·(identity paths)·a⁻¹`, so following
//!    partial products of length at most 1 from each state finds them all.
//! 2. Walk from the initial state, keeping partial products of length at
//!    most `max_len`. An element `g` is read as letters of `g` separated by
//!    identity paths, so every partial product along the way is a prefix of
//!    `g` and nothing longer is ever needed.
//!
//! [`enumerate_with_slack`] is the older expression-driven method, kept as an
//! independent cross-check: it pushes partial products through each node and
//! is exact once the slack covers the cancellation depth.

use std::collections::{BTreeSet, HashSet, VecDeque};

use super::automaton::GAutomaton;
use super::expr::{RatExpr, RatKind};
use crate::word::{Letter, Word};

/// Largest `max_len` accepted by [`enumerate_bounded`].
pub const MAX_ENUM_LEN: usize = 32;
/// Largest intermediate set size before giving up.
pub const MAX_ENUM_SET: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumError {
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
}

/// Every element of `L(expr)` whose reduced length is at most `max_len`.
pub fn enumerate_bounded(expr: &RatExpr, max_len: usize) -> Result<BTreeSet<Word>, EnumError> {
    check_len(max_len)?;
    let nfa = LetterNfa::new(&GAutomaton::from_expr(expr));
    let identity = nfa.identity_pairs();
    let mut seen: HashSet<(usize, Word)> = HashSet::new();
    let mut queue = VecDeque::new();
    for &q in &identity[nfa.initial] {
        if seen.insert((q, Word::identity())) {
            queue.push_back((q, Word::identity()));
        }
    }
    while let Some((p, x)) = queue.pop_front() {
        if x.len() == max_len {
            continue;
        }
        for &(a, r) in &nfa.letters[p] {
            let y = x.mul(&Word::reduce([a]));
            if y.len() <= x.len() {
                // cancelling a letter means leaving the prefix of the target
                continue;
            }
            for &q in &identity[r] {
                if seen.insert((q, y.clone())) {
                    queue.push_back((q, y.clone()));
                }
            }
        }
        if seen.len() > MAX_ENUM_SET {
            return Err(EnumError::CapExceeded(format!(
                "more than {MAX_ENUM_SET} intermediate elements"
            )));
        }
    }
    Ok(seen
        .into_iter()
        .filter(|(q, _)| nfa.terminals.contains(q))
        .map(|(_, x)| x)
        .collect())
}

/// A [`GAutomaton`] with every label spelled out as a chain of letters.
struct LetterNfa {
    initial: usize,
    terminals: BTreeSet<usize>,
    letters: Vec<Vec<(Letter, usize)>>,
    silent: Vec<Vec<usize>>,
}

impl LetterNfa {
    fn new(a: &GAutomaton) -> LetterNfa {
        let mut nfa = LetterNfa {
            initial: a.initial,
            terminals: a.terminals.clone(),
            letters: vec![Vec::new(); a.states],
            silent: vec![Vec::new(); a.states],
        };
        for t in &a.transitions {
            let ls = t.label.letters();
            if ls.is_empty() {
                nfa.silent[t.from].push(t.to);
                continue;
            }
            let mut p = t.from;
            for (i, &l) in ls.iter().enumerate() {
                let q = if i + 1 == ls.len() {
                    t.to
                } else {
                    nfa.letters.push(Vec::new());
                    nfa.silent.push(Vec::new());
                    nfa.letters.len() - 1
                };
                nfa.letters[p].push((l, q));
                p = q;
            }
        }
        nfa
    }

    /// `identity[p]` holds every `q` reachable from `p` along a path that
    /// reads the identity, `p` itself included.
    fn identity_pairs(&self) -> Vec<BTreeSet<usize>> {
        let n = self.letters.len();
        let mut identity: Vec<BTreeSet<usize>> = (0..n).map(|p| [p].into()).collect();
        loop {
            let mut changed = false;
            for p in 0..n {
                // partial products of length at most 1, as (state, letter)
                let mut seen: HashSet<(usize, Option<Letter>)> = HashSet::new();
                let mut stack = vec![(p, None)];
                while let Some((r, x)) = stack.pop() {
                    if !seen.insert((r, x)) {
                        continue;
                    }
                    let jumps = self.silent[r].iter().chain(&identity[r]);
                    stack.extend(jumps.map(|&q| (q, x)));
                    for &(a, q) in &self.letters[r] {
                        match x {
                            None => stack.push((q, Some(a))),
                            Some(b) if b == a.inverse() => stack.push((q, None)),
                            Some(_) => {}
                        }
                    }
                }
                for (q, x) in seen {
                    if x.is_none() && !identity[p].contains(&q) {
                        changed = true;
                        identity[p].insert(q);
                    }
                }
            }
            if !changed {
                return identity;
            }
        }
    }
}

fn check_len(max_len: usize) -> Result<(), EnumError> {
    if max_len > MAX_ENUM_LEN {
        return Err(EnumError::CapExceeded(format!(
            "max_len {max_len} exceeds the limit {MAX_ENUM_LEN}"
        )));
    }
    Ok(())
}

/// Pushes partial products through the expression itself, discarding those
/// longer than `max_len + slack`. Exact when `slack` is at least the number
/// of saturation rounds of the expression's automaton.
pub fn enumerate_with_slack(
    expr: &RatExpr,
    max_len: usize,
    slack: usize,
) -> Result<BTreeSet<Word>, EnumError> {
    check_len(max_len)?;
    let cap = max_len + slack;
    let start: HashSet<Word> = [Word::identity()].into_iter().collect();
    let all = transfer(expr, &start, cap)?;
    Ok(all.into_iter().filter(|w| w.len() <= max_len).collect())
}

fn check(set: &HashSet<Word>) -> Result<(), EnumError> {
    if set.len() > MAX_ENUM_SET {
        return Err(EnumError::CapExceeded(format!(
            "more than {MAX_ENUM_SET} intermediate elements"
        )));
    }
    Ok(())
}

/// `{ s·x : s ∈ from, x ∈ L(e) }` restricted to length `≤ cap` along the way.
fn transfer(e: &RatExpr, from: &HashSet<Word>, cap: usize) -> Result<HashSet<Word>, EnumError> {
    let out = match e.kind() {
        RatKind::Finite(set) => {
            let mut out = HashSet::new();
            for s in from {
                for x in set {
                    if s.len().abs_diff(x.len()) > cap {
                        continue;
                    }
                    let y = s.mul(x);
                    if y.len() <= cap {
                        out.insert(y);
                    }
                }
            }
            out
        }
        RatKind::Union(l, r) => {
            let mut out = transfer(l, from, cap)?;
            out.extend(transfer(r, from, cap)?);
            out
        }
        RatKind::Product(l, r) => {
            let mid = transfer(l, from, cap)?;
            transfer(r, &mid, cap)?
        }
        RatKind::Star(inner) => {
            let mut all = from.clone();
            let mut frontier = from.clone();
            while !frontier.is_empty() {
                let next = transfer(inner, &frontier, cap)?;
                frontier = next.into_iter().filter(|w| !all.contains(w)).collect();
                all.extend(frontier.iter().cloned());
                check(&all)?;
            }
            all
        }
    };
    check(&out)?;
    Ok(out)
}
