//! Deterministic acceptors of reduced words, built from G-automata by
//! cancellation saturation.
//!
//! An [`Acceptor`] reads words letter by letter and only ever accepts freely
//! reduced strings, so string languages and subsets of the free group
//! coincide. Boolean operations are product constructions; the complement is
//! taken inside the set of reduced words.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::automaton::GAutomaton;
use super::expr::RatExpr;
use crate::word::{Letter, Word};

/// Bound on the number of partial paths kept by [`Acceptor::words_up_to_limit`].
pub const FRONTIER_CAP: usize = 200_000;

/// A complete DFA over the alphabet `x1, x1^-1, ..., x_rank^-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Acceptor {
    rank: u32,
    initial: usize,
    accepting: Vec<bool>,
    /// `delta[state][letter.alphabet_index()]`
    delta: Vec<Vec<usize>>,
}

/// The result of saturating a G-automaton.
#[derive(Debug, Clone)]
pub struct Saturation {
    pub acceptor: Acceptor,
    /// Number of rounds that added silent edges. Every accepted element has
    /// a run whose partial products exceed its reduced form by at most this
    /// many letters.
    pub rounds: usize,
    pub nfa_states: usize,
}

#[derive(Clone, Copy)]
enum Op {
    And,
    Or,
    AndNot,
    Xor,
}

impl Op {
    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            Op::And => a && b,
            Op::Or => a || b,
            Op::AndNot => a && !b,
            Op::Xor => a != b,
        }
    }
}

/// Letter-split automaton with silent edges.
struct Nfa {
    states: usize,
    initial: usize,
    terminals: Vec<bool>,
    letters: Vec<(usize, usize, usize)>,
    eps: Vec<BTreeSet<usize>>,
}

impl Nfa {
    fn from_g(a: &GAutomaton) -> Nfa {
        let mut nfa = Nfa {
            states: a.states,
            initial: a.initial,
            terminals: (0..a.states).map(|s| a.terminals.contains(&s)).collect(),
            letters: Vec::new(),
            eps: vec![BTreeSet::new(); a.states],
        };
        for t in &a.transitions {
            let ls = t.label.letters();
            if ls.is_empty() {
                if t.from != t.to {
                    nfa.eps[t.from].insert(t.to);
                }
                continue;
            }
            let mut cur = t.from;
            for (i, l) in ls.iter().enumerate() {
                let next = if i + 1 == ls.len() {
                    t.to
                } else {
                    nfa.states += 1;
                    nfa.terminals.push(false);
                    nfa.eps.push(BTreeSet::new());
                    nfa.states - 1
                };
                nfa.letters.push((cur, l.alphabet_index(), next));
                cur = next;
            }
        }
        nfa
    }

    fn closure(&self) -> Vec<Vec<usize>> {
        (0..self.states)
            .map(|s| {
                let mut seen = vec![false; self.states];
                let mut stack = vec![s];
                seen[s] = true;
                let mut out = Vec::new();
                while let Some(p) = stack.pop() {
                    out.push(p);
                    for &q in &self.eps[p] {
                        if !seen[q] {
                            seen[q] = true;
                            stack.push(q);
                        }
                    }
                }
                out.sort_unstable();
                out
            })
            .collect()
    }

    /// Adds `p → q` silently whenever `p -a-> r ~> r' -a⁻¹-> q`, in rounds,
    /// until nothing changes. Returns the number of productive rounds.
    fn saturate(&mut self, alphabet: usize) -> usize {
        let mut out_by_letter: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); self.states]; alphabet];
        for &(p, a, q) in &self.letters {
            out_by_letter[a][p].push(q);
        }
        let mut rounds = 0;
        loop {
            let cl = self.closure();
            let mut added = Vec::new();
            for &(p, a, r) in &self.letters {
                let inv = a ^ 1;
                for &r2 in &cl[r] {
                    for &q in &out_by_letter[inv][r2] {
                        if p != q && !self.eps[p].contains(&q) {
                            added.push((p, q));
                        }
                    }
                }
            }
            if added.is_empty() {
                return rounds;
            }
            rounds += 1;
            for (p, q) in added {
                self.eps[p].insert(q);
            }
        }
    }

    fn determinize(&self, alphabet: usize) -> Acceptor {
        let cl = self.closure();
        let close = |set: &BTreeSet<usize>| -> Vec<usize> {
            let mut out: BTreeSet<usize> = BTreeSet::new();
            for &s in set {
                out.extend(cl[s].iter().copied());
            }
            out.into_iter().collect()
        };
        let mut by_letter: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); alphabet]; self.states];
        for &(p, a, q) in &self.letters {
            by_letter[p][a].push(q);
        }
        let start = close(&[self.initial].into_iter().collect());
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut subsets = vec![start.clone()];
        index.insert(start, 0);
        let mut delta = Vec::new();
        let mut i = 0;
        while i < subsets.len() {
            let cur = subsets[i].clone();
            let mut row = Vec::with_capacity(alphabet);
            for a in 0..alphabet {
                let next: BTreeSet<usize> = cur
                    .iter()
                    .flat_map(|&p| by_letter[p][a].iter().copied())
                    .collect();
                let next = close(&next);
                let id = *index.entry(next.clone()).or_insert_with(|| {
                    subsets.push(next);
                    subsets.len() - 1
                });
                row.push(id);
            }
            delta.push(row);
            i += 1;
        }
        let accepting = subsets
            .iter()
            .map(|s| s.iter().any(|&p| self.terminals[p]))
            .collect();
        Acceptor {
            rank: (alphabet / 2) as u32,
            initial: 0,
            accepting,
            delta,
        }
    }
}

/// Saturates `a` and determinizes it into an acceptor of reduced forms.
pub fn saturate(a: &GAutomaton, rank: u32) -> Saturation {
    let rank = rank.max(a.max_generator()).max(1);
    let alphabet = 2 * rank as usize;
    let mut nfa = Nfa::from_g(a);
    let rounds = nfa.saturate(alphabet);
    let raw = nfa.determinize(alphabet);
    let acceptor = Acceptor::reduced_words(rank).product(&raw, Op::And);
    Saturation {
        acceptor,
        rounds,
        nfa_states: nfa.states,
    }
}

/// JSON view of an acceptor; the dead state and its edges are omitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptorExport {
    pub rank: u32,
    pub states: usize,
    pub initial: usize,
    pub terminals: Vec<usize>,
    pub transitions: Vec<(usize, String, usize)>,
}

impl Acceptor {
    /// The regular set of all freely reduced words.
    pub fn reduced_words(rank: u32) -> Acceptor {
        let alphabet = 2 * rank as usize;
        // state 0: start; 1 + a: last letter a; alphabet + 1: dead
        let dead = alphabet + 1;
        let mut delta = Vec::with_capacity(alphabet + 2);
        delta.push((0..alphabet).map(|a| 1 + a).collect());
        for last in 0..alphabet {
            delta.push(
                (0..alphabet)
                    .map(|a| if a == last ^ 1 { dead } else { 1 + a })
                    .collect(),
            );
        }
        delta.push(vec![dead; alphabet]);
        let mut accepting = vec![true; alphabet + 1];
        accepting.push(false);
        Acceptor {
            rank,
            initial: 0,
            accepting,
            delta,
        }
    }

    /// Words with no inverse letters.
    pub fn positive_words(rank: u32) -> Acceptor {
        let alphabet = 2 * rank as usize;
        let delta = vec![
            (0..alphabet)
                .map(|a| if a % 2 == 0 { 0 } else { 1 })
                .collect(),
            vec![1; alphabet],
        ];
        Acceptor {
            rank,
            initial: 0,
            accepting: vec![true, false],
            delta,
        }
    }

    pub fn empty(rank: u32) -> Acceptor {
        Acceptor {
            rank,
            initial: 0,
            accepting: vec![false],
            delta: vec![vec![0; 2 * rank as usize]],
        }
    }

    /// Exact acceptor of the set denoted by `expr`, viewed in `F_rank`.
    pub fn from_expr(expr: &RatExpr, rank: u32) -> Acceptor {
        saturate(&GAutomaton::from_expr(expr), rank).acceptor
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn alphabet(&self) -> usize {
        2 * self.rank as usize
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn accepts(&self, w: &Word) -> bool {
        let mut s = self.initial;
        for l in w.letters() {
            let a = l.alphabet_index();
            if a >= self.alphabet() {
                return false;
            }
            s = self.delta[s][a];
        }
        self.accepting[s]
    }

    /// Same language over a larger alphabet.
    pub fn with_rank(&self, rank: u32) -> Acceptor {
        assert!(rank >= self.rank, "cannot shrink the alphabet");
        if rank == self.rank {
            return self.clone();
        }
        let alphabet = 2 * rank as usize;
        let dead = self.delta.len();
        let mut delta: Vec<Vec<usize>> = self
            .delta
            .iter()
            .map(|row| {
                let mut r = row.clone();
                r.resize(alphabet, dead);
                r
            })
            .collect();
        delta.push(vec![dead; alphabet]);
        let mut accepting = self.accepting.clone();
        accepting.push(false);
        Acceptor {
            rank,
            initial: self.initial,
            accepting,
            delta,
        }
        .minimize()
    }

    fn aligned(&self, other: &Acceptor) -> (Acceptor, Acceptor) {
        let r = self.rank.max(other.rank);
        (self.with_rank(r), other.with_rank(r))
    }

    fn product(&self, other: &Acceptor, op: Op) -> Acceptor {
        let (a, b) = self.aligned(other);
        let alphabet = a.alphabet();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = vec![(a.initial, b.initial)];
        index.insert((a.initial, b.initial), 0);
        let mut delta = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            let row = (0..alphabet)
                .map(|x| {
                    let next = (a.delta[p][x], b.delta[q][x]);
                    *index.entry(next).or_insert_with(|| {
                        pairs.push(next);
                        pairs.len() - 1
                    })
                })
                .collect();
            delta.push(row);
            i += 1;
        }
        let accepting = pairs
            .iter()
            .map(|&(p, q)| op.apply(a.accepting[p], b.accepting[q]))
            .collect();
        Acceptor {
            rank: a.rank,
            initial: 0,
            accepting,
            delta,
        }
        .minimize()
    }

    pub fn intersect(&self, other: &Acceptor) -> Acceptor {
        self.product(other, Op::And)
    }

    pub fn union(&self, other: &Acceptor) -> Acceptor {
        self.product(other, Op::Or)
    }

    pub fn difference(&self, other: &Acceptor) -> Acceptor {
        self.product(other, Op::AndNot)
    }

    /// Reduced words not accepted by `self`.
    pub fn complement(&self) -> Acceptor {
        Acceptor::reduced_words(self.rank).product(self, Op::AndNot)
    }

    pub fn intersect_positive(&self) -> Acceptor {
        self.intersect(&Acceptor::positive_words(self.rank))
    }

    pub fn equivalent(&self, other: &Acceptor) -> bool {
        self.product(other, Op::Xor).is_empty()
    }

    pub fn is_subset(&self, other: &Acceptor) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.shortest_word().is_none()
    }

    /// A shortlex-least accepted word.
    pub fn shortest_word(&self) -> Option<Word> {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.delta.len()];
        let mut seen = vec![false; self.delta.len()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(s) = queue.pop_front() {
            if self.accepting[s] {
                let mut letters = Vec::new();
                let mut cur = s;
                while let Some((p, a)) = prev[cur] {
                    letters.push(Letter::from_alphabet_index(a));
                    cur = p;
                }
                letters.reverse();
                return Some(Word::reduce(letters));
            }
            for (a, &t) in self.delta[s].iter().enumerate() {
                if !seen[t] {
                    seen[t] = true;
                    prev[t] = Some((s, a));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// States from which some accepting state is reachable.
    fn live(&self) -> Vec<bool> {
        let n = self.delta.len();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (p, row) in self.delta.iter().enumerate() {
            for &q in row {
                rev[q].push(p);
            }
        }
        let mut live = self.accepting.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&s| live[s]).collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q] {
                if !live[p] {
                    live[p] = true;
                    stack.push(p);
                }
            }
        }
        live
    }

    /// Whether the accepted language is finite.
    pub fn is_finite(&self) -> bool {
        let live = self.live();
        // colour-based DFS for a cycle among live reachable states
        let n = self.delta.len();
        let mut colour = vec![0u8; n];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        if !live[self.initial] {
            return true;
        }
        stack.push((self.initial, 0));
        colour[self.initial] = 1;
        while let Some(&mut (s, ref mut next)) = stack.last_mut() {
            if *next == self.delta[s].len() {
                colour[s] = 2;
                stack.pop();
                continue;
            }
            let t = self.delta[s][*next];
            *next += 1;
            if !live[t] {
                continue;
            }
            match colour[t] {
                0 => {
                    colour[t] = 1;
                    stack.push((t, 0));
                }
                1 => return false,
                _ => {}
            }
        }
        true
    }

    /// Every accepted word of length at most `max_len`, shortlex ordered.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        let live = self.live();
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect(self.initial, max_len, &live, &mut path, &mut out);
        out.sort();
        out
    }

    /// The first `limit` accepted words of length at most `max_len`, by
    /// length and then by letter index. Stops early once the search frontier
    /// exceeds [`FRONTIER_CAP`] paths.
    pub fn words_up_to_limit(&self, max_len: usize, limit: usize) -> Vec<Word> {
        let live = self.live();
        let mut out = Vec::new();
        let mut layer: Vec<(usize, Vec<Letter>)> = Vec::new();
        if live[self.initial] {
            layer.push((self.initial, Vec::new()));
        }
        for len in 0..=max_len {
            for (s, path) in &layer {
                if self.accepting[*s] {
                    out.push(Word::reduce(path.iter().copied()));
                    if out.len() >= limit {
                        return out;
                    }
                }
            }
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            for (s, path) in &layer {
                for (a, &t) in self.delta[*s].iter().enumerate() {
                    if live[t] {
                        let mut p = path.clone();
                        p.push(Letter::from_alphabet_index(a));
                        next.push((t, p));
                    }
                }
            }
            if next.len() > FRONTIER_CAP {
                break;
            }
            layer = next;
        }
        out
    }

    fn collect(
        &self,
        s: usize,
        budget: usize,
        live: &[bool],
        path: &mut Vec<Letter>,
        out: &mut Vec<Word>,
    ) {
        if !live[s] {
            return;
        }
        if self.accepting[s] {
            out.push(Word::reduce(path.iter().copied()));
        }
        if budget == 0 {
            return;
        }
        for (a, &t) in self.delta[s].iter().enumerate() {
            path.push(Letter::from_alphabet_index(a));
            self.collect(t, budget - 1, live, path, out);
            path.pop();
        }
    }

    /// Moore partition refinement after dropping unreachable states.
    pub fn minimize(&self) -> Acceptor {
        let n = self.delta.len();
        let mut reach = vec![false; n];
        let mut order = vec![self.initial];
        reach[self.initial] = true;
        let mut i = 0;
        while i < order.len() {
            for &t in &self.delta[order[i]] {
                if !reach[t] {
                    reach[t] = true;
                    order.push(t);
                }
            }
            i += 1;
        }
        let mut class: Vec<usize> = (0..n).map(|s| usize::from(self.accepting[s])).collect();
        let mut count = 0;
        loop {
            let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next = vec![0; n];
            for &s in &order {
                let sig = (
                    class[s],
                    self.delta[s].iter().map(|&t| class[t]).collect::<Vec<_>>(),
                );
                let k = ids.len();
                next[s] = *ids.entry(sig).or_insert(k);
            }
            let new_count = ids.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        // renumber in BFS order for a canonical layout
        let mut renumber: BTreeMap<usize, usize> = BTreeMap::new();
        for &s in &order {
            let k = renumber.len();
            renumber.entry(class[s]).or_insert(k);
        }
        let m = renumber.len();
        let mut delta = vec![Vec::new(); m];
        let mut accepting = vec![false; m];
        for &s in &order {
            let c = renumber[&class[s]];
            if delta[c].is_empty() {
                delta[c] = self.delta[s].iter().map(|&t| renumber[&class[t]]).collect();
                accepting[c] = self.accepting[s];
            }
        }
        Acceptor {
            rank: self.rank,
            initial: renumber[&class[self.initial]],
            accepting,
            delta,
        }
    }

    /// Trimmed single-letter G-automaton with the same language.
    pub fn to_g_automaton(&self) -> GAutomaton {
        let live = self.live();
        let keep: Vec<usize> = (0..self.delta.len()).filter(|&s| live[s]).collect();
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut a = GAutomaton {
            states: keep.len().max(1),
            initial: pos.get(&self.initial).copied().unwrap_or(0),
            terminals: BTreeSet::new(),
            transitions: Vec::new(),
        };
        if !live[self.initial] {
            return a;
        }
        for &s in &keep {
            if self.accepting[s] {
                a.terminals.insert(pos[&s]);
            }
            for (x, &t) in self.delta[s].iter().enumerate() {
                if let Some(&pt) = pos.get(&t) {
                    a.transitions.push(super::automaton::Transition {
                        from: pos[&s],
                        label: Word::reduce([Letter::from_alphabet_index(x)]),
                        to: pt,
                    });
                }
            }
        }
        a
    }

    pub fn to_expr(&self) -> RatExpr {
        self.to_g_automaton().to_expr()
    }

    pub fn export(&self) -> AcceptorExport {
        let g = self.to_g_automaton();
        AcceptorExport {
            rank: self.rank,
            states: g.states,
            initial: g.initial,
            terminals: g.terminals.iter().copied().collect(),
            transitions: g
                .transitions
                .iter()
                .map(|t| (t.from, t.label.to_string(), t.to))
                .collect(),
        }
    }
}

/// `member(expr, g)`, exact.
pub fn member(expr: &RatExpr, g: &Word) -> bool {
    let rank = expr.max_generator().max(g.max_generator());
    Acceptor::from_expr(expr, rank).accepts(g)
}

/// Positive members of `expr` as an acceptor over `{x1, x2}` (or the
/// expression's own rank when larger).
pub fn intersect_positive(expr: &RatExpr) -> Acceptor {
    Acceptor::from_expr(expr, expr.max_generator().max(2)).intersect_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn e(s: &str) -> RatExpr {
        s.parse().unwrap()
    }

    #[test]
    fn saturation_examples() {
        let a = Acceptor::from_expr(&e("(prod (fin x1) (fin x1^-1))"), 1);
        assert_eq!(a.words_up_to(4), vec![Word::identity()]);
        // the same through a multi-letter label that cancels internally
        let a = GAutomaton {
            states: 3,
            initial: 0,
            terminals: [2].into_iter().collect(),
            transitions: vec![
                super::super::automaton::Transition {
                    from: 0,
                    label: w("x1"),
                    to: 1,
                },
                super::super::automaton::Transition {
                    from: 1,
                    label: w("x1^-1"),
                    to: 2,
                },
            ],
        };
        let s = saturate(&a, 1);
        assert_eq!(s.rounds, 1);
        assert_eq!(s.acceptor.words_up_to(3), vec![Word::identity()]);

        let a = Acceptor::from_expr(&e("(star (fin \"x1 x2\"))"), 2);
        assert_eq!(
            a.words_up_to(4),
            vec![Word::identity(), w("x1 x2"), w("x1 x2 x1 x2")]
        );
    }

    #[test]
    fn membership_examples() {
        assert!(member(&e("(star (fin x1 x2^-1))"), &Word::identity()));
        assert!(!member(&e("(star (fin x1))"), &w("x2")));
        assert!(member(
            &e("(prod (star (fin x1)) (fin \"x1^-2 x2\"))"),
            &w("x1^-1 x2")
        ));
        assert!(member(
            &e("(star (fin \"x1 x2\" \"x2^-1 x1\"))"),
            &w("x1^2")
        ));
    }

    #[test]
    fn boolean_operations() {
        let l = Acceptor::from_expr(&e("(star (fin x1 \"x2 x1^-1\"))"), 2);
        assert!(l.intersect(&l.complement()).is_empty());
        assert!(l
            .union(&l.complement())
            .equivalent(&Acceptor::reduced_words(2)));
        let x1s = Acceptor::from_expr(&e("(star (fin x1))"), 2);
        let both = x1s.intersect(&Acceptor::positive_words(2));
        assert!(both.equivalent(&x1s));
    }

    #[test]
    fn positive_intersections() {
        let p = intersect_positive(&e("(fin x1 x1^-1)"));
        assert_eq!(p.words_up_to(5), vec![w("x1")]);
        let p = intersect_positive(&e("(star (fin \"x1 x2^-1\"))"));
        assert_eq!(p.words_up_to(6), vec![Word::identity()]);
        assert!(p.is_finite());
        let p = intersect_positive(&e("(star (fin x1 x2))"));
        assert!(p.equivalent(&Acceptor::positive_words(2)));
        assert!(!p.is_finite());
    }

    #[test]
    fn expression_round_trip_through_acceptor() {
        let src = e("(union (fin x2) (star (fin \"x1 x2\")))");
        let a = Acceptor::from_expr(&src, 2);
        let back = Acceptor::from_expr(&a.to_expr(), 2);
        assert!(a.equivalent(&back));
        assert_eq!(a.shortest_word(), Some(Word::identity()));
    }

    #[test]
    fn export_lists_live_states_only() {
        let a = Acceptor::from_expr(&e("(fin x1)"), 1);
        let ex = a.export();
        assert_eq!(ex.states, 2);
        assert_eq!(ex.transitions, vec![(0, "x1".to_string(), 1)]);
    }
}
