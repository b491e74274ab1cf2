//! Rational expressions over a free group.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::parse::ParseError;
use crate::word::Word;

/// Shape of one expression node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RatKind {
    Finite(BTreeSet<Word>),
    Union(RatExpr, RatExpr),
    Product(RatExpr, RatExpr),
    Star(RatExpr),
}

#[derive(Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Node {
    kind: RatKind,
    complexity: u32,
}

/// An immutable rational expression with cached structural complexity.
///
/// The constructors fold trivial shapes (finite with finite, products with
/// `{1}`, stars of subsets of `{1}`), so complexity is 0 exactly when the
/// expression is a `Finite` node.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatExpr(Arc<Node>);

impl RatExpr {
    fn node(kind: RatKind) -> RatExpr {
        let complexity = match &kind {
            RatKind::Finite(_) => 0,
            RatKind::Union(l, r) | RatKind::Product(l, r) => 1 + l.complexity().max(r.complexity()),
            RatKind::Star(e) => 1 + e.complexity(),
        };
        RatExpr(Arc::new(Node { kind, complexity }))
    }

    pub fn kind(&self) -> &RatKind {
        &self.0.kind
    }

    pub fn complexity(&self) -> u32 {
        self.0.complexity
    }

    pub fn finite(words: impl IntoIterator<Item = Word>) -> RatExpr {
        RatExpr::node(RatKind::Finite(words.into_iter().collect()))
    }

    pub fn empty() -> RatExpr {
        RatExpr::finite([])
    }

    pub fn one() -> RatExpr {
        RatExpr::finite([Word::identity()])
    }

    pub fn single(w: Word) -> RatExpr {
        RatExpr::finite([w])
    }

    pub fn as_finite(&self) -> Option<&BTreeSet<Word>> {
        match self.kind() {
            RatKind::Finite(s) => Some(s),
            _ => None,
        }
    }

    fn is_empty_set(&self) -> bool {
        self.as_finite().is_some_and(|s| s.is_empty())
    }

    fn is_one(&self) -> bool {
        self.as_finite()
            .is_some_and(|s| s.len() == 1 && s.iter().all(Word::is_identity))
    }

    pub fn union(l: RatExpr, r: RatExpr) -> RatExpr {
        match (l.as_finite(), r.as_finite()) {
            (Some(a), Some(b)) => RatExpr::finite(a.iter().chain(b).cloned()),
            _ if l.is_empty_set() => r,
            _ if r.is_empty_set() => l,
            _ if l == r => l,
            _ => RatExpr::node(RatKind::Union(l, r)),
        }
    }

    pub fn product(l: RatExpr, r: RatExpr) -> RatExpr {
        if l.is_empty_set() || r.is_empty_set() {
            return RatExpr::empty();
        }
        if l.is_one() {
            return r;
        }
        if r.is_one() {
            return l;
        }
        match (l.as_finite(), r.as_finite()) {
            (Some(a), Some(b)) => {
                RatExpr::finite(a.iter().flat_map(|x| b.iter().map(move |y| x.mul(y))))
            }
            _ => RatExpr::node(RatKind::Product(l, r)),
        }
    }

    pub fn star(e: RatExpr) -> RatExpr {
        if e.as_finite()
            .is_some_and(|s| s.iter().all(Word::is_identity))
        {
            return RatExpr::one();
        }
        RatExpr::node(RatKind::Star(e))
    }

    pub fn union_all(items: impl IntoIterator<Item = RatExpr>) -> RatExpr {
        items
            .into_iter()
            .reduce(RatExpr::union)
            .unwrap_or_else(RatExpr::empty)
    }

    pub fn product_all(items: impl IntoIterator<Item = RatExpr>) -> RatExpr {
        items
            .into_iter()
            .reduce(RatExpr::product)
            .unwrap_or_else(RatExpr::one)
    }

    /// Largest generator index occurring in a leaf.
    pub fn max_generator(&self) -> u32 {
        match self.kind() {
            RatKind::Finite(s) => s.iter().map(Word::max_generator).max().unwrap_or(0),
            RatKind::Union(l, r) | RatKind::Product(l, r) => {
                l.max_generator().max(r.max_generator())
            }
            RatKind::Star(e) => e.max_generator(),
        }
    }

    /// Applies `f` to every leaf element, rebuilding with the folding constructors.
    pub fn map_leaves(&self, f: &impl Fn(&Word) -> Word) -> RatExpr {
        match self.kind() {
            RatKind::Finite(s) => RatExpr::finite(s.iter().map(f)),
            RatKind::Union(l, r) => RatExpr::union(l.map_leaves(f), r.map_leaves(f)),
            RatKind::Product(l, r) => RatExpr::product(l.map_leaves(f), r.map_leaves(f)),
            RatKind::Star(e) => RatExpr::star(e.map_leaves(f)),
        }
    }

    /// `g^-1 L g`, built leafwise since conjugation is an automorphism.
    pub fn conjugate(&self, g: &Word) -> RatExpr {
        self.map_leaves(&|w| w.conjugate(g))
    }

    /// Image under the endomorphism `x_i ↦ images[i-1]`.
    pub fn hom_image(&self, images: &[Word]) -> RatExpr {
        self.map_leaves(&|w| w.substitute(images))
    }

    /// All leaf elements.
    pub fn leaves(&self) -> BTreeSet<Word> {
        let mut out = BTreeSet::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut BTreeSet<Word>) {
        match self.kind() {
            RatKind::Finite(s) => out.extend(s.iter().cloned()),
            RatKind::Union(l, r) | RatKind::Product(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
            RatKind::Star(e) => e.collect_leaves(out),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self.kind() {
            RatKind::Finite(_) => 1,
            RatKind::Union(l, r) | RatKind::Product(l, r) => 1 + l.size() + r.size(),
            RatKind::Star(e) => 1 + e.size(),
        }
    }
}

fn write_word_atom(f: &mut fmt::Formatter<'_>, w: &Word) -> fmt::Result {
    let s = w.to_string();
    if s.contains(' ') {
        write!(f, "\"{s}\"")
    } else {
        f.write_str(&s)
    }
}

impl fmt::Display for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            RatKind::Finite(s) => {
                f.write_str("(fin")?;
                for w in s {
                    f.write_str(" ")?;
                    write_word_atom(f, w)?;
                }
                f.write_str(")")
            }
            RatKind::Union(l, r) => write!(f, "(union {l} {r})"),
            RatKind::Product(l, r) => write!(f, "(prod {l} {r})"),
            RatKind::Star(e) => write!(f, "(star {e})"),
        }
    }
}

impl fmt::Debug for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
    Quoted(&'a str),
}

fn lex(input: &str) -> Result<Vec<(usize, Tok<'_>)>, ParseError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b if b.is_ascii_whitespace() => i += 1,
            b';' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'(' => {
                out.push((i, Tok::Open));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::Close));
                i += 1;
            }
            b'"' => {
                let start = i + 1;
                let end = input[start..]
                    .find('"')
                    .map(|k| start + k)
                    .ok_or_else(|| ParseError::new(i, "unterminated string"))?;
                out.push((start, Tok::Quoted(&input[start..end])));
                i = end + 1;
            }
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && !matches!(bytes[i], b'(' | b')' | b'"' | b';')
                {
                    i += 1;
                }
                out.push((start, Tok::Atom(&input[start..i])));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok<'a>)>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(usize, Tok<'a>)> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.0)
    }

    fn next(&mut self) -> Option<(usize, Tok<'a>)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.next() {
            Some((_, Tok::Close)) => Ok(()),
            Some((at, _)) => Err(ParseError::new(at, "expected `)`")),
            None => Err(ParseError::new(
                self.end,
                "expected `)`, found end of input",
            )),
        }
    }

    fn word(at: usize, text: &str) -> Result<Word, ParseError> {
        text.parse::<Word>().map_err(|e| e.shifted(at))
    }

    fn expr(&mut self) -> Result<RatExpr, ParseError> {
        match self.next() {
            Some((_, Tok::Open)) => {}
            Some((at, _)) => return Err(ParseError::new(at, "expected `(`")),
            None => return Err(ParseError::new(self.end, "unexpected end of input")),
        }
        let (at, head) = match self.next() {
            Some((at, Tok::Atom(h))) => (at, h),
            Some((at, _)) => return Err(ParseError::new(at, "expected an operator name")),
            None => return Err(ParseError::new(self.end, "unexpected end of input")),
        };
        let e = match head {
            "fin" => {
                let mut words = Vec::new();
                loop {
                    match self.peek().cloned() {
                        Some((_, Tok::Close)) => break,
                        Some((at, Tok::Atom(a))) => words.push(Self::word(at, a)?),
                        Some((at, Tok::Quoted(q))) => words.push(Self::word(at, q)?),
                        Some((at, Tok::Open)) => {
                            return Err(ParseError::new(at, "`fin` takes words, not expressions"))
                        }
                        None => return Err(ParseError::new(self.end, "expected `)`")),
                    }
                    self.pos += 1;
                }
                RatExpr::finite(words)
            }
            "union" | "prod" => {
                let mut items = vec![self.expr()?, self.expr()?];
                while !matches!(self.peek(), Some((_, Tok::Close)) | None) {
                    items.push(self.expr()?);
                }
                if head == "union" {
                    RatExpr::union_all(items)
                } else {
                    RatExpr::product_all(items)
                }
            }
            "star" => RatExpr::star(self.expr()?),
            other => return Err(ParseError::new(at, format!("unknown operator `{other}`"))),
        };
        self.expect_close()?;
        Ok(e)
    }
}

impl FromStr for RatExpr {
    type Err = ParseError;

    /// S-expression grammar: `(fin w ...)`, `(union e e ...)`, `(prod e e ...)`,
    /// `(star e)`. Words with several atoms are written in double quotes.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser {
            toks: lex(s)?,
            pos: 0,
            end: s.len(),
        };
        let e = p.expr()?;
        if p.peek().is_some() {
            return Err(ParseError::new(p.here(), "trailing input"));
        }
        Ok(e)
    }
}

impl Serialize for RatExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RatExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn complexity_examples() {
        assert_eq!(RatExpr::single(w("x1")).complexity(), 0);
        let s1 = RatExpr::star(RatExpr::single(w("x1")));
        assert_eq!(s1.complexity(), 1);
        let s2 = RatExpr::star(RatExpr::single(w("x2")));
        assert_eq!(RatExpr::product(s1.clone(), s2).complexity(), 2);
        assert_eq!(RatExpr::star(s1.clone()).complexity(), 2);
    }

    #[test]
    fn folding_constructors() {
        let a = RatExpr::single(w("x1"));
        let b = RatExpr::single(w("x1^-1"));
        assert_eq!(RatExpr::product(a.clone(), b), RatExpr::one());
        assert_eq!(
            RatExpr::union(a.clone(), RatExpr::single(w("x2"))).complexity(),
            0
        );
        assert_eq!(RatExpr::star(RatExpr::one()), RatExpr::one());
        assert_eq!(RatExpr::star(RatExpr::empty()), RatExpr::one());
        let s = RatExpr::star(a.clone());
        assert_eq!(RatExpr::product(RatExpr::one(), s.clone()), s);
        assert_eq!(
            RatExpr::product(RatExpr::empty(), s.clone()),
            RatExpr::empty()
        );
        assert_eq!(RatExpr::union(RatExpr::empty(), s.clone()), s);
    }

    #[test]
    fn conjugation_keeps_complexity() {
        let e = RatExpr::single(w("x1"));
        let c = e.conjugate(&w("x2"));
        assert_eq!(c, RatExpr::single(w("x2^-1 x1 x2")));
        assert_eq!(c.complexity(), 0);
        let s = RatExpr::star(e);
        let cs = s.conjugate(&w("x2"));
        assert_eq!(cs, RatExpr::star(RatExpr::single(w("x2^-1 x1 x2"))));
        assert_eq!(cs.complexity(), s.complexity());
    }

    #[test]
    fn hom_image_examples() {
        let e = RatExpr::single(w("x1 x3 x2"));
        let phi = [w("x1"), w("x2"), Word::identity()];
        assert_eq!(e.hom_image(&phi), RatExpr::single(w("x1 x2")));
        let s: RatExpr = "(prod (star (fin x1 \"x2 x1\")) (fin x2))".parse().unwrap();
        assert_eq!(s.hom_image(&[w("x1"), w("x2")]), s);
    }

    #[test]
    fn sexp_round_trip() {
        let src = "(union (fin x2) (star (fin \"x1 x2\")))";
        let e: RatExpr = src.parse().unwrap();
        assert_eq!(e.to_string(), src);
        assert_eq!(e.to_string().parse::<RatExpr>().unwrap(), e);
        let e: RatExpr = "(prod (star (fin x1)) (star (fin x2)) (star (fin x1^2)))"
            .parse()
            .unwrap();
        assert_eq!(e.complexity(), 3);
        assert_eq!(
            "(fin 1 x1^-2)"
                .parse::<RatExpr>()
                .unwrap()
                .as_finite()
                .unwrap()
                .len(),
            2
        );
        assert_eq!("(fin)".parse::<RatExpr>().unwrap(), RatExpr::empty());
    }

    #[test]
    fn sexp_errors_carry_positions() {
        let err = "(star (fin x1)".parse::<RatExpr>().unwrap_err();
        assert_eq!(err.position, 14);
        let err = "(fin x1 y2)".parse::<RatExpr>().unwrap_err();
        assert_eq!(err.position, 8);
        let err = "(fin \"x1 q\")".parse::<RatExpr>().unwrap_err();
        assert_eq!(err.position, 9);
        assert!("(bogus (fin))".parse::<RatExpr>().is_err());
        assert!("(fin x1) x2".parse::<RatExpr>().is_err());
    }
}
