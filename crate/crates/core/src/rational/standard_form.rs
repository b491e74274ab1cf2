//! The normal form `L = ⋃ a_1 E_1* a_2 E_2* ... a_t E_t* a_{t+1}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::expr::{RatExpr, RatKind};
use crate::word::Word;

/// One alternating sequence `a_1 E_1* ... a_t E_t* a_{t+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Summand {
    /// `t + 1` coefficients.
    pub coefficients: Vec<Word>,
    /// `t` starred factors, stored as `E` (the star is implicit).
    pub stars: Vec<RatExpr>,
}

impl Summand {
    fn element(a: Word) -> Summand {
        Summand {
            coefficients: vec![a],
            stars: Vec::new(),
        }
    }

    fn concat(&self, other: &Summand) -> Summand {
        let mut coefficients = self.coefficients.clone();
        let last = coefficients.pop().expect("at least one coefficient");
        coefficients.push(last.mul(&other.coefficients[0]));
        coefficients.extend(other.coefficients[1..].iter().cloned());
        let mut stars = self.stars.clone();
        stars.extend(other.stars.iter().cloned());
        Summand {
            coefficients,
            stars,
        }
    }

    pub fn to_expr(&self) -> RatExpr {
        let mut parts = vec![RatExpr::single(self.coefficients[0].clone())];
        for (e, a) in self.stars.iter().zip(&self.coefficients[1..]) {
            parts.push(RatExpr::star(e.clone()));
            parts.push(RatExpr::single(a.clone()));
        }
        RatExpr::product_all(parts)
    }
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.coefficients[0])?;
        for (e, a) in self.stars.iter().zip(&self.coefficients[1..]) {
            write!(f, " {e}* [{a}]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardForm {
    pub summands: Vec<Summand>,
}

impl StandardForm {
    pub fn to_expr(&self) -> RatExpr {
        RatExpr::union_all(self.summands.iter().map(Summand::to_expr))
    }
}

/// Distributes unions over products. Starred factors are kept as they are.
pub fn standard_form(expr: &RatExpr) -> StandardForm {
    let mut summands = summands(expr);
    summands.sort();
    summands.dedup();
    StandardForm { summands }
}

fn summands(expr: &RatExpr) -> Vec<Summand> {
    match expr.kind() {
        RatKind::Finite(set) => set.iter().cloned().map(Summand::element).collect(),
        RatKind::Union(l, r) => {
            let mut v = summands(l);
            v.extend(summands(r));
            v
        }
        RatKind::Product(l, r) => {
            let (ls, rs) = (summands(l), summands(r));
            ls.iter()
                .flat_map(|a| rs.iter().map(move |b| a.concat(b)))
                .collect()
        }
        RatKind::Star(e) => vec![Summand {
            coefficients: vec![Word::identity(), Word::identity()],
            stars: vec![e.clone()],
        }],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> RatExpr {
        s.parse().unwrap()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn distribution_over_finite_coefficients() {
        let sf = standard_form(&e("(prod (fin x1 x2) (star (fin \"x1 x2\")))"));
        assert_eq!(sf.summands.len(), 2);
        for (s, a) in sf.summands.iter().zip(["x1", "x2"]) {
            assert_eq!(s.coefficients, vec![w(a), Word::identity()]);
            assert_eq!(s.stars, vec![e("(fin \"x1 x2\")")]);
        }
    }

    #[test]
    fn lone_star() {
        let sf = standard_form(&e("(star (fin x1))"));
        assert_eq!(sf.summands.len(), 1);
        assert_eq!(
            sf.summands[0].coefficients,
            vec![Word::identity(), Word::identity()]
        );
        assert_eq!(sf.to_expr(), e("(star (fin x1))"));
    }

    #[test]
    fn cross_product_of_unions() {
        let src = e("(prod (union (fin x1) (star (fin x2))) (union (star (fin x1)) (fin x2^-1)))");
        let sf = standard_form(&src);
        assert_eq!(sf.summands.len(), 4);
        let counts: Vec<usize> = sf.summands.iter().map(|s| s.stars.len()).collect();
        assert_eq!(counts.iter().sum::<usize>(), 4);
    }
}
