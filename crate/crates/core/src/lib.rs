//! Rational subsets of free groups and free products, sign positivity,
//! gap profiles and verbal-set refutation.

pub mod free_product;
pub mod gaps;
pub mod parse;
pub mod positivize;
pub mod rational;
pub mod refuter;
pub mod sample;
pub mod sign;
pub mod verbal;
pub mod word;
