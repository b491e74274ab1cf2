//! Rational subsets of free groups and of `ℤ`.

pub mod acceptor;
pub mod automaton;
pub mod enumerate;
pub mod expr;
pub mod standard_form;
pub mod zrat;

pub use acceptor::{intersect_positive, member, saturate, Acceptor, AcceptorExport, Saturation};
pub use automaton::{GAutomaton, Transition};
pub use enumerate::{enumerate_bounded, enumerate_with_slack, EnumError};
pub use expr::{RatExpr, RatKind};
pub use standard_form::{standard_form, StandardForm, Summand};
pub use zrat::{Progression, ZRatSet};
