//! Termination analysis by decomposition into certified modules.
//!
//! A program is split, one lasso counterexample at a time, into fair Büchi
//! modules. Each module carries an affine ranking function and a Floyd–Hoare
//! style rank certificate that can be re-checked independently.

pub mod automata;
pub mod builder;
pub mod certifier;
pub mod driver;
pub mod frontend;
pub mod linear;
pub mod logic;
pub mod lp;
pub mod program;
pub mod ranker;
pub mod report;
pub mod scalar;

pub use linear::{LinearTerm, Var};
pub use program::{Letter, Loc, Program, Statement, StatementTable};
pub use scalar::Scalar;

/// Arbitrary-precision rationals; the scalar used by the analyzer.
pub type Rat = num_rational::BigRational;
/// Machine-word rationals, handy for small tests.
pub type Rat64 = num_rational::Rational64;
