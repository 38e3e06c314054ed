//! Exact linear-arithmetic reasoning over predicates.
//!
//! A [`Predicate`] is a disjunction of [`Cube`]s; every cube carries a
//! [`RankMode`] saying whether the auxiliary `oldrnk` variable is `∞`, finite,
//! or unconstrained. Satisfiability and entailment are decided over the
//! rationals, which is sound for proving Hoare triples of integer programs.

mod atom;
mod cube;
mod entail;
pub mod fm;
mod post;
mod predicate;
mod valuation;

pub use atom::{Atom, Normalized, Rel};
pub use cube::{Cube, RankMode};
pub use entail::{
    cube_implies_atom, entails, entails_with_limit, equivalent, is_sat, remove_redundant,
    DEFAULT_SPLIT_LIMIT,
};
pub use fm::eliminate;
pub use post::{
    hoare_valid, hoare_valid_from_final, post_set_oldrnk, strongest_post, strongest_post_cube,
};
pub use predicate::Predicate;
pub use valuation::{evaluate, Valuation};

use thiserror::Error;

/// Maximum number of cubes in a predicate.
pub const MAX_CUBES: usize = 4;
/// Maximum number of atoms in a cube.
pub const MAX_ATOMS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("predicate has {0} cubes (limit {MAX_CUBES})")]
    TooManyCubes(usize),
    #[error("cube has {0} atoms (limit {MAX_ATOMS})")]
    TooManyAtoms(usize),
    #[error("entailment case split exceeded {0} branches")]
    SplitLimit(usize),
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}
