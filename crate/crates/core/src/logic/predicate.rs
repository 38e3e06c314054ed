use std::fmt;

use crate::logic::cube::{Cube, RankMode};
use crate::logic::{LogicError, MAX_ATOMS, MAX_CUBES};
use crate::scalar::Scalar;

/// A finite disjunction of cubes. The empty disjunction is `false`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Predicate<S> {
    cubes: Vec<Cube<S>>,
}

impl<S: Scalar> Predicate<S> {
    pub fn new(cubes: impl IntoIterator<Item = Cube<S>>) -> Self {
        let mut cubes: Vec<Cube<S>> = cubes.into_iter().filter(|c| !c.is_falsum()).collect();
        cubes.sort();
        cubes.dedup();
        Predicate { cubes }
    }

    pub fn top() -> Self {
        Self::from_cube(Cube::top(RankMode::Absent))
    }

    pub fn bottom() -> Self {
        Predicate { cubes: Vec::new() }
    }

    /// `oldrnk = ∞`.
    pub fn inf() -> Self {
        Self::from_cube(Cube::top(RankMode::Inf))
    }

    pub fn from_cube(c: Cube<S>) -> Self {
        Self::new([c])
    }

    pub fn cubes(&self) -> &[Cube<S>] {
        &self.cubes
    }

    pub fn is_bottom(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn or(&self, other: &Self) -> Self {
        Self::new(self.cubes.iter().chain(other.cubes.iter()).cloned())
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn check_size(&self) -> Result<(), LogicError> {
        if self.cubes.len() > MAX_CUBES {
            return Err(LogicError::TooManyCubes(self.cubes.len()));
        }
        if let Some(c) = self.cubes.iter().find(|c| c.len() > MAX_ATOMS) {
            return Err(LogicError::TooManyAtoms(c.len()));
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Display for Predicate<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cubes.is_empty() {
            return f.write_str("{false}");
        }
        let parts: Vec<String> = self.cubes.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", parts.join(" || "))
    }
}
