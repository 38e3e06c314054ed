use std::cell::Cell;

use crate::logic::atom::Atom;
use crate::logic::cube::{Cube, RankMode};
use crate::logic::predicate::Predicate;
use crate::logic::LogicError;
use crate::lp::lp_feasible;
use crate::scalar::Scalar;

/// Case-split budget for a single entailment query.
pub const DEFAULT_SPLIT_LIMIT: usize = 20_000;

pub fn is_sat<S: Scalar>(c: &Cube<S>) -> bool {
    if c.is_falsum() {
        return false;
    }
    c.is_empty() || lp_feasible(c.atoms()).is_some()
}

fn atoms_sat<S: Scalar>(atoms: &[Atom<S>]) -> bool {
    is_sat(&Cube::new(atoms.to_vec(), RankMode::Absent))
}

/// `c ⊨ a`, ignoring rank modes.
pub fn cube_implies_atom<S: Scalar>(c: &Cube<S>, a: &Atom<S>) -> bool {
    a.negate().into_iter().all(|n| {
        let mut atoms = c.atoms().to_vec();
        atoms.push(n);
        !atoms_sat(&atoms)
    })
}

impl<S: Scalar> Predicate<S> {
    pub fn is_sat(&self) -> bool {
        self.cubes().iter().any(is_sat)
    }
}

pub fn entails<S: Scalar>(p: &Predicate<S>, q: &Predicate<S>) -> Result<bool, LogicError> {
    entails_with_limit(p, q, DEFAULT_SPLIT_LIMIT)
}

pub fn equivalent<S: Scalar>(p: &Predicate<S>, q: &Predicate<S>) -> Result<bool, LogicError> {
    Ok(entails(p, q)? && entails(q, p)?)
}

/// `p ⊨ q`. Each cube of `p` is checked against the cubes of `q` whose rank
/// mode is compatible; an `Absent` cube must hold in both modes.
pub fn entails_with_limit<S: Scalar>(
    p: &Predicate<S>,
    q: &Predicate<S>,
    limit: usize,
) -> Result<bool, LogicError> {
    let budget = Cell::new(limit);
    for c in p.cubes() {
        let modes: &[RankMode] = match c.mode() {
            RankMode::Absent => &[RankMode::Inf, RankMode::Finite],
            RankMode::Inf => &[RankMode::Inf],
            RankMode::Finite => &[RankMode::Finite],
        };
        for &m in modes {
            let targets: Vec<&Cube<S>> = q
                .cubes()
                .iter()
                .filter(|d| d.mode() == m || d.mode() == RankMode::Absent)
                .collect();
            if !cube_entails_any(c.atoms().to_vec(), &targets, &budget, limit)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn cube_entails_any<S: Scalar>(
    atoms: Vec<Atom<S>>,
    targets: &[&Cube<S>],
    budget: &Cell<usize>,
    limit: usize,
) -> Result<bool, LogicError> {
    let c = Cube::new(atoms, RankMode::Absent);
    if !is_sat(&c) {
        return Ok(true);
    }
    if targets.is_empty() {
        return Ok(false);
    }
    // Cheap syntactic/semantic hit first.
    if targets
        .iter()
        .any(|d| d.atoms().iter().all(|a| cube_implies_atom(&c, a)))
    {
        return Ok(true);
    }
    if targets.len() == 1 {
        return Ok(false);
    }
    // c ⊨ d ∨ R  iff  for every atom a of d: c ∧ ¬a ⊨ R.
    let (d, rest) = (targets[0], &targets[1..]);
    for a in d.atoms() {
        if cube_implies_atom(&c, a) {
            continue;
        }
        for n in a.negate() {
            let left = budget.get();
            if left == 0 {
                return Err(LogicError::SplitLimit(limit));
            }
            budget.set(left - 1);
            let mut next = c.atoms().to_vec();
            next.push(n);
            if !cube_entails_any(next, rest, budget, limit)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Drops atoms implied by the others.
pub fn remove_redundant<S: Scalar>(c: &Cube<S>) -> Cube<S> {
    if c.is_falsum() {
        return c.clone();
    }
    let mut atoms = c.atoms().to_vec();
    let mut i = 0;
    while i < atoms.len() {
        let a = atoms.remove(i);
        let rest = Cube::new(atoms.clone(), RankMode::Absent);
        if !cube_implies_atom(&rest, &a) {
            atoms.insert(i, a);
            i += 1;
        }
    }
    Cube::new(atoms, c.mode())
}
