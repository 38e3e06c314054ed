//! Fourier–Motzkin projection.
//!
//! Equalities mentioning the eliminated variable are used for substitution
//! first; only when none exists are lower/upper bound pairs combined.

use crate::linear::Var;
use crate::logic::atom::{Atom, Rel};
use crate::logic::cube::Cube;
use crate::logic::entail::remove_redundant;
use crate::logic::{LogicError, MAX_ATOMS};
use crate::scalar::Scalar;

/// Projects `v` out of `cube` over the rationals.
pub fn eliminate<S: Scalar>(cube: &Cube<S>, v: &Var) -> Result<Cube<S>, LogicError> {
    if cube.is_falsum() || !cube.mentions(v) {
        return Ok(cube.clone());
    }
    let atoms = eliminate_atoms(cube.atoms(), v);
    let mut out = Cube::new(atoms, cube.mode());
    if out.len() > 16 {
        out = remove_redundant(&out);
    }
    if out.len() > MAX_ATOMS {
        return Err(LogicError::TooManyAtoms(out.len()));
    }
    Ok(out)
}

/// Eliminates every variable for which `drop` holds.
pub fn project<S: Scalar>(
    cube: &Cube<S>,
    drop: impl Fn(&Var) -> bool,
) -> Result<Cube<S>, LogicError> {
    let mut c = cube.clone();
    // Variables bound by equalities go first; they never grow the cube.
    loop {
        let pending: Vec<Var> = c.vars().into_iter().filter(|x| drop(x)).collect();
        if pending.is_empty() {
            return Ok(c);
        }
        let next = pending
            .iter()
            .find(|x| c.atoms().iter().any(|a| a.rel() == Rel::Eq && a.mentions(x)))
            .unwrap_or_else(|| {
                // Fewest generated pairs first.
                pending
                    .iter()
                    .min_by_key(|x| {
                        let (mut lo, mut hi) = (0usize, 0usize);
                        for a in c.atoms() {
                            let k = a.term().coeff(x);
                            if k.is_positive() {
                                hi += 1;
                            } else if k.is_negative() {
                                lo += 1;
                            }
                        }
                        lo * hi
                    })
                    .expect("non-empty")
            })
            .clone();
        c = eliminate(&c, &next)?;
    }
}

pub(crate) fn eliminate_atoms<S: Scalar>(atoms: &[Atom<S>], v: &Var) -> Vec<Atom<S>> {
    if let Some(eq) = atoms.iter().find(|a| a.rel() == Rel::Eq && a.mentions(v)) {
        // v = -(rest)/k
        let k = eq.term().coeff(v);
        let mut rest = eq.term().clone();
        rest.add_coeff(v.clone(), -k.clone());
        let by = rest.scale(&(-S::one() / k));
        return atoms
            .iter()
            .filter(|a| *a != eq)
            .map(|a| a.substitute(v, &by))
            .collect();
    }
    let mut keep = Vec::new();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for a in atoms {
        let k = a.term().coeff(v);
        if k.is_zero() {
            keep.push(a.clone());
        } else if k.is_positive() {
            upper.push(a);
        } else {
            lower.push(a);
        }
    }
    for u in &upper {
        let ku = u.term().coeff(v);
        for l in &lower {
            let kl = -l.term().coeff(v);
            // kl·u + ku·l cancels v
            let t = u.term().scale(&kl).add(&l.term().scale(&ku));
            let rel = if u.rel() == Rel::Lt || l.rel() == Rel::Lt {
                Rel::Lt
            } else {
                Rel::Le
            };
            keep.push(Atom::new(t, rel));
        }
    }
    keep
}

/// Satisfiability by eliminating every variable. Independent of the simplex
/// path; used as a cross-check.
pub fn fm_is_sat<S: Scalar>(atoms: &[Atom<S>]) -> bool {
    let mut cur: Vec<Atom<S>> = atoms.to_vec();
    loop {
        let c = Cube::new(cur.clone(), crate::logic::RankMode::Absent);
        if c.is_falsum() {
            return false;
        }
        let Some(v) = c.vars().into_iter().next() else {
            return true;
        };
        cur = eliminate_atoms(c.atoms(), &v);
    }
}
