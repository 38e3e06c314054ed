use crate::linear::{LinearTerm, Var};
use crate::logic::atom::Atom;
use crate::logic::cube::{Cube, RankMode};
use crate::logic::entail::{entails, is_sat};
use crate::logic::fm::eliminate;
use crate::logic::predicate::Predicate;
use crate::logic::LogicError;
use crate::program::Statement;
use crate::scalar::Scalar;

/// Strongest postcondition of one cube; may return a false cube.
pub fn strongest_post_cube<S: Scalar>(c: &Cube<S>, st: &Statement<S>) -> Result<Cube<S>, LogicError> {
    let out = match st {
        Statement::Assume(g) => match c.conjoin_cube(g) {
            Some(c) => c,
            None => return Ok(Cube::falsum()),
        },
        Statement::Assign(v, e) if v.is_oldrnk() => {
            if e.mentions(v) {
                return Err(LogicError::Unsupported("self-referential oldrnk update"));
            }
            let base = if c.mode() == RankMode::Finite { eliminate(c, v)? } else { c.clone() };
            let mut atoms = base.atoms().to_vec();
            atoms.push(Atom::eq_terms(&LinearTerm::var(v.clone()), e));
            Cube::new(atoms, RankMode::Finite)
        }
        Statement::Havoc(v) if v.is_oldrnk() => {
            let base = if c.mode() == RankMode::Finite { eliminate(c, v)? } else { c.clone() };
            base.with_mode(RankMode::Absent)
        }
        Statement::Assign(v, e) => {
            let old = v.fresh(0);
            let renamed = c.rename_all(|x| if x == v { old.clone() } else { x.clone() });
            let rhs = e.rename(v, &old);
            let with = renamed.conjoin([Atom::eq_terms(&LinearTerm::var(v.clone()), &rhs)]);
            eliminate(&with, &old)?
        }
        Statement::Havoc(v) => eliminate(c, v)?,
    };
    Ok(if is_sat(&out) { out } else { Cube::falsum() })
}

pub fn strongest_post<S: Scalar>(p: &Predicate<S>, st: &Statement<S>) -> Result<Predicate<S>, LogicError> {
    let mut cubes = Vec::with_capacity(p.len());
    for c in p.cubes() {
        cubes.push(strongest_post_cube(c, st)?);
    }
    let out = Predicate::new(cubes);
    out.check_size()?;
    Ok(out)
}

/// Effect of `oldrnk := f`: every cube becomes finite with `oldrnk = f`.
pub fn post_set_oldrnk<S: Scalar>(p: &Predicate<S>, f: &LinearTerm<S>) -> Result<Predicate<S>, LogicError> {
    let oldrnk = Var::oldrnk();
    let mut cubes = Vec::new();
    for c in p.cubes() {
        let base = if c.mode() == RankMode::Finite {
            eliminate(c, &oldrnk)?
        } else {
            c.clone()
        };
        let atoms = base
            .atoms()
            .iter()
            .cloned()
            .chain([Atom::eq_terms(&LinearTerm::var(oldrnk.clone()), f)]);
        cubes.push(Cube::new(atoms, RankMode::Finite));
    }
    Ok(Predicate::new(cubes))
}

/// `{pre} st {post}`.
pub fn hoare_valid<S: Scalar>(
    pre: &Predicate<S>,
    st: &Statement<S>,
    post: &Predicate<S>,
) -> Result<bool, LogicError> {
    entails(&strongest_post(pre, st)?, post)
}

/// `{pre} oldrnk := f; st {post}`, the triple required on edges leaving the
/// final location.
pub fn hoare_valid_from_final<S: Scalar>(
    pre: &Predicate<S>,
    f: &LinearTerm<S>,
    st: &Statement<S>,
    post: &Predicate<S>,
) -> Result<bool, LogicError> {
    entails(&strongest_post(&post_set_oldrnk(pre, f)?, st)?, post)
}
