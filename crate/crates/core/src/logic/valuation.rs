use std::collections::BTreeMap;

use crate::linear::Var;
use crate::logic::cube::{Cube, RankMode};
use crate::logic::predicate::Predicate;
use crate::scalar::Scalar;

/// A program state; `oldrnk = None` stands for `∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Valuation<S> {
    pub values: BTreeMap<Var, S>,
    pub oldrnk: Option<S>,
}

impl<S: Scalar> Valuation<S> {
    pub fn new(values: impl IntoIterator<Item = (Var, S)>) -> Self {
        Valuation {
            values: values.into_iter().collect(),
            oldrnk: None,
        }
    }

    pub fn with_oldrnk(mut self, r: Option<S>) -> Self {
        self.oldrnk = r;
        self
    }

    pub fn get(&self, v: &Var) -> Option<S> {
        if v.is_oldrnk() {
            self.oldrnk.clone()
        } else {
            self.values.get(v).cloned()
        }
    }
}

pub fn evaluate_cube<S: Scalar>(c: &Cube<S>, nu: &Valuation<S>) -> bool {
    let mode_ok = match c.mode() {
        RankMode::Inf => nu.oldrnk.is_none(),
        RankMode::Finite => nu.oldrnk.is_some(),
        RankMode::Absent => true,
    };
    mode_ok && c.atoms().iter().all(|a| a.holds(|v| nu.get(v)) == Some(true))
}

pub fn evaluate<S: Scalar>(p: &Predicate<S>, nu: &Valuation<S>) -> bool {
    p.cubes().iter().any(|c| evaluate_cube(c, nu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::LinearTerm;
    use crate::logic::Atom;
    use crate::scalar::int;
    use crate::Rat;

    #[test]
    fn examples() {
        let x = Var::new("x");
        let p = Predicate::from_cube(Cube::new(
            [Atom::le(LinearTerm::<Rat>::var(x.clone()).negate())],
            RankMode::Absent,
        ));
        assert!(evaluate(&p, &Valuation::new([(x.clone(), int(0))])));
        let nu = Valuation::<Rat>::new([(x, int(0))]).with_oldrnk(Some(int(5)));
        assert!(!evaluate(&Predicate::inf(), &nu));
        assert!(evaluate(&Predicate::top(), &nu));
    }
}
