use std::fmt;

use crate::linear::{LinearTerm, Var};
use crate::scalar::Scalar;

/// Relation of an atom's term to zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Le,
    /// Only produced internally when negating `≤` atoms during entailment.
    Lt,
    Eq,
}

/// `term ⋈ 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom<S> {
    term: LinearTerm<S>,
    rel: Rel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalized<S> {
    True,
    False,
    Atom(Atom<S>),
}

impl<S: Scalar> Atom<S> {
    pub fn new(term: LinearTerm<S>, rel: Rel) -> Self {
        Atom { term, rel }
    }

    pub fn le(term: LinearTerm<S>) -> Self {
        Self::new(term, Rel::Le)
    }

    pub fn lt(term: LinearTerm<S>) -> Self {
        Self::new(term, Rel::Lt)
    }

    pub fn eq(term: LinearTerm<S>) -> Self {
        Self::new(term, Rel::Eq)
    }

    /// `lhs ≤ rhs`.
    pub fn le_terms(lhs: &LinearTerm<S>, rhs: &LinearTerm<S>) -> Self {
        Self::le(lhs.sub(rhs))
    }

    /// `lhs = rhs`.
    pub fn eq_terms(lhs: &LinearTerm<S>, rhs: &LinearTerm<S>) -> Self {
        Self::eq(lhs.sub(rhs))
    }

    /// The constant-false atom `1 ≤ 0`.
    pub fn falsum() -> Self {
        Self::le(LinearTerm::constant(S::one()))
    }

    pub fn term(&self) -> &LinearTerm<S> {
        &self.term
    }

    pub fn rel(&self) -> Rel {
        self.rel
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.term.mentions(v)
    }

    pub fn substitute(&self, v: &Var, by: &LinearTerm<S>) -> Self {
        Atom::new(self.term.substitute(v, by), self.rel)
    }

    pub fn rename_all(&self, f: impl Fn(&Var) -> Var) -> Self {
        Atom::new(self.term.rename_all(f), self.rel)
    }

    /// Truth value of a variable-free atom.
    pub fn constant_truth(&self) -> Option<bool> {
        if !self.term.is_constant() {
            return None;
        }
        let c = self.term.constant_part();
        Some(match self.rel {
            Rel::Le => !c.is_positive(),
            Rel::Lt => c.is_negative(),
            Rel::Eq => c.is_zero(),
        })
    }

    /// Scale the linear part to coprime integers; equalities additionally get
    /// a positive leading coefficient.
    pub fn normalize(&self) -> Normalized<S> {
        if let Some(t) = self.constant_truth() {
            return if t { Normalized::True } else { Normalized::False };
        }
        let (v, c) = self.term.coeffs().iter().next().expect("non-constant");
        let lin = LinearTerm::from_parts(self.term.coeffs().clone(), S::zero()).primitive();
        let mut k = lin.coeff(v) / c.clone();
        if self.rel == Rel::Eq && (c.clone() * k.clone()).is_negative() {
            k = -k;
        }
        debug_assert!(self.rel == Rel::Eq || k.is_positive());
        Normalized::Atom(Atom::new(self.term.scale(&k), self.rel))
    }

    /// Strengthening valid over integer points: scales to coprime integer
    /// coefficients and rounds the bound, so `<` becomes `≤ … − 1`.
    pub fn tighten_integer(&self) -> Normalized<S> {
        let n = match self.normalize() {
            Normalized::Atom(a) => a,
            other => return other,
        };
        let lin = LinearTerm::from_parts(n.term.coeffs().clone(), S::zero());
        // n.term = lin + c, lin has coprime integer coefficients
        let bound = -n.term.constant_part().clone();
        let (k, rel) = match n.rel {
            Rel::Le => (bound.floor_part(), Rel::Le),
            Rel::Lt => {
                let f = bound.floor_part();
                let k = if f == bound { f - S::one() } else { f };
                (k, Rel::Le)
            }
            Rel::Eq => {
                if !bound.is_integral() {
                    return Normalized::False;
                }
                (bound, Rel::Eq)
            }
        };
        Normalized::Atom(Atom::new(lin.plus_constant(&-k), rel))
    }

    /// Disjuncts of the negation.
    pub fn negate(&self) -> Vec<Atom<S>> {
        match self.rel {
            Rel::Le => vec![Atom::lt(self.term.negate())],
            Rel::Lt => vec![Atom::le(self.term.negate())],
            Rel::Eq => vec![Atom::lt(self.term.clone()), Atom::lt(self.term.negate())],
        }
    }

    pub fn holds(&self, lookup: impl Fn(&Var) -> Option<S>) -> Option<bool> {
        let v = self.term.eval(lookup)?;
        Some(match self.rel {
            Rel::Le => !v.is_positive(),
            Rel::Lt => v.is_negative(),
            Rel::Eq => v.is_zero(),
        })
    }
}

impl<S: Scalar> fmt::Display for Atom<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = match self.normalize() {
            Normalized::True => return f.write_str("true"),
            Normalized::False => return f.write_str("false"),
            Normalized::Atom(a) => a,
        };
        let lead_neg = a.term.leading_coeff().is_some_and(|c| c.is_negative());
        let (t, op) = match (a.rel, lead_neg) {
            (Rel::Le, false) => (a.term.clone(), "<="),
            (Rel::Lt, false) => (a.term.clone(), "<"),
            (Rel::Le, true) => (a.term.negate(), ">="),
            (Rel::Lt, true) => (a.term.negate(), ">"),
            (Rel::Eq, _) => (a.term.clone(), "=="),
        };
        t.fmt_linear_part(f)?;
        write!(f, " {} {}", op, -t.constant_part().clone())
    }
}
