//! Variables and affine terms.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::scalar::Scalar;

/// Name reserved for the auxiliary rank-tracking variable.
pub const OLDRNK: &str = "oldrnk";

/// A program (or auxiliary) variable. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn oldrnk() -> Self {
        Var::new(OLDRNK)
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_oldrnk(&self) -> bool {
        &*self.0 == OLDRNK
    }

    /// Post-state copy `v'` used in transition relations.
    pub fn primed(&self) -> Var {
        Var(Arc::from(format!("{}'", self.0)))
    }

    /// Internal temporary `v#k`; never collides with a parsed identifier.
    pub fn fresh(&self, k: usize) -> Var {
        Var(Arc::from(format!("{}#{}", self.0, k)))
    }

    pub fn is_internal(&self) -> bool {
        self.0.contains('#')
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `Σ coeff·var + constant`, with no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LinearTerm<S> {
    coeffs: BTreeMap<Var, S>,
    constant: S,
}

impl<S: Scalar> Default for LinearTerm<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> LinearTerm<S> {
    pub fn zero() -> Self {
        LinearTerm {
            coeffs: BTreeMap::new(),
            constant: S::zero(),
        }
    }

    pub fn constant(c: S) -> Self {
        LinearTerm {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: Var) -> Self {
        Self::zero().with_coeff(v, S::one())
    }

    pub fn from_parts(coeffs: impl IntoIterator<Item = (Var, S)>, constant: S) -> Self {
        let mut t = Self::constant(constant);
        for (v, c) in coeffs {
            t.add_coeff(v, c);
        }
        t
    }

    pub fn with_coeff(mut self, v: Var, c: S) -> Self {
        self.add_coeff(v, c);
        self
    }

    pub fn add_coeff(&mut self, v: Var, c: S) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(v.clone()).or_insert_with(S::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            self.coeffs.remove(&v);
        }
    }

    pub fn coeff(&self, v: &Var) -> S {
        self.coeffs.get(v).cloned().unwrap_or_else(S::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<Var, S> {
        &self.coeffs
    }

    pub fn constant_part(&self) -> &S {
        &self.constant
    }

    pub fn set_constant(&mut self, c: S) {
        self.constant = c;
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.coeffs.contains_key(v)
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.coeffs.keys()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (v, c) in &other.coeffs {
            r.add_coeff(v.clone(), c.clone());
        }
        r.constant = r.constant + other.constant.clone();
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, k: &S) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        LinearTerm {
            coeffs: self
                .coeffs
                .iter()
                .map(|(v, c)| (v.clone(), c.clone() * k.clone()))
                .collect(),
            constant: self.constant.clone() * k.clone(),
        }
    }

    pub fn negate(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn plus_constant(&self, k: &S) -> Self {
        let mut r = self.clone();
        r.constant = r.constant + k.clone();
        r
    }

    /// Replace `v` by `by` everywhere.
    pub fn substitute(&self, v: &Var, by: &Self) -> Self {
        match self.coeffs.get(v) {
            None => self.clone(),
            Some(c) => {
                let mut rest = self.clone();
                rest.coeffs.remove(v);
                rest.add(&by.scale(c))
            }
        }
    }

    pub fn rename(&self, from: &Var, to: &Var) -> Self {
        self.substitute(from, &Self::var(to.clone()))
    }

    pub fn rename_all(&self, f: impl Fn(&Var) -> Var) -> Self {
        Self::from_parts(
            self.coeffs.iter().map(|(v, c)| (f(v), c.clone())),
            self.constant.clone(),
        )
    }

    /// Evaluate; variables missing from `lookup` are an error of the caller.
    pub fn eval(&self, lookup: impl Fn(&Var) -> Option<S>) -> Option<S> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            acc = acc + c.clone() * lookup(v)?;
        }
        Some(acc)
    }

    /// Smallest positive multiplier making every coefficient and the constant
    /// integral.
    pub fn denominator_lcm(&self) -> S {
        let mut l = self.constant.denom_part();
        for c in self.coeffs.values() {
            l = S::int_lcm(&l, &c.denom_part());
        }
        l
    }

    /// Scale by a positive factor so all entries become coprime integers.
    pub fn primitive(&self) -> Self {
        let l = self.denominator_lcm();
        let t = self.scale(&l);
        let mut g = t.constant.numer_part().abs();
        for c in t.coeffs.values() {
            g = S::int_gcd(&g, &c.numer_part());
        }
        if g.is_zero() || g.is_one() {
            t
        } else {
            t.scale(&(S::one() / g))
        }
    }

    pub fn leading_coeff(&self) -> Option<&S> {
        self.coeffs.values().next()
    }

    pub fn fmt_linear_part(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if !mag.is_one() {
                write!(f, "{}*", mag)?;
            }
            write!(f, "{}", v)?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Display for LinearTerm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "{}", self.constant);
        }
        self.fmt_linear_part(f)?;
        if !self.constant.is_zero() {
            if self.constant.is_negative() {
                write!(f, " - {}", self.constant.abs())?;
            } else {
                write!(f, " + {}", self.constant)?;
            }
        }
        Ok(())
    }
}
