use std::collections::BTreeMap;
use std::fmt;

use crate::linear::{LinearTerm, Var};
use crate::logic::atom::{Atom, Normalized, Rel};
use crate::scalar::Scalar;

/// How a cube constrains `oldrnk`.
///
/// `Inf` means `oldrnk = ∞`; `Finite` means `oldrnk` is a finite value and
/// may be mentioned by atoms; `Absent` leaves `oldrnk` entirely unconstrained
/// (either `∞` or any finite value).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RankMode {
    Inf,
    Finite,
    Absent,
}

/// A conjunction of atoms in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cube<S> {
    atoms: Vec<Atom<S>>,
    mode: RankMode,
}

#[derive(Clone)]
struct Bound<S> {
    value: S,
    strict: bool,
}

#[derive(Clone, Default)]
struct Bounds<S> {
    lo: Option<Bound<S>>,
    hi: Option<Bound<S>>,
}

impl<S: Scalar> Cube<S> {
    /// Canonicalizes: normalizes atoms, merges parallel bounds, detects
    /// contradictions between them, and sorts.
    pub fn new(atoms: impl IntoIterator<Item = Atom<S>>, mode: RankMode) -> Self {
        let atoms: Vec<Atom<S>> = atoms.into_iter().collect();
        let oldrnk = Var::oldrnk();
        let mut mode = mode;
        if atoms.iter().any(|a| a.mentions(&oldrnk)) {
            assert!(mode != RankMode::Inf, "oldrnk = ∞ cube cannot constrain oldrnk");
            mode = RankMode::Finite;
        }
        match canonicalize(atoms) {
            Some(atoms) => Cube { atoms, mode },
            None => Cube::falsum_with(mode),
        }
    }

    pub fn top(mode: RankMode) -> Self {
        Cube {
            atoms: Vec::new(),
            mode,
        }
    }

    pub fn falsum() -> Self {
        Self::falsum_with(RankMode::Absent)
    }

    fn falsum_with(mode: RankMode) -> Self {
        Cube {
            atoms: vec![Atom::falsum()],
            mode,
        }
    }

    pub fn is_falsum(&self) -> bool {
        self.atoms.len() == 1 && self.atoms[0].term().is_constant()
    }

    pub fn atoms(&self) -> &[Atom<S>] {
        &self.atoms
    }

    pub fn mode(&self) -> RankMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn with_mode(&self, mode: RankMode) -> Self {
        Cube::new(self.atoms.clone(), mode)
    }

    pub fn conjoin(&self, extra: impl IntoIterator<Item = Atom<S>>) -> Self {
        Cube::new(self.atoms.iter().cloned().chain(extra), self.mode)
    }

    pub fn conjoin_cube(&self, other: &Cube<S>) -> Option<Self> {
        let mode = match (self.mode, other.mode) {
            (RankMode::Absent, m) | (m, RankMode::Absent) => m,
            (a, b) if a == b => a,
            _ => return None,
        };
        Some(Cube::new(
            self.atoms.iter().chain(other.atoms.iter()).cloned(),
            mode,
        ))
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.atoms.iter().any(|a| a.mentions(v))
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self
            .atoms
            .iter()
            .flat_map(|a| a.term().vars().cloned())
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn rename_all(&self, f: impl Fn(&Var) -> Var) -> Self {
        Cube::new(self.atoms.iter().map(|a| a.rename_all(&f)), self.mode)
    }

    /// Equalities rewritten as pairs of inequalities; used when weakening.
    pub fn split_equalities(&self) -> Vec<Atom<S>> {
        let mut out = Vec::new();
        for a in &self.atoms {
            if a.rel() == Rel::Eq {
                out.push(Atom::le(a.term().clone()));
                out.push(Atom::le(a.term().negate()));
            } else {
                out.push(a.clone());
            }
        }
        out
    }
}

fn canonicalize<S: Scalar>(atoms: Vec<Atom<S>>) -> Option<Vec<Atom<S>>> {
    // Group by the linear part in canonical sign; track bounds on it.
    let mut groups: BTreeMap<LinearTerm<S>, Bounds<S>> = BTreeMap::new();
    for a in atoms {
        let a = match a.normalize() {
            Normalized::True => continue,
            Normalized::False => return None,
            Normalized::Atom(a) => a,
        };
        let lin = LinearTerm::from_parts(a.term().coeffs().clone(), S::zero());
        let c = a.term().constant_part().clone();
        let positive = lin.leading_coeff().is_some_and(|c| c.is_positive());
        let (key, flip) = if positive { (lin, false) } else { (lin.negate(), true) };
        let b = groups.entry(key).or_insert_with(|| Bounds { lo: None, hi: None });
        let strict = a.rel() == Rel::Lt;
        match (a.rel(), flip) {
            // key + c ⋈ 0  ⇒  key ⋈ -c
            (Rel::Le | Rel::Lt, false) => tighten_hi(b, -c, strict),
            // -key + c ⋈ 0  ⇒  key ⋈flip c
            (Rel::Le | Rel::Lt, true) => tighten_lo(b, c, strict),
            (Rel::Eq, false) => {
                tighten_hi(b, -c.clone(), false);
                tighten_lo(b, -c, false);
            }
            (Rel::Eq, true) => {
                tighten_hi(b, c.clone(), false);
                tighten_lo(b, c, false);
            }
        }
    }
    let mut out = Vec::new();
    for (key, b) in groups {
        match (&b.lo, &b.hi) {
            (Some(lo), Some(hi)) if lo.value > hi.value => return None,
            (Some(lo), Some(hi)) if lo.value == hi.value => {
                if lo.strict || hi.strict {
                    return None;
                }
                out.push(Atom::eq(key.plus_constant(&-lo.value.clone())));
            }
            _ => {
                if let Some(lo) = &b.lo {
                    let t = key.negate().plus_constant(&lo.value);
                    out.push(if lo.strict { Atom::lt(t) } else { Atom::le(t) });
                }
                if let Some(hi) = &b.hi {
                    let t = key.plus_constant(&-hi.value.clone());
                    out.push(if hi.strict { Atom::lt(t) } else { Atom::le(t) });
                }
            }
        }
    }
    out.sort();
    Some(out)
}

fn tighten_hi<S: Scalar>(b: &mut Bounds<S>, value: S, strict: bool) {
    let replace = match &b.hi {
        None => true,
        Some(h) => value < h.value || (value == h.value && strict && !h.strict),
    };
    if replace {
        b.hi = Some(Bound { value, strict });
    }
}

fn tighten_lo<S: Scalar>(b: &mut Bounds<S>, value: S, strict: bool) {
    let replace = match &b.lo {
        None => true,
        Some(l) => value > l.value || (value == l.value && strict && !l.strict),
    };
    if replace {
        b.lo = Some(Bound { value, strict });
    }
}

impl<S: Scalar> fmt::Display for Cube<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.mode {
            RankMode::Inf => parts.push("oldrnk == inf".into()),
            RankMode::Finite if !self.mentions(&Var::oldrnk()) => {
                parts.push("oldrnk < inf".into())
            }
            _ => {}
        }
        if self.is_falsum() {
            parts.clear();
            parts.push("false".into());
        } else {
            parts.extend(self.atoms.iter().map(|a| a.to_string()));
        }
        if parts.is_empty() {
            parts.push("true".into());
        }
        f.write_str(&parts.join(" && "))
    }
}
