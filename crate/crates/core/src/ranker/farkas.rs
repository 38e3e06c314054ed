//! Linear ranking functions via Farkas' lemma.
//!
//! For a satisfiable system `H = {tₕ(z) ⋈ 0}` the implication
//! `H ⊨ T(z) ≤ 0` holds iff `T ≡ Σ λₕ tₕ − δ` for some `δ ≥ 0` and
//! multipliers `λₕ`, non-negative on inequalities. With the coefficients of
//! `T` affine in the template unknowns every condition stays linear.

use std::collections::{BTreeMap, BTreeSet};

use crate::linear::{LinearTerm, Var};
use crate::logic::{cube_implies_atom, is_sat, Atom, Cube, RankMode, Rel};
use crate::lp::{LinearProgram, LpOutcome, RowKind};
use crate::ranker::{LassoRelation, RankerResult, RankingFunction};
use crate::scalar::Scalar;

/// Affine expression over LP columns.
#[derive(Clone, Debug)]
struct Aff<S> {
    lin: Vec<(usize, S)>,
    c: S,
}

impl<S: Scalar> Aff<S> {
    fn zero() -> Self {
        Aff { lin: Vec::new(), c: S::zero() }
    }

    fn col(j: usize, k: S) -> Self {
        Aff { lin: vec![(j, k)], c: S::zero() }
    }

    fn konst(c: S) -> Self {
        Aff { lin: Vec::new(), c }
    }

    fn plus(mut self, o: &Aff<S>) -> Self {
        self.lin.extend(o.lin.iter().cloned());
        self.c = self.c + o.c.clone();
        self
    }

    fn neg(&self) -> Self {
        Aff {
            lin: self.lin.iter().map(|(j, k)| (*j, -k.clone())).collect(),
            c: -self.c.clone(),
        }
    }
}

/// A template `Σ cᵥ·v + c₀` with unknown coefficients.
struct Template {
    cols: BTreeMap<Var, usize>,
    konst: usize,
}

impl Template {
    fn new<S: Scalar>(lp: &mut LinearProgram<S>, vars: &[Var]) -> Self {
        let cols = vars.iter().map(|v| (v.clone(), lp.add_var(false))).collect();
        Template {
            cols,
            konst: lp.add_var(false),
        }
    }

    /// Coefficient map of `sign · t(x)` (or of `t(x')` when `primed`).
    fn at<S: Scalar>(&self, primed: bool, sign: i64) -> BTreeMap<Var, Aff<S>> {
        self.cols
            .iter()
            .map(|(v, &j)| {
                let key = if primed { v.primed() } else { v.clone() };
                (key, Aff::col(j, S::from_i64(sign)))
            })
            .collect()
    }

    fn konst_aff<S: Scalar>(&self, sign: i64) -> Aff<S> {
        Aff::col(self.konst, S::from_i64(sign))
    }

    fn read<S: Scalar>(&self, point: &[S]) -> LinearTerm<S> {
        LinearTerm::from_parts(
            self.cols.iter().map(|(v, &j)| (v.clone(), point[j].clone())),
            point[self.konst].clone(),
        )
    }
}

fn merge<S: Scalar>(a: BTreeMap<Var, Aff<S>>, b: BTreeMap<Var, Aff<S>>) -> BTreeMap<Var, Aff<S>> {
    let mut out = a;
    for (v, x) in b {
        let e = out.remove(&v).unwrap_or_else(Aff::zero);
        out.insert(v, e.plus(&x));
    }
    out
}

/// Adds the Farkas rows for `hyps ⊨ Σ target[z]·z + konst ≤ 0`.
fn implication<S: Scalar>(
    lp: &mut LinearProgram<S>,
    hyps: &[Atom<S>],
    target: &BTreeMap<Var, Aff<S>>,
    konst: &Aff<S>,
) {
    let lambdas: Vec<usize> = hyps.iter().map(|h| lp.add_var(h.rel() != Rel::Eq)).collect();
    let mut vars: BTreeSet<Var> = target.keys().cloned().collect();
    for h in hyps {
        vars.extend(h.term().vars().cloned());
    }
    for z in vars {
        let mut row: Vec<(usize, S)> = Vec::new();
        for (h, &l) in hyps.iter().zip(&lambdas) {
            let k = h.term().coeff(&z);
            if !k.is_zero() {
                row.push((l, k));
            }
        }
        let mut rhs = S::zero();
        if let Some(t) = target.get(&z) {
            row.extend(t.neg().lin);
            rhs = t.c.clone();
        }
        lp.add_row(row, RowKind::Eq, rhs);
    }
    // konst ≤ Σ λₕ·constₕ
    let mut row: Vec<(usize, S)> = konst.lin.clone();
    for (h, &l) in hyps.iter().zip(&lambdas) {
        let c = h.term().constant_part();
        if !c.is_zero() {
            row.push((l, -c.clone()));
        }
    }
    lp.add_row(row, RowKind::Le, -konst.c.clone());
}

/// `s(x) ≥ 0` as an atom.
fn nonneg<S: Scalar>(t: &LinearTerm<S>) -> Atom<S> {
    Atom::le(t.negate())
}

fn primed<S: Scalar>(t: &LinearTerm<S>) -> LinearTerm<S> {
    t.rename_all(|v| v.primed())
}

/// Checks (i) `stem_post ⊨ inv`, (ii) `inv ∧ loop ⊨ inv'`, (iii)
/// `inv ∧ loop ⊨ f ≥ 0 ∧ f − f' ≥ 1`.
pub fn validate<S: Scalar>(rel: &LassoRelation<S>, f: &RankingFunction<S>, inv: &Cube<S>) -> bool {
    if !inv.atoms().iter().all(|a| cube_implies_atom(&rel.stem_post, a)) {
        return false;
    }
    let Some(hyp) = inv.conjoin_cube(&rel.loop_rel) else {
        return false;
    };
    let inductive = inv
        .atoms()
        .iter()
        .all(|a| cube_implies_atom(&hyp, &a.rename_all(|v| v.primed())));
    let bound = nonneg(&f.term);
    let decrease = Atom::le(primed(&f.term).sub(&f.term).plus_constant(&S::one()));
    inductive && cube_implies_atom(&hyp, &bound) && cube_implies_atom(&hyp, &decrease)
}

/// Largest subset of `stem_post` atoms (equalities split) that is inductive
/// for the loop.
fn houdini<S: Scalar>(rel: &LassoRelation<S>) -> Vec<Atom<S>> {
    let mut keep = rel.stem_post.split_equalities();
    loop {
        let hyp = Cube::new(
            keep.iter().cloned().chain(rel.loop_rel.atoms().iter().cloned()),
            RankMode::Absent,
        );
        let before = keep.len();
        keep.retain(|a| cube_implies_atom(&hyp, &a.rename_all(|v| v.primed())));
        if keep.len() == before {
            return keep;
        }
    }
}

struct Attempt<S> {
    inv: Vec<Atom<S>>,
    /// Synthesize an extra `s(x) ≥ 0`; multipliers of it in the bound and
    /// decrease conditions.
    extra: Option<(bool, bool)>,
}

fn solve<S: Scalar>(rel: &LassoRelation<S>, at: &Attempt<S>) -> Option<(RankingFunction<S>, Cube<S>)> {
    let mut lp = LinearProgram::new();
    let f = Template::new(&mut lp, &rel.vars);
    let s = at.extra.map(|_| Template::new(&mut lp, &rel.vars));
    let hyps: Vec<Atom<S>> = at
        .inv
        .iter()
        .chain(rel.loop_rel.atoms())
        .map(|a| if a.rel() == Rel::Lt { Atom::le(a.term().clone()) } else { a.clone() })
        .collect();
    let (use_bound, use_dec) = at.extra.unwrap_or((false, false));
    // bound: −f(x) [+ s(x)] ≤ 0
    let mut t = f.at::<S>(false, -1);
    let mut k = f.konst_aff::<S>(-1);
    if let (Some(s), true) = (&s, use_bound) {
        t = merge(t, s.at(false, 1));
        k = k.plus(&s.konst_aff(1));
    }
    implication(&mut lp, &hyps, &t, &k);
    // decrease: f(x') − f(x) + 1 [+ s(x)] ≤ 0
    let mut t = merge(f.at::<S>(true, 1), f.at(false, -1));
    let mut k = Aff::konst(S::one());
    if let (Some(s), true) = (&s, use_dec) {
        t = merge(t, s.at(false, 1));
        k = k.plus(&s.konst_aff(1));
    }
    implication(&mut lp, &hyps, &t, &k);
    if let Some(s) = &s {
        // stem_post ⊨ −s(x) ≤ 0
        let stem: Vec<Atom<S>> = rel.stem_post.atoms().to_vec();
        implication(&mut lp, &stem, &s.at(false, -1), &s.konst_aff(-1));
        // inv ∧ loop ∧ s(x) ≥ 0 ⊨ s(x') ≥ 0, multiplier of s(x) ≥ 0 fixed to 1
        let t = merge(s.at::<S>(true, -1), s.at(false, 1));
        implication(&mut lp, &hyps, &t, &Aff::zero());
    }
    // minimize Σ|f_v| + |f_0|
    let mut objective = Vec::new();
    for &j in f.cols.values().chain(std::iter::once(&f.konst)) {
        let a = lp.add_var(true);
        lp.add_row(vec![(j, S::one()), (a, -S::one())], RowKind::Le, S::zero());
        lp.add_row(vec![(j, -S::one()), (a, -S::one())], RowKind::Le, S::zero());
        objective.push((a, -S::one()));
    }
    lp.set_objective(objective);
    let point = match lp.solve() {
        LpOutcome::Optimal { point, .. } => point,
        _ => return None,
    };
    let mut inv = at.inv.clone();
    if let Some(s) = &s {
        let st = s.read(&point);
        if !st.is_constant() {
            inv.push(nonneg(&st));
        }
    }
    Some((RankingFunction::new(f.read(&point)), Cube::new(inv, RankMode::Absent)))
}

fn integral<S: Scalar>(rel: &LassoRelation<S>, f: RankingFunction<S>, inv: &Cube<S>) -> Option<RankingFunction<S>> {
    let scaled = RankingFunction::new(f.term.scale(&f.term.denominator_lcm()));
    let primitive = RankingFunction::new(scaled.term.primitive());
    [primitive, scaled, f].into_iter().find(|g| validate(rel, g, inv))
}

/// Greedily drops invariant atoms while the certificate conditions hold.
fn minimize<S: Scalar>(rel: &LassoRelation<S>, f: &RankingFunction<S>, inv: Cube<S>) -> Cube<S> {
    let mut atoms = inv.atoms().to_vec();
    let mut i = 0;
    while i < atoms.len() {
        let mut fewer = atoms.clone();
        fewer.remove(i);
        if validate(rel, f, &Cube::new(fewer.clone(), RankMode::Absent)) {
            atoms = fewer;
        } else {
            i += 1;
        }
    }
    Cube::new(atoms, RankMode::Absent)
}

pub fn synthesize<S: Scalar>(rel: &LassoRelation<S>) -> RankerResult<S> {
    let Some(both) = rel.stem_post.conjoin_cube(&rel.loop_rel) else {
        return RankerResult::NoRankFound;
    };
    if !is_sat(&both) {
        return RankerResult::InfeasibleLoop { inv: infeasibility_witness(rel) };
    }
    let h = houdini(rel);
    let attempts = [
        Attempt { inv: Vec::new(), extra: None },
        Attempt { inv: h.clone(), extra: None },
        Attempt { inv: h.clone(), extra: Some((true, true)) },
        Attempt { inv: h.clone(), extra: Some((true, false)) },
        Attempt { inv: h, extra: Some((false, true)) },
    ];
    for at in &attempts {
        let Some((f, inv)) = solve(rel, at) else {
            continue;
        };
        let Some(f) = integral(rel, f, &inv) else {
            log::warn!("ranking candidate {} failed validation", inv);
            continue;
        };
        let inv = minimize(rel, &f, inv);
        assert!(validate(rel, &f, &inv), "ranker produced an invalid result");
        return RankerResult::Ranked { f, inv };
    }
    RankerResult::NoRankFound
}

/// A minimal subset of `stem_post` that already contradicts the loop.
fn infeasibility_witness<S: Scalar>(rel: &LassoRelation<S>) -> Cube<S> {
    if rel.stem_post.is_falsum() {
        return Cube::falsum();
    }
    let unsat = |atoms: &[Atom<S>]| {
        !is_sat(&Cube::new(
            atoms.iter().cloned().chain(rel.loop_rel.atoms().iter().cloned()),
            RankMode::Absent,
        ))
    };
    let mut atoms = rel.stem_post.split_equalities();
    let mut i = 0;
    while i < atoms.len() {
        let mut fewer = atoms.clone();
        fewer.remove(i);
        if unsat(&fewer) {
            atoms = fewer;
        } else {
            i += 1;
        }
    }
    Cube::new(atoms, RankMode::Absent)
}
