//! Rank certificates: construction for lasso modules and an independent
//! checker for arbitrary modules.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::automata::{LassoTrace, Module};
use crate::linear::{LinearTerm, Var};
use crate::logic::{
    entails, equivalent, hoare_valid, hoare_valid_from_final, post_set_oldrnk, strongest_post, Atom,
    Cube, LogicError, Predicate, RankMode,
};
use crate::program::{Letter, Loc, Program, Statement, StatementTable};
use crate::ranker::{LassoModule, RankingFunction};
use crate::scalar::Scalar;

/// Location-indexed annotation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankCertificate<S> {
    pub preds: Vec<Predicate<S>>,
}

#[derive(Clone, Debug)]
pub struct CertifiedModule<S> {
    pub module: Module<S>,
    pub rank: RankingFunction<S>,
    pub cert: RankCertificate<S>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    MissingPredicates { expected: usize, found: usize },
    /// The initial predicate is not equivalent to `oldrnk = ∞`.
    Initial,
    /// The final predicate does not entail `f ≺ oldrnk`.
    Final,
    /// An edge whose Hoare triple is not valid.
    Edge { src: Loc, letter: Letter, dst: Loc, statement: String },
    /// The logic engine gave up on a condition.
    Engine { condition: String, error: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingPredicates { expected, found } => {
                write!(f, "certificate has {} predicates for {} locations", found, expected)
            }
            Violation::Initial => write!(f, "initial predicate is not oldrnk == inf"),
            Violation::Final => write!(f, "final predicate does not entail f < oldrnk"),
            Violation::Edge { src, dst, statement, .. } => {
                write!(f, "invalid triple on edge {} -> {} : {}", src, dst, statement)
            }
            Violation::Engine { condition, error } => write!(f, "{}: {}", condition, error),
        }
    }
}

#[derive(Debug, Error)]
pub enum CertError {
    #[error("loop annotation does not close at the final location")]
    Closure,
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("built certificate fails its own check: {0:?}")]
    Check(Vec<Violation>),
}

/// `f ≺ oldrnk`: `oldrnk = ∞`, or finite with `f ≤ oldrnk − 1` and
/// `oldrnk ≥ 0`.
pub fn rank_decreased<S: Scalar>(f: &RankingFunction<S>) -> Predicate<S> {
    Predicate::inf().or(&Predicate::from_cube(decrease_cube(f, &[])))
}

fn decrease_cube<S: Scalar>(f: &RankingFunction<S>, extra: &[Atom<S>]) -> Cube<S> {
    let o = LinearTerm::var(Var::oldrnk());
    let mut atoms = extra.to_vec();
    atoms.push(Atom::le(f.term.sub(&o).plus_constant(&S::one())));
    atoms.push(Atom::le(o.negate()));
    Cube::new(atoms, RankMode::Finite)
}

/// Checks the three certificate conditions; empty result means pass.
pub fn check_certificate<S: Scalar>(cm: &CertifiedModule<S>) -> Vec<Violation> {
    let p = &cm.module.program;
    let preds = &cm.cert.preds;
    let mut out = Vec::new();
    if preds.len() != p.num_locations() {
        out.push(Violation::MissingPredicates {
            expected: p.num_locations(),
            found: preds.len(),
        });
        return out;
    }
    let engine = |what: &str, e: LogicError| Violation::Engine {
        condition: what.to_string(),
        error: e.to_string(),
    };
    match equivalent(&preds[p.init], &Predicate::inf()) {
        Ok(true) => {}
        Ok(false) => out.push(Violation::Initial),
        Err(e) => out.push(engine("initial", e)),
    }
    let fin = cm.module.final_loc;
    match entails(&preds[fin], &rank_decreased(&cm.rank)) {
        Ok(true) => {}
        Ok(false) => out.push(Violation::Final),
        Err(e) => out.push(engine("final", e)),
    }
    for &(a, l, b) in &p.edges {
        let st = p.statement(l);
        let ok = if a == fin {
            hoare_valid_from_final(&preds[a], &cm.rank.term, st, &preds[b])
        } else {
            hoare_valid(&preds[a], st, &preds[b])
        };
        match ok {
            Ok(true) => {}
            Ok(false) => out.push(Violation::Edge {
                src: a,
                letter: l,
                dst: b,
                statement: st.to_string(),
            }),
            Err(e) => out.push(engine(&format!("edge {} -> {}", a, b), e)),
        }
    }
    out
}

/// Annotation of a lasso module from a validated ranking function and
/// supporting invariant, by forward strongest post followed by backward
/// weakening of every location other than the initial and final one.
pub fn build_certificate<S: Scalar>(
    lm: &LassoModule<S>,
    f: &RankingFunction<S>,
    inv: &Cube<S>,
) -> Result<RankCertificate<S>, CertError> {
    let p = &lm.module.program;
    let n = p.num_locations();
    let k = lm.final_loc();
    let stmt = |i: usize| p.statement(p.edges[i].1);
    let mut preds: Vec<Predicate<S>> = vec![Predicate::bottom(); n];
    preds[0] = Predicate::inf();
    for i in 1..k {
        preds[i] = strongest_post(&preds[i - 1], stmt(i - 1))?;
    }
    let inf = Predicate::from_cube(inv.with_mode(RankMode::Inf));
    let mut candidates = vec![inf.or(&Predicate::from_cube(decrease_cube(f, inv.atoms())))];
    if f.is_trivial() {
        // an infeasible loop closes with `oldrnk = ∞` alone
        candidates.insert(0, inf);
    }
    if inv.is_falsum() {
        candidates = vec![Predicate::bottom()];
    }
    let mut closed = false;
    for fin in candidates {
        if !hoare_valid(&preds[k - 1], stmt(k - 1), &fin)? {
            continue;
        }
        let mut cur = post_set_oldrnk(&fin, &f.term)?;
        let mut loop_preds = Vec::new();
        for i in k..n {
            cur = strongest_post(&cur, stmt(i))?;
            loop_preds.push(cur.clone());
        }
        if entails(&cur, &fin)? {
            preds[k] = fin;
            for (i, q) in loop_preds.into_iter().take(n - k - 1).enumerate() {
                preds[k + 1 + i] = q;
            }
            closed = true;
            break;
        }
    }
    if !closed {
        return Err(CertError::Closure);
    }
    let order: Vec<usize> = (k + 1..n).rev().chain((1..k).rev()).collect();
    for l in order {
        let post = preds[p.edges[l].2].clone();
        preds[l] = weaken(&preds[l], stmt(l), &post)?;
    }
    let cert = RankCertificate { preds };
    let cm = CertifiedModule {
        module: lm.module.clone(),
        rank: f.clone(),
        cert,
    };
    let v = check_certificate(&cm);
    if !v.is_empty() {
        return Err(CertError::Check(v));
    }
    Ok(cm.cert)
}

/// Drops atoms from `pre` while `{pre} st {post}` stays valid.
fn weaken<S: Scalar>(
    pre: &Predicate<S>,
    st: &Statement<S>,
    post: &Predicate<S>,
) -> Result<Predicate<S>, LogicError> {
    let mut cubes: Vec<Cube<S>> = pre.cubes().to_vec();
    for c in 0..cubes.len() {
        let mut atoms = cubes[c].split_equalities();
        let mut i = 0;
        while i < atoms.len() {
            let mut fewer = atoms.clone();
            fewer.remove(i);
            let mut trial = cubes.clone();
            trial[c] = Cube::new(fewer.clone(), cubes[c].mode());
            if hoare_valid(&Predicate::new(trial), st, post)? {
                atoms = fewer;
            } else {
                i += 1;
            }
        }
        cubes[c] = Cube::new(atoms, cubes[c].mode());
    }
    Ok(Predicate::new(cubes))
}

/// The straight-line-then-loop program whose partial-correctness proofs are
/// rank certificates: `oldrnk` starts at `∞` in the initial location, then
/// the stem runs, then the loop checks `f ≺ oldrnk`, records
/// `oldrnk := f` and runs the loop body.
pub fn build_rankdecrease_program<S: Scalar>(
    t: &LassoTrace,
    f: &RankingFunction<S>,
    stmts: &StatementTable<S>,
) -> Program<S> {
    let mut table = stmts.clone();
    let o = LinearTerm::var(Var::oldrnk());
    let fail_a = table.intern(Statement::Assume(Cube::new(
        [Atom::le(o.sub(&f.term))],
        RankMode::Finite,
    )));
    let fail_b = table.intern(Statement::Assume(Cube::new(
        [Atom::le(o.plus_constant(&S::one()))],
        RankMode::Finite,
    )));
    let record = table.intern(Statement::Assign(Var::oldrnk(), f.term.clone()));
    let mut locations = Vec::new();
    let mut edges = Vec::new();
    let new_loc = |name: String, locations: &mut Vec<String>| {
        locations.push(name);
        locations.len() - 1
    };
    let init = new_loc("init".into(), &mut locations);
    let mut cur = init;
    for (i, &l) in t.stem.iter().enumerate() {
        let next = new_loc(format!("s{}", i + 1), &mut locations);
        edges.push((cur, l, next));
        cur = next;
    }
    let head = cur;
    let mut body = new_loc("b0".into(), &mut locations);
    edges.push((head, record, body));
    for (i, &l) in t.cycle.iter().enumerate() {
        let next = if i + 1 == t.cycle.len() {
            head
        } else {
            new_loc(format!("b{}", i + 1), &mut locations)
        };
        edges.push((body, l, next));
        body = next;
    }
    let error = new_loc("error".into(), &mut locations);
    edges.push((head, fail_a, error));
    edges.push((head, fail_b, error));
    let mut vars: Vec<Var> = Vec::new();
    for &(_, l, _) in &edges {
        for v in table.get(l).vars() {
            if !v.is_oldrnk() && !vars.contains(&v) {
                vars.push(v);
            }
        }
    }
    vars.sort();
    Program {
        name: "rankDecrease".into(),
        vars,
        locations,
        init,
        edges,
        stmts: Arc::new(table),
    }
}
