//! Lasso analysis: lasso modules, transition summaries, and linear ranking
//! functions with supporting invariants.

mod farkas;

pub use farkas::{synthesize, validate};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::automata::{LassoTrace, Module};
use crate::linear::{LinearTerm, Var};
use crate::logic::{strongest_post_cube, Atom, Cube, LogicError, RankMode, MAX_ATOMS};
use crate::program::{Program, StatementTable};
use crate::scalar::Scalar;

/// Affine map into `ℤ ∪ {∞}`, compared under `a ≺ b ⇔ a < b ∧ b ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankingFunction<S> {
    pub term: LinearTerm<S>,
}

impl<S: Scalar> RankingFunction<S> {
    pub fn new(term: LinearTerm<S>) -> Self {
        RankingFunction { term }
    }

    pub fn zero() -> Self {
        RankingFunction { term: LinearTerm::zero() }
    }

    pub fn is_trivial(&self) -> bool {
        self.term.coeffs().is_empty()
    }

    pub fn coeff(&self, v: &str) -> S {
        self.term.coeff(&Var::new(v))
    }

    pub fn eval(&self, lookup: impl Fn(&Var) -> Option<S>) -> Option<S> {
        self.term.eval(lookup)
    }

    /// `a ≺ b`, with `None` standing for `∞`.
    pub fn precedes(a: &Option<S>, b: &Option<S>) -> bool {
        match (a, b) {
            (_, None) => a.is_some(),
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a < b && !b.is_negative(),
        }
    }
}

impl<S: Scalar> fmt::Display for RankingFunction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.term)
    }
}

/// Reachable states at the loop head and one loop iteration as a relation
/// over current and primed variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoRelation<S> {
    pub vars: Vec<Var>,
    pub stem_post: Cube<S>,
    pub loop_rel: Cube<S>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankerResult<S> {
    Ranked { f: RankingFunction<S>, inv: Cube<S> },
    /// `inv ∧ loop_rel` is unsatisfiable and `stem_post ⊨ inv`.
    InfeasibleLoop { inv: Cube<S> },
    NoRankFound,
}

/// The one-trace module of a lasso.
#[derive(Clone, Debug)]
pub struct LassoModule<S> {
    pub module: Module<S>,
    /// The lasso the module was laid out from; an empty stem is unrolled
    /// once so that the initial and final locations differ.
    pub layout: LassoTrace,
}

impl<S: Scalar> LassoModule<S> {
    /// Index of the final location (the loop entry).
    pub fn final_loc(&self) -> usize {
        self.module.final_loc
    }
}

/// Locations `l1..ln`, one per statement; `l1` initial, the loop entry final.
pub fn lasso_module_of<S: Scalar>(t: &LassoTrace, stmts: &Arc<StatementTable<S>>) -> LassoModule<S> {
    let layout = if t.stem.is_empty() {
        LassoTrace::new(t.cycle.clone(), t.cycle.clone())
    } else {
        t.clone()
    };
    let (u, v) = (&layout.stem, &layout.cycle);
    let n = u.len() + v.len();
    let k = u.len();
    let mut edges = Vec::with_capacity(n);
    for (i, &l) in u.iter().chain(v.iter()).enumerate() {
        let to = if i + 1 == n { k } else { i + 1 };
        edges.push((i, l, to));
    }
    let mut vars: BTreeSet<Var> = BTreeSet::new();
    for &l in u.iter().chain(v.iter()) {
        vars.extend(stmts.get(l).vars());
    }
    let program = Program {
        name: "lasso".into(),
        vars: vars.into_iter().collect(),
        locations: (1..=n).map(|i| format!("l{}", i)).collect(),
        init: 0,
        edges,
        stmts: stmts.clone(),
    };
    let module = Module::new(program, k).expect("lasso module with non-empty stem is well formed");
    LassoModule { module, layout }
}

fn check(c: &Cube<impl Scalar>) -> Result<(), LogicError> {
    if c.len() > MAX_ATOMS {
        Err(LogicError::TooManyAtoms(c.len()))
    } else {
        Ok(())
    }
}

pub fn summarize<S: Scalar>(t: &LassoTrace, stmts: &StatementTable<S>) -> Result<LassoRelation<S>, LogicError> {
    let mut vars: BTreeSet<Var> = BTreeSet::new();
    for &l in t.stem.iter().chain(t.cycle.iter()) {
        vars.extend(stmts.get(l).vars());
    }
    let vars: Vec<Var> = vars.into_iter().collect();
    let mut stem = Cube::top(RankMode::Absent);
    for &l in &t.stem {
        stem = strongest_post_cube(&stem, stmts.get(l))?;
        check(&stem)?;
    }
    let frame = vars
        .iter()
        .map(|v| Atom::eq_terms(&LinearTerm::var(v.primed()), &LinearTerm::var(v.clone())));
    let mut rel = Cube::new(frame, RankMode::Absent);
    for &l in &t.cycle {
        let st = stmts.get(l).rename_all(|v| v.primed());
        rel = strongest_post_cube(&rel, &st)?;
        check(&rel)?;
    }
    Ok(LassoRelation {
        vars,
        stem_post: stem,
        loop_rel: rel,
    })
}

/// Outcome of analysing one lasso, possibly after doubling its loop.
#[derive(Clone, Debug)]
pub struct LassoAnalysis<S> {
    /// The lasso actually ranked (`u·v·v` if doubling was needed).
    pub trace: LassoTrace,
    pub relation: LassoRelation<S>,
    pub result: RankerResult<S>,
}

/// Summarize and synthesize; on failure retry once with the loop doubled.
pub fn analyze_lasso<S: Scalar>(t: &LassoTrace, stmts: &StatementTable<S>) -> Result<LassoAnalysis<S>, LogicError> {
    let relation = summarize(t, stmts)?;
    let result = synthesize(&relation);
    if result != RankerResult::NoRankFound {
        return Ok(LassoAnalysis {
            trace: t.clone(),
            relation,
            result,
        });
    }
    let doubled = LassoTrace::new(t.stem.clone(), [t.cycle.clone(), t.cycle.clone()].concat());
    if let Ok(rel2) = summarize(&doubled, stmts) {
        let r2 = synthesize(&rel2);
        if r2 != RankerResult::NoRankFound {
            return Ok(LassoAnalysis {
                trace: doubled,
                relation: rel2,
                result: r2,
            });
        }
    }
    Ok(LassoAnalysis {
        trace: t.clone(),
        relation,
        result: RankerResult::NoRankFound,
    })
}

#[cfg(test)]
mod tests;
