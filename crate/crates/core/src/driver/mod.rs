//! The refinement loop: subtract certified modules from the program until
//! nothing is left or a lasso without ranking function shows up.

use std::fmt;
use std::rc::Rc;
use std::time::{Duration, Instant};

use crate::automata::{
    complement, is_empty_with, lasso_member, program_to_buchi, AutomataError, Automaton, Buchi, LassoTrace,
    Limits, Product,
};
use crate::builder::ExtendedModule;
use crate::certifier::{build_certificate, check_certificate, CertError, CertifiedModule};
use crate::logic::LogicError;
use crate::program::Program;
use crate::ranker::{analyze_lasso, lasso_module_of, RankerResult, RankingFunction};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct AnalysisConfig {
    pub max_iterations: usize,
    pub timeout: Option<Duration>,
    /// Cap on explored states per product or complement.
    pub state_budget: usize,
    pub check_certificates: bool,
    pub emit_remainder: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            max_iterations: 50,
            timeout: Some(Duration::from_secs(300)),
            state_budget: 200_000,
            check_certificates: true,
            emit_remainder: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Terminating,
    /// `lasso` is the counterexample that could not be ranked, if any.
    Unknown { lasso: Option<LassoTrace>, reason: String },
    BudgetExhausted { reason: String },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Terminating => "TERMINATING",
            Verdict::Unknown { .. } => "UNKNOWN",
            Verdict::BudgetExhausted { .. } => "BUDGET_EXHAUSTED",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Terminating => write!(f, "TERMINATING"),
            Verdict::Unknown { reason, .. } => write!(f, "UNKNOWN ({})", reason),
            Verdict::BudgetExhausted { reason } => write!(f, "BUDGET_EXHAUSTED ({})", reason),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Stats {
    pub iterations: usize,
    pub overall: Duration,
    pub lasso_analysis: Duration,
    pub module_construction: Duration,
    pub inclusion: Duration,
    pub modules_trivial_rf: usize,
    pub modules_nontrivial_rf: usize,
    pub max_module_size: usize,
}

pub struct AnalysisResult<S> {
    pub verdict: Verdict,
    pub modules: Vec<CertifiedModule<S>>,
    /// Explored `program \ modules`, when requested and not terminating.
    pub remainder: Option<Buchi>,
    pub lassos: Vec<LassoTrace>,
    pub stats: Stats,
}

enum Stop {
    Budget(String),
    Unknown(Option<LassoTrace>, String),
}

impl From<AutomataError> for Stop {
    fn from(e: AutomataError) -> Self {
        match e {
            AutomataError::StateBudget(_) | AutomataError::Timeout => Stop::Budget(e.to_string()),
            other => Stop::Unknown(None, other.to_string()),
        }
    }
}

fn logic_stop(e: LogicError, t: &LassoTrace) -> Stop {
    match e {
        LogicError::Unsupported(_) => Stop::Unknown(Some(t.clone()), e.to_string()),
        _ => Stop::Budget(e.to_string()),
    }
}

struct Run<'a, S> {
    p: &'a Program<S>,
    cfg: &'a AnalysisConfig,
    start: Instant,
    prog: Automaton,
    exts: Vec<Rc<ExtendedModule<S>>>,
    complements: Vec<Automaton>,
    modules: Vec<CertifiedModule<S>>,
    lassos: Vec<LassoTrace>,
    stats: Stats,
}

impl<'a, S: Scalar + 'static> Run<'a, S> {
    fn limits(&self) -> Limits {
        Limits {
            max_states: self.cfg.state_budget,
            deadline: self.cfg.timeout.map(|t| self.start + t),
        }
    }

    fn difference(&self, complements: &[Automaton]) -> Result<Automaton, AutomataError> {
        let mut acc = self.prog.clone();
        for c in complements {
            acc = Rc::new(Product::new(acc, c.clone(), self.cfg.state_budget)?);
        }
        Ok(acc)
    }

    fn counterexample(&mut self) -> Result<Option<LassoTrace>, Stop> {
        let t0 = Instant::now();
        let r = self
            .difference(&self.complements)
            .and_then(|d| is_empty_with(&*d, &self.limits()));
        self.stats.inclusion += t0.elapsed();
        Ok(r?)
    }

    fn timed_out(&self) -> bool {
        self.cfg.timeout.is_some_and(|t| self.start.elapsed() > t)
    }

    fn step(&mut self, t: LassoTrace) -> Result<(), Stop> {
        for e in &self.exts {
            if lasso_member(&*e.as_buchi(), &t)? {
                return Err(Stop::Unknown(Some(t), "counterexample already covered by a module".into()));
            }
        }
        let t0 = Instant::now();
        let analysis = analyze_lasso(&t.normal_form(), &self.p.stmts).map_err(|e| logic_stop(e, &t));
        self.stats.lasso_analysis += t0.elapsed();
        let analysis = analysis?;
        let (f, inv) = match analysis.result {
            RankerResult::Ranked { f, inv } => (f, inv),
            RankerResult::InfeasibleLoop { inv } => (RankingFunction::zero(), inv),
            RankerResult::NoRankFound => {
                return Err(Stop::Unknown(Some(t), "no linear ranking function for lasso".into()))
            }
        };
        let t1 = Instant::now();
        let built = self.build(&analysis.trace, &t, f, inv);
        self.stats.module_construction += t1.elapsed();
        built
    }

    fn build(
        &mut self,
        trace: &LassoTrace,
        t: &LassoTrace,
        f: RankingFunction<S>,
        inv: crate::logic::Cube<S>,
    ) -> Result<(), Stop> {
        let lm = lasso_module_of(trace, &self.p.stmts);
        let cert = build_certificate(&lm, &f, &inv).map_err(|e| match e {
            CertError::Logic(e) => logic_stop(e, t),
            other => Stop::Unknown(Some(t.clone()), other.to_string()),
        })?;
        let seed = CertifiedModule { module: lm.module, rank: f, cert };
        let ext = Rc::new(ExtendedModule::new(&seed));
        let b = ext.as_buchi();
        if !lasso_member(&*b, t)? {
            return Err(Stop::Unknown(Some(t.clone()), "module does not accept its own lasso".into()));
        }
        let cm = ext.materialize();
        if self.cfg.check_certificates {
            let v = check_certificate(&cm);
            if !v.is_empty() {
                return Err(Stop::Unknown(Some(t.clone()), format!("certificate rejected: {}", v[0])));
            }
        }
        if cm.rank.is_trivial() {
            self.stats.modules_trivial_rf += 1;
        } else {
            self.stats.modules_nontrivial_rf += 1;
        }
        self.stats.max_module_size = self.stats.max_module_size.max(cm.module.program.num_locations());
        self.complements.push(complement(b, self.cfg.state_budget));
        self.exts.push(ext);
        self.modules.push(cm);
        Ok(())
    }

    fn run(&mut self) -> Result<(), Stop> {
        loop {
            if self.timed_out() {
                return Err(Stop::Budget("timeout".into()));
            }
            let Some(t) = self.counterexample()? else {
                return self.soundness_gate();
            };
            if self.stats.iterations >= self.cfg.max_iterations {
                return Err(Stop::Budget(format!("{} iterations", self.cfg.max_iterations)));
            }
            self.stats.iterations += 1;
            self.lassos.push(t.clone());
            self.step(t)?;
        }
    }

    /// Re-checks every certificate and the emptiness of the difference with
    /// freshly built complements.
    fn soundness_gate(&mut self) -> Result<(), Stop> {
        for (i, m) in self.modules.iter().enumerate() {
            let v = check_certificate(m);
            if !v.is_empty() {
                return Err(Stop::Unknown(None, format!("module {} fails its certificate: {}", i, v[0])));
            }
        }
        let t0 = Instant::now();
        let fresh: Vec<Automaton> = self
            .modules
            .iter()
            .map(|m| {
                let b: Automaton = Rc::new(crate::automata::module_to_buchi(&m.module));
                complement(b, self.cfg.state_budget)
            })
            .collect();
        let r = self.difference(&fresh).and_then(|d| is_empty_with(&*d, &self.limits()));
        self.stats.inclusion += t0.elapsed();
        match r? {
            None => Ok(()),
            Some(t) => Err(Stop::Unknown(Some(t), "final inclusion check failed".into())),
        }
    }
}

pub fn analyze<S: Scalar + 'static>(p: &Program<S>, cfg: &AnalysisConfig) -> AnalysisResult<S> {
    let mut run = Run {
        p,
        cfg,
        start: Instant::now(),
        prog: Rc::new(program_to_buchi(p)),
        exts: Vec::new(),
        complements: Vec::new(),
        modules: Vec::new(),
        lassos: Vec::new(),
        stats: Stats::default(),
    };
    let verdict = match run.run() {
        Ok(()) => Verdict::Terminating,
        Err(Stop::Budget(reason)) => Verdict::BudgetExhausted { reason },
        Err(Stop::Unknown(lasso, reason)) => Verdict::Unknown { lasso, reason },
    };
    let remainder = if cfg.emit_remainder && verdict != Verdict::Terminating {
        run.difference(&run.complements)
            .and_then(|d| Buchi::explore(&*d, cfg.state_budget))
            .ok()
    } else {
        None
    };
    run.stats.overall = run.start.elapsed();
    AnalysisResult {
        verdict,
        modules: run.modules,
        remainder,
        lassos: run.lassos,
        stats: run.stats,
    }
}

/// True iff no ω-word repeats among the extracted lassos.
pub fn progress_guarantee_check(lassos: &[LassoTrace]) -> bool {
    let mut seen = std::collections::BTreeSet::new();
    lassos.iter().all(|t| seen.insert(t.normal_form()))
}

#[cfg(test)]
mod tests;
