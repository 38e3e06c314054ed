//! JSON report of an analysis run and reconstruction of its modules.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::automata::{Buchi, Module, OmegaAutomaton};
use crate::certifier::{CertifiedModule, RankCertificate};
use crate::driver::{AnalysisResult, Verdict};
use crate::frontend::{parse_cfg, parse_linear_term, parse_predicate, render_cfg};
use crate::program::{Program, StatementTable};
use crate::ranker::RankingFunction;
use crate::scalar::Scalar;
use crate::Rat;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankRecord {
    pub coefficients: BTreeMap<String, String>,
    pub constant: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleRecord {
    pub index: usize,
    pub trivial: bool,
    pub ranking_function: RankRecord,
    pub num_states: usize,
    pub initial: String,
    #[serde(rename = "final")]
    pub final_loc: String,
    pub variables: Vec<String>,
    pub predicates: BTreeMap<String, String>,
    pub edges: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Times {
    pub overall_s: f64,
    pub lasso_analysis_s: f64,
    pub module_construction_s: f64,
    pub inclusion_s: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub modules_trivial_rf: usize,
    pub modules_nontrivial_rf: usize,
    pub max_module_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub program: String,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lasso: Option<String>,
    pub iterations: usize,
    pub modules: Vec<ModuleRecord>,
    pub times: Times,
    pub counts: Counts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remainder: Option<String>,
}

impl ModuleRecord {
    pub fn new<S: Scalar>(index: usize, cm: &CertifiedModule<S>) -> Self {
        let p = &cm.module.program;
        let rank = RankRecord {
            coefficients: cm
                .rank
                .term
                .coeffs()
                .iter()
                .map(|(v, c)| (v.name().to_string(), c.to_string()))
                .collect(),
            constant: cm.rank.term.constant_part().to_string(),
        };
        ModuleRecord {
            index,
            trivial: cm.rank.is_trivial(),
            ranking_function: rank,
            num_states: p.num_locations(),
            initial: p.locations[p.init].clone(),
            final_loc: p.locations[cm.module.final_loc].clone(),
            variables: p.vars.iter().map(|v| v.name().to_string()).collect(),
            predicates: p
                .locations
                .iter()
                .zip(&cm.cert.preds)
                .map(|(l, q)| (l.clone(), q.to_string()))
                .collect(),
            edges: p
                .edges
                .iter()
                .map(|&(a, l, b)| format!("{} -> {} : {}", p.locations[a], p.locations[b], p.statement(l)))
                .collect(),
        }
    }

    fn cfg_text(&self) -> String {
        let mut out = String::new();
        if !self.variables.is_empty() {
            let _ = writeln!(out, "var {};", self.variables.join(", "));
        }
        let _ = writeln!(out, "init {};", self.initial);
        for l in self.predicates.keys() {
            let _ = writeln!(out, "loc {};", l);
        }
        for e in &self.edges {
            let _ = writeln!(out, "{};", e);
        }
        out
    }

    /// Rebuilds the certified module from its serialized form.
    pub fn to_certified(&self) -> Result<CertifiedModule<Rat>, String> {
        let program: Program<Rat> = parse_cfg(&self.cfg_text()).map_err(|e| e.to_string())?;
        let loc = |name: &str| {
            program
                .locations
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| format!("unknown location {}", name))
        };
        let final_loc = loc(&self.final_loc)?;
        let mut preds = Vec::with_capacity(program.num_locations());
        for name in &program.locations {
            let text = self
                .predicates
                .get(name)
                .ok_or_else(|| format!("no predicate for {}", name))?;
            preds.push(parse_predicate(text).map_err(|e| e.to_string())?);
        }
        let mut term = parse_linear_term::<Rat>(&self.ranking_function.constant).map_err(|e| e.to_string())?;
        for (v, c) in &self.ranking_function.coefficients {
            let t = parse_linear_term::<Rat>(&format!("({}) * {}", c, v)).map_err(|e| e.to_string())?;
            term = term.add(&t);
        }
        let module = Module::new(program, final_loc).map_err(|e| e.to_string())?;
        Ok(CertifiedModule {
            module,
            rank: RankingFunction::new(term),
            cert: RankCertificate { preds },
        })
    }
}

/// Explored remainder automaton as CFG text; accepting states are listed in
/// a leading comment.
pub fn remainder_text<S: Scalar>(b: &Buchi, stmts: &StatementTable<S>) -> String {
    let locations: Vec<String> = (0..b.num_states()).map(|s| format!("r{}", s)).collect();
    let p = Program {
        name: "remainder".into(),
        vars: Vec::new(),
        locations,
        init: b.initial_states().first().copied().unwrap_or(0),
        edges: b.transitions().collect(),
        stmts: std::sync::Arc::new(stmts.clone()),
    };
    let acc: Vec<String> = (0..b.num_states())
        .filter(|&s| b.is_accepting(s))
        .map(|s| format!("r{}", s))
        .collect();
    format!("// accepting: {}\n{}", acc.join(" "), render_cfg(&p))
}

impl Report {
    pub fn new<S: Scalar>(name: &str, p: &Program<S>, r: &AnalysisResult<S>) -> Self {
        let (reason, lasso) = match &r.verdict {
            Verdict::Terminating => (None, None),
            Verdict::Unknown { lasso, reason } => {
                (Some(reason.clone()), lasso.as_ref().map(|t| t.render(&p.stmts)))
            }
            Verdict::BudgetExhausted { reason } => (Some(reason.clone()), None),
        };
        let s = &r.stats;
        Report {
            program: name.to_string(),
            verdict: r.verdict.name().to_string(),
            reason,
            lasso,
            iterations: s.iterations,
            modules: r.modules.iter().enumerate().map(|(i, m)| ModuleRecord::new(i, m)).collect(),
            times: Times {
                overall_s: s.overall.as_secs_f64(),
                lasso_analysis_s: s.lasso_analysis.as_secs_f64(),
                module_construction_s: s.module_construction.as_secs_f64(),
                inclusion_s: s.inclusion.as_secs_f64(),
            },
            counts: Counts {
                modules_trivial_rf: s.modules_trivial_rf,
                modules_nontrivial_rf: s.modules_nontrivial_rf,
                max_module_size: s.max_module_size,
            },
            remainder: r.remainder.as_ref().map(|b| remainder_text(b, &p.stmts)),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

pub fn stats_header() -> String {
    format!(
        "{:<24} {:>10} {:>10} {:>10} {:>10} {:>8} {:>8} {:>8}",
        "program", "overall", "lasso", "module", "inclusion", "trivial", "nontriv", "maxsize"
    )
}

/// One table row: program, overall, lasso analysis, module construction,
/// inclusion times (seconds), trivial and non-trivial module counts,
/// maximal module size.
pub fn emit_stats_row(r: &Report) -> String {
    let t = &r.times;
    let c = &r.counts;
    format!(
        "{:<24} {:>10.3} {:>10.3} {:>10.3} {:>10.3} {:>8} {:>8} {:>8}",
        r.program,
        t.overall_s,
        t.lasso_analysis_s,
        t.module_construction_s,
        t.inclusion_s,
        c.modules_trivial_rf,
        c.modules_nontrivial_rf,
        c.max_module_size
    )
}
