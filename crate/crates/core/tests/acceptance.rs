//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeMap;
use std::rc::Rc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use termdec::automata::{
    complement, intersect, is_empty, lasso_member, lasso_members, Automaton, Complement, LassoTrace, Module,
    OmegaAutomaton,
};
use termdec::certifier::{check_certificate, CertifiedModule};
use termdec::driver::{analyze, AnalysisConfig, AnalysisResult, Verdict};
use termdec::frontend::parse_statement;
use termdec::logic::{eliminate, entails, evaluate, is_sat, Atom, Cube, Predicate, RankMode, Valuation};
use termdec::lp::lp_feasible;
use termdec::ranker::{analyze_lasso, RankerResult};
use termdec::{Letter, LinearTerm, Program, Rat, StatementTable, Var};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(p: &Program<Rat>) -> AnalysisResult<Rat> {
    analyze(p, &AnalysisConfig::default())
}

fn bubblesort() -> Outcome {
    let p = load("sort");
    let t0 = Instant::now();
    let r = run(&p);
    let took = t0.elapsed();
    ensure(r.verdict == Verdict::Terminating, || format!("verdict {}", r.verdict))?;
    let zero = int(0);
    let a = r.modules.iter().any(|m| m.rank.coeff("i") > zero && m.rank.coeff("j") < zero);
    let b = r.modules.iter().any(|m| m.rank.coeff("i") > zero && m.rank.coeff("j") == zero);
    ensure(a && b, || {
        let fs: Vec<String> = r.modules.iter().map(|m| m.rank.term.to_string()).collect();
        format!("ranking functions {:?}", fs)
    })?;
    ensure(r.stats.iterations <= 10, || format!("{} iterations", r.stats.iterations))?;
    ensure(took < Duration::from_secs(10), || format!("took {:?}", took))?;
    let fs: Vec<String> = r.modules.iter().map(|m| m.rank.term.to_string()).collect();
    Ok(format!("{} iterations, f = {:?}, {:?}", r.stats.iterations, fs, took))
}

fn mutate(cm: &CertifiedModule<Rat>, rng: &mut ChaCha8Rng) -> Option<(String, CertifiedModule<Rat>)> {
    let mut m = cm.clone();
    let p = &cm.module.program;
    let fin = cm.module.final_loc;
    let drop_atom = |pred: &Predicate<Rat>, rng: &mut ChaCha8Rng| -> Option<Predicate<Rat>> {
        let cubes = pred.cubes();
        let with_atoms: Vec<usize> = (0..cubes.len()).filter(|&i| !cubes[i].atoms().is_empty()).collect();
        if with_atoms.is_empty() {
            return None;
        }
        let ci = with_atoms[rng.gen_range(0..with_atoms.len())];
        let mut atoms = cubes[ci].split_equalities();
        atoms.remove(rng.gen_range(0..atoms.len()));
        let mut cs = cubes.to_vec();
        cs[ci] = Cube::new(atoms, cubes[ci].mode());
        Some(Predicate::new(cs))
    };
    match rng.gen_range(0..3) {
        0 => {
            // weaken the final predicate
            let w = match rng.gen_range(0..3) {
                0 => Predicate::top(),
                1 if cm.cert.preds[fin].len() > 1 => {
                    let cs = cm.cert.preds[fin].cubes();
                    let keep = rng.gen_range(0..cs.len());
                    Predicate::new(cs.iter().enumerate().filter(|(i, _)| *i != keep).map(|(_, c)| c.clone()).collect::<Vec<_>>())
                }
                _ => drop_atom(&cm.cert.preds[fin], rng)?,
            };
            m.cert.preds[fin] = w;
            Some(("weaken final".into(), m))
        }
        1 => {
            let l = rng.gen_range(0..p.num_locations());
            m.cert.preds[l] = drop_atom(&cm.cert.preds[l], rng)?;
            Some((format!("drop atom at {}", p.locations[l]), m))
        }
        _ => {
            let e = rng.gen_range(0..p.edges.len());
            let to = rng.gen_range(0..p.num_locations());
            if to == p.edges[e].2 {
                return None;
            }
            let mut prog = p.clone();
            prog.edges[e].2 = to;
            m.module = Module { program: prog, final_loc: fin };
            Some((format!("retarget edge {}", e), m))
        }
    }
}

fn certificate_checker() -> Outcome {
    let mut pool = Vec::new();
    for name in ["sort", "counters", "phases", "branch_dec", "upcount", "step2", "havoc_dec", "nested"] {
        let r = run(&load(name));
        ensure(r.verdict == Verdict::Terminating, || format!("{} not terminating", name))?;
        for m in r.modules {
            ensure(check_certificate(&m).is_empty(), || format!("emitted module of {} rejected", name))?;
            let v = semantic_violations(&m, -4, 4);
            ensure(v.is_empty(), || format!("emitted module of {} violates {:?}", name, v))?;
            pool.push(m);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut total, mut broken, mut rejected) = (0, 0, 0);
    while total < 120 {
        let base = &pool[rng.gen_range(0..pool.len())];
        let Some((what, m)) = mutate(base, &mut rng) else { continue };
        total += 1;
        let accepted = check_certificate(&m).is_empty();
        let sem = semantic_violations(&m, -4, 4);
        if !sem.is_empty() {
            broken += 1;
        }
        if !accepted {
            rejected += 1;
        }
        ensure(!(accepted && !sem.is_empty()), || {
            format!("false accept after {}: {:?}", what, sem)
        })?;
    }
    Ok(format!(
        "{} modules pass; {} mutations, {} semantically broken, {} rejected, 0 false accepts",
        pool.len(),
        total,
        broken,
        rejected
    ))
}

fn dynamic_decrease() -> Outcome {
    let p = load("sort");
    let r = run(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pairs = 0;
    for (k, m) in r.modules.iter().enumerate() {
        let prog = &m.module.program;
        let vars = module_vars(m);
        for _ in 0..1000 {
            let mut nu = Valuation::new(vars.iter().map(|v| (v.clone(), int(rng.gen_range(-20..=20)))));
            let mut loc = prog.init;
            let mut last: Option<Rat> = None;
            let mut visited = false;
            for _ in 0..40 {
                if loc == m.module.final_loc {
                    let f = m.rank.eval(|v| nu.get(v));
                    if visited {
                        pairs += 1;
                        ensure(precedes(&f, &last), || {
                            format!("module {}: {:?} does not precede {:?}", k, f, last)
                        })?;
                    }
                    visited = true;
                    last = f;
                }
                let enabled: Vec<_> = prog
                    .successors(loc)
                    .flat_map(|&(_, l, to)| {
                        exec(prog.statement(l), &nu, -20, 20).into_iter().map(move |n| (to, n))
                    })
                    .collect();
                if enabled.is_empty() {
                    break;
                }
                let (to, next) = enabled[rng.gen_range(0..enabled.len())].clone();
                loc = to;
                nu = next;
            }
        }
    }
    ensure(pairs > 0, || "no consecutive final visits simulated".into())?;
    Ok(format!("{} modules x 1000 runs, {} consecutive final visits, 0 violations", r.modules.len(), pairs))
}

fn complementation() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checks = 0usize;
    for i in 0..200 {
        let a = random_buchi(&mut rng, 5, 3, (0.3, 0.8), 0.4);
        let alphabet = a.alphabet();
        let ra: Automaton = Rc::new(a.clone());
        let rank: Automaton = Rc::new(Complement::new(ra.clone(), 1_000_000));
        let auto = complement(ra.clone(), 1_000_000);
        // Lassos sharing a loop are decided together.
        let mut by_cycle: BTreeMap<Vec<Letter>, Vec<Vec<Letter>>> = BTreeMap::new();
        for t in lassos(&alphabet, 3, 4) {
            by_cycle.entry(t.cycle).or_default().push(t.stem);
        }
        for (v, us) in &by_cycle {
            let m = |b: &dyn OmegaAutomaton| lasso_members(b, us, v).map_err(|e| e.to_string());
            let (xs, ys, zs) = (m(&a)?, m(&*rank)?, m(&*auto)?);
            for k in 0..us.len() {
                let t = LassoTrace::new(us[k].clone(), v.clone());
                ensure(xs[k] != ys[k], || format!("automaton {} (rank-based) on {}: {} vs {}", i, t, xs[k], ys[k]))?;
                ensure(xs[k] != zs[k], || format!("automaton {} (dispatch) on {}: {} vs {}", i, t, xs[k], zs[k]))?;
                checks += 2;
            }
        }
        for (name, c) in [("rank-based", &rank), ("dispatch", &auto)] {
            let prod = intersect(ra.clone(), c.clone(), 1_000_000).map_err(|e| e.to_string())?;
            let e = is_empty(&prod).map_err(|e| e.to_string())?;
            ensure(e.is_none(), || format!("automaton {} ({}): A ∩ ¬A accepts {:?}", i, name, e))?;
        }
    }
    let took = t0.elapsed();
    ensure(took < Duration::from_secs(120), || format!("took {:?}", took))?;
    Ok(format!("200 automata, {} membership checks, {:?}", checks, took))
}

fn emptiness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut nonempty = 0;
    for i in 0..500 {
        let a = random_buchi(&mut rng, 12, 3, (0.02, 0.25), 0.2);
        let got = is_empty(&a).map_err(|e| e.to_string())?;
        let expect = scc_nonempty(&a);
        ensure(got.is_some() == expect, || format!("automaton {}: is_empty {:?}, oracle {}", i, got, expect))?;
        if let Some(t) = got {
            nonempty += 1;
            ensure(lasso_member(&a, &t).unwrap(), || format!("automaton {}: lasso {:?} rejected", i, t))?;
        }
    }
    Ok(format!("500 automata, {} non-empty, all lassos members", nonempty))
}

fn lasso(stem: &[&str], cycle: &[&str]) -> (StatementTable<Rat>, LassoTrace) {
    let mut t = StatementTable::new();
    let ls: Vec<_> = stem
        .iter()
        .chain(cycle)
        .map(|s| t.intern(parse_statement::<Rat>(s).unwrap()))
        .collect();
    let (u, v) = ls.split_at(stem.len());
    (t, LassoTrace::new(u.to_vec(), v.to_vec()))
}

fn ranker_truths() -> Outcome {
    let (t, l) = lasso(&[], &["assume x >= 0", "x := x - 1"]);
    match analyze_lasso(&l, &t).map_err(|e| e.to_string())?.result {
        RankerResult::Ranked { f, .. } => ensure(f.coeff("x") > int(0), || format!("f = {}", f.term))?,
        other => return Err(format!("countdown: {:?}", other)),
    }
    let (t, l) = lasso(&[], &["x := x + 1"]);
    let r = analyze_lasso(&l, &t).map_err(|e| e.to_string())?.result;
    ensure(r == RankerResult::NoRankFound, || format!("increment: {:?}", r))?;
    let (t, l) = lasso(&[], &["assume x >= 1", "assume x <= 0"]);
    let r = analyze_lasso(&l, &t).map_err(|e| e.to_string())?.result;
    ensure(matches!(r, RankerResult::InfeasibleLoop { .. }), || format!("infeasible: {:?}", r))?;
    let (t, l) = lasso(&["assume i >= 1", "j := 1"], &["assume i - j >= 1", "j := j + 1"]);
    match analyze_lasso(&l, &t).map_err(|e| e.to_string())?.result {
        RankerResult::Ranked { f, .. } => ensure(f.coeff("i") > int(0) && f.coeff("j") < int(0), || {
            format!("sort: f = {}", f.term)
        })?,
        other => return Err(format!("sort: {:?}", other)),
    }
    Ok("countdown, increment, infeasible loop, sort lasso".into())
}

fn random_atom(rng: &mut ChaCha8Rng, vars: &[Var]) -> Atom<Rat> {
    let mut t = LinearTerm::constant(int(rng.gen_range(-6..=6)));
    for v in vars {
        if rng.gen_bool(0.7) {
            t = t.add(&LinearTerm::var(v.clone()).scale(&int(rng.gen_range(-3..=3))));
        }
    }
    match rng.gen_range(0..6) {
        0 => Atom::eq(t),
        1 => Atom::lt(t),
        _ => Atom::le(t),
    }
}

fn random_cube(rng: &mut ChaCha8Rng, vars: &[Var], mode: RankMode) -> Cube<Rat> {
    let n = rng.gen_range(1..=4);
    Cube::new((0..n).map(|_| random_atom(rng, vars)), mode)
}

fn holds_at(c: &Cube<Rat>, nu: &Valuation<Rat>) -> bool {
    evaluate(&Predicate::from_cube(c.clone()), nu)
}

/// A rational model of `atoms`, checked by evaluation.
fn rational_model(atoms: &[Atom<Rat>]) -> bool {
    match lp_feasible(atoms) {
        Some(m) => atoms.iter().all(|a| a.holds(|v| Some(m.get(v).cloned().unwrap_or_else(|| int(0)))) == Some(true)),
        None => false,
    }
}

fn logic_engine() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let all = [Var::new("x"), Var::new("y"), Var::new("z")];
    let (mut sat_rational, mut proj_rational, mut ent_open) = (0, 0, 0);
    for case in 0..300 {
        let k = rng.gen_range(1..=3);
        let vars = &all[..k];
        let c = random_cube(&mut rng, vars, RankMode::Absent);
        let box_ = grid(vars, -6, 6);
        let models: Vec<&Valuation<Rat>> = box_.iter().filter(|nu| holds_at(&c, nu)).collect();
        // satisfiability
        let sat = is_sat(&c);
        ensure(models.is_empty() || sat, || format!("case {}: {} has integer models but is_sat = false", case, c))?;
        if sat && models.is_empty() {
            ensure(rational_model(c.atoms()), || format!("case {}: is_sat({}) without any model", case, c))?;
            sat_rational += 1;
        }
        // projection
        let v = &vars[rng.gen_range(0..k)];
        let e = eliminate(&c, v).map_err(|e| e.to_string())?;
        ensure(!e.mentions(v), || format!("case {}: {} still mentions {}", case, e, v))?;
        for nu in &models {
            ensure(holds_at(&e, nu), || format!("case {}: elim {} of {} loses {:?}", case, v, c, nu))?;
        }
        for nu in box_.iter().filter(|nu| holds_at(&e, nu)) {
            let has_int = (-6..=6).any(|x| {
                let mut n = (*nu).clone();
                n.values.insert(v.clone(), int(x));
                holds_at(&c, &n)
            });
            if !has_int {
                let fixed: Vec<Atom<Rat>> = c
                    .atoms()
                    .iter()
                    .map(|a| {
                        vars.iter()
                            .filter(|w| *w != v)
                            .fold(a.clone(), |a, w| a.substitute(w, &LinearTerm::constant(nu.values[w].clone())))
                    })
                    .collect();
                ensure(rational_model(&fixed), || format!("case {}: elim {} of {} adds {:?}", case, v, c, nu))?;
                proj_rational += 1;
            }
        }
        // entailment between predicates with oldrnk modes
        let modes = [RankMode::Absent, RankMode::Inf, RankMode::Finite];
        let mut with_o: Vec<Var> = vars.to_vec();
        with_o.push(Var::oldrnk());
        let pick = |rng: &mut ChaCha8Rng| modes[rng.gen_range(0..3)];
        let cube = |rng: &mut ChaCha8Rng| {
            let m = pick(rng);
            let vs: &[Var] = if m == RankMode::Finite { &with_o } else { vars };
            random_cube(rng, vs, m)
        };
        let p = Predicate::new((0..rng.gen_range(1..=2)).map(|_| cube(&mut rng)).collect::<Vec<_>>());
        let q = if rng.gen_bool(0.5) {
            // a weakening of p, so entailment holds
            Predicate::new(p.cubes().iter().map(|c| {
                let keep: Vec<Atom<Rat>> = c.atoms().iter().take(1).cloned().collect();
                Cube::new(keep, c.mode())
            }).collect::<Vec<_>>())
        } else {
            Predicate::new((0..rng.gen_range(1..=2)).map(|_| cube(&mut rng)).collect::<Vec<_>>())
        };
        let ent = entails(&p, &q).map_err(|e| e.to_string())?;
        let states = grid_with_oldrnk(vars, -6, 6);
        let counter = states.iter().find(|nu| evaluate(&p, nu) && !evaluate(&q, nu));
        if ent {
            ensure(counter.is_none(), || format!("case {}: {} ⊨ {} refuted by {:?}", case, p, q, counter))?;
        } else if counter.is_none() {
            ent_open += 1;
        }
    }
    Ok(format!(
        "300 cases over [-6,6]^k; whitelisted: {} rational-only sat, {} points with rational preimage only, {} non-entailments without counterexample in the box",
        sat_rational, proj_rational, ent_open
    ))
}

fn nonterminating_and_straight() -> Outcome {
    let p = load("diverge");
    let r = run(&p);
    let lasso = match &r.verdict {
        Verdict::Unknown { lasso: Some(t), .. } => t.render(&p.stmts),
        other => return Err(format!("diverge: {}", other)),
    };
    ensure(lasso.contains("[assume true] [x := x + 1]"), || format!("lasso {}", lasso))?;
    let r = run(&load("straight"));
    ensure(r.verdict == Verdict::Terminating && r.stats.iterations == 0, || {
        format!("straight: {} after {} iterations", r.verdict, r.stats.iterations)
    })?;
    Ok(format!("diverge UNKNOWN with {}; straight-line TERMINATING in 0 iterations", lasso))
}

fn regression_suite() -> Outcome {
    let names = ["sort", "counters", "havoc_dec", "branch_dec", "nested", "upcount", "choice", "step2", "phases"];
    let t0 = Instant::now();
    let mut its = Vec::new();
    for name in names {
        let r = run(&load(name));
        ensure(r.verdict == Verdict::Terminating, || format!("{}: {}", name, r.verdict))?;
        its.push(format!("{}:{}", name, r.stats.iterations));
    }
    let took = t0.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {:?}", took))?;
    Ok(format!("{} programs TERMINATING in {:?} [{}]", names.len(), took, its.join(" ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("bubblesort end-to-end", bubblesort),
        ("certificate checker soundness", certificate_checker),
        ("dynamic ranking decrease", dynamic_decrease),
        ("complementation oracle", complementation),
        ("emptiness oracle", emptiness),
        ("ranker truths", ranker_truths),
        ("logic engine vs brute force", logic_engine),
        ("nonterminating and straight-line", nonterminating_and_straight),
        ("regression suite", regression_suite),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t0 = Instant::now();
        match f() {
            Ok(msg) => println!("PASS {} ({:.2?}): {}", name, t0.elapsed(), msg),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} ({:.2?}): {}", name, t0.elapsed(), msg)
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
