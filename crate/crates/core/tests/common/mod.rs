//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use termdec::automata::{Buchi, LassoTrace, OmegaAutomaton};
use termdec::certifier::CertifiedModule;
use termdec::frontend::parse_while_program;
use termdec::logic::{evaluate, Valuation};
use termdec::{Letter, Program, Rat, Statement, Var};

pub fn int(i: i64) -> Rat {
    Rat::from_integer(i.into())
}

pub fn load(name: &str) -> Program<Rat> {
    let path = format!("{}/tests/programs/{}.wprog", env!("CARGO_MANIFEST_DIR"), name);
    parse_while_program(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Every valuation of `vars` with values in `lo..=hi`.
pub fn grid(vars: &[Var], lo: i64, hi: i64) -> Vec<Valuation<Rat>> {
    let mut out = vec![Valuation::new([])];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|nu| {
                (lo..=hi).map(move |x| {
                    let mut n = nu.clone();
                    n.values.insert(v.clone(), int(x));
                    n
                })
            })
            .collect();
    }
    out
}

/// `grid` crossed with `oldrnk ∈ {∞} ∪ lo..=hi`.
pub fn grid_with_oldrnk(vars: &[Var], lo: i64, hi: i64) -> Vec<Valuation<Rat>> {
    let base = grid(vars, lo, hi);
    let mut out = Vec::new();
    for nu in base {
        out.push(nu.clone().with_oldrnk(None));
        for o in lo..=hi {
            out.push(nu.clone().with_oldrnk(Some(int(o))));
        }
    }
    out
}

/// Successor states; havoc ranges over `lo..=hi`.
pub fn exec(st: &Statement<Rat>, nu: &Valuation<Rat>, lo: i64, hi: i64) -> Vec<Valuation<Rat>> {
    match st {
        Statement::Assume(c) => {
            let p = termdec::logic::Predicate::from_cube(c.clone());
            if evaluate(&p, nu) {
                vec![nu.clone()]
            } else {
                vec![]
            }
        }
        Statement::Assign(v, e) => {
            let Some(x) = e.eval(|w| nu.get(w)) else { return vec![] };
            let mut n = nu.clone();
            if v.is_oldrnk() {
                n.oldrnk = Some(x);
            } else {
                n.values.insert(v.clone(), x);
            }
            vec![n]
        }
        Statement::Havoc(v) => (lo..=hi)
            .map(|x| {
                let mut n = nu.clone();
                n.values.insert(v.clone(), int(x));
                n
            })
            .collect(),
    }
}

/// `a ≺ b` on rationals extended with `∞` (`None`).
pub fn precedes(a: &Option<Rat>, b: &Option<Rat>) -> bool {
    match (a, b) {
        (_, None) => a.is_some(),
        (None, Some(_)) => false,
        (Some(x), Some(y)) => x < y && *y >= int(0),
    }
}

pub fn module_vars(cm: &CertifiedModule<Rat>) -> Vec<Var> {
    let mut vars: BTreeSet<Var> = cm.module.program.vars.iter().cloned().collect();
    for &(_, l, _) in &cm.module.program.edges {
        vars.extend(cm.module.program.statement(l).vars().into_iter().filter(|v| !v.is_oldrnk()));
    }
    for p in &cm.cert.preds {
        for c in p.cubes() {
            vars.extend(c.vars().into_iter().filter(|v| !v.is_oldrnk()));
        }
    }
    vars.extend(cm.rank.term.vars().cloned());
    vars.into_iter().collect()
}

/// Conditions of a rank certificate checked by enumeration over a box.
pub fn semantic_violations(cm: &CertifiedModule<Rat>, lo: i64, hi: i64) -> Vec<String> {
    let p = &cm.module.program;
    let preds = &cm.cert.preds;
    let fin = cm.module.final_loc;
    let states = grid_with_oldrnk(&module_vars(cm), lo, hi);
    let mut out = Vec::new();
    if let Some(nu) = states.iter().find(|nu| evaluate(&preds[p.init], nu) != nu.oldrnk.is_none()) {
        out.push(format!("initial at {:?}", nu));
    }
    for nu in &states {
        if evaluate(&preds[fin], nu) {
            let f = cm.rank.eval(|v| nu.get(v));
            if !precedes(&f, &nu.oldrnk) {
                out.push(format!("final at {:?}", nu));
                break;
            }
        }
    }
    for &(a, l, b) in &p.edges {
        let st = p.statement(l);
        'edge: for nu in &states {
            if !evaluate(&preds[a], nu) {
                continue;
            }
            let mut start = nu.clone();
            if a == fin {
                start.oldrnk = cm.rank.eval(|v| nu.get(v));
            }
            for next in exec(st, &start, lo, hi) {
                if !evaluate(&preds[b], &next) {
                    out.push(format!("edge {} -> {} : {} from {:?}", a, b, st, nu));
                    break 'edge;
                }
            }
        }
    }
    out
}

pub fn random_buchi(rng: &mut impl Rng, max_states: usize, max_letters: u32, density: (f64, f64), acc: f64) -> Buchi {
    let n = rng.gen_range(1..=max_states);
    let k = rng.gen_range(1..=max_letters);
    let d = rng.gen_range(density.0..=density.1);
    let mut b = Buchi::new((0..k).map(Letter));
    for _ in 0..n {
        b.add_state(rng.gen_bool(acc));
    }
    b.set_initial(0);
    for s in 0..n {
        for a in 0..k {
            for t in 0..n {
                if rng.gen_bool(d) {
                    b.add_transition(s, Letter(a), t);
                }
            }
        }
    }
    b
}

pub fn words(alphabet: &[Letter], len: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| alphabet.iter().map(move |&a| [w.clone(), vec![a]].concat()))
            .collect();
    }
    out
}

pub fn lassos(alphabet: &[Letter], max_u: usize, max_v: usize) -> Vec<LassoTrace> {
    let mut out = Vec::new();
    for lu in 0..=max_u {
        for u in words(alphabet, lu) {
            for lv in 1..=max_v {
                for v in words(alphabet, lv) {
                    out.push(LassoTrace::new(u.clone(), v));
                }
            }
        }
    }
    out
}

/// Kosaraju: non-empty iff a reachable non-trivial SCC holds an accepting state.
pub fn scc_nonempty(b: &Buchi) -> bool {
    let n = b.num_states();
    let mut succ = vec![Vec::new(); n];
    let mut pred = vec![Vec::new(); n];
    for (s, _, t) in b.transitions() {
        succ[s].push(t);
        pred[t].push(s);
    }
    let mut reach = vec![false; n];
    let mut stack = b.initial_states();
    for &s in &stack {
        reach[s] = true;
    }
    while let Some(s) = stack.pop() {
        for &t in &succ[s] {
            if !reach[t] {
                reach[t] = true;
                stack.push(t);
            }
        }
    }
    let mut order = Vec::new();
    let mut seen = vec![false; n];
    for s0 in 0..n {
        if seen[s0] {
            continue;
        }
        seen[s0] = true;
        let mut st = vec![(s0, 0usize)];
        while let Some(&mut (s, ref mut i)) = st.last_mut() {
            if *i < succ[s].len() {
                let t = succ[s][*i];
                *i += 1;
                if !seen[t] {
                    seen[t] = true;
                    st.push((t, 0));
                }
            } else {
                order.push(s);
                st.pop();
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut c = 0;
    for &s0 in order.iter().rev() {
        if comp[s0] != usize::MAX {
            continue;
        }
        let mut st = vec![s0];
        comp[s0] = c;
        while let Some(s) = st.pop() {
            for &t in &pred[s] {
                if comp[t] == usize::MAX {
                    comp[t] = c;
                    st.push(t);
                }
            }
        }
        c += 1;
    }
    (0..n).any(|s| {
        reach[s]
            && b.is_accepting(s)
            && (succ[s].contains(&s) || (0..n).any(|t| t != s && comp[t] == comp[s]))
    })
}
