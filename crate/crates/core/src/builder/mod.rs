//! Generalization of a certified lasso module: equivalent locations are
//! merged, then every transition justified by a valid Hoare triple between
//! the remaining annotations is added.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;
use std::sync::Arc;

use crate::automata::{AutomataError, Automaton, Module, OmegaAutomaton, StateId};
use crate::certifier::{CertifiedModule, RankCertificate};
use crate::logic::{entails, equivalent, hoare_valid, hoare_valid_from_final, LogicError, Predicate};
use crate::program::{Edge, Letter, Program, StatementTable};
use crate::ranker::RankingFunction;
use crate::scalar::Scalar;

pub struct ExtendedModule<S> {
    names: Vec<String>,
    preds: Vec<Predicate<S>>,
    init: StateId,
    final_state: StateId,
    seed_edges: BTreeSet<Edge>,
    /// Reachable from the final state in the merged seed.
    after_final: Vec<bool>,
    rank: RankingFunction<S>,
    stmts: Arc<StatementTable<S>>,
    alphabet: Vec<Letter>,
    cache: RefCell<HashMap<Edge, bool>>,
    stronger: RefCell<HashMap<(StateId, StateId), bool>>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    parent[x] = r;
    r
}

/// Quotient of the seed edges by `parent`, with states renumbered densely.
fn quotient(parent: &mut [usize], edges: &[Edge]) -> (Vec<usize>, BTreeSet<Edge>) {
    let n = parent.len();
    let mut index = vec![usize::MAX; n];
    let mut next = 0;
    for x in 0..n {
        let r = find(parent, x);
        if index[r] == usize::MAX {
            index[r] = next;
            next += 1;
        }
    }
    let map: Vec<usize> = (0..n).map(|x| index[find(parent, x)]).collect();
    let es = edges.iter().map(|&(a, l, b)| (map[a], l, map[b])).collect();
    (map, es)
}

fn reach(n: usize, edges: &BTreeSet<Edge>, from: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(x) = stack.pop() {
        for &(a, _, b) in edges {
            if a == x && !seen[b] {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    seen
}

/// At most one edge per state and letter inside the region.
fn deterministic_on(edges: &BTreeSet<Edge>, region: &[bool]) -> bool {
    let mut seen = BTreeSet::new();
    edges.iter().all(|&(a, l, _)| !region[a] || seen.insert((a, l)))
}

impl<S: Scalar> ExtendedModule<S> {
    pub fn new(seed: &CertifiedModule<S>) -> Self {
        let p = &seed.module.program;
        let n = p.num_locations();
        let (init, fin) = (p.init, seed.module.final_loc);
        let preds = &seed.cert.preds;
        let mut parent: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for j in i + 1..n {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri == rj {
                    continue;
                }
                let has = |r: usize, x: usize, parent: &mut Vec<usize>| find(parent, x) == r;
                let ci = (has(ri, init, &mut parent), has(ri, fin, &mut parent));
                let cj = (has(rj, init, &mut parent), has(rj, fin, &mut parent));
                if (ci.0 && cj.1) || (ci.1 && cj.0) {
                    continue;
                }
                let same = preds[ri] == preds[rj] || matches!(equivalent(&preds[ri], &preds[rj]), Ok(true));
                if !same {
                    continue;
                }
                // the representative keeps the role of init or final
                let (keep, drop) = if cj.0 || cj.1 { (rj, ri) } else { (ri, rj) };
                let mut trial = parent.clone();
                trial[drop] = keep;
                let (map, es) = quotient(&mut trial, &p.edges);
                let m = map.iter().max().map_or(0, |x| x + 1);
                let after = reach(m, &es, map[fin]);
                if after[map[init]] || !deterministic_on(&es, &after) {
                    continue;
                }
                if find(&mut trial, fin) == keep {
                    // edges leaving the dropped class now leave the final state
                    let ok = p.edges.iter().all(|&(a, l, b)| {
                        find(&mut trial, a) != keep
                            || a == fin
                            || matches!(
                                hoare_valid_from_final(&preds[fin], &seed.rank.term, p.statement(l), &preds[b]),
                                Ok(true)
                            )
                    });
                    if !ok {
                        continue;
                    }
                }
                parent = trial;
            }
        }
        let (map, seed_edges) = quotient(&mut parent, &p.edges);
        let m = map.iter().max().map_or(0, |x| x + 1);
        let mut names = vec![String::new(); m];
        let mut qpreds = vec![Predicate::bottom(); m];
        for x in 0..n {
            let q = map[x];
            if find(&mut parent, x) == x {
                qpreds[q] = preds[x].clone();
            }
            if !names[q].is_empty() {
                names[q].push('_');
            }
            names[q].push_str(&p.locations[x]);
        }
        let after_final = reach(m, &seed_edges, map[fin]);
        ExtendedModule {
            names,
            preds: qpreds,
            init: map[init],
            final_state: map[fin],
            seed_edges,
            after_final,
            rank: seed.rank.clone(),
            stmts: p.stmts.clone(),
            alphabet: p.stmts.letters().collect(),
            cache: RefCell::new(HashMap::new()),
            stronger: RefCell::new(HashMap::new()),
        }
    }

    pub fn num_states(&self) -> usize {
        self.preds.len()
    }

    pub fn final_state(&self) -> StateId {
        self.final_state
    }

    pub fn init(&self) -> StateId {
        self.init
    }

    pub fn predicate(&self, q: StateId) -> &Predicate<S> {
        &self.preds[q]
    }

    pub fn rank(&self) -> &RankingFunction<S> {
        &self.rank
    }

    fn triple(&self, q: StateId, a: Letter, r: StateId) -> Result<bool, LogicError> {
        let st = self.stmts.get(a);
        if q == self.final_state {
            hoare_valid_from_final(&self.preds[q], &self.rank.term, st, &self.preds[r])
        } else {
            hoare_valid(&self.preds[q], st, &self.preds[r])
        }
    }

    pub fn has_transition(&self, q: StateId, a: Letter, r: StateId) -> bool {
        let key = (q, a, r);
        if self.seed_edges.contains(&key) {
            return true;
        }
        if self.after_final[q] && !self.after_final[r] {
            return false;
        }
        if let Some(&b) = self.cache.borrow().get(&key) {
            return b;
        }
        let b = match self.triple(q, a, r) {
            Ok(b) => b,
            Err(e) => {
                log::warn!("transition {} -{}-> {} dropped: {}", q, a, r, e);
                false
            }
        };
        self.cache.borrow_mut().insert(key, b);
        b
    }

    /// `r` strictly subsumes `s`: stronger annotation (ties broken by
    /// index), same side of the final region, and neither is final.
    fn subsumes(&self, r: StateId, s: StateId) -> bool {
        if r == s
            || r == self.final_state
            || s == self.final_state
            || self.after_final[r] != self.after_final[s]
        {
            return false;
        }
        let memo = |x: StateId, y: StateId| {
            if let Some(&b) = self.stronger.borrow().get(&(x, y)) {
                return b;
            }
            let b = matches!(entails(&self.preds[x], &self.preds[y]), Ok(true));
            self.stronger.borrow_mut().insert((x, y), b);
            b
        };
        memo(r, s) && (r < s || !memo(s, r))
    }

    /// Valid targets, keeping only the strongest ones. A run through a
    /// dropped target is simulated by a run through one that subsumes it,
    /// since every triple valid from a weaker precondition stays valid from
    /// a stronger one. From the final region only one target is kept, the
    /// seed's if there is one, so the module stays semi-deterministic.
    pub fn successors(&self, q: StateId, a: Letter) -> Vec<StateId> {
        if self.after_final[q] {
            if let Some(&(_, _, r)) = self.seed_edges.range((q, a, 0)..=(q, a, StateId::MAX)).next() {
                return vec![r];
            }
        }
        let all: Vec<StateId> = (0..self.num_states()).filter(|&r| self.has_transition(q, a, r)).collect();
        let mut best: Vec<StateId> = all
            .iter()
            .copied()
            .filter(|&s| !all.iter().any(|&r| self.subsumes(r, s)))
            .collect();
        if self.after_final[q] {
            best.truncate(1);
        }
        best
    }

    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for q in 0..self.num_states() {
            for &a in &self.alphabet {
                for r in self.successors(q, a) {
                    out.push((q, a, r));
                }
            }
        }
        out
    }

    pub fn materialize(&self) -> CertifiedModule<S> {
        let edges = self.edges();
        let mut vars = BTreeSet::new();
        for &(_, l, _) in &edges {
            vars.extend(self.stmts.get(l).vars().into_iter().filter(|v| !v.is_oldrnk()));
        }
        let program = Program {
            name: "module".into(),
            vars: vars.into_iter().collect(),
            locations: self.names.clone(),
            init: self.init,
            edges,
            stmts: self.stmts.clone(),
        };
        let module = Module::new(program, self.final_state)
            .expect("extended module keeps the final region closed");
        CertifiedModule {
            module,
            rank: self.rank.clone(),
            cert: RankCertificate { preds: self.preds.clone() },
        }
    }

    pub fn as_buchi(self: &Rc<Self>) -> Automaton
    where
        S: 'static,
    {
        Rc::new(View(self.clone()))
    }
}

struct View<S>(Rc<ExtendedModule<S>>);

impl<S: Scalar> OmegaAutomaton for View<S> {
    fn alphabet(&self) -> Vec<Letter> {
        self.0.alphabet.clone()
    }

    fn initial_states(&self) -> Vec<StateId> {
        vec![self.0.init]
    }

    fn successors(&self, s: StateId, a: Letter) -> Result<Vec<StateId>, AutomataError> {
        Ok(self.0.successors(s, a))
    }

    fn is_accepting(&self, s: StateId) -> bool {
        s == self.0.final_state
    }

    fn state_count_bound(&self) -> Option<usize> {
        Some(self.0.num_states())
    }

    fn describe(&self, s: StateId) -> String {
        self.0.names[s].clone()
    }
}
