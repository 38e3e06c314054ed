//! Rank-based complementation with an obligation set.
//!
//! A macro-state is a level ranking `f` of the states reached so far, with
//! ranks in `0..=2n` and even ranks on accepting states, plus the set `O` of
//! even-ranked states still owing a visit to an odd rank. It is accepting iff
//! `O = ∅`. Of all successor rankings with the same parity pattern only the
//! pointwise maximal one is kept: a larger ranking with the same obligations
//! admits every continuation of a smaller one.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

use rustc_hash::FxHashMap as HashMap;

use crate::automata::{AutomataError, Automaton, Buchi, OmegaAutomaton, StateId};
use crate::program::Letter;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Macro {
    ranks: Vec<(StateId, u32)>,
    obligations: Vec<StateId>,
}

pub struct Complement {
    a: Automaton,
    max_rank: u32,
    budget: usize,
    ids: RefCell<HashMap<Macro, StateId>>,
    states: RefCell<Vec<Macro>>,
    cache: RefCell<HashMap<(StateId, Letter), Vec<StateId>>>,
}

impl Complement {
    /// `a` must report `state_count_bound`; otherwise its reachable part is
    /// materialized first.
    pub fn new(a: Automaton, budget: usize) -> Self {
        let (a, n): (Automaton, usize) = match a.state_count_bound() {
            Some(n) => (a, n),
            None => {
                let b = Buchi::explore(&*a, budget).unwrap_or_default();
                let n = b.num_states();
                (Rc::new(b), n)
            }
        };
        Complement {
            a,
            max_rank: 2 * n as u32,
            budget,
            ids: RefCell::new(HashMap::default()),
            states: RefCell::new(Vec::new()),
            cache: RefCell::new(HashMap::default()),
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.borrow().len()
    }

    fn intern(&self, m: Macro, check: bool) -> Result<StateId, AutomataError> {
        if let Some(&id) = self.ids.borrow().get(&m) {
            return Ok(id);
        }
        let mut states = self.states.borrow_mut();
        if check && states.len() >= self.budget {
            return Err(AutomataError::StateBudget(self.budget));
        }
        states.push(m.clone());
        self.ids.borrow_mut().insert(m, states.len() - 1);
        Ok(states.len() - 1)
    }

    fn compute(&self, s: StateId, l: Letter) -> Result<Vec<StateId>, AutomataError> {
        let m = self.states.borrow()[s].clone();
        let mut bound: BTreeMap<StateId, u32> = BTreeMap::new();
        for &(q, r) in &m.ranks {
            for t in self.a.successors(q, l)? {
                let e = bound.entry(t).or_insert(r);
                *e = (*e).min(r);
            }
        }
        let mut from_obligations: BTreeSet<StateId> = BTreeSet::new();
        for &q in &m.obligations {
            from_obligations.extend(self.a.successors(q, l)?);
        }
        // Per state: the maximal admissible rank of each parity.
        let mut options: Vec<(StateId, Vec<u32>)> = Vec::new();
        for (&t, &b) in &bound {
            let acc = self.a.is_accepting(t);
            let top = if acc && b % 2 == 1 { b - 1 } else { b };
            let mut opts = vec![top];
            if !acc && top > 0 {
                opts.push(top - 1);
            }
            options.push((t, opts));
        }
        let mut out = Vec::new();
        let mut choice = vec![0usize; options.len()];
        loop {
            let ranks: Vec<(StateId, u32)> = options
                .iter()
                .zip(&choice)
                .map(|((t, o), &c)| (*t, o[c]))
                .collect();
            let even: Vec<StateId> = ranks.iter().filter(|(_, r)| r % 2 == 0).map(|(t, _)| *t).collect();
            let obligations = if m.obligations.is_empty() {
                even
            } else {
                even.into_iter().filter(|t| from_obligations.contains(t)).collect()
            };
            out.push(self.intern(Macro { ranks, obligations }, true)?);
            // next combination
            let mut k = 0;
            loop {
                if k == choice.len() {
                    out.sort_unstable();
                    out.dedup();
                    return Ok(out);
                }
                choice[k] += 1;
                if choice[k] < options[k].1.len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }
}

impl OmegaAutomaton for Complement {
    fn alphabet(&self) -> Vec<Letter> {
        self.a.alphabet()
    }

    fn initial_states(&self) -> Vec<StateId> {
        let mut ranks: Vec<(StateId, u32)> =
            self.a.initial_states().into_iter().map(|q| (q, self.max_rank)).collect();
        ranks.sort_unstable();
        ranks.dedup();
        let m = Macro {
            ranks,
            obligations: Vec::new(),
        };
        vec![self.intern(m, false).expect("unchecked")]
    }

    fn successors(&self, s: StateId, l: Letter) -> Result<Vec<StateId>, AutomataError> {
        if let Some(v) = self.cache.borrow().get(&(s, l)) {
            return Ok(v.clone());
        }
        let v = self.compute(s, l)?;
        self.cache.borrow_mut().insert((s, l), v.clone());
        Ok(v)
    }

    fn is_accepting(&self, s: StateId) -> bool {
        self.states.borrow()[s].obligations.is_empty()
    }

    fn describe(&self, s: StateId) -> String {
        let m = &self.states.borrow()[s];
        let f: Vec<String> = m
            .ranks
            .iter()
            .map(|(q, r)| format!("{}:{}", self.a.describe(*q), r))
            .collect();
        let o: Vec<String> = m.obligations.iter().map(|q| self.a.describe(*q)).collect();
        format!("{{{}}} O={{{}}}", f.join(", "), o.join(", "))
    }
}
