//! Breakpoint complementation for semi-deterministic automata, whose states
//! reachable from accepting states form a deterministic, successor-closed
//! part `Q2`.
//!
//! A macro-state `(N, C, S, B)` tracks the nondeterministic part `N`, the
//! `Q2` runs still allowed to visit accepting states `C`, the runs guessed
//! never to visit one again `S`, and the breakpoint `B ⊆ C` of runs that
//! still have to move into `S` (or die). Accepting iff `B = ∅`.

use std::cell::RefCell;
use std::collections::BTreeSet;

use rustc_hash::FxHashMap as HashMap;

use crate::automata::{AutomataError, Buchi, OmegaAutomaton, StateId};
use crate::program::Letter;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Macro {
    n: Vec<StateId>,
    c: Vec<StateId>,
    s: Vec<StateId>,
    b: Vec<StateId>,
}

pub struct Ncsb {
    a: Buchi,
    q2: Vec<bool>,
    budget: usize,
    ids: RefCell<HashMap<Macro, StateId>>,
    states: RefCell<Vec<Macro>>,
    cache: RefCell<HashMap<(StateId, Letter), Vec<StateId>>>,
}

type Set = BTreeSet<StateId>;

/// States reachable from an accepting state, if that part is deterministic.
pub fn deterministic_part(a: &Buchi) -> Option<Vec<bool>> {
    let n = a.num_states();
    let mut q2 = vec![false; n];
    let mut stack: Vec<StateId> = (0..n).filter(|&s| a.is_accepting(s)).collect();
    for &s in &stack {
        q2[s] = true;
    }
    while let Some(s) = stack.pop() {
        for l in a.alphabet() {
            let ts = a.successors(s, l).ok()?;
            if ts.len() > 1 {
                return None;
            }
            for t in ts {
                if !q2[t] {
                    q2[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    Some(q2)
}

/// All splits of `free` into `C` and `S`; accepting states always go to `C`.
fn splits(a: &Buchi, free: &[StateId], c: &Set, s: &Set, mut emit: impl FnMut(Set, Set)) {
    let movable: Vec<StateId> = free.iter().copied().filter(|&q| !a.is_accepting(q)).collect();
    let fixed: Vec<StateId> = free.iter().copied().filter(|&q| a.is_accepting(q)).collect();
    assert!(movable.len() < 32, "too many free states");
    for mask in 0u32..(1 << movable.len()) {
        let mut c2 = c.clone();
        let mut s2 = s.clone();
        c2.extend(fixed.iter().copied());
        for (i, &q) in movable.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s2.insert(q);
            } else {
                c2.insert(q);
            }
        }
        emit(c2, s2);
    }
}

impl Ncsb {
    /// `None` when `a` is not semi-deterministic.
    pub fn new(a: Buchi, budget: usize) -> Option<Self> {
        let q2 = deterministic_part(&a)?;
        Some(Ncsb {
            a,
            q2,
            budget,
            ids: RefCell::new(HashMap::default()),
            states: RefCell::new(Vec::new()),
            cache: RefCell::new(HashMap::default()),
        })
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

    fn post(&self, from: &[StateId], l: Letter) -> Set {
        let mut out = Set::new();
        for &q in from {
            out.extend(self.a.successors(q, l).unwrap_or_default());
        }
        out
    }

    fn compute(&self, id: StateId, l: Letter) -> Result<Vec<StateId>, AutomataError> {
        let m = self.states.borrow()[id].clone();
        let from_n = self.post(&m.n, l);
        let n2: Vec<StateId> = from_n.iter().copied().filter(|&q| !self.q2[q]).collect();
        let must_s = self.post(&m.s, l);
        if must_s.iter().any(|&q| self.a.is_accepting(q)) {
            return Ok(Vec::new());
        }
        let c_rej: Vec<StateId> = m.c.iter().copied().filter(|&q| !self.a.is_accepting(q)).collect();
        let c_acc: Vec<StateId> = m.c.iter().copied().filter(|&q| self.a.is_accepting(q)).collect();
        let must_c = self.post(&c_rej, l);
        if must_c.intersection(&must_s).next().is_some() {
            return Ok(Vec::new());
        }
        let mut free: Set = from_n.iter().copied().filter(|&q| self.q2[q]).collect();
        free.extend(self.post(&c_acc, l));
        let free: Vec<StateId> = free
            .into_iter()
            .filter(|q| !must_s.contains(q) && !must_c.contains(q))
            .collect();
        let b_post = self.post(&m.b, l);
        let mut out = Vec::new();
        let mut err = None;
        splits(&self.a, &free, &must_c, &must_s, |c2, s2| {
            let b2: Vec<StateId> = if m.b.is_empty() {
                c2.iter().copied().collect()
            } else {
                b_post.intersection(&c2).copied().collect()
            };
            let mac = Macro {
                n: n2.clone(),
                c: c2.into_iter().collect(),
                s: s2.into_iter().collect(),
                b: b2,
            };
            match self.intern(mac, true) {
                Ok(x) => out.push(x),
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

impl OmegaAutomaton for Ncsb {
    fn alphabet(&self) -> Vec<Letter> {
        self.a.alphabet()
    }

    fn initial_states(&self) -> Vec<StateId> {
        let init = self.a.initial_states();
        let n: Vec<StateId> = init.iter().copied().filter(|&q| !self.q2[q]).collect();
        let entry: Vec<StateId> = init.iter().copied().filter(|&q| self.q2[q]).collect();
        let mut out = Vec::new();
        splits(&self.a, &entry, &Set::new(), &Set::new(), |c, s| {
            let c: Vec<StateId> = c.into_iter().collect();
            let m = Macro {
                n: n.clone(),
                b: c.clone(),
                c,
                s: s.into_iter().collect(),
            };
            out.push(self.intern(m, false).expect("unchecked"));
        });
        out.sort_unstable();
        out.dedup();
        out
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
        self.states.borrow()[s].b.is_empty()
    }

    fn describe(&self, s: StateId) -> String {
        let m = &self.states.borrow()[s];
        let show = |v: &[StateId]| v.iter().map(|&q| self.a.describe(q)).collect::<Vec<_>>().join(", ");
        format!("N={{{}}} C={{{}}} S={{{}}} B={{{}}}", show(&m.n), show(&m.c), show(&m.s), show(&m.b))
    }
}
