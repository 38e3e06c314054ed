use std::cell::RefCell;
use std::rc::Rc;

use rustc_hash::FxHashMap as HashMap;

use crate::automata::{deterministic_part, AutomataError, Automaton, Buchi, Complement, Ncsb, OmegaAutomaton, StateId};
use crate::program::Letter;

type Key = (StateId, StateId, u8);

/// Lazy two-phase product. Phase 1 waits for an accepting state of the
/// left operand, phase 2 for one of the right operand.
pub struct Product {
    a: Automaton,
    b: Automaton,
    budget: usize,
    ids: RefCell<HashMap<Key, StateId>>,
    keys: RefCell<Vec<Key>>,
}

impl Product {
    pub fn new(a: Automaton, b: Automaton, budget: usize) -> Result<Self, AutomataError> {
        if a.alphabet() != b.alphabet() {
            return Err(AutomataError::AlphabetMismatch);
        }
        Ok(Product {
            a,
            b,
            budget,
            ids: RefCell::new(HashMap::default()),
            keys: RefCell::new(Vec::new()),
        })
    }

    fn intern(&self, k: Key) -> Result<StateId, AutomataError> {
        if let Some(&id) = self.ids.borrow().get(&k) {
            return Ok(id);
        }
        let mut keys = self.keys.borrow_mut();
        if keys.len() >= self.budget {
            return Err(AutomataError::StateBudget(self.budget));
        }
        keys.push(k);
        self.ids.borrow_mut().insert(k, keys.len() - 1);
        Ok(keys.len() - 1)
    }

    fn intern_unchecked(&self, k: Key) -> StateId {
        if let Some(&id) = self.ids.borrow().get(&k) {
            return id;
        }
        let mut keys = self.keys.borrow_mut();
        keys.push(k);
        self.ids.borrow_mut().insert(k, keys.len() - 1);
        keys.len() - 1
    }

    fn key(&self, s: StateId) -> Key {
        self.keys.borrow()[s]
    }

    pub fn num_states(&self) -> usize {
        self.keys.borrow().len()
    }
}

impl OmegaAutomaton for Product {
    fn alphabet(&self) -> Vec<Letter> {
        self.a.alphabet()
    }

    fn initial_states(&self) -> Vec<StateId> {
        let mut out = Vec::new();
        for s in self.a.initial_states() {
            for t in self.b.initial_states() {
                out.push(self.intern_unchecked((s, t, 1)));
            }
        }
        out
    }

    fn successors(&self, s: StateId, l: Letter) -> Result<Vec<StateId>, AutomataError> {
        let (x, y, phase) = self.key(s);
        let next_phase = match phase {
            1 if self.a.is_accepting(x) => 2,
            2 if self.b.is_accepting(y) => 1,
            p => p,
        };
        let xs = self.a.successors(x, l)?;
        if xs.is_empty() {
            return Ok(Vec::new());
        }
        let ys = self.b.successors(y, l)?;
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for &x2 in &xs {
            for &y2 in &ys {
                out.push(self.intern((x2, y2, next_phase))?);
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    fn state_count_bound(&self) -> Option<usize> {
        Some(2 * self.a.state_count_bound()? * self.b.state_count_bound()?)
    }

    fn is_accepting(&self, s: StateId) -> bool {
        let (_, y, phase) = self.key(s);
        phase == 2 && self.b.is_accepting(y)
    }

    fn describe(&self, s: StateId) -> String {
        let (x, y, p) = self.key(s);
        format!("({}, {}, {})", self.a.describe(x), self.b.describe(y), p)
    }
}

pub fn intersect(a: Automaton, b: Automaton, budget: usize) -> Result<Product, AutomataError> {
    Product::new(a, b, budget)
}

/// Breakpoint construction when `a` is semi-deterministic, rank-based
/// otherwise.
pub fn complement(a: Automaton, budget: usize) -> Automaton {
    match Buchi::explore(&*a, budget) {
        Ok(b) if deterministic_part(&b).is_some() => Rc::new(Ncsb::new(b, budget).expect("semi-deterministic")),
        Ok(b) => Rc::new(Complement::new(Rc::new(b), budget)),
        Err(_) => Rc::new(Complement::new(a, budget)),
    }
}

/// `L(p) \ ⋃ L(mᵢ)` as iterated products with complements.
pub fn difference(p: Automaton, ms: &[Automaton], budget: usize) -> Result<Automaton, AutomataError> {
    let mut acc = p;
    for m in ms {
        let c = complement(m.clone(), budget);
        acc = Rc::new(Product::new(acc, c, budget)?);
    }
    Ok(acc)
}
