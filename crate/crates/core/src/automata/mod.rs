//! Büchi automata over the statement alphabet.
//!
//! Automata are type-erased behind [`OmegaAutomaton`] with dense `usize`
//! state ids. Products, complements and extended modules are lazy: their
//! states are interned the first time a successor query reaches them.

mod complement;
mod dot;
mod emptiness;
mod module;
mod ncsb;
mod product;

pub use complement::Complement;
pub use dot::to_dot;
pub use emptiness::{is_empty, is_empty_with, lasso_member, lasso_members, Limits};
pub use module::{module_to_buchi, program_to_buchi, Module};
pub use ncsb::{deterministic_part, Ncsb};
pub use product::{complement, difference, intersect, Product};

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::program::{Letter, StatementTable};
use crate::scalar::Scalar;

pub type StateId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomataError {
    #[error("state budget of {0} exceeded")]
    StateBudget(usize),
    #[error("time limit exceeded")]
    Timeout,
    #[error("automata have different alphabets")]
    AlphabetMismatch,
    #[error("module partition violated: {0}")]
    Partition(String),
}

pub trait OmegaAutomaton {
    /// Sorted, duplicate-free.
    fn alphabet(&self) -> Vec<Letter>;
    fn initial_states(&self) -> Vec<StateId>;
    /// Sorted, duplicate-free.
    fn successors(&self, s: StateId, a: Letter) -> Result<Vec<StateId>, AutomataError>;
    fn is_accepting(&self, s: StateId) -> bool;
    /// Upper bound on the number of reachable states, when known cheaply.
    fn state_count_bound(&self) -> Option<usize> {
        None
    }
    fn describe(&self, s: StateId) -> String {
        format!("q{}", s)
    }
}

pub type Automaton = Rc<dyn OmegaAutomaton>;

/// Ultimately periodic word `stem · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LassoTrace {
    pub stem: Vec<Letter>,
    /// Never empty.
    pub cycle: Vec<Letter>,
}

impl LassoTrace {
    pub fn new(stem: Vec<Letter>, cycle: Vec<Letter>) -> Self {
        assert!(!cycle.is_empty(), "lasso loop must be non-empty");
        LassoTrace { stem, cycle }
    }

    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Letter at position `i` of the infinite word.
    pub fn at(&self, i: usize) -> Letter {
        if i < self.stem.len() {
            self.stem[i]
        } else {
            self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    /// Canonical representative of the ω-word: primitive period, shortest
    /// stem.
    pub fn normal_form(&self) -> LassoTrace {
        let mut cycle = self.cycle.clone();
        let n = cycle.len();
        for p in 1..=n {
            if n % p == 0 && (0..n).all(|i| cycle[i] == cycle[i % p]) {
                cycle.truncate(p);
                break;
            }
        }
        let mut stem = self.stem.clone();
        while let Some(&last) = stem.last() {
            if last != *cycle.last().expect("non-empty") {
                break;
            }
            stem.pop();
            cycle.rotate_right(1);
        }
        LassoTrace { stem, cycle }
    }

    /// Same ω-word.
    pub fn same_word(&self, other: &LassoTrace) -> bool {
        self.normal_form() == other.normal_form()
    }

    pub fn render<S: Scalar>(&self, table: &StatementTable<S>) -> String {
        let show = |v: &[Letter]| {
            if v.is_empty() {
                "ε".to_string()
            } else {
                v.iter().map(|&l| format!("[{}]", table.text(l))).collect::<Vec<_>>().join(" ")
            }
        };
        format!("stem: {}; loop: {}", show(&self.stem), show(&self.cycle))
    }
}

impl fmt::Display for LassoTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[Letter]| v.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "({}, {})", show(&self.stem), show(&self.cycle))
    }
}

/// Explicit automaton.
#[derive(Clone, Debug, Default)]
pub struct Buchi {
    alphabet: Vec<Letter>,
    initial: Vec<StateId>,
    accepting: Vec<bool>,
    labels: Vec<String>,
    trans: Vec<BTreeMap<Letter, Vec<StateId>>>,
}

impl Buchi {
    pub fn new(alphabet: impl IntoIterator<Item = Letter>) -> Self {
        let mut a: Vec<Letter> = alphabet.into_iter().collect();
        a.sort();
        a.dedup();
        Buchi {
            alphabet: a,
            ..Default::default()
        }
    }

    pub fn add_state(&mut self, accepting: bool) -> StateId {
        self.accepting.push(accepting);
        self.labels.push(format!("q{}", self.trans.len()));
        self.trans.push(BTreeMap::new());
        self.trans.len() - 1
    }

    pub fn set_label(&mut self, s: StateId, label: String) {
        self.labels[s] = label;
    }

    pub fn set_initial(&mut self, s: StateId) {
        if !self.initial.contains(&s) {
            self.initial.push(s);
            self.initial.sort();
        }
    }

    pub fn set_accepting(&mut self, s: StateId, acc: bool) {
        self.accepting[s] = acc;
    }

    pub fn add_transition(&mut self, s: StateId, a: Letter, t: StateId) {
        assert!(self.alphabet.binary_search(&a).is_ok(), "letter outside alphabet");
        let v = self.trans[s].entry(a).or_default();
        if let Err(i) = v.binary_search(&t) {
            v.insert(i, t);
        }
    }

    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.trans.iter().map(|m| m.values().map(Vec::len).sum::<usize>()).sum()
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, Letter, StateId)> + '_ {
        self.trans
            .iter()
            .enumerate()
            .flat_map(|(s, m)| m.iter().flat_map(move |(&a, ts)| ts.iter().map(move |&t| (s, a, t))))
    }

    /// `Σ^ω` over `alphabet`.
    pub fn universal(alphabet: impl IntoIterator<Item = Letter>) -> Self {
        let mut b = Buchi::new(alphabet);
        let s = b.add_state(true);
        b.set_initial(s);
        for a in b.alphabet.clone() {
            b.add_transition(s, a, s);
        }
        b
    }

    /// The empty language over `alphabet`.
    pub fn empty(alphabet: impl IntoIterator<Item = Letter>) -> Self {
        let mut b = Buchi::new(alphabet);
        let s = b.add_state(false);
        b.set_initial(s);
        b
    }

    /// Materializes the reachable part of any automaton.
    pub fn explore(a: &dyn OmegaAutomaton, budget: usize) -> Result<Buchi, AutomataError> {
        let mut b = Buchi::new(a.alphabet());
        let mut map: BTreeMap<StateId, StateId> = BTreeMap::new();
        let mut queue = std::collections::VecDeque::new();
        let intern = |s: StateId, b: &mut Buchi, map: &mut BTreeMap<StateId, StateId>, q: &mut std::collections::VecDeque<StateId>| {
            *map.entry(s).or_insert_with(|| {
                let id = b.add_state(a.is_accepting(s));
                b.set_label(id, a.describe(s));
                q.push_back(s);
                id
            })
        };
        for s in a.initial_states() {
            let id = intern(s, &mut b, &mut map, &mut queue);
            b.set_initial(id);
        }
        while let Some(s) = queue.pop_front() {
            if b.num_states() > budget {
                return Err(AutomataError::StateBudget(budget));
            }
            let from = map[&s];
            for l in a.alphabet() {
                for t in a.successors(s, l)? {
                    let to = intern(t, &mut b, &mut map, &mut queue);
                    b.add_transition(from, l, to);
                }
            }
        }
        Ok(b)
    }
}

impl OmegaAutomaton for Buchi {
    fn alphabet(&self) -> Vec<Letter> {
        self.alphabet.clone()
    }

    fn initial_states(&self) -> Vec<StateId> {
        self.initial.clone()
    }

    fn successors(&self, s: StateId, a: Letter) -> Result<Vec<StateId>, AutomataError> {
        Ok(self.trans[s].get(&a).cloned().unwrap_or_default())
    }

    fn is_accepting(&self, s: StateId) -> bool {
        self.accepting[s]
    }

    fn state_count_bound(&self) -> Option<usize> {
        Some(self.num_states())
    }

    fn describe(&self, s: StateId) -> String {
        self.labels[s].clone()
    }
}
