//! Statements, the interned statement alphabet, and control-flow graphs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::linear::{LinearTerm, Var};
use crate::logic::Cube;
use crate::scalar::Scalar;

/// An interned statement; doubles as an automaton letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u32);

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Statement<S> {
    /// Conjunctive guard; never mentions `oldrnk`.
    Assume(Cube<S>),
    Assign(Var, LinearTerm<S>),
    Havoc(Var),
}

impl<S: Scalar> Statement<S> {
    pub fn rename_all(&self, f: impl Fn(&Var) -> Var) -> Self {
        match self {
            Statement::Assume(c) => Statement::Assume(c.rename_all(&f)),
            Statement::Assign(v, e) => Statement::Assign(f(v), e.rename_all(&f)),
            Statement::Havoc(v) => Statement::Havoc(f(v)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        match self {
            Statement::Assume(c) => c.vars().into_iter().collect(),
            Statement::Assign(v, e) => std::iter::once(v.clone()).chain(e.vars().cloned()).collect(),
            Statement::Havoc(v) => [v.clone()].into(),
        }
    }
}

impl<S: Scalar> fmt::Display for Statement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Assume(c) => write!(f, "assume {}", c),
            Statement::Assign(v, e) => write!(f, "{} := {}", v, e),
            Statement::Havoc(v) => write!(f, "havoc {}", v),
        }
    }
}

/// Interning table: two statements are the same letter iff they print the same.
#[derive(Clone, Debug, Default)]
pub struct StatementTable<S> {
    stmts: Vec<Statement<S>>,
    index: BTreeMap<String, Letter>,
}

impl<S: Scalar> StatementTable<S> {
    pub fn new() -> Self {
        StatementTable {
            stmts: Vec::new(),
            index: BTreeMap::new(),
        }
    }

    pub fn intern(&mut self, st: Statement<S>) -> Letter {
        let key = st.to_string();
        if let Some(&l) = self.index.get(&key) {
            return l;
        }
        let l = Letter(self.stmts.len() as u32);
        self.stmts.push(st);
        self.index.insert(key, l);
        l
    }

    pub fn get(&self, l: Letter) -> &Statement<S> {
        &self.stmts[l.0 as usize]
    }

    pub fn lookup(&self, text: &str) -> Option<Letter> {
        self.index.get(text).copied()
    }

    pub fn len(&self) -> usize {
        self.stmts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stmts.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.stmts.len() as u32).map(Letter)
    }

    pub fn text(&self, l: Letter) -> String {
        self.get(l).to_string()
    }
}

pub type Loc = usize;

/// Edge `(src, letter, dst)`.
pub type Edge = (Loc, Letter, Loc);

/// A labeled control-flow graph.
#[derive(Clone, Debug)]
pub struct Program<S> {
    pub name: String,
    pub vars: Vec<Var>,
    pub locations: Vec<String>,
    pub init: Loc,
    pub edges: Vec<Edge>,
    pub stmts: Arc<StatementTable<S>>,
}

impl<S: Scalar> Program<S> {
    pub fn num_locations(&self) -> usize {
        self.locations.len()
    }

    pub fn statement(&self, l: Letter) -> &Statement<S> {
        self.stmts.get(l)
    }

    /// Letters used on some edge, sorted.
    pub fn alphabet(&self) -> Vec<Letter> {
        let set: BTreeSet<Letter> = self.edges.iter().map(|e| e.1).collect();
        set.into_iter().collect()
    }

    pub fn successors(&self, l: Loc) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.0 == l)
    }

    pub fn reachable_from(&self, start: Loc) -> BTreeSet<Loc> {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(l) = queue.pop_front() {
            for e in self.successors(l) {
                if seen.insert(e.2) {
                    queue.push_back(e.2);
                }
            }
        }
        seen
    }

    /// True iff the graph has no cycle reachable from `init`.
    pub fn is_acyclic(&self) -> bool {
        let reach = self.reachable_from(self.init);
        !reach.iter().any(|&l| {
            self.successors(l)
                .any(|e| self.reachable_from(e.2).contains(&l))
        })
    }

    /// Variables of the program, including any mentioned only in statements.
    pub fn all_vars(&self) -> Vec<Var> {
        let mut set: BTreeSet<Var> = self.vars.iter().cloned().collect();
        for e in &self.edges {
            set.extend(self.statement(e.1).vars());
        }
        set.into_iter().collect()
    }

    /// Exact structural equality of graphs under a fixed location mapping,
    /// comparing statements by text.
    pub fn same_shape(&self, other: &Program<S>) -> bool {
        let edge_text = |p: &Program<S>| {
            let mut v: Vec<(String, String, String)> = p
                .edges
                .iter()
                .map(|e| (p.locations[e.0].clone(), p.stmts.text(e.1), p.locations[e.2].clone()))
                .collect();
            v.sort();
            v
        };
        self.locations.len() == other.locations.len()
            && self.locations[self.init] == other.locations[other.init]
            && edge_text(self) == edge_text(other)
    }
}
