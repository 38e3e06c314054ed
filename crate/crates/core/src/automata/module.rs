use crate::automata::{AutomataError, Buchi};
use crate::program::{Loc, Program};
use crate::scalar::Scalar;

/// A program with one fair location.
#[derive(Clone, Debug)]
pub struct Module<S> {
    pub program: Program<S>,
    pub final_loc: Loc,
}

impl<S: Scalar> Module<S> {
    /// Checks the partition condition: the initial location must not be
    /// reachable from the final one. The region reachable from the final
    /// location is then closed under successors and contains no initial
    /// location, so no edge leads back out of it.
    pub fn new(program: Program<S>, final_loc: Loc) -> Result<Self, AutomataError> {
        if final_loc >= program.num_locations() {
            return Err(AutomataError::Partition(format!("unknown final location {}", final_loc)));
        }
        if program.reachable_from(final_loc).contains(&program.init) {
            return Err(AutomataError::Partition(format!(
                "initial location {} is reachable from final location {}",
                program.locations[program.init], program.locations[final_loc]
            )));
        }
        Ok(Module { program, final_loc })
    }

    pub fn init(&self) -> Loc {
        self.program.init
    }
}

fn graph<S: Scalar>(p: &Program<S>, accepting: impl Fn(Loc) -> bool) -> Buchi {
    let mut b = Buchi::new(p.stmts.letters());
    for l in 0..p.num_locations() {
        let s = b.add_state(accepting(l));
        b.set_label(s, p.locations[l].clone());
    }
    b.set_initial(p.init);
    for &(x, st, y) in &p.edges {
        b.add_transition(x, st, y);
    }
    b
}

/// Every location accepting; the language is the set of ω-traces.
pub fn program_to_buchi<S: Scalar>(p: &Program<S>) -> Buchi {
    graph(p, |_| true)
}

/// Only the final location accepting; the language is the set of fair traces.
pub fn module_to_buchi<S: Scalar>(m: &Module<S>) -> Buchi {
    graph(&m.program, |l| l == m.final_loc)
}
