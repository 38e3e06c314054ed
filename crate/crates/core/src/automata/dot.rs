use std::fmt::Write;

use crate::automata::{AutomataError, Buchi, OmegaAutomaton};
use crate::program::Letter;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT rendering of the reachable part; accepting states are double circles.
pub fn to_dot(
    a: &dyn OmegaAutomaton,
    name: &str,
    label: impl Fn(Letter) -> String,
    budget: usize,
) -> Result<String, AutomataError> {
    let b = Buchi::explore(a, budget)?;
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
    let _ = writeln!(out, "  rankdir=TB;");
    let _ = writeln!(out, "  __start [shape=point];");
    for s in 0..b.num_states() {
        let shape = if b.is_accepting(s) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  n{} [shape={}, label=\"{}\"];", s, shape, escape(&b.describe(s)));
    }
    for s in b.initial_states() {
        let _ = writeln!(out, "  __start -> n{};", s);
    }
    for (s, l, t) in b.transitions() {
        let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"];", s, t, escape(&label(l)));
    }
    out.push_str("}\n");
    Ok(out)
}
