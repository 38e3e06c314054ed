//! Input formats: the `.wprog` while-language and the `.cfg` edge list.

mod cfg;
mod expr;
mod lexer;
mod wprog;

pub use cfg::{parse_cfg, parse_linear_term, parse_predicate, parse_statement, render_cfg};
pub use wprog::parse_while_program;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::program::{Loc, Program};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrontendError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: 'oldrnk' is reserved")]
    Reserved { line: usize, col: usize },
    #[error("{line}:{col}: nonlinear expression")]
    Nonlinear { line: usize, col: usize },
    #[error("{line}:{col}: location '{name}' is never declared")]
    UndeclaredLocation { name: String, line: usize, col: usize },
    #[error("{line}:{col}: duplicate init")]
    DuplicateInit { line: usize, col: usize },
    #[error("missing init declaration")]
    MissingInit,
}

impl FrontendError {
    pub(crate) fn syntax(line: usize, col: usize, msg: &str) -> Self {
        FrontendError::Syntax {
            line,
            col,
            msg: msg.to_string(),
        }
    }
}

/// Input format selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Wprog,
    Cfg,
}

pub fn parse_program<S: Scalar>(src: &str, format: Format) -> Result<Program<S>, FrontendError> {
    match format {
        Format::Wprog => parse_while_program(src),
        Format::Cfg => parse_cfg(src),
    }
}

/// Graph isomorphism mapping `init` to `init`, comparing edge labels by
/// statement text. Backtracking; intended for small graphs.
pub fn isomorphic<S: Scalar>(a: &Program<S>, b: &Program<S>) -> bool {
    let n = a.num_locations();
    if n != b.num_locations() || a.edges.len() != b.edges.len() {
        return false;
    }
    let label = |p: &Program<S>, l: Loc| {
        let mut out: Vec<String> = p.successors(l).map(|e| p.stmts.text(e.1)).collect();
        out.sort();
        let mut inc: Vec<String> = p
            .edges
            .iter()
            .filter(|e| e.2 == l)
            .map(|e| p.stmts.text(e.1))
            .collect();
        inc.sort();
        (out, inc)
    };
    let la: Vec<_> = (0..n).map(|l| label(a, l)).collect();
    let lb: Vec<_> = (0..n).map(|l| label(b, l)).collect();
    let eb: BTreeMap<(Loc, String, Loc), usize> = count(b);
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    map[a.init] = b.init;
    used[b.init] = true;
    if la[a.init] != lb[b.init] {
        return false;
    }
    let order: Vec<Loc> = (0..n).filter(|&l| l != a.init).collect();
    fn go<S: Scalar>(
        k: usize,
        order: &[Loc],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        la: &[(Vec<String>, Vec<String>)],
        lb: &[(Vec<String>, Vec<String>)],
        a: &Program<S>,
        eb: &BTreeMap<(Loc, String, Loc), usize>,
    ) -> bool {
        if k == order.len() {
            let mut ea: BTreeMap<(Loc, String, Loc), usize> = BTreeMap::new();
            for e in &a.edges {
                *ea.entry((map[e.0], a.stmts.text(e.1), map[e.2])).or_default() += 1;
            }
            return ea == *eb;
        }
        let l = order[k];
        for c in 0..map.len() {
            if used[c] || la[l] != lb[c] {
                continue;
            }
            map[l] = c;
            used[c] = true;
            if go(k + 1, order, map, used, la, lb, a, eb) {
                return true;
            }
            used[c] = false;
        }
        map[l] = usize::MAX;
        false
    }
    go(0, &order, &mut map, &mut used, &la, &lb, a, &eb)
}

fn count<S: Scalar>(p: &Program<S>) -> BTreeMap<(Loc, String, Loc), usize> {
    let mut m = BTreeMap::new();
    for e in &p.edges {
        *m.entry((e.0, p.stmts.text(e.1), e.2)).or_default() += 1;
    }
    m
}

#[cfg(test)]
mod tests;
