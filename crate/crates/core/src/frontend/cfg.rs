//! The `.cfg` format: an explicit edge list.
//!
//! ```text
//! var i, j;          // optional
//! init l0;
//! loc l7;            // optional, for locations without outgoing edges
//! l0 -> l1 : assume i >= 1;
//! l1 -> l0 : i := i - 1;
//! ```

use std::collections::BTreeMap;
use std::fmt::Write;
use std::sync::Arc;

use crate::frontend::expr::{self, guard_cube};
use crate::frontend::lexer::{lex, Cursor, Tok};
use crate::frontend::FrontendError;
use crate::linear::{LinearTerm, Var};
use crate::logic::{Atom, Cube, Predicate, RankMode, Rel};
use crate::program::{Loc, Program, Statement, StatementTable};
use crate::scalar::Scalar;

pub fn parse_cfg<S: Scalar>(src: &str) -> Result<Program<S>, FrontendError> {
    let mut cur = Cursor::new(lex(src)?);
    let mut vars: Vec<Var> = Vec::new();
    let mut init: Option<String> = None;
    let mut names: Vec<String> = Vec::new();
    let mut declared: BTreeMap<String, ()> = BTreeMap::new();
    let mut raw_edges: Vec<(String, Statement<S>, String, (usize, usize))> = Vec::new();
    let mut table = StatementTable::new();
    let note = |names: &mut Vec<String>, n: &str| {
        if !names.iter().any(|m| m == n) {
            names.push(n.to_string());
        }
    };
    while !cur.at_eof() {
        if cur.eat_kw("var") {
            loop {
                let v = expr::variable(&mut cur, false)?;
                if !vars.contains(&v) {
                    vars.push(v);
                }
                if !cur.eat_sym(",") {
                    break;
                }
            }
            cur.expect_sym(";")?;
        } else if cur.eat_kw("init") {
            let (line, col) = cur.here();
            let l = cur.expect_ident()?;
            if init.is_some() {
                return Err(FrontendError::DuplicateInit { line, col });
            }
            note(&mut names, &l);
            declared.insert(l.clone(), ());
            init = Some(l);
            cur.expect_sym(";")?;
        } else if cur.eat_kw("loc") {
            loop {
                let l = cur.expect_ident()?;
                note(&mut names, &l);
                declared.insert(l, ());
                if !cur.eat_sym(",") {
                    break;
                }
            }
            cur.expect_sym(";")?;
        } else {
            let src_loc = cur.expect_ident()?;
            cur.expect_sym("->")?;
            let pos = cur.here();
            let dst = cur.expect_ident()?;
            cur.expect_sym(":")?;
            let st = statement(&mut cur)?;
            cur.expect_sym(";")?;
            note(&mut names, &src_loc);
            declared.insert(src_loc.clone(), ());
            raw_edges.push((src_loc, st, dst, pos));
        }
    }
    let init = init.ok_or(FrontendError::MissingInit)?;
    for (_, _, dst, (line, col)) in &raw_edges {
        if !declared.contains_key(dst) {
            return Err(FrontendError::UndeclaredLocation {
                name: dst.clone(),
                line: *line,
                col: *col,
            });
        }
    }
    // init first, then order of first appearance
    names.retain(|n| *n != init);
    names.insert(0, init);
    let index = |n: &str| names.iter().position(|m| m == n).expect("declared") as Loc;
    let mut edges = Vec::new();
    for (s, st, d, _) in raw_edges {
        let e = (index(&s), table.intern(st), index(&d));
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    let mut prog = Program {
        name: String::new(),
        vars: Vec::new(),
        locations: names,
        init: 0,
        edges,
        stmts: Arc::new(table),
    };
    for v in prog.all_vars() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    prog.vars = vars;
    Ok(prog)
}

/// Parses a single statement in its printed form.
pub fn statement<S: Scalar>(cur: &mut Cursor) -> Result<Statement<S>, FrontendError> {
    if cur.eat_kw("assume") {
        return Ok(Statement::Assume(guard_cube(cur)?));
    }
    if cur.eat_kw("havoc") {
        return Ok(Statement::Havoc(expr::variable(cur, false)?));
    }
    let v = expr::variable(cur, false)?;
    cur.expect_sym(":=")?;
    Ok(Statement::Assign(v, expr::linexpr(cur, false)?))
}

pub fn parse_statement<S: Scalar>(text: &str) -> Result<Statement<S>, FrontendError> {
    let mut cur = Cursor::new(lex(text)?);
    let st = statement(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.error("trailing input after statement"));
    }
    Ok(st)
}

pub fn render_cfg<S: Scalar>(p: &Program<S>) -> String {
    let mut out = String::new();
    if !p.vars.is_empty() {
        let names: Vec<&str> = p.vars.iter().map(|v| v.name()).collect();
        let _ = writeln!(out, "var {};", names.join(", "));
    }
    let _ = writeln!(out, "init {};", p.locations[p.init]);
    for (l, name) in p.locations.iter().enumerate() {
        if l != p.init && !p.edges.iter().any(|e| e.0 == l) {
            let _ = writeln!(out, "loc {};", name);
        }
    }
    for &(a, st, b) in &p.edges {
        let _ = writeln!(
            out,
            "{} -> {} : {};",
            p.locations[a],
            p.locations[b],
            p.statement(st)
        );
    }
    out
}

/// Parses a predicate in its printed form, e.g.
/// `{oldrnk == inf || i - j - oldrnk <= -1 && oldrnk >= 0}`.
/// Bounds are taken exactly as written; no integer tightening.
pub fn parse_predicate<S: Scalar>(text: &str) -> Result<Predicate<S>, FrontendError> {
    let mut cur = Cursor::new(lex(text)?);
    let braced = cur.eat_sym("{");
    let mut cubes = Vec::new();
    loop {
        cubes.push(pred_cube(&mut cur)?);
        if !cur.eat_sym("||") {
            break;
        }
    }
    if braced {
        cur.expect_sym("}")?;
    }
    if !cur.at_eof() {
        return Err(cur.error("trailing input after predicate"));
    }
    Ok(Predicate::new(cubes))
}

fn pred_cube<S: Scalar>(cur: &mut Cursor) -> Result<Cube<S>, FrontendError> {
    let mut mode = RankMode::Absent;
    let mut atoms = Vec::new();
    let mut falsum = false;
    loop {
        let is_oldrnk_mode = matches!(cur.peek(), Tok::Ident(s) if s == "oldrnk")
            && matches!(cur.peek_at(2), Tok::Ident(s) if s == "inf");
        if is_oldrnk_mode {
            cur.next();
            mode = match cur.next() {
                Tok::Sym("==") => RankMode::Inf,
                Tok::Sym("<") => RankMode::Finite,
                _ => return Err(cur.error("expected '==' or '<' before inf")),
            };
            cur.next();
        } else if cur.eat_kw("true") {
        } else if cur.eat_kw("false") {
            falsum = true;
        } else {
            let lhs = expr::linexpr::<S>(cur, true)?;
            let rel = match cur.next() {
                Tok::Sym("<=") => (Rel::Le, false),
                Tok::Sym("<") => (Rel::Lt, false),
                Tok::Sym(">=") => (Rel::Le, true),
                Tok::Sym(">") => (Rel::Lt, true),
                Tok::Sym("==") => (Rel::Eq, false),
                _ => return Err(cur.error("expected comparison")),
            };
            let rhs = expr::linexpr::<S>(cur, true)?;
            let t = if rel.1 { rhs.sub(&lhs) } else { lhs.sub(&rhs) };
            atoms.push(Atom::new(t, rel.0));
        }
        if !cur.eat_sym("&&") {
            break;
        }
    }
    if falsum {
        return Ok(Cube::falsum());
    }
    if mode == RankMode::Absent && atoms.iter().any(|a| a.mentions(&Var::oldrnk())) {
        mode = RankMode::Finite;
    }
    Ok(Cube::new(atoms, mode))
}

/// Parses an affine term such as `i - j + 3`.
pub fn parse_linear_term<S: Scalar>(text: &str) -> Result<LinearTerm<S>, FrontendError> {
    let mut cur = Cursor::new(lex(text)?);
    let t = expr::linexpr(&mut cur, false)?;
    if !cur.at_eof() {
        return Err(cur.error("trailing input after term"));
    }
    Ok(t)
}
