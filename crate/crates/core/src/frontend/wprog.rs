//! The `.wprog` while-language and its lowering to a control-flow graph.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use crate::frontend::expr::{self, dnf, Cond};
use crate::frontend::lexer::{lex, Cursor};
use crate::frontend::FrontendError;
use crate::linear::{LinearTerm, Var};
use crate::logic::{Cube, RankMode};
use crate::program::{Edge, Loc, Program, Statement, StatementTable};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
enum Stmt<S> {
    Assign(Var, LinearTerm<S>),
    Havoc(Var),
    Assume(Cond<S>),
    Skip,
    While(Cond<S>, Vec<Stmt<S>>),
    If(Cond<S>, Vec<Stmt<S>>, Vec<Stmt<S>>),
}

struct Parser {
    cur: Cursor,
    declared: Vec<Var>,
}

impl Parser {
    fn program<S: Scalar>(&mut self) -> Result<(String, Vec<Stmt<S>>), FrontendError> {
        self.cur.expect_kw("program")?;
        let name = self.cur.expect_ident()?;
        self.cur.expect_sym("(")?;
        if !self.cur.at_sym(")") {
            loop {
                self.cur.expect_kw("int")?;
                let v = expr::variable(&mut self.cur, false)?;
                self.declare(v);
                if !self.cur.eat_sym(",") {
                    break;
                }
            }
        }
        self.cur.expect_sym(")")?;
        self.cur.eat_sym(";");
        let body = self.block()?;
        if !self.cur.at_eof() {
            return Err(self.cur.error("expected end of input"));
        }
        Ok((name, body))
    }

    fn declare(&mut self, v: Var) {
        if !self.declared.contains(&v) {
            self.declared.push(v);
        }
    }

    fn block<S: Scalar>(&mut self) -> Result<Vec<Stmt<S>>, FrontendError> {
        self.cur.expect_sym("{")?;
        let mut out = Vec::new();
        while !self.cur.eat_sym("}") {
            if self.cur.at_eof() {
                return Err(self.cur.error("expected '}'"));
            }
            self.statement(&mut out)?;
        }
        Ok(out)
    }

    fn paren_cond<S: Scalar>(&mut self) -> Result<Cond<S>, FrontendError> {
        self.cur.expect_sym("(")?;
        let c = expr::cond(&mut self.cur)?;
        self.cur.expect_sym(")")?;
        Ok(c)
    }

    fn statement<S: Scalar>(&mut self, out: &mut Vec<Stmt<S>>) -> Result<(), FrontendError> {
        let c = &mut self.cur;
        if c.eat_kw("while") {
            let g = self.paren_cond()?;
            let body = self.block()?;
            out.push(Stmt::While(g, body));
        } else if c.eat_kw("if") {
            let g = self.paren_cond()?;
            let then = self.block()?;
            let els = if self.cur.eat_kw("else") {
                if self.cur.at_kw("if") {
                    let mut v = Vec::new();
                    self.statement(&mut v)?;
                    v
                } else {
                    self.block()?
                }
            } else {
                Vec::new()
            };
            out.push(Stmt::If(g, then, els));
        } else if c.eat_kw("assume") {
            let g = self.paren_cond()?;
            self.cur.expect_sym(";")?;
            out.push(Stmt::Assume(g));
        } else if c.eat_kw("havoc") {
            let v = expr::variable(c, false)?;
            self.cur.expect_sym(";")?;
            out.push(Stmt::Havoc(v));
        } else if c.eat_kw("skip") {
            self.cur.expect_sym(";")?;
            out.push(Stmt::Skip);
        } else if c.eat_kw("int") {
            loop {
                let v = expr::variable(&mut self.cur, false)?;
                self.declare(v.clone());
                if self.cur.eat_sym(":=") || self.cur.eat_sym("=") {
                    let e = expr::linexpr(&mut self.cur, false)?;
                    out.push(Stmt::Assign(v, e));
                }
                if !self.cur.eat_sym(",") {
                    break;
                }
            }
            self.cur.expect_sym(";")?;
        } else if c.at_sym("{") {
            let inner = self.block()?;
            out.extend(inner);
        } else if c.eat_sym(";") {
        } else {
            let v = expr::variable(c, false)?;
            let stmt = if c.eat_sym("++") {
                Stmt::Assign(v.clone(), LinearTerm::var(v).plus_constant(&S::one()))
            } else if c.eat_sym("--") {
                Stmt::Assign(v.clone(), LinearTerm::var(v).plus_constant(&-S::one()))
            } else if c.eat_sym(":=") || c.eat_sym("=") {
                Stmt::Assign(v, expr::linexpr(c, false)?)
            } else {
                return Err(c.error("expected ':=', '++' or '--'"));
            };
            self.cur.expect_sym(";")?;
            out.push(stmt);
        }
        Ok(())
    }
}

struct Lowering<S> {
    table: StatementTable<S>,
    num_locs: usize,
    edges: Vec<Edge>,
}

impl<S: Scalar> Lowering<S> {
    fn fresh(&mut self) -> Loc {
        self.num_locs += 1;
        self.num_locs - 1
    }

    fn edge(&mut self, from: Loc, st: Statement<S>, to: Loc) {
        let l = self.table.intern(st);
        if !self.edges.contains(&(from, l, to)) {
            self.edges.push((from, l, to));
        }
    }

    fn guard(&mut self, from: Loc, c: &Cond<S>, negated: bool, to: Loc) {
        let c = if negated { Cond::Not(Box::new(c.clone())) } else { c.clone() };
        for cube in dnf(&c) {
            self.edge(from, Statement::Assume(cube), to);
        }
    }

    /// Lowers `stmts` starting at `from`; the last statement ends in `to` if
    /// given. Returns the end location.
    fn seq(&mut self, stmts: &[Stmt<S>], from: Loc, to: Option<Loc>) -> Loc {
        let mut cur = from;
        for (k, s) in stmts.iter().enumerate() {
            let target = if k + 1 == stmts.len() { to } else { None };
            cur = self.stmt(s, cur, target);
        }
        cur
    }

    fn stmt(&mut self, s: &Stmt<S>, from: Loc, to: Option<Loc>) -> Loc {
        let next = |me: &mut Self| to.unwrap_or_else(|| me.fresh());
        match s {
            Stmt::Assign(v, e) => {
                let n = next(self);
                self.edge(from, Statement::Assign(v.clone(), e.clone()), n);
                n
            }
            Stmt::Havoc(v) => {
                let n = next(self);
                self.edge(from, Statement::Havoc(v.clone()), n);
                n
            }
            Stmt::Skip => {
                let n = next(self);
                self.edge(from, Statement::Assume(Cube::top(RankMode::Absent)), n);
                n
            }
            Stmt::Assume(c) => {
                let n = next(self);
                self.guard(from, c, false, n);
                n
            }
            Stmt::While(c, body) => {
                let head = from;
                if body.is_empty() {
                    self.guard(head, c, false, head);
                } else {
                    let mid = self.fresh();
                    self.guard(head, c, false, mid);
                    self.seq(body, mid, Some(head));
                }
                let exit = next(self);
                self.guard(head, c, true, exit);
                exit
            }
            Stmt::If(c, then, els) => {
                let exit = next(self);
                for (branch, negated) in [(then, false), (els, true)] {
                    if branch.is_empty() {
                        self.guard(from, c, negated, exit);
                    } else {
                        let mid = self.fresh();
                        self.guard(from, c, negated, mid);
                        self.seq(branch, mid, Some(exit));
                    }
                }
                exit
            }
        }
    }
}

/// Parses and lowers a `.wprog` source.
pub fn parse_while_program<S: Scalar>(src: &str) -> Result<Program<S>, FrontendError> {
    let mut p = Parser {
        cur: Cursor::new(lex(src)?),
        declared: Vec::new(),
    };
    let (name, body) = p.program::<S>()?;
    let mut low = Lowering {
        table: StatementTable::new(),
        num_locs: 1,
        edges: Vec::new(),
    };
    low.seq(&body, 0, None);
    let (keep, edges) = prune(low.num_locs, 0, &low.edges);
    let mut vars = p.declared;
    let mut prog = Program {
        name,
        vars: Vec::new(),
        locations: (0..keep).map(|i| format!("l{}", i)).collect(),
        init: 0,
        edges,
        stmts: Arc::new(StatementTable::new()),
    };
    // Re-intern only the letters still in use, in edge order.
    let mut table = StatementTable::new();
    for e in prog.edges.iter_mut() {
        e.1 = table.intern(low.table.get(e.1).clone());
    }
    prog.stmts = Arc::new(table);
    for v in prog.all_vars() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    prog.vars = vars;
    Ok(prog)
}

/// Keeps locations reachable from `init` that can reach a cycle, plus
/// `init`; renumbers them in original order.
pub(crate) fn prune(n: usize, init: Loc, edges: &[Edge]) -> (usize, Vec<Edge>) {
    let succ = |l: Loc| edges.iter().filter(move |e| e.0 == l).map(|e| e.2);
    let reach_from = |s: Loc| {
        let mut seen = BTreeSet::from([s]);
        let mut q = VecDeque::from([s]);
        while let Some(l) = q.pop_front() {
            for t in succ(l) {
                if seen.insert(t) {
                    q.push_back(t);
                }
            }
        }
        seen
    };
    let reach: Vec<BTreeSet<Loc>> = (0..n).map(reach_from).collect();
    // on a cycle: some successor reaches back
    let cyclic: BTreeSet<Loc> = (0..n)
        .filter(|&l| succ(l).any(|t| reach[t].contains(&l)))
        .collect();
    let keep: Vec<Loc> = (0..n)
        .filter(|&l| {
            l == init || (reach[init].contains(&l) && reach[l].iter().any(|m| cyclic.contains(m)))
        })
        .collect();
    let renum = |l: Loc| keep.iter().position(|&k| k == l);
    let mut out = Vec::new();
    for e in edges {
        if let (Some(a), Some(b)) = (renum(e.0), renum(e.2)) {
            // the target must itself lead into a cycle
            if reach[e.2].iter().any(|m| cyclic.contains(m)) {
                out.push((a, e.1, b));
            }
        }
    }
    (keep.len(), out)
}
