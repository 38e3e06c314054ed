//! Linear expressions and guard conditions, shared by both input formats.

use crate::frontend::lexer::{Cursor, Tok};
use crate::frontend::FrontendError;
use crate::linear::{LinearTerm, Var, OLDRNK};
use crate::logic::{Atom, Cube, Normalized, RankMode};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub enum Cond<S> {
    True,
    False,
    /// `term op 0`
    Cmp(LinearTerm<S>, CmpOp),
    And(Vec<Cond<S>>),
    Or(Vec<Cond<S>>),
    Not(Box<Cond<S>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
    Ne,
}

impl CmpOp {
    fn negate(self) -> Self {
        match self {
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
        }
    }
}

pub fn variable(cur: &mut Cursor, allow_oldrnk: bool) -> Result<Var, FrontendError> {
    let (line, col) = cur.here();
    let name = cur.expect_ident()?;
    check_name(&name, allow_oldrnk, line, col)?;
    Ok(Var::new(&name))
}

pub fn check_name(name: &str, allow_oldrnk: bool, line: usize, col: usize) -> Result<(), FrontendError> {
    if name == OLDRNK && !allow_oldrnk {
        return Err(FrontendError::Reserved { line, col });
    }
    if is_keyword(name) {
        return Err(FrontendError::syntax(line, col, &format!("'{}' is a keyword", name)));
    }
    Ok(())
}

fn is_keyword(s: &str) -> bool {
    matches!(
        s,
        "program" | "int" | "while" | "if" | "else" | "assume" | "havoc" | "skip" | "true" | "false"
            | "init" | "var" | "loc"
    )
}

pub fn linexpr<S: Scalar>(cur: &mut Cursor, allow_oldrnk: bool) -> Result<LinearTerm<S>, FrontendError> {
    let mut t = term(cur, allow_oldrnk)?;
    loop {
        if cur.eat_sym("+") {
            t = t.add(&term(cur, allow_oldrnk)?);
        } else if cur.at_sym("-") {
            cur.next();
            t = t.sub(&term(cur, allow_oldrnk)?);
        } else {
            return Ok(t);
        }
    }
}

fn term<S: Scalar>(cur: &mut Cursor, allow_oldrnk: bool) -> Result<LinearTerm<S>, FrontendError> {
    let mut t = unary(cur, allow_oldrnk)?;
    loop {
        let (line, col) = cur.here();
        if cur.eat_sym("*") {
            let r = unary(cur, allow_oldrnk)?;
            t = if t.is_constant() {
                r.scale(t.constant_part())
            } else if r.is_constant() {
                t.scale(r.constant_part())
            } else {
                return Err(FrontendError::Nonlinear { line, col });
            };
        } else if cur.eat_sym("/") {
            let r: LinearTerm<S> = unary(cur, allow_oldrnk)?;
            if !r.is_constant() {
                return Err(FrontendError::Nonlinear { line, col });
            }
            if r.constant_part().is_zero() {
                return Err(FrontendError::syntax(line, col, "division by zero"));
            }
            t = t.scale(&(S::one() / r.constant_part().clone()));
        } else {
            return Ok(t);
        }
    }
}

fn unary<S: Scalar>(cur: &mut Cursor, allow_oldrnk: bool) -> Result<LinearTerm<S>, FrontendError> {
    if cur.eat_sym("-") {
        return Ok(unary(cur, allow_oldrnk)?.negate());
    }
    if cur.eat_sym("+") {
        return unary(cur, allow_oldrnk);
    }
    match cur.peek().clone() {
        Tok::Num(n) => {
            let (line, col) = cur.here();
            cur.next();
            let v = n
                .parse::<S>()
                .map_err(|_| FrontendError::syntax(line, col, "bad number"))?;
            Ok(LinearTerm::constant(v))
        }
        Tok::Ident(_) => Ok(LinearTerm::var(variable(cur, allow_oldrnk)?)),
        Tok::Sym("(") => {
            cur.next();
            let t = linexpr(cur, allow_oldrnk)?;
            cur.expect_sym(")")?;
            Ok(t)
        }
        _ => Err(cur.error("expected expression")),
    }
}

pub fn cond<S: Scalar>(cur: &mut Cursor) -> Result<Cond<S>, FrontendError> {
    let mut parts = vec![conj(cur)?];
    while cur.eat_sym("||") {
        parts.push(conj(cur)?);
    }
    Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Cond::Or(parts) })
}

fn conj<S: Scalar>(cur: &mut Cursor) -> Result<Cond<S>, FrontendError> {
    let mut parts = vec![neg(cur)?];
    while cur.eat_sym("&&") {
        parts.push(neg(cur)?);
    }
    Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Cond::And(parts) })
}

fn neg<S: Scalar>(cur: &mut Cursor) -> Result<Cond<S>, FrontendError> {
    if cur.eat_sym("!") {
        return Ok(Cond::Not(Box::new(neg(cur)?)));
    }
    if cur.eat_kw("true") {
        return Ok(Cond::True);
    }
    if cur.eat_kw("false") {
        return Ok(Cond::False);
    }
    if cur.at_sym("(") {
        // Either a parenthesized condition or an arithmetic operand.
        let mark = cur.mark();
        cur.next();
        if let Ok(c) = cond(cur) {
            if cur.eat_sym(")") && !at_relop(cur) && !at_arith(cur) {
                return Ok(c);
            }
        }
        cur.reset(mark);
    }
    comparison(cur)
}

fn at_relop(cur: &Cursor) -> bool {
    ["<=", ">=", "==", "!=", "<", ">"].iter().any(|s| cur.at_sym(s))
}

fn at_arith(cur: &Cursor) -> bool {
    ["+", "-", "*", "/"].iter().any(|s| cur.at_sym(s))
}

fn comparison<S: Scalar>(cur: &mut Cursor) -> Result<Cond<S>, FrontendError> {
    let lhs = linexpr(cur, false)?;
    let op = match cur.peek() {
        Tok::Sym("<=") => CmpOp::Le,
        Tok::Sym("<") => CmpOp::Lt,
        Tok::Sym(">=") => CmpOp::Ge,
        Tok::Sym(">") => CmpOp::Gt,
        Tok::Sym("==") => CmpOp::Eq,
        Tok::Sym("!=") => CmpOp::Ne,
        _ => return Err(cur.error("expected comparison operator")),
    };
    cur.next();
    let rhs = linexpr(cur, false)?;
    Ok(Cond::Cmp(lhs.sub(&rhs), op))
}

/// Disjunctive normal form over integer-tightened atoms. Each disjunct is a
/// non-false cube; the empty list means `false`.
pub fn dnf<S: Scalar>(c: &Cond<S>) -> Vec<Cube<S>> {
    let mut out: Vec<Cube<S>> = Vec::new();
    for atoms in dnf_atoms(c, false) {
        let mut tight = Vec::new();
        let mut dead = false;
        for a in atoms {
            match a.tighten_integer() {
                Normalized::True => {}
                Normalized::False => dead = true,
                Normalized::Atom(a) => tight.push(a),
            }
        }
        if dead {
            continue;
        }
        let cube = Cube::new(tight, RankMode::Absent);
        if !cube.is_falsum() && !out.contains(&cube) {
            out.push(cube);
        }
    }
    out
}

fn cmp_atoms<S: Scalar>(t: &LinearTerm<S>, op: CmpOp) -> Vec<Vec<Atom<S>>> {
    match op {
        CmpOp::Le => vec![vec![Atom::le(t.clone())]],
        CmpOp::Lt => vec![vec![Atom::lt(t.clone())]],
        CmpOp::Ge => vec![vec![Atom::le(t.negate())]],
        CmpOp::Gt => vec![vec![Atom::lt(t.negate())]],
        CmpOp::Eq => vec![vec![Atom::eq(t.clone())]],
        CmpOp::Ne => vec![vec![Atom::lt(t.clone())], vec![Atom::lt(t.negate())]],
    }
}

fn dnf_atoms<S: Scalar>(c: &Cond<S>, negated: bool) -> Vec<Vec<Atom<S>>> {
    match (c, negated) {
        (Cond::True, false) | (Cond::False, true) => vec![vec![]],
        (Cond::True, true) | (Cond::False, false) => vec![],
        (Cond::Cmp(t, op), n) => cmp_atoms(t, if n { op.negate() } else { *op }),
        (Cond::Not(inner), n) => dnf_atoms(inner, !n),
        (Cond::And(parts), false) | (Cond::Or(parts), true) => {
            let mut acc: Vec<Vec<Atom<S>>> = vec![vec![]];
            for p in parts {
                let d = dnf_atoms(p, negated);
                let mut next = Vec::new();
                for a in &acc {
                    for b in &d {
                        next.push(a.iter().chain(b.iter()).cloned().collect());
                    }
                }
                acc = next;
            }
            acc
        }
        (Cond::Or(parts), false) | (Cond::And(parts), true) => {
            parts.iter().flat_map(|p| dnf_atoms(p, negated)).collect()
        }
    }
}

/// A conjunction as written in `.cfg` guards; must not be disjunctive.
pub fn guard_cube<S: Scalar>(cur: &mut Cursor) -> Result<Cube<S>, FrontendError> {
    let (line, col) = cur.here();
    let c = cond(cur)?;
    let mut d = dnf(&c);
    match d.len() {
        0 => Ok(Cube::falsum()),
        1 => Ok(d.pop().unwrap()),
        _ => Err(FrontendError::syntax(line, col, "guard must be a conjunction")),
    }
}
