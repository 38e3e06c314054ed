//! Exact dense-tableau simplex.
//!
//! Two-phase primal simplex with Bland's rule, so every run on the same input
//! pivots identically and terminates. Variables may be free or non-negative;
//! free variables are split internally into a difference of two columns.

use std::collections::BTreeMap;

use crate::linear::Var;
use crate::logic::{Atom, Rel};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Eq,
}

#[derive(Clone, Debug)]
struct Row<S> {
    coeffs: Vec<(usize, S)>,
    kind: RowKind,
    rhs: S,
}

/// `maximize objective·x  s.t.  rows`, over variables `0..num_vars`.
#[derive(Clone, Debug)]
pub struct LinearProgram<S> {
    nonneg: Vec<bool>,
    rows: Vec<Row<S>>,
    objective: Vec<(usize, S)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome<S> {
    Infeasible,
    Unbounded,
    Optimal { point: Vec<S>, value: S },
}

impl<S: Scalar> Default for LinearProgram<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new() -> Self {
        LinearProgram {
            nonneg: Vec::new(),
            rows: Vec::new(),
            objective: Vec::new(),
        }
    }

    pub fn add_var(&mut self, nonneg: bool) -> usize {
        self.nonneg.push(nonneg);
        self.nonneg.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.nonneg.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// `Σ coeffs ≤ rhs` or `Σ coeffs = rhs`.
    pub fn add_row(&mut self, coeffs: Vec<(usize, S)>, kind: RowKind, rhs: S) {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.nonneg.len()));
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        self.rows.push(Row { coeffs, kind, rhs });
    }

    pub fn set_objective(&mut self, objective: Vec<(usize, S)>) {
        self.objective = objective;
    }

    pub fn solve(&self) -> LpOutcome<S> {
        // Column layout: per variable one (non-negative) or two (free) columns,
        // then one slack per Le row, then one artificial per row.
        let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(self.nonneg.len());
        let mut ncols = 0;
        for &nn in &self.nonneg {
            if nn {
                col_of.push((ncols, None));
                ncols += 1;
            } else {
                col_of.push((ncols, Some(ncols + 1)));
                ncols += 2;
            }
        }
        let mut slack_col = vec![None; self.rows.len()];
        for (i, r) in self.rows.iter().enumerate() {
            if r.kind == RowKind::Le {
                slack_col[i] = Some(ncols);
                ncols += 1;
            }
        }
        let first_art = ncols;
        let m = self.rows.len();
        ncols += m;

        let mut a = vec![vec![S::zero(); ncols + 1]; m];
        for (i, r) in self.rows.iter().enumerate() {
            let row = &mut a[i];
            for (j, c) in &r.coeffs {
                let (p, n) = col_of[*j];
                row[p] = row[p].clone() + c.clone();
                if let Some(n) = n {
                    row[n] = row[n].clone() - c.clone();
                }
            }
            if let Some(s) = slack_col[i] {
                row[s] = S::one();
            }
            row[ncols] = r.rhs.clone();
            if row[ncols].is_negative() {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
            }
            row[first_art + i] = S::one();
        }
        let mut tab = Tableau {
            a,
            basis: (0..m).map(|i| first_art + i).collect(),
            ncols,
        };

        let mut phase1 = vec![S::zero(); ncols];
        for c in phase1.iter_mut().skip(first_art) {
            *c = -S::one();
        }
        let all = vec![true; ncols];
        tab.maximize(&phase1, &all)
            .expect("phase one is bounded by construction");
        if tab.objective_value(&phase1).is_negative() {
            return LpOutcome::Infeasible;
        }
        tab.drive_out_artificials(first_art);

        let mut cost = vec![S::zero(); ncols];
        for (j, c) in &self.objective {
            let (p, n) = col_of[*j];
            cost[p] = cost[p].clone() + c.clone();
            if let Some(n) = n {
                cost[n] = cost[n].clone() - c.clone();
            }
        }
        let allowed: Vec<bool> = (0..ncols).map(|j| j < first_art).collect();
        if tab.maximize(&cost, &allowed).is_err() {
            return LpOutcome::Unbounded;
        }
        let values = tab.column_values();
        let point = col_of
            .iter()
            .map(|(p, n)| match n {
                None => values[*p].clone(),
                Some(n) => values[*p].clone() - values[*n].clone(),
            })
            .collect();
        LpOutcome::Optimal {
            point,
            value: tab.objective_value(&cost),
        }
    }
}

struct Tableau<S> {
    a: Vec<Vec<S>>,
    basis: Vec<usize>,
    ncols: usize,
}

#[derive(Debug)]
struct Unbounded;

impl<S: Scalar> Tableau<S> {
    fn rhs(&self, i: usize) -> &S {
        &self.a[i][self.ncols]
    }

    fn objective_value(&self, cost: &[S]) -> S {
        let mut v = S::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() {
                v = v + cost[b].clone() * self.rhs(i).clone();
            }
        }
        v
    }

    fn column_values(&self) -> Vec<S> {
        let mut vals = vec![S::zero(); self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            vals[b] = self.rhs(i).clone();
        }
        vals
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c].clone();
        if !p.is_one() {
            for x in self.a[r].iter_mut() {
                if !x.is_zero() {
                    *x = x.clone() / p.clone();
                }
            }
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(pivot_row.iter()) {
                if !y.is_zero() {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
        }
        self.basis[r] = c;
    }

    fn maximize(&mut self, cost: &[S], allowed: &[bool]) -> Result<(), Unbounded> {
        loop {
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.a[i][j].is_zero() {
                        reduced = reduced - cost[b].clone() * self.a[i][j].clone();
                    }
                }
                if reduced.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, S)> = None;
            for i in 0..self.a.len() {
                let coef = &self.a[i][c];
                if !coef.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i).clone() / coef.clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return Err(Unbounded),
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn drive_out_artificials(&mut self, first_art: usize) {
        let mut i = 0;
        while i < self.a.len() {
            if self.basis[i] >= first_art {
                let col = (0..first_art).find(|&j| !self.a[i][j].is_zero());
                match col {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        // Redundant row.
                        self.a.remove(i);
                        self.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }
}

/// Exact rational feasibility of a conjunction of atoms over free variables.
///
/// Strict atoms are handled by maximizing a shared slack `ε ∈ [0, 1]`; the
/// system is feasible iff the optimum is positive.
pub fn lp_feasible<S: Scalar>(constraints: &[Atom<S>]) -> Option<BTreeMap<Var, S>> {
    let mut index: BTreeMap<Var, usize> = BTreeMap::new();
    for a in constraints {
        for v in a.term().vars() {
            let n = index.len();
            index.entry(v.clone()).or_insert(n);
        }
    }
    let mut lp = LinearProgram::new();
    for _ in 0..index.len() {
        lp.add_var(false);
    }
    let strict = constraints.iter().any(|a| a.rel() == Rel::Lt);
    let eps = if strict { Some(lp.add_var(true)) } else { None };
    for a in constraints {
        let t = a.term();
        let mut coeffs: Vec<(usize, S)> =
            t.coeffs().iter().map(|(v, c)| (index[v], c.clone())).collect();
        let rhs = -t.constant_part().clone();
        match a.rel() {
            Rel::Le => lp.add_row(coeffs, RowKind::Le, rhs),
            Rel::Eq => lp.add_row(coeffs, RowKind::Eq, rhs),
            Rel::Lt => {
                coeffs.push((eps.expect("strict slack"), S::one()));
                lp.add_row(coeffs, RowKind::Le, rhs);
            }
        }
    }
    if let Some(e) = eps {
        lp.add_row(vec![(e, S::one())], RowKind::Le, S::one());
        lp.set_objective(vec![(e, S::one())]);
    }
    match lp.solve() {
        LpOutcome::Optimal { point, value } => {
            if eps.is_some() && !value.is_positive() {
                return None;
            }
            Some(
                index
                    .into_iter()
                    .map(|(v, j)| (v, point[j].clone()))
                    .collect(),
            )
        }
        LpOutcome::Unbounded => unreachable!("pure feasibility problems are bounded"),
        LpOutcome::Infeasible => None,
    }
}
