//! Two-phase dense tableau simplex with Bland's rule.
//!
//! Problems are small (tens of variables), so a dense tableau is used in both
//! modes. In exact mode Bland's rule guarantees termination; in float mode the
//! same pivoting rule is applied with every sign test made against ε.
//!
//! An infeasible system yields a Farkas certificate read off the phase-1 duals.

use std::cmp::Ordering;

use serde::Serialize;

use super::linalg::{dot_slices, Vector};
use super::polytope::HalfSpace;
use super::scalar::{scalar_serde, Scalar};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// `coeffs · x (rel) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint<S> {
    pub coeffs: Vec<S>,
    pub relation: Relation,
    pub rhs: S,
}

impl<S: Scalar> LinearConstraint<S> {
    pub fn le(coeffs: Vec<S>, rhs: S) -> Self {
        LinearConstraint { coeffs, relation: Relation::Le, rhs }
    }

    pub fn eq(coeffs: Vec<S>, rhs: S) -> Self {
        LinearConstraint { coeffs, relation: Relation::Eq, rhs }
    }

    pub fn ge(coeffs: Vec<S>, rhs: S) -> Self {
        LinearConstraint { coeffs, relation: Relation::Ge, rhs }
    }

    pub fn from_halfspace(h: &HalfSpace<S>) -> Self {
        Self::le(h.normal.coords().to_vec(), h.offset.clone())
    }

    pub fn is_satisfied(&self, x: &[S]) -> bool {
        let lhs = dot_slices(&self.coeffs, x);
        match self.relation {
            Relation::Le => lhs.le_tol(&self.rhs),
            Relation::Ge => lhs.ge_tol(&self.rhs),
            Relation::Eq => lhs.approx_eq(&self.rhs),
        }
    }
}

/// Nonnegative multipliers (sign-free on equalities) whose combination of the
/// constraints reads `0 ≥ c` with `c > 0`, i.e. `yᵀA` vanishes on free
/// variables, is nonnegative on sign-restricted ones, and `yᵀb < 0`.
///
/// Sign convention per row: `Le` rows carry `y ≥ 0`, `Ge` rows `y ≤ 0`, `Eq`
/// rows are free.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct FarkasCertificate<S: Scalar> {
    #[serde(with = "scalar_serde::vec")]
    pub multipliers: Vec<S>,
}

impl<S: Scalar> FarkasCertificate<S> {
    /// Checks the certificate against the system it claims to refute.
    pub fn verify(&self, constraints: &[LinearConstraint<S>], nonneg: &[bool]) -> bool {
        if self.multipliers.len() != constraints.len() {
            return false;
        }
        for (y, c) in self.multipliers.iter().zip(constraints) {
            let ok = match c.relation {
                Relation::Le => !y.is_negative(),
                Relation::Ge => !y.is_positive(),
                Relation::Eq => true,
            };
            if !ok {
                return false;
            }
        }
        for (j, &nn) in nonneg.iter().enumerate() {
            let mut col = S::zero();
            for (y, c) in self.multipliers.iter().zip(constraints) {
                col += &(y.clone() * &c.coeffs[j]);
            }
            let ok = if nn { !col.is_negative() } else { col.is_zero() };
            if !ok {
                return false;
            }
        }
        let mut rhs = S::zero();
        for (y, c) in self.multipliers.iter().zip(constraints) {
            rhs += &(y.clone() * &c.rhs);
        }
        rhs.is_negative()
    }
}

/// Maximize `objective · x` subject to constraints; `nonneg[j]` restricts `x_j ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram<S> {
    pub num_vars: usize,
    pub nonneg: Vec<bool>,
    pub constraints: Vec<LinearConstraint<S>>,
    pub objective: Option<Vec<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<S: Scalar> {
    Optimal { point: Vec<S>, value: S },
    Infeasible(FarkasCertificate<S>),
    Unbounded,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, nonneg: vec![false; num_vars], constraints: Vec::new(), objective: None }
    }

    pub fn nonnegative(num_vars: usize) -> Self {
        LinearProgram { num_vars, nonneg: vec![true; num_vars], constraints: Vec::new(), objective: None }
    }

    pub fn push(&mut self, c: LinearConstraint<S>) -> &mut Self {
        self.constraints.push(c);
        self
    }

    pub fn maximize(&mut self, objective: Vec<S>) -> &mut Self {
        self.objective = Some(objective);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.nonneg.len() != self.num_vars {
            return Err(Error::MalformedConstraint("sign vector length differs from variable count".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.num_vars {
                return Err(Error::MalformedConstraint(format!(
                    "constraint {i} has {} coefficients, expected {}",
                    c.coeffs.len(),
                    self.num_vars
                )));
            }
        }
        if let Some(obj) = &self.objective {
            if obj.len() != self.num_vars {
                return Err(Error::MalformedConstraint("objective length differs from variable count".into()));
            }
        }
        Ok(())
    }

    pub fn solve(&self) -> Result<LpOutcome<S>> {
        self.validate()?;
        Ok(Simplex::build(self).run(self))
    }
}

/// Column of the standard-form problem and where it came from.
#[derive(Clone, Copy)]
enum Column {
    /// `sign * x_var`
    Var { var: usize, negated: bool },
    Slack,
    Artificial,
}

struct Simplex<S> {
    /// m rows of `ncols + 1` entries; the last entry is the right-hand side.
    rows: Vec<Vec<S>>,
    /// Reduced costs for maximization plus `-z` in the last slot.
    obj: Vec<S>,
    basis: Vec<usize>,
    columns: Vec<Column>,
    /// Row sign flips applied so every rhs starts nonnegative.
    flips: Vec<bool>,
    /// Original row index of each tableau row (rows may be dropped as redundant).
    origin: Vec<usize>,
    first_artificial: usize,
}

impl<S: Scalar> Simplex<S> {
    fn build(lp: &LinearProgram<S>) -> Self {
        let m = lp.constraints.len();
        let mut columns = Vec::new();
        for j in 0..lp.num_vars {
            columns.push(Column::Var { var: j, negated: false });
            if !lp.nonneg[j] {
                columns.push(Column::Var { var: j, negated: true });
            }
        }
        let slack_rows: Vec<usize> =
            (0..m).filter(|&i| lp.constraints[i].relation != Relation::Eq).collect();
        let first_slack = columns.len();
        columns.extend(slack_rows.iter().map(|_| Column::Slack));
        let first_artificial = columns.len();
        columns.extend((0..m).map(|_| Column::Artificial));
        let ncols = columns.len();

        let mut rows = Vec::with_capacity(m);
        let mut flips = Vec::with_capacity(m);
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![S::zero(); ncols + 1];
            for (k, col) in columns[..first_slack].iter().enumerate() {
                if let Column::Var { var, negated } = *col {
                    row[k] = if negated { -c.coeffs[var].clone() } else { c.coeffs[var].clone() };
                }
            }
            if let Some(pos) = slack_rows.iter().position(|&r| r == i) {
                row[first_slack + pos] = match c.relation {
                    Relation::Le => S::one(),
                    _ => -S::one(),
                };
            }
            row[ncols] = c.rhs.clone();
            let flip = c.rhs.is_negative();
            if flip {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
            }
            row[first_artificial + i] = S::one();
            rows.push(row);
            flips.push(flip);
        }

        // Phase 1 maximizes -Σ artificials; reduced costs are the column sums.
        let mut obj = vec![S::zero(); ncols + 1];
        for row in &rows {
            for (k, v) in row.iter().enumerate() {
                if k < first_artificial || k == ncols {
                    obj[k] += v;
                }
            }
        }
        Simplex {
            rows,
            obj,
            basis: (first_artificial..first_artificial + m).collect(),
            columns,
            flips,
            origin: (0..m).collect(),
            first_artificial,
        }
    }

    fn ncols(&self) -> usize {
        self.columns.len()
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let p = self.rows[r][e].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        // Subtracting f·0 is a no-op, so only the pivot row's support matters.
        let support: Vec<usize> = (0..pivot_row.len()).filter(|&j| pivot_row[j] != S::zero()).collect();
        let eliminate = |row: &mut Vec<S>| {
            let f = row[e].clone();
            if f == S::zero() {
                return;
            }
            for &j in &support {
                let mut t = f.clone();
                t *= &pivot_row[j];
                row[j] -= &t;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = e;
    }

    /// Runs Bland-rule iterations over columns `< limit`. Returns false if unbounded.
    fn iterate(&mut self, limit: usize) -> bool {
        let n = self.ncols();
        loop {
            let Some(e) = (0..limit).find(|&j| self.obj[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, S)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[e].is_positive() {
                    continue;
                }
                let ratio = row[n].clone() / &row[e];
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => match ratio.cmp_tol(&br) {
                        Ordering::Less => Some((i, ratio)),
                        Ordering::Equal if self.basis[i] < self.basis[bi] => Some((i, ratio)),
                        _ => Some((bi, br)),
                    },
                };
            }
            match best {
                Some((r, _)) => self.pivot(r, e),
                None => return false,
            }
        }
    }

    fn run(mut self, lp: &LinearProgram<S>) -> LpOutcome<S> {
        let n = self.ncols();
        self.iterate(self.first_artificial);

        // obj[n] holds -z for the phase-1 objective z = -Σ artificials.
        let phase1 = -self.obj[n].clone();
        if phase1.is_negative() {
            return LpOutcome::Infeasible(self.farkas(lp));
        }

        self.evict_artificials();

        // Phase 2 over the original columns only.
        let limit = self.first_artificial;
        let costs: Vec<S> = (0..limit)
            .map(|k| match (self.columns[k], &lp.objective) {
                (Column::Var { var, negated }, Some(obj)) => {
                    if negated {
                        -obj[var].clone()
                    } else {
                        obj[var].clone()
                    }
                }
                _ => S::zero(),
            })
            .collect();
        let mut obj = vec![S::zero(); n + 1];
        obj[..limit].clone_from_slice(&costs);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = if b < limit { costs[b].clone() } else { S::zero() };
            if cb.is_zero() && S::MODE == super::Mode::Exact {
                continue;
            }
            for j in 0..=n {
                let mut t = cb.clone();
                t *= &row[j];
                obj[j] -= &t;
            }
        }
        for v in obj[limit..n].iter_mut() {
            *v = S::zero();
        }
        self.obj = obj;
        if !self.iterate(limit) {
            return LpOutcome::Unbounded;
        }

        let mut point = vec![S::zero(); lp.num_vars];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if let Column::Var { var, negated } = self.columns[b] {
                if negated {
                    point[var] -= &row[n];
                } else {
                    point[var] += &row[n];
                }
            }
        }
        let value = match &lp.objective {
            Some(obj) => dot_slices(obj, &point),
            None => S::zero(),
        };
        LpOutcome::Optimal { point, value }
    }

    /// Pivots basic artificials (all at zero) out of the basis; drops rows that
    /// are redundant.
    fn evict_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.first_artificial {
                match (0..self.first_artificial).find(|&j| !self.rows[r][j].is_zero()) {
                    Some(e) => self.pivot(r, e),
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                        self.flips.remove(r);
                        self.origin.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    /// Phase-1 duals: for artificial column i (cost -1), reduced cost d = -1 - yᵢ.
    fn farkas(&self, lp: &LinearProgram<S>) -> FarkasCertificate<S> {
        let m = lp.constraints.len();
        let multipliers = (0..m)
            .map(|i| {
                let y = -S::one() - &self.obj[self.first_artificial + i];
                if self.flips[i] {
                    -y
                } else {
                    y
                }
            })
            .collect();
        FarkasCertificate { multipliers }
    }
}

/// Verdict of [`lp_feasible`].
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility<S: Scalar> {
    Feasible(Vector<S>),
    Infeasible(FarkasCertificate<S>),
}

impl<S: Scalar> Feasibility<S> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Feasibility of a system of inequalities and equalities over free variables.
pub fn lp_feasible<S: Scalar>(constraints: &[LinearConstraint<S>], dim: usize) -> Result<Feasibility<S>> {
    if dim == 0 {
        return Err(Error::MalformedConstraint("dimension must be at least 1".into()));
    }
    let mut lp = LinearProgram::new(dim);
    lp.constraints = constraints.to_vec();
    match lp.solve()? {
        LpOutcome::Optimal { point, .. } => Ok(Feasibility::Feasible(Vector::new(point))),
        LpOutcome::Infeasible(cert) => Ok(Feasibility::Infeasible(cert)),
        LpOutcome::Unbounded => unreachable!("feasibility problems have no objective"),
    }
}
