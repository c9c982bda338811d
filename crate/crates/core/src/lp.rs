//! Exact rational linear programming.
//!
//! Two-phase primal simplex on a dense tableau with Bland's rule: the
//! entering column is the lowest-indexed one with negative reduced cost and
//! ties in the ratio test go to the lowest-indexed basic column. This
//! cannot cycle, and identical inputs always produce identical results.
//!
//! Variables are mapped to nonnegative columns: a lower bound shifts the
//! variable, an upper bound alone reflects it, a two-sided bound adds a
//! row, and free variables are split into a difference of two columns.

use num_traits::{One, Signed, Zero};

use crate::geometry::Relation;
use crate::rational::{self, Rational};
use crate::system::LinearSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpResult {
    /// `point` assigns every system variable; `value` is the objective there.
    Optimal { point: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

impl LpResult {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpResult::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpResult::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

/// `x = offset + sum sign * column`.
#[derive(Clone, Debug)]
struct VarMap {
    offset: Rational,
    cols: Vec<(usize, bool)>,
}

#[derive(Clone, Debug)]
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, p: usize, e: usize, reduced: Option<&mut Vec<Rational>>) {
        let piv = self.rows[p][e].clone();
        if !piv.is_one() {
            for v in self.rows[p].iter_mut().filter(|v| !v.is_zero()) {
                *v /= &piv;
            }
            self.rhs[p] /= &piv;
        }
        let nz: Vec<usize> = (0..self.rows[p].len())
            .filter(|&c| !self.rows[p][c].is_zero())
            .collect();
        let prow = std::mem::take(&mut self.rows[p]);
        let prhs = self.rhs[p].clone();
        for (r, row) in self.rows.iter_mut().enumerate() {
            if r == p || row[e].is_zero() {
                continue;
            }
            let f = row[e].clone();
            for &c in &nz {
                row[c] -= &f * &prow[c];
            }
            if !prhs.is_zero() {
                self.rhs[r] -= &f * &prhs;
            }
        }
        if let Some(d) = reduced {
            if !d[e].is_zero() {
                let f = d[e].clone();
                for &c in &nz {
                    d[c] -= &f * &prow[c];
                }
            }
        }
        self.rows[p] = prow;
        self.basis[p] = e;
    }

    /// Minimises with reduced costs `d` over columns `< limit`.
    fn run(&mut self, d: &mut Vec<Rational>, limit: usize) -> Outcome {
        loop {
            let Some(e) = (0..limit).find(|&j| d[j].is_negative()) else {
                return Outcome::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[e].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / &row[e];
                let better = match &best {
                    None => true,
                    Some((b, br)) => ratio < *br || (ratio == *br && self.basis[r] < self.basis[*b]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let Some((p, _)) = best else {
                return Outcome::Unbounded;
            };
            self.pivot(p, e, Some(d));
        }
    }

    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut d = cost.to_vec();
        for (r, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            for (c, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    d[c] -= cb * v;
                }
            }
        }
        d
    }
}

/// A system brought to a basic feasible solution once, ready to be
/// optimised for any number of objectives.
#[derive(Clone, Debug)]
pub struct PreparedLp {
    vars: Vec<VarMap>,
    ncols: usize,
    tableau: Option<Tableau>,
}

impl PreparedLp {
    pub fn new(system: &LinearSystem) -> Self {
        let mut ncols = 0usize;
        let mut vars = Vec::with_capacity(system.num_vars());
        // (sparse coefficients, relation, rhs) over columns
        let mut rows: Vec<(Vec<(usize, Rational)>, Relation, Rational)> = Vec::new();
        for v in &system.variables {
            let map = match (&v.lower, &v.upper) {
                (Some(l), Some(u)) if l == u => VarMap {
                    offset: l.clone(),
                    cols: vec![],
                },
                (Some(l), Some(u)) => {
                    let col = ncols;
                    ncols += 1;
                    if u < l {
                        rows.push((vec![], Relation::Le, -Rational::one()));
                    } else {
                        rows.push((vec![(col, Rational::one())], Relation::Le, u - l));
                    }
                    VarMap {
                        offset: l.clone(),
                        cols: vec![(col, true)],
                    }
                }
                (Some(l), None) => {
                    ncols += 1;
                    VarMap {
                        offset: l.clone(),
                        cols: vec![(ncols - 1, true)],
                    }
                }
                (None, Some(u)) => {
                    ncols += 1;
                    VarMap {
                        offset: u.clone(),
                        cols: vec![(ncols - 1, false)],
                    }
                }
                (None, None) => {
                    ncols += 2;
                    VarMap {
                        offset: Rational::zero(),
                        cols: vec![(ncols - 2, true), (ncols - 1, false)],
                    }
                }
            };
            vars.push(map);
        }
        // Bound rows were pushed first; system rows follow in order.
        for row in &system.rows {
            let mut rhs = rational::big(row.rhs.clone());
            let mut coeffs: Vec<(usize, Rational)> = Vec::new();
            for (v, a) in &row.terms {
                let a = rational::big(a.clone());
                let map = &vars[*v];
                rhs -= &a * &map.offset;
                for &(col, positive) in &map.cols {
                    coeffs.push((col, if positive { a.clone() } else { -a.clone() }));
                }
            }
            rows.push((coeffs, row.rel, rhs));
        }

        let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_real = ncols + n_slack;
        let m = rows.len();
        let mut tab = Tableau {
            rows: Vec::with_capacity(m),
            rhs: Vec::with_capacity(m),
            basis: Vec::with_capacity(m),
        };
        let mut artificial_rows = Vec::new();
        let mut next_slack = ncols;
        for (coeffs, rel, rhs) in rows {
            let mut dense = vec![Rational::zero(); n_real];
            for (c, a) in coeffs {
                dense[c] += a;
            }
            let slack = match rel {
                Relation::Le => Some((next_slack, Rational::one())),
                Relation::Ge => Some((next_slack, -Rational::one())),
                Relation::Eq => None,
            };
            if let Some((s, a)) = &slack {
                dense[*s] = a.clone();
                next_slack += 1;
            }
            let (dense, rhs) = if rhs.is_negative() {
                (dense.into_iter().map(|v| -v).collect::<Vec<_>>(), -rhs)
            } else {
                (dense, rhs)
            };
            match slack {
                Some((s, _)) if dense[s].is_one() => tab.basis.push(s),
                _ => {
                    artificial_rows.push(tab.rows.len());
                    tab.basis.push(usize::MAX);
                }
            }
            tab.rows.push(dense);
            tab.rhs.push(rhs);
        }

        let n_art = artificial_rows.len();
        let total = n_real + n_art;
        for row in &mut tab.rows {
            row.resize(total, Rational::zero());
        }
        for (k, &r) in artificial_rows.iter().enumerate() {
            tab.rows[r][n_real + k] = Rational::one();
            tab.basis[r] = n_real + k;
        }

        if n_art > 0 {
            let mut cost = vec![Rational::zero(); total];
            for c in cost.iter_mut().skip(n_real) {
                *c = Rational::one();
            }
            let mut d = tab.reduced_costs(&cost);
            // Phase one is bounded below by zero.
            let _ = tab.run(&mut d, total);
            let infeasible = tab
                .basis
                .iter()
                .zip(&tab.rhs)
                .any(|(&b, v)| b >= n_real && !v.is_zero());
            if infeasible {
                return PreparedLp {
                    vars,
                    ncols: n_real,
                    tableau: None,
                };
            }
            let mut r = 0;
            while r < tab.rows.len() {
                if tab.basis[r] >= n_real {
                    if let Some(j) = (0..n_real).find(|&j| !tab.rows[r][j].is_zero()) {
                        tab.pivot(r, j, None);
                        r += 1;
                    } else {
                        tab.rows.remove(r);
                        tab.rhs.remove(r);
                        tab.basis.remove(r);
                    }
                } else {
                    r += 1;
                }
            }
            for row in &mut tab.rows {
                row.truncate(n_real);
            }
        }
        PreparedLp {
            vars,
            ncols: n_real,
            tableau: Some(tab),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.tableau.is_some()
    }

    /// The basic feasible point found by phase one.
    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        self.tableau.as_ref().map(|t| self.extract(t))
    }

    fn extract(&self, tab: &Tableau) -> Vec<Rational> {
        let mut col = vec![Rational::zero(); self.ncols];
        for (r, &b) in tab.basis.iter().enumerate() {
            col[b] = tab.rhs[r].clone();
        }
        self.vars
            .iter()
            .map(|m| {
                m.cols.iter().fold(m.offset.clone(), |acc, &(c, positive)| {
                    if positive {
                        acc + &col[c]
                    } else {
                        acc - &col[c]
                    }
                })
            })
            .collect()
    }

    /// Optimises `sum coef * var` in the given sense.
    pub fn solve(&self, objective: &[(usize, Rational)], sense: Sense) -> LpResult {
        let Some(tab) = &self.tableau else {
            return LpResult::Infeasible;
        };
        let mut cost = vec![Rational::zero(); self.ncols];
        for (v, a) in objective {
            let a = match sense {
                Sense::Minimize => a.clone(),
                Sense::Maximize => -a.clone(),
            };
            for &(c, positive) in &self.vars[*v].cols {
                if positive {
                    cost[c] += &a;
                } else {
                    cost[c] -= &a;
                }
            }
        }
        let mut tab = tab.clone();
        let mut d = tab.reduced_costs(&cost);
        match tab.run(&mut d, self.ncols) {
            Outcome::Unbounded => LpResult::Unbounded,
            Outcome::Optimal => {
                let point = self.extract(&tab);
                let value = objective
                    .iter()
                    .fold(Rational::zero(), |acc, (v, a)| acc + a * &point[*v]);
                LpResult::Optimal { point, value }
            }
        }
    }
}

/// Optimises `objective` (pairs of variable index and coefficient) over
/// `system`.
pub fn solve_lp(system: &LinearSystem, objective: &[(usize, Rational)], sense: Sense) -> LpResult {
    PreparedLp::new(system).solve(objective, sense)
}

/// Whether `system` stays feasible after fixing the given variables.
pub fn feasible_with_fixings(system: &LinearSystem, fixings: &[(usize, Rational)]) -> bool {
    PreparedLp::new(&system.with_fixings(fixings)).is_feasible()
}

/// Objective pairs for `c . x` on the originals.
pub fn original_objective(c: &[Rational]) -> Vec<(usize, Rational)> {
    c.iter()
        .cloned()
        .enumerate()
        .filter(|(_, a)| !a.is_zero())
        .collect()
}

/// Whether `v` is a convex combination of `points`.
pub fn in_convex_hull(v: &[Rational], points: &[Vec<Rational>]) -> bool {
    if points.is_empty() {
        return false;
    }
    let mut sys = LinearSystem::free(0);
    for k in 0..points.len() {
        sys.add_variable(crate::system::Variable::bounded(
            format!("mu{}", k + 1),
            Some(Rational::zero()),
            None,
        ));
    }
    for (j, target) in v.iter().enumerate() {
        sys.push_row(
            points.iter().enumerate().map(|(k, p)| (k, p[j].clone())),
            Relation::Eq,
            target.clone(),
        );
    }
    sys.push_row((0..points.len()).map(|k| (k, Rational::one())), Relation::Eq, Rational::one());
    PreparedLp::new(&sys).is_feasible()
}
