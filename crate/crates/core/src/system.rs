//! Explicit linear systems over named variables, used for every extended
//! formulation the crate builds.
//!
//! The first `original` variables are `x1..xn`, the coordinates the
//! formulation is projected onto. Every row is stored with integer
//! coefficients and an integer right-hand side; rational input rows are
//! scaled by the common denominator on entry.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{FvxError, Result};
use crate::geometry::{HPolytope, Relation};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Variable {
    pub fn free(name: impl Into<String>) -> Self {
        Variable {
            name: name.into(),
            lower: None,
            upper: None,
        }
    }

    pub fn bounded(name: impl Into<String>, lower: Option<Rational>, upper: Option<Rational>) -> Self {
        Variable {
            name: name.into(),
            lower,
            upper,
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!((&self.lower, &self.upper), (Some(l), Some(u)) if l == u)
    }

    /// Finite bound sides that act as inequalities (a fixed variable counts
    /// as an equality, not as two inequalities).
    pub fn inequality_count(&self) -> usize {
        if self.is_fixed() {
            0
        } else {
            usize::from(self.lower.is_some()) + usize::from(self.upper.is_some())
        }
    }
}

/// `sum terms (rel) rhs` with integer data.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Row {
    pub terms: Vec<(usize, BigInt)>,
    pub rel: Relation,
    pub rhs: BigInt,
}

impl Row {
    /// Builds a row from rational data, merging repeated variables,
    /// dropping zeros and clearing denominators.
    pub fn from_rationals(
        terms: impl IntoIterator<Item = (usize, Rational)>,
        rel: Relation,
        rhs: Rational,
    ) -> Row {
        let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
        for (v, a) in terms {
            *merged.entry(v).or_insert_with(Rational::zero) += a;
        }
        merged.retain(|_, a| !a.is_zero());
        let scale = rational::common_denominator(merged.values().chain(std::iter::once(&rhs)));
        let scale = rational::big(scale);
        Row {
            terms: merged
                .into_iter()
                .map(|(v, a)| (v, (a * &scale).to_integer()))
                .collect(),
            rel,
            rhs: (rhs * &scale).to_integer(),
        }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.terms
            .iter()
            .fold(Rational::zero(), |acc, (v, a)| acc + &x[*v] * rational::big(a.clone()))
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        self.rel.holds(&self.lhs(x), &rational::big(self.rhs.clone()))
    }
}

/// Construction method plus the size certificate checked by verification.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub method: String,
    /// Inequality rows plus finite, non-fixing variable bounds.
    pub inequalities: usize,
    /// Upper bound the construction guarantees for `inequalities`.
    pub bound: usize,
    /// How `bound` was computed.
    pub bound_formula: String,
    /// Disjunctive blocks kept in the outermost hull.
    pub blocks: usize,
    /// Blocks dropped because they were empty.
    pub dropped_blocks: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub variables: Vec<Variable>,
    pub original: usize,
    pub rows: Vec<Row>,
    pub meta: Certificate,
}

pub fn original_name(j: usize) -> String {
    format!("x{}", j + 1)
}

impl LinearSystem {
    /// `R^n` with free originals and no rows.
    pub fn free(n: usize) -> Self {
        LinearSystem {
            variables: (0..n).map(|j| Variable::free(original_name(j))).collect(),
            original: n,
            rows: Vec::new(),
            meta: Certificate::default(),
        }
    }

    /// `[0,1]^n` via variable bounds.
    pub fn unit_cube(n: usize) -> Self {
        let mut sys = LinearSystem::free(n);
        for v in &mut sys.variables {
            v.lower = Some(Rational::zero());
            v.upper = Some(Rational::one());
        }
        sys
    }

    /// The single point `p` (all originals fixed).
    pub fn point(p: &[Rational]) -> Self {
        let mut sys = LinearSystem::free(p.len());
        for (v, x) in sys.variables.iter_mut().zip(p) {
            v.lower = Some(x.clone());
            v.upper = Some(x.clone());
        }
        sys
    }

    pub fn from_hpolytope(p: &HPolytope) -> Self {
        let mut sys = LinearSystem::free(p.dim());
        for row in p.rows() {
            sys.push_row(
                row.a.iter().cloned().enumerate(),
                row.rel,
                row.b.clone(),
            );
        }
        sys
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn add_variable(&mut self, var: Variable) -> usize {
        self.variables.push(var);
        self.variables.len() - 1
    }

    pub fn push_row(
        &mut self,
        terms: impl IntoIterator<Item = (usize, Rational)>,
        rel: Relation,
        rhs: Rational,
    ) {
        self.rows.push(Row::from_rationals(terms, rel, rhs));
    }

    pub fn inequality_count(&self) -> usize {
        self.rows.iter().filter(|r| r.rel != Relation::Eq).count()
            + self.variables.iter().map(Variable::inequality_count).sum::<usize>()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Checks that rows reference declared variables and that the first
    /// `original` names are `x1..xn`.
    pub fn validate(&self) -> Result<()> {
        for (j, v) in self.variables.iter().take(self.original).enumerate() {
            if v.name != original_name(j) {
                return Err(FvxError::Domain(format!(
                    "variable {} should be named {}",
                    v.name,
                    original_name(j)
                )));
            }
        }
        if self.original > self.variables.len() {
            return Err(FvxError::Domain("fewer variables than originals".into()));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if let Some((v, _)) = row.terms.iter().find(|(v, _)| *v >= self.variables.len()) {
                return Err(FvxError::Domain(format!(
                    "row {} references undeclared variable {v}",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Whether the full assignment `x` satisfies every row and bound.
    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self.variables.iter().zip(x).all(|(v, val)| {
                v.lower.as_ref().map_or(true, |l| l <= val)
                    && v.upper.as_ref().map_or(true, |u| val <= u)
            })
            && self.rows.iter().all(|r| r.satisfied_by(x))
    }

    /// Copy of the system with each listed variable fixed by an equality row.
    pub fn with_fixings(&self, fixings: &[(usize, Rational)]) -> Self {
        let mut sys = self.clone();
        for (v, val) in fixings {
            sys.push_row([(*v, Rational::one())], Relation::Eq, val.clone());
        }
        sys
    }

    /// Inserts a new original coordinate `x_{n+1}` with the given bounds,
    /// shifting auxiliary indices.
    pub fn with_extra_original(&self, lower: Option<Rational>, upper: Option<Rational>) -> Self {
        let at = self.original;
        let shift = |v: usize| if v >= at { v + 1 } else { v };
        let mut variables = self.variables.clone();
        variables.insert(at, Variable::bounded(original_name(at), lower, upper));
        let rows = self
            .rows
            .iter()
            .map(|r| Row {
                terms: r.terms.iter().map(|(v, a)| (shift(*v), a.clone())).collect(),
                rel: r.rel,
                rhs: r.rhs.clone(),
            })
            .collect();
        LinearSystem {
            variables,
            original: at + 1,
            rows,
            meta: self.meta.clone(),
        }
    }

    /// Intersection of two formulations over the same originals; the
    /// auxiliaries of `other` are renamed with `prefix`.
    pub fn intersect(&self, other: &LinearSystem, prefix: &str) -> Result<Self> {
        if self.original != other.original {
            return Err(FvxError::DimensionMismatch {
                expected: self.original,
                got: other.original,
            });
        }
        let mut out = self.clone();
        let mut map = Vec::with_capacity(other.num_vars());
        for (j, v) in other.variables.iter().enumerate() {
            if j < other.original {
                let mine = &mut out.variables[j];
                mine.lower = max_opt(mine.lower.take(), v.lower.clone());
                mine.upper = min_opt(mine.upper.take(), v.upper.clone());
                map.push(j);
            } else {
                let mut renamed = v.clone();
                renamed.name = format!("{prefix}{}", v.name);
                map.push(out.add_variable(renamed));
            }
        }
        for r in &other.rows {
            out.rows.push(Row {
                terms: r.terms.iter().map(|(v, a)| (map[*v], a.clone())).collect(),
                rel: r.rel,
                rhs: r.rhs.clone(),
            });
        }
        out.meta = Certificate {
            method: format!("{}&{}", self.meta.method, other.meta.method),
            inequalities: out.inequality_count(),
            bound: self.meta.bound + other.meta.bound,
            bound_formula: "sum of both certificates".into(),
            blocks: self.meta.blocks + other.meta.blocks,
            dropped_blocks: self.meta.dropped_blocks + other.meta.dropped_blocks,
        };
        Ok(out)
    }

    /// Scales by `scale` the right-hand sides and finite bounds, i.e. maps
    /// the system `S` to the homogenised block `{z : z in scale * S}` where
    /// `scale` is the variable `lam`. Returns rows over the same variable
    /// indices plus `lam`, and the remaining pure bounds.
    pub(crate) fn homogenized(&self, lam: usize) -> (Vec<Row>, Vec<Variable>) {
        let mut rows = Vec::new();
        let mut vars = Vec::with_capacity(self.num_vars());
        for r in &self.rows {
            let mut terms = r.terms.clone();
            if !r.rhs.is_zero() {
                terms.push((lam, -r.rhs.clone()));
            }
            rows.push(Row {
                terms,
                rel: r.rel,
                rhs: BigInt::zero(),
            });
        }
        for (j, v) in self.variables.iter().enumerate() {
            let mut kept = Variable::free(v.name.clone());
            let mut bound_row = |value: &Rational, rel: Relation| {
                rows.push(Row::from_rationals(
                    [(j, Rational::one()), (lam, -value.clone())],
                    rel,
                    Rational::zero(),
                ));
            };
            if v.is_fixed() {
                let value = v.lower.as_ref().expect("fixed bound");
                if value.is_zero() {
                    kept.lower = Some(Rational::zero());
                    kept.upper = Some(Rational::zero());
                } else {
                    bound_row(value, Relation::Eq);
                }
            } else {
                match &v.lower {
                    Some(l) if l.is_zero() => kept.lower = Some(Rational::zero()),
                    Some(l) => bound_row(l, Relation::Ge),
                    None => {}
                }
                match &v.upper {
                    Some(u) if u.is_zero() => kept.upper = Some(Rational::zero()),
                    Some(u) => bound_row(u, Relation::Le),
                    None => {}
                }
            }
            vars.push(kept);
        }
        (rows, vars)
    }

    /// Largest absolute coefficient, for diagnostics.
    pub fn max_coefficient(&self) -> BigInt {
        self.rows
            .iter()
            .flat_map(|r| r.terms.iter().map(|(_, a)| a.abs()).chain(std::iter::once(r.rhs.abs())))
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

fn max_opt(a: Option<Rational>, b: Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    }
}

fn min_opt(a: Option<Rational>, b: Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}
