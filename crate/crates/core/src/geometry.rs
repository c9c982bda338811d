//! Objectives, coordinate faces of the cube, integer boxes and explicit
//! inequality descriptions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{FvxError, Result};
use crate::point::{BinaryPoint, LatticePoint};
use crate::rational::{self, Rational};

/// A linear objective, always minimized.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Objective {
    c: Vec<Rational>,
}

impl Objective {
    pub fn new(c: Vec<Rational>) -> Self {
        Objective { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Objective::new(c.iter().map(|&v| rational::int(v)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Objective::new(vec![Rational::zero(); n])
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.c
    }

    pub fn coeff(&self, j: usize) -> &Rational {
        &self.c[j]
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.c.len() != n {
            return Err(FvxError::DimensionMismatch {
                expected: n,
                got: self.c.len(),
            });
        }
        Ok(())
    }
}

/// A face of `[0,1]^n` obtained by fixing some coordinates to 0 or 1.
///
/// Indices in `fixed` are 0-based (coordinate `j + 1`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeFace {
    n: usize,
    fixed: BTreeMap<usize, bool>,
}

impl CubeFace {
    /// The improper face, i.e. the whole cube.
    pub fn full(n: usize) -> Self {
        CubeFace {
            n,
            fixed: BTreeMap::new(),
        }
    }

    pub fn new(n: usize, fixings: impl IntoIterator<Item = (usize, bool)>) -> Result<Self> {
        let mut fixed = BTreeMap::new();
        for (j, v) in fixings {
            if j >= n {
                return Err(FvxError::Domain(format!(
                    "coordinate {} outside 1..{n}",
                    j + 1
                )));
            }
            if let Some(prev) = fixed.insert(j, v) {
                if prev != v {
                    return Err(FvxError::Domain(format!(
                        "coordinate {} fixed to both values",
                        j + 1
                    )));
                }
            }
        }
        Ok(CubeFace { n, fixed })
    }

    /// Face fixing the first `prefix.len()` coordinates.
    pub fn from_prefix(n: usize, prefix: &[bool]) -> Self {
        CubeFace {
            n,
            fixed: prefix.iter().copied().enumerate().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn fixed(&self) -> &BTreeMap<usize, bool> {
        &self.fixed
    }

    pub fn get(&self, j: usize) -> Option<bool> {
        self.fixed.get(&j).copied()
    }

    pub fn contains(&self, v: &BinaryPoint) -> bool {
        self.fixed.iter().all(|(&j, &b)| v.get(j) == b)
    }
}

impl fmt::Display for CubeFace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.n {
            let ch = match self.get(j) {
                Some(true) => '1',
                Some(false) => '0',
                None => '*',
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

/// The integer box `[l, u]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeBox {
    l: LatticePoint,
    u: LatticePoint,
}

impl LatticeBox {
    pub fn new(l: LatticePoint, u: LatticePoint) -> Result<Self> {
        if l.dim() != u.dim() {
            return Err(FvxError::DimensionMismatch {
                expected: l.dim(),
                got: u.dim(),
            });
        }
        if l.coords().iter().zip(u.coords()).any(|(a, b)| a > b) {
            return Err(FvxError::Domain(format!("box bounds {l} > {u}")));
        }
        Ok(LatticeBox { l, u })
    }

    /// `{0..r-1}^n`.
    pub fn uniform(r: i64, n: usize) -> Result<Self> {
        LatticeBox::new(
            LatticePoint::from_ints(&vec![0; n]),
            LatticePoint::from_ints(&vec![r - 1; n]),
        )
    }

    pub fn dim(&self) -> usize {
        self.l.dim()
    }

    pub fn lower(&self) -> &LatticePoint {
        &self.l
    }

    pub fn upper(&self) -> &LatticePoint {
        &self.u
    }

    pub fn contains(&self, x: &LatticePoint) -> bool {
        x.dim() == self.dim()
            && x
                .coords()
                .iter()
                .zip(self.l.coords().iter().zip(self.u.coords()))
                .all(|(v, (a, b))| a <= v && v <= b)
    }

    /// Intersection, or `None` when empty.
    pub fn intersect(&self, other: &LatticeBox) -> Option<LatticeBox> {
        let l: Vec<BigInt> = self
            .l
            .coords()
            .iter()
            .zip(other.l.coords())
            .map(|(a, b)| a.max(b).clone())
            .collect();
        let u: Vec<BigInt> = self
            .u
            .coords()
            .iter()
            .zip(other.u.coords())
            .map(|(a, b)| a.min(b).clone())
            .collect();
        LatticeBox::new(LatticePoint::new(l), LatticePoint::new(u)).ok()
    }

    /// Number of lattice points, `prod (u_i - l_i + 1)`.
    pub fn count(&self) -> BigInt {
        self.l
            .coords()
            .iter()
            .zip(self.u.coords())
            .fold(BigInt::one(), |acc, (a, b)| acc * (b - a + 1))
    }

    /// All lattice points in lexicographic order. Callers guard the size.
    pub fn points(&self) -> Vec<LatticePoint> {
        let mut out = vec![Vec::<BigInt>::new()];
        for (a, b) in self.l.coords().iter().zip(self.u.coords()) {
            let mut next = Vec::new();
            for prefix in &out {
                let mut v = a.clone();
                while &v <= b {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    next.push(p);
                    v += 1;
                }
            }
            out = next;
        }
        out.into_iter().map(LatticePoint::new).collect()
    }
}

impl fmt::Display for LatticeBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.l, self.u)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

/// One explicit constraint `a . x (rel) b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HRow {
    pub a: Vec<Rational>,
    pub rel: Relation,
    pub b: Rational,
}

impl HRow {
    pub fn new(a: Vec<Rational>, rel: Relation, b: Rational) -> Self {
        HRow { a, rel, b }
    }

    pub fn from_ints(a: &[i64], rel: Relation, b: i64) -> Self {
        HRow::new(
            a.iter().map(|&v| rational::int(v)).collect(),
            rel,
            rational::int(b),
        )
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        rational::dot(&self.a, x)
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        self.rel.holds(&self.lhs(x), &self.b)
    }

    pub fn is_tight(&self, x: &[Rational]) -> bool {
        self.lhs(x) == self.b
    }

    pub fn is_inequality(&self) -> bool {
        self.rel != Relation::Eq
    }
}

impl fmt::Display for HRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (j, a) in self.a.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            let mag = a.abs();
            let term = if mag.is_one() {
                format!("x{}", j + 1)
            } else {
                format!("{} x{}", rational::format_rational(&mag), j + 1)
            };
            match (out.is_empty(), a.is_negative()) {
                (true, false) => out.push_str(&term),
                (true, true) => out.push_str(&format!("-{term}")),
                (false, false) => out.push_str(&format!(" + {term}")),
                (false, true) => out.push_str(&format!(" - {term}")),
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        write!(f, "{out} {} {}", self.rel.symbol(), rational::format_rational(&self.b))
    }
}

/// An explicit description `{x : rows}` of a polytope in `R^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolytope {
    n: usize,
    rows: Vec<HRow>,
}

impl HPolytope {
    pub fn new(n: usize, rows: Vec<HRow>) -> Result<Self> {
        for row in &rows {
            if row.a.len() != n {
                return Err(FvxError::DimensionMismatch {
                    expected: n,
                    got: row.a.len(),
                });
            }
        }
        Ok(HPolytope { n, rows })
    }

    /// `[0,1]^n` as `2n` rows: `x_j >= 0` then `x_j <= 1` for each `j`.
    pub fn cube(n: usize) -> Self {
        HPolytope::integer_box(&vec![0; n], &vec![1; n])
    }

    pub fn integer_box(l: &[i64], u: &[i64]) -> Self {
        let n = l.len();
        let mut rows = Vec::with_capacity(2 * n);
        for j in 0..n {
            let mut e = vec![0; n];
            e[j] = 1;
            rows.push(HRow::from_ints(&e, Relation::Ge, l[j]));
            rows.push(HRow::from_ints(&e, Relation::Le, u[j]));
        }
        HPolytope { n, rows }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[HRow] {
        &self.rows
    }

    pub fn with_row(mut self, row: HRow) -> Result<Self> {
        if row.a.len() != self.n {
            return Err(FvxError::DimensionMismatch {
                expected: self.n,
                got: row.a.len(),
            });
        }
        self.rows.push(row);
        Ok(self)
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.rows.iter().all(|r| r.satisfied_by(x))
    }

    pub fn inequality_count(&self) -> usize {
        self.rows.iter().filter(|r| r.is_inequality()).count()
    }
}
