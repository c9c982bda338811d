//! Forbidden lattice points: box decompositions of `ambient \ X`, the
//! solver over [`IntegralOracle`]s, the box-based formulation of
//! `forb_I(P, X)`, integral k-best, and facet removal for TU systems.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{FvxError, Result};
use crate::extension::disjunctive_hull;
use crate::geometry::{HPolytope, LatticeBox, Objective, Relation};
use crate::lp::{LpResult, PreparedLp, Sense};
use crate::oracle::{IntegralOracle, OracleOutcome};
use crate::point::LatticePoint;
use crate::rational::{self, Rational};
use crate::separation::{kbest_with, KBest};
use crate::system::LinearSystem;

/// Pairwise disjoint boxes whose lattice points are `ambient \ X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxFamily {
    pub ambient: LatticeBox,
    /// Sorted, deduplicated forbidden points.
    pub source: Vec<LatticePoint>,
    pub boxes: Vec<LatticeBox>,
    /// Boxes emitted at each prefix level `1..=n`.
    pub levels: Vec<usize>,
}

impl BoxFamily {
    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }
}

fn check_inside(ambient: &LatticeBox, x: &[LatticePoint]) -> Result<Vec<LatticePoint>> {
    for v in x {
        if v.dim() != ambient.dim() {
            return Err(FvxError::DimensionMismatch {
                expected: ambient.dim(),
                got: v.dim(),
            });
        }
        if !ambient.contains(v) {
            return Err(FvxError::Domain(format!("forbidden point {v} lies outside {ambient}")));
        }
    }
    let set: BTreeSet<LatticePoint> = x.iter().cloned().collect();
    Ok(set.into_iter().collect())
}

/// Maximal runs of `[lo, hi]` avoiding the sorted values `used`.
fn gaps<'a>(lo: &BigInt, hi: &BigInt, used: impl IntoIterator<Item = &'a BigInt>) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::new();
    let mut cur = lo.clone();
    for v in used {
        if &cur < v {
            out.push((cur.clone(), v - 1));
        }
        cur = v + 1;
    }
    if &cur <= hi {
        out.push((cur, hi.clone()));
    }
    out
}

/// For each level `i` and each prefix `v` of length `i - 1` of a point of
/// `X`, the maximal intervals of values `t` with `(v, t)` not a prefix of
/// any point of `X`, padded with the full range on later coordinates.
pub fn box_decomposition_in(ambient: &LatticeBox, x: &[LatticePoint]) -> Result<BoxFamily> {
    let source = check_inside(ambient, x)?;
    let n = ambient.dim();
    let (lo, hi) = (ambient.lower().coords(), ambient.upper().coords());
    if source.is_empty() {
        return Ok(BoxFamily {
            ambient: ambient.clone(),
            source,
            boxes: vec![ambient.clone()],
            levels: vec![0; n],
        });
    }
    let mut boxes = Vec::new();
    let mut levels = Vec::with_capacity(n);
    for i in 0..n {
        let mut next: BTreeMap<&[BigInt], BTreeSet<&BigInt>> = BTreeMap::new();
        for v in &source {
            next.entry(&v.coords()[..i]).or_default().insert(&v.coords()[i]);
        }
        let before = boxes.len();
        for (prefix, used) in next {
            for (a, b) in gaps(&lo[i], &hi[i], used) {
                let mut l = prefix.to_vec();
                let mut u = prefix.to_vec();
                l.push(a);
                u.push(b);
                l.extend_from_slice(&lo[i + 1..]);
                u.extend_from_slice(&hi[i + 1..]);
                boxes.push(LatticeBox::new(LatticePoint::new(l), LatticePoint::new(u))?);
            }
        }
        levels.push(boxes.len() - before);
    }
    Ok(BoxFamily {
        ambient: ambient.clone(),
        source,
        boxes,
        levels,
    })
}

/// [`box_decomposition_in`] over `{0..r-1}^n`.
pub fn box_decomposition(x: &[LatticePoint], r: i64, n: usize) -> Result<BoxFamily> {
    if r < 1 || n == 0 {
        return Err(FvxError::Domain(format!("need r >= 1 and n >= 1, got r={r}, n={n}")));
    }
    box_decomposition_in(&LatticeBox::uniform(r, n)?, x)
}

/// Minimizes `c` over `(P ∩ ambient ∩ Z^n) \ X`, one oracle query per box.
pub fn solve_forbidden_integral<O: IntegralOracle + ?Sized>(
    oracle: &O,
    x: &[LatticePoint],
    ambient: &LatticeBox,
    c: &Objective,
) -> Result<OracleOutcome<LatticePoint>> {
    if oracle.dim() != ambient.dim() {
        return Err(FvxError::DimensionMismatch {
            expected: oracle.dim(),
            got: ambient.dim(),
        });
    }
    c.check_dim(ambient.dim())?;
    let family = box_decomposition_in(ambient, x)?;
    let mut best = OracleOutcome::Infeasible;
    for b in &family.boxes {
        let out = oracle.minimize(c, b)?;
        if let Some(v) = out.vertex() {
            if !b.contains(v) {
                return Err(FvxError::Domain(format!("oracle returned {v} outside the queried box {b}")));
            }
        }
        best = best.merge(out);
    }
    Ok(best)
}

/// The `k` best lattice points of `P ∩ ambient`.
pub fn kbest_integral<O: IntegralOracle + ?Sized>(
    oracle: &O,
    ambient: &LatticeBox,
    c: &Objective,
    k: usize,
) -> Result<KBest<LatticePoint>> {
    kbest_with(k, |found| solve_forbidden_integral(oracle, found, ambient, c))
}

/// `forb_I(P, X)` as the hull of `P ∩ B` over the boxes `B` of the
/// decomposition of `ambient \ X`. `P` is trusted to be box-integral.
/// Coordinates on which `P` leaves the ambient box keep the ambient bounds.
pub fn forbi_formulation(p: &HPolytope, x: &[LatticePoint], ambient: &LatticeBox) -> Result<LinearSystem> {
    let n = p.dim();
    if ambient.dim() != n {
        return Err(FvxError::DimensionMismatch {
            expected: n,
            got: ambient.dim(),
        });
    }
    let family = box_decomposition_in(ambient, x)?;
    if family.is_empty() {
        return Err(FvxError::AllForbidden);
    }
    let mut base = LinearSystem::from_hpolytope(p);
    let lp = PreparedLp::new(&base);
    if !lp.is_feasible() {
        return Err(FvxError::AllForbidden);
    }
    let (lo, hi) = (ambient.lower().coords(), ambient.upper().coords());
    for j in 0..n {
        let l = rational::big(lo[j].clone());
        let u = rational::big(hi[j].clone());
        let dir = [(j, Rational::one())];
        match lp.solve(&dir, Sense::Minimize) {
            LpResult::Optimal { value, .. } if value >= l => {}
            _ => base.variables[j].lower = Some(l),
        }
        match lp.solve(&dir, Sense::Maximize) {
            LpResult::Optimal { value, .. } if value <= u => {}
            _ => base.variables[j].upper = Some(u),
        }
    }
    let base_ineq = base.inequality_count();
    let blocks = family
        .boxes
        .iter()
        .map(|b| {
            let mut block = base.clone();
            for j in 0..n {
                let (bl, bu) = (&b.lower().coords()[j], &b.upper().coords()[j]);
                if bl != &lo[j] || bu != &hi[j] {
                    block.variables[j].lower = Some(rational::big(bl.clone()));
                    block.variables[j].upper = Some(rational::big(bu.clone()));
                }
            }
            block
        })
        .collect();
    let mut sys = disjunctive_hull(blocks).map_err(|e| match e {
        FvxError::EmptyUnion => FvxError::AllForbidden,
        e => e,
    })?;
    let boxes = family.len();
    sys.meta.method = "boxes".into();
    sys.meta.inequalities = sys.inequality_count();
    sys.meta.bound = boxes * (base_ineq + 3);
    sys.meta.bound_formula = format!("|B|(ineq(P)+3) with |B|={boxes}, ineq(P)={base_ineq}");
    Ok(sys)
}

/// Largest matrix (after removing unit rows and columns) accepted by
/// [`tu_check`].
pub const TU_CAP: usize = 8;

fn det(mut m: Vec<Vec<i64>>) -> i64 {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i64;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return 0;
            };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|s| s.count_ones() as usize == k)
        .map(|s| (0..n).filter(|&i| s >> i & 1 == 1).collect())
        .collect()
}

/// Whether every square submatrix has determinant in `{-1, 0, 1}`.
///
/// Rows and columns with at most one nonzero are removed first (they never
/// affect the answer); what remains must fit in `8 x 8`.
pub fn tu_check(m: &[Vec<i64>]) -> Result<bool> {
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err(FvxError::Domain("ragged matrix".into()));
    }
    if m.iter().flatten().any(|v| v.abs() > 1) {
        return Ok(false);
    }
    let mut rows: Vec<usize> = (0..m.len()).collect();
    let mut keep: Vec<usize> = (0..cols).collect();
    loop {
        let before = (rows.len(), keep.len());
        rows.retain(|&i| keep.iter().filter(|&&j| m[i][j] != 0).count() > 1);
        keep.retain(|&j| rows.iter().filter(|&&i| m[i][j] != 0).count() > 1);
        if (rows.len(), keep.len()) == before {
            break;
        }
    }
    if rows.len() > TU_CAP || keep.len() > TU_CAP {
        return Err(FvxError::SizeCap {
            rows: rows.len(),
            cols: keep.len(),
        });
    }
    for k in 1..=rows.len().min(keep.len()) {
        let rsets = subsets(rows.len(), k);
        let csets = subsets(keep.len(), k);
        for rs in &rsets {
            for cs in &csets {
                let sub = rs
                    .iter()
                    .map(|&i| cs.iter().map(|&j| m[rows[i]][keep[j]]).collect())
                    .collect();
                if det(sub).abs() > 1 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Integer coefficient matrix of `P`, or `None` if some entry is fractional
/// or too large.
pub fn integer_matrix(p: &HPolytope) -> Option<Vec<Vec<i64>>> {
    p.rows()
        .iter()
        .map(|r| {
            r.a.iter()
                .map(|v| if v.is_integer() { v.to_integer().to_i64() } else { None })
                .collect()
        })
        .collect()
}

/// `P ∩ {a_i x <= b_i - 1}` for a TU system with integral right-hand side
/// (`>=` rows are tightened to `b_i + 1`). `row` is 0-based.
pub fn remove_facet_tu(p: &HPolytope, row: usize) -> Result<HPolytope> {
    let target = p
        .rows()
        .get(row)
        .ok_or_else(|| FvxError::Domain(format!("row {} out of range", row + 1)))?;
    let matrix = integer_matrix(p).ok_or(FvxError::NotTu)?;
    if let Some(i) = p.rows().iter().position(|r| !r.b.is_integer()) {
        return Err(FvxError::NonIntegralRhs(i + 1));
    }
    if !tu_check(&matrix)? {
        return Err(FvxError::NotTu);
    }
    let shift = match target.rel {
        Relation::Le => -Rational::one(),
        Relation::Ge => Rational::one(),
        Relation::Eq => {
            return Err(FvxError::Domain(format!("row {} is an equality, not a facet", row + 1)))
        }
    };
    let mut rows = p.rows().to_vec();
    rows[row].b += shift;
    HPolytope::new(p.dim(), rows)
}
