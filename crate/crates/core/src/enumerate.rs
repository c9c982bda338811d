//! Ground-truth enumeration for small instances.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{FvxError, Result};
use crate::geometry::{HPolytope, LatticeBox};
use crate::point::{BinaryPoint, LatticePoint, Vertex};
use crate::rational::Rational;

/// Largest binary dimension enumerated exhaustively.
pub const MAX_ENUM_DIM: usize = 12;
/// Largest ground-truth point list.
pub const MAX_POINTS: usize = 4096;
/// Largest lattice box scanned point by point.
pub const MAX_SCAN: u64 = 1 << 20;
/// Largest number of row subsets tried by [`vertices`].
pub const MAX_BASES: u64 = 200_000;

pub fn check_binary_dim(n: usize) -> Result<()> {
    if n > MAX_ENUM_DIM {
        return Err(FvxError::GuardExceeded(format!(
            "dimension {n} exceeds the enumeration limit {MAX_ENUM_DIM}"
        )));
    }
    Ok(())
}

/// All binary points passing `keep`, in lexicographic order.
pub fn binary_points(n: usize, keep: impl Fn(&BinaryPoint) -> bool) -> Result<Vec<BinaryPoint>> {
    check_binary_dim(n)?;
    let set: BTreeSet<BinaryPoint> = BinaryPoint::all(n)?.filter(|v| keep(v)).collect();
    Ok(set.into_iter().collect())
}

/// Binary points of `P`; for a 0-1 polytope these are its vertices.
pub fn binary_points_of(p: &HPolytope) -> Result<Vec<BinaryPoint>> {
    binary_points(p.dim(), |v| p.contains(&v.to_rationals()))
}

/// Lattice points of `box` passing `keep`, in lexicographic order.
pub fn lattice_points(bounds: &LatticeBox, keep: impl Fn(&LatticePoint) -> bool) -> Result<Vec<LatticePoint>> {
    let count = bounds.count();
    if count > BigInt::from(MAX_SCAN) {
        return Err(FvxError::GuardExceeded(format!("box {bounds} has {count} lattice points")));
    }
    let out: Vec<LatticePoint> = bounds.points().into_iter().filter(|p| keep(p)).collect();
    if out.len() > MAX_POINTS {
        return Err(FvxError::GuardExceeded(format!("{} points exceed {MAX_POINTS}", out.len())));
    }
    Ok(out)
}

fn binomial(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    (0..k).fold(1u128, |acc, i| {
        (acc * (m - i) as u128 / (i as u128 + 1)).min(u128::from(u64::MAX))
    })
}

/// Solves the square system `a x = b`; `None` if singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for k in col..n {
                    let d = &f * &a[col][k];
                    a[r][k] -= d;
                }
                let d = &f * &b[col];
                b[r] -= d;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Vertices of a pointed polyhedron by trying every basis of `n` rows,
/// sorted lexicographically.
pub fn vertices(p: &HPolytope) -> Result<Vec<Vec<Rational>>> {
    let n = p.dim();
    let m = p.rows().len();
    if m < n {
        return Ok(Vec::new());
    }
    if binomial(m, n) > u128::from(MAX_BASES) {
        return Err(FvxError::GuardExceeded(format!("{m} rows in dimension {n}")));
    }
    let mut found = BTreeSet::new();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a = idx.iter().map(|&i| p.rows()[i].a.clone()).collect();
        let b = idx.iter().map(|&i| p.rows()[i].b.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if p.contains(&x) {
                found.insert(x);
            }
        }
        let Some(pos) = (0..n).rev().find(|&k| idx[k] < m - n + k) else {
            break;
        };
        idx[pos] += 1;
        for k in pos + 1..n {
            idx[k] = idx[k - 1] + 1;
        }
    }
    Ok(found.into_iter().collect())
}

/// Integer vertices as lattice points; `None` if some vertex is fractional.
pub fn integral_vertices(p: &HPolytope) -> Result<Option<Vec<LatticePoint>>> {
    let vs = vertices(p)?;
    if vs.iter().flatten().any(|x| !x.is_integer()) {
        return Ok(None);
    }
    Ok(Some(
        vs.into_iter()
            .map(|v| LatticePoint::new(v.into_iter().map(|x| x.to_integer()).collect()))
            .collect(),
    ))
}

/// Lattice points of `P` within `bounds`.
pub fn lattice_points_of(p: &HPolytope, bounds: &LatticeBox) -> Result<Vec<LatticePoint>> {
    lattice_points(bounds, |x| p.contains(&x.to_rationals()))
}

/// Converts a small lattice point to machine integers, for display.
pub fn to_i64s(p: &LatticePoint) -> Option<Vec<i64>> {
    p.coords().iter().map(ToPrimitive::to_i64).collect()
}
