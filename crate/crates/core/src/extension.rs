//! Extended formulations of `forb(P, X)` as explicit [`LinearSystem`]s.
//!
//! Every builder ends in [`disjunctive_hull`]: block `k` gets a copy of its
//! variables named `b{k}_y{t}` and a multiplier `lam{k} >= 0`, the copies
//! of the originals sum to `x`, and the multipliers sum to one.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::error::{FvxError, Result};
use crate::geometry::{HPolytope, Relation};
use crate::lp::PreparedLp;
use crate::point::{sigma_decode, sigma_encode, BinaryPoint, Vertex};
use crate::rational::{self, Rational};
use crate::separation::separating_faces;
use crate::system::{Certificate, LinearSystem, Row, Variable};

fn check_dims(blocks: &[LinearSystem]) -> Result<usize> {
    let n = blocks.first().ok_or(FvxError::EmptyUnion)?.original;
    if let Some(b) = blocks.iter().find(|b| b.original != n) {
        return Err(FvxError::DimensionMismatch {
            expected: n,
            got: b.original,
        });
    }
    Ok(n)
}

/// Balas' hull of blocks that are known to be nonempty. A single block is
/// returned unchanged.
pub fn hull_of_nonempty(mut blocks: Vec<LinearSystem>) -> Result<LinearSystem> {
    let n = check_dims(&blocks)?;
    if blocks.len() == 1 {
        let mut only = blocks.pop().expect("one block");
        only.meta.blocks = 1;
        only.meta.inequalities = only.inequality_count();
        return Ok(only);
    }
    let mut out = LinearSystem::free(n);
    let first_lam = n + blocks.iter().map(LinearSystem::num_vars).sum::<usize>();
    let mut offset = n;
    let mut copies: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut bound = 0usize;
    for (k, block) in blocks.iter().enumerate() {
        block.validate()?;
        let nv = block.num_vars();
        let lam = first_lam + k;
        let (rows, vars) = block.homogenized(nv);
        for (t, v) in vars.into_iter().enumerate() {
            out.add_variable(Variable::bounded(format!("b{}_y{}", k + 1, t + 1), v.lower, v.upper));
        }
        let map = |v: usize| if v == nv { lam } else { offset + v };
        for r in rows {
            out.rows.push(Row {
                terms: r.terms.into_iter().map(|(v, a)| (map(v), a)).collect(),
                rel: r.rel,
                rhs: r.rhs,
            });
        }
        for (i, c) in copies.iter_mut().enumerate() {
            c.push(offset + i);
        }
        bound += block.inequality_count() + 1;
        offset += nv;
    }
    for k in 0..blocks.len() {
        out.add_variable(Variable::bounded(format!("lam{}", k + 1), Some(Rational::zero()), None));
    }
    for (i, c) in copies.iter().enumerate() {
        out.push_row(
            std::iter::once((i, Rational::one())).chain(c.iter().map(|&z| (z, -Rational::one()))),
            Relation::Eq,
            Rational::zero(),
        );
    }
    out.push_row(
        (0..blocks.len()).map(|k| (first_lam + k, Rational::one())),
        Relation::Eq,
        Rational::one(),
    );
    out.meta = Certificate {
        method: "hull".into(),
        inequalities: out.inequality_count(),
        bound,
        bound_formula: "sum over blocks of (inequalities + 1)".into(),
        blocks: blocks.len(),
        dropped_blocks: 0,
    };
    Ok(out)
}

/// Hull of the union of the blocks. Empty blocks are dropped (and counted
/// in the certificate); `EmptyUnion` if nothing is left.
pub fn disjunctive_hull(blocks: Vec<LinearSystem>) -> Result<LinearSystem> {
    check_dims(&blocks)?;
    let total = blocks.len();
    let kept: Vec<LinearSystem> = blocks
        .into_iter()
        .filter(|b| PreparedLp::new(b).is_feasible())
        .collect();
    if kept.is_empty() {
        return Err(FvxError::EmptyUnion);
    }
    let mut out = hull_of_nonempty(kept)?;
    out.meta.dropped_blocks = total - out.meta.blocks;
    Ok(out)
}

/// `K(a, b) = {x in {0,1}^n : a <= sigma(x) <= b}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntervalCode {
    pub a: u128,
    pub b: u128,
    pub n: usize,
}

impl IntervalCode {
    pub fn new(a: u128, b: u128, n: usize) -> Result<Self> {
        sigma_decode(a, n)?;
        sigma_decode(b, n)?;
        Ok(IntervalCode { a, b, n })
    }

    pub fn is_empty(&self) -> bool {
        self.b < self.a
    }

    pub fn contains(&self, v: &BinaryPoint) -> bool {
        (self.a..=self.b).contains(&sigma_encode(v))
    }
}

/// `conv(K(a, b))` in the original variables: unit bounds plus
/// `x_i + sum_{j > i, a_j = 0} x_j >= 1` for `a_i = 1` and
/// `x_i + sum_{j > i, b_j = 1} x_j <= |{j > i : b_j = 1}|` for `b_i = 0`.
pub fn conv_k(code: IntervalCode) -> Result<LinearSystem> {
    if code.is_empty() {
        return Err(FvxError::EmptyInterval);
    }
    let n = code.n;
    let a = sigma_decode(code.a, n)?;
    let b = sigma_decode(code.b, n)?;
    let mut sys = LinearSystem::unit_cube(n);
    for i in (0..n).filter(|&i| a.get(i)) {
        let terms = std::iter::once(i).chain((i + 1..n).filter(|&j| !a.get(j)));
        sys.push_row(terms.map(|j| (j, Rational::one())), Relation::Ge, Rational::one());
    }
    for i in (0..n).filter(|&i| !b.get(i)) {
        let above: Vec<usize> = (i + 1..n).filter(|&j| b.get(j)).collect();
        let rhs = rational::int(above.len() as i64);
        let terms = std::iter::once(i).chain(above);
        sys.push_row(terms.map(|j| (j, Rational::one())), Relation::Le, rhs);
    }
    sys.meta = Certificate {
        method: "conv-k".into(),
        inequalities: sys.inequality_count(),
        bound: 4 * n,
        bound_formula: "4n".into(),
        blocks: 1,
        dropped_blocks: 0,
    };
    Ok(sys)
}

fn check_points(x: &[BinaryPoint], n: usize) -> Result<Vec<BinaryPoint>> {
    BinaryPoint::zeros(n)?;
    if let Some(v) = x.iter().find(|v| v.dim() != n) {
        return Err(FvxError::DimensionMismatch {
            expected: n,
            got: v.dim(),
        });
    }
    let mut x = x.to_vec();
    x.sort();
    x.dedup();
    Ok(x)
}

/// The nonempty gaps between consecutive forbidden codes.
pub fn allowed_intervals(x: &[BinaryPoint], n: usize) -> Result<Vec<IntervalCode>> {
    let mut codes: Vec<u128> = check_points(x, n)?.iter().map(sigma_encode).collect();
    codes.sort_unstable();
    let top = (1u128 << n) - 1;
    let mut out = Vec::new();
    let mut next = 0u128;
    for k in codes {
        if next < k {
            out.push(IntervalCode { a: next, b: k - 1, n });
        }
        next = k + 1;
    }
    if next <= top {
        out.push(IntervalCode { a: next, b: top, n });
    }
    Ok(out)
}

fn certify(mut sys: LinearSystem, method: &str, bound: usize, formula: String) -> LinearSystem {
    sys.meta.method = method.into();
    sys.meta.inequalities = sys.inequality_count();
    sys.meta.bound = bound;
    sys.meta.bound_formula = formula;
    sys
}

/// `forb([0,1]^n, X)` as the hull of `conv(K)` over the allowed code
/// intervals.
pub fn interval_formulation(x: &[BinaryPoint], n: usize) -> Result<LinearSystem> {
    let xs = check_points(x, n)?;
    let blocks = allowed_intervals(&xs, n)?
        .into_iter()
        .map(conv_k)
        .collect::<Result<Vec<_>>>()?;
    if blocks.is_empty() {
        return Err(FvxError::AllForbidden);
    }
    let m = xs.len();
    Ok(certify(
        hull_of_nonempty(blocks)?,
        "interval",
        (m + 1) * (4 * n + 3),
        format!("(|X|+1)(4n+3) with |X|={m}, n={n}"),
    ))
}

fn point_block(v: &BinaryPoint) -> LinearSystem {
    LinearSystem::point(&v.to_rationals())
}

fn recursive_inner(x: &BTreeSet<BinaryPoint>, k: usize) -> Option<LinearSystem> {
    if k == 1 {
        let allowed: Vec<BinaryPoint> = BinaryPoint::all(1)
            .expect("dimension 1")
            .filter(|v| !x.contains(v))
            .collect();
        return match allowed.len() {
            0 => None,
            1 => Some(point_block(&allowed[0])),
            _ => Some(LinearSystem::unit_cube(1)),
        };
    }
    let low = (1u64 << (k - 1)) - 1;
    let projected: BTreeSet<BinaryPoint> = x
        .iter()
        .map(|v| BinaryPoint::new(k - 1, v.bits() & low).expect("projection"))
        .collect();
    let hat: BTreeSet<BinaryPoint> = x
        .iter()
        .map(|v| v.flipped(k - 1))
        .filter(|v| !x.contains(v))
        .collect();
    let mut blocks = Vec::with_capacity(hat.len() + 1);
    if let Some(lower) = recursive_inner(&projected, k - 1) {
        blocks.push(lower.with_extra_original(Some(Rational::zero()), Some(Rational::one())));
    }
    blocks.extend(hat.iter().map(point_block));
    if blocks.is_empty() {
        return None;
    }
    Some(hull_of_nonempty(blocks).expect("blocks share the dimension"))
}

/// `forb([0,1]^n, X)` by recursion on the last coordinate:
/// `{0,1}^n \ X = (({0,1}^{n-1} \ X') x {0,1}) u X^`, with `X'` the
/// projection of `X` and `X^` the points obtained by flipping the last bit
/// of an element of `X` that are not in `X`.
pub fn recursive_formulation(x: &[BinaryPoint], n: usize) -> Result<LinearSystem> {
    let xs: BTreeSet<BinaryPoint> = check_points(x, n)?.into_iter().collect();
    let sys = recursive_inner(&xs, n).ok_or(FvxError::AllForbidden)?;
    let m = xs.len();
    Ok(certify(sys, "recursive", n * (m + 4), format!("n(|X|+4) with |X|={m}, n={n}")))
}

fn polytope_block(p: &HPolytope) -> LinearSystem {
    LinearSystem::from_hpolytope(p)
}

/// `forb(P, X)` for a 0-1 polytope `P`: one block `P ∩ F` per face `F` of
/// the separating family of `X`.
pub fn face_formulation(p: &HPolytope, x: &[BinaryPoint]) -> Result<LinearSystem> {
    let n = p.dim();
    let xs = check_points(x, n)?;
    let family = separating_faces(&xs, n)?;
    if family.is_empty() {
        return Err(FvxError::AllForbidden);
    }
    let blocks: Vec<LinearSystem> = family
        .faces()
        .iter()
        .map(|face| {
            let mut b = polytope_block(p);
            for (&j, &val) in face.fixed() {
                let v = rational::int(i64::from(val));
                b.variables[j].lower = Some(v.clone());
                b.variables[j].upper = Some(v);
            }
            b
        })
        .collect();
    let hull = disjunctive_hull(blocks).map_err(|e| match e {
        FvxError::EmptyUnion => FvxError::AllForbidden,
        e => e,
    })?;
    let f = family.len();
    let ineq = p.inequality_count();
    Ok(certify(
        hull,
        "faces",
        f * (ineq + 1),
        format!("|F|(ineq(P)+1) with |F|={f}, ineq(P)={ineq}"),
    ))
}

/// Largest forbidden list accepted by [`facet_intersection_formulation`].
pub const FACET_INTERSECTION_CAP: usize = 2;

/// `forb(P, X)` as the hull of the faces `F_1 ∩ ... ∩ F_|X|` where `F_i`
/// ranges over the listed facets not containing `v_i`. `facets` holds
/// 0-based row indices of `P` and is trusted to be facet-defining.
pub fn facet_intersection_formulation(
    p: &HPolytope,
    facets: &[usize],
    x: &[BinaryPoint],
) -> Result<LinearSystem> {
    let n = p.dim();
    let xs = check_points(x, n)?;
    if xs.len() > FACET_INTERSECTION_CAP {
        return Err(FvxError::CardinalityCap {
            cap: FACET_INTERSECTION_CAP,
            got: xs.len(),
        });
    }
    if let Some(&f) = facets.iter().find(|&&f| f >= p.rows().len()) {
        return Err(FvxError::Domain(format!("facet index {} out of range", f + 1)));
    }
    let mut choices: Vec<Vec<usize>> = Vec::with_capacity(xs.len());
    for (i, v) in xs.iter().enumerate() {
        let pt = v.to_rationals();
        let e: Vec<usize> = facets
            .iter()
            .copied()
            .filter(|&f| !p.rows()[f].is_tight(&pt))
            .collect();
        if e.is_empty() {
            return Err(FvxError::NoFaceExcludes { index: i + 1 });
        }
        choices.push(e);
    }
    let mut tuples: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    for e in &choices {
        stack = stack
            .into_iter()
            .flat_map(|t| {
                e.iter().map(move |&f| {
                    let mut t = t.clone();
                    t.push(f);
                    t
                })
            })
            .collect();
    }
    for mut t in stack {
        t.sort_unstable();
        t.dedup();
        tuples.insert(t);
    }
    let blocks: Vec<LinearSystem> = tuples
        .iter()
        .map(|t| {
            let mut rows = p.rows().to_vec();
            for &f in t {
                rows[f].rel = Relation::Eq;
            }
            polytope_block(&HPolytope::new(n, rows).expect("same dimension"))
        })
        .collect();
    let hull = disjunctive_hull(blocks).map_err(|e| match e {
        FvxError::EmptyUnion => FvxError::AllForbidden,
        e => e,
    })?;
    let family = facets.len().pow(xs.len() as u32);
    let ineq = p.inequality_count();
    Ok(certify(
        hull,
        "facet-intersection",
        family * (ineq + 1),
        format!("f^|X|(ineq(P)+1) with f={}, |X|={}, ineq(P)={ineq}", facets.len(), xs.len()),
    ))
}
