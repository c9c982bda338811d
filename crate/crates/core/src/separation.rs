//! Separating families of cube faces, the forbidden-vertices solver over
//! any [`BinaryOracle`], and k-best enumeration.
//!
//! For a forbidden set `X`, every allowed `y` shares a longest common
//! prefix of length `k < n` with the elements of `X`; the face fixing
//! `y_1..y_{k+1}` contains `y` and no element of `X`. Collecting those
//! faces level by level gives at most `n|X|` pairwise disjoint faces whose
//! binary points are exactly `{0,1}^n \ X`.

use std::collections::BTreeSet;

use crate::error::{FvxError, Result};
use crate::geometry::{CubeFace, Objective};
use crate::oracle::{BinaryOracle, OracleOutcome};
use crate::point::{BinaryPoint, Vertex};

/// A prefix `(len, bits)`: coordinates `1..len` stored in the low bits.
pub type Prefix = (usize, u64);

fn prefix_of(v: &BinaryPoint, len: usize) -> u64 {
    if len == 64 {
        v.bits()
    } else {
        v.bits() & ((1u64 << len) - 1)
    }
}

/// Projections of `X` onto its first `i` coordinates, and the "missing
/// extensions" at each level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixSets {
    n: usize,
    /// `projections[i]`: prefixes of length `i` of elements of `X`.
    projections: Vec<BTreeSet<u64>>,
}

impl PrefixSets {
    pub fn new(x: &[BinaryPoint], n: usize) -> Result<Self> {
        check_points(x, n)?;
        let projections = (0..=n)
            .map(|i| x.iter().map(|v| prefix_of(v, i)).collect())
            .collect();
        Ok(PrefixSets { n, projections })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `X^i` as a set of packed prefixes.
    pub fn projection(&self, i: usize) -> &BTreeSet<u64> {
        &self.projections[i]
    }

    /// `(X^{i-1} x {0,1}) \ X^i` for `1 <= i <= n`, in lexicographic order.
    pub fn missing(&self, i: usize) -> Vec<Prefix> {
        let mut prefixes: Vec<u64> = self.projections[i - 1].iter().copied().collect();
        prefixes.sort_by_key(|p| p.reverse_bits());
        let mut out = Vec::new();
        for p in prefixes {
            for bit in [0u64, 1] {
                let q = p | bit << (i - 1);
                if !self.projections[i].contains(&q) {
                    out.push((i, q));
                }
            }
        }
        out
    }
}

fn check_points(x: &[BinaryPoint], n: usize) -> Result<()> {
    BinaryPoint::zeros(n)?;
    if let Some(v) = x.iter().find(|v| v.dim() != n) {
        return Err(FvxError::DimensionMismatch {
            expected: n,
            got: v.dim(),
        });
    }
    Ok(())
}

fn face_of_prefix(n: usize, (len, bits): Prefix) -> CubeFace {
    let coords: Vec<bool> = (0..len).map(|j| bits >> j & 1 == 1).collect();
    CubeFace::from_prefix(n, &coords)
}

/// Cube faces whose binary points partition `{0,1}^n \ X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatingFamily {
    n: usize,
    faces: Vec<CubeFace>,
    source: Vec<BinaryPoint>,
}

impl SeparatingFamily {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn faces(&self) -> &[CubeFace] {
        &self.faces
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// The forbidden set the family was built for (sorted, deduplicated).
    pub fn source(&self) -> &[BinaryPoint] {
        &self.source
    }
}

/// Builds the separating family of `X`, level by level in lexicographic
/// prefix order. `X = {}` gives the whole cube as a single face; `X` equal
/// to the whole cube gives the empty family.
pub fn separating_faces(x: &[BinaryPoint], n: usize) -> Result<SeparatingFamily> {
    check_points(x, n)?;
    let mut source = x.to_vec();
    source.sort();
    source.dedup();
    if source.is_empty() {
        return Ok(SeparatingFamily {
            n,
            faces: vec![CubeFace::full(n)],
            source,
        });
    }
    let sets = PrefixSets::new(&source, n)?;
    let faces = (1..=n)
        .flat_map(|i| sets.missing(i))
        .map(|p| face_of_prefix(n, p))
        .collect();
    Ok(SeparatingFamily { n, faces, source })
}

/// Minimizes `c` over `V(P) \ X`, one oracle query per separating face.
/// Ties across faces go to the lexicographically smallest vertex.
pub fn solve_forbidden<O: BinaryOracle + ?Sized>(
    oracle: &O,
    x: &[BinaryPoint],
    c: &Objective,
) -> Result<OracleOutcome<BinaryPoint>> {
    let n = oracle.dim();
    c.check_dim(n)?;
    let family = separating_faces(x, n)?;
    let mut best = OracleOutcome::Infeasible;
    for face in family.faces() {
        let out = oracle.minimize(c, face)?;
        if let Some(v) = out.vertex() {
            if !face.contains(v) {
                return Err(FvxError::Domain(format!(
                    "oracle returned {v} outside the queried face {face}"
                )));
            }
        }
        best = best.merge(out);
    }
    Ok(best)
}

/// Result of a k-best run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KBest<P> {
    /// Distinct points in nondecreasing objective order.
    pub points: Vec<P>,
    /// True iff `points` is the whole vertex set.
    pub exhausted: bool,
}

impl<P: Vertex> KBest<P> {
    pub fn values(&self, c: &Objective) -> Vec<crate::rational::Rational> {
        self.points.iter().map(|p| p.value(c)).collect()
    }
}

/// Repeatedly solves the forbidden-vertices problem with the points found
/// so far forbidden. After `k` points one more solve decides whether the
/// vertex set is exhausted.
pub fn kbest_with<P: Vertex>(
    k: usize,
    mut next: impl FnMut(&[P]) -> Result<OracleOutcome<P>>,
) -> Result<KBest<P>> {
    if k == 0 {
        return Err(FvxError::Domain("k must be positive".into()));
    }
    let mut points: Vec<P> = Vec::with_capacity(k);
    loop {
        match next(&points)? {
            OracleOutcome::Infeasible => {
                return Ok(KBest {
                    points,
                    exhausted: true,
                })
            }
            OracleOutcome::Optimum { vertex, .. } => {
                if points.len() == k {
                    return Ok(KBest {
                        points,
                        exhausted: false,
                    });
                }
                if points.contains(&vertex) {
                    return Err(FvxError::Domain(format!("solver returned forbidden point {vertex}")));
                }
                points.push(vertex);
            }
        }
    }
}

/// The `k` best vertices of a 0-1 polytope.
pub fn kbest<O: BinaryOracle + ?Sized>(oracle: &O, c: &Objective, k: usize) -> Result<KBest<BinaryPoint>> {
    kbest_with(k, |found| solve_forbidden(oracle, found, c))
}
