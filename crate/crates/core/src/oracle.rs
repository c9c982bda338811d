//! Optimization oracles for 0-1 and integral polytopes.
//!
//! A [`BinaryOracle`] minimizes a linear objective over the vertices of a
//! 0-1 polytope restricted to a coordinate face of the cube; an
//! [`IntegralOracle`] does the same over the integer points of a polytope
//! restricted to an integer box. Every built-in oracle returns the
//! lexicographically smallest optimal point, so all solvers built on top of
//! them are deterministic and agree with brute force vertex by vertex.

use std::cmp::Reverse;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_traits::{One, Signed, Zero};

use crate::error::{FvxError, Result};
use crate::geometry::{CubeFace, HPolytope, LatticeBox, Objective, Relation};
use crate::lp::{original_objective, LpResult, PreparedLp, Sense};
use crate::point::{BinaryPoint, LatticePoint, Vertex};
use crate::rational::Rational;
use crate::system::LinearSystem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome<P> {
    Infeasible,
    Optimum { vertex: P, value: Rational },
}

impl<P: Vertex> OracleOutcome<P> {
    pub fn optimum(vertex: P, c: &Objective) -> Self {
        let value = vertex.value(c);
        OracleOutcome::Optimum { vertex, value }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, OracleOutcome::Infeasible)
    }

    pub fn vertex(&self) -> Option<&P> {
        match self {
            OracleOutcome::Optimum { vertex, .. } => Some(vertex),
            OracleOutcome::Infeasible => None,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            OracleOutcome::Optimum { value, .. } => Some(value),
            OracleOutcome::Infeasible => None,
        }
    }

    /// Keeps the better of two outcomes: lower value, then the
    /// lexicographically smaller vertex.
    pub fn merge(self, other: Self) -> Self {
        match (&self, &other) {
            (OracleOutcome::Infeasible, _) => other,
            (_, OracleOutcome::Infeasible) => self,
            (
                OracleOutcome::Optimum { vertex: a, value: va },
                OracleOutcome::Optimum { vertex: b, value: vb },
            ) => {
                if (vb, b) < (va, a) {
                    other
                } else {
                    self
                }
            }
        }
    }
}

/// Face-restricted linear optimization over a 0-1 polytope.
///
/// Implementations return `Infeasible` iff no vertex lies in the face,
/// return a true minimizer otherwise, and answer identical queries
/// identically.
pub trait BinaryOracle: Send + Sync {
    fn dim(&self) -> usize;
    fn minimize(&self, c: &Objective, face: &CubeFace) -> Result<OracleOutcome<BinaryPoint>>;
}

/// Box-restricted linear optimization over the integer points of a
/// polytope.
pub trait IntegralOracle: Send + Sync {
    fn dim(&self) -> usize;
    fn minimize(&self, c: &Objective, region: &LatticeBox) -> Result<OracleOutcome<LatticePoint>>;
}

impl<O: BinaryOracle + ?Sized> BinaryOracle for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn minimize(&self, c: &Objective, face: &CubeFace) -> Result<OracleOutcome<BinaryPoint>> {
        (**self).minimize(c, face)
    }
}

impl<O: IntegralOracle + ?Sized> IntegralOracle for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn minimize(&self, c: &Objective, region: &LatticeBox) -> Result<OracleOutcome<LatticePoint>> {
        (**self).minimize(c, region)
    }
}

impl<O: BinaryOracle + ?Sized> BinaryOracle for Box<O> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn minimize(&self, c: &Objective, face: &CubeFace) -> Result<OracleOutcome<BinaryPoint>> {
        (**self).minimize(c, face)
    }
}

impl<O: IntegralOracle + ?Sized> IntegralOracle for Box<O> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn minimize(&self, c: &Objective, region: &LatticeBox) -> Result<OracleOutcome<LatticePoint>> {
        (**self).minimize(c, region)
    }
}

fn check_query(n: usize, c: &Objective, region_dim: usize) -> Result<()> {
    c.check_dim(n)?;
    if region_dim != n {
        return Err(FvxError::DimensionMismatch {
            expected: n,
            got: region_dim,
        });
    }
    Ok(())
}

/// Free coordinates sorted by increasing cost; among equal costs the
/// higher index comes first so that lower coordinates stay at 0.
fn cheapest_first(c: &Objective, free: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut free: Vec<usize> = free.collect();
    free.sort_by(|&a, &b| c.coeff(a).cmp(c.coeff(b)).then(Reverse(a).cmp(&Reverse(b))));
    free
}

/// The unit cube `[0,1]^n`.
#[derive(Clone, Debug)]
pub struct CubeOracle {
    n: usize,
}

pub fn cube_oracle(n: usize) -> Result<CubeOracle> {
    BinaryPoint::zeros(n)?;
    Ok(CubeOracle { n })
}

impl BinaryOracle for CubeOracle {
    fn dim(&self) -> usize {
        self.n
    }

    fn minimize(&self, c: &Objective, face: &CubeFace) -> Result<OracleOutcome<BinaryPoint>> {
        check_query(self.n, c, face.dim())?;
        let coords: Vec<bool> = (0..self.n)
            .map(|j| face.get(j).unwrap_or_else(|| c.coeff(j).is_negative()))
            .collect();
        Ok(OracleOutcome::optimum(BinaryPoint::from_coords(&coords)?, c))
    }
}

/// `conv{x in {0,1}^n : sum x = s}`.
#[derive(Clone, Debug)]
pub struct CardinalityOracle {
    n: usize,
    s: usize,
}

pub fn cardinality_oracle(n: usize, s: usize) -> Result<CardinalityOracle> {
    BinaryPoint::zeros(n)?;
    if s > n {
        return Err(FvxError::Domain(format!("target sum {s} exceeds dimension {n}")));
    }
    Ok(CardinalityOracle { n, s })
}

impl BinaryOracle for CardinalityOracle {
    fn dim(&self) -> usize {
        self.n
    }

    fn minimize(&self, c: &Objective, face: &CubeFace) -> Result<OracleOutcome<BinaryPoint>> {
        check_query(self.n, c, face.dim())?;
        let ones = face.fixed().values().filter(|&&b| b).count();
        let free = (0..self.n).filter(|j| face.get(*j).is_none());
        let order = cheapest_first(c, free);
        if ones > self.s || self.s - ones > order.len() {
            return Ok(OracleOutcome::Infeasible);
        }
        let mut coords: Vec<bool> = (0..self.n).map(|j| face.get(j).unwrap_or(false)).collect();
        for &j in order.iter().take(self.s - ones) {
            coords[j] = true;
        }
        Ok(OracleOutcome::optimum(BinaryPoint::from_coords(&coords)?, c))
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, v: usize) -> usize {
        let mut root = v;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut v = v;
        while self.parent[v] != root {
            let next = self.parent[v];
            self.parent[v] = root;
            v = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Spanning trees of a connected graph; coordinate `e` is edge `e`.
#[derive(Clone, Debug)]
pub struct SpanningTreeOracle {
    nodes: usize,
    edges: Vec<(usize, usize)>,
}

/// `edges` use 0-based node indices below `nodes`.
pub fn spanning_tree_oracle(nodes: usize, edges: Vec<(usize, usize)>) -> Result<SpanningTreeOracle> {
    BinaryPoint::zeros(edges.len())?;
    if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= nodes || b >= nodes) {
        return Err(FvxError::Domain(format!("edge ({a},{b}) references a missing node")));
    }
    let mut uf = UnionFind::new(nodes);
    let joined = edges.iter().filter(|&&(a, b)| uf.union(a, b)).count();
    if nodes == 0 || joined + 1 != nodes {
        return Err(FvxError::Domain("graph is not connected".into()));
    }
    Ok(SpanningTreeOracle { nodes, edges })
}

impl SpanningTreeOracle {
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Whether the edge set `v` forms a spanning tree.
    pub fn is_tree(&self, v: &BinaryPoint) -> bool {
        let mut uf = UnionFind::new(self.nodes);
        let mut count = 0;
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if v.get(e) {
                if !uf.union(a, b) {
                    return false;
                }
                count += 1;
            }
        }
        count + 1 == self.nodes
    }
}

impl BinaryOracle for SpanningTreeOracle {
    fn dim(&self) -> usize {
        self.edges.len()
    }

    fn minimize(&self, c: &Objective, face: &CubeFace) -> Result<OracleOutcome<BinaryPoint>> {
        let m = self.edges.len();
        check_query(m, c, face.dim())?;
        let mut uf = UnionFind::new(self.nodes);
        let mut coords = vec![false; m];
        let mut joined = 0;
        for (&e, _) in face.fixed().iter().filter(|(_, &b)| b) {
            let (a, b) = self.edges[e];
            if !uf.union(a, b) {
                return Ok(OracleOutcome::Infeasible);
            }
            coords[e] = true;
            joined += 1;
        }
        for e in cheapest_first(c, (0..m).filter(|e| face.get(*e).is_none())) {
            let (a, b) = self.edges[e];
            if uf.union(a, b) {
                coords[e] = true;
                joined += 1;
            }
        }
        if joined + 1 != self.nodes {
            return Ok(OracleOutcome::Infeasible);
        }
        Ok(OracleOutcome::optimum(BinaryPoint::from_coords(&coords)?, c))
    }
}

/// Lexicographically smallest minimizer of `c` over `system`, or `None`
/// when infeasible. The system's originals are the coordinates.
fn lex_min_lp(system: &LinearSystem, c: &Objective) -> Result<Option<Vec<Rational>>> {
    let lp = PreparedLp::new(system);
    if !lp.is_feasible() {
        return Ok(None);
    }
    let n = system.original;
    let objective = original_objective(c.coeffs());
    let value = match lp.solve(&objective, Sense::Minimize) {
        LpResult::Optimal { value, .. } => value,
        LpResult::Unbounded => return Err(FvxError::UnboundedInput),
        LpResult::Infeasible => return Ok(None),
    };
    let mut face = system.clone();
    if !objective.is_empty() {
        face.push_row(objective.iter().cloned(), Relation::Eq, value);
    }
    let mut point = Vec::with_capacity(n);
    for j in 0..n {
        let x_j = match PreparedLp::new(&face).solve(&[(j, Rational::one())], Sense::Minimize) {
            LpResult::Optimal { value, .. } => value,
            LpResult::Unbounded => return Err(FvxError::UnboundedInput),
            LpResult::Infeasible => unreachable!("optimal face is nonempty"),
        };
        face.push_row([(j, Rational::one())], Relation::Eq, x_j.clone());
        point.push(x_j);
    }
    Ok(Some(point))
}

/// A 0-1 polytope given by explicit rows, optimized with the exact LP
/// solver.
#[derive(Clone, Debug)]
pub struct HrepBinaryOracle {
    polytope: HPolytope,
}

pub fn hrep_binary_oracle(polytope: HPolytope) -> Result<HrepBinaryOracle> {
    BinaryPoint::zeros(polytope.dim())?;
    Ok(HrepBinaryOracle { polytope })
}

impl HrepBinaryOracle {
    pub fn polytope(&self) -> &HPolytope {
        &self.polytope
    }
}

impl BinaryOracle for HrepBinaryOracle {
    fn dim(&self) -> usize {
        self.polytope.dim()
    }

    fn minimize(&self, c: &Objective, face: &CubeFace) -> Result<OracleOutcome<BinaryPoint>> {
        let n = self.dim();
        check_query(n, c, face.dim())?;
        let fixings: Vec<(usize, Rational)> = face
            .fixed()
            .iter()
            .map(|(&j, &b)| (j, if b { Rational::one() } else { Rational::zero() }))
            .collect();
        let system = LinearSystem::from_hpolytope(&self.polytope).with_fixings(&fixings);
        let Some(point) = lex_min_lp(&system, c)? else {
            return Ok(OracleOutcome::Infeasible);
        };
        let mut coords = Vec::with_capacity(n);
        for x in &point {
            if x.is_zero() {
                coords.push(false);
            } else if x.is_one() {
                coords.push(true);
            } else {
                return Err(FvxError::NotBinaryPolytope);
            }
        }
        Ok(OracleOutcome::optimum(BinaryPoint::from_coords(&coords)?, c))
    }
}

/// A box-integral polytope given by explicit rows.
#[derive(Clone, Debug)]
pub struct HrepIntegralOracle {
    polytope: HPolytope,
}

pub fn hrep_integral_oracle(polytope: HPolytope) -> HrepIntegralOracle {
    HrepIntegralOracle { polytope }
}

impl IntegralOracle for HrepIntegralOracle {
    fn dim(&self) -> usize {
        self.polytope.dim()
    }

    fn minimize(&self, c: &Objective, region: &LatticeBox) -> Result<OracleOutcome<LatticePoint>> {
        let n = self.dim();
        check_query(n, c, region.dim())?;
        let mut system = LinearSystem::from_hpolytope(&self.polytope);
        for (j, v) in system.variables.iter_mut().enumerate() {
            v.lower = Some(crate::rational::big(region.lower().coords()[j].clone()));
            v.upper = Some(crate::rational::big(region.upper().coords()[j].clone()));
        }
        let Some(point) = lex_min_lp(&system, c)? else {
            return Ok(OracleOutcome::Infeasible);
        };
        if point.iter().any(|x| !x.is_integer()) {
            return Err(FvxError::NotIntegralPolytope);
        }
        let vertex = LatticePoint::new(point.into_iter().map(|x| x.to_integer()).collect());
        Ok(OracleOutcome::optimum(vertex, c))
    }
}

/// Reference oracle over an explicit point list.
#[derive(Clone, Debug)]
pub struct BruteForceOracle<P> {
    n: usize,
    points: Vec<P>,
}

pub fn brute_force_oracle<P: Vertex>(mut points: Vec<P>) -> Result<BruteForceOracle<P>> {
    let Some(first) = points.first() else {
        return Err(FvxError::Domain("brute-force oracle needs at least one point".into()));
    };
    let n = first.dim();
    if let Some(p) = points.iter().find(|p| p.dim() != n) {
        return Err(FvxError::DimensionMismatch {
            expected: n,
            got: p.dim(),
        });
    }
    points.sort();
    points.dedup();
    Ok(BruteForceOracle { n, points })
}

impl<P: Vertex> BruteForceOracle<P> {
    pub fn points(&self) -> &[P] {
        &self.points
    }

    fn best(&self, c: &Objective, keep: impl Fn(&P) -> bool) -> OracleOutcome<P> {
        self.points
            .iter()
            .filter(|p| keep(p))
            .map(|p| OracleOutcome::optimum(p.clone(), c))
            .fold(OracleOutcome::Infeasible, OracleOutcome::merge)
    }
}

impl BinaryOracle for BruteForceOracle<BinaryPoint> {
    fn dim(&self) -> usize {
        self.n
    }

    fn minimize(&self, c: &Objective, face: &CubeFace) -> Result<OracleOutcome<BinaryPoint>> {
        check_query(self.n, c, face.dim())?;
        Ok(self.best(c, |p| face.contains(p)))
    }
}

impl IntegralOracle for BruteForceOracle<LatticePoint> {
    fn dim(&self) -> usize {
        self.n
    }

    fn minimize(&self, c: &Objective, region: &LatticeBox) -> Result<OracleOutcome<LatticePoint>> {
        check_query(self.n, c, region.dim())?;
        Ok(self.best(c, |p| region.contains(p)))
    }
}

/// The integer points of the box `[l, u]`.
#[derive(Clone, Debug)]
pub struct LatticeBoxOracle {
    bounds: LatticeBox,
}

pub fn lattice_box_oracle(bounds: LatticeBox) -> LatticeBoxOracle {
    LatticeBoxOracle { bounds }
}

impl LatticeBoxOracle {
    pub fn bounds(&self) -> &LatticeBox {
        &self.bounds
    }
}

impl IntegralOracle for LatticeBoxOracle {
    fn dim(&self) -> usize {
        self.bounds.dim()
    }

    fn minimize(&self, c: &Objective, region: &LatticeBox) -> Result<OracleOutcome<LatticePoint>> {
        check_query(self.dim(), c, region.dim())?;
        let Some(b) = self.bounds.intersect(region) else {
            return Ok(OracleOutcome::Infeasible);
        };
        let coords = (0..self.dim())
            .map(|j| {
                if c.coeff(j).is_negative() {
                    b.upper().coords()[j].clone()
                } else {
                    b.lower().coords()[j].clone()
                }
            })
            .collect();
        Ok(OracleOutcome::optimum(LatticePoint::new(coords), c))
    }
}

/// Wraps an oracle and counts queries.
#[derive(Debug)]
pub struct Counting<O> {
    inner: O,
    calls: AtomicUsize,
}

impl<O> Counting<O> {
    pub fn new(inner: O) -> Self {
        Counting {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }
}

impl<O: BinaryOracle> BinaryOracle for Counting<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn minimize(&self, c: &Objective, face: &CubeFace) -> Result<OracleOutcome<BinaryPoint>> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.minimize(c, face)
    }
}

impl<O: IntegralOracle> IntegralOracle for Counting<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn minimize(&self, c: &Objective, region: &LatticeBox) -> Result<OracleOutcome<LatticePoint>> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.minimize(c, region)
    }
}
