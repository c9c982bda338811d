//! All-different problems: pick one point per slot, pairwise distinct,
//! minimizing the sum of the per-slot objectives.
//!
//! Each slot contributes its `k` best points (`k` = number of slots); an
//! optimal assignment only ever uses those, so a minimum-weight matching
//! covering the slots in the candidate graph solves the problem.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::error::Result;
use crate::geometry::{LatticeBox, Objective};
use crate::integral::kbest_integral;
use crate::oracle::{BinaryOracle, IntegralOracle};
use crate::point::{BinaryPoint, LatticePoint, Vertex};
use crate::rational::Rational;
use crate::separation::{kbest, KBest};

/// Bipartite graph between candidate points `S` and slots `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateGraph<P> {
    /// `S`, sorted and deduplicated.
    pub vertices: Vec<P>,
    /// `edges[i]`: `(index into vertices, c_i . v)` for `v` in `S_i`.
    pub edges: Vec<Vec<(usize, Rational)>>,
    /// Whether slot `i`'s k-best run listed every point.
    pub exhausted: Vec<bool>,
}

impl<P: Vertex> CandidateGraph<P> {
    pub fn slots(&self) -> usize {
        self.edges.len()
    }

    /// Assembles the graph from per-slot k-best results.
    pub fn from_kbest(lists: &[KBest<P>], objectives: &[Objective]) -> Self {
        let set: BTreeSet<&P> = lists.iter().flat_map(|l| &l.points).collect();
        let vertices: Vec<P> = set.into_iter().cloned().collect();
        let edges = lists
            .iter()
            .zip(objectives)
            .map(|(l, c)| {
                let mut e: Vec<(usize, Rational)> = l
                    .points
                    .iter()
                    .map(|v| (vertices.binary_search(v).expect("listed"), v.value(c)))
                    .collect();
                e.sort_by_key(|(j, _)| *j);
                e
            })
            .collect();
        CandidateGraph {
            vertices,
            edges,
            exhausted: lists.iter().map(|l| l.exhausted).collect(),
        }
    }
}

fn run_slots<P: Vertex>(
    slots: usize,
    solve: impl Fn(usize) -> Result<KBest<P>> + Sync,
) -> Result<Vec<KBest<P>>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..slots).map(|i| scope.spawn({ let solve = &solve; move || solve(i) })).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("k-best worker panicked"))
            .collect()
    })
}

/// Candidate graph for 0-1 slots `(P_i, c_i)`.
pub fn build_candidates(slots: &[(&dyn BinaryOracle, Objective)]) -> Result<CandidateGraph<BinaryPoint>> {
    let k = slots.len();
    let lists = run_slots(k, |i| kbest(slots[i].0, &slots[i].1, k))?;
    let objectives: Vec<Objective> = slots.iter().map(|s| s.1.clone()).collect();
    Ok(CandidateGraph::from_kbest(&lists, &objectives))
}

/// Candidate graph for integral slots, each restricted to `ambient`.
pub fn build_candidates_integral(
    slots: &[(&dyn IntegralOracle, Objective)],
    ambient: &LatticeBox,
) -> Result<CandidateGraph<LatticePoint>> {
    let k = slots.len();
    let lists = run_slots(k, |i| kbest_integral(slots[i].0, ambient, &slots[i].1, k))?;
    let objectives: Vec<Objective> = slots.iter().map(|s| s.1.clone()).collect();
    Ok(CandidateGraph::from_kbest(&lists, &objectives))
}

/// A matching covering every slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    /// `assignment[i]`: index into the candidate vertices for slot `i`.
    pub assignment: Vec<usize>,
    pub total: Rational,
}

/// Minimum-weight matching covering all slots, by successive shortest
/// augmenting paths with exact potentials. `None` if no such matching.
pub fn min_weight_r_matching<P: Vertex>(graph: &CandidateGraph<P>) -> Option<Matching> {
    let rows = graph.slots();
    let cols = graph.vertices.len();
    if rows == 0 {
        return Some(Matching {
            assignment: Vec::new(),
            total: Rational::zero(),
        });
    }
    if cols < rows {
        return None;
    }
    let mut cost: Vec<Vec<Option<Rational>>> = vec![vec![None; cols]; rows];
    for (i, e) in graph.edges.iter().enumerate() {
        for (j, w) in e {
            cost[i][*j] = Some(w.clone());
        }
    }
    // Row potentials start at the shortest source distances (row minima),
    // which makes every reduced cost nonnegative.
    let mut u: Vec<Rational> = Vec::with_capacity(rows);
    for row in &cost {
        u.push(row.iter().flatten().min()?.clone());
    }
    let mut v = vec![Rational::zero(); cols];
    let mut owner: Vec<Option<usize>> = vec![None; cols];
    for start in 0..rows {
        // Dijkstra over columns on reduced costs.
        let mut dist: Vec<Option<Rational>> = vec![None; cols];
        let mut via: Vec<usize> = vec![0; cols];
        let mut done = vec![false; cols];
        let mut row = start;
        let mut base = Rational::zero();
        let free_col = loop {
            for j in (0..cols).filter(|&j| !done[j]) {
                if let Some(c) = &cost[row][j] {
                    let d = &base + c - &u[row] - &v[j];
                    if dist[j].as_ref().map_or(true, |old| &d < old) {
                        dist[j] = Some(d);
                        via[j] = row;
                    }
                }
            }
            let (j, d) = (0..cols)
                .filter(|&j| !done[j])
                .filter_map(|j| dist[j].clone().map(|d| (j, d)))
                .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))?;
            done[j] = true;
            base = d;
            match owner[j] {
                None => break j,
                Some(r) => row = r,
            }
        };
        let end = base.clone();
        for j in (0..cols).filter(|&j| done[j]) {
            let dj = dist[j].clone().expect("settled");
            let delta = &end - &dj;
            v[j] -= &delta;
            if let Some(r) = owner[j] {
                u[r] += &delta;
            }
        }
        u[start] += &end;
        let mut j = free_col;
        loop {
            let r = via[j];
            let prev = (0..cols).find(|&c| owner[c] == Some(r));
            owner[j] = Some(r);
            match prev {
                Some(c) if r != start => j = c,
                _ => break,
            }
        }
    }
    let mut assignment = vec![0; rows];
    for (j, o) in owner.iter().enumerate() {
        if let Some(r) = o {
            assignment[*r] = j;
        }
    }
    let total = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j].clone().expect("matched along an edge"))
        .sum();
    Some(Matching { assignment, total })
}

/// Optimal distinct points `x_1..x_k` and their total.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlldiffSolution<P> {
    pub points: Vec<P>,
    pub values: Vec<Rational>,
    pub total: Rational,
}

fn finish<P: Vertex>(graph: &CandidateGraph<P>, objectives: &[Objective]) -> Option<AlldiffSolution<P>> {
    let m = min_weight_r_matching(graph)?;
    let points: Vec<P> = m.assignment.iter().map(|&j| graph.vertices[j].clone()).collect();
    let values = points.iter().zip(objectives).map(|(p, c)| p.value(c)).collect();
    Some(AlldiffSolution {
        points,
        values,
        total: m.total,
    })
}

/// Binary all-different problem; `None` if no distinct choice exists.
pub fn solve_alldiff(slots: &[(&dyn BinaryOracle, Objective)]) -> Result<Option<AlldiffSolution<BinaryPoint>>> {
    let graph = build_candidates(slots)?;
    let objectives: Vec<Objective> = slots.iter().map(|s| s.1.clone()).collect();
    Ok(finish(&graph, &objectives))
}

/// Integral all-different problem over `ambient`.
pub fn solve_alldiff_integral(
    slots: &[(&dyn IntegralOracle, Objective)],
    ambient: &LatticeBox,
) -> Result<Option<AlldiffSolution<LatticePoint>>> {
    let graph = build_candidates_integral(slots, ambient)?;
    let objectives: Vec<Objective> = slots.iter().map(|s| s.1.clone()).collect();
    Ok(finish(&graph, &objectives))
}
