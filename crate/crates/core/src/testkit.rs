//! Brute-force helpers shared by unit tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{HPolytope, Objective};
use crate::lp::{original_objective, LpResult, PreparedLp, Sense};
use crate::point::{BinaryPoint, Vertex};
use crate::rational::Rational;
use crate::system::LinearSystem;

pub fn bp(s: &str) -> BinaryPoint {
    BinaryPoint::parse(s).unwrap()
}

pub fn bps(s: &[&str]) -> Vec<BinaryPoint> {
    s.iter().map(|s| bp(s)).collect()
}

/// Binary points of `P` (which are its vertices for a 0-1 polytope).
pub fn binary_points(p: &HPolytope) -> Vec<BinaryPoint> {
    BinaryPoint::all(p.dim())
        .unwrap()
        .filter(|v| p.contains(&v.to_rationals()))
        .collect()
}

pub fn brute_min<P: Vertex>(points: &[P], c: &Objective) -> Option<Rational> {
    points.iter().map(|p| p.value(c)).min()
}

pub fn random_objective(rng: &mut ChaCha8Rng, n: usize, range: i64) -> Objective {
    Objective::from_ints(&(0..n).map(|_| rng.gen_range(-range..=range)).collect::<Vec<_>>())
}

/// Checks LP minimization over `sys` against brute force over `points` for
/// `trials` random directions plus both signs of every unit vector.
pub fn assert_support<P: Vertex>(sys: &LinearSystem, points: &[P], trials: usize, seed: u64) {
    let n = sys.original;
    let lp = PreparedLp::new(sys);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs: Vec<Objective> = Vec::new();
    for j in 0..n {
        for s in [-1, 1] {
            let mut c = vec![0; n];
            c[j] = s;
            dirs.push(Objective::from_ints(&c));
        }
    }
    dirs.extend((0..trials).map(|_| random_objective(&mut rng, n, 10)));
    for c in dirs {
        let got = lp.solve(&original_objective(c.coeffs()), Sense::Minimize);
        match brute_min(points, &c) {
            None => assert_eq!(got, LpResult::Infeasible, "expected empty, c={c:?}"),
            Some(v) => assert_eq!(got.value(), Some(&v), "c={c:?}"),
        }
    }
}

/// Every allowed point is feasible and every forbidden point infeasible.
pub fn assert_membership(sys: &LinearSystem, allowed: &[BinaryPoint], forbidden: &[BinaryPoint]) {
    let fix = |v: &BinaryPoint| -> bool {
        let f: Vec<_> = v.to_rationals().into_iter().enumerate().collect();
        PreparedLp::new(&sys.with_fixings(&f)).is_feasible()
    };
    for v in allowed {
        assert!(fix(v), "{v} should be feasible");
    }
    for v in forbidden {
        assert!(!fix(v), "{v} should be infeasible");
    }
}
