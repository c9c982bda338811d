//! Checks a formulation against an explicit ground truth: random support
//! directions, exhaustive membership and exclusion probes, and an audit of
//! the size certificate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::enumerate::MAX_POINTS;
use crate::error::{FvxError, Result};
use crate::geometry::Objective;
use crate::lp::{in_convex_hull, original_objective, LpResult, PreparedLp, Sense};
use crate::point::Vertex;
use crate::rational::{format_rational, Rational};
use crate::system::LinearSystem;

/// Objective coefficients are drawn from `[-OBJECTIVE_RANGE, OBJECTIVE_RANGE]`.
pub const OBJECTIVE_RANGE: i64 = 100;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportMismatch {
    pub trial: usize,
    pub c: Vec<i64>,
    pub lp: String,
    pub brute: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub verdict: String,
    pub method: String,
    pub seed: u64,
    pub trials: usize,
    pub allowed_points: usize,
    pub forbidden_points: usize,
    pub support_mismatches: Vec<SupportMismatch>,
    /// Forbidden points whose LP feasibility disagrees with membership in
    /// the hull of the allowed points (for forbidden vertices: found
    /// feasible).
    pub excluded_failures: Vec<String>,
    /// Allowed points found infeasible.
    pub membership_failures: Vec<String>,
    pub inequalities: usize,
    pub bound: usize,
    pub bound_formula: String,
    pub size_ok: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.support_mismatches.is_empty()
            && self.excluded_failures.is_empty()
            && self.membership_failures.is_empty()
            && self.size_ok
    }
}

/// Runs `f` over `items` on all cores, keeping input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| {
                let f = &f;
                scope.spawn(move || part.iter().map(f).collect::<Vec<R>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

fn describe(r: &LpResult) -> String {
    match r {
        LpResult::Optimal { value, .. } => format_rational(value),
        LpResult::Infeasible => "infeasible".into(),
        LpResult::Unbounded => "unbounded".into(),
    }
}

/// Seeded integer objectives for `trials` support checks.
pub fn random_objectives(n: usize, trials: usize, seed: u64) -> Vec<Vec<i64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| (0..n).map(|_| rng.gen_range(-OBJECTIVE_RANGE..=OBJECTIVE_RANGE)).collect())
        .collect()
}

fn probe(system: &LinearSystem, point: &[Rational]) -> bool {
    let fixings: Vec<(usize, Rational)> = point.iter().cloned().enumerate().collect();
    PreparedLp::new(&system.with_fixings(&fixings)).is_feasible()
}

/// Verifies that `system` projects onto `conv(allowed)`.
pub fn verify_formulation<P: Vertex>(
    system: &LinearSystem,
    allowed: &[P],
    forbidden: &[P],
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let n = system.original;
    if allowed.len() + forbidden.len() > MAX_POINTS {
        return Err(FvxError::GuardExceeded(format!(
            "{} ground-truth points exceed {MAX_POINTS}",
            allowed.len() + forbidden.len()
        )));
    }
    if let Some(p) = allowed.iter().chain(forbidden).find(|p| p.dim() != n) {
        return Err(FvxError::DimensionMismatch {
            expected: n,
            got: p.dim(),
        });
    }
    system.validate()?;
    let lp = PreparedLp::new(system);
    let objectives = random_objectives(n, trials, seed);
    let indexed: Vec<(usize, &Vec<i64>)> = objectives.iter().enumerate().collect();
    let support_mismatches: Vec<SupportMismatch> = par_map(&indexed, |(trial, c)| {
        let obj = Objective::from_ints(c);
        let got = lp.solve(&original_objective(obj.coeffs()), Sense::Minimize);
        let brute = allowed.iter().map(|p| p.value(&obj)).min();
        let agree = match (&got, &brute) {
            (LpResult::Optimal { value, .. }, Some(b)) => value == b,
            (LpResult::Infeasible, None) => true,
            _ => false,
        };
        (!agree).then(|| SupportMismatch {
            trial: *trial,
            c: (*c).clone(),
            lp: describe(&got),
            brute: brute.as_ref().map_or("infeasible".into(), format_rational),
        })
    })
    .into_iter()
    .flatten()
    .collect();

    let truth: Vec<Vec<Rational>> = allowed.iter().map(Vertex::to_rationals).collect();
    let membership_failures = par_map(allowed, |p| (!probe(system, &p.to_rationals())).then(|| p.to_string()))
        .into_iter()
        .flatten()
        .collect();
    let excluded_failures = par_map(forbidden, |p| {
        let pt = p.to_rationals();
        (probe(system, &pt) != in_convex_hull(&pt, &truth)).then(|| p.to_string())
    })
    .into_iter()
    .flatten()
    .collect();

    let inequalities = system.inequality_count();
    let size_ok = inequalities == system.meta.inequalities && inequalities <= system.meta.bound;
    let mut report = VerificationReport {
        verdict: String::new(),
        method: system.meta.method.clone(),
        seed,
        trials,
        allowed_points: allowed.len(),
        forbidden_points: forbidden.len(),
        support_mismatches,
        excluded_failures,
        membership_failures,
        inequalities,
        bound: system.meta.bound,
        bound_formula: system.meta.bound_formula.clone(),
        size_ok,
    };
    report.verdict = if report.passed() { "pass" } else { "fail" }.into();
    Ok(report)
}

/// Doubles the right-hand side of the multiplier row `sum lam = 1`, which
/// scales the projection; used to check that verification notices.
pub fn plant_corruption(system: &LinearSystem) -> Option<LinearSystem> {
    let mut out = system.clone();
    let row = out.rows.iter_mut().rev().find(|r| {
        r.rel == crate::geometry::Relation::Eq
            && r.rhs == num_bigint::BigInt::from(1)
            && r.terms
                .iter()
                .all(|(v, _)| system.variables[*v].name.starts_with("lam"))
    })?;
    row.rhs = num_bigint::BigInt::from(2);
    Some(out)
}
