//! Problem files: the JSON documents read by the `fvx` tool and the C
//! interface, and the commands run on them.
//!
//! ```json
//! {"kind": "binary", "n": 3, "polytope": {"type": "cube"},
//!  "objective": [1, "1/2", -2], "forbidden": ["000", "101"]}
//! ```
//!
//! Polytope types are `cube`, `cardinality` (`s`), `hrep` (`rows` of
//! `{a, rel, b}` plus optional 1-based `facets`), `spanning-tree` (`nodes`
//! and 1-based `edges`, one coordinate per edge) and `lattice-box` (`l`,
//! `u`). Integral problems take `hrep` or `lattice-box` and an optional
//! `ambient` box; without one the LP bounding box of the polytope is used.
//! All-different problems list `slots`, each with its own `polytope` and
//! `objective`.

use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::alldiff::{solve_alldiff, solve_alldiff_integral};
use crate::enumerate::{binary_points, lattice_points, lattice_points_of};
use crate::error::{FvxError, Result};
use crate::extension::{face_formulation, facet_intersection_formulation, interval_formulation, recursive_formulation};
use crate::geometry::{HPolytope, HRow, LatticeBox, Objective, Relation};
use crate::integral::{forbi_formulation, kbest_integral, solve_forbidden_integral};
use crate::lp::{LpResult, PreparedLp, Sense};
use crate::oracle::{
    cardinality_oracle, cube_oracle, hrep_binary_oracle, hrep_integral_oracle, lattice_box_oracle,
    spanning_tree_oracle, BinaryOracle, Counting, IntegralOracle, OracleOutcome, SpanningTreeOracle,
};
use crate::point::{BinaryPoint, LatticePoint, Vertex};
use crate::rational::{format_rational, int, parse_decimal, Rational};
use crate::separation::{kbest_with, solve_forbidden, KBest};
use crate::system::LinearSystem;
use crate::verify::{verify_formulation, VerificationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Binary,
    Integral,
}

/// An integer or a `"p"` / `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Bits(String),
    Coords(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowSpec {
    pub a: Vec<Number>,
    pub rel: Relation,
    pub b: Number,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub l: Vec<i64>,
    pub u: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PolytopeSpec {
    Cube,
    Cardinality {
        s: usize,
    },
    Hrep {
        rows: Vec<RowSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        facets: Option<Vec<usize>>,
    },
    SpanningTree {
        nodes: usize,
        edges: Vec<[usize; 2]>,
    },
    LatticeBox {
        l: Vec<i64>,
        u: Vec<i64>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotSpec {
    pub polytope: PolytopeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<Vec<Number>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: Kind,
    pub n: usize,
    pub polytope: PolytopeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<Vec<Number>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub forbidden: Vec<PointSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<BoxSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slots: Option<Vec<SlotSpec>>,
}

impl ProblemFile {
    /// Parses JSON; errors name the offending field path.
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "document".to_string() } else { path };
            FvxError::field(field, e.into_inner().to_string())
        })
    }

    /// Single-line JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("problem files serialize")
    }

    pub fn resolve(&self) -> Result<Problem> {
        Problem::from_file(self)
    }
}

/// Formulation builders selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Interval,
    Recursive,
    Faces,
    FacetIntersection,
    Boxes,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Interval,
        Method::Recursive,
        Method::Faces,
        Method::FacetIntersection,
        Method::Boxes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Interval => "interval",
            Method::Recursive => "recursive",
            Method::Faces => "faces",
            Method::FacetIntersection => "facet-intersection",
            Method::Boxes => "boxes",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = FvxError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| FvxError::field("method", format!("unknown method {s:?}")))
    }
}

/// A resolved 0-1 polytope.
#[derive(Clone, Debug)]
pub enum BinaryModel {
    Cube(usize),
    Cardinality { n: usize, s: usize },
    Hrep { polytope: HPolytope, facets: Vec<usize> },
    SpanningTree(SpanningTreeOracle),
}

impl BinaryModel {
    pub fn dim(&self) -> usize {
        match self {
            BinaryModel::Cube(n) | BinaryModel::Cardinality { n, .. } => *n,
            BinaryModel::Hrep { polytope, .. } => polytope.dim(),
            BinaryModel::SpanningTree(t) => t.dim(),
        }
    }

    pub fn oracle(&self) -> Result<Box<dyn BinaryOracle>> {
        Ok(match self {
            BinaryModel::Cube(n) => Box::new(cube_oracle(*n)?),
            BinaryModel::Cardinality { n, s } => Box::new(cardinality_oracle(*n, *s)?),
            BinaryModel::Hrep { polytope, .. } => Box::new(hrep_binary_oracle(polytope.clone())?),
            BinaryModel::SpanningTree(t) => Box::new(t.clone()),
        })
    }

    /// Explicit rows, when the polytope has a small description.
    pub fn polytope(&self) -> Option<HPolytope> {
        match self {
            BinaryModel::Cube(n) => Some(HPolytope::cube(*n)),
            BinaryModel::Cardinality { n, s } => HPolytope::cube(*n)
                .with_row(HRow::from_ints(&vec![1; *n], Relation::Eq, *s as i64))
                .ok(),
            BinaryModel::Hrep { polytope, .. } => Some(polytope.clone()),
            BinaryModel::SpanningTree(_) => None,
        }
    }

    /// 0-based facet rows used by the facet-intersection builder.
    pub fn facets(&self) -> Option<Vec<usize>> {
        match self {
            BinaryModel::Hrep { facets, .. } => Some(facets.clone()),
            _ => {
                let p = self.polytope()?;
                Some((0..p.rows().len()).filter(|&i| p.rows()[i].is_inequality()).collect())
            }
        }
    }

    /// All vertices, sorted.
    pub fn vertices(&self) -> Result<Vec<BinaryPoint>> {
        let n = self.dim();
        match self {
            BinaryModel::Cube(_) => binary_points(n, |_| true),
            BinaryModel::Cardinality { s, .. } => binary_points(n, |v| v.bits().count_ones() as usize == *s),
            BinaryModel::Hrep { polytope, .. } => binary_points(n, |v| polytope.contains(&v.to_rationals())),
            BinaryModel::SpanningTree(t) => binary_points(n, |v| t.is_tree(v)),
        }
    }
}

/// A resolved box-integral polytope.
#[derive(Clone, Debug)]
pub enum IntegralModel {
    Box(LatticeBox),
    Hrep(HPolytope),
}

impl IntegralModel {
    pub fn oracle(&self) -> Box<dyn IntegralOracle> {
        match self {
            IntegralModel::Box(b) => Box::new(lattice_box_oracle(b.clone())),
            IntegralModel::Hrep(p) => Box::new(hrep_integral_oracle(p.clone())),
        }
    }

    pub fn polytope(&self) -> HPolytope {
        match self {
            IntegralModel::Box(b) => {
                let l: Vec<i64> = b.lower().coords().iter().map(|v| v.to_i64().unwrap_or(i64::MIN)).collect();
                let u: Vec<i64> = b.upper().coords().iter().map(|v| v.to_i64().unwrap_or(i64::MAX)).collect();
                HPolytope::integer_box(&l, &u)
            }
            IntegralModel::Hrep(p) => p.clone(),
        }
    }

    /// Lattice points inside `ambient`, sorted.
    pub fn points(&self, ambient: &LatticeBox) -> Result<Vec<LatticePoint>> {
        match self {
            IntegralModel::Box(b) => match b.intersect(ambient) {
                Some(b) => lattice_points(&b, |_| true),
                None => Ok(Vec::new()),
            },
            IntegralModel::Hrep(p) => lattice_points_of(p, ambient),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BinaryProblem {
    pub model: BinaryModel,
    pub objective: Option<Objective>,
    pub forbidden: Vec<BinaryPoint>,
    pub k: Option<usize>,
    pub slots: Option<Vec<(BinaryModel, Option<Objective>)>>,
}

#[derive(Clone, Debug)]
pub struct IntegralProblem {
    pub model: IntegralModel,
    pub objective: Option<Objective>,
    pub forbidden: Vec<LatticePoint>,
    pub ambient: LatticeBox,
    pub k: Option<usize>,
    pub slots: Option<Vec<(IntegralModel, Option<Objective>)>>,
}

#[derive(Clone, Debug)]
pub enum Problem {
    Binary(BinaryProblem),
    Integral(IntegralProblem),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    pub status: String,
    pub value: Option<String>,
    pub vertex: Option<Value>,
    pub oracle_calls: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankedVertex {
    pub vertex: Value,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KBestReport {
    pub k: usize,
    pub vertices: Vec<RankedVertex>,
    pub exhausted: bool,
    pub oracle_calls: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlotAssignment {
    pub slot: usize,
    pub vertex: Value,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlldiffReport {
    pub status: String,
    pub total: Option<String>,
    pub assignment: Vec<SlotAssignment>,
    pub oracle_calls: usize,
}

/// JSON form of a point: a bitstring or an integer array.
pub trait PointJson {
    fn to_json(&self) -> Value;
}

impl PointJson for BinaryPoint {
    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
}

impl PointJson for LatticePoint {
    fn to_json(&self) -> Value {
        Value::Array(
            self.coords()
                .iter()
                .map(|v| v.to_i64().map_or_else(|| Value::String(v.to_string()), |x| json!(x)))
                .collect(),
        )
    }
}

fn number(v: &Number, field: impl FnOnce() -> String) -> Result<Rational> {
    match v {
        Number::Int(i) => Ok(int(*i)),
        Number::Text(s) => parse_decimal(s).map_err(|e| FvxError::field(field(), e.to_string())),
    }
}

fn objective(spec: &Option<Vec<Number>>, n: usize, field: &str) -> Result<Option<Objective>> {
    let Some(c) = spec else { return Ok(None) };
    if c.len() != n {
        return Err(FvxError::field(field, format!("expected {n} coefficients, got {}", c.len())));
    }
    let coeffs = c
        .iter()
        .enumerate()
        .map(|(i, v)| number(v, || format!("{field}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(Objective::new(coeffs)))
}

fn check_len(len: usize, n: usize, field: &str) -> Result<()> {
    if len != n {
        return Err(FvxError::field(field, format!("expected length {n}, got {len}")));
    }
    Ok(())
}

fn lattice_box(l: &[i64], u: &[i64], n: usize, field: &str) -> Result<LatticeBox> {
    check_len(l.len(), n, &format!("{field}.l"))?;
    check_len(u.len(), n, &format!("{field}.u"))?;
    LatticeBox::new(LatticePoint::from_ints(l), LatticePoint::from_ints(u)).map_err(|e| FvxError::field(field, e.to_string()))
}

fn hrep(rows: &[RowSpec], n: usize, field: &str) -> Result<HPolytope> {
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let at = format!("{field}.rows[{i}]");
        check_len(r.a.len(), n, &format!("{at}.a"))?;
        let a = r
            .a
            .iter()
            .enumerate()
            .map(|(j, v)| number(v, || format!("{at}.a[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        let b = number(&r.b, || format!("{at}.b"))?;
        out.push(HRow::new(a, r.rel, b));
    }
    HPolytope::new(n, out)
}

fn binary_model(spec: &PolytopeSpec, n: usize, field: &str) -> Result<BinaryModel> {
    let wrap = |e: FvxError| FvxError::field(field, e.to_string());
    if n == 0 {
        return Err(FvxError::field("n", "dimension must be positive"));
    }
    BinaryPoint::zeros(n).map_err(|e| FvxError::field("n", e.to_string()))?;
    match spec {
        PolytopeSpec::Cube => Ok(BinaryModel::Cube(n)),
        PolytopeSpec::Cardinality { s } => {
            cardinality_oracle(n, *s).map_err(|e| FvxError::field(format!("{field}.s"), e.to_string()))?;
            Ok(BinaryModel::Cardinality { n, s: *s })
        }
        PolytopeSpec::Hrep { rows, facets } => {
            let polytope = hrep(rows, n, field)?;
            let facets = match facets {
                Some(list) => list
                    .iter()
                    .enumerate()
                    .map(|(i, &f)| {
                        if f == 0 || f > rows.len() {
                            Err(FvxError::field(
                                format!("{field}.facets[{i}]"),
                                format!("row {f} does not exist (rows are numbered from 1)"),
                            ))
                        } else {
                            Ok(f - 1)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?,
                None => (0..rows.len()).filter(|&i| polytope.rows()[i].is_inequality()).collect(),
            };
            Ok(BinaryModel::Hrep { polytope, facets })
        }
        PolytopeSpec::SpanningTree { nodes, edges } => {
            check_len(edges.len(), n, &format!("{field}.edges"))?;
            let mut zero_based = Vec::with_capacity(edges.len());
            for (i, &[a, b]) in edges.iter().enumerate() {
                if a == 0 || b == 0 {
                    return Err(FvxError::field(
                        format!("{field}.edges[{i}]"),
                        "nodes are numbered from 1",
                    ));
                }
                zero_based.push((a - 1, b - 1));
            }
            Ok(BinaryModel::SpanningTree(spanning_tree_oracle(*nodes, zero_based).map_err(wrap)?))
        }
        PolytopeSpec::LatticeBox { .. } => Err(FvxError::field(
            format!("{field}.type"),
            "lattice-box requires kind \"integral\"",
        )),
    }
}

fn integral_model(spec: &PolytopeSpec, n: usize, field: &str) -> Result<IntegralModel> {
    if n == 0 {
        return Err(FvxError::field("n", "dimension must be positive"));
    }
    match spec {
        PolytopeSpec::LatticeBox { l, u } => Ok(IntegralModel::Box(lattice_box(l, u, n, field)?)),
        PolytopeSpec::Hrep { rows, facets } => {
            if facets.is_some() {
                return Err(FvxError::field(format!("{field}.facets"), "facets apply to binary problems only"));
            }
            Ok(IntegralModel::Hrep(hrep(rows, n, field)?))
        }
        _ => Err(FvxError::field(
            format!("{field}.type"),
            "integral problems take \"hrep\" or \"lattice-box\"",
        )),
    }
}

/// Smallest integer box containing `p`.
fn bounding_box(p: &HPolytope) -> Result<LatticeBox> {
    let n = p.dim();
    let lp = PreparedLp::new(&LinearSystem::from_hpolytope(p));
    if !lp.is_feasible() {
        return LatticeBox::new(LatticePoint::from_ints(&vec![0; n]), LatticePoint::from_ints(&vec![0; n]));
    }
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for j in 0..n {
        let e = vec![(j, Rational::from_integer(1.into()))];
        for (sense, out) in [(Sense::Minimize, &mut lo), (Sense::Maximize, &mut hi)] {
            match lp.solve(&e, sense) {
                LpResult::Optimal { value, .. } => out.push(if sense == Sense::Minimize {
                    value.ceil().to_integer()
                } else {
                    value.floor().to_integer()
                }),
                _ => return Err(FvxError::UnboundedInput),
            }
        }
    }
    if lo.iter().zip(&hi).any(|(l, u)| l > u) {
        return LatticeBox::new(LatticePoint::from_ints(&vec![0; n]), LatticePoint::from_ints(&vec![0; n]));
    }
    LatticeBox::new(LatticePoint::new(lo), LatticePoint::new(hi))
}

fn binary_point(p: &PointSpec, n: usize, field: &str) -> Result<BinaryPoint> {
    let v = match p {
        PointSpec::Bits(s) => BinaryPoint::parse(s).map_err(|e| FvxError::field(field, e.to_string()))?,
        PointSpec::Coords(c) => {
            if c.iter().any(|&x| x != 0 && x != 1) {
                return Err(FvxError::field(field, "coordinates must be 0 or 1"));
            }
            BinaryPoint::from_coords(&c.iter().map(|&x| x == 1).collect::<Vec<_>>())
                .map_err(|e| FvxError::field(field, e.to_string()))?
        }
    };
    check_len(v.dim(), n, field)?;
    Ok(v)
}

fn lattice_point(p: &PointSpec, n: usize, field: &str) -> Result<LatticePoint> {
    match p {
        PointSpec::Coords(c) => {
            check_len(c.len(), n, field)?;
            Ok(LatticePoint::from_ints(c))
        }
        PointSpec::Bits(_) => Err(FvxError::field(field, "integral points are integer arrays")),
    }
}

fn point_values<P: Vertex + PointJson>(points: &[P], c: &Objective) -> Vec<RankedVertex> {
    points
        .iter()
        .map(|p| RankedVertex {
            vertex: p.to_json(),
            value: format_rational(&p.value(c)),
        })
        .collect()
}

fn solve_report<P: Vertex + PointJson>(out: OracleOutcome<P>, calls: usize) -> SolveReport {
    match out {
        OracleOutcome::Infeasible => SolveReport {
            status: "infeasible".into(),
            value: None,
            vertex: None,
            oracle_calls: calls,
        },
        OracleOutcome::Optimum { vertex, value } => SolveReport {
            status: "optimal".into(),
            value: Some(format_rational(&value)),
            vertex: Some(vertex.to_json()),
            oracle_calls: calls,
        },
    }
}

fn kbest_report<P: Vertex + PointJson>(k: usize, found: KBest<P>, c: &Objective, calls: usize) -> KBestReport {
    KBestReport {
        k,
        vertices: point_values(&found.points, c),
        exhausted: found.exhausted,
        oracle_calls: calls,
    }
}

fn alldiff_report<P: Vertex + PointJson>(
    solution: Option<crate::alldiff::AlldiffSolution<P>>,
    calls: usize,
) -> AlldiffReport {
    match solution {
        None => AlldiffReport {
            status: "infeasible".into(),
            total: None,
            assignment: Vec::new(),
            oracle_calls: calls,
        },
        Some(s) => AlldiffReport {
            status: "optimal".into(),
            total: Some(format_rational(&s.total)),
            assignment: s
                .points
                .iter()
                .zip(&s.values)
                .enumerate()
                .map(|(i, (p, v))| SlotAssignment {
                    slot: i + 1,
                    vertex: p.to_json(),
                    value: format_rational(v),
                })
                .collect(),
            oracle_calls: calls,
        },
    }
}

fn required(c: &Option<Objective>, field: &str) -> Result<Objective> {
    c.clone()
        .ok_or_else(|| FvxError::field(field, "an objective is required for this command"))
}

fn incompatible(method: Method, reason: &str) -> FvxError {
    FvxError::IncompatibleMethod {
        method: method.name().into(),
        reason: reason.into(),
    }
}

fn dedup<P: Ord>(mut v: Vec<P>) -> Vec<P> {
    v.sort();
    v.dedup();
    v
}

impl Problem {
    pub fn parse(text: &str) -> Result<Self> {
        ProblemFile::parse(text)?.resolve()
    }

    pub fn from_file(file: &ProblemFile) -> Result<Self> {
        let n = file.n;
        match file.kind {
            Kind::Binary => {
                if file.ambient.is_some() {
                    return Err(FvxError::field("ambient", "ambient boxes apply to integral problems only"));
                }
                let model = binary_model(&file.polytope, n, "polytope")?;
                let forbidden = file
                    .forbidden
                    .iter()
                    .enumerate()
                    .map(|(i, p)| binary_point(p, n, &format!("forbidden[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                let slots = match &file.slots {
                    None => None,
                    Some(list) => Some(
                        list.iter()
                            .enumerate()
                            .map(|(i, s)| {
                                let at = format!("slots[{i}]");
                                Ok((
                                    binary_model(&s.polytope, n, &format!("{at}.polytope"))?,
                                    objective(&s.objective, n, &format!("{at}.objective"))?,
                                ))
                            })
                            .collect::<Result<Vec<_>>>()?,
                    ),
                };
                Ok(Problem::Binary(BinaryProblem {
                    model,
                    objective: objective(&file.objective, n, "objective")?,
                    forbidden: dedup(forbidden),
                    k: file.k,
                    slots,
                }))
            }
            Kind::Integral => {
                let model = integral_model(&file.polytope, n, "polytope")?;
                let ambient = match (&file.ambient, &model) {
                    (Some(b), _) => lattice_box(&b.l, &b.u, n, "ambient")?,
                    (None, IntegralModel::Box(b)) => b.clone(),
                    (None, IntegralModel::Hrep(p)) => bounding_box(p)?,
                };
                let forbidden = file
                    .forbidden
                    .iter()
                    .enumerate()
                    .map(|(i, p)| lattice_point(p, n, &format!("forbidden[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                let slots = match &file.slots {
                    None => None,
                    Some(list) => Some(
                        list.iter()
                            .enumerate()
                            .map(|(i, s)| {
                                let at = format!("slots[{i}]");
                                Ok((
                                    integral_model(&s.polytope, n, &format!("{at}.polytope"))?,
                                    objective(&s.objective, n, &format!("{at}.objective"))?,
                                ))
                            })
                            .collect::<Result<Vec<_>>>()?,
                    ),
                };
                Ok(Problem::Integral(IntegralProblem {
                    model,
                    objective: objective(&file.objective, n, "objective")?,
                    forbidden: dedup(forbidden),
                    ambient,
                    k: file.k,
                    slots,
                }))
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Problem::Binary(b) => b.model.dim(),
            Problem::Integral(p) => p.ambient.dim(),
        }
    }

    /// `k` from the argument, else from the file.
    pub fn k(&self, k: Option<usize>) -> Result<usize> {
        let file_k = match self {
            Problem::Binary(b) => b.k,
            Problem::Integral(p) => p.k,
        };
        k.or(file_k).ok_or_else(|| FvxError::field("k", "k is required for this command"))
    }

    /// Minimizes the objective over the allowed vertices.
    pub fn solve(&self) -> Result<SolveReport> {
        match self {
            Problem::Binary(b) => {
                let c = required(&b.objective, "objective")?;
                let oracle = Counting::new(b.model.oracle()?);
                let out = solve_forbidden(&oracle, &b.forbidden, &c)?;
                Ok(solve_report(out, oracle.calls()))
            }
            Problem::Integral(p) => {
                let c = required(&p.objective, "objective")?;
                let oracle = Counting::new(p.model.oracle());
                let out = solve_forbidden_integral(&oracle, &p.forbidden, &p.ambient, &c)?;
                Ok(solve_report(out, oracle.calls()))
            }
        }
    }

    /// The `k` best allowed vertices.
    pub fn kbest(&self, k: usize) -> Result<KBestReport> {
        match self {
            Problem::Binary(b) => {
                let c = required(&b.objective, "objective")?;
                let oracle = Counting::new(b.model.oracle()?);
                let found = kbest_with(k, |extra| {
                    let x: Vec<BinaryPoint> = b.forbidden.iter().chain(extra).cloned().collect();
                    solve_forbidden(&oracle, &x, &c)
                })?;
                Ok(kbest_report(k, found, &c, oracle.calls()))
            }
            Problem::Integral(p) => {
                let c = required(&p.objective, "objective")?;
                let oracle = Counting::new(p.model.oracle());
                let found = if p.forbidden.is_empty() {
                    kbest_integral(&oracle, &p.ambient, &c, k)?
                } else {
                    kbest_with(k, |extra| {
                        let x: Vec<LatticePoint> = p.forbidden.iter().chain(extra).cloned().collect();
                        solve_forbidden_integral(&oracle, &x, &p.ambient, &c)
                    })?
                };
                Ok(kbest_report(k, found, &c, oracle.calls()))
            }
        }
    }

    /// All-different over the listed slots.
    pub fn alldiff(&self) -> Result<AlldiffReport> {
        let missing = || FvxError::field("slots", "the all-different command needs a slots list");
        match self {
            Problem::Binary(b) => {
                let slots = b.slots.as_ref().ok_or_else(missing)?;
                let mut oracles = Vec::with_capacity(slots.len());
                let mut objectives = Vec::with_capacity(slots.len());
                for (i, (m, c)) in slots.iter().enumerate() {
                    oracles.push(Counting::new(m.oracle()?));
                    objectives.push(required(c, &format!("slots[{i}].objective"))?);
                }
                let list: Vec<(&dyn BinaryOracle, Objective)> = oracles
                    .iter()
                    .zip(&objectives)
                    .map(|(o, c)| (o as &dyn BinaryOracle, c.clone()))
                    .collect();
                let solution = solve_alldiff(&list)?;
                Ok(alldiff_report(solution, oracles.iter().map(Counting::calls).sum()))
            }
            Problem::Integral(p) => {
                let slots = p.slots.as_ref().ok_or_else(missing)?;
                let mut oracles = Vec::with_capacity(slots.len());
                let mut objectives = Vec::with_capacity(slots.len());
                for (i, (m, c)) in slots.iter().enumerate() {
                    oracles.push(Counting::new(m.oracle()));
                    objectives.push(required(c, &format!("slots[{i}].objective"))?);
                }
                let list: Vec<(&dyn IntegralOracle, Objective)> = oracles
                    .iter()
                    .zip(&objectives)
                    .map(|(o, c)| (o as &dyn IntegralOracle, c.clone()))
                    .collect();
                let solution = solve_alldiff_integral(&list, &p.ambient)?;
                Ok(alldiff_report(solution, oracles.iter().map(Counting::calls).sum()))
            }
        }
    }

    /// The builder used when none is named.
    pub fn default_method(&self) -> Method {
        match self {
            Problem::Binary(BinaryProblem {
                model: BinaryModel::Cube(_),
                ..
            }) => Method::Recursive,
            Problem::Binary(_) => Method::Faces,
            Problem::Integral(_) => Method::Boxes,
        }
    }

    /// Builds the extended formulation of the allowed hull.
    pub fn compile(&self, method: Method) -> Result<LinearSystem> {
        match (self, method) {
            (Problem::Binary(b), Method::Interval | Method::Recursive) => {
                let BinaryModel::Cube(n) = b.model else {
                    return Err(incompatible(method, "polytopes other than the cube"));
                };
                if method == Method::Interval {
                    interval_formulation(&b.forbidden, n)
                } else {
                    recursive_formulation(&b.forbidden, n)
                }
            }
            (Problem::Binary(b), Method::Faces | Method::FacetIntersection) => {
                let p = b
                    .model
                    .polytope()
                    .ok_or_else(|| incompatible(method, "polytopes without explicit rows"))?;
                if method == Method::Faces {
                    face_formulation(&p, &b.forbidden)
                } else {
                    let facets = b.model.facets().unwrap_or_default();
                    facet_intersection_formulation(&p, &facets, &b.forbidden)
                }
            }
            (Problem::Binary(_), Method::Boxes) => Err(incompatible(method, "binary problems")),
            (Problem::Integral(p), Method::Boxes) => forbi_formulation(&p.model.polytope(), &p.forbidden, &p.ambient),
            (Problem::Integral(_), _) => Err(incompatible(method, "integral problems")),
        }
    }

    /// Allowed vertices (binary) or lattice points (integral), sorted, as
    /// display strings.
    pub fn enumerate(&self) -> Result<Vec<String>> {
        Ok(match self {
            Problem::Binary(b) => self
                .binary_truth(b)?
                .0
                .iter()
                .map(ToString::to_string)
                .collect(),
            Problem::Integral(p) => self
                .integral_truth(p)?
                .0
                .iter()
                .map(ToString::to_string)
                .collect(),
        })
    }

    fn binary_truth(&self, b: &BinaryProblem) -> Result<(Vec<BinaryPoint>, Vec<BinaryPoint>)> {
        let all = b.model.vertices()?;
        let allowed = all.into_iter().filter(|v| b.forbidden.binary_search(v).is_err()).collect();
        Ok((allowed, b.forbidden.clone()))
    }

    fn integral_truth(&self, p: &IntegralProblem) -> Result<(Vec<LatticePoint>, Vec<LatticePoint>)> {
        let all = p.model.points(&p.ambient)?;
        let allowed = all.into_iter().filter(|v| p.forbidden.binary_search(v).is_err()).collect();
        Ok((allowed, p.forbidden.clone()))
    }

    /// Checks `system` against the enumerated ground truth.
    pub fn verify(&self, system: &LinearSystem, trials: usize, seed: u64) -> Result<VerificationReport> {
        if system.original != self.dim() {
            return Err(FvxError::DimensionMismatch {
                expected: self.dim(),
                got: system.original,
            });
        }
        match self {
            Problem::Binary(b) => {
                let (allowed, forbidden) = self.binary_truth(b)?;
                verify_formulation(system, &allowed, &forbidden, trials, seed)
            }
            Problem::Integral(p) => {
                let (allowed, forbidden) = self.integral_truth(p)?;
                verify_formulation(system, &allowed, &forbidden, trials, seed)
            }
        }
    }
}
