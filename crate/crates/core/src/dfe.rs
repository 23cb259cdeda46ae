//! The discrete functional equation on the graph.
//!
//! A vertex function `u` is a *subsolution* at level `a` when
//! `du(e) = u(t(e)) - u(o(e)) <= σ_a(e)` on every directed edge, and a
//! *solution* when additionally at every vertex the minimum
//!
//! ```text
//!     min over e in E_x of ( u(t(e)) + σ_a(-e) )  -  u(x)
//! ```
//!
//! vanishes. Solutions of the discrete equation are exactly the vertex
//! traces of solutions on the network.
//!
//! Traces are *admissible* when `g(x) - g(y) <= S_a(y,x)` pairwise; the
//! Hopf–Lax formula `v(x) = min over y of g(y) + S_a(y,x)` extends an
//! admissible trace to the unique solution — on all of `V` when the
//! support sits inside the projected Aubry set at the critical level,
//! and off the support at supercritical levels.
//!
//! Vertex functions derived from table rows use the value 0 at the base
//! point (the distance of a point to itself along the empty path); the
//! table diagonal itself is the cheapest nontrivial cycle and belongs to
//! the Aubry test, not to these functions.

use std::collections::BTreeSet;

use crate::aubry::AubryData;
use crate::critical::{DistanceTable, LevelWeights};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};

/// Real function on the vertices at a fixed level.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction {
    pub level: f64,
    pub values: Vec<f64>,
}

impl VertexFunction {
    pub fn new(level: f64, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse(
                "vertex function has a non-finite value".into(),
            ));
        }
        Ok(VertexFunction { level, values })
    }

    pub fn value(&self, x: VertexId) -> f64 {
        self.values[x.0]
    }

    /// Coboundary `du(e) = u(t(e)) - u(o(e))`.
    pub fn coboundary(&self, g: &Graph, e: EdgeId) -> f64 {
        let edge = g.edge(e);
        self.values[edge.terminus.0] - self.values[edge.origin.0]
    }

    pub fn max_abs_difference(&self, other: &VertexFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `S_a(y, ·)` as a vertex function (value 0 at `y`).
pub fn row_function(table: &DistanceTable, y: VertexId) -> VertexFunction {
    let values = (0..table.vertex_count())
        .map(|x| {
            if x == y.0 {
                0.0
            } else {
                table.value(y, VertexId(x))
            }
        })
        .collect();
    VertexFunction {
        level: table.level,
        values,
    }
}

/// `-S_a(·, y)` as a vertex function (value 0 at `y`).
pub fn neg_column_function(table: &DistanceTable, y: VertexId) -> VertexFunction {
    let values = (0..table.vertex_count())
        .map(|x| {
            if x == y.0 {
                0.0
            } else {
                -table.value(VertexId(x), y)
            }
        })
        .collect();
    VertexFunction {
        level: table.level,
        values,
    }
}

#[derive(Debug, Clone)]
pub struct SubsolutionReport {
    pub ok: bool,
    /// `(edge, excess)` with `excess = du(e) - σ_a(e) > tol`.
    pub violations: Vec<(EdgeId, f64)>,
}

/// Checks `du(e) <= σ_a(e) + tol` on every directed edge.
pub fn check_subsolution(
    u: &VertexFunction,
    g: &Graph,
    w: &LevelWeights,
    tol: f64,
) -> SubsolutionReport {
    let mut violations = Vec::new();
    for e in g.edges() {
        let excess = u.coboundary(g, e.id) - w.weight(e.id);
        if excess > tol {
            violations.push((e.id, excess));
        }
    }
    SubsolutionReport {
        ok: violations.is_empty(),
        violations,
    }
}

#[derive(Debug, Clone)]
pub struct VertexVerdict {
    pub vertex: VertexId,
    /// `min over the star - u(x)`; nonnegative for subsolutions.
    pub residual: f64,
    /// Star edge achieving the minimum (lowest id on ties).
    pub achieving: EdgeId,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct SolutionReport {
    pub ok: bool,
    pub per_vertex: Vec<VertexVerdict>,
}

impl SolutionReport {
    pub fn ok_at(&self, x: VertexId) -> bool {
        self.per_vertex[x.0].ok
    }

    pub fn ok_off(&self, excluded: &BTreeSet<VertexId>) -> bool {
        self.per_vertex
            .iter()
            .all(|v| excluded.contains(&v.vertex) || v.ok)
    }
}

/// Checks the discrete equation at every vertex. The function must
/// already be a subsolution; calling this on a non-subsolution is a
/// misuse error.
pub fn check_solution(
    u: &VertexFunction,
    g: &Graph,
    w: &LevelWeights,
    tol: f64,
) -> Result<SolutionReport> {
    let sub = check_subsolution(u, g, w, tol);
    if !sub.ok {
        let (e, excess) = sub.violations[0];
        return Err(Error::Misuse(format!(
            "check_solution on a non-subsolution: du({e}) exceeds σ by {excess:.3e}"
        )));
    }
    let mut per_vertex = Vec::with_capacity(g.vertex_count());
    for x in g.vertex_ids() {
        let mut best = f64::INFINITY;
        let mut arg = None;
        for &eid in g.star(x) {
            let e = g.edge(eid);
            let candidate = u.value(e.terminus) + w.weight(e.reverse);
            if candidate < best {
                best = candidate;
                arg = Some(eid);
            }
        }
        let achieving = arg.ok_or_else(|| {
            Error::Consistency(format!("vertex {x} has an empty star in a connected graph"))
        })?;
        let residual = best - u.value(x);
        per_vertex.push(VertexVerdict {
            vertex: x,
            residual,
            achieving,
            ok: residual.abs() <= tol,
        });
    }
    Ok(SolutionReport {
        ok: per_vertex.iter().all(|v| v.ok),
        per_vertex,
    })
}

/// Boundary data on a subset of the vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub level: f64,
    /// Sorted by vertex, one entry per vertex.
    pub entries: Vec<(VertexId, f64)>,
}

impl Trace {
    pub fn new(level: f64, mut entries: Vec<(VertexId, f64)>) -> Result<Self> {
        entries.sort_by_key(|(v, _)| *v);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Parse("trace assigns a vertex twice".into()));
        }
        if entries.is_empty() {
            return Err(Error::Parse("trace has no entries".into()));
        }
        if entries.iter().any(|(_, v)| !v.is_finite()) {
            return Err(Error::Parse("trace value is not finite".into()));
        }
        Ok(Trace { level, entries })
    }

    pub fn support(&self) -> BTreeSet<VertexId> {
        self.entries.iter().map(|(v, _)| *v).collect()
    }
}

#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub ok: bool,
    /// `(x, y, excess)` with `g(x) - g(y) > S(y,x) + tol`.
    pub violations: Vec<(VertexId, VertexId, f64)>,
}

/// Pairwise admissibility `g(x) - g(y) <= S_a(y,x) + tol` over the trace
/// support.
pub fn check_admissible(g: &Trace, table: &DistanceTable, tol: f64) -> AdmissibilityReport {
    let mut violations = Vec::new();
    for &(x, gx) in &g.entries {
        for &(y, gy) in &g.entries {
            if x == y {
                continue;
            }
            let excess = gx - gy - table.value(y, x);
            if excess > tol {
                violations.push((x, y, excess));
            }
        }
    }
    AdmissibilityReport {
        ok: violations.is_empty(),
        violations,
    }
}

fn hopf_lax(trace: &Trace, table: &DistanceTable) -> VertexFunction {
    let n = table.vertex_count();
    let values = (0..n)
        .map(|x| {
            trace
                .entries
                .iter()
                .map(|&(y, gy)| {
                    let d = if y.0 == x {
                        0.0
                    } else {
                        table.value(y, VertexId(x))
                    };
                    gy + d
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    VertexFunction {
        level: table.level,
        values,
    }
}

/// Hopf–Lax solve at the critical level. The support must lie inside the
/// projected Aubry set (the uniqueness set); the trace must be
/// admissible. The result agrees with the trace and solves the equation
/// at every vertex.
pub fn solve_critical(
    trace: &Trace,
    table: &DistanceTable,
    tol_zero: f64,
) -> Result<VertexFunction> {
    for &(y, _) in &trace.entries {
        let cycle = table.value(y, y);
        if cycle > tol_zero {
            return Err(Error::Misuse(format!(
                "trace support contains {y} outside the projected Aubry set \
                 (S({y},{y}) = {cycle:.3e}); the solution property there is not guaranteed"
            )));
        }
    }
    let report = check_admissible(trace, table, tol_zero);
    if !report.ok {
        let (x, y, excess) = report.violations[0];
        return Err(Error::Admissibility(format!(
            "trace violates g({x}) - g({y}) <= S({y},{x}) by {excess:.3e}"
        )));
    }
    Ok(hopf_lax(trace, table))
}

/// Hopf–Lax over an arbitrary support: the maximal subsolution dominated
/// by the trace. Without the Aubry-support hypothesis the result is not
/// unique among solutions and the solution property may fail on the
/// support.
pub fn solve_critical_relaxed(trace: &Trace, table: &DistanceTable) -> VertexFunction {
    hopf_lax(trace, table)
}

/// Dirichlet solve above the critical level: agrees with the trace on
/// its support, solves the equation off it, and is a subsolution
/// everywhere. `a <= c` is a misuse error; an empty support would leave
/// no solution at all (no solutions exist strictly above the critical
/// level).
pub fn solve_supercritical(
    trace: &Trace,
    table: &DistanceTable,
    critical: f64,
    tol: f64,
) -> Result<VertexFunction> {
    if table.level <= critical + tol {
        return Err(Error::Misuse(format!(
            "supercritical solve requested at level {} <= critical value {critical}",
            table.level
        )));
    }
    let report = check_admissible(trace, table, tol);
    if !report.ok {
        let (x, y, excess) = report.violations[0];
        return Err(Error::Admissibility(format!(
            "trace violates g({x}) - g({y}) <= S({y},{x}) by {excess:.3e}"
        )));
    }
    Ok(hopf_lax(trace, table))
}

/// A critical subsolution that is strict off the Aubry edges: the
/// equal-weight average of the per-edge subsolutions `S_c(t(e), ·)`
/// (falling back to `-S_c(·, t(e))` when the row has no slack). Returns
/// the function and the per-edge slack `σ_c(e) - dw(e)`.
pub fn strict_subsolution(
    g: &Graph,
    w: &LevelWeights,
    table: &DistanceTable,
    aubry: &AubryData,
    tol_zero: f64,
) -> Result<(VertexFunction, Vec<f64>)> {
    let free: Vec<EdgeId> = g
        .edges()
        .iter()
        .map(|e| e.id)
        .filter(|id| !aubry.edge_set.contains(id))
        .collect();
    let n = g.vertex_count();
    let u = if free.is_empty() {
        // every edge is Aubry: any critical subsolution has zero slack
        // everywhere, take a distance row
        row_function(table, VertexId(0))
    } else {
        let mut sum = vec![0.0; n];
        for &eid in &free {
            let edge = g.edge(eid);
            let row = row_function(table, edge.terminus);
            let slack = w.weight(eid) - row.coboundary(g, eid);
            let pick = if slack > tol_zero * 1e-3 {
                row
            } else {
                let col = neg_column_function(table, edge.terminus);
                let slack = w.weight(eid) - col.coboundary(g, eid);
                if slack <= tol_zero * 1e-3 {
                    return Err(Error::Consistency(format!(
                        "no strict per-edge subsolution for non-Aubry edge {eid}; \
                         classification and distances disagree"
                    )));
                }
                col
            };
            for (acc, v) in sum.iter_mut().zip(&pick.values) {
                *acc += v;
            }
        }
        let scale = 1.0 / free.len() as f64;
        VertexFunction {
            level: table.level,
            values: sum.into_iter().map(|v| v * scale).collect(),
        }
    };
    let slack: Vec<f64> = g
        .edges()
        .iter()
        .map(|e| w.weight(e.id) - u.coboundary(g, e.id))
        .collect();
    for e in g.edges() {
        let s = slack[e.id.0];
        if aubry.edge_set.contains(&e.id) {
            if s.abs() > tol_zero {
                return Err(Error::Consistency(format!(
                    "subsolution slack {s:.3e} on Aubry edge {} violates rigidity",
                    e.id
                )));
            }
        } else if s <= 0.0 {
            return Err(Error::Consistency(format!(
                "nonpositive slack {s:.3e} on non-Aubry edge {}",
                e.id
            )));
        }
    }
    Ok((u, slack))
}
