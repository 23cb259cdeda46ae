//! Level-dependent edge weights, cycle diagnostics, the critical value
//! and the vertex distance table.
//!
//! At a level `a` every directed edge gets the weight `σ_a(e)`; the path
//! distance
//!
//! ```text
//!     S_a(x,y) = inf { σ_a(ξ) | ξ path linking x to y }
//! ```
//!
//! is finite exactly when no cycle has negative cost. The critical value
//! is the smallest level `a >= a₀` with that property; since every edge
//! weight is continuous and strictly increasing in `a`, it is found by
//! bisection on the minimum cycle value:
//!
//! * negative cycles are detected by Bellman–Ford from a super-source
//!   and certified by re-summing the extracted cycle,
//! * otherwise the all-pairs table is built by Floyd–Warshall and the
//!   diagonal is replaced by the cheapest nontrivial cycle through each
//!   vertex.
//!
//! Weights at bisection probes are recomputed from the Hamiltonians, not
//! interpolated in `a`, so the monotonicity certificate is genuine.

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, Path, VertexId};
use crate::network::{ArcDiagnostics, Network};
use crate::numerics::SigmaProfile;
use crate::search;

/// The 1-cochain `σ_a` on directed edges plus per-arc diagnostics.
#[derive(Debug, Clone)]
pub struct LevelWeights {
    pub level: f64,
    weights: Vec<f64>,
    pub diagnostics: Vec<ArcDiagnostics>,
}

impl LevelWeights {
    pub fn weight(&self, e: EdgeId) -> f64 {
        self.weights[e.0]
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    /// Cost of the 2-cycle `e ∪ reverse(e)`; nonnegative up to quadrature
    /// error since it integrates `σ⁺ - σ⁻`.
    pub fn two_cycle_cost(&self, g: &Graph, e: EdgeId) -> f64 {
        self.weights[e.0] + self.weights[g.reverse(e).0]
    }
}

/// Builds `σ_a` on every directed edge.
pub fn compute_weights(net: &Network, a: f64) -> Result<LevelWeights> {
    let tol = net.tolerances();
    let g = net.graph();
    let mut weights = vec![0.0; g.edge_count()];
    let mut diagnostics = Vec::with_capacity(g.arc_count());
    for arc in g.arc_ids() {
        let h = net.hamiltonian(arc);
        let profile = SigmaProfile::build(h, a, tol)?;
        let (fwd, bwd) = g.arc_edge_pair(arc);
        weights[fwd.0] = profile.total_plus();
        weights[bwd.0] = -profile.total_minus();
        diagnostics.push(net.arc_diagnostics(arc));
    }
    let lw = LevelWeights {
        level: a,
        weights,
        diagnostics,
    };
    for e in g.edges() {
        let cost = lw.two_cycle_cost(g, e.id);
        if cost < -2.0 * tol.tol_q {
            return Err(Error::Consistency(format!(
                "2-cycle through {} has cost {cost:.3e} < 0; σ⁺ < σ⁻ somewhere",
                e.id
            )));
        }
    }
    Ok(lw)
}

// ---------------------------------------------------------------------
// raw weighted-digraph machinery, shared with the augmented graphs that
// point-splitting builds
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub(crate) struct RawEdge {
    pub origin: usize,
    pub terminus: usize,
    pub weight: f64,
}

/// Bellman–Ford from a super-source (all distances start at zero). On
/// detection, walks predecessors into the cycle and returns its edge
/// indices with the re-summed, certified cost.
pub(crate) fn negative_cycle(n: usize, edges: &[RawEdge]) -> Option<(Vec<usize>, f64)> {
    let mut dist = vec![0.0f64; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut touched = None;
    for pass in 0..n {
        let mut relaxed = false;
        for (idx, e) in edges.iter().enumerate() {
            let candidate = dist[e.origin] + e.weight;
            if candidate < dist[e.terminus] {
                dist[e.terminus] = candidate;
                pred[e.terminus] = Some(idx);
                relaxed = true;
                if pass == n - 1 {
                    touched = Some(e.terminus);
                }
            }
        }
        if !relaxed {
            return None;
        }
    }
    let start = touched?;
    // walk n predecessor steps to be certain we sit inside the cycle
    let mut v = start;
    for _ in 0..n {
        v = edges[pred[v]?].origin;
    }
    let anchor = v;
    let mut cycle = Vec::new();
    let mut cur = anchor;
    loop {
        let idx = pred[cur]?;
        cycle.push(idx);
        cur = edges[idx].origin;
        if cur == anchor {
            break;
        }
    }
    cycle.reverse();
    let value = cycle.iter().map(|&i| edges[i].weight).sum();
    Some((cycle, value))
}

pub(crate) struct RawTable {
    n: usize,
    /// Row-major; diagonal entries hold the cheapest nontrivial cycle.
    pub dist: Vec<f64>,
    /// First edge on the optimal `i -> j` path, `i != j`.
    pub next: Vec<Option<usize>>,
    /// First edge of the cheapest cycle through `i`.
    pub diag_edge: Vec<Option<usize>>,
}

impl RawTable {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    /// Optimal off-diagonal path as edge indices.
    pub fn path(&self, i: usize, j: usize, edges: &[RawEdge]) -> Option<Vec<usize>> {
        if i == j {
            return None;
        }
        let mut out = Vec::new();
        let mut cur = i;
        while cur != j {
            let idx = self.next[cur * self.n + j]?;
            out.push(idx);
            cur = edges[idx].terminus;
            if out.len() > self.n + 1 {
                return None;
            }
        }
        Some(out)
    }

    /// Cheapest nontrivial cycle through `i` as edge indices.
    pub fn cycle(&self, i: usize, edges: &[RawEdge]) -> Option<Vec<usize>> {
        let first = self.diag_edge[i]?;
        let back = edges[first].terminus;
        if back == i {
            return Some(vec![first]);
        }
        let mut out = vec![first];
        out.extend(self.path(back, i, edges)?);
        Some(out)
    }
}

/// Floyd–Warshall with strict-improvement updates; assumes no cycle is
/// negative beyond round-off. The diagonal is post-processed to the
/// cheapest nontrivial cycle `min over e in E_x of w(e) + D(t(e), x)`.
pub(crate) fn fw_table(n: usize, edges: &[RawEdge]) -> RawTable {
    let inf = f64::INFINITY;
    let mut dist = vec![inf; n * n];
    let mut next: Vec<Option<usize>> = vec![None; n * n];
    for i in 0..n {
        dist[i * n + i] = 0.0;
    }
    for (idx, e) in edges.iter().enumerate() {
        let slot = e.origin * n + e.terminus;
        if e.origin != e.terminus && e.weight < dist[slot] {
            dist[slot] = e.weight;
            next[slot] = Some(idx);
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i * n + k];
            if dik == inf {
                continue;
            }
            for j in 0..n {
                let through = dik + dist[k * n + j];
                if through < dist[i * n + j] {
                    dist[i * n + j] = through;
                    next[i * n + j] = next[i * n + k];
                }
            }
        }
    }
    let mut diag_edge = vec![None; n];
    for x in 0..n {
        let mut best = inf;
        let mut arg = None;
        for (idx, e) in edges.iter().enumerate() {
            if e.origin != x {
                continue;
            }
            let ret = if e.terminus == x {
                0.0
            } else {
                dist[e.terminus * n + x]
            };
            let cost = e.weight + ret;
            if cost < best {
                best = cost;
                arg = Some(idx);
            }
        }
        dist[x * n + x] = best;
        diag_edge[x] = arg;
    }
    RawTable {
        n,
        dist,
        next,
        diag_edge,
    }
}

pub(crate) fn raw_edges(g: &Graph, w: &LevelWeights) -> Vec<RawEdge> {
    g.edges()
        .iter()
        .map(|e| RawEdge {
            origin: e.origin.0,
            terminus: e.terminus.0,
            weight: w.weight(e.id),
        })
        .collect()
}

/// Minimum cycle cost at the given weights: a certified negative-cycle
/// value when one exists, otherwise the (nonnegative) minimum over the
/// all-pairs diagonal.
pub fn min_cycle_value(g: &Graph, w: &LevelWeights) -> f64 {
    let edges = raw_edges(g, w);
    let n = g.vertex_count();
    if let Some((_, value)) = negative_cycle(n, &edges) {
        if value < 0.0 {
            return value;
        }
    }
    let table = fw_table(n, &edges);
    (0..n).map(|x| table.at(x, x)).fold(f64::INFINITY, f64::min)
}

/// Minimum cycle cost together with a witness cycle.
pub fn min_cycle_witness(g: &Graph, w: &LevelWeights) -> (f64, Option<Path>) {
    let edges = raw_edges(g, w);
    let n = g.vertex_count();
    if let Some((cycle, value)) = negative_cycle(n, &edges) {
        if value < 0.0 {
            let path = Path {
                edges: cycle.into_iter().map(EdgeId).collect(),
            };
            return (value, Some(path));
        }
    }
    let table = fw_table(n, &edges);
    let mut best = f64::INFINITY;
    let mut arg = None;
    for x in 0..n {
        if table.at(x, x) < best {
            best = table.at(x, x);
            arg = Some(x);
        }
    }
    let path = arg.and_then(|x| table.cycle(x, &edges)).map(|idxs| Path {
        edges: idxs.into_iter().map(EdgeId).collect(),
    });
    (best, path)
}

/// The critical (Mañé) value: the least `a >= a₀` with no negative
/// cycle. Returns `a₀` when the floor already has none; otherwise
/// brackets by doubling and bisects the monotone map
/// `a -> min_cycle_value(a)`.
///
/// The root residual is driven three decades below `tol_a`: negative
/// cycles left at the returned level leak into every distance built on
/// top of it (triangle-inequality defects, Hopf–Lax drift), so the
/// contract `|min_cycle_value(c)| <= tol_a` is met with a wide margin.
pub fn critical_value(net: &Network) -> Result<f64> {
    let tol = net.tolerances();
    let target = tol.tol_a * 1e-3;
    let a0 = net.a0();
    let value_at = |a: f64| -> Result<f64> {
        let w = compute_weights(net, a)?;
        Ok(min_cycle_value(net.graph(), &w))
    };
    let at_floor = value_at(a0)?;
    if at_floor >= -target {
        return Ok(a0);
    }
    let step = 0.5 * (1.0 + a0.abs());
    let hi =
        search::expand_until_positive(|a| value_at(a).unwrap_or(f64::NEG_INFINITY), a0, step, 64)
            .ok_or_else(|| {
            Error::Level(format!(
                "no level without negative cycles found above a0 = {a0} after 64 doublings"
            ))
        })?;
    let (root, _) = search::bisect_increasing(
        |a| value_at(a).unwrap_or(f64::NEG_INFINITY),
        a0,
        hi,
        0.5 * target,
        target,
    );
    Ok(root.max(a0))
}

/// All-pairs distance table `S_a` with witness reconstruction.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    pub level: f64,
    n: usize,
    dist: Vec<f64>,
    next: Vec<Option<usize>>,
    diag_edge: Vec<Option<usize>>,
}

impl DistanceTable {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// `S_a(x,y)`; the diagonal holds the cheapest nontrivial cycle
    /// through `x`.
    pub fn value(&self, x: VertexId, y: VertexId) -> f64 {
        self.dist[x.0 * self.n + y.0]
    }

    pub fn min_diagonal(&self) -> f64 {
        (0..self.n)
            .map(|i| self.dist[i * self.n + i])
            .fold(f64::INFINITY, f64::min)
    }

    /// Optimal simple path `x -> y` for `x != y`.
    pub fn witness_path(&self, g: &Graph, x: VertexId, y: VertexId) -> Option<Path> {
        if x == y {
            return self.witness_cycle(g, x);
        }
        let mut out = Vec::new();
        let mut cur = x;
        while cur != y {
            let idx = self.next[cur.0 * self.n + y.0]?;
            out.push(EdgeId(idx));
            cur = g.edge(EdgeId(idx)).terminus;
            if out.len() > self.n + 1 {
                return None;
            }
        }
        Some(Path { edges: out })
    }

    /// Cheapest nontrivial cycle through `x`.
    pub fn witness_cycle(&self, g: &Graph, x: VertexId) -> Option<Path> {
        let first = EdgeId(self.diag_edge[x.0]?);
        let back = g.edge(first).terminus;
        if back == x {
            return Some(Path { edges: vec![first] });
        }
        let mut path = self.witness_path(g, back, x)?;
        path.edges.insert(0, first);
        Some(path)
    }
}

/// Builds `S_a` by Floyd–Warshall over the level weights. A negative
/// cycle beyond `tol_zero` means the level sits below the critical value.
pub fn distance_table(net: &Network, w: &LevelWeights) -> Result<DistanceTable> {
    let g = net.graph();
    let tol = net.tolerances();
    let edges = raw_edges(g, w);
    let n = g.vertex_count();
    if let Some((cycle, value)) = negative_cycle(n, &edges) {
        if value < -tol.tol_zero {
            let ids: Vec<String> = cycle.iter().map(|&i| EdgeId(i).to_string()).collect();
            return Err(Error::Level(format!(
                "negative cycle of cost {value:.6e} at level {} (edges {}); \
                 the level lies below the critical value",
                w.level,
                ids.join(" ")
            )));
        }
    }
    let raw = fw_table(n, &edges);
    Ok(DistanceTable {
        level: w.level,
        n,
        dist: raw.dist,
        next: raw.next,
        diag_edge: raw.diag_edge,
    })
}

/// Convenience: weights plus table in one call.
pub fn distance_table_at(net: &Network, a: f64) -> Result<DistanceTable> {
    let w = compute_weights(net, a)?;
    distance_table(net, &w)
}

/// Brute-force distance via simple-path enumeration; the test oracle for
/// [`distance_table`]. For `x == y` it minimises over simple cycles
/// through `x`.
pub fn brute_force_distance(
    g: &Graph,
    w: &LevelWeights,
    x: VertexId,
    y: VertexId,
    cap: usize,
) -> Result<f64> {
    let paths = g.enumerate_simple_paths(x, y, cap)?;
    let cost = |p: &Path| -> f64 { p.edges.iter().map(|&e| w.weight(e)).sum() };
    Ok(paths.iter().map(cost).fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::DEFAULT_ENUMERATION_CAP;

    #[test]
    fn triangle_weights_at_zero() {
        let net = fixtures::triangle();
        let w = compute_weights(&net, 0.0).unwrap();
        let expect = [1.0, 1.0, 2.0, 2.0, 3.0, 3.0];
        for (i, &e) in expect.iter().enumerate() {
            assert!((w.weight(EdgeId(i)) - e).abs() < 1e-10, "edge {i}");
        }
    }

    #[test]
    fn triangle_weights_at_floor() {
        let net = fixtures::triangle();
        let w = compute_weights(&net, -1.0).unwrap();
        let expect = [0.0, 0.0, 1.0, 1.0, 2.0, 2.0];
        for (i, &e) in expect.iter().enumerate() {
            assert!((w.weight(EdgeId(i)) - e).abs() < 1e-10, "edge {i}");
        }
    }

    #[test]
    fn loop_weights() {
        let net = fixtures::loop_tilted();
        let w = compute_weights(&net, 1.0).unwrap();
        assert!((w.weight(EdgeId(0)) - 4.0).abs() < 1e-10);
        assert!(w.weight(EdgeId(1)).abs() < 1e-10);
    }

    #[test]
    fn min_cycle_examples() {
        let net = fixtures::triangle();
        let w = compute_weights(&net, -1.0).unwrap();
        assert!(min_cycle_value(net.graph(), &w).abs() < 1e-10);
        let w = compute_weights(&net, 0.0).unwrap();
        assert!((min_cycle_value(net.graph(), &w) - 2.0).abs() < 1e-10);

        let net = fixtures::loop_tilted();
        let w = compute_weights(&net, 1.0).unwrap();
        assert!(min_cycle_value(net.graph(), &w).abs() < 1e-10);
    }

    #[test]
    fn min_cycle_negative_certificate() {
        let net = fixtures::two_arc_cycle();
        let w = compute_weights(&net, 0.0).unwrap();
        let (value, witness) = min_cycle_witness(net.graph(), &w);
        assert!(value < -1.0, "expected strongly negative, got {value}");
        let cycle = witness.unwrap();
        assert!(cycle.is_cycle(net.graph()));
        let sum: f64 = cycle.edges.iter().map(|&e| w.weight(e)).sum();
        assert!((sum - value).abs() < 1e-12);
    }

    #[test]
    fn critical_triangle() {
        let net = fixtures::triangle();
        let c = critical_value(&net).unwrap();
        assert!((c + 1.0).abs() < 1e-6, "c = {c}");
    }

    #[test]
    fn critical_loop() {
        let net = fixtures::loop_tilted();
        let c = critical_value(&net).unwrap();
        assert!((c - 1.0).abs() < 1e-6, "c = {c}");
    }

    #[test]
    fn critical_two_arc_cycle_with_enumeration_oracle() {
        let net = fixtures::two_arc_cycle();
        let c = critical_value(&net).unwrap();
        assert!((c - 1.0).abs() < 1e-6, "c = {c}");

        // independent oracle: bisect the cheapest enumerated simple cycle
        let g = net.graph();
        let cycles = g.enumerate_simple_cycles(DEFAULT_ENUMERATION_CAP).unwrap();
        let cheapest = |a: f64| -> f64 {
            let w = compute_weights(&net, a).unwrap();
            cycles
                .iter()
                .map(|p| p.edges.iter().map(|&e| w.weight(e)).sum::<f64>())
                .fold(f64::INFINITY, f64::min)
        };
        let (oracle, _) = search::bisect_increasing(cheapest, net.a0(), 8.0, 1e-12, 1e-10);
        assert!((c - oracle).abs() < 1e-7, "bisect {c} vs oracle {oracle}");
    }

    #[test]
    fn bisection_certificate() {
        for (name, net) in fixtures::all_named() {
            let tol = *net.tolerances();
            let c = critical_value(&net).unwrap();
            let at = |a: f64| {
                let w = compute_weights(&net, a).unwrap();
                min_cycle_value(net.graph(), &w)
            };
            let above = at(c + 10.0 * tol.tol_a);
            assert!(above > 0.0, "{name}: no positive certificate above c");
            if (c - net.a0()).abs() > tol.tol_a {
                let below = at(c - 10.0 * tol.tol_a);
                assert!(below < 0.0, "{name}: no negative certificate below c");
            }
        }
    }

    #[test]
    fn distances_triangle() {
        let net = fixtures::triangle();
        let table = distance_table_at(&net, 0.0).unwrap();
        assert!((table.value(VertexId(0), VertexId(1)) - 1.0).abs() < 1e-10);
        // strict positivity of S(x,x) above the critical value
        for x in net.graph().vertex_ids() {
            assert!(table.value(x, x) > 0.5);
        }
    }

    #[test]
    fn distances_single_arc_at_critical() {
        let net = fixtures::single_arc(0.0, 0.0, 1.0);
        let table = distance_table_at(&net, 0.0).unwrap();
        for x in net.graph().vertex_ids() {
            for y in net.graph().vertex_ids() {
                assert!(table.value(x, y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn distance_below_critical_is_level_error() {
        let net = fixtures::two_arc_cycle();
        let err = distance_table_at(&net, 0.0).unwrap_err();
        assert!(matches!(err, Error::Level(_)), "{err}");
    }

    #[test]
    fn triangle_inequality_and_edge_bound() {
        let net = fixtures::triangle();
        let w = compute_weights(&net, -0.5).unwrap();
        let table = distance_table(&net, &w).unwrap();
        let g = net.graph();
        for x in g.vertex_ids() {
            for y in g.vertex_ids() {
                for z in g.vertex_ids() {
                    assert!(table.value(x, y) <= table.value(x, z) + table.value(z, y) + 1e-12);
                }
            }
        }
        for e in g.edges() {
            assert!(table.value(e.origin, e.terminus) <= w.weight(e.id) + 1e-12);
        }
    }

    #[test]
    fn table_matches_brute_force_on_fixtures() {
        for (name, net) in fixtures::all_named() {
            let c = critical_value(&net).unwrap();
            for delta in [0.0, 0.25, 1.0] {
                let w = compute_weights(&net, c + delta).unwrap();
                let table = distance_table(&net, &w).unwrap();
                let g = net.graph();
                for x in g.vertex_ids() {
                    for y in g.vertex_ids() {
                        let brute =
                            brute_force_distance(g, &w, x, y, DEFAULT_ENUMERATION_CAP).unwrap();
                        let fast = table.value(x, y);
                        assert!(
                            (brute - fast).abs() < 1e-10,
                            "{name} at c+{delta}: S({x},{y}) = {fast} vs brute {brute}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn witness_paths_realize_distances() {
        let net = fixtures::triangle();
        let w = compute_weights(&net, 0.0).unwrap();
        let table = distance_table(&net, &w).unwrap();
        let g = net.graph();
        for x in g.vertex_ids() {
            for y in g.vertex_ids() {
                let path = table.witness_path(g, x, y).unwrap();
                let cost: f64 = path.edges.iter().map(|&e| w.weight(e)).sum();
                assert!((cost - table.value(x, y)).abs() < 1e-12);
                if x != y {
                    assert_eq!(path.origin(g), Some(x));
                    assert_eq!(path.terminus(g), Some(y));
                } else {
                    assert!(path.is_cycle(g));
                }
            }
        }
    }
}
