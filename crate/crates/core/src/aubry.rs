//! Aubry sets at the critical level.
//!
//! An edge is Aubry when it sits on a zero-cost critical cycle; the
//! cheapest cycle through `e` decomposes as `e` plus a shortest path
//! back, so membership is the polynomial test
//!
//! ```text
//!     σ_c(e) + S_c(t(e), o(e)) <= tol_zero        (0 for loops' return leg)
//! ```
//!
//! The projected Aubry set collects the vertices lying on zero cycles,
//! `{ x | S_c(x,x) <= tol_zero }`, and is partitioned into static
//! classes by the symmetric relation `S_c(x,y) + S_c(y,x) = 0`. An arc
//! belongs to the Aubry set of the network when either of its
//! orientations is an Aubry edge.
//!
//! Membership thresholds are the single most delicate constant here:
//! exact zeros of the theory come back as quadrature residues around
//! `1e-8`, so every edge's margin is kept for reporting and borderline
//! classifications can be audited.

use std::collections::BTreeSet;

use crate::critical::{DistanceTable, LevelWeights};
use crate::error::{Error, Result};
use crate::graph::{ArcId, EdgeId, Graph, Path, VertexId};

#[derive(Debug, Clone, PartialEq)]
pub struct ArcClassification {
    pub arc: ArcId,
    pub in_aubry: bool,
    /// Which orientations witness membership.
    pub forward_witness: bool,
    pub backward_witness: bool,
}

#[derive(Debug, Clone)]
pub struct AubryData {
    pub critical_level: f64,
    /// Aubry edges `𝒜*`.
    pub edge_set: BTreeSet<EdgeId>,
    /// Projected Aubry set `𝒜`.
    pub vertex_set: BTreeSet<VertexId>,
    /// Disjoint cover of the projected Aubry set.
    pub static_classes: Vec<Vec<VertexId>>,
    pub arc_classification: Vec<ArcClassification>,
    /// Per directed edge: cost of the cheapest cycle through it. Zero
    /// (within `tol_zero`) means Aubry membership.
    pub edge_margins: Vec<f64>,
}

impl AubryData {
    pub fn arc_in_aubry(&self, arc: ArcId) -> bool {
        self.arc_classification[arc.0].in_aubry
    }

    /// Margins bucketed by decade, for borderline-classification audits:
    /// `(bucket_floor, count)` with `bucket_floor = 10^k <= margin < 10^(k+1)`,
    /// plus an exact-zero bucket at `0.0`.
    pub fn margin_histogram(&self) -> Vec<(f64, usize)> {
        let mut buckets: std::collections::BTreeMap<i32, usize> = Default::default();
        let mut zeros = 0usize;
        for &m in &self.edge_margins {
            if m <= 0.0 {
                zeros += 1;
            } else {
                *buckets.entry(m.log10().floor() as i32).or_default() += 1;
            }
        }
        let mut out = Vec::new();
        if zeros > 0 {
            out.push((0.0, zeros));
        }
        out.extend(buckets.into_iter().map(|(k, n)| (10f64.powi(k), n)));
        out
    }
}

fn check_table(w: &LevelWeights, table: &DistanceTable, tol_zero: f64) -> Result<()> {
    if (w.level - table.level) != 0.0 {
        return Err(Error::Misuse(format!(
            "weights at level {} paired with a distance table at level {}",
            w.level, table.level
        )));
    }
    if table.min_diagonal() < -tol_zero {
        return Err(Error::Misuse(format!(
            "distance table has a negative diagonal ({:.3e}); not a critical table",
            table.min_diagonal()
        )));
    }
    Ok(())
}

/// Cost of the cheapest cycle through each directed edge.
pub fn edge_cycle_margins(g: &Graph, w: &LevelWeights, table: &DistanceTable) -> Vec<f64> {
    g.edges()
        .iter()
        .map(|e| {
            let back = if e.terminus == e.origin {
                0.0
            } else {
                table.value(e.terminus, e.origin)
            };
            w.weight(e.id) + back
        })
        .collect()
}

/// Aubry edges `𝒜*`: edges on zero-cost critical cycles.
pub fn aubry_edges(
    g: &Graph,
    w: &LevelWeights,
    table: &DistanceTable,
    tol_zero: f64,
) -> Result<BTreeSet<EdgeId>> {
    check_table(w, table, tol_zero)?;
    let margins = edge_cycle_margins(g, w, table);
    Ok(margins
        .iter()
        .enumerate()
        .filter(|(_, &m)| m <= tol_zero)
        .map(|(i, _)| EdgeId(i))
        .collect())
}

/// The projected Aubry set `{ x | S_c(x,x) <= tol_zero }`. Emptiness
/// contradicts the existence of critical solutions and is reported as a
/// consistency failure.
pub fn projected_aubry(table: &DistanceTable, tol_zero: f64) -> Result<BTreeSet<VertexId>> {
    let set: BTreeSet<VertexId> = (0..table.vertex_count())
        .map(VertexId)
        .filter(|&x| table.value(x, x) <= tol_zero)
        .collect();
    if set.is_empty() {
        let minima: Vec<String> = (0..table.vertex_count())
            .map(|i| {
                let v = VertexId(i);
                format!("S({v},{v}) = {:.3e}", table.value(v, v))
            })
            .collect();
        return Err(Error::Consistency(format!(
            "projected Aubry set is empty at level {}; diagonal: {}",
            table.level,
            minima.join(", ")
        )));
    }
    Ok(set)
}

/// Static classes: equivalence classes of
/// `S_c(x,y) + S_c(y,x) <= tol_zero` on the projected Aubry set.
pub fn static_classes(
    table: &DistanceTable,
    aubry_vertices: &BTreeSet<VertexId>,
    tol_zero: f64,
) -> Vec<Vec<VertexId>> {
    let members: Vec<VertexId> = aubry_vertices.iter().copied().collect();
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let (x, y) = (members[i], members[j]);
            if table.value(x, y) + table.value(y, x) <= tol_zero {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut classes: std::collections::BTreeMap<usize, Vec<VertexId>> = Default::default();
    for (i, &member) in members.iter().enumerate() {
        let root = find(&mut parent, i);
        classes.entry(root).or_default().push(member);
    }
    let mut out: Vec<Vec<VertexId>> = classes.into_values().collect();
    for class in &mut out {
        class.sort_unstable();
    }
    out.sort();
    out
}

/// An arc lies in the Aubry set of the network iff either orientation is
/// an Aubry edge.
pub fn classify_arcs(g: &Graph, edge_set: &BTreeSet<EdgeId>) -> Vec<ArcClassification> {
    g.arc_ids()
        .map(|arc| {
            let (fwd, bwd) = g.arc_edge_pair(arc);
            let forward_witness = edge_set.contains(&fwd);
            let backward_witness = edge_set.contains(&bwd);
            ArcClassification {
                arc,
                in_aubry: forward_witness || backward_witness,
                forward_witness,
                backward_witness,
            }
        })
        .collect()
}

/// Bundles the full Aubry computation at the critical level.
pub fn aubry_data(
    g: &Graph,
    w: &LevelWeights,
    table: &DistanceTable,
    tol_zero: f64,
) -> Result<AubryData> {
    let edge_set = aubry_edges(g, w, table, tol_zero)?;
    let vertex_set = projected_aubry(table, tol_zero)?;
    // membership of an edge forces both endpoints into the projected set
    for &e in &edge_set {
        let edge = g.edge(e);
        for v in [edge.origin, edge.terminus] {
            if !vertex_set.contains(&v) {
                return Err(Error::Consistency(format!(
                    "Aubry edge {e} has endpoint {v} outside the projected Aubry set"
                )));
            }
        }
    }
    let classes = static_classes(table, &vertex_set, tol_zero);
    let arc_classification = classify_arcs(g, &edge_set);
    let edge_margins = edge_cycle_margins(g, w, table);
    Ok(AubryData {
        critical_level: w.level,
        edge_set,
        vertex_set,
        static_classes: classes,
        arc_classification,
        edge_margins,
    })
}

/// Witness cycle through an Aubry edge, reconstructed from the table
/// predecessors; its cost is the edge's margin.
pub fn zero_cycle_witness(g: &Graph, table: &DistanceTable, e: EdgeId) -> Option<Path> {
    let edge = g.edge(e);
    if edge.terminus == edge.origin {
        return Some(Path { edges: vec![e] });
    }
    let mut path = table.witness_path(g, edge.terminus, edge.origin)?;
    path.edges.insert(0, e);
    Some(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::{compute_weights, critical_value, distance_table};
    use crate::fixtures;
    use crate::network::Network;

    fn critical_setup(net: &Network) -> (f64, LevelWeights, DistanceTable) {
        let c = critical_value(net).unwrap();
        let w = compute_weights(net, c).unwrap();
        let table = distance_table(net, &w).unwrap();
        (c, w, table)
    }

    #[test]
    fn triangle_aubry_edges() {
        let net = fixtures::triangle();
        let (_, w, table) = critical_setup(&net);
        let edges = aubry_edges(net.graph(), &w, &table, 1e-6).unwrap();
        // both orientations of arc 0 only
        assert_eq!(
            edges.into_iter().collect::<Vec<_>>(),
            vec![EdgeId(0), EdgeId(1)]
        );
    }

    #[test]
    fn loop_aubry_backward_only() {
        let net = fixtures::loop_tilted();
        let (_, w, table) = critical_setup(&net);
        let edges = aubry_edges(net.graph(), &w, &table, 1e-6).unwrap();
        assert_eq!(edges.into_iter().collect::<Vec<_>>(), vec![EdgeId(1)]);
    }

    #[test]
    fn eikonal_everything_aubry() {
        let net = fixtures::eikonal_triangle();
        let (_, w, table) = critical_setup(&net);
        let edges = aubry_edges(net.graph(), &w, &table, 1e-6).unwrap();
        assert_eq!(edges.len(), net.graph().edge_count());
        let vertices = projected_aubry(&table, 1e-6).unwrap();
        assert_eq!(vertices.len(), net.graph().vertex_count());
        let arcs = classify_arcs(net.graph(), &edges);
        assert!(arcs.iter().all(|a| a.in_aubry));
    }

    #[test]
    fn triangle_projected_and_classes() {
        let net = fixtures::triangle();
        let (_, w, table) = critical_setup(&net);
        let vertices = projected_aubry(&table, 1e-6).unwrap();
        assert_eq!(
            vertices.iter().copied().collect::<Vec<_>>(),
            vec![VertexId(0), VertexId(1)]
        );
        let classes = static_classes(&table, &vertices, 1e-6);
        assert_eq!(classes, vec![vec![VertexId(0), VertexId(1)]]);
        let data = aubry_data(net.graph(), &w, &table, 1e-6).unwrap();
        assert!(data.arc_in_aubry(ArcId(0)));
        assert!(!data.arc_in_aubry(ArcId(1)));
        assert!(!data.arc_in_aubry(ArcId(2)));
    }

    #[test]
    fn loop_projected_is_single_vertex() {
        let net = fixtures::loop_tilted();
        let (_, _, table) = critical_setup(&net);
        let vertices = projected_aubry(&table, 1e-6).unwrap();
        assert_eq!(
            vertices.iter().copied().collect::<Vec<_>>(),
            vec![VertexId(0)]
        );
        let classes = static_classes(&table, &vertices, 1e-6);
        assert_eq!(classes, vec![vec![VertexId(0)]]);
    }

    #[test]
    fn bridged_loops_have_two_classes() {
        let net = fixtures::two_loops_bridged();
        let (c, w, table) = critical_setup(&net);
        assert!(c.abs() < 1e-7);
        let data = aubry_data(net.graph(), &w, &table, 1e-6).unwrap();
        assert_eq!(data.vertex_set.len(), 2);
        assert_eq!(
            data.static_classes,
            vec![vec![VertexId(0)], vec![VertexId(1)]]
        );
        // the bridge arc is not Aubry
        assert!(data.arc_in_aubry(ArcId(0)));
        assert!(data.arc_in_aubry(ArcId(1)));
        assert!(!data.arc_in_aubry(ArcId(2)));
    }

    #[test]
    fn witness_cycles_have_zero_cost() {
        for (name, net) in fixtures::all_named() {
            let (_, w, table) = critical_setup(&net);
            let data = aubry_data(net.graph(), &w, &table, 1e-6).unwrap();
            for &e in &data.edge_set {
                let cycle = zero_cycle_witness(net.graph(), &table, e).unwrap();
                assert!(cycle.is_cycle(net.graph()), "{name}: witness not a cycle");
                let cost: f64 = cycle.edges.iter().map(|&id| w.weight(id)).sum();
                assert!(
                    cost.abs() <= cycle.len() as f64 * 1e-6,
                    "{name}: witness through {e} costs {cost}"
                );
            }
        }
    }

    #[test]
    fn static_class_members_join_by_zero_cycles() {
        let net = fixtures::triangle();
        let (_, w, table) = critical_setup(&net);
        let data = aubry_data(net.graph(), &w, &table, 1e-6).unwrap();
        for class in &data.static_classes {
            for &x in class {
                for &y in class {
                    if x == y {
                        continue;
                    }
                    let there = table.witness_path(net.graph(), x, y).unwrap();
                    let back = table.witness_path(net.graph(), y, x).unwrap();
                    let cost: f64 = there
                        .edges
                        .iter()
                        .chain(&back.edges)
                        .map(|&e| w.weight(e))
                        .sum();
                    assert!(cost.abs() <= 2e-6);
                }
            }
        }
    }

    #[test]
    fn margins_match_cycle_enumeration() {
        use crate::graph::DEFAULT_ENUMERATION_CAP;
        for (name, net) in fixtures::all_named() {
            let (_, w, table) = critical_setup(&net);
            let g = net.graph();
            let margins = edge_cycle_margins(g, &w, &table);
            let cycles = g.enumerate_simple_cycles(DEFAULT_ENUMERATION_CAP).unwrap();
            for e in g.edges() {
                let brute = cycles
                    .iter()
                    .filter(|c| c.edges.contains(&e.id))
                    .map(|c| c.edges.iter().map(|&id| w.weight(id)).sum::<f64>())
                    .fold(f64::INFINITY, f64::min);
                assert!(
                    (margins[e.id.0] - brute).abs() <= 1e-10,
                    "{name} {}: margin {} vs enumerated {brute}",
                    e.id,
                    margins[e.id.0]
                );
            }
        }
    }

    #[test]
    fn level_mismatch_is_misuse() {
        let net = fixtures::triangle();
        let (_, w, _) = critical_setup(&net);
        let other = compute_weights(&net, 0.0).unwrap();
        let table = distance_table(&net, &other).unwrap();
        let err = aubry_edges(net.graph(), &w, &table, 1e-6).unwrap_err();
        assert!(matches!(err, Error::Misuse(_)));
    }

    #[test]
    fn margin_histogram_buckets() {
        let net = fixtures::triangle();
        let (_, w, table) = critical_setup(&net);
        let data = aubry_data(net.graph(), &w, &table, 1e-6).unwrap();
        let hist = data.margin_histogram();
        let total: usize = hist.iter().map(|(_, n)| n).sum();
        assert_eq!(total, net.graph().edge_count());
    }
}
