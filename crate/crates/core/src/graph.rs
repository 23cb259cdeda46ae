//! Abstract graph underlying an embedded network.
//!
//! A network arc becomes a pair of directed edges exchanged by a
//! fixed-point-free involution `e -> reverse(e)`:
//!
//! ```text
//!     reverse(reverse(e)) = e,   reverse(e) != e,
//!     origin(reverse(e))  = terminus(e).
//! ```
//!
//! Loops (`origin = terminus`) and parallel edges are permitted; the
//! graph must be finite and connected. The star `E_x` of a vertex is the
//! set of edges with origin `x`, kept in id-sorted order so that argmin
//! tie-breaking downstream is reproducible.
//!
//! The module also carries the brute-force enumeration of simple paths
//! and simple cycles used as a test oracle against the polynomial
//! shortest-path machinery. It is exponential and guarded by a cap on
//! the number of directed edges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ArcId(pub usize);

impl std::fmt::Display for VertexId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl std::fmt::Display for EdgeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl std::fmt::Display for ArcId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// Orientation of a directed edge relative to the parametrization of its
/// arc: `Forward` runs from `γ(0)` to `γ(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Forward,
    Backward,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Orientation::Forward => Orientation::Backward,
            Orientation::Backward => Orientation::Forward,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectedEdge {
    pub id: EdgeId,
    pub origin: VertexId,
    pub terminus: VertexId,
    pub reverse: EdgeId,
    pub arc: ArcId,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VertexInfo {
    pub label: Option<String>,
    /// Embedding coordinates. Carried for I/O and export only; the
    /// computation never uses them.
    pub coords: Option<Vec<f64>>,
}

/// Finite connected graph with the reversal involution stored explicitly.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    vertices: Vec<VertexInfo>,
    edges: Vec<DirectedEdge>,
    stars: Vec<Vec<EdgeId>>,
    /// Per arc: (forward edge, backward edge).
    arc_edges: Vec<(EdgeId, EdgeId)>,
}

/// Default cap on `|E|` for the exponential enumeration oracles.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

impl Graph {
    /// Builds the graph of a network given as a list of arcs
    /// `(tail, head)`; arc `k` produces the forward edge `2k` and the
    /// backward edge `2k+1`.
    pub fn build(vertices: Vec<VertexInfo>, arcs: &[(VertexId, VertexId)]) -> Result<Graph> {
        let n = vertices.len();
        if n == 0 {
            return Err(Error::Parse("network has no vertices".into()));
        }
        if arcs.is_empty() {
            return Err(Error::Parse("network has no arcs".into()));
        }
        if let Some(labels) = Self::duplicate_label(&vertices) {
            return Err(Error::Parse(format!("duplicate vertex label {labels:?}")));
        }
        let mut edges = Vec::with_capacity(2 * arcs.len());
        for (k, &(tail, head)) in arcs.iter().enumerate() {
            for v in [tail, head] {
                if v.0 >= n {
                    return Err(Error::Parse(format!(
                        "arc {} references undeclared vertex {}",
                        ArcId(k),
                        v
                    )));
                }
            }
            let fwd = EdgeId(2 * k);
            let bwd = EdgeId(2 * k + 1);
            edges.push(DirectedEdge {
                id: fwd,
                origin: tail,
                terminus: head,
                reverse: bwd,
                arc: ArcId(k),
                orientation: Orientation::Forward,
            });
            edges.push(DirectedEdge {
                id: bwd,
                origin: head,
                terminus: tail,
                reverse: fwd,
                arc: ArcId(k),
                orientation: Orientation::Backward,
            });
        }
        let mut stars = vec![Vec::new(); n];
        for e in &edges {
            stars[e.origin.0].push(e.id);
        }
        // construction pushes in id order already; keep the invariant explicit
        for star in &mut stars {
            star.sort_unstable();
        }
        let arc_edges = (0..arcs.len())
            .map(|k| (EdgeId(2 * k), EdgeId(2 * k + 1)))
            .collect();
        let graph = Graph {
            vertices,
            edges,
            stars,
            arc_edges,
        };
        graph.check_connected()?;
        Ok(graph)
    }

    fn duplicate_label(vertices: &[VertexInfo]) -> Option<String> {
        let mut seen = std::collections::BTreeSet::new();
        for v in vertices {
            if let Some(label) = &v.label {
                if !seen.insert(label.clone()) {
                    return Some(label.clone());
                }
            }
        }
        None
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.vertices.len();
        let mut reached = vec![false; n];
        let mut queue = std::collections::VecDeque::from([VertexId(0)]);
        reached[0] = true;
        while let Some(x) = queue.pop_front() {
            for &eid in &self.stars[x.0] {
                let y = self.edge(eid).terminus;
                if !reached[y.0] {
                    reached[y.0] = true;
                    queue.push_back(y);
                }
            }
        }
        let stranded: Vec<String> = (0..n)
            .filter(|&i| !reached[i])
            .map(|i| VertexId(i).to_string())
            .collect();
        if stranded.is_empty() {
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "network is disconnected; unreachable from v0: {}",
                stranded.join(", ")
            )))
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arc_edges.len()
    }

    pub fn vertex_info(&self, x: VertexId) -> &VertexInfo {
        &self.vertices[x.0]
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn edge(&self, e: EdgeId) -> &DirectedEdge {
        &self.edges[e.0]
    }

    pub fn edges(&self) -> &[DirectedEdge] {
        &self.edges
    }

    pub fn reverse(&self, e: EdgeId) -> EdgeId {
        self.edges[e.0].reverse
    }

    /// The star `E_x`: edges with origin `x`, id-sorted.
    pub fn star(&self, x: VertexId) -> &[EdgeId] {
        &self.stars[x.0]
    }

    /// (forward, backward) directed edges of an arc.
    pub fn arc_edge_pair(&self, arc: ArcId) -> (EdgeId, EdgeId) {
        self.arc_edges[arc.0]
    }

    pub fn arc_ids(&self) -> impl Iterator<Item = ArcId> {
        (0..self.arc_edges.len()).map(ArcId)
    }

    /// Tail and head vertices of an arc (`γ(0)`, `γ(1)`).
    pub fn arc_endpoints(&self, arc: ArcId) -> (VertexId, VertexId) {
        let e = self.edge(self.arc_edges[arc.0].0);
        (e.origin, e.terminus)
    }

    pub fn is_loop_arc(&self, arc: ArcId) -> bool {
        let (tail, head) = self.arc_endpoints(arc);
        tail == head
    }

    fn enumeration_guard(&self, cap: usize) -> Result<()> {
        let m = self.edges.len();
        if m > cap {
            // crude upper bound: paths choose at most |V| edges in sequence
            let estimate = (m as f64).powi(self.vertices.len() as i32);
            return Err(Error::Misuse(format!(
                "enumeration refused: {m} directed edges exceed the cap of {cap} \
                 (up to ~{estimate:.1e} paths)"
            )));
        }
        Ok(())
    }

    /// Enumerates every simple cycle exactly once, canonicalized so that
    /// the rotation starting at the lowest edge id is the one reported.
    /// Single loop edges are cycles; `(e, reverse(e))` is a cycle for
    /// non-loop edges.
    pub fn enumerate_simple_cycles(&self, cap: usize) -> Result<Vec<Path>> {
        self.enumeration_guard(cap)?;
        let mut cycles = Vec::new();
        for first in 0..self.edges.len() {
            let e0 = &self.edges[first];
            if e0.terminus == e0.origin {
                cycles.push(Path { edges: vec![e0.id] });
                continue;
            }
            let mut seen = vec![false; self.vertices.len()];
            seen[e0.terminus.0] = true;
            let mut stack = vec![e0.id];
            self.cycle_dfs(e0, e0.terminus, &mut seen, &mut stack, &mut cycles);
        }
        Ok(cycles)
    }

    fn cycle_dfs(
        &self,
        e0: &DirectedEdge,
        at: VertexId,
        seen: &mut Vec<bool>,
        stack: &mut Vec<EdgeId>,
        out: &mut Vec<Path>,
    ) {
        for &eid in &self.stars[at.0] {
            // edges below the anchor belong to cycles already enumerated
            if eid <= e0.id {
                continue;
            }
            let next = self.edge(eid).terminus;
            if next == e0.origin {
                let mut edges = stack.clone();
                edges.push(eid);
                out.push(Path { edges });
            } else if !seen[next.0] {
                seen[next.0] = true;
                stack.push(eid);
                self.cycle_dfs(e0, next, seen, stack, out);
                stack.pop();
                seen[next.0] = false;
            }
        }
    }

    /// Enumerates all simple paths from `x` to `y`. With `x == y` this is
    /// the set of simple cycles based at `x` (one rotation per starting
    /// edge).
    pub fn enumerate_simple_paths(
        &self,
        x: VertexId,
        y: VertexId,
        cap: usize,
    ) -> Result<Vec<Path>> {
        self.enumeration_guard(cap)?;
        let mut out = Vec::new();
        let mut seen = vec![false; self.vertices.len()];
        seen[x.0] = true;
        let mut stack = Vec::new();
        self.path_dfs(x, y, &mut seen, &mut stack, &mut out);
        Ok(out)
    }

    fn path_dfs(
        &self,
        at: VertexId,
        target: VertexId,
        seen: &mut Vec<bool>,
        stack: &mut Vec<EdgeId>,
        out: &mut Vec<Path>,
    ) {
        for &eid in &self.stars[at.0] {
            let next = self.edge(eid).terminus;
            if next == target {
                let mut edges = stack.clone();
                edges.push(eid);
                out.push(Path { edges });
            } else if !seen[next.0] {
                seen[next.0] = true;
                stack.push(eid);
                self.path_dfs(next, target, seen, stack, out);
                stack.pop();
                seen[next.0] = false;
            }
        }
    }
}

/// A finite sequence of concatenated edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    pub edges: Vec<EdgeId>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn origin(&self, g: &Graph) -> Option<VertexId> {
        self.edges.first().map(|&e| g.edge(e).origin)
    }

    pub fn terminus(&self, g: &Graph) -> Option<VertexId> {
        self.edges.last().map(|&e| g.edge(e).terminus)
    }

    /// Checks `terminus(e_j) = origin(e_{j+1})` along the sequence.
    pub fn is_concatenated(&self, g: &Graph) -> bool {
        self.edges
            .windows(2)
            .all(|w| g.edge(w[0]).terminus == g.edge(w[1]).origin)
    }

    pub fn is_cycle(&self, g: &Graph) -> bool {
        !self.is_empty() && self.is_concatenated(g) && self.origin(g) == self.terminus(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unlabeled(n: usize) -> Vec<VertexInfo> {
        vec![VertexInfo::default(); n]
    }

    fn triangle() -> Graph {
        Graph::build(
            unlabeled(3),
            &[
                (VertexId(0), VertexId(1)),
                (VertexId(1), VertexId(2)),
                (VertexId(2), VertexId(0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_arc_graph() {
        let g = Graph::build(unlabeled(2), &[(VertexId(0), VertexId(1))]).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.star(VertexId(0)), &[EdgeId(0)]);
        assert_eq!(g.star(VertexId(1)), &[EdgeId(1)]);
    }

    #[test]
    fn loop_arc_graph() {
        let g = Graph::build(unlabeled(1), &[(VertexId(0), VertexId(0))]).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.star(VertexId(0)), &[EdgeId(0), EdgeId(1)]);
        assert!(g.is_loop_arc(ArcId(0)));
    }

    #[test]
    fn triangle_graph() {
        let g = triangle();
        assert_eq!(g.edge_count(), 6);
        for x in g.vertex_ids() {
            assert_eq!(g.star(x).len(), 2);
        }
    }

    #[test]
    fn stars_partition_edges() {
        let g = triangle();
        let total: usize = g.vertex_ids().map(|x| g.star(x).len()).sum();
        assert_eq!(total, g.edge_count());
    }

    #[test]
    fn involution_properties() {
        let g = triangle();
        for e in g.edges() {
            let r = g.edge(e.reverse);
            assert_ne!(e.id, r.id);
            assert_eq!(g.reverse(r.id), e.id);
            assert_eq!(r.origin, e.terminus);
            assert_eq!(r.terminus, e.origin);
            assert_eq!(r.arc, e.arc);
        }
    }

    #[test]
    fn rejects_disconnected() {
        let err = Graph::build(
            unlabeled(4),
            &[(VertexId(0), VertexId(1)), (VertexId(2), VertexId(3))],
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("disconnected"), "{msg}");
        assert!(msg.contains("v2"), "{msg}");
    }

    #[test]
    fn rejects_dangling_endpoint() {
        let err = Graph::build(unlabeled(2), &[(VertexId(0), VertexId(5))]).unwrap_err();
        assert!(err.to_string().contains("undeclared vertex"));
    }

    #[test]
    fn cycles_single_arc() {
        let g = Graph::build(unlabeled(2), &[(VertexId(0), VertexId(1))]).unwrap();
        let cycles = g.enumerate_simple_cycles(DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].edges, vec![EdgeId(0), EdgeId(1)]);
    }

    #[test]
    fn cycles_loop() {
        let g = Graph::build(unlabeled(1), &[(VertexId(0), VertexId(0))]).unwrap();
        let cycles = g.enumerate_simple_cycles(DEFAULT_ENUMERATION_CAP).unwrap();
        // a loop edge is itself a cycle; (e, -e) repeats the vertex and is
        // not simple
        assert_eq!(cycles.len(), 2);
        assert_eq!(cycles[0].edges, vec![EdgeId(0)]);
        assert_eq!(cycles[1].edges, vec![EdgeId(1)]);
    }

    #[test]
    fn cycles_triangle() {
        let g = triangle();
        let cycles = g.enumerate_simple_cycles(DEFAULT_ENUMERATION_CAP).unwrap();
        // 3 two-cycles plus the 2 orientations of the triangle
        assert_eq!(cycles.len(), 5);
        for c in &cycles {
            assert!(c.is_cycle(&g));
        }
    }

    #[test]
    fn cycles_are_canonical() {
        let g = triangle();
        let cycles = g.enumerate_simple_cycles(DEFAULT_ENUMERATION_CAP).unwrap();
        for c in &cycles {
            let min = c.edges.iter().min().unwrap();
            assert_eq!(c.edges.first(), Some(min));
        }
        // no two cycles share the same edge set
        let mut sets: Vec<Vec<EdgeId>> = cycles
            .iter()
            .map(|c| {
                let mut s = c.edges.clone();
                s.sort_unstable();
                s
            })
            .collect();
        sets.sort();
        sets.dedup();
        assert_eq!(sets.len(), cycles.len());
    }

    #[test]
    fn paths_triangle_adjacent() {
        let g = triangle();
        let paths = g
            .enumerate_simple_paths(VertexId(0), VertexId(1), DEFAULT_ENUMERATION_CAP)
            .unwrap();
        // direct edge plus the 2-edge detour through v2
        assert_eq!(paths.len(), 2);
        for p in &paths {
            assert!(p.is_concatenated(&g));
            assert_eq!(p.origin(&g), Some(VertexId(0)));
            assert_eq!(p.terminus(&g), Some(VertexId(1)));
        }
    }

    #[test]
    fn paths_same_vertex_are_cycles() {
        let g = triangle();
        let paths = g
            .enumerate_simple_paths(VertexId(0), VertexId(0), DEFAULT_ENUMERATION_CAP)
            .unwrap();
        assert!(!paths.is_empty());
        for p in &paths {
            assert!(p.is_cycle(&g));
        }
    }

    #[test]
    fn paths_single_arc() {
        let g = Graph::build(unlabeled(2), &[(VertexId(0), VertexId(1))]).unwrap();
        let paths = g
            .enumerate_simple_paths(VertexId(0), VertexId(1), DEFAULT_ENUMERATION_CAP)
            .unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].edges, vec![EdgeId(0)]);
    }

    #[test]
    fn enumeration_cap_refusal() {
        let g = triangle();
        let err = g.enumerate_simple_cycles(4).unwrap_err();
        assert!(err.to_string().contains("cap"));
    }

    #[test]
    fn all_pairs_have_paths() {
        let g = triangle();
        for x in g.vertex_ids() {
            for y in g.vertex_ids() {
                let paths = g
                    .enumerate_simple_paths(x, y, DEFAULT_ENUMERATION_CAP)
                    .unwrap();
                assert!(!paths.is_empty(), "no path {x} -> {y}");
            }
        }
    }
}
