//! Continuous per-arc reconstruction and the intrinsic distance on
//! network points.
//!
//! The unique solution on an arc with admissible endpoint values
//! `(α, β)` is the lower envelope of the two extremal branches,
//!
//! ```text
//!     w(s) = min( α + ∫₀ˢ σ_a⁺ ,  β - ∫ₛ¹ σ_a⁻ ),
//! ```
//!
//! whose crossing is the single concave kink. Profiles are stored as
//! branch-tagged samples carrying the exact branch derivative (the σ
//! value), so residual checks measure root-finding and quadrature error
//! instead of finite-difference error.
//!
//! Points in the interior of an arc are handled by splitting: the arc is
//! cut at the point, each piece gets integral weights over its
//! subinterval, and the discrete machinery runs on the augmented graph.
//! That realises the intrinsic distance `S_a^Γ` between arbitrary
//! network points and the maximal subsolution attaining a value at a
//! point, which solves the equation away from that point.
//!
//! A profile is a solution at an interior anchor exactly when its
//! branches do not form a convex (∨) corner there: at such a corner the
//! interior of the sublevel set provides forbidden test functions. The
//! vertex matching condition asks at each vertex for at least one
//! incident arc end carrying the inward maximal branch.

use crate::critical::{fw_table, negative_cycle, LevelWeights, RawEdge, RawTable};
use crate::dfe::{check_subsolution, VertexFunction};
use crate::error::{Error, Result};
use crate::graph::{ArcId, EdgeId, VertexId};
use crate::hamiltonian::{ArcHamiltonian, Hamiltonian};
use crate::network::Network;
use crate::numerics::{sigma_pm, SigmaBranch, SigmaProfile};
use crate::tol::Tolerances;

/// A point of the network in canonical form: vertices by id, interior
/// points by arc and parameter in `(0,1)` along the arc's own
/// parametrization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NetworkPoint {
    Vertex(VertexId),
    Interior { arc: ArcId, s: f64 },
}

impl NetworkPoint {
    pub fn new(net: &Network, arc: ArcId, s: f64) -> Result<NetworkPoint> {
        if arc.0 >= net.graph().arc_count() {
            return Err(Error::Parse(format!("unknown arc {arc}")));
        }
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Parse(format!(
                "point parameter s = {s} outside [0,1]"
            )));
        }
        let snap = 1e-12;
        let (tail, head) = net.graph().arc_endpoints(arc);
        if s <= snap {
            Ok(NetworkPoint::Vertex(tail))
        } else if s >= 1.0 - snap {
            Ok(NetworkPoint::Vertex(head))
        } else {
            Ok(NetworkPoint::Interior { arc, s })
        }
    }

    /// Point at parameter `s` along a directed edge; backward edges flip
    /// to the arc parametrization.
    pub fn on_edge(net: &Network, e: EdgeId, s: f64) -> Result<NetworkPoint> {
        let edge = net.graph().edge(e);
        let s_arc = match edge.orientation {
            crate::graph::Orientation::Forward => s,
            crate::graph::Orientation::Backward => 1.0 - s,
        };
        NetworkPoint::new(net, edge.arc, s_arc)
    }

    pub fn same_point(&self, other: &NetworkPoint, eps: f64) -> bool {
        match (self, other) {
            (NetworkPoint::Vertex(a), NetworkPoint::Vertex(b)) => a == b,
            (
                NetworkPoint::Interior { arc: a1, s: s1 },
                NetworkPoint::Interior { arc: a2, s: s2 },
            ) => a1 == a2 && (s1 - s2).abs() <= eps,
            _ => false,
        }
    }
}

impl std::fmt::Display for NetworkPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NetworkPoint::Vertex(v) => write!(f, "{v}"),
            NetworkPoint::Interior { arc, s } => write!(f, "{arc}@{s}"),
        }
    }
}

/// Which extremal formula produces a profile node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `w(s) = (anchor value) + ∫ σ⁺` from the left.
    PlusFromLeft,
    /// `w(s) = (anchor value) - ∫ σ⁻` from the right.
    MinusFromRight,
    /// Concave crossing of the two branches; no single derivative.
    Kink,
    /// Convex combination `λ σ⁻ + (1-λ) σ⁺` (regularized subsolutions).
    Mixed,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::PlusFromLeft => "plus",
            Branch::MinusFromRight => "minus",
            Branch::Kink => "kink",
            Branch::Mixed => "mixed",
        }
    }
}

/// Interior anchor of a profile: a pinned value at `s` with the branches
/// active on either side.
#[derive(Debug, Clone, Copy)]
pub struct AnchorInfo {
    pub s: f64,
    pub value: f64,
    pub left_branch: Branch,
    pub right_branch: Branch,
    pub sigma_minus: f64,
    pub sigma_plus: f64,
}

impl AnchorInfo {
    /// A convex corner: minus branch entering, plus branch leaving, with
    /// separated slopes. The supersolution test fails there.
    pub fn is_v_kink(&self, tol: f64) -> bool {
        self.left_branch == Branch::MinusFromRight
            && self.right_branch == Branch::PlusFromLeft
            && self.sigma_plus - self.sigma_minus > tol
    }
}

/// Branch-tagged samples of a continuous function on one arc.
#[derive(Debug, Clone)]
pub struct ArcProfile {
    pub arc: ArcId,
    pub level: f64,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub branches: Vec<Branch>,
    /// Branch derivative (stored σ value) per node; NaN at kinks.
    pub derivatives: Vec<f64>,
    /// `w(0)` and `w(1)`.
    pub alpha: f64,
    pub beta: f64,
    /// Concave crossings inside solve pieces.
    pub kinks: Vec<f64>,
    /// Interior pinned points (piece boundaries), ascending in `s`.
    pub anchors: Vec<AnchorInfo>,
}

impl ArcProfile {
    /// Piecewise-linear evaluation between stored nodes.
    pub fn interpolate(&self, s: f64) -> f64 {
        if s <= self.nodes[0] {
            return self.values[0];
        }
        if s >= *self.nodes.last().unwrap() {
            return *self.values.last().unwrap();
        }
        let i = self.nodes.partition_point(|&x| x <= s);
        let (s0, v0) = (self.nodes[i - 1], self.values[i - 1]);
        let (s1, v1) = (self.nodes[i], self.values[i]);
        v0 + (v1 - v0) * (s - s0) / (s1 - s0)
    }

    pub fn max_abs_difference(&self, other: &ArcProfile) -> f64 {
        self.nodes
            .iter()
            .map(|&s| (self.interpolate(s) - other.interpolate(s)).abs())
            .fold(0.0, f64::max)
    }
}

/// Vertex values plus per-arc profiles.
#[derive(Debug, Clone)]
pub struct NetworkFunction {
    pub level: f64,
    pub vertex_values: VertexFunction,
    pub profiles: Vec<ArcProfile>,
}

// ---------------------------------------------------------------------
// solve pieces
// ---------------------------------------------------------------------

struct Piece {
    nodes: Vec<f64>,
    values: Vec<f64>,
    branches: Vec<Branch>,
    derivatives: Vec<f64>,
    kink: Option<f64>,
}

fn uniform_nodes(lo: f64, hi: f64, resolution: usize) -> Vec<f64> {
    // global uniform grid restricted to [lo, hi], endpoints included
    let r = resolution.max(2);
    let mut out = vec![lo];
    for i in 0..r {
        let s = i as f64 / (r - 1) as f64;
        if s > lo + 1e-12 && s < hi - 1e-12 {
            out.push(s);
        }
    }
    out.push(hi);
    out
}

/// Prefix integrals `∫_lo^{node_j}` of a branch, accumulated node to
/// node so grid-aligned splits stay additive.
fn prefix_integrals<H: Hamiltonian + ?Sized>(
    h: &H,
    sp: &SigmaProfile,
    branch: SigmaBranch,
    nodes: &[f64],
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(nodes.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in nodes.windows(2) {
        acc += sp.integrate(h, branch, w[0], w[1], tol)?;
        out.push(acc);
    }
    Ok(out)
}

/// The unique solution on `[lo, hi]` with admissible endpoint values.
#[allow(clippy::too_many_arguments)]
fn solve_piece<H: Hamiltonian + ?Sized>(
    h: &H,
    sp: &SigmaProfile,
    lo: f64,
    hi: f64,
    v_lo: f64,
    v_hi: f64,
    resolution: usize,
    tol: &Tolerances,
) -> Result<Piece> {
    let nodes = uniform_nodes(lo, hi, resolution);
    let plus_prefix = prefix_integrals(h, sp, SigmaBranch::Plus, &nodes, tol)?;
    let minus_prefix = prefix_integrals(h, sp, SigmaBranch::Minus, &nodes, tol)?;
    let i_plus = *plus_prefix.last().unwrap();
    let i_minus = *minus_prefix.last().unwrap();
    let rise = v_hi - v_lo;
    let slack = tol.tol_zero;
    if rise > i_plus + slack {
        return Err(Error::Admissibility(format!(
            "boundary data on [{lo}, {hi}] rise by {rise:.6e}, exceeding the maximal increment \
             ∫σ⁺ = {i_plus:.6e}"
        )));
    }
    if rise < i_minus - slack {
        return Err(Error::Admissibility(format!(
            "boundary data on [{lo}, {hi}] rise by {rise:.6e}, below the minimal increment \
             ∫σ⁻ = {i_minus:.6e}"
        )));
    }

    let scale = 1.0
        + v_lo
            .abs()
            .max(v_hi.abs())
            .max(i_plus.abs())
            .max(i_minus.abs());
    let tie = 1e-10 * scale;
    let gap = |j: usize| (v_lo + plus_prefix[j]) - (v_hi - (i_minus - minus_prefix[j]));

    // locate the single crossing of the two branches (the gap is
    // nondecreasing in s)
    let mut crossing = None;
    for j in 1..nodes.len() {
        if gap(j) > tie && gap(j - 1) <= tie {
            let mut a = nodes[j - 1];
            let mut b = nodes[j];
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                let g_mid = (v_lo
                    + plus_prefix[j - 1]
                    + sp.integrate(h, SigmaBranch::Plus, nodes[j - 1], mid, tol)?)
                    - (v_hi
                        - (i_minus
                            - minus_prefix[j - 1]
                            - sp.integrate(h, SigmaBranch::Minus, nodes[j - 1], mid, tol)?));
                if g_mid > 0.0 {
                    b = mid;
                } else {
                    a = mid;
                }
                if b - a < 1e-13 {
                    break;
                }
            }
            crossing = Some(0.5 * (a + b));
            break;
        }
    }

    let mut piece = Piece {
        nodes: Vec::new(),
        values: Vec::new(),
        branches: Vec::new(),
        derivatives: Vec::new(),
        kink: None,
    };
    for (j, &s) in nodes.iter().enumerate() {
        let pv = v_lo + plus_prefix[j];
        let mv = v_hi - (i_minus - minus_prefix[j]);
        let (sm, spv) = sigma_pm(h, sp.level, s, tol)?;
        let branch = if pv <= mv - tie {
            Branch::PlusFromLeft
        } else if mv <= pv - tie {
            Branch::MinusFromRight
        } else if spv - sm <= tie.max(tol.tol_p) {
            // degenerate tie: both formulas share the derivative
            Branch::PlusFromLeft
        } else {
            // tie with separated slopes: the side of the crossing decides
            match crossing {
                Some(star) if s > star => Branch::MinusFromRight,
                _ => Branch::PlusFromLeft,
            }
        };
        piece.nodes.push(s);
        piece.values.push(pv.min(mv));
        piece.derivatives.push(match branch {
            Branch::PlusFromLeft => spv,
            Branch::MinusFromRight => sm,
            _ => f64::NAN,
        });
        piece.branches.push(branch);
    }

    if let Some(star) = crossing {
        let (sm, spv) = sigma_pm(h, sp.level, star, tol)?;
        if spv - sm > tie.max(tol.tol_p) && star > lo && star < hi {
            piece.kink = Some(star);
            // make the kink an explicit node unless one already sits there
            let pos = piece.nodes.partition_point(|&x| x < star);
            let on_left = pos > 0 && (piece.nodes[pos - 1] - star).abs() < 1e-9;
            let on_right = pos < piece.nodes.len() && (piece.nodes[pos] - star).abs() < 1e-9;
            if on_left || on_right {
                let at = if on_right { pos } else { pos - 1 };
                piece.branches[at] = Branch::Kink;
                piece.derivatives[at] = f64::NAN;
            } else {
                let value = v_lo
                    + plus_prefix[pos - 1]
                    + sp.integrate(h, SigmaBranch::Plus, piece.nodes[pos - 1], star, tol)?;
                piece.nodes.insert(pos, star);
                piece.values.insert(pos, value);
                piece.branches.insert(pos, Branch::Kink);
                piece.derivatives.insert(pos, f64::NAN);
            }
        }
    }
    Ok(piece)
}

/// First non-kink branch of a piece, scanning from the chosen end.
fn edge_branch(piece: &Piece, from_end: bool) -> Branch {
    let scan: Box<dyn Iterator<Item = usize>> = if from_end {
        Box::new((0..piece.branches.len()).rev())
    } else {
        Box::new(0..piece.branches.len())
    };
    for i in scan {
        if piece.branches[i] != Branch::Kink {
            return piece.branches[i];
        }
    }
    Branch::PlusFromLeft
}

fn assemble_profile(
    arc: ArcId,
    level: f64,
    pieces: Vec<Piece>,
    anchors: Vec<AnchorInfo>,
) -> ArcProfile {
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    let mut branches = Vec::new();
    let mut derivatives = Vec::new();
    let mut kinks = Vec::new();
    for (k, piece) in pieces.into_iter().enumerate() {
        let skip = usize::from(k > 0); // shared boundary node
        nodes.extend_from_slice(&piece.nodes[skip..]);
        values.extend_from_slice(&piece.values[skip..]);
        branches.extend_from_slice(&piece.branches[skip..]);
        derivatives.extend_from_slice(&piece.derivatives[skip..]);
        kinks.extend(piece.kink);
    }
    let alpha = values[0];
    let beta = *values.last().unwrap();
    ArcProfile {
        arc,
        level,
        nodes,
        values,
        branches,
        derivatives,
        alpha,
        beta,
        kinks,
        anchors,
    }
}

// ---------------------------------------------------------------------
// per-arc operations
// ---------------------------------------------------------------------

/// The unique solution on the arc taking `alpha` at 0 and `beta` at 1.
pub fn solve_on_arc(
    h: &ArcHamiltonian,
    a: f64,
    alpha: f64,
    beta: f64,
    resolution: usize,
    tol: &Tolerances,
) -> Result<ArcProfile> {
    let sp = SigmaProfile::build(h, a, tol)?;
    let piece = solve_piece(h, &sp, 0.0, 1.0, alpha, beta, resolution, tol)?;
    Ok(assemble_profile(h.arc, a, vec![piece], Vec::new()))
}

/// Maximal subsolution through an interior point `(s0, alpha)`: minus
/// branch to the left, plus branch to the right. It solves the equation
/// off `s0`; at `s0` the solution property fails unless the level is
/// degenerate there.
pub fn interior_max_subsolution(
    h: &ArcHamiltonian,
    a: f64,
    s0: f64,
    alpha: f64,
    resolution: usize,
    tol: &Tolerances,
) -> Result<ArcProfile> {
    if !(s0 > 0.0 && s0 < 1.0) {
        return Err(Error::Misuse(format!("anchor s0 = {s0} outside (0,1)")));
    }
    let sp = SigmaProfile::build(h, a, tol)?;
    let left_nodes = uniform_nodes(0.0, s0, resolution);
    let right_nodes = uniform_nodes(s0, 1.0, resolution);
    let left_minus = prefix_integrals(h, &sp, SigmaBranch::Minus, &left_nodes, tol)?;
    let right_plus = prefix_integrals(h, &sp, SigmaBranch::Plus, &right_nodes, tol)?;
    let i_minus_left = *left_minus.last().unwrap();

    let branch_values = |nodes: &[f64], branch: Branch| -> Result<Piece> {
        let mut piece = Piece {
            nodes: nodes.to_vec(),
            values: Vec::new(),
            branches: vec![branch; nodes.len()],
            derivatives: Vec::new(),
            kink: None,
        };
        for &s in nodes {
            let (sm, spv) = sigma_pm(h, a, s, tol)?;
            piece.derivatives.push(if branch == Branch::MinusFromRight {
                sm
            } else {
                spv
            });
        }
        Ok(piece)
    };
    let mut left = branch_values(&left_nodes, Branch::MinusFromRight)?;
    left.values = left_minus
        .iter()
        .map(|&m| alpha - (i_minus_left - m))
        .collect();
    let mut right = branch_values(&right_nodes, Branch::PlusFromLeft)?;
    right.values = right_plus.iter().map(|&p| alpha + p).collect();

    let (sm, spv) = sigma_pm(h, a, s0, tol)?;
    let anchor = AnchorInfo {
        s: s0,
        value: alpha,
        left_branch: Branch::MinusFromRight,
        right_branch: Branch::PlusFromLeft,
        sigma_minus: sm,
        sigma_plus: spv,
    };
    Ok(assemble_profile(h.arc, a, vec![left, right], vec![anchor]))
}

/// Maximal periodic subsolution through `(s0, alpha)` on a closed arc:
/// takes the value `alpha + β` at both endpoints with
/// `β = min( -∫₀^{s0} σ⁻ , ∫_{s0}¹ σ⁺ )`, and solves the equation on
/// both subintervals.
pub fn periodic_max_subsolution(
    h: &ArcHamiltonian,
    a: f64,
    s0: f64,
    alpha: f64,
    resolution: usize,
    tol: &Tolerances,
) -> Result<ArcProfile> {
    if !h.closed {
        return Err(Error::Misuse(format!(
            "periodic construction on non-closed arc {}",
            h.arc
        )));
    }
    if !(s0 > 0.0 && s0 < 1.0) {
        return Err(Error::Misuse(format!("anchor s0 = {s0} outside (0,1)")));
    }
    let sp = SigmaProfile::build(h, a, tol)?;
    // periodic subsolutions exist iff ∫σ⁻ <= 0 <= ∫σ⁺
    if sp.total_minus() > tol.tol_zero || sp.total_plus() < -tol.tol_zero {
        return Err(Error::Level(format!(
            "no periodic subsolutions at level {a} on arc {} (∫σ⁻ = {:.3e}, ∫σ⁺ = {:.3e})",
            h.arc,
            sp.total_minus(),
            sp.total_plus()
        )));
    }
    let minus_left = sp.integrate(h, SigmaBranch::Minus, 0.0, s0, tol)?;
    let plus_right = sp.integrate(h, SigmaBranch::Plus, s0, 1.0, tol)?;
    let beta = (-minus_left).min(plus_right);
    let endpoint = alpha + beta;
    let left = solve_piece(h, &sp, 0.0, s0, endpoint, alpha, resolution, tol)?;
    let right = solve_piece(h, &sp, s0, 1.0, alpha, endpoint, resolution, tol)?;
    let (sm, spv) = sigma_pm(h, a, s0, tol)?;
    let anchor = AnchorInfo {
        s: s0,
        value: alpha,
        left_branch: edge_branch(&left, true),
        right_branch: edge_branch(&right, false),
        sigma_minus: sm,
        sigma_plus: spv,
    };
    Ok(assemble_profile(h.arc, a, vec![left, right], vec![anchor]))
}

/// Extends a discrete subsolution to per-arc profiles. The result is a
/// solution on the network exactly when `u` solves the discrete
/// equation.
pub fn extend_vertex_solution(
    net: &Network,
    u: &VertexFunction,
    w: &LevelWeights,
    resolution: usize,
) -> Result<NetworkFunction> {
    let tol = net.tolerances();
    let g = net.graph();
    let sub = check_subsolution(u, g, w, tol.tol_zero);
    if !sub.ok {
        let (e, excess) = sub.violations[0];
        return Err(Error::Misuse(format!(
            "extension of a non-subsolution: du({e}) exceeds σ by {excess:.3e}"
        )));
    }
    let mut profiles = Vec::with_capacity(g.arc_count());
    for arc in g.arc_ids() {
        let (tail, head) = g.arc_endpoints(arc);
        let profile = solve_on_arc(
            net.hamiltonian(arc),
            u.level,
            u.value(tail),
            u.value(head),
            resolution,
            tol,
        )?;
        profiles.push(profile);
    }
    Ok(NetworkFunction {
        level: u.level,
        vertex_values: u.clone(),
        profiles,
    })
}

// ---------------------------------------------------------------------
// point splitting: the augmented graph over network points
// ---------------------------------------------------------------------

/// Scratch graph with interior points promoted to vertices; the base
/// network stays untouched.
pub struct PointContext<'a> {
    net: &'a Network,
    pub level: f64,
    profiles: Vec<SigmaProfile>,
    /// Per arc: interior split points ascending, with their node index.
    splits: Vec<Vec<(f64, usize)>>,
    node_count: usize,
    table: RawTable,
}

impl<'a> PointContext<'a> {
    /// Splits every arc carrying one of `points` and builds the
    /// augmented distance table. A negative cycle beyond `tol_zero`
    /// means the level sits below the critical value.
    pub fn build(net: &'a Network, a: f64, points: &[NetworkPoint]) -> Result<PointContext<'a>> {
        let g = net.graph();
        let tol = net.tolerances();
        let mut profiles = Vec::with_capacity(g.arc_count());
        for arc in g.arc_ids() {
            profiles.push(SigmaProfile::build(net.hamiltonian(arc), a, tol)?);
        }
        let mut splits: Vec<Vec<(f64, usize)>> = vec![Vec::new(); g.arc_count()];
        for p in points {
            if let NetworkPoint::Interior { arc, s } = p {
                let slot = &mut splits[arc.0];
                if !slot.iter().any(|(x, _)| (x - s).abs() <= 1e-12) {
                    slot.push((*s, 0));
                }
            }
        }
        let mut node_count = g.vertex_count();
        for slot in &mut splits {
            slot.sort_by(|a, b| a.0.total_cmp(&b.0));
            for entry in slot.iter_mut() {
                entry.1 = node_count;
                node_count += 1;
            }
        }
        let mut edges = Vec::new();
        for arc in g.arc_ids() {
            let h = net.hamiltonian(arc);
            let sp = &profiles[arc.0];
            let (tail, head) = g.arc_endpoints(arc);
            let mut boundaries = vec![(0.0, tail.0)];
            boundaries.extend(splits[arc.0].iter().copied());
            boundaries.push((1.0, head.0));
            for pair in boundaries.windows(2) {
                let (sl, nl) = pair[0];
                let (sr, nr) = pair[1];
                let fwd = sp.integrate(h, SigmaBranch::Plus, sl, sr, tol)?;
                let bwd = -sp.integrate(h, SigmaBranch::Minus, sl, sr, tol)?;
                edges.push(RawEdge {
                    origin: nl,
                    terminus: nr,
                    weight: fwd,
                });
                edges.push(RawEdge {
                    origin: nr,
                    terminus: nl,
                    weight: bwd,
                });
            }
        }
        if let Some((_, value)) = negative_cycle(node_count, &edges) {
            if value < -tol.tol_zero {
                return Err(Error::Level(format!(
                    "negative cycle of cost {value:.6e} on the augmented graph at level {a}; \
                     the level lies below the critical value"
                )));
            }
        }
        let table = fw_table(node_count, &edges);
        Ok(PointContext {
            net,
            level: a,
            profiles,
            splits,
            node_count,
            table,
        })
    }

    pub fn node(&self, p: &NetworkPoint) -> Result<usize> {
        match p {
            NetworkPoint::Vertex(v) => Ok(v.0),
            NetworkPoint::Interior { arc, s } => self.splits[arc.0]
                .iter()
                .find(|(x, _)| (x - s).abs() <= 1e-12)
                .map(|(_, n)| *n)
                .ok_or_else(|| {
                    Error::Misuse(format!("point {p} was not registered with this context"))
                }),
        }
    }

    /// `S_a^Γ` between two registered points; for the same point this is
    /// the cheapest nontrivial closed curve through it.
    pub fn distance(&self, x: &NetworkPoint, y: &NetworkPoint) -> Result<f64> {
        let i = self.node(x)?;
        let j = self.node(y)?;
        Ok(self.table.at(i, j))
    }

    /// Hopf–Lax over the registered sources: values of
    /// `min_i ( g_i + S_a^Γ(y_i, ·) )` at vertices and split points,
    /// then per-arc profiles solved piecewise between the splits.
    pub fn hopf_lax(
        &self,
        sources: &[(NetworkPoint, f64)],
        resolution: usize,
    ) -> Result<NetworkFunction> {
        let g = self.net.graph();
        let tol = self.net.tolerances();
        let source_nodes: Vec<(usize, f64)> = sources
            .iter()
            .map(|(p, v)| Ok((self.node(p)?, *v)))
            .collect::<Result<_>>()?;
        let eval = |node: usize| -> f64 {
            source_nodes
                .iter()
                .map(|&(src, gv)| {
                    let d = if src == node {
                        0.0
                    } else {
                        self.table.at(src, node)
                    };
                    gv + d
                })
                .fold(f64::INFINITY, f64::min)
        };
        let vertex_values = VertexFunction {
            level: self.level,
            values: (0..g.vertex_count()).map(eval).collect(),
        };
        let mut profiles = Vec::with_capacity(g.arc_count());
        for arc in g.arc_ids() {
            let h = self.net.hamiltonian(arc);
            let sp = &self.profiles[arc.0];
            let (tail, head) = g.arc_endpoints(arc);
            let mut boundaries = vec![(0.0, vertex_values.value(tail))];
            for &(s, node) in &self.splits[arc.0] {
                boundaries.push((s, eval(node)));
            }
            boundaries.push((1.0, vertex_values.value(head)));
            let mut pieces = Vec::new();
            for pair in boundaries.windows(2) {
                pieces.push(solve_piece(
                    h, sp, pair[0].0, pair[1].0, pair[0].1, pair[1].1, resolution, tol,
                )?);
            }
            let mut anchors = Vec::new();
            for (k, &(s, _)) in self.splits[arc.0].iter().enumerate() {
                let (sm, spv) = sigma_pm(h, self.level, s, tol)?;
                anchors.push(AnchorInfo {
                    s,
                    value: boundaries[k + 1].1,
                    left_branch: edge_branch(&pieces[k], true),
                    right_branch: edge_branch(&pieces[k + 1], false),
                    sigma_minus: sm,
                    sigma_plus: spv,
                });
            }
            profiles.push(assemble_profile(arc, self.level, pieces, anchors));
        }
        Ok(NetworkFunction {
            level: self.level,
            vertex_values,
            profiles,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }
}

/// Intrinsic distance `S_a^Γ` between two network points. On vertex
/// pairs this reproduces the vertex distance table exactly.
pub fn intrinsic_distance(
    net: &Network,
    a: f64,
    x: &NetworkPoint,
    y: &NetworkPoint,
) -> Result<f64> {
    let ctx = PointContext::build(net, a, &[*x, *y])?;
    ctx.distance(x, y)
}

/// Admissibility of point-trace data: `g_i - g_j <= S_a^Γ(y_j, y_i)`
/// pairwise. Returns the violating index pairs with their excess.
pub fn check_point_trace_admissible(
    ctx: &PointContext<'_>,
    sources: &[(NetworkPoint, f64)],
    tol: f64,
) -> Result<Vec<(usize, usize, f64)>> {
    let mut violations = Vec::new();
    for (i, (pi, gi)) in sources.iter().enumerate() {
        for (j, (pj, gj)) in sources.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = ctx.distance(pj, pi)?;
            let excess = gi - gj - d;
            if excess > tol {
                violations.push((i, j, excess));
            }
        }
    }
    Ok(violations)
}

/// Solves from an admissible trace on arbitrary network points via the
/// intrinsic Hopf–Lax formula.
pub fn solve_from_trace(
    net: &Network,
    a: f64,
    sources: &[(NetworkPoint, f64)],
    resolution: usize,
) -> Result<NetworkFunction> {
    if sources.is_empty() {
        return Err(Error::Misuse("point trace has no entries".into()));
    }
    let points: Vec<NetworkPoint> = sources.iter().map(|(p, _)| *p).collect();
    let ctx = PointContext::build(net, a, &points)?;
    let violations = check_point_trace_admissible(&ctx, sources, net.tolerances().tol_zero)?;
    if let Some(&(i, j, excess)) = violations.first() {
        return Err(Error::Admissibility(format!(
            "point trace violates g({}) - g({}) <= S^Γ by {excess:.3e}",
            sources[i].0, sources[j].0
        )));
    }
    ctx.hopf_lax(sources, resolution)
}

/// The maximal subsolution attaining `value` at `y`, realised as
/// `value + S_a^Γ(y, ·)`. It solves the equation everywhere except
/// possibly at `y` itself.
pub fn maximal_subsolution_from_point(
    net: &Network,
    y: &NetworkPoint,
    value: f64,
    a: f64,
    resolution: usize,
) -> Result<NetworkFunction> {
    solve_from_trace(net, a, &[(*y, value)], resolution)
}

// ---------------------------------------------------------------------
// C¹ regularization
// ---------------------------------------------------------------------

/// Replaces each arc profile of a critical subsolution by the kink-free
/// convex mix `w(γ(0)) + ∫ [λ σ⁻ + (1-λ) σ⁺]`, with `λ` chosen per arc
/// to hit the endpoint value. Returns the regularized function and the
/// per-arc `λ`.
pub fn c1_subsolution(
    net: &Network,
    u: &VertexFunction,
    w: &LevelWeights,
    resolution: usize,
) -> Result<(NetworkFunction, Vec<f64>)> {
    let tol = net.tolerances();
    let g = net.graph();
    let sub = check_subsolution(u, g, w, tol.tol_zero);
    if !sub.ok {
        let (e, excess) = sub.violations[0];
        return Err(Error::Misuse(format!(
            "regularization of a non-subsolution: du({e}) exceeds σ by {excess:.3e}"
        )));
    }
    let mut profiles = Vec::with_capacity(g.arc_count());
    let mut lambdas = Vec::with_capacity(g.arc_count());
    for arc in g.arc_ids() {
        let h = net.hamiltonian(arc);
        let sp = SigmaProfile::build(h, u.level, tol)?;
        let (tail, head) = g.arc_endpoints(arc);
        let rise = u.value(head) - u.value(tail);
        let i_plus = sp.total_plus();
        let i_minus = sp.total_minus();
        let width = i_plus - i_minus;
        // the mixed integral is linear in λ, so the interpolation weight
        // is explicit; degenerate arcs take λ = 0 by convention
        let lambda = if width <= tol.tol_p.max(1e-12) {
            0.0
        } else {
            (i_plus - rise) / width
        };
        let slack = tol.tol_zero / width.max(1e-9) + 1e-9;
        if !(-slack..=1.0 + slack).contains(&lambda) {
            return Err(Error::Admissibility(format!(
                "mixing weight λ = {lambda:.6} outside [0,1] on arc {arc}; \
                 the endpoint data are not admissible"
            )));
        }
        let lambda = lambda.clamp(0.0, 1.0);
        let nodes = uniform_nodes(0.0, 1.0, resolution);
        let plus_prefix = prefix_integrals(h, &sp, SigmaBranch::Plus, &nodes, tol)?;
        let minus_prefix = prefix_integrals(h, &sp, SigmaBranch::Minus, &nodes, tol)?;
        let mut values = Vec::with_capacity(nodes.len());
        let mut derivatives = Vec::with_capacity(nodes.len());
        for (j, &s) in nodes.iter().enumerate() {
            values.push(u.value(tail) + lambda * minus_prefix[j] + (1.0 - lambda) * plus_prefix[j]);
            let (sm, spv) = sigma_pm(h, u.level, s, tol)?;
            derivatives.push(lambda * sm + (1.0 - lambda) * spv);
        }
        let branches = vec![Branch::Mixed; nodes.len()];
        let alpha = values[0];
        let beta = *values.last().unwrap();
        profiles.push(ArcProfile {
            arc,
            level: u.level,
            nodes,
            values,
            branches,
            derivatives,
            alpha,
            beta,
            kinks: Vec::new(),
            anchors: Vec::new(),
        });
        lambdas.push(lambda);
    }
    Ok((
        NetworkFunction {
            level: u.level,
            vertex_values: u.clone(),
            profiles,
        },
        lambdas,
    ))
}

// ---------------------------------------------------------------------
// verification
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ArcResidual {
    pub arc: ArcId,
    /// `max |H(s, w'(s)) - a|` over non-kink nodes.
    pub max_abs: f64,
    /// `max (H(s, w'(s)) - a)` (signed; negative for strict
    /// subsolutions).
    pub max_signed: f64,
    pub worst_node: f64,
}

#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub level: f64,
    pub per_arc: Vec<ArcResidual>,
}

impl ResidualReport {
    pub fn max_abs(&self) -> f64 {
        self.per_arc.iter().map(|r| r.max_abs).fold(0.0, f64::max)
    }

    pub fn max_signed(&self) -> f64 {
        self.per_arc
            .iter()
            .map(|r| r.max_signed)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Evaluates `H(s, w'(s)) - a` at every non-kink node using the stored
/// branch derivatives.
pub fn residual_check(net: &Network, nf: &NetworkFunction) -> ResidualReport {
    let mut per_arc = Vec::with_capacity(nf.profiles.len());
    for profile in &nf.profiles {
        let h = net.hamiltonian(profile.arc);
        let mut max_abs = 0.0f64;
        let mut max_signed = f64::NEG_INFINITY;
        let mut worst = 0.0;
        for (j, &s) in profile.nodes.iter().enumerate() {
            let d = profile.derivatives[j];
            if d.is_nan() {
                continue;
            }
            let r = h.value(s, d) - nf.level;
            if r.abs() > max_abs {
                max_abs = r.abs();
                worst = s;
            }
            max_signed = max_signed.max(r);
        }
        per_arc.push(ArcResidual {
            arc: profile.arc,
            max_abs,
            max_signed,
            worst_node: worst,
        });
    }
    ResidualReport {
        level: nf.level,
        per_arc,
    }
}

#[derive(Debug, Clone)]
pub struct NetworkSolutionReport {
    pub level: f64,
    pub continuity_ok: bool,
    pub max_abs_residual: f64,
    pub residual_ok: bool,
    /// State-constraint verdict per vertex: some incident arc end
    /// carries the inward maximal branch.
    pub vertex_ok: Vec<bool>,
    /// Convex corners (arc, s) where the supersolution test fails.
    pub v_kinks: Vec<(ArcId, f64)>,
}

impl NetworkSolutionReport {
    pub fn is_solution(&self) -> bool {
        self.continuity_ok
            && self.residual_ok
            && self.v_kinks.is_empty()
            && self.vertex_ok.iter().all(|&b| b)
    }

    /// Solution away from the listed points (anchors there are allowed
    /// to carry convex corners).
    pub fn is_solution_except(&self, points: &[NetworkPoint], eps: f64) -> bool {
        self.continuity_ok
            && self.residual_ok
            && self.vertex_ok.iter().all(|&b| b)
            && self.v_kinks.iter().all(|&(arc, s)| {
                points
                    .iter()
                    .any(|p| p.same_point(&NetworkPoint::Interior { arc, s }, eps))
            })
    }
}

/// Full solution check of a network function: continuity at the
/// vertices, pointwise residuals, absence of convex corners at anchors,
/// and the vertex matching condition.
pub fn network_solution_check(
    net: &Network,
    nf: &NetworkFunction,
    tol: f64,
) -> Result<NetworkSolutionReport> {
    let g = net.graph();
    let tols = net.tolerances();
    let mut continuity_ok = true;
    let mut v_kinks = Vec::new();
    let mut vertex_ok = vec![false; g.vertex_count()];
    for profile in &nf.profiles {
        let h = net.hamiltonian(profile.arc);
        let sp = SigmaProfile::build(h, nf.level, tols)?;
        let (tail, head) = g.arc_endpoints(profile.arc);
        let u_tail = nf.vertex_values.value(tail);
        let u_head = nf.vertex_values.value(head);
        if (profile.alpha - u_tail).abs() > tol || (profile.beta - u_head).abs() > tol {
            continuity_ok = false;
        }
        if h.closed && (profile.alpha - profile.beta).abs() > tol {
            continuity_ok = false;
        }
        for anchor in &profile.anchors {
            if anchor.is_v_kink(tol) {
                v_kinks.push((profile.arc, anchor.s));
            }
        }
        // first and last piece boundaries
        let (s1, v1) = profile
            .anchors
            .first()
            .map(|p| (p.s, p.value))
            .unwrap_or((1.0, profile.beta));
        let (sk, vk) = profile
            .anchors
            .last()
            .map(|p| (p.s, p.value))
            .unwrap_or((0.0, profile.alpha));
        // head end (s = 1): inward plus branch
        let inward_head = sp.integrate(h, SigmaBranch::Plus, sk, 1.0, tols)?;
        if (profile.beta - vk) >= inward_head - tol {
            vertex_ok[head.0] = true;
        }
        // tail end (s = 0): inward plus branch of the reversed arc
        let inward_tail = -sp.integrate(h, SigmaBranch::Minus, 0.0, s1, tols)?;
        if (profile.alpha - v1) >= inward_tail - tol {
            vertex_ok[tail.0] = true;
        }
    }

    let residual = residual_check(net, nf);
    let max_abs_residual = residual.max_abs();
    Ok(NetworkSolutionReport {
        level: nf.level,
        continuity_ok,
        max_abs_residual,
        residual_ok: max_abs_residual <= tol,
        vertex_ok,
        v_kinks,
    })
}
