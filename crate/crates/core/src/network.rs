//! An embedded network: graph plus one Hamiltonian per arc.
//!
//! Construction validates the Hamiltonians, computes the per-arc floors
//! `a_γ` (and `c_γ` for closed arcs) and the network floor
//!
//! ```text
//!     a₀ = max( max over open arcs of a_γ,  max over closed arcs of c_γ ).
//! ```
//!
//! The structural condition on arcs attaining the floor — that
//! `s -> min_p H(s,p)` is constant whenever `a_γ = a₀` — is checked but
//! not enforced: violations void the uniqueness guarantees at the bottom
//! level and are reported as warnings.

use crate::error::{Error, Result};
use crate::graph::{ArcId, Graph, VertexId, VertexInfo};
use crate::hamiltonian::{
    a_gamma, c_gamma, min_over_p, ArcHamiltonian, Hamiltonian, HamiltonianFamily,
};
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy)]
pub struct ArcDiagnostics {
    pub a_gamma: f64,
    /// Present only for closed arcs.
    pub c_gamma: Option<f64>,
}

impl ArcDiagnostics {
    /// The arc's contribution to `a₀`.
    pub fn floor(&self) -> f64 {
        self.c_gamma.unwrap_or(self.a_gamma)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct H4Warning {
    pub arc: ArcId,
    /// Spread of `s -> min_p H(s,p)` over the arc.
    pub variation: f64,
}

impl std::fmt::Display for H4Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "arc {} attains the floor level but min_p H varies by {:.3e} over the arc; \
             uniqueness guarantees at the bottom level are void",
            self.arc, self.variation
        )
    }
}

/// Immutable network: safe to share across threads once built.
#[derive(Debug, Clone)]
pub struct Network {
    graph: Graph,
    hamiltonians: Vec<ArcHamiltonian>,
    tol: Tolerances,
    diagnostics: Vec<ArcDiagnostics>,
    a0: f64,
}

impl Network {
    /// Builds and validates a network. `hamiltonians[k]` belongs to arc
    /// `k`; its `arc` and `closed` fields are overwritten to match the
    /// graph.
    pub fn new(graph: Graph, families: Vec<HamiltonianFamily>, tol: Tolerances) -> Result<Network> {
        tol.validate()?;
        if families.len() != graph.arc_count() {
            return Err(Error::Parse(format!(
                "{} arcs but {} Hamiltonians",
                graph.arc_count(),
                families.len()
            )));
        }
        let mut hamiltonians = Vec::with_capacity(families.len());
        for (k, family) in families.into_iter().enumerate() {
            let arc = ArcId(k);
            hamiltonians.push(ArcHamiltonian::new(
                arc,
                graph.is_loop_arc(arc),
                family,
                &tol,
            )?);
        }
        let mut diagnostics = Vec::with_capacity(hamiltonians.len());
        for h in &hamiltonians {
            let floor = a_gamma(h, &tol)?;
            let c = if h.closed {
                Some(c_gamma(h, &tol)?)
            } else {
                None
            };
            diagnostics.push(ArcDiagnostics {
                a_gamma: floor,
                c_gamma: c,
            });
        }
        let a0 = diagnostics
            .iter()
            .map(ArcDiagnostics::floor)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Network {
            graph,
            hamiltonians,
            tol,
            diagnostics,
            a0,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn hamiltonian(&self, arc: ArcId) -> &ArcHamiltonian {
        &self.hamiltonians[arc.0]
    }

    pub fn hamiltonians(&self) -> &[ArcHamiltonian] {
        &self.hamiltonians
    }

    pub fn arc_diagnostics(&self, arc: ArcId) -> ArcDiagnostics {
        self.diagnostics[arc.0]
    }

    /// The floor level `a₀` of the network.
    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// Checks the constancy of `s -> min_p H(s,p)` on arcs attaining the
    /// floor. Warnings only; the solve continues.
    pub fn validate_h4(&self) -> Vec<H4Warning> {
        let mut warnings = Vec::new();
        for (k, h) in self.hamiltonians.iter().enumerate() {
            let diag = self.diagnostics[k];
            if (diag.a_gamma - self.a0).abs() > self.tol.tol_a {
                continue;
            }
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut candidates: Vec<f64> = (0..self.tol.grid)
                .map(|i| i as f64 / (self.tol.grid - 1) as f64)
                .collect();
            candidates.extend(h.breakpoints());
            for s in candidates {
                // validated at construction; min_over_p cannot fail here
                let (_, v) = min_over_p(h, s, &self.tol).expect("validated Hamiltonian");
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let variation = hi - lo;
            if variation > self.tol.tol_a {
                warnings.push(H4Warning {
                    arc: ArcId(k),
                    variation,
                });
            }
        }
        warnings
    }

    /// Convenience constructor from arc endpoint pairs with unlabeled
    /// vertices.
    pub fn from_arcs(
        n_vertices: usize,
        arcs: &[(usize, usize)],
        families: Vec<HamiltonianFamily>,
        tol: Tolerances,
    ) -> Result<Network> {
        let vertices = vec![VertexInfo::default(); n_vertices];
        let arcs: Vec<(VertexId, VertexId)> = arcs
            .iter()
            .map(|&(t, h)| (VertexId(t), VertexId(h)))
            .collect();
        let graph = Graph::build(vertices, &arcs)?;
        Network::new(graph, families, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::ScalarFunction;

    #[test]
    fn triangle_floor() {
        let net = fixtures::triangle();
        assert!((net.a0() + 1.0).abs() < 1e-9);
        assert!(net.validate_h4().is_empty());
    }

    #[test]
    fn loop_floor_is_c_gamma() {
        let net = fixtures::loop_tilted();
        assert!((net.a0() - 1.0).abs() < 1e-7);
        let diag = net.arc_diagnostics(ArcId(0));
        assert!((diag.a_gamma + 1.0).abs() < 1e-9);
        assert!((diag.c_gamma.unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn eikonal_floor_zero() {
        let net = fixtures::eikonal_triangle();
        assert!(net.a0().abs() < 1e-9);
    }

    #[test]
    fn h4_warning_on_varying_floor_arc() {
        // f(s) = 1+s on the floor-attaining arc: min_p H = -1-s varies
        let families = vec![
            HamiltonianFamily::TiltedEikonal {
                b: ScalarFunction::constant(0.0),
                f: ScalarFunction::PiecewiseLinear {
                    nodes: vec![(0.0, 1.0), (1.0, 2.0)],
                },
                q: 1.0,
            },
            HamiltonianFamily::TiltedEikonal {
                b: ScalarFunction::constant(0.0),
                f: ScalarFunction::constant(3.0),
                q: 1.0,
            },
        ];
        let net =
            Network::from_arcs(2, &[(0, 1), (1, 0)], families, Tolerances::default()).unwrap();
        assert!((net.a0() + 1.0).abs() < 1e-9);
        let warnings = net.validate_h4();
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].arc, ArcId(0));
        assert!((warnings[0].variation - 1.0).abs() < 1e-6);
    }

    #[test]
    fn no_warning_when_floor_not_attained() {
        // the varying arc sits strictly below the floor
        let families = vec![
            HamiltonianFamily::TiltedEikonal {
                b: ScalarFunction::constant(0.0),
                f: ScalarFunction::PiecewiseLinear {
                    nodes: vec![(0.0, 2.0), (1.0, 3.0)],
                },
                q: 1.0,
            },
            HamiltonianFamily::TiltedEikonal {
                b: ScalarFunction::constant(0.0),
                f: ScalarFunction::constant(1.0),
                q: 1.0,
            },
        ];
        let net =
            Network::from_arcs(2, &[(0, 1), (1, 0)], families, Tolerances::default()).unwrap();
        assert!((net.a0() + 1.0).abs() < 1e-9);
        assert!(net.validate_h4().is_empty());
    }

    #[test]
    fn arity_mismatch_rejected() {
        let err = Network::from_arcs(2, &[(0, 1)], vec![], Tolerances::default()).unwrap_err();
        assert!(err.to_string().contains("Hamiltonians"));
    }
}
