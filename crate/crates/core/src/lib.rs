//! Eikonal Hamilton–Jacobi equations on finite embedded networks.
//!
//! The equation `H_γ(s, u') = a` is posed on every arc `γ` of a network,
//! with a state-constraint matching condition at the vertices. The whole
//! problem reduces to a *discrete functional equation* on the underlying
//! abstract graph:
//!
//! ```text
//!     u(x) = min over e in E_x of ( u(t(e)) + σ_a(-e) )
//! ```
//!
//! where the edge weight `σ_a(e)` is the integral of the upper level-set
//! branch `σ_a⁺` of the arc Hamiltonian. This crate computes
//!
//! * the level-set branches `σ_a^±` and their integrals ([`numerics`]),
//! * per-arc floor levels `a_γ`, `c_γ` and the network floor `a₀`
//!   ([`hamiltonian`], [`critical`]),
//! * the critical value `c` — the unique level at which global solutions
//!   exist — by bisection on the minimum cycle cost ([`critical`]),
//! * intrinsic distances `S_a` on vertices and `S_a^Γ` on arbitrary
//!   network points ([`critical`], [`extension`]),
//! * Aubry sets and static classes ([`aubry`]),
//! * discrete solvers and checkers for traces, subsolutions and solutions
//!   ([`dfe`]),
//! * continuous per-arc solution profiles reconstructed from vertex data
//!   ([`extension`]),
//! * a JSON network format, result bundles and CSV profile export ([`io`]).

pub mod aubry;
pub mod critical;
pub mod dfe;
pub mod error;
pub mod extension;
pub mod fixtures;
pub mod graph;
pub mod hamiltonian;
pub mod io;
pub mod network;
pub mod numerics;
pub mod scalar;
mod search;
pub mod tol;

pub use error::{Error, Result};
pub use graph::{ArcId, DirectedEdge, EdgeId, Graph, Orientation, Path, VertexId};
pub use hamiltonian::{ArcHamiltonian, Hamiltonian, HamiltonianFamily, ReversedView};
pub use network::Network;
pub use scalar::ScalarFunction;
pub use tol::Tolerances;
