//! Small named networks used by tests, benches and documentation.
//!
//! All of them have analytically known critical values and Aubry sets:
//!
//! * [`triangle`]: three vertices, `H_i = |p| - f_i` with
//!   `f = (1, 2, 3)`; `a₀ = c = -1`, the Aubry set is arc 0 in both
//!   orientations, static class `{v0, v1}`.
//! * [`loop_tilted`]: one vertex, one closed arc with
//!   `H = |p - 2| - 1`; `c = c_γ = 1` and only the backward loop edge is
//!   Aubry.
//! * [`eikonal_triangle`]: `H = |p|` on every arc; `c = 0`, every edge
//!   has zero weight and everything is Aubry.
//! * [`two_arc_cycle`]: two vertices joined by two arcs tilted the same
//!   way along their own parametrizations, which makes the cheapest
//!   cycle the one running both arcs backwards; `c = 1`.

use crate::hamiltonian::HamiltonianFamily;
use crate::network::Network;
use crate::scalar::ScalarFunction;
use crate::tol::Tolerances;

pub fn tilted_family(b: f64, f: f64, q: f64) -> HamiltonianFamily {
    HamiltonianFamily::TiltedEikonal {
        b: ScalarFunction::constant(b),
        f: ScalarFunction::constant(f),
        q,
    }
}

/// `|p| - f_i` on a triangle, `f = (1, 2, 3)`.
pub fn triangle() -> Network {
    Network::from_arcs(
        3,
        &[(0, 1), (1, 2), (2, 0)],
        vec![
            tilted_family(0.0, 1.0, 1.0),
            tilted_family(0.0, 2.0, 1.0),
            tilted_family(0.0, 3.0, 1.0),
        ],
        Tolerances::default(),
    )
    .expect("triangle fixture")
}

/// Single closed arc with `H = |p - 2| - 1`.
pub fn loop_tilted() -> Network {
    Network::from_arcs(
        1,
        &[(0, 0)],
        vec![tilted_family(2.0, 1.0, 1.0)],
        Tolerances::default(),
    )
    .expect("loop fixture")
}

/// Single closed arc with a configurable tilt.
pub fn loop_with(b: f64, f: f64, q: f64) -> Network {
    Network::from_arcs(
        1,
        &[(0, 0)],
        vec![tilted_family(b, f, q)],
        Tolerances::default(),
    )
    .expect("loop fixture")
}

/// `H = |p|` on all three triangle arcs: every weight vanishes at the
/// critical level.
pub fn eikonal_triangle() -> Network {
    Network::from_arcs(
        3,
        &[(0, 1), (1, 2), (2, 0)],
        vec![
            tilted_family(0.0, 0.0, 1.0),
            tilted_family(0.0, 0.0, 1.0),
            tilted_family(0.0, 0.0, 1.0),
        ],
        Tolerances::default(),
    )
    .expect("eikonal triangle fixture")
}

/// Two vertices joined by arc 0 (v0 -> v1) and arc 1 (v1 -> v0), both
/// with `H = |p - 2| - 1`.
pub fn two_arc_cycle() -> Network {
    Network::from_arcs(
        2,
        &[(0, 1), (1, 0)],
        vec![tilted_family(2.0, 1.0, 1.0), tilted_family(2.0, 1.0, 1.0)],
        Tolerances::default(),
    )
    .expect("two-arc fixture")
}

/// Single open arc between two vertices.
pub fn single_arc(b: f64, f: f64, q: f64) -> Network {
    Network::from_arcs(
        2,
        &[(0, 1)],
        vec![tilted_family(b, f, q)],
        Tolerances::default(),
    )
    .expect("single-arc fixture")
}

/// Two zero-cost loops joined by an expensive arc: the critical level is
/// 0, both vertices are Aubry, and the bridge keeps them in distinct
/// static classes.
pub fn two_loops_bridged() -> Network {
    Network::from_arcs(
        2,
        &[(0, 0), (1, 1), (0, 1)],
        vec![
            tilted_family(0.0, 0.0, 1.0),
            tilted_family(0.0, 0.0, 1.0),
            tilted_family(0.0, 1.0, 1.0),
        ],
        Tolerances::default(),
    )
    .expect("bridged loops fixture")
}

/// All named fixtures with a label, for sweep-style tests.
pub fn all_named() -> Vec<(&'static str, Network)> {
    vec![
        ("triangle", triangle()),
        ("loop_tilted", loop_tilted()),
        ("eikonal_triangle", eikonal_triangle()),
        ("two_arc_cycle", two_arc_cycle()),
        ("single_arc", single_arc(0.0, 1.0, 1.0)),
        ("two_loops_bridged", two_loops_bridged()),
    ]
}
