//! Benchmark fixtures: a mid-size network exercising loops, parallel
//! arcs and nonconstant tilts.

use hjnet_core::hamiltonian::HamiltonianFamily;
use hjnet_core::scalar::ScalarFunction;
use hjnet_core::{Network, Tolerances};

/// Five vertices, eight arcs (one loop, one parallel pair), Fourier and
/// piecewise-linear tilts.
pub fn bench_network() -> Network {
    let tilt = |mean: f64, a1: f64, b1: f64, f: f64| HamiltonianFamily::TiltedEikonal {
        b: ScalarFunction::Fourier {
            mean,
            harmonics: vec![(a1, b1)],
        },
        f: ScalarFunction::constant(f),
        q: 2.0,
    };
    let ramp = |v0: f64, v1: f64, f: f64| HamiltonianFamily::TiltedEikonal {
        b: ScalarFunction::PiecewiseLinear {
            nodes: vec![(0.0, v0), (0.5, v1), (1.0, v0)],
        },
        f: ScalarFunction::constant(f),
        q: 1.0,
    };
    Network::from_arcs(
        5,
        &[
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 0),
            (1, 3),
            (1, 3),
            (2, 2),
        ],
        vec![
            tilt(0.4, 0.2, -0.1, 1.0),
            tilt(-0.3, 0.1, 0.3, 0.8),
            ramp(0.5, -0.5, 1.2),
            tilt(0.0, 0.4, 0.0, 0.6),
            ramp(-0.2, 0.6, 1.5),
            tilt(0.8, 0.0, 0.2, 2.0),
            tilt(-0.8, 0.1, 0.0, 0.9),
            tilt(0.3, 0.2, 0.1, 1.1),
        ],
        Tolerances::default(),
    )
    .expect("bench network")
}
