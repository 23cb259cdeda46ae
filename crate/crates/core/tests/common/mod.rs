//! Shared test helpers: seeded random networks with tilted-eikonal
//! Hamiltonians, small enough for the enumeration oracles.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hjnet_core::hamiltonian::HamiltonianFamily;
use hjnet_core::scalar::ScalarFunction;
use hjnet_core::tol::Tolerances;
use hjnet_core::Network;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_scalar(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> ScalarFunction {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    match rng.gen_range(0..3) {
        0 => ScalarFunction::constant(rng.gen_range(lo..hi)),
        1 => {
            let amp = half * 0.4;
            ScalarFunction::Fourier {
                mean: rng.gen_range(mid - half * 0.4..mid + half * 0.4),
                harmonics: vec![(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp))],
            }
        }
        _ => {
            let s_mid = rng.gen_range(0.2..0.8);
            ScalarFunction::PiecewiseLinear {
                nodes: vec![
                    (0.0, rng.gen_range(lo..hi)),
                    (s_mid, rng.gen_range(lo..hi)),
                    (1.0, rng.gen_range(lo..hi)),
                ],
            }
        }
    }
}

pub fn random_family(rng: &mut ChaCha8Rng) -> HamiltonianFamily {
    let q = if rng.gen_bool(0.5) { 1.0 } else { 2.0 };
    // constant f keeps s -> min_p H constant on every arc, the
    // structural condition required of arcs attaining the floor level;
    // the tilt b still varies freely
    HamiltonianFamily::TiltedEikonal {
        b: random_scalar(rng, -1.2, 1.2),
        f: ScalarFunction::constant(rng.gen_range(0.3..2.5)),
        q,
    }
}

/// Connected network with at most 6 vertices and 10 arcs; loops and
/// parallel arcs appear with positive probability.
pub fn random_network(rng: &mut ChaCha8Rng) -> Network {
    let n = rng.gen_range(2..=6usize);
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    for v in 1..n {
        let anchor = rng.gen_range(0..v);
        if rng.gen_bool(0.5) {
            arcs.push((anchor, v));
        } else {
            arcs.push((v, anchor));
        }
    }
    let extra = rng.gen_range(0..=(10 - arcs.len()).min(4));
    for _ in 0..extra {
        let t = rng.gen_range(0..n);
        let h = rng.gen_range(0..n);
        arcs.push((t, h));
    }
    let families = (0..arcs.len()).map(|_| random_family(rng)).collect();
    Network::from_arcs(n, &arcs, families, Tolerances::default()).expect("random network is valid")
}
