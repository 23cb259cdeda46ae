//! Level-set branches `σ_a^±` and their integrals.
//!
//! For a level `a` at or above the pointwise minimum of `H(s,·)`,
//!
//! ```text
//!     σ_a⁺(s) = max { p | H(s,p) = a },   σ_a⁻(s) = min { p | H(s,p) = a }.
//! ```
//!
//! Quasiconvexity makes each branch of `H(s,·)` monotone on either side
//! of the minimiser, so the roots are found by bisection after a
//! unimodal minimisation; no derivative is assumed. At `a = a_γ` the
//! interval collapses and both branches equal the minimiser location.
//!
//! Integrals use composite Simpson on a per-arc grid shared by edge
//! weights and partial-arc lengths: the grid doubles until the Richardson
//! estimate passes `tol_q`, and partial integrals reuse the per-cell
//! prefix sums so that splitting an arc at a grid node and summing the
//! pieces reproduces the whole within round-off.
//!
//! Edge weights of the underlying graph are
//!
//! ```text
//!     σ_a(e)  =  ∫₀¹ σ_a⁺(t) dt        (forward orientation)
//!     σ_a(-e) = -∫₀¹ σ_a⁻(t) dt        (backward orientation)
//! ```

use crate::error::{Error, Result};
use crate::graph::Orientation;
use crate::hamiltonian::{min_over_p, Hamiltonian, SigmaClosed};
use crate::search;
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaBranch {
    Plus,
    Minus,
}

/// `(σ_a⁻(s), σ_a⁺(s))`.
///
/// Levels below the pointwise minimum by more than `tol_a` are a level
/// error naming the offending `s`; within the tolerance the collapsed
/// interval `(argmin, argmin)` is returned.
pub fn sigma_pm<H: Hamiltonian + ?Sized>(
    h: &H,
    a: f64,
    s: f64,
    tol: &Tolerances,
) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Misuse(format!("s = {s} outside [0,1]")));
    }
    let clamp = tol.tol_a.max(1e-12 * (1.0 + a.abs()));
    if let Some(closed) = h.closed_form_sigma(s, a) {
        return match closed {
            SigmaClosed::Values(lo, hi) => Ok((lo, hi)),
            SigmaClosed::BelowLevel { gap, argmin } => {
                if gap <= clamp {
                    Ok((argmin, argmin))
                } else {
                    Err(Error::Level(format!(
                        "level a = {a} lies below the pointwise minimum of H at s = {s} \
                         (gap {gap:.3e})"
                    )))
                }
            }
        };
    }

    let (p_star, v_star) = min_over_p(h, s, tol)?;
    if v_star > a {
        let gap = v_star - a;
        return if gap <= clamp {
            Ok((p_star, p_star))
        } else {
            Err(Error::Level(format!(
                "level a = {a} lies below the pointwise minimum of H at s = {s} (gap {gap:.3e})"
            )))
        };
    }
    let r = h.bracket_radius(a).max(p_star.abs() + 1.0);
    for endpoint in [-r, r] {
        if h.value(s, endpoint) <= a {
            return Err(Error::Consistency(format!(
                "declared bracket does not dominate the level set at s = {s}: \
                 H(s, {endpoint}) <= {a}"
            )));
        }
    }
    // right branch is nondecreasing from the minimiser, left branch is
    // nonincreasing; both roots are simple by the nondegenerate-sublevel
    // assumption
    let (plus, _) =
        search::bisect_increasing(|p| h.value(s, p) - a, p_star, r, tol.tol_p, tol.tol_h);
    let (neg_minus, _) =
        search::bisect_increasing(|t| h.value(s, -t) - a, -p_star, r, tol.tol_p, tol.tol_h);
    Ok((-neg_minus, plus))
}

/// Sampled `σ_a^±` profile on a uniform grid, with per-cell Simpson
/// prefix sums. Built once per (arc, level) and shared by every integral
/// at that level.
#[derive(Debug, Clone)]
pub struct SigmaProfile {
    pub level: f64,
    /// `2n - 1` uniform points; even indices are the grid nodes.
    s_half: Vec<f64>,
    sm_half: Vec<f64>,
    sp_half: Vec<f64>,
    /// Prefix Simpson sums at nodes, `cum[0] = 0`.
    cum_plus: Vec<f64>,
    cum_minus: Vec<f64>,
    /// True iff the level set has collapsed: `max |σ⁺ - σ⁻| <= tol_p`.
    pub degenerate: bool,
    /// Richardson estimate of the quadrature error on full-arc integrals.
    pub quad_error: f64,
}

impl SigmaProfile {
    pub fn build<H: Hamiltonian + ?Sized>(h: &H, a: f64, tol: &Tolerances) -> Result<SigmaProfile> {
        let mut n = tol.grid.max(3);
        if n.is_multiple_of(2) {
            n += 1;
        }
        let mut half = sample(h, a, 2 * n - 1, tol)?;
        let mut quad_error;
        let max_refinements = 4;
        let mut refinements = 0;
        loop {
            // composite Simpson at half resolution vs node resolution
            let fine_p = simpson_from_samples(&half.1, 1.0);
            let fine_m = simpson_from_samples(&half.0, 1.0);
            let coarse_p = simpson_every_other(&half.1);
            let coarse_m = simpson_every_other(&half.0);
            let err = ((fine_p - coarse_p).abs()).max((fine_m - coarse_m).abs()) / 15.0;
            quad_error = err;
            if err <= tol.tol_q || refinements >= max_refinements {
                break;
            }
            n = 2 * n - 1;
            half = sample(h, a, 2 * n - 1, tol)?;
            refinements += 1;
        }
        let (sm_half, sp_half) = half;
        let s_half: Vec<f64> = (0..2 * n - 1)
            .map(|i| i as f64 / (2 * n - 2) as f64)
            .collect();
        let cell = 1.0 / (n - 1) as f64;
        let mut cum_plus = Vec::with_capacity(n);
        let mut cum_minus = Vec::with_capacity(n);
        cum_plus.push(0.0);
        cum_minus.push(0.0);
        for i in 0..n - 1 {
            let simpson = |v: &[f64]| cell / 6.0 * (v[2 * i] + 4.0 * v[2 * i + 1] + v[2 * i + 2]);
            cum_plus.push(cum_plus[i] + simpson(&sp_half));
            cum_minus.push(cum_minus[i] + simpson(&sm_half));
        }
        let degenerate = sm_half
            .iter()
            .zip(&sp_half)
            .all(|(m, p)| (p - m).abs() <= tol.tol_p);
        Ok(SigmaProfile {
            level: a,
            s_half,
            sm_half,
            sp_half,
            cum_plus,
            cum_minus,
            degenerate,
            quad_error,
        })
    }

    pub fn node_count(&self) -> usize {
        self.cum_plus.len()
    }

    pub fn node(&self, i: usize) -> f64 {
        self.s_half[2 * i]
    }

    pub fn sigma_at_node(&self, i: usize) -> (f64, f64) {
        (self.sm_half[2 * i], self.sp_half[2 * i])
    }

    /// `∫₀¹ σ_a⁺`.
    pub fn total_plus(&self) -> f64 {
        *self.cum_plus.last().unwrap()
    }

    /// `∫₀¹ σ_a⁻`.
    pub fn total_minus(&self) -> f64 {
        *self.cum_minus.last().unwrap()
    }

    /// `∫₀ˢ` of the requested branch, `s` at node `i`.
    pub fn prefix(&self, branch: SigmaBranch, i: usize) -> f64 {
        match branch {
            SigmaBranch::Plus => self.cum_plus[i],
            SigmaBranch::Minus => self.cum_minus[i],
        }
    }

    /// Largest jump of either branch between adjacent half-grid samples;
    /// a proxy for the modulus of continuity.
    pub fn max_adjacent_jump(&self) -> f64 {
        let jump = |v: &[f64]| {
            v.windows(2)
                .map(|w| (w[1] - w[0]).abs())
                .fold(0.0f64, f64::max)
        };
        jump(&self.sm_half).max(jump(&self.sp_half))
    }

    /// `∫_{s1}^{s2}` of a branch. Full cells come from the prefix sums
    /// (so splits at grid nodes are exactly additive); partial end cells
    /// are integrated by Simpson with fresh `σ` evaluations.
    pub fn integrate<H: Hamiltonian + ?Sized>(
        &self,
        h: &H,
        branch: SigmaBranch,
        s1: f64,
        s2: f64,
        tol: &Tolerances,
    ) -> Result<f64> {
        if !(0.0..=1.0).contains(&s1) || !(0.0..=1.0).contains(&s2) || s1 > s2 {
            return Err(Error::Misuse(format!(
                "invalid integration range [{s1}, {s2}]"
            )));
        }
        let n = self.node_count();
        let cells = (n - 1) as f64;
        // snap near-node endpoints so grid splits stay exact
        let snap = |s: f64| -> f64 {
            let t = s * cells;
            if (t - t.round()).abs() < 1e-9 {
                t.round() / cells
            } else {
                s
            }
        };
        let s1 = snap(s1);
        let s2 = snap(s2);
        if s1 >= s2 {
            return Ok(0.0);
        }
        let first_full = (s1 * cells).ceil() as usize;
        let last_full = (s2 * cells).floor() as usize;
        let node = |i: usize| i as f64 / cells;
        let mut total = 0.0;
        if first_full > last_full {
            // both endpoints inside one cell
            total += self.partial_simpson(h, branch, s1, s2, tol)?;
        } else {
            if node(first_full) > s1 {
                total += self.partial_simpson(h, branch, s1, node(first_full), tol)?;
            }
            total += self.prefix(branch, last_full) - self.prefix(branch, first_full);
            if s2 > node(last_full) {
                total += self.partial_simpson(h, branch, node(last_full), s2, tol)?;
            }
        }
        Ok(total)
    }

    fn partial_simpson<H: Hamiltonian + ?Sized>(
        &self,
        h: &H,
        branch: SigmaBranch,
        s1: f64,
        s2: f64,
        tol: &Tolerances,
    ) -> Result<f64> {
        let pick = |pair: (f64, f64)| match branch {
            SigmaBranch::Minus => pair.0,
            SigmaBranch::Plus => pair.1,
        };
        let a = self.level;
        let va = pick(sigma_pm(h, a, s1, tol)?);
        let vm = pick(sigma_pm(h, a, 0.5 * (s1 + s2), tol)?);
        let vb = pick(sigma_pm(h, a, s2, tol)?);
        Ok((s2 - s1) / 6.0 * (va + 4.0 * vm + vb))
    }
}

fn sample<H: Hamiltonian + ?Sized>(
    h: &H,
    a: f64,
    count: usize,
    tol: &Tolerances,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut sm = Vec::with_capacity(count);
    let mut sp = Vec::with_capacity(count);
    for i in 0..count {
        let s = i as f64 / (count - 1) as f64;
        let (lo, hi) = sigma_pm(h, a, s, tol)?;
        sm.push(lo);
        sp.push(hi);
    }
    Ok((sm, sp))
}

/// Composite Simpson over samples at uniform spacing covering `[0, len]`
/// (odd sample count).
fn simpson_from_samples(v: &[f64], len: f64) -> f64 {
    let cells = (v.len() - 1) / 2;
    let h = len / cells as f64;
    let mut total = 0.0;
    for i in 0..cells {
        total += h / 6.0 * (v[2 * i] + 4.0 * v[2 * i + 1] + v[2 * i + 2]);
    }
    total
}

fn simpson_every_other(v: &[f64]) -> f64 {
    let nodes: Vec<f64> = v.iter().step_by(2).copied().collect();
    simpson_from_samples(&nodes, 1.0)
}

/// `∫_{s1}^{s2}` of a branch, building a fresh profile.
pub fn integrate_sigma<H: Hamiltonian + ?Sized>(
    h: &H,
    a: f64,
    s1: f64,
    s2: f64,
    branch: SigmaBranch,
    tol: &Tolerances,
) -> Result<f64> {
    let profile = SigmaProfile::build(h, a, tol)?;
    profile.integrate(h, branch, s1, s2, tol)
}

/// Full-arc integrals `(∫σ⁺, ∫σ⁻)`.
pub fn branch_integrals<H: Hamiltonian + ?Sized>(
    h: &H,
    a: f64,
    tol: &Tolerances,
) -> Result<(f64, f64)> {
    let profile = SigmaProfile::build(h, a, tol)?;
    Ok((profile.total_plus(), profile.total_minus()))
}

/// Weight of a directed edge: `∫σ⁺` forward, `-∫σ⁻` backward.
pub fn edge_weight<H: Hamiltonian + ?Sized>(
    h: &H,
    a: f64,
    orientation: Orientation,
    tol: &Tolerances,
) -> Result<f64> {
    let (i_plus, i_minus) = branch_integrals(h, a, tol)?;
    Ok(match orientation {
        Orientation::Forward => i_plus,
        Orientation::Backward => -i_minus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ArcId;
    use crate::hamiltonian::{
        a_gamma, c_gamma, ArcHamiltonian, BlackBoxHamiltonian, HamiltonianFamily, ReversedView,
    };
    use crate::scalar::ScalarFunction;

    fn tilted(b: f64, f: f64, q: f64) -> ArcHamiltonian {
        ArcHamiltonian::new(
            ArcId(0),
            false,
            HamiltonianFamily::TiltedEikonal {
                b: ScalarFunction::constant(b),
                f: ScalarFunction::constant(f),
                q,
            },
            &Tolerances::default(),
        )
        .unwrap()
    }

    #[test]
    fn sigma_closed_form() {
        let tol = Tolerances::default();
        let h = tilted(2.0, 1.0, 1.0);
        assert_eq!(sigma_pm(&h, 1.0, 0.5, &tol).unwrap(), (0.0, 4.0));
    }

    #[test]
    fn sigma_degenerate_collapse() {
        let tol = Tolerances::default();
        let h = tilted(0.0, 0.0, 1.0);
        let (lo, hi) = sigma_pm(&h, 0.0, 0.25, &tol).unwrap();
        assert_eq!((lo, hi), (0.0, 0.0));
        let profile = SigmaProfile::build(&h, 0.0, &tol).unwrap();
        assert!(profile.degenerate);
    }

    #[test]
    fn sigma_black_box_bisection() {
        let tol = Tolerances::default();
        let h = ArcHamiltonian::new(
            ArcId(0),
            false,
            HamiltonianFamily::BlackBox(BlackBoxHamiltonian::new(
                |_s, p| p.abs() - 1.0,
                |a| (a + 1.0).max(0.0) + 1.0,
            )),
            &tol,
        )
        .unwrap();
        let (lo, hi) = sigma_pm(&h, 0.0, 0.7, &tol).unwrap();
        assert!((lo + 1.0).abs() < 1e-9, "lo = {lo}");
        assert!((hi - 1.0).abs() < 1e-9, "hi = {hi}");
    }

    #[test]
    fn sigma_level_error_names_s() {
        let tol = Tolerances::default();
        let h = tilted(0.0, 1.0, 1.0);
        let err = sigma_pm(&h, -2.0, 0.5, &tol).unwrap_err();
        assert!(err.to_string().contains("s = 0.5"), "{err}");
    }

    #[test]
    fn integrate_constant_branch() {
        let tol = Tolerances::default();
        let h = tilted(2.0, 1.0, 1.0);
        let v = integrate_sigma(&h, 1.0, 0.0, 1.0, SigmaBranch::Plus, &tol).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        let empty = integrate_sigma(&h, 1.0, 0.3, 0.3, SigmaBranch::Plus, &tol).unwrap();
        assert_eq!(empty, 0.0);
    }

    #[test]
    fn integrate_linear_oracle() {
        let tol = Tolerances::default();
        let h = ArcHamiltonian::new(
            ArcId(0),
            false,
            HamiltonianFamily::TiltedEikonal {
                b: ScalarFunction::Polynomial {
                    coefficients: vec![0.0, 1.0],
                },
                f: ScalarFunction::constant(0.0),
                q: 1.0,
            },
            &tol,
        )
        .unwrap();
        let v = integrate_sigma(&h, 0.0, 0.0, 1.0, SigmaBranch::Plus, &tol).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn edge_weight_examples() {
        let tol = Tolerances::default();
        let h = tilted(2.0, 1.0, 1.0);
        assert!((edge_weight(&h, 1.0, Orientation::Forward, &tol).unwrap() - 4.0).abs() < 1e-10);
        assert!(
            edge_weight(&h, 1.0, Orientation::Backward, &tol)
                .unwrap()
                .abs()
                < 1e-10
        );

        let h = tilted(0.0, 1.0, 1.0);
        assert!(
            edge_weight(&h, -1.0, Orientation::Forward, &tol)
                .unwrap()
                .abs()
                < 1e-10
        );
        assert!(
            edge_weight(&h, -1.0, Orientation::Backward, &tol)
                .unwrap()
                .abs()
                < 1e-10
        );

        let h = tilted(0.0, 0.0, 1.0);
        assert!((edge_weight(&h, 2.0, Orientation::Forward, &tol).unwrap() - 2.0).abs() < 1e-10);
        assert!((edge_weight(&h, 2.0, Orientation::Backward, &tol).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn reversal_consistency() {
        let tol = Tolerances::default();
        let cases = [
            ArcHamiltonian::new(
                ArcId(0),
                false,
                HamiltonianFamily::TiltedEikonal {
                    b: ScalarFunction::Fourier {
                        mean: 0.7,
                        harmonics: vec![(0.4, -0.3)],
                    },
                    f: ScalarFunction::Fourier {
                        mean: 1.5,
                        harmonics: vec![(0.2, 0.1)],
                    },
                    q: 2.0,
                },
                &tol,
            )
            .unwrap(),
            tilted(2.0, 1.0, 1.0),
        ];
        for h in &cases {
            for a in [0.5, 1.0, 2.5] {
                let rev = ReversedView::new(h);
                let through_reverse = edge_weight(&rev, a, Orientation::Forward, &tol).unwrap();
                let direct = edge_weight(h, a, Orientation::Backward, &tol).unwrap();
                assert!(
                    (through_reverse - direct).abs() <= 2.0 * tol.tol_q,
                    "a = {a}: {through_reverse} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn weights_increase_with_level() {
        let tol = Tolerances::default();
        let h = tilted(1.0, 1.0, 2.0);
        let floor = a_gamma(&h, &tol).unwrap();
        let mut previous: Option<f64> = None;
        for k in 1..=6 {
            let a = floor + 0.3 * k as f64;
            let w = edge_weight(&h, a, Orientation::Forward, &tol).unwrap();
            if let Some(prev) = previous {
                assert!(w > prev, "not increasing at a = {a}");
            }
            previous = Some(w);
        }
    }

    #[test]
    fn loop_weight_positivity() {
        let tol = Tolerances::default();
        for (b, f) in [(2.0, 1.0), (0.0, 1.0), (0.0, 0.0)] {
            let h = ArcHamiltonian {
                closed: true,
                ..tilted(b, f, 1.0)
            };
            let c = c_gamma(&h, &tol).unwrap();
            let at_c = edge_weight(&h, c, Orientation::Forward, &tol)
                .unwrap()
                .min(edge_weight(&h, c, Orientation::Backward, &tol).unwrap());
            assert!(at_c.abs() <= 1e-6, "min weight at c_gamma = {at_c}");
            for delta in [0.1, 1.0] {
                let above = edge_weight(&h, c + delta, Orientation::Forward, &tol)
                    .unwrap()
                    .min(edge_weight(&h, c + delta, Orientation::Backward, &tol).unwrap());
                assert!(above > 0.0, "min weight above c_gamma = {above}");
            }
        }
    }

    #[test]
    fn grid_node_split_is_additive() {
        let tol = Tolerances::default();
        let h = ArcHamiltonian::new(
            ArcId(0),
            false,
            HamiltonianFamily::TiltedEikonal {
                b: ScalarFunction::Fourier {
                    mean: 0.0,
                    harmonics: vec![(1.0, 0.5)],
                },
                f: ScalarFunction::constant(2.0),
                q: 1.0,
            },
            &tol,
        )
        .unwrap();
        let profile = SigmaProfile::build(&h, 0.5, &tol).unwrap();
        let n = profile.node_count();
        for k in [1, n / 3, n / 2, n - 2] {
            let s = profile.node(k);
            let left = profile
                .integrate(&h, SigmaBranch::Plus, 0.0, s, &tol)
                .unwrap();
            let right = profile
                .integrate(&h, SigmaBranch::Plus, s, 1.0, &tol)
                .unwrap();
            let total = profile.total_plus();
            assert!(
                (left + right - total).abs() < 1e-13 * (1.0 + total.abs()),
                "split at node {k}"
            );
        }
    }

    #[test]
    fn interior_split_close_to_whole() {
        let tol = Tolerances::default();
        let h = tilted(1.0, 2.0, 2.0);
        let a = 1.0;
        let s = 0.371;
        let left = integrate_sigma(&h, a, 0.0, s, SigmaBranch::Minus, &tol).unwrap();
        let right = integrate_sigma(&h, a, s, 1.0, SigmaBranch::Minus, &tol).unwrap();
        let total = integrate_sigma(&h, a, 0.0, 1.0, SigmaBranch::Minus, &tol).unwrap();
        assert!((left + right - total).abs() < 1e-9);
    }

    #[test]
    fn profile_jump_shrinks_under_refinement() {
        let tol = Tolerances::default();
        let h = ArcHamiltonian::new(
            ArcId(0),
            false,
            HamiltonianFamily::TiltedEikonal {
                b: ScalarFunction::Fourier {
                    mean: 0.0,
                    harmonics: vec![(0.8, -0.4)],
                },
                f: ScalarFunction::constant(1.0),
                q: 2.0,
            },
            &tol,
        )
        .unwrap();
        let coarse = SigmaProfile::build(&h, 0.5, &Tolerances { grid: 65, ..tol }).unwrap();
        let fine = SigmaProfile::build(&h, 0.5, &Tolerances { grid: 257, ..tol }).unwrap();
        assert!(fine.max_adjacent_jump() < coarse.max_adjacent_jump());
    }
}
