//! Per-arc Hamiltonians.
//!
//! An arc Hamiltonian `H(s,p)` must be continuous, coercive in `p` and
//! quasiconvex in `p` with nondegenerate sublevel sets. Two families are
//! provided:
//!
//! * `TiltedEikonal`: `H(s,p) = |p - b(s)|^q - f(s)` with `q >= 1` —
//!   every derived quantity has a closed form, which the tests use as
//!   analytic oracles;
//! * `BlackBox`: an arbitrary evaluator together with a declared
//!   coercivity bracket `R(a)` such that `{p : H(s,p) <= a}` lies in
//!   `|p| <= R(a)`. The structural assumptions are spot-checked on a
//!   grid at construction; grid validation is not a proof.
//!
//! Reversing an arc transforms the Hamiltonian as
//! `H~(s,p) = H(1-s,-p)`; [`ReversedView`] evaluates that lazily.
//!
//! Two scalars drive the global analysis: `a_γ`, the max over `s` of the
//! pointwise minimum of `H` in `p` (below it the arc equation has no
//! subsolutions), and for closed arcs `c_γ`, the least level admitting
//! periodic subsolutions.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::ArcId;
use crate::numerics;
use crate::scalar::ScalarFunction;
use crate::search;
use crate::tol::Tolerances;

/// Level-set boundary from a closed form, when the family has one.
#[derive(Debug, Clone, Copy)]
pub enum SigmaClosed {
    /// `(σ⁻, σ⁺)` at this `s` and level.
    Values(f64, f64),
    /// The level lies below the pointwise minimum by `gap`; `argmin` is
    /// the minimiser in `p`.
    BelowLevel { gap: f64, argmin: f64 },
}

/// Evaluation interface shared by [`ArcHamiltonian`] and
/// [`ReversedView`].
pub trait Hamiltonian {
    /// `H(s, p)`. Callers guarantee `s` in `[0,1]`.
    fn value(&self, s: f64, p: f64) -> f64;

    /// Radius such that `{p : H(s,p) <= a}` is contained in `|p| <= R`.
    fn bracket_radius(&self, a: f64) -> f64;

    /// `(argmin_p H(s,·), min_p H(s,·))` when known in closed form.
    fn closed_form_min(&self, s: f64) -> Option<(f64, f64)>;

    /// `σ_a^±(s)` when known in closed form.
    fn closed_form_sigma(&self, s: f64, a: f64) -> Option<SigmaClosed>;

    /// Interior seeds for extremum searches over `s`.
    fn breakpoints(&self) -> Vec<f64>;
}

#[derive(Clone)]
pub struct BlackBoxHamiltonian {
    eval: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    radius: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for BlackBoxHamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlackBoxHamiltonian")
            .finish_non_exhaustive()
    }
}

impl BlackBoxHamiltonian {
    pub fn new(
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        radius: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        BlackBoxHamiltonian {
            eval: Arc::new(eval),
            radius: Arc::new(radius),
        }
    }
}

#[derive(Debug, Clone)]
pub enum HamiltonianFamily {
    /// `H(s,p) = |p - b(s)|^q - f(s)`, `q >= 1`.
    TiltedEikonal {
        b: ScalarFunction,
        f: ScalarFunction,
        q: f64,
    },
    BlackBox(BlackBoxHamiltonian),
}

impl HamiltonianFamily {
    fn validate(&self, tol: &Tolerances) -> Result<()> {
        match self {
            HamiltonianFamily::TiltedEikonal { b, f, q } => {
                b.validate()?;
                f.validate()?;
                if !(q.is_finite() && *q >= 1.0) {
                    return Err(Error::Parse(format!(
                        "tilted_eikonal requires q >= 1, got {q}"
                    )));
                }
                Ok(())
            }
            HamiltonianFamily::BlackBox(bb) => validate_black_box(bb, tol),
        }
    }
}

impl Hamiltonian for HamiltonianFamily {
    fn value(&self, s: f64, p: f64) -> f64 {
        match self {
            HamiltonianFamily::TiltedEikonal { b, f, q } => {
                (p - b.eval(s)).abs().powf(*q) - f.eval(s)
            }
            HamiltonianFamily::BlackBox(bb) => (bb.eval)(s, p),
        }
    }

    fn bracket_radius(&self, a: f64) -> f64 {
        match self {
            HamiltonianFamily::TiltedEikonal { b, f, q } => {
                let mut b_max = 0.0f64;
                let mut f_max = f64::NEG_INFINITY;
                for i in 0..=64 {
                    let s = i as f64 / 64.0;
                    b_max = b_max.max(b.eval(s).abs());
                    f_max = f_max.max(f.eval(s));
                }
                b_max + (a + f_max).max(0.0).powf(1.0 / q) + 1.0
            }
            HamiltonianFamily::BlackBox(bb) => (bb.radius)(a),
        }
    }

    fn closed_form_min(&self, s: f64) -> Option<(f64, f64)> {
        match self {
            HamiltonianFamily::TiltedEikonal { b, f, .. } => Some((b.eval(s), -f.eval(s))),
            HamiltonianFamily::BlackBox(_) => None,
        }
    }

    fn closed_form_sigma(&self, s: f64, a: f64) -> Option<SigmaClosed> {
        match self {
            HamiltonianFamily::TiltedEikonal { b, f, q } => {
                let base = a + f.eval(s);
                let bs = b.eval(s);
                if base < 0.0 {
                    Some(SigmaClosed::BelowLevel {
                        gap: -base,
                        argmin: bs,
                    })
                } else {
                    let root = base.powf(1.0 / q);
                    Some(SigmaClosed::Values(bs - root, bs + root))
                }
            }
            HamiltonianFamily::BlackBox(_) => None,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            HamiltonianFamily::TiltedEikonal { b, f, .. } => {
                let mut pts = b.breakpoints();
                pts.extend(f.breakpoints());
                pts.sort_unstable_by(f64::total_cmp);
                pts.dedup();
                pts
            }
            HamiltonianFamily::BlackBox(_) => Vec::new(),
        }
    }
}

/// Hamiltonian attached to one arc of the network.
#[derive(Debug, Clone)]
pub struct ArcHamiltonian {
    pub arc: ArcId,
    /// `γ(0) = γ(1)`: only periodic (sub)solutions are meaningful.
    pub closed: bool,
    pub family: HamiltonianFamily,
}

impl ArcHamiltonian {
    pub fn new(
        arc: ArcId,
        closed: bool,
        family: HamiltonianFamily,
        tol: &Tolerances,
    ) -> Result<Self> {
        family.validate(tol)?;
        Ok(ArcHamiltonian {
            arc,
            closed,
            family,
        })
    }

    pub fn reversed_view(&self) -> ReversedView<'_, Self> {
        ReversedView { inner: self }
    }

    /// The Hamiltonian of the reversed arc as a first-class value:
    /// `H~(s,p) = H(1-s,-p)`.
    pub fn reversed(&self) -> ArcHamiltonian {
        let family = match &self.family {
            HamiltonianFamily::TiltedEikonal { b, f, q } => HamiltonianFamily::TiltedEikonal {
                b: b.reversed().negated(),
                f: f.reversed(),
                q: *q,
            },
            HamiltonianFamily::BlackBox(bb) => {
                let eval = bb.eval.clone();
                let radius = bb.radius.clone();
                HamiltonianFamily::BlackBox(BlackBoxHamiltonian {
                    eval: Arc::new(move |s, p| eval(1.0 - s, -p)),
                    radius,
                })
            }
        };
        ArcHamiltonian {
            arc: self.arc,
            closed: self.closed,
            family,
        }
    }
}

impl Hamiltonian for ArcHamiltonian {
    fn value(&self, s: f64, p: f64) -> f64 {
        self.family.value(s, p)
    }
    fn bracket_radius(&self, a: f64) -> f64 {
        self.family.bracket_radius(a)
    }
    fn closed_form_min(&self, s: f64) -> Option<(f64, f64)> {
        self.family.closed_form_min(s)
    }
    fn closed_form_sigma(&self, s: f64, a: f64) -> Option<SigmaClosed> {
        self.family.closed_form_sigma(s, a)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.family.breakpoints()
    }
}

/// Lazy evaluator of the reversed-arc Hamiltonian.
#[derive(Debug, Clone, Copy)]
pub struct ReversedView<'a, H: ?Sized> {
    inner: &'a H,
}

impl<'a, H: Hamiltonian + ?Sized> ReversedView<'a, H> {
    pub fn new(inner: &'a H) -> Self {
        ReversedView { inner }
    }
}

impl<H: Hamiltonian + ?Sized> Hamiltonian for ReversedView<'_, H> {
    fn value(&self, s: f64, p: f64) -> f64 {
        self.inner.value(1.0 - s, -p)
    }

    fn bracket_radius(&self, a: f64) -> f64 {
        self.inner.bracket_radius(a)
    }

    fn closed_form_min(&self, s: f64) -> Option<(f64, f64)> {
        self.inner.closed_form_min(1.0 - s).map(|(p, v)| (-p, v))
    }

    fn closed_form_sigma(&self, s: f64, a: f64) -> Option<SigmaClosed> {
        self.inner.closed_form_sigma(1.0 - s, a).map(|c| match c {
            SigmaClosed::Values(lo, hi) => SigmaClosed::Values(-hi, -lo),
            SigmaClosed::BelowLevel { gap, argmin } => SigmaClosed::BelowLevel {
                gap,
                argmin: -argmin,
            },
        })
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.inner.breakpoints().iter().map(|s| 1.0 - s).collect();
        pts.sort_unstable_by(f64::total_cmp);
        pts
    }
}

fn check_domain(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Misuse(format!("s = {s} outside [0,1]")));
    }
    Ok(())
}

/// `H(s,p)` with a domain check on `s`.
pub fn eval_h<H: Hamiltonian + ?Sized>(h: &H, s: f64, p: f64) -> Result<f64> {
    check_domain(s)?;
    Ok(h.value(s, p))
}

/// `(argmin_p, min_p) of H(s,·)`. Closed form where available, otherwise
/// golden-section over the declared bracket, valid by quasiconvexity.
pub fn min_over_p<H: Hamiltonian + ?Sized>(h: &H, s: f64, tol: &Tolerances) -> Result<(f64, f64)> {
    check_domain(s)?;
    if let Some(exact) = h.closed_form_min(s) {
        return Ok(exact);
    }
    let a_hint = h.value(s, 0.0);
    let r = h.bracket_radius(a_hint);
    let (p_star, v_star) = search::golden_min(|p| h.value(s, p), -r, r, tol.tol_p);
    for endpoint in [-r, r] {
        if h.value(s, endpoint) <= v_star {
            return Err(Error::Consistency(format!(
                "black-box bracket invalid at s = {s}: H(s, {endpoint}) does not exceed the \
                 interior minimum {v_star}"
            )));
        }
    }
    Ok((p_star, v_star))
}

/// `a_γ = max over s of min over p of H(s,p)`.
///
/// Maximised over the uniform grid plus the family's breakpoints, then
/// refined by golden section around the best node.
pub fn a_gamma<H: Hamiltonian + ?Sized>(h: &H, tol: &Tolerances) -> Result<f64> {
    let mut candidates: Vec<f64> = (0..tol.grid)
        .map(|i| i as f64 / (tol.grid - 1) as f64)
        .collect();
    candidates.extend(h.breakpoints());
    candidates.sort_unstable_by(f64::total_cmp);
    candidates.dedup();

    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0;
    for (i, &s) in candidates.iter().enumerate() {
        let (_, v) = min_over_p(h, s, tol)?;
        if v > best {
            best = v;
            best_idx = i;
        }
    }
    let lo = if best_idx == 0 {
        candidates[0]
    } else {
        candidates[best_idx - 1]
    };
    let hi = if best_idx + 1 == candidates.len() {
        candidates[best_idx]
    } else {
        candidates[best_idx + 1]
    };
    if hi > lo {
        // min_over_p only fails on invalid black-box brackets, which the
        // scan above would already have hit
        let (_, refined) = search::golden_max(
            |s| {
                min_over_p(h, s, tol)
                    .map(|(_, v)| v)
                    .unwrap_or(f64::NEG_INFINITY)
            },
            lo,
            hi,
            tol.tol_p.max(1e-13),
        );
        best = best.max(refined);
    }
    Ok(best)
}

/// `c_γ` for a closed arc: the root in `a` of
/// `F(a) = min( -∫σ_a⁻, ∫σ_a⁺ )`, which is continuous and strictly
/// increasing above `a_γ`. Returns `a_γ` itself when `F(a_γ) >= 0`.
pub fn c_gamma(h: &ArcHamiltonian, tol: &Tolerances) -> Result<f64> {
    if !h.closed {
        return Err(Error::Misuse(format!(
            "c_gamma requested for non-closed arc {}",
            h.arc
        )));
    }
    let floor = a_gamma(h, tol)?;
    // residuals left here propagate into the critical-level weights, so
    // aim well inside tol_a
    let target = tol.tol_a * 1e-3;
    let f = |a: f64| -> Result<f64> {
        let (i_plus, i_minus) = numerics::branch_integrals(h, a, tol)?;
        Ok((-i_minus).min(i_plus))
    };
    let at_floor = f(floor)?;
    if at_floor >= -target {
        return Ok(floor);
    }
    let step = 0.5 * (1.0 + floor.abs());
    let hi = search::expand_until_positive(|a| f(a).unwrap_or(f64::NEG_INFINITY), floor, step, 64)
        .ok_or_else(|| {
            Error::Level(format!(
                "no periodic-subsolution level found above a_gamma = {floor} for arc {} \
                 after 64 doublings",
                h.arc
            ))
        })?;
    let (root, _) = search::bisect_increasing(
        |a| f(a).unwrap_or(f64::NEG_INFINITY),
        floor,
        hi,
        target * 0.5,
        target,
    );
    Ok(root.max(floor))
}

fn validate_black_box(bb: &BlackBoxHamiltonian, tol: &Tolerances) -> Result<()> {
    let _ = tol;
    let s_grid: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
    let mut hint = f64::NEG_INFINITY;
    for &s in &s_grid {
        hint = hint.max((bb.eval)(s, 0.0));
    }
    // (Hγ2): the declared bracket must dominate the level sets
    for extra in [0.5, 2.0, 8.0] {
        let a = hint + extra;
        let r = (bb.radius)(a);
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Parse(format!(
                "black-box bracket radius R({a}) = {r} invalid"
            )));
        }
        for &s in &s_grid {
            for p in [-r, r] {
                if (bb.eval)(s, p) <= a {
                    return Err(Error::Consistency(format!(
                        "coercivity check failed: H({s}, {p}) <= {a} inside the declared bracket"
                    )));
                }
            }
        }
    }
    // (Hγ3): unimodality spot check in p
    let a = hint + 2.0;
    let r = (bb.radius)(a);
    for &s in &s_grid {
        let values: Vec<f64> = (0..=100)
            .map(|i| (bb.eval)(s, -r + 2.0 * r * i as f64 / 100.0))
            .collect();
        let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let eps = 1e-9 * scale;
        let argmin = values
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .map(|(i, _)| i)
            .unwrap();
        let descending = values[..=argmin].windows(2).all(|w| w[1] <= w[0] + eps);
        let ascending = values[argmin..].windows(2).all(|w| w[1] >= w[0] - eps);
        if !(descending && ascending) {
            return Err(Error::Consistency(format!(
                "quasiconvexity check failed at s = {s}: p-profile is not unimodal"
            )));
        }
    }
    Ok(())
}
