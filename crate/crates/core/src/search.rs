//! One-dimensional searches: golden-section minimisation and bisection.
//!
//! Bisection is used everywhere a derivative-free, bracket-certified
//! method is wanted; the Hamiltonian assumptions give continuity but no
//! smoothness, so Newton-type iterations are out.

/// Golden-section minimisation of a unimodal function on `[lo, hi]`.
/// Returns `(argmin, value)` with the argmin located to within `tol_x`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol_x: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..256 {
        if hi - lo <= tol_x {
            break;
        }
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    // return the best of the three probes
    if fa < fm && fa <= fb {
        (a, fa)
    } else if fb < fm {
        (b, fb)
    } else {
        (mid, fm)
    }
}

/// Golden-section maximisation.
pub fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol_x: f64) -> (f64, f64) {
    let (x, v) = golden_min(|s| -f(s), lo, hi, tol_x);
    (x, -v)
}

/// Bisection for a root of a nondecreasing function with
/// `f(lo) <= 0 <= f(hi)`. Stops once the bracket is below `tol_x` and
/// the residual below `tol_f` (or after 200 halvings). Returns
/// `(root, residual)`.
pub fn bisect_increasing(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol_x: f64,
    tol_f: f64,
) -> (f64, f64) {
    let mut mid = 0.5 * (lo + hi);
    let mut fm = f(mid);
    for _ in 0..200 {
        if fm <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        mid = 0.5 * (lo + hi);
        fm = f(mid);
        if hi - lo <= tol_x && fm.abs() <= tol_f {
            break;
        }
    }
    (mid, fm)
}

/// Doubles a step from `start` until `f` becomes positive; returns the
/// bracket end, or `None` after `max_doublings`.
pub fn expand_until_positive(
    f: impl Fn(f64) -> f64,
    start: f64,
    initial_step: f64,
    max_doublings: u32,
) -> Option<f64> {
    let mut step = initial_step;
    for _ in 0..max_doublings {
        let hi = start + step;
        if f(hi) > 0.0 {
            return Some(hi);
        }
        step *= 2.0;
    }
    None
}
