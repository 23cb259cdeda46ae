//! Numerical tolerances.
//!
//! All solvers and checkers take their thresholds from a single
//! [`Tolerances`] value so that reports can echo the exact numbers a run
//! used. The zero-cycle threshold `tol_zero` is intentionally much looser
//! than the root-finding tolerance `tol_a`: quadrature error accumulates
//! along cycles, so exact zeros of the theory show up as residues around
//! `1e-8`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Root finding in the level variable `a` (critical values).
    pub tol_a: f64,
    /// Hamiltonian residual for level-set roots: `|H(s, σ) - a|`.
    pub tol_h: f64,
    /// Quadrature target for edge weights and partial-arc lengths.
    pub tol_q: f64,
    /// Location tolerance for minimisers and roots in the `p` variable.
    pub tol_p: f64,
    /// Zero-cycle / Aubry membership threshold.
    pub tol_zero: f64,
    /// Nodes of the uniform `s`-grid per arc (doubled adaptively).
    pub grid: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_a: 1e-9,
            tol_h: 1e-10,
            tol_q: 1e-8,
            tol_p: 1e-11,
            tol_zero: 1e-6,
            grid: 257,
        }
    }
}

impl Tolerances {
    /// Applies `HJNET_TOL_*` environment overrides on top of `self`.
    ///
    /// Recognised variables: `HJNET_TOL_A`, `HJNET_TOL_H`, `HJNET_TOL_Q`,
    /// `HJNET_TOL_P`, `HJNET_TOL_ZERO`, `HJNET_TOL_GRID`.
    pub fn with_env_overrides(mut self) -> Result<Self> {
        fn read(name: &str) -> Result<Option<f64>> {
            match std::env::var(name) {
                Ok(text) => text
                    .trim()
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| Error::Parse(format!("{name}: not a number: {text:?}"))),
                Err(_) => Ok(None),
            }
        }
        if let Some(v) = read("HJNET_TOL_A")? {
            self.tol_a = v;
        }
        if let Some(v) = read("HJNET_TOL_H")? {
            self.tol_h = v;
        }
        if let Some(v) = read("HJNET_TOL_Q")? {
            self.tol_q = v;
        }
        if let Some(v) = read("HJNET_TOL_P")? {
            self.tol_p = v;
        }
        if let Some(v) = read("HJNET_TOL_ZERO")? {
            self.tol_zero = v;
        }
        if let Some(v) = read("HJNET_TOL_GRID")? {
            if v < 3.0 || v.fract() != 0.0 {
                return Err(Error::Parse(format!(
                    "HJNET_TOL_GRID: expected an integer >= 3, got {v}"
                )));
            }
            self.grid = v as usize;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tol_a", self.tol_a),
            ("tol_h", self.tol_h),
            ("tol_q", self.tol_q),
            ("tol_p", self.tol_p),
            ("tol_zero", self.tol_zero),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parse(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        if self.grid < 3 {
            return Err(Error::Parse(format!(
                "grid must be >= 3, got {}",
                self.grid
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        Tolerances::default().validate().unwrap();
    }

    #[test]
    fn rejects_nonpositive() {
        let tol = Tolerances {
            tol_a: 0.0,
            ..Tolerances::default()
        };
        assert!(tol.validate().is_err());
    }
}
