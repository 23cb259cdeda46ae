//! Scalar parameter functions on `[0,1]`.
//!
//! These are the coefficient functions of the built-in Hamiltonian
//! families. All variants are continuous on `[0,1]`; piecewise-linear
//! nodes must start at 0 and end at 1 with strictly increasing abscissae.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarFunction {
    Constant {
        value: f64,
    },
    /// `c0 + c1 s + c2 s^2 + ...`
    Polynomial {
        coefficients: Vec<f64>,
    },
    /// `mean + Σ_k a_k cos(2πks) + b_k sin(2πks)`, period 1.
    Fourier {
        mean: f64,
        harmonics: Vec<(f64, f64)>,
    },
    /// Linear interpolation of `(s_i, v_i)` nodes.
    PiecewiseLinear {
        nodes: Vec<(f64, f64)>,
    },
}

impl ScalarFunction {
    pub fn constant(value: f64) -> Self {
        ScalarFunction::Constant { value }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarFunction::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::Parse(format!(
                        "constant value {value} is not finite"
                    )));
                }
            }
            ScalarFunction::Polynomial { coefficients } => {
                if coefficients.is_empty() {
                    return Err(Error::Parse(
                        "polynomial needs at least one coefficient".into(),
                    ));
                }
                if coefficients.iter().any(|c| !c.is_finite()) {
                    return Err(Error::Parse("polynomial coefficient is not finite".into()));
                }
            }
            ScalarFunction::Fourier { mean, harmonics } => {
                if !mean.is_finite()
                    || harmonics
                        .iter()
                        .any(|(a, b)| !a.is_finite() || !b.is_finite())
                {
                    return Err(Error::Parse("fourier coefficient is not finite".into()));
                }
            }
            ScalarFunction::PiecewiseLinear { nodes } => {
                if nodes.len() < 2 {
                    return Err(Error::Parse(
                        "piecewise_linear needs at least two nodes".into(),
                    ));
                }
                if nodes[0].0 != 0.0 || nodes[nodes.len() - 1].0 != 1.0 {
                    return Err(Error::Parse(
                        "piecewise_linear nodes must start at s=0 and end at s=1".into(),
                    ));
                }
                if nodes.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::Parse(
                        "piecewise_linear abscissae must be strictly increasing".into(),
                    ));
                }
                if nodes.iter().any(|(s, v)| !s.is_finite() || !v.is_finite()) {
                    return Err(Error::Parse("piecewise_linear node is not finite".into()));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            ScalarFunction::Constant { value } => *value,
            ScalarFunction::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, &c| acc * s + c)
            }
            ScalarFunction::Fourier { mean, harmonics } => {
                let mut v = *mean;
                for (k, (a, b)) in harmonics.iter().enumerate() {
                    let w = 2.0 * std::f64::consts::PI * (k as f64 + 1.0) * s;
                    v += a * w.cos() + b * w.sin();
                }
                v
            }
            ScalarFunction::PiecewiseLinear { nodes } => {
                if s <= nodes[0].0 {
                    return nodes[0].1;
                }
                if s >= nodes[nodes.len() - 1].0 {
                    return nodes[nodes.len() - 1].1;
                }
                let i = nodes.partition_point(|(x, _)| *x <= s);
                let (s0, v0) = nodes[i - 1];
                let (s1, v1) = nodes[i];
                v0 + (v1 - v0) * (s - s0) / (s1 - s0)
            }
        }
    }

    /// Interior points where the function may lose smoothness; used to
    /// seed extremum searches.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            ScalarFunction::PiecewiseLinear { nodes } => nodes
                .iter()
                .map(|(s, _)| *s)
                .filter(|s| *s > 0.0 && *s < 1.0)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// The function `s -> f(1-s)`.
    pub fn reversed(&self) -> ScalarFunction {
        match self {
            ScalarFunction::Constant { value } => ScalarFunction::Constant { value: *value },
            ScalarFunction::Polynomial { coefficients } => {
                // expand Σ c_k (1-s)^k with the binomial theorem
                let mut out = vec![0.0; coefficients.len()];
                for (k, &c) in coefficients.iter().enumerate() {
                    let mut binom = 1.0f64;
                    for (j, slot) in out.iter_mut().enumerate().take(k + 1) {
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        *slot += c * sign * binom;
                        binom = binom * (k - j) as f64 / (j + 1) as f64;
                    }
                }
                ScalarFunction::Polynomial { coefficients: out }
            }
            ScalarFunction::Fourier { mean, harmonics } => ScalarFunction::Fourier {
                mean: *mean,
                // cos(2πk(1-s)) = cos(2πks), sin(2πk(1-s)) = -sin(2πks)
                harmonics: harmonics.iter().map(|(a, b)| (*a, -*b)).collect(),
            },
            ScalarFunction::PiecewiseLinear { nodes } => {
                let mut out: Vec<(f64, f64)> =
                    nodes.iter().rev().map(|(s, v)| (1.0 - s, *v)).collect();
                if let Some(first) = out.first_mut() {
                    first.0 = 0.0;
                }
                if let Some(last) = out.last_mut() {
                    last.0 = 1.0;
                }
                ScalarFunction::PiecewiseLinear { nodes: out }
            }
        }
    }

    /// The function `s -> -f(s)`.
    pub fn negated(&self) -> ScalarFunction {
        match self {
            ScalarFunction::Constant { value } => ScalarFunction::Constant { value: -value },
            ScalarFunction::Polynomial { coefficients } => ScalarFunction::Polynomial {
                coefficients: coefficients.iter().map(|c| -c).collect(),
            },
            ScalarFunction::Fourier { mean, harmonics } => ScalarFunction::Fourier {
                mean: -mean,
                harmonics: harmonics.iter().map(|(a, b)| (-a, -b)).collect(),
            },
            ScalarFunction::PiecewiseLinear { nodes } => ScalarFunction::PiecewiseLinear {
                nodes: nodes.iter().map(|(s, v)| (*s, -v)).collect(),
            },
        }
    }
}
