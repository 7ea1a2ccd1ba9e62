use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Thresholds for coefficient comparisons and numerical rank decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub eps_coeff: f64,
    pub eps_rank: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eps_coeff: 1e-9,
            eps_rank: 1e-7,
        }
    }
}

impl ToleranceConfig {
    pub fn new(eps_coeff: f64, eps_rank: f64) -> Result<Self> {
        if !(eps_coeff > 0.0 && eps_rank > 0.0) || !eps_coeff.is_finite() || !eps_rank.is_finite() {
            return Err(Error::Precondition(format!(
                "tolerances must be positive, got {eps_coeff} and {eps_rank}"
            )));
        }
        Ok(Self { eps_coeff, eps_rank })
    }

    /// `x` is zero relative to a magnitude `scale` (absolute below scale 1).
    pub fn is_zero(&self, x: f64, scale: f64) -> bool {
        x.abs() <= self.eps_coeff * scale.abs().max(1.0)
    }
}

/// Outcome of a numerical identity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckResult {
    pub passes: bool,
    pub max_residual: f64,
}

impl CheckResult {
    /// Passes iff `residual` is zero relative to `scale`.
    pub fn from_residual(tol: &ToleranceConfig, residual: f64, scale: f64) -> Self {
        Self {
            passes: tol.is_zero(residual, scale),
            max_residual: residual,
        }
    }
}
