use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use super::{FitResult, VarianceScale};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parameter {
    Beta0,
    Beta1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalBasis {
    KnownSigmaNormal,
    EstimatedSigmaT,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfidenceInterval {
    pub parameter: Parameter,
    pub level: f64,
    pub low: f64,
    pub high: f64,
    pub basis: IntervalBasis,
}

impl ConfidenceInterval {
    pub fn contains(&self, value: f64) -> bool {
        self.low <= value && value <= self.high
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.high - self.low)
    }
}

/// Two-sided quantile `q` with `P(|Z| ≤ q) = level`.
pub(crate) fn normal_quantile(level: f64) -> Result<f64> {
    check_level(level)?;
    let z = Normal::standard().inverse_cdf(0.5 + 0.5 * level);
    Ok(z)
}

fn t_quantile(level: f64, dof: usize) -> Result<f64> {
    check_level(level)?;
    let t = StudentsT::new(0.0, 1.0, dof as f64)
        .map_err(|e| Error::Numeric(format!("Student-t distribution: {e}")))?;
    Ok(t.inverse_cdf(0.5 + 0.5 * level))
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "confidence level must lie in (0, 1), got {level}"
        )))
    }
}

/// Point estimate ± quantile·√variance.
///
/// Uses the normal quantile when σ² was supplied to the fit and Student-t
/// with `N − 2` degrees of freedom when it was estimated.
pub fn confidence_interval(
    fit: &FitResult,
    parameter: Parameter,
    level: f64,
) -> Result<ConfidenceInterval> {
    check_level(level)?;
    let (quantile, basis) = match fit.variance_scale {
        VarianceScale::Absolute => (normal_quantile(level)?, IntervalBasis::KnownSigmaNormal),
        VarianceScale::PerUnitSigma2 if fit.dof >= 1 && fit.sigma2_hat.is_some() => {
            (t_quantile(level, fit.dof)?, IntervalBasis::EstimatedSigmaT)
        }
        VarianceScale::PerUnitSigma2 => {
            return Err(Error::NoVariance(format!(
                "no residual degrees of freedom with N = {} and sigma2 unknown",
                fit.n
            )))
        }
    };
    let variance = fit
        .absolute_variance(parameter)
        .ok_or_else(|| Error::NoVariance("variance unavailable".into()))?;
    let half = quantile * variance.sqrt();
    let point = fit.estimate(parameter);
    if !half.is_finite() {
        return Err(Error::Numeric("interval half-width is not finite".into()));
    }
    Ok(ConfidenceInterval {
        parameter,
        level,
        low: point - half,
        high: point + half,
        basis,
    })
}
