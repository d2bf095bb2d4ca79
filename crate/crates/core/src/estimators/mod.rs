//! Point estimation and finite-sample inference for simple linear regression
//! with a covariate bounded in `(-c, c)`.
//!
//! Two estimators are provided. [`ols_fit`] solves the moment conditions
//! `Σ ε̂ = 0`, `Σ ε̂·X = 0`; [`sr_fit`] solves `Σ ε̂ = 0`, `Σ ε̂·sinh φ = 0`,
//! where `φ` are the demeaned rapidities of the covariate. Both share the
//! [`FitResult`] record and the interval machinery in [`confidence_interval`].

mod dataset;
pub(crate) mod interval;
mod ols;
mod sr;

pub use dataset::Dataset;
pub use interval::{confidence_interval, ConfidenceInterval, IntervalBasis, Parameter};
pub use ols::ols_fit;
pub use sr::{
    inflation_excess, sr_fit, sr_variance_closed_form, sr_weights, variance_inflation,
    ClosedFormTerms, FitWeights,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ols,
    Sr,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ols => "ols",
            Method::Sr => "sr",
        }
    }
}

/// Units of the variance fields of a [`FitResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceScale {
    /// σ² was supplied; variances are absolute.
    Absolute,
    /// σ² unknown; variances are multiples of σ² (see `sigma2_hat`).
    PerUnitSigma2,
}

/// Outcome of a regression fit.
///
/// `cov_beta0_beta1` is always `−mean(X)·var_beta1` as computed, and
/// `var_beta0 = σ²/N + mean(X)²·var_beta1` in the same units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitResult {
    pub method: Method,
    pub n: usize,
    pub beta0_hat: f64,
    pub beta1_hat: f64,
    pub var_beta1: f64,
    pub var_beta0: f64,
    pub cov_beta0_beta1: f64,
    pub variance_scale: VarianceScale,
    /// Known error variance, when supplied.
    pub sigma2: Option<f64>,
    /// `Σ ε̂² / (N − 2)`, when σ² is unknown and `N ≥ 3`.
    pub sigma2_hat: Option<f64>,
    pub dof: usize,
    pub residuals: Vec<f64>,
    /// Scale used by the SR fit.
    pub c: Option<f64>,
}

impl FitResult {
    /// Variance of a parameter in absolute units, if available. Uses the
    /// known σ² when supplied, otherwise `sigma2_hat`.
    pub fn absolute_variance(&self, parameter: Parameter) -> Option<f64> {
        let v = match parameter {
            Parameter::Beta0 => self.var_beta0,
            Parameter::Beta1 => self.var_beta1,
        };
        match self.variance_scale {
            VarianceScale::Absolute => Some(v),
            VarianceScale::PerUnitSigma2 => self.sigma2_hat.map(|s| s * v),
        }
    }

    pub fn estimate(&self, parameter: Parameter) -> f64 {
        match parameter {
            Parameter::Beta0 => self.beta0_hat,
            Parameter::Beta1 => self.beta1_hat,
        }
    }
}

fn check_sigma2(sigma2: Option<f64>) -> Result<()> {
    match sigma2 {
        Some(s) if !(s.is_finite() && s >= 0.0) => Err(Error::InvalidParameter(format!(
            "sigma2 must be finite and non-negative, got {s}"
        ))),
        _ => Ok(()),
    }
}

/// Assembles a [`FitResult`] from point estimates and σ²-free variance
/// multipliers, filling residuals and the σ² bookkeeping.
fn assemble(
    method: Method,
    data: &Dataset,
    beta0_hat: f64,
    beta1_hat: f64,
    unit_var_beta1: f64,
    unit_var_beta0: f64,
    sigma2: Option<f64>,
) -> Result<FitResult> {
    let n = data.len();
    let residuals: Vec<f64> = data
        .x()
        .iter()
        .zip(data.y())
        .map(|(x, y)| y - beta0_hat - beta1_hat * x)
        .collect();
    let dof = n.saturating_sub(2);
    let sigma2_hat = match sigma2 {
        None if dof >= 1 => Some(residuals.iter().map(|e| e * e).sum::<f64>() / dof as f64),
        _ => None,
    };
    let (scale, variance_scale) = match sigma2 {
        Some(s) => (s, VarianceScale::Absolute),
        None => (1.0, VarianceScale::PerUnitSigma2),
    };
    let var_beta1 = scale * unit_var_beta1;
    let var_beta0 = scale * unit_var_beta0;
    let cov_beta0_beta1 = -data.x_mean() * var_beta1;

    let fit = FitResult {
        method,
        n,
        beta0_hat,
        beta1_hat,
        var_beta1,
        var_beta0,
        cov_beta0_beta1,
        variance_scale,
        sigma2,
        sigma2_hat,
        dof,
        residuals,
        c: match method {
            Method::Sr => data.scale().map(|c| c.value()),
            Method::Ols => None,
        },
    };
    let finite = [
        fit.beta0_hat,
        fit.beta1_hat,
        fit.var_beta1,
        fit.var_beta0,
        fit.cov_beta0_beta1,
    ]
    .iter()
    .all(|v| v.is_finite());
    if finite {
        Ok(fit)
    } else {
        Err(Error::Numeric(format!(
            "{} fit produced non-finite estimates",
            method.as_str()
        )))
    }
}
