use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind};
use crate::estimators::{Method, Parameter};

/// One tolerance check: passes when `low ≤ value ≤ high`.
///
/// `passed` is `None` when the check cannot be decided, for example a
/// Monte Carlo standard error from a single replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub low: Option<f64>,
    pub high: Option<f64>,
    pub passed: Option<bool>,
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, low: Option<f64>, high: Option<f64>) -> Self {
        let ok = value.is_finite()
            && low.map_or(true, |l| l <= value)
            && high.map_or(true, |h| value <= h);
        Check {
            name: name.into(),
            value: Some(value).filter(|v| v.is_finite()),
            low,
            high,
            passed: Some(ok),
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, high: f64) -> Self {
        Check::within(name, value, None, Some(high))
    }

    /// Strict version of a lower bound: passes when `value > low`.
    pub fn exceeds(name: impl Into<String>, value: f64, low: f64) -> Self {
        let mut check = Check::within(name, value, Some(low), None);
        check.passed = Some(value.is_finite() && value > low);
        check
    }

    /// Strict version of an upper bound: passes when `value < high`.
    pub fn below(name: impl Into<String>, value: f64, high: f64) -> Self {
        let mut check = Check::within(name, value, None, Some(high));
        check.passed = Some(value.is_finite() && value < high);
        check
    }

    pub fn indeterminate(name: impl Into<String>, value: Option<f64>) -> Self {
        Check {
            name: name.into(),
            value: value.filter(|v| v.is_finite()),
            low: None,
            high: None,
            passed: None,
        }
    }
}

/// Monte Carlo summary of one estimator for one parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSummary {
    pub method: Method,
    pub parameter: Parameter,
    pub truth: f64,
    pub mean: f64,
    pub bias: f64,
    pub mc_variance: Option<f64>,
    /// Standard error of the Monte Carlo mean.
    pub mcse: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Moment {
    VarBeta1,
    VarBeta0,
    CovBeta0Beta1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarianceSummary {
    pub method: Method,
    pub moment: Moment,
    pub analytic: f64,
    pub monte_carlo: Option<f64>,
    pub relative_error: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// SR estimate with the SR variance.
    Sr,
    /// OLS estimate with the OLS variance.
    Ols,
    /// SR estimate with the smaller OLS variance.
    SrWithOlsVariance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageSummary {
    pub pairing: Pairing,
    pub nominal: f64,
    pub half_width: f64,
    pub coverage: f64,
    pub mcse: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramePoint {
    pub theta_star: f64,
    pub v_star: f64,
    pub ols_beta0: f64,
    pub ols_beta1: f64,
    pub sr_beta0: f64,
    pub sr_beta1: f64,
    /// SR slope variance per unit σ² in this frame.
    pub sr_var_beta1: f64,
    /// Largest `|φ''_i − φ_i|` against the unboosted frame.
    pub phi_max_deviation: f64,
    pub sum_sinh_phi: f64,
    pub weight_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameCurves {
    pub points: Vec<FramePoint>,
    pub ols_beta1_range: f64,
    pub sr_beta1_range: f64,
}

/// `|SR − OLS|` at one scale. Variances are per unit σ².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergencePoint {
    pub multiplier: f64,
    pub c: f64,
    pub beta1: f64,
    pub beta0: f64,
    pub var_beta1: f64,
    pub var_beta0: f64,
    pub cov: f64,
    /// Largest of the five differences relative to the OLS value.
    pub max_relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slopes {
    pub beta1: Option<f64>,
    pub beta0: Option<f64>,
    pub var_beta1: Option<f64>,
    pub var_beta0: Option<f64>,
    pub cov: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceCurves {
    pub points: Vec<ConvergencePoint>,
    /// Least-squares slopes of `log|SR − OLS|` on `log c`.
    pub slopes: Slopes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentResults {
    Unbiasedness(Vec<EstimateSummary>),
    Variance(Vec<VarianceSummary>),
    FrameSensitivity(FrameCurves),
    Convergence(ConvergenceCurves),
    Coverage(Vec<CoverageSummary>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub seed: u64,
    /// The configuration as run, with `kind` filled in.
    pub config: ExperimentConfig,
    pub replications: usize,
    /// Covariate used by every replication.
    pub x: Vec<f64>,
    pub results: ExperimentResults,
    pub checks: Vec<Check>,
    /// `false` if any check failed, `None` if any was indeterminate and none
    /// failed, `true` otherwise.
    pub passed: Option<bool>,
}

pub(crate) fn overall(checks: &[Check]) -> Option<bool> {
    if checks.iter().any(|c| c.passed == Some(false)) {
        Some(false)
    } else if checks.iter().any(|c| c.passed.is_none()) {
        None
    } else {
        Some(true)
    }
}
