//! The rapidity-weighted moment estimator.
//!
//! With `φ_i` the demeaned rapidities of the covariate and
//! `W = Σ X_i·sinh φ_i > 0`, the sample conditions `Σ ε̂ = 0` and
//! `Σ ε̂·sinh φ = 0` give
//!
//! ```text
//! β̂₁ = Σ Y_i·sinh φ_i / W,    β̂₀ = Ȳ − β̂₁·X̄,
//! Var(β̂₁) = σ²·Σ sinh²φ_i / W².
//! ```
//!
//! The numerator is accumulated as `Σ (Y_i − Ȳ)·sinh φ_i`, equal because
//! `Σ sinh φ_i = 0`.

use serde::Serialize;

use super::{assemble, check_sigma2, dataset::mean, Dataset, FitResult, Method};
use crate::error::{Error, Result};
use crate::kinematics::{ensure_varied, RapidityProfile, Scale};

/// Linear weights of the SR estimator: `β̂₁ = Σ k_i·Y_i`, `β̂₀ = Σ h_i·Y_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitWeights {
    /// `k_i = sinh φ_i / W`; `Σ k_i = 0` and `Σ k_i·X_i = 1`.
    pub k: Vec<f64>,
    /// `h_i = 1/N − X̄·k_i`.
    pub h: Vec<f64>,
}

/// The aggregates `C`, `S`, `T`, `H` of a design's rapidity profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormTerms {
    pub c: f64,
    pub s: f64,
    pub t: f64,
    pub h: f64,
}

impl ClosedFormTerms {
    pub fn from_profile(profile: &RapidityProfile) -> Self {
        ClosedFormTerms {
            c: profile.mean_cosh(),
            s: profile.mean_sinh(),
            t: profile.mean_cosh_2phi(),
            h: profile.harmonic_cosh(),
        }
    }
}

fn require_scale(data: &Dataset) -> Result<Scale> {
    data.scale().ok_or_else(|| {
        Error::InvalidParameter("the SR estimator needs a bounded dataset with scale c".into())
    })
}

struct Design {
    profile: RapidityProfile,
    weight_sum: f64,
}

impl Design {
    fn new(x: &[f64], c: Scale) -> Result<Self> {
        ensure_varied(x)?;
        let profile = RapidityProfile::from_velocities(x, c)?;
        let weight_sum = profile.weight_sum(c)?;
        Ok(Design {
            profile,
            weight_sum,
        })
    }
}

/// Fits the SR estimator. `sigma2` is the known error variance, if any.
pub fn sr_fit(data: &Dataset, sigma2: Option<f64>) -> Result<FitResult> {
    let c = require_scale(data)?;
    check_sigma2(sigma2)?;
    let design = Design::new(data.x(), c)?;
    let w = design.weight_sum;

    let y_mean = data.y_mean();
    let numerator: f64 = data
        .y()
        .iter()
        .zip(design.profile.sinh_phi())
        .map(|(y, s)| (y - y_mean) * s)
        .sum();
    let beta1 = numerator / w;
    let beta0 = y_mean - beta1 * data.x_mean();

    let unit_var_beta1 = design.profile.sum_sinh_sq() / (w * w);
    let x_mean = data.x_mean();
    let unit_var_beta0 = 1.0 / data.len() as f64 + x_mean * x_mean * unit_var_beta1;

    assemble(
        Method::Sr,
        data,
        beta0,
        beta1,
        unit_var_beta1,
        unit_var_beta0,
        sigma2,
    )
}

/// The linear weights `k`, `h` of the SR estimator for a design.
pub fn sr_weights(x: &[f64], c: Scale) -> Result<FitWeights> {
    let design = Design::new(x, c)?;
    let n = x.len() as f64;
    let x_mean = mean(x);
    let k: Vec<f64> = design
        .profile
        .sinh_phi()
        .iter()
        .map(|s| s / design.weight_sum)
        .collect();
    let h = k.iter().map(|k| 1.0 / n - x_mean * k).collect();
    Ok(FitWeights { k, h })
}

/// `Var(β̂₁)` from the aggregates of the design:
/// `σ²·(C²−S²)·(T−1) / (2c²·N·(C²−S²−C/H)²)`.
///
/// Cross-check for the canonical `σ²·Σ sinh²φ / W²` used by [`sr_fit`].
pub fn sr_variance_closed_form(profile: &RapidityProfile, c: Scale, sigma2: f64) -> Result<f64> {
    check_sigma2(Some(sigma2))?;
    let terms = ClosedFormTerms::from_profile(profile);
    let n = profile.len() as f64;
    let d = profile.c2_minus_s2();
    let t_minus_one = terms.t - 1.0;
    let gap = d - terms.c / terms.h;
    if !(t_minus_one > 0.0 && gap > 0.0) {
        return Err(Error::DegenerateDesign(
            "closed-form variance needs varying rapidities".into(),
        ));
    }
    let c = c.value();
    Ok(sigma2 * d * t_minus_one / (2.0 * c * c * n * gap * gap))
}

/// `Var_SR(β̂₁) / Var_OLS(β̂₁) − 1`, free of σ².
///
/// With `a = sinh φ`, `b = X − X̄` and `λ = W / Σb²`, Lagrange's identity
/// gives `Σa²·Σb² − (Σab)² = Σb²·Σ(a − λb)²`, so the excess is evaluated as
/// `Σb²·Σ(a − λb)² / W²`. It is non-negative by construction and keeps
/// relative accuracy when it is far below machine epsilon.
pub fn inflation_excess(data: &Dataset) -> Result<f64> {
    let c = require_scale(data)?;
    let design = Design::new(data.x(), c)?;
    let w = design.weight_sum;
    let x_mean = data.x_mean();
    let sxx: f64 = data.x().iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    let lambda = w / sxx;
    let resid: f64 = data
        .x()
        .iter()
        .zip(design.profile.sinh_phi())
        .map(|(x, a)| {
            let r = a - lambda * (x - x_mean);
            r * r
        })
        .sum();
    let excess = sxx * resid / (w * w);
    if excess.is_finite() {
        Ok(excess)
    } else {
        Err(Error::Numeric("variance inflation is not finite".into()))
    }
}

/// `Var_SR(β̂₁) / Var_OLS(β̂₁)`; at least 1, and equal to 1 only when the
/// weights are proportional to the centered covariate.
pub fn variance_inflation(data: &Dataset) -> Result<f64> {
    Ok(1.0 + inflation_excess(data)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{ols_fit, VarianceScale};
    use crate::kinematics::{demeaned_rapidities, Rapidity};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn unit() -> Scale {
        Scale::new(1.0).unwrap()
    }

    fn fixture() -> Dataset {
        Dataset::new(vec![-0.2, 0.3, 0.8], vec![-0.1, 0.1, 0.9], unit()).unwrap()
    }

    #[test]
    fn noiseless_recovery() {
        let d = Dataset::new(vec![-0.5, 0.0, 0.5], vec![0.0, 1.0, 2.0], unit()).unwrap();
        let fit = sr_fit(&d, None).unwrap();
        assert_abs_diff_eq!(fit.beta0_hat, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.beta1_hat, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn two_points_match_ols() {
        let d = Dataset::new(vec![0.0, 0.761594], vec![1.0, 2.0], unit()).unwrap();
        let sr = sr_fit(&d, None).unwrap();
        let ols = ols_fit(&d, None).unwrap();
        assert_relative_eq!(sr.beta1_hat, 1.313_035_554_376_741_4, max_relative = 1e-12);
        assert_relative_eq!(sr.beta0_hat, 1.0, max_relative = 1e-12);
        assert_relative_eq!(sr.beta1_hat, ols.beta1_hat, max_relative = 1e-12);
        assert_relative_eq!(sr.beta0_hat, ols.beta0_hat, max_relative = 1e-12);
    }

    #[test]
    fn fixture_values() {
        let fit = sr_fit(&fixture(), None).unwrap();
        assert_abs_diff_eq!(fit.beta1_hat, 1.042_234_327_198_862_6, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.beta0_hat, -0.012_670_298_159_658_795, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.var_beta1, 2.029_728_973_232_343, epsilon = 1e-12);
        assert_eq!(fit.c, Some(1.0));
    }

    #[test]
    fn variance_structure() {
        let fit = sr_fit(&fixture(), Some(2.0)).unwrap();
        assert_eq!(fit.variance_scale, VarianceScale::Absolute);
        assert_eq!(fit.cov_beta0_beta1, -fixture().x_mean() * fit.var_beta1);
        let x_mean = fixture().x_mean();
        assert_relative_eq!(
            fit.var_beta0,
            2.0 / 3.0 + x_mean * x_mean * fit.var_beta1,
            max_relative = 1e-14
        );
    }

    #[test]
    fn needs_a_scale() {
        let d = Dataset::unbounded(vec![0.1, 0.3], vec![1.0, 2.0]).unwrap();
        assert!(matches!(sr_fit(&d, None), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn degenerate_design() {
        let d = Dataset::new(vec![0.4; 3], vec![1.0, 2.0, 3.0], unit()).unwrap();
        assert!(matches!(sr_fit(&d, None), Err(Error::DegenerateDesign(_))));
        assert!(matches!(variance_inflation(&d), Err(Error::DegenerateDesign(_))));
    }

    #[test]
    fn weights_sum_rules() {
        let x = [-0.2, 0.3, 0.8, 0.55];
        let w = sr_weights(&x, unit()).unwrap();
        let sum_k: f64 = w.k.iter().sum();
        let sum_kx: f64 = w.k.iter().zip(&x).map(|(k, x)| k * x).sum();
        let max_k = w.k.iter().fold(0.0_f64, |m, k| m.max(k.abs()));
        assert!(sum_k.abs() <= 1e-12 * max_k * x.len() as f64);
        assert_abs_diff_eq!(sum_kx, 1.0, epsilon = 1e-10);
        let y = [0.3, -1.0, 2.5, 0.0];
        let d = Dataset::new(x.to_vec(), y.to_vec(), unit()).unwrap();
        let fit = sr_fit(&d, None).unwrap();
        let b1: f64 = w.k.iter().zip(&y).map(|(k, y)| k * y).sum();
        let b0: f64 = w.h.iter().zip(&y).map(|(h, y)| h * y).sum();
        assert_relative_eq!(b1, fit.beta1_hat, max_relative = 1e-12);
        assert_relative_eq!(b0, fit.beta0_hat, max_relative = 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        let c = unit();
        let profile = RapidityProfile::from_velocities(&[-0.2, 0.3, 0.8], c).unwrap();
        let v = sr_variance_closed_form(&profile, c, 1.0).unwrap();
        assert_abs_diff_eq!(v, 2.029_728_973_232_343, epsilon = 1e-9);

        let sym: Vec<Rapidity> = [-1.0, 1.0].iter().map(|&t| Rapidity::new(t).unwrap()).collect();
        let profile = demeaned_rapidities(&sym).unwrap();
        let canonical = profile.sum_sinh_sq() / profile.weight_sum(c).unwrap().powi(2);
        assert_relative_eq!(
            sr_variance_closed_form(&profile, c, 3.0).unwrap(),
            3.0 * canonical,
            max_relative = 1e-12
        );

        let flat: Vec<Rapidity> = [0.3, 0.3].iter().map(|&t| Rapidity::new(t).unwrap()).collect();
        let profile = demeaned_rapidities(&flat).unwrap();
        assert!(matches!(
            sr_variance_closed_form(&profile, c, 1.0),
            Err(Error::DegenerateDesign(_))
        ));
    }

    #[test]
    fn inflation_examples() {
        assert_abs_diff_eq!(
            variance_inflation(&fixture()).unwrap(),
            1.014_864_486_616_171_6,
            epsilon = 1e-12
        );
        let far = fixture().with_scale(Scale::new(1e6).unwrap()).unwrap();
        let excess = inflation_excess(&far).unwrap();
        assert!((0.0..=1e-9).contains(&excess));
        // Two points: weights are always proportional to X − X̄.
        let two = Dataset::new(vec![0.1, 0.9], vec![0.0, 1.0], unit()).unwrap();
        assert!(inflation_excess(&two).unwrap() < 1e-12);
    }
}
