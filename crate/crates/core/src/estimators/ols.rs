use super::{assemble, check_sigma2, Dataset, FitResult, Method};
use crate::error::{Error, Result};
use crate::kinematics::ensure_varied;

/// Ordinary least squares.
///
/// `β̂₁ = Σ(Y−Ȳ)(X−X̄) / Σ(X−X̄)²`, `β̂₀ = Ȳ − β̂₁X̄`, with
/// `Var(β̂₁) = σ²/Sxx`, `Var(β̂₀) = σ²·ΣX²/(N·Sxx)`, `Cov = −X̄σ²/Sxx`.
/// Ignores the dataset's scale.
pub fn ols_fit(data: &Dataset, sigma2: Option<f64>) -> Result<FitResult> {
    ensure_varied(data.x())?;
    check_sigma2(sigma2)?;

    let n = data.len() as f64;
    let x_mean = data.x_mean();
    let y_mean = data.y_mean();
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in data.x().iter().zip(data.y()) {
        let dx = x - x_mean;
        sxx += dx * dx;
        sxy += (y - y_mean) * dx;
    }
    if !(sxx > 0.0) {
        return Err(Error::DegenerateDesign(
            "covariate sum of squares vanished".into(),
        ));
    }
    let beta1 = sxy / sxx;
    let beta0 = y_mean - beta1 * x_mean;
    let sum_x2: f64 = data.x().iter().map(|x| x * x).sum();

    assemble(
        Method::Ols,
        data,
        beta0,
        beta1,
        1.0 / sxx,
        sum_x2 / (n * sxx),
        sigma2,
    )
}
