use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::rng::{stream, DESIGN_STREAM};
use crate::error::{Error, Result};
use crate::estimators::Dataset;
use crate::kinematics::{velocity_of, Rapidity, Scale};

/// How covariate values are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Design {
    /// Explicit values, repeated cyclically when more are requested.
    Fixed { x: Vec<f64> },
    /// `X ~ U(−a, a)` with `0 < a < c`.
    UniformVelocity { a: f64 },
    /// `X = c·tanh(U)` with `U ~ U(−b, b)`.
    UniformRapidity { b: f64 },
}

impl Design {
    pub fn validate(&self, c: Scale) -> Result<()> {
        match self {
            Design::Fixed { x } => {
                if x.is_empty() {
                    return Err(Error::InvalidParameter("fixed design has no values".into()));
                }
                for (i, &v) in x.iter().enumerate() {
                    c.check(v).map_err(|e| e.at_row(i + 1))?;
                }
                Ok(())
            }
            Design::UniformVelocity { a } => {
                if a.is_finite() && *a > 0.0 && c.contains(*a) {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "uniform_velocity needs 0 < a < c = {}, got a = {a}",
                        c.value()
                    )))
                }
            }
            Design::UniformRapidity { b } => {
                if b.is_finite() && *b > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "uniform_rapidity needs a finite b > 0, got {b}"
                    )))
                }
            }
        }
    }

    /// Size used when none is given: the length of a fixed design.
    pub fn natural_len(&self) -> Option<usize> {
        match self {
            Design::Fixed { x } => Some(x.len()),
            _ => None,
        }
    }

    /// Draws `n` covariate values. Random designs use the stream reserved for
    /// designs, so the covariate is the same for every replication of a seed.
    pub fn realize(&self, n: usize, c: Scale, seed: u64) -> Result<Vec<f64>> {
        self.validate(c)?;
        if n == 0 {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        let mut rng = stream(seed, DESIGN_STREAM);
        let x: Vec<f64> = match self {
            Design::Fixed { x } => x.iter().cycle().take(n).copied().collect(),
            Design::UniformVelocity { a } => (0..n).map(|_| rng.random_range(-a..*a)).collect(),
            Design::UniformRapidity { b } => (0..n)
                .map(|_| velocity_of(Rapidity::new(rng.random_range(-b..*b)).unwrap_or_default(), c))
                .collect(),
        };
        for (i, &v) in x.iter().enumerate() {
            c.check(v).map_err(|e| e.at_row(i + 1))?;
        }
        Ok(x)
    }
}

/// Data-generating process `Y = β₀ + β₁·X + ε`, `ε ~ N(0, σ²)`, with `|X| < c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrueModel {
    pub beta0: f64,
    pub beta1: f64,
    pub sigma: f64,
    pub c: Scale,
}

impl TrueModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta0.is_finite() && self.beta1.is_finite()) {
            return Err(Error::NonFinite("model coefficients".into()));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be finite and non-negative, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// Responses for covariate `x` with noise drawn from `rng` in index order.
    pub fn respond(&self, x: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        x.iter()
            .map(|&x| {
                let z: f64 = rng.sample(StandardNormal);
                self.beta0 + self.beta1 * x + self.sigma * z
            })
            .collect()
    }

    /// Replication `r` of the model on a fixed covariate.
    pub fn replicate(&self, x: &[f64], seed: u64, r: u64) -> Result<Dataset> {
        let y = self.respond(x, &mut stream(seed, r));
        Dataset::new(x.to_vec(), y, self.c)
    }
}

/// Draws one dataset: the design from its own stream, the noise from
/// replication stream 0.
pub fn generate_dataset(design: &Design, model: &TrueModel, n: usize, seed: u64) -> Result<Dataset> {
    model.validate()?;
    let x = design.realize(n, model.c, seed)?;
    model.replicate(&x, seed, 0)
}
