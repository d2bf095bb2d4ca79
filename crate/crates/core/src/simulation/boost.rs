//! Frame changes of a dataset.
//!
//! A Lorentz boost maps `X → X''` by velocity composition and carries the
//! response along as `Y'' = Y − β₁·(X − X'')`, so that
//! `Y'' = β₀ + β₁·X'' + ε` holds with the same noise. The response transform
//! needs the true slope, which makes this a simulation-only facility.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::Dataset;
use crate::kinematics::{galilean_boost, lorentz_boost, rapidity, velocity_of, Rapidity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoostMode {
    Lorentz,
    Galilean,
}

/// Velocity of the new frame, given either directly or as a rapidity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameVelocity {
    VStar(f64),
    ThetaStar(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoostSpec {
    pub mode: BoostMode,
    pub frame: FrameVelocity,
    pub beta1_true: f64,
}

impl BoostSpec {
    pub fn lorentz(v_star: f64, beta1_true: f64) -> Self {
        BoostSpec {
            mode: BoostMode::Lorentz,
            frame: FrameVelocity::VStar(v_star),
            beta1_true,
        }
    }

    pub fn lorentz_rapidity(theta_star: f64, beta1_true: f64) -> Self {
        BoostSpec {
            mode: BoostMode::Lorentz,
            frame: FrameVelocity::ThetaStar(theta_star),
            beta1_true,
        }
    }

    pub fn galilean(v_star: f64, beta1_true: f64) -> Self {
        BoostSpec {
            mode: BoostMode::Galilean,
            frame: FrameVelocity::VStar(v_star),
            beta1_true,
        }
    }
}

/// Re-expresses `data` in the frame described by `boost`.
///
/// Lorentz boosts need a bounded dataset and return one under the same
/// scale. A rapidity-specified boost subtracts `θ*` from each rapidity; a
/// zero boost returns the data unchanged. Galilean boosts return an
/// unbounded dataset.
pub fn boost_dataset(data: &Dataset, boost: &BoostSpec) -> Result<Dataset> {
    let beta1 = boost.beta1_true;
    if !beta1.is_finite() {
        return Err(Error::NonFinite("beta1_true".into()));
    }
    let x = data.x();
    let new_x: Vec<f64> = match (boost.mode, boost.frame) {
        (BoostMode::Galilean, FrameVelocity::VStar(v)) => {
            if !v.is_finite() {
                return Err(Error::NonFinite("v_star".into()));
            }
            x.iter().map(|&xi| galilean_boost(xi, v)).collect()
        }
        (BoostMode::Galilean, FrameVelocity::ThetaStar(_)) => {
            return Err(Error::InvalidParameter(
                "a Galilean boost is specified by v_star, not a rapidity".into(),
            ))
        }
        (BoostMode::Lorentz, frame) => {
            let c = data.scale().ok_or_else(|| {
                Error::InvalidParameter("a Lorentz boost needs a dataset with scale c".into())
            })?;
            match frame {
                FrameVelocity::VStar(v) => {
                    c.check(v)?;
                    x.iter()
                        .enumerate()
                        .map(|(i, &xi)| lorentz_boost(xi, v, c).map_err(|e| e.at_row(i + 1)))
                        .collect::<Result<_>>()?
                }
                FrameVelocity::ThetaStar(t) => {
                    let t = Rapidity::new(t)?;
                    if t == Rapidity::ZERO {
                        x.to_vec()
                    } else {
                        x.iter()
                            .map(|&xi| Ok(velocity_of(rapidity(xi, c)? - t, c)))
                            .collect::<Result<_>>()?
                    }
                }
            }
        }
    };
    let new_y: Vec<f64> = match boost.frame {
        FrameVelocity::VStar(v) if boost.mode == BoostMode::Galilean => {
            data.y().iter().map(|y| y - beta1 * v).collect()
        }
        _ => data
            .y()
            .iter()
            .zip(x.iter().zip(&new_x))
            .map(|(y, (xo, xn))| y - beta1 * (xo - xn))
            .collect(),
    };
    match (boost.mode, data.scale()) {
        (BoostMode::Lorentz, Some(c)) => Dataset::new(new_x, new_y, c),
        _ => Dataset::unbounded(new_x, new_y),
    }
}
