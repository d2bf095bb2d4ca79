//! Collinear special-relativistic kinematics.
//!
//! Velocities live in the open interval `(-c, c)`. Rapidities `θ = artanh(v/c)`
//! are unbounded and add under collinear Lorentz boosts, which is what makes
//! the demeaned rapidities `φ_i = θ_i − θ₀` frame independent. The
//! center-of-momentum rapidity `θ₀` and the profile built around it feed the
//! moment estimator in [`crate::estimators`].
//!
//! Accumulations run in index order so results are bit-reproducible on a
//! given platform.

use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in metres per second; the default scale of the CLI.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Largest admissible `|v| / c`. Velocities at or beyond it are rejected.
pub const VELOCITY_GUARD: f64 = 1.0 - 4.0 * f64::EPSILON;

/// Cap on `|tanh θ|` for computed velocities, strictly below the guard.
const SATURATION: f64 = 1.0 - 8.0 * f64::EPSILON;

/// The bound `c` of the open velocity interval.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Scale(f64);

impl Scale {
    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() && c > 0.0 {
            Ok(Scale(c))
        } else {
            Err(Error::InvalidParameter(format!(
                "scale c must be positive and finite, got {c}"
            )))
        }
    }

    pub const fn speed_of_light() -> Self {
        Scale(SPEED_OF_LIGHT)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Whether `v` is an admissible velocity under this scale.
    pub fn contains(self, v: f64) -> bool {
        v.is_finite() && v.abs() < VELOCITY_GUARD * self.0
    }

    /// Returns `v` unchanged if admissible, otherwise a domain error.
    pub fn check(self, v: f64) -> Result<f64> {
        if !v.is_finite() {
            Err(Error::NonFinite("velocity".into()))
        } else if v.abs() >= VELOCITY_GUARD * self.0 {
            Err(Error::OutOfRange {
                value: v,
                bound: self.0,
            })
        } else {
            Ok(v)
        }
    }
}

impl TryFrom<f64> for Scale {
    type Error = Error;

    fn try_from(c: f64) -> Result<Self> {
        Scale::new(c)
    }
}

impl From<Scale> for f64 {
    fn from(c: Scale) -> f64 {
        c.0
    }
}

/// A velocity validated against a [`Scale`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Velocity(f64);

impl Velocity {
    pub fn new(v: f64, c: Scale) -> Result<Self> {
        c.check(v).map(Velocity)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn rapidity(self, c: Scale) -> Result<Rapidity> {
        rapidity(self.0, c)
    }
}

/// A dimensionless rapidity.
#[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Rapidity(f64);

impl Rapidity {
    pub const ZERO: Rapidity = Rapidity(0.0);

    pub fn new(theta: f64) -> Result<Self> {
        if theta.is_finite() {
            Ok(Rapidity(theta))
        } else {
            Err(Error::NonFinite("rapidity".into()))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Add for Rapidity {
    type Output = Rapidity;

    fn add(self, rhs: Rapidity) -> Rapidity {
        Rapidity(self.0 + rhs.0)
    }
}

impl Sub for Rapidity {
    type Output = Rapidity;

    fn sub(self, rhs: Rapidity) -> Rapidity {
        Rapidity(self.0 - rhs.0)
    }
}

impl Neg for Rapidity {
    type Output = Rapidity;

    fn neg(self) -> Rapidity {
        Rapidity(-self.0)
    }
}

/// Rapidity `artanh(v/c)` of a velocity.
///
/// Evaluated as `½·ln((c+|v|)/(c−|v|))` through `ln_1p` on the magnitude, so
/// small velocities keep full relative precision and velocities near `−c`
/// do not lose digits to cancellation.
pub fn rapidity(v: f64, c: Scale) -> Result<Rapidity> {
    let v = c.check(v)?;
    let a = v.abs();
    let theta = 0.5 * (2.0 * a / (c.0 - a)).ln_1p();
    Ok(Rapidity(theta.copysign(v)))
}

/// Velocity `c·tanh θ`. Saturates just inside the bound once `|θ|` is large
/// enough that `tanh θ` rounds to ±1 (around `|θ| ≈ 18.7`).
pub fn velocity_of(theta: Rapidity, c: Scale) -> f64 {
    c.0 * theta.0.tanh().clamp(-SATURATION, SATURATION)
}

/// Lorentz velocity transformation into a frame moving at `v_star`:
/// `(v − v*) / (1 − v·v*/c²)`.
pub fn lorentz_boost(v: f64, v_star: f64, c: Scale) -> Result<f64> {
    let v = c.check(v)?;
    let u = c.check(v_star)?;
    let (bv, bu) = (v / c.0, u / c.0);
    let denom = (-bv).mul_add(bu, 1.0);
    let w = (bv - bu) / denom;
    Ok(c.0 * w.clamp(-SATURATION, SATURATION))
}

/// Galilean velocity transformation `v − v*`.
pub fn galilean_boost(v: f64, v_star: f64) -> f64 {
    v - v_star
}

/// Center-of-momentum rapidity `θ₀`, defined by `tanh θ₀ = Σ sinh θ_i / Σ cosh θ_i`.
///
/// A first estimate comes from `½·ln(Σ e^{θ_i} / Σ e^{−θ_i})` with each
/// log-sum-exp shifted by its own maximum, so no exponential overflows for
/// any finite input. It is then re-centered exactly through
/// `tanh(θ₀ − t) = Σ sinh(θ_i − t) / Σ cosh(θ_i − t)`, which holds for every
/// reference `t`; with `t` already close to `θ₀` the correction is small and
/// keeps full relative precision.
pub fn center_rapidity(thetas: &[Rapidity]) -> Result<Rapidity> {
    if thetas.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if thetas.iter().any(|t| !t.0.is_finite()) {
        return Err(Error::NonFinite("rapidity vector".into()));
    }

    let hi = thetas.iter().fold(f64::NEG_INFINITY, |m, t| m.max(t.0));
    let lo = thetas.iter().fold(f64::INFINITY, |m, t| m.min(t.0));
    let log_pos = hi + thetas.iter().map(|t| (t.0 - hi).exp()).sum::<f64>().ln();
    let log_neg = -lo + thetas.iter().map(|t| (lo - t.0).exp()).sum::<f64>().ln();
    let rough = 0.5 * (log_pos - log_neg);

    let (s, ch) = shifted_hyperbolic_sums(thetas.iter().map(|t| t.0 - rough));
    let center = rough + (s / ch).atanh();
    if center.is_finite() {
        Ok(Rapidity(center))
    } else {
        Err(Error::Numeric("center rapidity is not finite".into()))
    }
}

/// `(Σ sinh d_i, Σ cosh d_i)` scaled by a common positive factor `2·e^{−max|d|}`.
/// The ratio is exact and nothing overflows.
fn shifted_hyperbolic_sums(d: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let m = d.clone().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut s = 0.0;
    let mut ch = 0.0;
    for x in d {
        let a = x.abs();
        let lead = (a - m).exp();
        // e^{a}(1 − e^{−2a}) without cancellation for small a
        s += (lead * -(-2.0 * a).exp_m1()).copysign(x);
        ch += lead * (1.0 + (-2.0 * a).exp());
    }
    (s, ch)
}

/// Rapidities of a design measured from their center of momentum, plus the
/// hyperbolic aggregates used by the variance formulas.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RapidityProfile {
    theta: Vec<f64>,
    center: f64,
    phi: Vec<f64>,
    sinh_phi: Vec<f64>,
    mean_cosh: f64,
    mean_sinh: f64,
    mean_cosh_2phi: f64,
    harmonic_cosh: f64,
}

/// Builds the [`RapidityProfile`] of a rapidity vector: `θ₀`, `φ_i = θ_i − θ₀`,
/// `sinh φ_i` and the aggregates `C`, `S`, `T`, `H`.
pub fn demeaned_rapidities(thetas: &[Rapidity]) -> Result<RapidityProfile> {
    let center = center_rapidity(thetas)?;
    let n = thetas.len() as f64;
    let theta: Vec<f64> = thetas.iter().map(|t| t.0).collect();
    let phi: Vec<f64> = theta.iter().map(|t| t - center.0).collect();
    let sinh_phi = phi.iter().map(|p| p.sinh()).collect();

    let mean_cosh = theta.iter().map(|t| t.cosh()).sum::<f64>() / n;
    let mean_sinh = theta.iter().map(|t| t.sinh()).sum::<f64>() / n;
    let mean_cosh_2phi = phi.iter().map(|p| (2.0 * p).cosh()).sum::<f64>() / n;
    let harmonic_cosh = n / theta.iter().map(|t| 1.0 / t.cosh()).sum::<f64>();

    Ok(RapidityProfile {
        theta,
        center: center.0,
        phi,
        sinh_phi,
        mean_cosh,
        mean_sinh,
        mean_cosh_2phi,
        harmonic_cosh,
    })
}

impl RapidityProfile {
    /// Profile of a velocity sample; every velocity must be admissible.
    pub fn from_velocities(x: &[f64], c: Scale) -> Result<Self> {
        let thetas = x
            .iter()
            .enumerate()
            .map(|(i, &v)| rapidity(v, c).map_err(|e| e.at_row(i + 1)))
            .collect::<Result<Vec<_>>>()?;
        demeaned_rapidities(&thetas)
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// `θ₀`.
    pub fn center(&self) -> Rapidity {
        Rapidity(self.center)
    }

    /// `X₀ = c·tanh θ₀`.
    pub fn center_velocity(&self, c: Scale) -> f64 {
        velocity_of(self.center(), c)
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn sinh_phi(&self) -> &[f64] {
        &self.sinh_phi
    }

    /// `C`, the mean of `cosh θ_i`.
    pub fn mean_cosh(&self) -> f64 {
        self.mean_cosh
    }

    /// `S`, the mean of `sinh θ_i`.
    pub fn mean_sinh(&self) -> f64 {
        self.mean_sinh
    }

    /// `T`, the mean of `cosh 2φ_i`.
    pub fn mean_cosh_2phi(&self) -> f64 {
        self.mean_cosh_2phi
    }

    /// `H = N / Σ sech θ_i`.
    pub fn harmonic_cosh(&self) -> f64 {
        self.harmonic_cosh
    }

    /// `C² − S²`, evaluated as `mean(e^θ)·mean(e^{−θ})` to avoid cancellation.
    pub fn c2_minus_s2(&self) -> f64 {
        let n = self.len() as f64;
        let pos = self.theta.iter().map(|t| t.exp()).sum::<f64>() / n;
        let neg = self.theta.iter().map(|t| (-t).exp()).sum::<f64>() / n;
        pos * neg
    }

    pub fn sum_sinh_phi(&self) -> f64 {
        self.sinh_phi.iter().sum()
    }

    pub fn sum_cosh_phi(&self) -> f64 {
        self.phi.iter().map(|p| p.cosh()).sum()
    }

    pub fn sum_sinh_sq(&self) -> f64 {
        self.sinh_phi.iter().map(|s| s * s).sum()
    }

    /// `Σ X_i·sinh φ_i` for `X_i = c·tanh θ_i`, accumulated in the centered
    /// form `Σ (X_i − X₀)·sinh φ_i` using
    /// `X_i − X₀ = c·sinh φ_i / (cosh θ_i·cosh θ₀)`. Every term is
    /// non-negative, so the sum is positive unless all `φ_i` vanish.
    pub fn weight_sum(&self, c: Scale) -> Result<f64> {
        let sech_center = 1.0 / self.center.cosh();
        let sum: f64 = self
            .theta
            .iter()
            .zip(&self.sinh_phi)
            .map(|(t, s)| s * s / t.cosh())
            .sum();
        let w = c.0 * sech_center * sum;
        if !w.is_finite() {
            Err(Error::Numeric("momentum weight sum is not finite".into()))
        } else if w <= 0.0 {
            Err(Error::DegenerateDesign(
                "all demeaned rapidities vanish".into(),
            ))
        } else {
            Ok(w)
        }
    }
}

fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "q-deformation parameter must be positive, got {q}"
        )))
    }
}

/// q-deformed hyperbolic sine `(eˣ − q·e⁻ˣ)/2`.
pub fn sinh_q(q: f64, x: f64) -> Result<f64> {
    check_q(q)?;
    Ok((x.exp() - q * (-x).exp()) / 2.0)
}

/// q-deformed hyperbolic cosine `(eˣ + q·e⁻ˣ)/2`.
pub fn cosh_q(q: f64, x: f64) -> Result<f64> {
    check_q(q)?;
    Ok((x.exp() + q * (-x).exp()) / 2.0)
}

pub fn tanh_q(q: f64, x: f64) -> Result<f64> {
    Ok(sinh_q(q, x)? / cosh_q(q, x)?)
}

/// `Σ X_i·sinh φ_i` for a velocity sample, strictly positive for any design
/// with at least two distinct velocities.
pub fn momentum_weight_sum(x: &[f64], c: Scale) -> Result<f64> {
    ensure_varied(x)?;
    RapidityProfile::from_velocities(x, c)?.weight_sum(c)
}

/// Requires two or more observations that are not all identical.
pub(crate) fn ensure_varied(x: &[f64]) -> Result<()> {
    if x.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: x.len(),
        });
    }
    if x.iter().all(|&v| v == x[0]) {
        return Err(Error::DegenerateDesign(format!(
            "all {} covariate values equal {}",
            x.len(),
            x[0]
        )));
    }
    Ok(())
}

fn check_mass(m: f64) -> Result<()> {
    if m.is_finite() && m >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "rest mass must be non-negative, got {m}"
        )))
    }
}

/// `m·c·sinh θ`.
pub fn relativistic_momentum(m: f64, theta: Rapidity, c: Scale) -> Result<f64> {
    check_mass(m)?;
    Ok(m * c.0 * theta.0.sinh())
}

/// `m·c²·cosh θ`.
pub fn relativistic_energy(m: f64, theta: Rapidity, c: Scale) -> Result<f64> {
    check_mass(m)?;
    Ok(m * c.0 * c.0 * theta.0.cosh())
}
