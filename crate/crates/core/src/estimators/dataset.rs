use crate::error::{Error, Result};
use crate::kinematics::Scale;

/// Paired observations `(X_i, Y_i)`.
///
/// A bounded dataset carries its scale `c` and every `|X_i| < c`. An
/// unbounded one (no scale) arises from Galilean frame changes or OLS-only
/// input and cannot be passed to the SR estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<f64>,
    y: Vec<f64>,
    c: Option<Scale>,
}

impl Dataset {
    pub fn new(x: Vec<f64>, y: Vec<f64>, c: Scale) -> Result<Self> {
        check_pairs(&x, &y)?;
        for (i, &v) in x.iter().enumerate() {
            c.check(v).map_err(|e| e.at_row(i + 1))?;
        }
        Ok(Dataset { x, y, c: Some(c) })
    }

    pub fn unbounded(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_pairs(&x, &y)?;
        Ok(Dataset { x, y, c: None })
    }

    /// The same observations under a different scale.
    pub fn with_scale(&self, c: Scale) -> Result<Self> {
        Dataset::new(self.x.clone(), self.y.clone(), c)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn scale(&self) -> Option<Scale> {
        self.c
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x_mean(&self) -> f64 {
        mean(&self.x)
    }

    pub fn y_mean(&self) -> f64 {
        mean(&self.y)
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>, Option<Scale>) {
        (self.x, self.y, self.c)
    }
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn check_pairs(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter(format!(
            "x and y lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    for (i, (a, b)) in x.iter().zip(y).enumerate() {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite("observation".into()).at_row(i + 1));
        }
    }
    Ok(())
}
