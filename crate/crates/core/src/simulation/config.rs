use serde::{Deserialize, Serialize};

use super::design::{Design, TrueModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Unbiasedness,
    Variance,
    FrameSensitivity,
    Convergence,
    Coverage,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::Unbiasedness,
        ExperimentKind::Variance,
        ExperimentKind::FrameSensitivity,
        ExperimentKind::Convergence,
        ExperimentKind::Coverage,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Unbiasedness => "unbiasedness",
            ExperimentKind::Variance => "variance",
            ExperimentKind::FrameSensitivity => "frame_sensitivity",
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::Coverage => "coverage",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown experiment kind `{s}`")))
    }
}

fn one() -> usize {
    1
}

fn default_level() -> f64 {
    0.95
}

/// Declarative description of a Monte Carlo run.
///
/// `grid` holds `θ*` values for frame sensitivity and `c` multipliers for
/// convergence; other kinds ignore it. `n` defaults to the length of a fixed
/// design and is required for sampled ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    pub design: Design,
    pub model: TrueModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default = "one")]
    pub replications: usize,
    pub seed: u64,
    #[serde(default)]
    pub grid: Vec<f64>,
    #[serde(default = "default_level")]
    pub ci_level: f64,
}

impl ExperimentConfig {
    pub fn sample_size(&self) -> Result<usize> {
        match self.n.or_else(|| self.design.natural_len()) {
            Some(n) => Ok(n),
            None => Err(Error::InvalidParameter(
                "`n` is required for a sampled design".into(),
            )),
        }
    }

    pub fn validate(&self, kind: ExperimentKind) -> Result<()> {
        if let Some(k) = self.kind {
            if k != kind {
                return Err(Error::InvalidParameter(format!(
                    "config is for `{}` but `{}` was requested",
                    k.as_str(),
                    kind.as_str()
                )));
            }
        }
        self.model.validate()?;
        self.design.validate(self.model.c)?;
        if self.sample_size()? < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: self.sample_size()?,
            });
        }
        if self.replications == 0 {
            return Err(Error::InvalidParameter("replications must be at least 1".into()));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "ci_level must lie in (0, 1), got {}",
                self.ci_level
            )));
        }
        if self.grid.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("grid".into()));
        }
        let needs_grid = matches!(
            kind,
            ExperimentKind::FrameSensitivity | ExperimentKind::Convergence
        );
        if needs_grid && self.grid.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "`{}` needs a non-empty grid",
                kind.as_str()
            )));
        }
        if kind == ExperimentKind::Convergence {
            if let Some(m) = self.grid.iter().find(|&&m| m <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "c multipliers must exceed 1, got {m}"
                )));
            }
            if self.grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidParameter(
                    "c multipliers must be strictly increasing".into(),
                ));
            }
        }
        Ok(())
    }
}
