//! Linear regression with a covariate bounded in `(−c, c)`.
//!
//! Alongside ordinary least squares, [`estimators::sr_fit`] weights each
//! observation by `sinh φ_i`, the hyperbolic sine of its rapidity measured
//! from the sample's center-of-momentum rapidity. Those weights do not change
//! under Lorentz boosts of the covariate. [`simulation`] holds a seeded
//! Monte Carlo harness that checks bias, variance, coverage, frame
//! dependence and the large-`c` limit of both estimators.

pub mod error;
pub mod estimators;
pub mod io;
pub mod kinematics;
pub mod simulation;

pub use error::{Error, ErrorKind, Result};
pub use estimators::{
    confidence_interval, ols_fit, sr_fit, variance_inflation, ConfidenceInterval, Dataset,
    FitResult, Method, Parameter,
};
pub use kinematics::{Rapidity, RapidityProfile, Scale};
