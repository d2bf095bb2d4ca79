//! Data generation under `Y = β₀ + β₁·X + ε`, frame changes of datasets, and
//! Monte Carlo experiments comparing the estimators.

mod boost;
mod config;
mod design;
mod experiments;
mod report;
pub mod rng;

pub use boost::{boost_dataset, BoostMode, BoostSpec, FrameVelocity};
pub use config::{ExperimentConfig, ExperimentKind};
pub use design::{generate_dataset, Design, TrueModel};
pub use experiments::{
    run_convergence, run_coverage, run_experiment, run_frame_sensitivity, run_unbiasedness,
    run_variance_calibration,
};
pub use report::{
    Check, ConvergenceCurves, ConvergencePoint, CoverageSummary, EstimateSummary,
    ExperimentReport, ExperimentResults, FrameCurves, FramePoint, Moment, Pairing, Slopes,
    VarianceSummary,
};
