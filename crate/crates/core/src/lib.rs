//! Simulation library for an optomechanical system with simultaneous
//! dispersive and dissipative coupling.
//!
//! The library propagates the mean-field amplitudes and the 4x4
//! second-moment (covariance) matrix of the linearized fluctuations under
//! a constant or chirped-pulse drive, computes time-resolved and
//! steady-state phonon occupations, and runs parameter sweeps over the
//! model's rates and couplings. A CLI front end lives in the `optocool`
//! binary.

pub mod cli;
pub mod config;
pub mod error;
pub mod model;
pub mod propagation;
pub mod steady;
pub mod sweeps;
pub mod verify;

pub use error::Error;
pub use model::{
    build_drift_matrix, build_noise_matrix, chirp_envelope, drive_amplitude, eval_coefficients,
    mean_field_rhs, CMat4, ChirpedDrive, CoefficientSet, DriveSignal, MeanFieldState, SystemParams,
};
pub use propagation::{
    covariance_rhs, extract_observables, initial_covariance, propagate, propagate_detailed,
    propagate_oracle, CovarianceMatrix, PropagationRecord, Trajectory, TrajectorySample,
};
pub use steady::{solve_steady_mean_field, steady_phonon_decomposition, steady_state, SteadyResult};
pub use config::{parse_config, render_config, ConfigError, RunConfig};
pub use sweeps::{
    apply_point, figure_preset, run_sweep, AxisParam, FigurePreset, Observable, SweepAxis,
    SweepGrid, SweepSpec,
};
pub use verify::{run_invariant_suite, CheckResult};
