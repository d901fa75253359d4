use thiserror::Error;

/// Numerical and model errors shared by the simulation modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A chirped drive was requested with B = 0; the drive constraint
    /// cannot be solved for the pulse amplitude.
    #[error("ChirpWithoutDissipation: chirped drive requires coupling_b != 0")]
    ChirpWithoutDissipation,

    /// Initial covariance requested with a negative bath occupation.
    #[error("NegativeOccupation: n_th = {n_th} must be >= 0")]
    NegativeOccupation { n_th: f64 },

    /// A state component exceeded the divergence guard during integration.
    #[error("Diverged: state magnitude exceeded {limit:.1e} at t = {t}")]
    Diverged { t: f64, limit: f64 },

    /// The fundamental matrix of the oracle propagator became too
    /// ill-conditioned to invert reliably.
    #[error("IllConditioned: fundamental matrix condition estimate {cond:.3e} at t = {t}")]
    IllConditioned { t: f64, cond: f64 },

    /// The steady-state fixed-point iteration failed to converge.
    #[error("NoConvergence: fixed-point residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    /// The covariance never met the stationarity criterion before the
    /// time cap (heating or instability).
    #[error("NoStationaryState: stationarity not reached by t = {t_max:.1e}")]
    NoStationaryState { t_max: f64 },
}

impl Error {
    /// Short structured name, used when flagging failed sweep points and
    /// on the CLI's stderr.
    pub fn name(&self) -> &'static str {
        match self {
            Error::ChirpWithoutDissipation => "ChirpWithoutDissipation",
            Error::NegativeOccupation { .. } => "NegativeOccupation",
            Error::Diverged { .. } => "Diverged",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NoStationaryState { .. } => "NoStationaryState",
        }
    }
}
