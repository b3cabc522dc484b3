//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building grids, taking moments or
/// advancing the kinetic state.
#[derive(Debug, Error)]
pub enum KineticError {
    /// A configuration value is out of range; names the offending key.
    #[error("configuration error: key `{key}`: {message}")]
    Config { key: String, message: String },

    /// Array lengths or grids do not match.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A moment was requested for a cell with zero density.
    #[error("zero density in cell {cell}: mean velocity and temperature are undefined")]
    ZeroDensity { cell: usize },

    /// Both species are absent; collision frequencies are undefined.
    #[error("vacuum in cell {cell}: n1 + n2 = 0")]
    Vacuum { cell: usize },

    /// A Maxwellian was requested with positive density but T <= 0.
    #[error("degenerate temperature {temperature} with density {density} > 0")]
    DegenerateTemperature { temperature: f64, density: f64 },

    /// A closure formula produced a value its admissibility region forbids.
    #[error("admissibility violation: {0}")]
    Admissibility(String),

    /// An inequality constant degenerates for these parameters and the
    /// corresponding check cannot be evaluated.
    #[error("degenerate constant: {0}")]
    DegenerateConstant(String),

    /// An operation was called outside its stated precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The macroscopic relaxation state left its physical region.
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// Newton moment-matching for the discrete Maxwellian did not converge.
    #[error("conservative Maxwellian correction failed: {0}")]
    CorrectionFailed(String),

    /// Fixed-point iteration ran out of iterations; carries the distance
    /// trace accumulated so far.
    #[error("fixed-point iteration did not reach tol within {max_iter} iterations (last distance {last_distance:.3e})")]
    NonConvergence {
        max_iter: usize,
        last_distance: f64,
        trace: Vec<f64>,
    },

    /// A diagnostic trace is missing fields a checker needs.
    #[error("diagnostic error: {0}")]
    Diagnostic(String),
}

impl KineticError {
    pub fn config(key: &str, message: impl Into<String>) -> Self {
        KineticError::Config {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, KineticError>;
