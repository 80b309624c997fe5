use thiserror::Error;

/// Errors for device-model construction, state algebra and rate analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{context}: imaginary part {imag:e} exceeds tolerance {tol:e}")]
    NumericalConsistency {
        context: &'static str,
        imag: f64,
        tol: f64,
    },

    #[error("matrix is not Hermitian: max asymmetry {0:e}")]
    NotHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error(
        "invalid Pauli channel ({p00}, {p01}, {p10}, {p11}): probabilities must be \
         nonnegative and sum to 1"
    )]
    InvalidChannel {
        p00: f64,
        p01: f64,
        p10: f64,
        p11: f64,
    },

    #[error("degenerate measurement basis: outcome overlap sum {denominator:e} below threshold")]
    DegenerateBasis { denominator: f64 },

    #[error("measurement flip rate {e_bit1} >= 0.5: observed QBER cannot be inverted")]
    DegenerateFlipRate { e_bit1: f64 },

    #[error(
        "observed QBER {q} below the measurement flip-rate floor {e_bit1}: \
         no channel in the model produces it"
    )]
    OutOfModel { q: f64, e_bit1: f64 },

    #[error("bit error target {target} outside the attainable interval [{min}, {max}]")]
    InfeasibleTarget { target: f64, min: f64, max: f64 },

    #[error("device model incompatible with bound strategy `{strategy}`: {reason}")]
    ModelMismatch {
        strategy: &'static str,
        reason: String,
    },

    #[error("unknown strategy `{name}`; registered: {registered:?}")]
    UnknownStrategy {
        name: String,
        registered: &'static [&'static str],
    },
}

pub type Result<T> = std::result::Result<T, Error>;
