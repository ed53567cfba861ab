use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree out of range: {what} = {value}, maximum is {max}")]
    DegreeOutOfRange {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("theta = {0} is outside the admissible range |theta| <= 0.499999*pi")]
    InvalidTheta(f64),

    #[error("time must be finite and non-negative, got {0}")]
    InvalidTime(f64),

    #[error("quadrature order {0} is outside 1..=128")]
    InvalidOrder(usize),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("step size {dt} does not divide the grid gap {gap}")]
    IncompatibleStep { dt: f64, gap: f64 },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("slot count mismatch: polynomial has {expected} slots, got {got} arguments")]
    SlotMismatch { expected: usize, got: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
