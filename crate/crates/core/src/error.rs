use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("box {id} ({w}x{h}) does not fit the {width}x{height} array")]
    BoxTooLarge {
        id: usize,
        w: u32,
        h: u32,
        width: u32,
        height: u32,
    },

    #[error("initial set-point is infeasible")]
    InfeasibleInit,

    #[error("index vector has {got} entries, expected {expected}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("evaluator failed: {0}")]
    Evaluator(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
