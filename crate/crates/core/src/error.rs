use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("value {0} is outside [0, 1)")]
    Domain(String),

    #[error("base must be at least 2, got {0}")]
    InvalidBase(u32),

    #[error("digit {digit} is out of range for base {base}")]
    DigitOutOfRange { digit: u32, base: u32 },

    #[error("the repeating part of an expansion must not be empty")]
    EmptyPeriod,

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("unknown {kind} {name:?}")]
    UnknownName { kind: &'static str, name: String },

    #[error("base {base} does not pair with the {grid} grid")]
    Pairing { base: u32, grid: &'static str },

    #[error("invalid turn map: {0}")]
    TurnMap(String),

    #[error("digit source ran dry after {available} digits, {requested} requested")]
    SourceExhausted { available: usize, requested: usize },

    #[error("step index {index} is beyond the last index {last}")]
    IndexOutOfRange { index: usize, last: usize },

    #[error("digit position must be at least 1")]
    ZeroPosition,

    #[error("digit {digit} turns straight ahead, so no run of it closes a loop")]
    NoClosingRun { digit: u8 },

    #[error("digits {window:?} at position {position} are not a run of {run_length} equal digits")]
    NotARun {
        position: usize,
        run_length: usize,
        window: Vec<u8>,
    },

    #[error("radius must be positive")]
    NonPositiveRadius,

    #[error("witness does not replay: {0}")]
    WitnessMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
