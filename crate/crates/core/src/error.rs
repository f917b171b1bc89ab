use std::fmt;

/// Side on which an optimal stock position runs off to infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Long,
    Short,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Long => f.write_str("long"),
            Direction::Short => f.write_str("short"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("binary signal must take a value in {{0, 1, 2}}, got {0}")]
    InvalidSignal(i64),

    #[error("degenerate market: forward price {forward} dominates the best outcome of the stock")]
    DegenerateMarket { forward: f64 },

    #[error("optimal stock position is unbounded ({0})")]
    Unbounded(Direction),

    #[error("likelihood vanishes on the whole grid for observation {xi}")]
    OutOfSupport { xi: f64 },

    #[error("indifference gap has no sign change on [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    #[error("information {bits} bits is below the attainable minimum {min_bits} bits")]
    BelowMinimumInformation { bits: f64, min_bits: f64 },

    #[error("{0} is not available for grid posteriors")]
    Unsupported(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
