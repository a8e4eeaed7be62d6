use thiserror::Error;

/// Errors raised by the simulator. The short tag at the start of each message
/// is stable and is what the command-line reports print.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bad-partition: {0}")]
    BadPartition(String),

    #[error("bad-mode: mode {mode} is outside 1..={n_modes}")]
    BadMode { mode: usize, n_modes: usize },

    #[error("bad-swap: cannot swap mode {0} with itself")]
    BadSwap(usize),

    #[error("bad-fusion-tree: {0}")]
    BadFusionTree(String),

    #[error("swap-on-antibit: slot {0} holds an anti-bit")]
    SwapOnAntibit(usize),

    #[error("not-pure: purity {0} differs from 1")]
    NotPure(f64),

    #[error("not-density: {0}")]
    NotDensity(String),

    #[error("not-normalized: norm {0} differs from 1")]
    NotNormalized(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state space too large: {0}")]
    TooLarge(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
