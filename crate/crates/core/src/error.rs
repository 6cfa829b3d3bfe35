use thiserror::Error;

use crate::library::FileId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid library: {0}")]
    InvalidLibrary(String),

    #[error("file {0} is outside the library")]
    UnknownFile(FileId),

    #[error("empty file subset")]
    EmptySubset,

    #[error("a file cannot be compared with itself ({0})")]
    SameFile(FileId),

    #[error("file {0} is not in the active set")]
    NotActive(FileId),

    #[error("packet length {b_units} does not divide the compressed size of file {file}")]
    NotDivisible { file: FileId, b_units: u64 },

    #[error("invalid caching distribution: {0}")]
    InvalidDistribution(String),

    #[error("infeasible placement: {0}")]
    Infeasible(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("at most {max} receivers are supported, got {got}")]
    TooManyReceivers { max: usize, got: usize },

    #[error("improper coloring: vertices {0} and {1} conflict but share a color")]
    ImproperColoring(usize, usize),

    #[error("receiver {receiver} is missing side information for packet {packet}")]
    MissingSideInformation { receiver: usize, packet: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("decode failure in trial (master seed {master_seed}, M {memory}, trial {trial}): {reason}")]
    TrialDecode { master_seed: u64, memory: f64, trial: usize, reason: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}
