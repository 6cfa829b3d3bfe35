//! Correlation-aware cache-aided coded multicast.
//!
//! The pipeline for one delivery round:
//!
//! 1. [`library`]: a grouped, correlated library and its exact entropies.
//! 2. [`compressor`]: greedy split into I-files and P-files.
//! 3. [`placement`]: packetization and random fractional caching.
//! 4. [`delivery`]: conflict graph, greedy coloring, XOR codeword, decoding.
//!
//! [`baselines`] and [`bounds`] provide the correlation-unaware schemes and
//! the analytic lower/upper bounds; [`harness`] runs rate-memory sweeps.

pub mod baselines;
pub mod bounds;
pub mod compressor;
pub mod delivery;
pub mod error;
pub mod harness;
pub mod library;
pub mod placement;
pub mod seed;

pub use error::{Error, Result};
pub use library::{BitLibrary, FileId, GroupedLibrary};
