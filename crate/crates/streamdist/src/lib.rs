//! Streaming approximate pattern matching under Hamming and Lp distances.
//!
//! A pattern of length `n` is preprocessed once; text symbols then arrive one at a
//! time and every n-length window receives a (1±ε) estimate of its distance to the
//! pattern, using state sublinear in `n`.

pub mod config;
pub mod engine;
pub mod error;
pub mod hashing;
pub mod oracle;
pub mod par;
pub mod prefix;
pub mod sketch;

pub use config::{
    choose_block_length, moment_norm_convert, split_into_windows, AlignmentEstimate, Arm, Direction,
    ProblemConfig, SketchConstants, Symbol, TextWindow, DONT_CARE,
};
pub use engine::{Engine, StateSnapshot};
pub use error::{Error, Result};
pub use oracle::{all_alignments_exact, exact_hamming, exact_moment, DistanceVector};
pub use par::Execution;
