//! Linear suffix sketches of block-aligned words.

pub mod linear;
pub mod pstable;

pub use linear::{
    combine_blocks, BlockColumns, EuclideanSketcher, HammingSketcher, LinearSketch, ManhattanSketcher, SignSource,
};
pub use pstable::{pstable_estimate, DrawTable, PStableSketch, PStableSketcher};
