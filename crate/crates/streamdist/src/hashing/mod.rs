//! Seeded randomness: polynomial hash families, range-summable ±1 hashing and p-stable draws.

mod poly;
mod pstable;
mod range_sum;

pub use poly::{FieldPrime, PolyHash};
pub use pstable::{
    calibrate_abs_median, pstable_variate, PStableSampler, CALIBRATION_SAMPLES, MIN_CALIBRATION_SAMPLES,
};
pub use range_sum::{RangeBackend, RangeSummableHash, PREFIX_TABLE_LIMIT};

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent-looking sub-seed for `(tag, index)` under `master`.
pub fn derive_seed(master: u64, tag: u64, index: u64) -> u64 {
    mix64(mix64(master ^ mix64(tag)).wrapping_add(mix64(index.wrapping_mul(0xD6E8_FEB8_6659_FD93))))
}
