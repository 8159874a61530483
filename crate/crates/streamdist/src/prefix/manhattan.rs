//! Manhattan prefix encodings built on stochastic rounding.

use super::{
    build_levels, decode_levels, level_count, level_words, low_bits, pick_level, ByteReader, ByteWriter,
    LevelEstimate, PrefixLevel, SubsampleLevels,
};
use crate::config::{Symbol, DONT_CARE};
use crate::error::{Error, Result};

/// Rounding hash for words of length `len` over `sigma` symbols (keys `1..=len`).
pub fn manhattan_levels(seed: u64, len: usize, sigma: u32) -> SubsampleLevels {
    SubsampleLevels::new(seed, len as u64 + 1, level_count(len as u64 * sigma as u64).max(1))
}

/// `⌊(U[i] + (h(i + offset) mod 2^r)) / 2^r⌋` for every position (keys 1-based).
pub fn m_subsample(word: &[Symbol], r: u32, levels: &SubsampleLevels, offset: usize) -> Result<Vec<Symbol>> {
    levels.check_level(r)?;
    word.iter()
        .enumerate()
        .map(|(i, &s)| {
            let key = (i + 1 + offset) as u64;
            levels.check_key(key)?;
            Ok(levels.scale(s as u64, key, r) as Symbol)
        })
        .collect()
}

pub fn estimate_manhattan(u: &[Symbol], v: &[Symbol], k: u64, levels: &SubsampleLevels) -> Result<LevelEstimate> {
    estimate_manhattan_at(u, v, k, levels, 0)
}

/// Level estimator with hash keys shifted by `offset`.
pub fn estimate_manhattan_at(
    u: &[Symbol],
    v: &[Symbol],
    k: u64,
    levels: &SubsampleLevels,
    offset: usize,
) -> Result<LevelEstimate> {
    Ok(pick_level(&level_distances(u, v, levels, offset)?, k))
}

/// `X_r = ‖mSub_r(U) − mSub_r(V)‖₁` for every level.
pub fn level_distances(u: &[Symbol], v: &[Symbol], levels: &SubsampleLevels, offset: usize) -> Result<Vec<u64>> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    if let Some(i) = u.iter().chain(v).position(|&s| s == DONT_CARE) {
        return Err(Error::DontCare(i % u.len().max(1)));
    }
    let q = levels.max_level();
    let mut out = vec![0u64; q as usize + 1];
    for (i, (&a, &c)) in u.iter().zip(v).enumerate() {
        if a == c {
            continue;
        }
        let key = (i + 1 + offset) as u64;
        levels.check_key(key)?;
        let hv = levels.bits(key);
        for (r, x) in out.iter_mut().enumerate() {
            *x += rounded_gap(a, c, hv, r as u32);
        }
    }
    Ok(out)
}

#[inline]
fn rounded_gap(a: Symbol, c: Symbol, hv: u64, r: u32) -> u64 {
    let shift = hv & low_bits(r);
    (((a as u64 + shift) >> r) as i64 - ((c as u64 + shift) >> r) as i64).unsigned_abs()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManhattanPrefixEncoding {
    pub levels: Vec<PrefixLevel>,
    pub k: u64,
    pub block_len: usize,
    hash: SubsampleLevels,
}

/// Builds the encoding of `block` against `prefix` with synchronized rounding.
pub fn build_manhattan_prefix_encoding(
    block: &[Symbol],
    prefix: &[Symbol],
    k: u64,
    hash: &SubsampleLevels,
) -> Result<ManhattanPrefixEncoding> {
    if block.len() != prefix.len() || block.is_empty() {
        return Err(Error::LengthMismatch {
            left: block.len(),
            right: prefix.len(),
        });
    }
    if let Some(i) = block.iter().chain(prefix).position(|&s| s == DONT_CARE) {
        return Err(Error::DontCare(i % block.len()));
    }
    let b = block.len();
    hash.check_key(b as u64)?;
    let hv: Vec<u64> = (0..=b).map(|u| hash.bits(u as u64)).collect();
    let levels = build_levels(block, prefix, k, hash.max_level(), |r, u, a, c| rounded_gap(a, c, hv[u], r));
    Ok(ManhattanPrefixEncoding {
        levels,
        k,
        block_len: b,
        hash: *hash,
    })
}

/// Estimates the L1 distance of the block's j-suffix against `pattern[..j]`.
pub fn decode_manhattan_prefix(enc: &ManhattanPrefixEncoding, pattern: &[Symbol], j: usize) -> Result<LevelEstimate> {
    enc.decode(pattern, j)
}

impl ManhattanPrefixEncoding {
    pub fn hash(&self) -> &SubsampleLevels {
        &self.hash
    }

    pub fn decode(&self, pattern: &[Symbol], j: usize) -> Result<LevelEstimate> {
        let hash = &self.hash;
        decode_levels(&self.levels, self.block_len, self.k, pattern, j, |r, u, a, c| {
            rounded_gap(a, c, hash.bits(u as u64), r)
        })
    }

    pub fn stored_words(&self) -> usize {
        level_words(&self.levels)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::default();
        w.varint(self.block_len as u64);
        w.varint(self.k);
        w.varint(self.hash.seed());
        w.varint(self.hash.domain());
        w.varint(self.hash.max_level() as u64);
        w.levels(&self.levels);
        w.bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(bytes);
        let block_len = r.usize()?;
        let k = r.varint()?;
        let seed = r.varint()?;
        let domain = r.varint()?;
        let max_level = r.varint()? as u32;
        let levels = r.levels()?;
        r.finish()?;
        if levels.is_empty() || levels.len() > max_level as usize + 1 {
            return Err(Error::Malformed("level count".into()));
        }
        Ok(ManhattanPrefixEncoding {
            levels,
            k,
            block_len,
            hash: SubsampleLevels::new(seed, domain, max_level),
        })
    }
}
