//! Hamming prefix encodings built on position subsampling.

use super::{
    build_levels, decode_levels, level_count, level_words, pick_level, ByteReader, ByteWriter, LevelEstimate,
    PrefixLevel, SubsampleLevels,
};
use crate::config::{Symbol, DONT_CARE};
use crate::error::{Error, Result};

/// Subsampling hash for words of length `len` (keys `1..=len`, ⌈3·log₂ len⌉ levels).
pub fn hamming_levels(seed: u64, len: usize) -> SubsampleLevels {
    SubsampleLevels::new(seed, len as u64 + 1, level_count(len as u64).max(1))
}

#[inline]
fn mismatch(a: Symbol, c: Symbol) -> bool {
    a != c && a != DONT_CARE && c != DONT_CARE
}

/// Level-r subsample: position i keeps its symbol iff it survives, otherwise DONT_CARE.
pub fn h_subsample(word: &[Symbol], r: u32, levels: &SubsampleLevels) -> Result<Vec<Symbol>> {
    levels.check_level(r)?;
    word.iter()
        .enumerate()
        .map(|(i, &s)| {
            let key = i as u64 + 1;
            levels.check_key(key)?;
            Ok(if levels.survives(key, r) { s } else { DONT_CARE })
        })
        .collect()
}

/// Level estimator over `(u, v)` with keys `1..=len`.
pub fn estimate_hamming(u: &[Symbol], v: &[Symbol], k: u64, levels: &SubsampleLevels) -> Result<LevelEstimate> {
    estimate_hamming_at(u, v, k, levels, 0)
}

/// Level estimator with hash keys shifted by `offset`.
pub fn estimate_hamming_at(
    u: &[Symbol],
    v: &[Symbol],
    k: u64,
    levels: &SubsampleLevels,
    offset: usize,
) -> Result<LevelEstimate> {
    Ok(pick_level(&level_distances(u, v, levels, offset)?, k))
}

/// `X_r` for every level r.
pub fn level_distances(u: &[Symbol], v: &[Symbol], levels: &SubsampleLevels, offset: usize) -> Result<Vec<u64>> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let q = levels.max_level() as usize;
    let mut hist = vec![0u64; q + 1];
    for (i, (&a, &c)) in u.iter().zip(v).enumerate() {
        if mismatch(a, c) {
            let key = (i + 1 + offset) as u64;
            levels.check_key(key)?;
            hist[levels.depth(key) as usize] += 1;
        }
    }
    for r in (0..q).rev() {
        hist[r] += hist[r + 1];
    }
    Ok(hist)
}

/// Per-level matched lengths and mismatch lists of one block.
#[derive(Clone, Debug, PartialEq)]
pub struct HammingPrefixEncoding {
    pub levels: Vec<PrefixLevel>,
    pub k: u64,
    pub block_len: usize,
    hash: SubsampleLevels,
}

fn check_inputs(block: &[Symbol], prefix: &[Symbol]) -> Result<()> {
    if block.len() != prefix.len() || block.is_empty() {
        return Err(Error::LengthMismatch {
            left: block.len(),
            right: prefix.len(),
        });
    }
    if let Some(i) = block.iter().chain(prefix).position(|&s| s == DONT_CARE) {
        return Err(Error::DontCare(i % block.len()));
    }
    Ok(())
}

/// Builds the encoding of `block` against `prefix` (both of length b).
pub fn build_hamming_prefix_encoding(
    block: &[Symbol],
    prefix: &[Symbol],
    k: u64,
    hash: &SubsampleLevels,
) -> Result<HammingPrefixEncoding> {
    check_inputs(block, prefix)?;
    let b = block.len();
    hash.check_key(b as u64)?;
    let depth: Vec<u32> = (0..=b).map(|u| hash.depth(u as u64)).collect();
    let levels = build_levels(block, prefix, k, hash.max_level(), |r, u, a, c| {
        (mismatch(a, c) && depth[u] >= r) as u64
    });
    Ok(HammingPrefixEncoding {
        levels,
        k,
        block_len: b,
        hash: *hash,
    })
}

/// Estimates the Hamming distance of the block's j-suffix against `pattern[..j]`.
pub fn decode_hamming_prefix(enc: &HammingPrefixEncoding, pattern: &[Symbol], j: usize) -> Result<LevelEstimate> {
    enc.decode(pattern, j)
}

impl HammingPrefixEncoding {
    pub fn hash(&self) -> &SubsampleLevels {
        &self.hash
    }

    pub fn decode(&self, pattern: &[Symbol], j: usize) -> Result<LevelEstimate> {
        let hash = &self.hash;
        decode_levels(&self.levels, self.block_len, self.k, pattern, j, |r, u, a, c| {
            (mismatch(a, c) && hash.survives(u as u64, r)) as u64
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
        Ok(HammingPrefixEncoding {
            levels,
            k,
            block_len,
            hash: SubsampleLevels::new(seed, domain, max_level),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_word(rng: &mut ChaCha8Rng, len: usize, sigma: u32) -> Vec<Symbol> {
        (0..len).map(|_| rng.gen_range(1..=sigma)).collect()
    }

    #[test]
    fn level_zero_keeps_everything() {
        let h = hamming_levels(3, 16);
        let w: Vec<Symbol> = (1..=16).collect();
        assert_eq!(h_subsample(&w, 0, &h).unwrap(), w);
        assert!(h_subsample(&w, h.max_level() + 1, &h).is_err());
    }

    #[test]
    fn survivors_are_nested() {
        let h = hamming_levels(11, 64);
        for key in 1..=64u64 {
            for r in 0..h.max_level() {
                assert!(!h.survives(key, r + 1) || h.survives(key, r));
            }
        }
    }

    #[test]
    fn under_threshold_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_word(&mut rng, 40, 4);
        let v = random_word(&mut rng, 40, 4);
        let h = hamming_levels(9, 40);
        let exact = crate::oracle::exact_hamming(&u, &v).unwrap();
        let est = estimate_hamming(&u, &v, 40, &h).unwrap();
        assert_eq!((est.level, est.estimate, est.overflow), (0, exact as f64, false));
        assert_eq!(estimate_hamming(&u, &u, 0, &h).unwrap().estimate, 0.0);
    }

    #[test]
    fn identical_block_matches_everywhere() {
        let p: Vec<Symbol> = vec![2, 3, 1, 4, 4, 1, 2, 3];
        let enc = build_hamming_prefix_encoding(&p, &p, 2, &hamming_levels(5, 8)).unwrap();
        for level in &enc.levels {
            assert_eq!(level.j_star, 8);
            assert!(level.mismatches.is_empty());
        }
    }

    #[test]
    fn last_symbol_mismatch() {
        let p: Vec<Symbol> = vec![1, 2, 3, 4];
        let mut block = p.clone();
        block[3] = 1;
        let enc = build_hamming_prefix_encoding(&block, &p, 1, &hamming_levels(5, 4)).unwrap();
        assert_eq!(enc.levels[0].j_star, 4);
        assert_eq!(enc.levels[0].mismatches.len(), 1);
        assert_eq!(enc.levels[0].mismatches.entries[0].index, 4);
    }

    #[test]
    fn j_star_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for seed in 0..20 {
            let block = random_word(&mut rng, 64, 2);
            let prefix = random_word(&mut rng, 64, 2);
            let h = hamming_levels(seed, 64);
            let enc = build_hamming_prefix_encoding(&block, &prefix, 8, &h).unwrap();
            let brute = (1..=64)
                .rev()
                .find(|&j| crate::oracle::exact_hamming(&block[64 - j..], &prefix[..j]).unwrap() <= 8)
                .unwrap_or(0);
            assert_eq!(enc.levels[0].j_star, brute);
        }
    }

    #[test]
    fn decode_equals_direct_estimate() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for seed in 0..10 {
            let b = 48;
            let block = random_word(&mut rng, b, 3);
            let pattern = random_word(&mut rng, 2 * b, 3);
            let h = hamming_levels(seed, b);
            let enc = build_hamming_prefix_encoding(&block, &pattern[..b], 4, &h).unwrap();
            for j in 1..=b {
                let dec = enc.decode(&pattern, j).unwrap();
                let direct = estimate_hamming_at(&block[b - j..], &pattern[..j], 4, &h, b - j).unwrap();
                if !direct.overflow {
                    assert_eq!(dec, direct, "seed {seed} j {j}");
                }
            }
        }
    }

    #[test]
    fn serialization_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let block = random_word(&mut rng, 32, 4);
        let prefix = random_word(&mut rng, 32, 4);
        let enc = build_hamming_prefix_encoding(&block, &prefix, 6, &hamming_levels(1, 32)).unwrap();
        let back = HammingPrefixEncoding::from_bytes(&enc.to_bytes()).unwrap();
        assert_eq!(back, enc);
        assert!(HammingPrefixEncoding::from_bytes(&enc.to_bytes()[..5]).is_err());
    }
}
