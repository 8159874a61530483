//! Lp prefix encodings for 0 < p < 1: a randomized word morphism into run-length
//! Hamming space followed by run-length subsampling.

use std::sync::Arc;

use super::{
    build_levels, decode_levels, level_count, level_words, low_bits, pick_level, ByteReader, ByteWriter,
    LevelEstimate, PrefixLevel, SubsampleLevels,
};
use crate::config::Symbol;
use crate::error::{Error, Result};
use crate::hashing::{derive_seed, PolyHash};

const OFFSET_TAG: u64 = 0x0FF5;

/// Largest level table (entries) a codec may allocate.
pub const MAX_TABLE_ENTRIES: usize = 1 << 26;

/// Knobs of the morphism that are not part of the problem statement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiOptions {
    /// Leading constant of the repetition count.
    pub repetition_constant: f64,
    /// Upper limit on the repetition count.
    pub repetition_cap: usize,
    /// Longest word the morphism is applied to (sets the offset precision).
    pub max_word_len: usize,
}

impl Default for PhiOptions {
    fn default() -> Self {
        PhiOptions {
            repetition_constant: 8.0,
            repetition_cap: 256,
            max_word_len: 1 << 16,
        }
    }
}

/// One run whose symbol depends on the input character.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiRun {
    /// Run index within a character image.
    pub index: usize,
    pub len: u64,
    /// Maximal symbol intervals mapped to the same run symbol.
    pub classes: Vec<(Symbol, Symbol)>,
}

/// Parameters of the morphism.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiParams {
    /// Effective exponent (after the p = 1/2 substitution).
    pub p: f64,
    pub epsilon: f64,
    pub sigma: u32,
    /// Runs per repetition.
    pub q: usize,
    /// Repetitions actually used.
    pub s: usize,
    /// Repetition count before the cap.
    pub s_formula: f64,
    /// Runs per character, `s·q`.
    pub t: usize,
    /// Run lengths `d_0..d_{q−1}`.
    pub d: Vec<u64>,
    pub alpha: f64,
    /// Fractional bits of the offsets.
    pub precision_bits: u32,
    pub seed: u64,
    betas: Vec<f64>,
    offsets: Vec<f64>,
    runs: Vec<PhiRun>,
}

/// Exponent actually used for `p`: 1/2 is moved to `1/2 − log_σ(1+ε)`.
pub fn effective_exponent(p: f64, epsilon: f64, sigma: u32) -> f64 {
    if p == 0.5 {
        0.5 - (1.0 + epsilon).ln() / (sigma.max(2) as f64).ln()
    } else {
        p
    }
}

/// Morphism parameters for exponent `p`.
pub fn make_phi_params(p: f64, epsilon: f64, sigma: u32, seed: u64, opts: &PhiOptions) -> Result<PhiParams> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Config(format!("morphism exponent {p} outside (0,1)")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) || sigma == 0 {
        return Err(Error::Config("morphism needs 0 < ε < 1 and σ ≥ 1".into()));
    }
    let p = effective_exponent(p, epsilon, sigma);
    if p <= 0.0 {
        return Err(Error::Config(format!("ε too large for σ = {sigma} at p = 1/2")));
    }
    let growth = 1.0 + epsilon;
    let inv_eps = 1.0 / epsilon;
    let q = ((1.0 / (1.0 - p)) * ((sigma as f64) * inv_eps.powi(3)).ln() / growth.ln() - 1e-9)
        .ceil()
        .max(1.0) as usize;
    let s_formula = if p < 0.5 {
        opts.repetition_constant * inv_eps / (1.0 - 2.0 * p)
    } else {
        let g = (2.0 * p - 1.0) / (1.0 - p);
        opts.repetition_constant * (sigma as f64).powf(g) / epsilon.powf(1.0 + 3.0 * g)
    };
    let s = (s_formula.ceil().min(opts.repetition_cap as f64) as usize).max(1);
    let gp = growth.powf(p);
    let d: Vec<u64> = (0..q)
        .map(|i| {
            let v = if i == 0 { inv_eps * gp / (gp - 1.0) } else { inv_eps * growth.powf(p * i as f64) };
            v.floor() as u64
        })
        .collect();
    let alpha = 1.0 / (s as f64 * inv_eps * (gp / (gp - 1.0) + 1.0 / (growth.powf(1.0 - p) - 1.0)));
    let span = opts.max_word_len.max(1) as f64 * sigma as f64 * inv_eps;
    let precision_bits = ((span.log2().ceil() as u32) + 8).clamp(8, 60);
    let betas: Vec<f64> = (0..q).map(|i| growth.powf(-(i as f64))).collect();
    let scale = (precision_bits as f64).exp2();
    let offsets: Vec<f64> = (0..s)
        .flat_map(|rep| {
            let h = PolyHash::new(derive_seed(seed, OFFSET_TAG, rep as u64), q as u64, precision_bits);
            (0..q).map(move |i| h.bits(i as u64) as f64 / scale)
        })
        .collect();
    let mut params = PhiParams {
        p,
        epsilon,
        sigma,
        q,
        s,
        s_formula,
        t: s * q,
        d,
        alpha,
        precision_bits,
        seed,
        betas,
        offsets,
        runs: Vec::new(),
    };
    params.runs = (0..params.t)
        .filter_map(|w| {
            let classes = params.classes(w);
            (classes.len() > 1).then(|| PhiRun {
                index: w,
                len: params.run_len(w),
                classes,
            })
        })
        .collect();
    Ok(params)
}

impl PhiParams {
    /// Length of run `w`.
    #[inline]
    pub fn run_len(&self, w: usize) -> u64 {
        self.d[w % self.q]
    }

    /// Symbol of run `w` in the image of `c`.
    #[inline]
    pub fn run_symbol(&self, c: Symbol, w: usize) -> u64 {
        (c as f64 * self.betas[w % self.q] + self.offsets[w]).floor() as u64
    }

    fn classes(&self, w: usize) -> Vec<(Symbol, Symbol)> {
        let mut out = Vec::new();
        let mut lo = 1;
        for c in 2..=self.sigma {
            if self.run_symbol(c, w) != self.run_symbol(c - 1, w) {
                out.push((lo, c - 1));
                lo = c;
            }
        }
        out.push((lo, self.sigma));
        out
    }

    /// Runs whose symbol is not constant over the alphabet.
    pub fn varying_runs(&self) -> &[PhiRun] {
        &self.runs
    }

    /// Run-aligned Hamming distance between the images of `a` and `c`.
    pub fn symbol_distance(&self, a: Symbol, c: Symbol) -> u64 {
        if a == c {
            return 0;
        }
        self.runs
            .iter()
            .filter(|r| self.run_symbol(a, r.index) != self.run_symbol(c, r.index))
            .map(|r| r.len)
            .sum()
    }

    /// Hamming distance between the images of two equal-length words.
    pub fn word_distance(&self, u: &[Symbol], v: &[Symbol]) -> Result<u64> {
        if u.len() != v.len() {
            return Err(Error::LengthMismatch {
                left: u.len(),
                right: v.len(),
            });
        }
        Ok(u.iter().zip(v).map(|(&a, &c)| self.symbol_distance(a, c)).sum())
    }

    /// Total expanded length of one character image.
    pub fn image_len(&self) -> u64 {
        self.s as u64 * self.d.iter().sum::<u64>()
    }

    /// Monte-Carlo recalibration: `1 / mean(Ham(φ(a),φ(c)) / |a−c|^p)` over random pairs.
    pub fn recalibrated_alpha(&self, samples: usize, seed: u64) -> f64 {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        if self.sigma < 2 {
            return self.alpha;
        }
        let mut total = 0.0;
        for _ in 0..samples.max(1) {
            let a = rng.gen_range(1..=self.sigma);
            let mut c = rng.gen_range(1..=self.sigma);
            while c == a {
                c = rng.gen_range(1..=self.sigma);
            }
            total += self.symbol_distance(a, c) as f64 / ((a as f64 - c as f64).abs()).powf(self.p);
        }
        samples.max(1) as f64 / total
    }
}

/// A word stored as `(symbol, run length)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunLengthWord {
    pub runs: Vec<(u64, u64)>,
}

impl RunLengthWord {
    pub fn expanded_len(&self) -> u64 {
        self.runs.iter().map(|r| r.1).sum()
    }

    pub fn profile(&self) -> Vec<u64> {
        self.runs.iter().map(|r| r.1).collect()
    }

    /// Concatenation with another word.
    pub fn extend(&mut self, other: &RunLengthWord) {
        self.runs.extend_from_slice(&other.runs);
    }
}

/// Image of a single character.
pub fn phi_apply(c: Symbol, params: &PhiParams) -> RunLengthWord {
    RunLengthWord {
        runs: (0..params.t)
            .map(|w| (params.run_symbol(c, w), params.run_len(w)))
            .collect(),
    }
}

/// Image of a word (concatenated character images).
pub fn phi_apply_word(word: &[Symbol], params: &PhiParams) -> RunLengthWord {
    let mut out = RunLengthWord::default();
    for &c in word {
        out.extend(&phi_apply(c, params));
    }
    out
}

/// Level-r subsample; run i (0-based) is keyed by `i`.
pub fn rl_subsample(word: &RunLengthWord, r: u32, levels: &SubsampleLevels) -> Result<RunLengthWord> {
    levels.check_level(r)?;
    word.runs
        .iter()
        .enumerate()
        .map(|(i, &(sym, len))| {
            levels.check_key(i as u64)?;
            Ok((sym, levels.scale(len, i as u64, r)))
        })
        .collect::<Result<Vec<_>>>()
        .map(|runs| RunLengthWord { runs })
}

pub fn estimate_rl_hamming(s: &RunLengthWord, q: &RunLengthWord, k: u64, levels: &SubsampleLevels) -> Result<LevelEstimate> {
    estimate_rl_hamming_at(s, q, k, levels, 0)
}

/// Level estimator on compressed words with run keys shifted by `offset`.
pub fn estimate_rl_hamming_at(
    s: &RunLengthWord,
    q: &RunLengthWord,
    k: u64,
    levels: &SubsampleLevels,
    offset: usize,
) -> Result<LevelEstimate> {
    if s.runs.len() != q.runs.len() || s.runs.iter().zip(&q.runs).any(|(a, b)| a.1 != b.1) {
        return Err(Error::ProfileMismatch);
    }
    let top = levels.max_level();
    let mut x = vec![0u64; top as usize + 1];
    for (i, (a, c)) in s.runs.iter().zip(&q.runs).enumerate() {
        if a.0 == c.0 {
            continue;
        }
        let key = (i + offset) as u64;
        levels.check_key(key)?;
        for (r, xr) in x.iter_mut().enumerate() {
            *xr += levels.scale(a.1, key, r as u32);
        }
    }
    Ok(pick_level(&x, k))
}

/// Per-lane tables turning block/pattern symbol pairs into level distances.
#[derive(Clone, Debug)]
pub struct LpSmallCodec {
    params: Arc<PhiParams>,
    hash: SubsampleLevels,
    block_len: usize,
    /// `table[((r·b + u−1)·σ + a−1)·σ + c−1]`.
    table: Vec<u64>,
}

impl LpSmallCodec {
    /// Codec for blocks of length `block_len`; run `w` of block position `u` is keyed `(u−1)·t + w`.
    pub fn new(params: Arc<PhiParams>, block_len: usize, hash_seed: u64) -> Result<Self> {
        let image = (block_len as u64).saturating_mul(params.image_len());
        let levels = level_count(image).max(1);
        let sigma = params.sigma as usize;
        let entries = (levels as usize + 1) * block_len * sigma * sigma;
        if entries > MAX_TABLE_ENTRIES {
            return Err(Error::Config(format!(
                "level table of {entries} entries exceeds {MAX_TABLE_ENTRIES}; reduce σ or the block length"
            )));
        }
        let hash = SubsampleLevels::new(hash_seed, (block_len * params.t) as u64, levels);
        let table = level_table(&params, &hash, block_len);
        Ok(LpSmallCodec {
            params,
            hash,
            block_len,
            table,
        })
    }

    pub fn params(&self) -> &Arc<PhiParams> {
        &self.params
    }

    pub fn hash(&self) -> &SubsampleLevels {
        &self.hash
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn stored_words(&self) -> usize {
        self.table.len()
    }

    /// Level-r distance between the images of `a` (block position `u`) and `c`.
    #[inline]
    pub fn cost(&self, r: u32, u: usize, a: Symbol, c: Symbol) -> u64 {
        let sigma = self.params.sigma as usize;
        self.table[((r as usize * self.block_len + u - 1) * sigma + a as usize - 1) * sigma + c as usize - 1]
    }

    fn check(&self, block: &[Symbol], prefix: &[Symbol]) -> Result<()> {
        if block.len() != self.block_len || prefix.len() != self.block_len {
            return Err(Error::LengthMismatch {
                left: block.len(),
                right: prefix.len(),
            });
        }
        crate::config::validate_word(block, self.params.sigma, false)?;
        crate::config::validate_word(prefix, self.params.sigma, false)
    }

    pub fn build(&self, block: &[Symbol], prefix: &[Symbol], k: u64) -> Result<LpSmallPrefixEncoding> {
        self.check(block, prefix)?;
        let levels = build_levels(block, prefix, k, self.hash.max_level(), |r, u, a, c| self.cost(r, u, a, c));
        Ok(LpSmallPrefixEncoding {
            levels,
            k,
            block_len: self.block_len,
            params_seed: self.params.seed,
            hash_seed: self.hash.seed(),
        })
    }

    /// Moment estimate `alpha · 2^f · X_f` for query length `j`.
    pub fn decode(&self, enc: &LpSmallPrefixEncoding, pattern: &[Symbol], j: usize) -> Result<LevelEstimate> {
        if enc.params_seed != self.params.seed || enc.hash_seed != self.hash.seed() {
            return Err(Error::FamilyMismatch);
        }
        let mut est = decode_levels(&enc.levels, self.block_len, enc.k, pattern, j, |r, u, a, c| {
            self.cost(r, u, a, c)
        })?;
        est.estimate *= self.params.alpha;
        Ok(est)
    }
}

fn level_table(params: &PhiParams, hash: &SubsampleLevels, b: usize) -> Vec<u64> {
    let sigma = params.sigma as usize;
    let side = sigma + 1;
    let levels = hash.max_level() as usize + 1;
    let plane = side * side;
    let add_rects = |diff: &mut [i64], classes: &[(Symbol, Symbol)], v: i64| {
        for &(lo, hi) in classes {
            let (lo, hi) = (lo as usize - 1, hi as usize);
            diff[lo * side + lo] += v;
            diff[lo * side + hi] -= v;
            diff[hi * side + lo] -= v;
            diff[hi * side + hi] += v;
        }
    };
    let mut base_same = vec![0i64; levels * plane];
    let mut base_total = vec![0i64; levels];
    for run in params.varying_runs() {
        for r in 0..levels {
            let v = (run.len >> r) as i64;
            if v == 0 {
                break;
            }
            base_total[r] += v;
            add_rects(&mut base_same[r * plane..(r + 1) * plane], &run.classes, v);
        }
    }
    let carry_mask = low_bits(levels as u32) & !1;
    let mut table = vec![0u64; levels * b * sigma * sigma];
    for u in 1..=b {
        let mut same = base_same.clone();
        let mut total = base_total.clone();
        for run in params.varying_runs() {
            let hv = hash.bits(((u - 1) * params.t + run.index) as u64);
            let mut carry = ((run.len + hv) ^ run.len ^ hv) & carry_mask;
            while carry != 0 {
                let r = carry.trailing_zeros() as usize;
                total[r] += 1;
                add_rects(&mut same[r * plane..(r + 1) * plane], &run.classes, 1);
                carry &= carry - 1;
            }
        }
        for r in 0..levels {
            let diff = &mut same[r * plane..(r + 1) * plane];
            for a in 0..sigma {
                for c in 0..sigma {
                    let mut v = diff[a * side + c];
                    if a > 0 {
                        v += diff[(a - 1) * side + c];
                    }
                    if c > 0 {
                        v += diff[a * side + c - 1];
                    }
                    if a > 0 && c > 0 {
                        v -= diff[(a - 1) * side + c - 1];
                    }
                    diff[a * side + c] = v;
                    table[((r * b + u - 1) * sigma + a) * sigma + c] = (total[r] - v) as u64;
                }
            }
        }
    }
    table
}

/// Per-level matched lengths and symbol-level mismatch lists of one block.
#[derive(Clone, Debug, PartialEq)]
pub struct LpSmallPrefixEncoding {
    pub levels: Vec<PrefixLevel>,
    pub k: u64,
    pub block_len: usize,
    pub params_seed: u64,
    pub hash_seed: u64,
}

pub fn build_lp_small_prefix_encoding(
    block: &[Symbol],
    prefix: &[Symbol],
    codec: &LpSmallCodec,
    k: u64,
) -> Result<LpSmallPrefixEncoding> {
    codec.build(block, prefix, k)
}

pub fn decode_lp_small_prefix(
    codec: &LpSmallCodec,
    enc: &LpSmallPrefixEncoding,
    pattern: &[Symbol],
    j: usize,
) -> Result<LevelEstimate> {
    codec.decode(enc, pattern, j)
}

impl LpSmallPrefixEncoding {
    pub fn stored_words(&self) -> usize {
        level_words(&self.levels)
    }

    /// Serializes with a parameter header taken from `params`.
    pub fn to_bytes(&self, params: &PhiParams) -> Vec<u8> {
        let mut w = ByteWriter::default();
        w.f64(params.p);
        w.f64(params.epsilon);
        w.varint(params.sigma as u64);
        w.varint(params.q as u64);
        w.varint(params.s as u64);
        w.varint(self.params_seed);
        w.varint(self.hash_seed);
        w.varint(self.block_len as u64);
        w.varint(self.k);
        w.levels(&self.levels);
        w.bytes
    }

    /// Parses bytes written by [`to_bytes`](Self::to_bytes); the header must match `params`.
    pub fn from_bytes(bytes: &[u8], params: &PhiParams) -> Result<Self> {
        let mut r = ByteReader::new(bytes);
        let header = (r.f64()?, r.f64()?, r.varint()?, r.varint()?, r.varint()?);
        if header != (params.p, params.epsilon, params.sigma as u64, params.q as u64, params.s as u64) {
            return Err(Error::FamilyMismatch);
        }
        let params_seed = r.varint()?;
        let hash_seed = r.varint()?;
        let block_len = r.usize()?;
        let k = r.varint()?;
        let levels = r.levels()?;
        r.finish()?;
        Ok(LpSmallPrefixEncoding {
            levels,
            k,
            block_len,
            params_seed,
            hash_seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_params(p: f64, seed: u64) -> PhiParams {
        let opts = PhiOptions {
            repetition_cap: 4,
            ..PhiOptions::default()
        };
        make_phi_params(p, 0.5, 8, seed, &opts).unwrap()
    }

    #[test]
    fn first_run_length() {
        let eps: f64 = 0.5;
        let p = 0.5 - 1.5f64.ln() / 16f64.ln();
        let params = make_phi_params(0.5, eps, 16, 1, &PhiOptions::default()).unwrap();
        assert!((params.p - p).abs() < 1e-15);
        let gp = 1.5f64.powf(p);
        assert_eq!(params.d[0], (2.0 * gp / (gp - 1.0)).floor() as u64);
        assert_eq!(params.d[0], 14);
    }

    #[test]
    fn run_lengths_at_least_inverse_epsilon() {
        for p in [0.1, 0.25, 0.4, 0.6, 0.75, 0.9] {
            let params = make_phi_params(p, 0.25, 16, 3, &PhiOptions::default()).unwrap();
            assert!(params.d.iter().all(|&d| d >= 4), "p = {p}");
            assert_eq!(params.t, params.s * params.q);
            assert!(params.alpha > 0.0);
        }
        assert!(make_phi_params(1.0, 0.25, 16, 3, &PhiOptions::default()).is_err());
        assert!(make_phi_params(0.0, 0.25, 16, 3, &PhiOptions::default()).is_err());
    }

    #[test]
    fn images_share_profile() {
        let params = small_params(0.3, 9);
        let profile = phi_apply(1, &params).profile();
        for c in 2..=8 {
            assert_eq!(phi_apply(c, &params).profile(), profile);
        }
        assert_eq!(params.symbol_distance(5, 5), 0);
    }

    #[test]
    fn symbol_distance_matches_expanded_images() {
        let params = small_params(0.4, 2);
        for a in 1..=8 {
            for c in 1..=8 {
                let (x, y) = (phi_apply(a, &params), phi_apply(c, &params));
                let brute: u64 = x.runs.iter().zip(&y.runs).filter(|(l, r)| l.0 != r.0).map(|(l, _)| l.1).sum();
                assert_eq!(params.symbol_distance(a, c), brute);
            }
        }
    }

    #[test]
    fn subsample_formula() {
        let h = SubsampleLevels::new(1, 4, 5);
        let word = RunLengthWord {
            runs: vec![(1, 7), (2, 3), (1, 0), (5, 12)],
        };
        assert_eq!(rl_subsample(&word, 0, &h).unwrap(), word);
        let sub = rl_subsample(&word, 2, &h).unwrap();
        for (i, (orig, got)) in word.runs.iter().zip(&sub.runs).enumerate() {
            assert_eq!(got.1, (orig.1 + (h.bits(i as u64) & 3)) >> 2);
        }
        let bad = RunLengthWord { runs: vec![(1, 3)] };
        assert_eq!(estimate_rl_hamming(&word, &bad, 4, &h), Err(Error::ProfileMismatch));
    }

    #[test]
    fn table_matches_direct_subsampled_distance() {
        let params = Arc::new(small_params(0.35, 4));
        let b = 3;
        let codec = LpSmallCodec::new(params.clone(), b, 77).unwrap();
        for u in 1..=b {
            for a in 1..=8 {
                for c in 1..=8 {
                    let (x, y) = (phi_apply(a, &params), phi_apply(c, &params));
                    for r in [0u32, 1, 3, 7, codec.hash().max_level()] {
                        let direct: u64 = x
                            .runs
                            .iter()
                            .zip(&y.runs)
                            .enumerate()
                            .filter(|(_, (l, rr))| l.0 != rr.0)
                            .map(|(w, (l, _))| codec.hash().scale(l.1, ((u - 1) * params.t + w) as u64, r))
                            .sum();
                        assert_eq!(codec.cost(r, u, a, c), direct, "u {u} a {a} c {c} r {r}");
                    }
                }
            }
        }
    }

    #[test]
    fn decode_equals_direct_estimate() {
        let params = Arc::new(small_params(0.3, 8));
        let b = 6;
        let codec = LpSmallCodec::new(params.clone(), b, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let block: Vec<Symbol> = (0..b).map(|_| rng.gen_range(1..=8)).collect();
            let pattern: Vec<Symbol> = (0..2 * b).map(|_| rng.gen_range(1..=8)).collect();
            let k = 200;
            let enc = codec.build(&block, &pattern[..b], k).unwrap();
            for j in 1..=b {
                let dec = codec.decode(&enc, &pattern, j).unwrap();
                let s = phi_apply_word(&block[b - j..], &params);
                let q = phi_apply_word(&pattern[..j], &params);
                let direct = estimate_rl_hamming_at(&s, &q, k, codec.hash(), (b - j) * params.t).unwrap();
                if !direct.overflow {
                    assert_eq!(dec.level, direct.level);
                    assert_eq!(dec.estimate, direct.estimate * params.alpha);
                }
            }
        }
    }

    #[test]
    fn constant_block_decodes_to_zero() {
        let params = Arc::new(small_params(0.3, 3));
        let codec = LpSmallCodec::new(params, 5, 6).unwrap();
        let p: Vec<Symbol> = vec![3; 10];
        let enc = codec.build(&p[..5], &p[..5], 10).unwrap();
        for j in 1..=5 {
            assert_eq!(codec.decode(&enc, &p, j).unwrap().estimate, 0.0);
        }
    }

    #[test]
    fn embedding_tracks_moment_on_average() {
        let mut total = 0.0;
        let trials = 200;
        for seed in 0..trials {
            let params = make_phi_params(0.25, 0.25, 128, seed, &PhiOptions::default()).unwrap();
            total += params.alpha * params.symbol_distance(10, 74) as f64;
        }
        let mean = total / trials as f64;
        let truth = 64f64.powf(0.25);
        assert!((mean / truth - 1.0).abs() < 0.3, "mean {mean} truth {truth}");
    }

    #[test]
    fn serialization_round_trip() {
        let params = Arc::new(small_params(0.3, 3));
        let codec = LpSmallCodec::new(params.clone(), 4, 6).unwrap();
        let enc = codec.build(&[1, 2, 3, 4], &[4, 3, 2, 1], 30).unwrap();
        let bytes = enc.to_bytes(&params);
        assert_eq!(LpSmallPrefixEncoding::from_bytes(&bytes, &params).unwrap(), enc);
        let other = small_params(0.4, 3);
        assert!(LpSmallPrefixEncoding::from_bytes(&bytes, &other).is_err());
    }
}
