use crate::config::Symbol;
use crate::error::{Error, Result};
use crate::hashing::{derive_seed, PolyHash, RangeSummableHash};

const ROW_TAG: u64 = 0x5160;
const ALPHA_TAG: u64 = 0xA1FA;

/// Integer sketch vector tagged with the family that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSketch {
    pub values: Vec<i64>,
    pub family: u64,
}

impl LinearSketch {
    pub fn zero(dim: usize, family: u64) -> Self {
        LinearSketch {
            values: vec![0; dim],
            family,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    fn check(&self, other: &LinearSketch) -> Result<()> {
        if self.family != other.family || self.values.len() != other.values.len() {
            Err(Error::FamilyMismatch)
        } else {
            Ok(())
        }
    }

    /// `self += coeff · other`.
    pub fn add_scaled(&mut self, other: &LinearSketch, coeff: i64) -> Result<()> {
        self.check(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += coeff * b;
        }
        Ok(())
    }

    /// `‖self − other‖²`.
    pub fn squared_distance(&self, other: &LinearSketch) -> Result<f64> {
        self.check(other)?;
        Ok(squared_gap(&self.values, &other.values))
    }

    pub fn squared_norm(&self) -> f64 {
        self.values.iter().map(|&v| (v as i128 * v as i128) as f64).sum()
    }

    /// Family, dimension, then little-endian values.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 8 * self.values.len());
        out.extend_from_slice(&self.family.to_le_bytes());
        out.extend_from_slice(&(self.values.len() as u64).to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let word = |i: usize| -> Result<[u8; 8]> {
            bytes
                .get(8 * i..8 * i + 8)
                .map(|c| c.try_into().expect("8 bytes"))
                .ok_or_else(|| Error::Malformed("truncated sketch".into()))
        };
        let family = u64::from_le_bytes(word(0)?);
        let dim = u64::from_le_bytes(word(1)?) as usize;
        if bytes.len() != 16 + 8 * dim {
            return Err(Error::Malformed("sketch length".into()));
        }
        let values = (0..dim).map(|i| word(2 + i).map(i64::from_le_bytes)).collect::<Result<_>>()?;
        Ok(LinearSketch { values, family })
    }
}

/// `‖a − b‖²` of two integer vectors.
#[inline]
pub(crate) fn squared_gap(a: &[i64], b: &[i64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let g = (x - y) as i128;
            (g * g) as f64
        })
        .sum()
}

/// Source of the ±1 matrix entries.
#[derive(Clone, Debug)]
pub enum SignSource {
    Poly(PolyHash),
    RangeSum(RangeSummableHash),
}

impl SignSource {
    #[inline]
    pub fn sign(&self, x: u64) -> i64 {
        match self {
            SignSource::Poly(h) => h.sign(x),
            SignSource::RangeSum(h) => h.range_sum_unchecked(x, x + 1),
        }
    }

    /// `Σ_{lo ≤ x < hi} sign(x)`.
    #[inline]
    pub fn range(&self, lo: u64, hi: u64) -> i64 {
        match self {
            SignSource::Poly(h) => (lo..hi).map(|x| h.sign(x)).sum(),
            SignSource::RangeSum(h) => h.range_sum_unchecked(lo, hi),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            SignSource::Poly(h) => h.seed(),
            SignSource::RangeSum(h) => h.seed(),
        }
    }

    pub fn stored_words(&self) -> usize {
        match self {
            SignSource::Poly(_) => 5,
            SignSource::RangeSum(h) => h.stored_words(),
        }
    }
}

/// ±1 projection of blocks of `width` coordinates; entry (row, k) = sign(row·width + k).
#[derive(Clone, Debug)]
pub struct EuclideanSketcher {
    dim: usize,
    width: usize,
    signs: SignSource,
    alphas: PolyHash,
    family: u64,
}

impl EuclideanSketcher {
    /// Polynomial-hash entries; `max_blocks` bounds the block index used for α.
    pub fn new(seed: u64, dim: usize, width: usize, max_blocks: usize) -> Self {
        let domain = (dim * width) as u64;
        let signs = SignSource::Poly(PolyHash::new(derive_seed(seed, ROW_TAG, 0), domain, 1));
        Self::with_signs(seed, dim, width, max_blocks, signs)
    }

    pub fn with_signs(seed: u64, dim: usize, width: usize, max_blocks: usize, signs: SignSource) -> Self {
        EuclideanSketcher {
            dim,
            width,
            signs,
            alphas: PolyHash::new(derive_seed(seed, ALPHA_TAG, 0), max_blocks.max(1) as u64, 1),
            family: seed,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn family(&self) -> u64 {
        self.family
    }

    pub fn signs(&self) -> &SignSource {
        &self.signs
    }

    #[inline]
    pub fn entry(&self, row: usize, k: usize) -> i64 {
        self.signs.sign((row * self.width + k) as u64)
    }

    /// α coefficient of the block at offset `m` from the sketched string's start.
    #[inline]
    pub fn alpha(&self, m: usize) -> i64 {
        self.alphas.sign(m as u64)
    }

    /// `R·x` for one block, zero-padded to `width`.
    pub fn e_sketch_block(&self, x: &[i64]) -> Result<LinearSketch> {
        if x.len() > self.width {
            return Err(Error::IndexOutOfRange {
                index: x.len(),
                low: 0,
                high: self.width,
            });
        }
        let mut sk = LinearSketch::zero(self.dim, self.family);
        for (k, &v) in x.iter().enumerate().filter(|(_, &v)| v != 0) {
            for (row, out) in sk.values.iter_mut().enumerate() {
                *out += v * self.entry(row, k);
            }
        }
        Ok(sk)
    }

    /// Block-structured sketch of an arbitrary-length vector from its own start.
    pub fn e_sketch(&self, x: &[i64]) -> Result<LinearSketch> {
        let blocks: Vec<LinearSketch> = x
            .chunks(self.width)
            .map(|c| self.e_sketch_block(c))
            .collect::<Result<_>>()?;
        let alphas: Vec<i64> = (0..blocks.len()).map(|m| self.alpha(m)).collect();
        if blocks.is_empty() {
            return Ok(LinearSketch::zero(self.dim, self.family));
        }
        combine_blocks(&blocks, &alphas)
    }

    /// Squared-norm estimate `‖Δ‖² / d`.
    pub fn estimate(&self, a: &LinearSketch, b: &LinearSketch) -> Result<f64> {
        Ok(a.squared_distance(b)? / self.dim as f64)
    }
}

/// `Σ α_i · sketch_i`.
pub fn combine_blocks(sketches: &[LinearSketch], alphas: &[i64]) -> Result<LinearSketch> {
    let first = sketches
        .first()
        .ok_or_else(|| Error::Config("no sketches to combine".into()))?;
    if alphas.len() != sketches.len() {
        return Err(Error::LengthMismatch {
            left: sketches.len(),
            right: alphas.len(),
        });
    }
    let mut out = LinearSketch::zero(first.dim(), first.family);
    for (sk, &a) in sketches.iter().zip(alphas) {
        out.add_scaled(sk, a)?;
    }
    Ok(out)
}

/// Per-symbol columns of a block sketch.
pub trait BlockColumns {
    fn dim(&self) -> usize;
    fn block_len(&self) -> usize;
    fn sigma(&self) -> u32;
    fn family(&self) -> u64;
    fn alpha(&self, m: usize) -> i64;
    /// Multiplier turning `‖Δ‖²` into a distance estimate.
    fn norm_scale(&self) -> f64;
    /// `values += coeff · column(offset, symbol)`.
    fn add_symbol(&self, values: &mut [i64], offset: usize, symbol: Symbol, coeff: i64);
    fn stored_words(&self) -> usize;

    fn column(&self, offset: usize, symbol: Symbol) -> Vec<i64> {
        let mut out = vec![0; self.dim()];
        self.add_symbol(&mut out, offset, symbol, 1);
        out
    }

    /// Sketch of a word of length ≤ b placed at block offsets `0..`.
    fn block_sketch(&self, word: &[Symbol]) -> LinearSketch {
        let mut sk = LinearSketch::zero(self.dim(), self.family());
        for (u, &s) in word.iter().enumerate() {
            self.add_symbol(&mut sk.values, u, s, 1);
        }
        sk
    }

    /// Sketch of a word of any length, block-aligned from its own start.
    fn word_sketch(&self, word: &[Symbol]) -> LinearSketch {
        let mut sk = LinearSketch::zero(self.dim(), self.family());
        for (i, &s) in word.iter().enumerate() {
            let b = self.block_len();
            self.add_symbol(&mut sk.values, i % b, s, self.alpha(i / b));
        }
        sk
    }

    /// Distance estimate between two sketches.
    fn estimate(&self, a: &LinearSketch, b: &LinearSketch) -> Result<f64> {
        Ok(self.norm_scale() * a.squared_distance(b)?)
    }

    fn check_offset(&self, offset: usize, symbol: Symbol) -> Result<()> {
        if offset >= self.block_len() {
            return Err(Error::IndexOutOfRange {
                index: offset,
                low: 0,
                high: self.block_len() - 1,
            });
        }
        if symbol == 0 || symbol > self.sigma() {
            return Err(Error::SymbolOutOfRange {
                symbol,
                sigma: self.sigma(),
            });
        }
        Ok(())
    }
}

/// One-hot (μ) expansion: symbol a at offset u is coordinate u·σ + a − 1.
#[derive(Clone, Debug)]
pub struct HammingSketcher {
    inner: EuclideanSketcher,
    block_len: usize,
    sigma: u32,
}

impl HammingSketcher {
    pub fn new(seed: u64, dim: usize, block_len: usize, sigma: u32, max_blocks: usize) -> Self {
        HammingSketcher {
            inner: EuclideanSketcher::new(seed, dim, block_len * sigma as usize, max_blocks),
            block_len,
            sigma,
        }
    }

    /// Underlying Euclidean sketcher over width `b·σ`.
    pub fn euclidean(&self) -> &EuclideanSketcher {
        &self.inner
    }

    /// Checked single-symbol update.
    pub fn hamming_update(&self, sk: &mut LinearSketch, offset: usize, symbol: Symbol, alpha: i64) -> Result<()> {
        self.check_offset(offset, symbol)?;
        if sk.family != self.family() || sk.dim() != self.dim() {
            return Err(Error::FamilyMismatch);
        }
        self.add_symbol(&mut sk.values, offset, symbol, alpha);
        Ok(())
    }
}

impl BlockColumns for HammingSketcher {
    fn dim(&self) -> usize {
        self.inner.dim
    }
    fn block_len(&self) -> usize {
        self.block_len
    }
    fn sigma(&self) -> u32 {
        self.sigma
    }
    fn family(&self) -> u64 {
        self.inner.family
    }
    fn alpha(&self, m: usize) -> i64 {
        self.inner.alpha(m)
    }
    fn norm_scale(&self) -> f64 {
        1.0 / (2.0 * self.inner.dim as f64)
    }
    #[inline]
    fn add_symbol(&self, values: &mut [i64], offset: usize, symbol: Symbol, coeff: i64) {
        let k = offset * self.sigma as usize + symbol as usize - 1;
        for (row, v) in values.iter_mut().enumerate() {
            *v += coeff * self.inner.entry(row, k);
        }
    }
    fn stored_words(&self) -> usize {
        self.inner.signs.stored_words() + 5
    }
}

/// Unary (ν) expansion: symbol v at offset u covers coordinates `u·σ .. u·σ + v`.
#[derive(Clone, Debug)]
pub struct ManhattanSketcher {
    inner: EuclideanSketcher,
    block_len: usize,
    sigma: u32,
}

impl ManhattanSketcher {
    pub fn new(seed: u64, dim: usize, block_len: usize, sigma: u32, max_blocks: usize) -> Self {
        let width = block_len * sigma as usize;
        let signs = SignSource::RangeSum(RangeSummableHash::new(derive_seed(seed, ROW_TAG, 1), (dim * width) as u64));
        ManhattanSketcher {
            inner: EuclideanSketcher::with_signs(seed, dim, width, max_blocks, signs),
            block_len,
            sigma,
        }
    }

    pub fn euclidean(&self) -> &EuclideanSketcher {
        &self.inner
    }

    /// Explicit ν expansion of a block.
    pub fn unary_expand(&self, word: &[Symbol]) -> Vec<i64> {
        let s = self.sigma as usize;
        let mut out = vec![0; word.len() * s];
        for (u, &v) in word.iter().enumerate() {
            for x in &mut out[u * s..u * s + v as usize] {
                *x = 1;
            }
        }
        out
    }

    /// Checked single-symbol update through range sums.
    pub fn manhattan_update(&self, sk: &mut LinearSketch, offset: usize, symbol: Symbol, alpha: i64) -> Result<()> {
        self.check_offset(offset, symbol)?;
        if sk.family != self.family() || sk.dim() != self.dim() {
            return Err(Error::FamilyMismatch);
        }
        self.add_symbol(&mut sk.values, offset, symbol, alpha);
        Ok(())
    }
}

impl BlockColumns for ManhattanSketcher {
    fn dim(&self) -> usize {
        self.inner.dim
    }
    fn block_len(&self) -> usize {
        self.block_len
    }
    fn sigma(&self) -> u32 {
        self.sigma
    }
    fn family(&self) -> u64 {
        self.inner.family
    }
    fn alpha(&self, m: usize) -> i64 {
        self.inner.alpha(m)
    }
    fn norm_scale(&self) -> f64 {
        1.0 / self.inner.dim as f64
    }
    #[inline]
    fn add_symbol(&self, values: &mut [i64], offset: usize, symbol: Symbol, coeff: i64) {
        let width = self.inner.width as u64;
        let base = (offset * self.sigma as usize) as u64;
        for (row, v) in values.iter_mut().enumerate() {
            let lo = row as u64 * width + base;
            *v += coeff * self.inner.signs.range(lo, lo + symbol as u64);
        }
    }
    fn stored_words(&self) -> usize {
        self.inner.signs.stored_words() + 5
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_input_and_linearity() {
        let e = EuclideanSketcher::new(4, 16, 8, 4);
        assert_eq!(e.e_sketch_block(&[0; 8]).unwrap().squared_norm(), 0.0);
        let x = [1, -2, 3, 0, 5, 1, 1, 2];
        let y = [4, 4, -1, 2, 0, 0, 3, 1];
        let sum: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let mut lhs = e.e_sketch_block(&x).unwrap();
        lhs.add_scaled(&e.e_sketch_block(&y).unwrap(), 1).unwrap();
        assert_eq!(lhs, e.e_sketch_block(&sum).unwrap());
        assert!(e.e_sketch_block(&[0; 9]).is_err());
    }

    #[test]
    fn combining_equal_blocks_cancels() {
        let e = EuclideanSketcher::new(1, 12, 4, 4);
        let s = e.e_sketch_block(&[1, 2, 3, 4]).unwrap();
        assert_eq!(combine_blocks(&[s.clone()], &[1]).unwrap(), s);
        assert_eq!(combine_blocks(&[s.clone(), s.clone()], &[1, -1]).unwrap().squared_norm(), 0.0);
        let other = EuclideanSketcher::new(2, 12, 4, 4).e_sketch_block(&[1, 2, 3, 4]).unwrap();
        assert_eq!(combine_blocks(&[s, other], &[1, 1]), Err(Error::FamilyMismatch));
    }

    #[test]
    fn update_then_revert() {
        let h = HammingSketcher::new(3, 20, 4, 5, 4);
        let mut sk = h.block_sketch(&[1, 2, 3, 4]);
        let orig = sk.clone();
        h.hamming_update(&mut sk, 2, 5, 1).unwrap();
        h.hamming_update(&mut sk, 2, 5, -1).unwrap();
        assert_eq!(sk, orig);
        assert!(h.hamming_update(&mut sk, 4, 1, 1).is_err());
        assert!(h.hamming_update(&mut sk, 0, 6, 1).is_err());
    }

    #[test]
    fn hamming_equals_one_hot_euclidean() {
        let h = HammingSketcher::new(7, 24, 5, 2, 4);
        let word = [1, 2, 2, 1, 2, 1, 1, 2, 2];
        let expanded: Vec<i64> = word.iter().flat_map(|&s| if s == 1 { [1, 0] } else { [0, 1] }).collect();
        assert_eq!(h.word_sketch(&word), h.euclidean().e_sketch(&expanded).unwrap());
    }

    #[test]
    fn manhattan_update_equals_unary_expansion() {
        let m = ManhattanSketcher::new(5, 8, 4, 4, 2);
        for offset in 0..4 {
            for symbol in 1..=4 {
                let mut sk = LinearSketch::zero(8, m.family());
                m.manhattan_update(&mut sk, offset, symbol, 1).unwrap();
                let mut word = vec![0i64; 16];
                for x in &mut word[offset * 4..offset * 4 + symbol as usize] {
                    *x = 1;
                }
                assert_eq!(sk, m.euclidean().e_sketch_block(&word).unwrap());
            }
        }
    }

    #[test]
    fn serialization_round_trip() {
        let e = EuclideanSketcher::new(4, 6, 3, 2);
        let s = e.e_sketch_block(&[3, -1, 2]).unwrap();
        assert_eq!(LinearSketch::from_bytes(&s.to_bytes()).unwrap(), s);
        assert!(LinearSketch::from_bytes(&s.to_bytes()[..20]).is_err());
    }
}
