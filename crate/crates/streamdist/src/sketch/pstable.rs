use crate::config::{median_in_place, Symbol};
use crate::error::{Error, Result};
use crate::hashing::PStableSampler;
use crate::par::Execution;

const ROW_BITS: u32 = 24;

/// Sketch entry i = Σ_j draw(i, j)·x_j.
#[derive(Clone, Debug, PartialEq)]
pub struct PStableSketch {
    pub values: Vec<f64>,
    pub seed: u64,
    /// Number of coordinates fed so far.
    pub len: usize,
}

impl PStableSketch {
    pub fn zero(dim: usize, seed: u64) -> Self {
        PStableSketch {
            values: vec![0.0; dim],
            seed,
            len: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Tag, p-independent header (seed, dim, len), then little-endian values.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(24 + 8 * self.values.len());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&(self.values.len() as u64).to_le_bytes());
        out.extend_from_slice(&(self.len as u64).to_le_bytes());
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
        let seed = u64::from_le_bytes(word(0)?);
        let dim = u64::from_le_bytes(word(1)?) as usize;
        let len = u64::from_le_bytes(word(2)?) as usize;
        if bytes.len() != 24 + 8 * dim {
            return Err(Error::Malformed("sketch length".into()));
        }
        let values = (0..dim).map(|i| word(3 + i).map(f64::from_le_bytes)).collect::<Result<_>>()?;
        Ok(PStableSketch { values, seed, len })
    }
}

/// Norm estimate `median_i |a_i − b_i| / abs_median`.
pub fn pstable_estimate(a: &PStableSketch, b: &PStableSketch, abs_median: f64) -> Result<f64> {
    if a.seed != b.seed || a.dim() != b.dim() {
        return Err(Error::FamilyMismatch);
    }
    Ok(median_abs_gap(&a.values, &b.values) / abs_median)
}

pub(crate) fn median_abs_gap(a: &[f64], b: &[f64]) -> f64 {
    let mut gaps: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect();
    median_in_place(&mut gaps)
}

/// Generator of `dim`-row p-stable sketches.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PStableSketcher {
    sampler: PStableSampler,
    dim: usize,
}

impl PStableSketcher {
    pub fn new(p: f64, seed: u64, dim: usize) -> Result<Self> {
        Ok(Self::with_sampler(PStableSampler::new(p, seed)?, dim))
    }

    /// # Panics
    /// If `dim` exceeds 2^24.
    pub fn with_sampler(sampler: PStableSampler, dim: usize) -> Self {
        assert!(dim <= 1 << ROW_BITS, "sketch dimension too large");
        PStableSketcher { sampler, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> f64 {
        self.sampler.p()
    }

    pub fn seed(&self) -> u64 {
        self.sampler.seed()
    }

    pub fn abs_median(&self) -> f64 {
        self.sampler.abs_median()
    }

    /// Matrix entry at (row, position).
    #[inline]
    pub fn draw(&self, row: usize, position: usize) -> f64 {
        self.sampler.draw(((position as u64) << ROW_BITS) | row as u64)
    }

    pub fn zero(&self) -> PStableSketch {
        PStableSketch::zero(self.dim, self.seed())
    }

    /// Adds `delta · column(position)`.
    pub fn pstable_update(&self, sk: &mut PStableSketch, position: usize, delta: f64) -> Result<()> {
        if sk.seed != self.seed() || sk.dim() != self.dim {
            return Err(Error::FamilyMismatch);
        }
        for (row, v) in sk.values.iter_mut().enumerate() {
            *v += delta * self.draw(row, position);
        }
        sk.len = sk.len.max(position + 1);
        Ok(())
    }

    pub fn sketch(&self, x: &[f64]) -> PStableSketch {
        let mut sk = self.zero();
        for (j, &v) in x.iter().enumerate() {
            if v != 0.0 {
                for (row, out) in sk.values.iter_mut().enumerate() {
                    *out += v * self.draw(row, j);
                }
            }
        }
        sk.len = x.len();
        sk
    }

    pub fn sketch_word(&self, word: &[Symbol]) -> PStableSketch {
        let x: Vec<f64> = word.iter().map(|&s| s as f64).collect();
        self.sketch(&x)
    }

    /// Norm estimate.
    pub fn estimate(&self, a: &PStableSketch, b: &PStableSketch) -> Result<f64> {
        pstable_estimate(a, b, self.abs_median())
    }

    /// Moment estimate (norm^p).
    pub fn estimate_moment(&self, a: &PStableSketch, b: &PStableSketch) -> Result<f64> {
        Ok(self.estimate(a, b)?.powf(self.p()))
    }
}

/// Memoized draws for positions `0..len`, stored position-major.
#[derive(Clone, Debug)]
pub struct DrawTable {
    dim: usize,
    len: usize,
    values: Vec<f64>,
}

impl DrawTable {
    pub fn new(sketcher: &PStableSketcher, len: usize, exec: Execution) -> Self {
        let dim = sketcher.dim();
        let mut values = vec![0.0; dim * len];
        if dim > 0 {
            exec.fill_chunks(&mut values, dim, |pos, col| {
                for (row, v) in col.iter_mut().enumerate() {
                    *v = sketcher.draw(row, pos);
                }
            });
        }
        DrawTable { dim, len, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn column(&self, position: usize) -> &[f64] {
        &self.values[position * self.dim..(position + 1) * self.dim]
    }

    /// `values += coeff · column(position)`.
    #[inline]
    pub fn add(&self, values: &mut [f64], position: usize, coeff: f64) {
        for (v, d) in values.iter_mut().zip(self.column(position)) {
            *v += coeff * d;
        }
    }

    pub fn stored_words(&self) -> usize {
        self.values.len()
    }
}
