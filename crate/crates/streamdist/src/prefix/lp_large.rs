//! Lp prefix encodings for 1 < p ≤ 2: landmark positions of geometrically growing
//! moment, border blocks of small moment, and p-stable snapshots of block suffixes.

use super::{ByteReader, ByteWriter};
use crate::config::{inverse_square_count, validate_word, SketchConstants, Symbol};
use crate::error::{Error, Result};
use crate::oracle::symbol_moment;
use crate::par::Execution;
use crate::sketch::pstable::median_abs_gap;
use crate::sketch::{DrawTable, PStableSketch, PStableSketcher};

/// `(|‖X+Y‖ₚᵖ − ‖X‖ₚᵖ|, ‖Y‖ₚᵖ + ‖Y‖ₚ·‖X‖ₚ^{p−1})`.
pub fn holder_perturbation_bound(x: &[f64], y: &[f64], p: f64) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let moment = |v: &mut dyn Iterator<Item = f64>| v.map(|a| a.abs().powf(p)).sum::<f64>();
    let sum_m = moment(&mut x.iter().zip(y).map(|(a, b)| a + b));
    let x_m = moment(&mut x.iter().copied());
    let y_m = moment(&mut y.iter().copied());
    let lhs = (sum_m - x_m).abs();
    let rhs = y_m + y_m.powf(1.0 / p) * x_m.powf((p - 1.0) / p);
    Ok((lhs, rhs))
}

/// Dimension of the snapshot sketches: `⌈c / (C·ε/p)²⌉`, capped.
pub fn landmark_dim(p: f64, epsilon: f64, constants: &SketchConstants) -> usize {
    inverse_square_count(constants.pstable_dim, constants.landmark_accuracy * epsilon / p).min(constants.landmark_dim_cap)
}

/// Number of moment scales minus one: `⌈log₂(b·σ^p)⌉`.
pub fn scale_count(block_len: usize, sigma: u32, p: f64) -> usize {
    ((block_len as f64 * (sigma as f64).powf(p)).log2() - 1e-9).ceil().max(0.0) as usize
}

/// Per-lane sketch generator shared by all blocks.
#[derive(Clone, Debug)]
pub struct LandmarkCodec {
    p: f64,
    epsilon: f64,
    sigma: u32,
    block_len: usize,
    sketcher: PStableSketcher,
    draws: DrawTable,
}

/// Landmarks, borders and suffix snapshots of one block.
#[derive(Clone, Debug, PartialEq)]
pub struct LandmarkEncoding {
    pub block_len: usize,
    pub p: f64,
    pub epsilon: f64,
    /// `q_k` for k = 0..=K; `b + 1` denotes the empty suffix.
    pub q_list: Vec<usize>,
    /// Half-open border lists `q_k = q_k^0 < … < q_k^ℓ = b + 1`.
    pub borders: Vec<Vec<usize>>,
    /// Block symbol at each border except the last.
    pub symbols: Vec<Vec<Symbol>>,
    /// Sketch of `B[x..b]` for every border x ≤ b, sorted by x.
    pub snapshots: Vec<(usize, PStableSketch)>,
}

/// Decoded moment with its two parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LandmarkEstimate {
    pub estimate: f64,
    pub scale: usize,
    /// Estimate of the part covered by the border block.
    pub head: f64,
    /// Sketch estimate of the remainder.
    pub tail: f64,
    pub head_exact: bool,
}

fn moment_of(block: &[Symbol], pattern: &[Symbol], p: f64) -> f64 {
    block.iter().zip(pattern).map(|(&a, &c)| symbol_moment(a, c, p)).sum()
}

impl LandmarkCodec {
    pub fn new(
        p: f64,
        epsilon: f64,
        sigma: u32,
        block_len: usize,
        seed: u64,
        constants: &SketchConstants,
        exec: Execution,
    ) -> Result<Self> {
        if !(p > 1.0 && p <= 2.0) {
            return Err(Error::Config(format!("landmark encodings need 1 < p ≤ 2, got {p}")));
        }
        let sketcher = PStableSketcher::new(p, seed, landmark_dim(p, epsilon, constants))?;
        let draws = DrawTable::new(&sketcher, block_len, exec);
        Ok(LandmarkCodec {
            p,
            epsilon,
            sigma,
            block_len,
            sketcher,
            draws,
        })
    }

    pub fn dim(&self) -> usize {
        self.sketcher.dim()
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn sketcher(&self) -> &PStableSketcher {
        &self.sketcher
    }

    pub fn stored_words(&self) -> usize {
        self.draws.stored_words()
    }

    pub fn build(&self, block: &[Symbol], prefix: &[Symbol]) -> Result<LandmarkEncoding> {
        let b = self.block_len;
        if block.len() != b || prefix.len() != b {
            return Err(Error::LengthMismatch {
                left: block.len(),
                right: prefix.len(),
            });
        }
        validate_word(block, self.sigma, false)?;
        validate_word(prefix, self.sigma, false)?;
        let p = self.p;
        // moments[x] for x = 1..=b+1
        let mut moments = vec![0.0; b + 2];
        for x in 1..=b {
            moments[x] = moment_of(&block[x - 1..], prefix, p);
        }
        let top = scale_count(b, self.sigma, p);
        let q_list: Vec<usize> = (0..=top)
            .map(|k| {
                let bound = (k as f64).exp2();
                (1..=b + 1).find(|&x| moments[x] <= bound).expect("empty suffix qualifies")
            })
            .collect();
        let slack = self.epsilon.powf(p);
        let mut borders = Vec::with_capacity(q_list.len());
        let mut symbols = Vec::with_capacity(q_list.len());
        for (k, &qk) in q_list.iter().enumerate() {
            let bound = slack * (k as f64).exp2();
            let mut list = vec![qk];
            let mut syms = Vec::new();
            let mut start = qk;
            while start <= b {
                syms.push(block[start - 1]);
                let mut end = start + 1;
                let mut acc = symbol_moment(block[start - 1], prefix[start - qk], p);
                while end <= b {
                    let next = acc + symbol_moment(block[end - 1], prefix[end - qk], p);
                    if next > bound {
                        break;
                    }
                    acc = next;
                    end += 1;
                }
                list.push(end);
                start = end;
            }
            borders.push(list);
            symbols.push(syms);
        }
        let mut wanted: Vec<usize> = borders.iter().flatten().copied().filter(|&x| x <= b).collect();
        wanted.sort_unstable();
        wanted.dedup();
        let mut snapshots = Vec::with_capacity(wanted.len());
        let mut acc = self.sketcher.zero();
        let mut next = wanted.len();
        for pos in (1..=b).rev() {
            self.draws.add(&mut acc.values, pos - 1, block[pos - 1] as f64);
            if next > 0 && wanted[next - 1] == pos {
                let mut snap = acc.clone();
                snap.len = b - pos + 1;
                snapshots.push((pos, snap));
                next -= 1;
            }
        }
        snapshots.reverse();
        Ok(LandmarkEncoding {
            block_len: b,
            p,
            epsilon: self.epsilon,
            q_list,
            borders,
            symbols,
            snapshots,
        })
    }

    /// Moment of `B[j..b]` against `pattern[..b−j+1]`, for start index `j ∈ 1..=b`.
    pub fn decode(&self, enc: &LandmarkEncoding, pattern: &[Symbol], j: usize) -> Result<LandmarkEstimate> {
        let b = self.block_len;
        if j == 0 || j > b {
            return Err(Error::IndexOutOfRange {
                index: j,
                low: 1,
                high: b,
            });
        }
        if pattern.len() < b || enc.block_len != b {
            return Err(Error::LengthMismatch {
                left: pattern.len(),
                right: b,
            });
        }
        let p = self.p;
        let k = enc
            .q_list
            .iter()
            .position(|&q| q <= j)
            .ok_or_else(|| Error::Malformed("no landmark covers the query".into()))?;
        let qk = enc.q_list[k];
        let list = &enc.borders[k];
        let i = list.partition_point(|&x| x <= j) - 1;
        let (lo, hi) = (list[i], list[i + 1]);
        let (head, head_exact, tail_from) = if lo == j && hi > lo + 1 {
            (0.0, false, j)
        } else if hi == lo + 1 {
            (symbol_moment(enc.symbols[k][i], pattern[0], p), true, hi)
        } else {
            let len = hi - j;
            let tilde = &pattern[j - qk..j - qk + len];
            (moment_of(&pattern[..len], tilde, p), false, hi)
        };
        let tail = if tail_from > b {
            0.0
        } else {
            let snap = enc
                .snapshots
                .binary_search_by_key(&tail_from, |s| s.0)
                .map(|idx| &enc.snapshots[idx].1)
                .map_err(|_| Error::Malformed("missing snapshot".into()))?;
            let mut side = vec![0.0; self.dim()];
            for pos in (tail_from..=b).rev() {
                self.draws.add(&mut side, pos - 1, pattern[pos - j] as f64);
            }
            (median_abs_gap(&snap.values, &side) / self.sketcher.abs_median()).powf(p)
        };
        Ok(LandmarkEstimate {
            estimate: head + tail,
            scale: k,
            head,
            tail,
            head_exact,
        })
    }
}

pub fn build_landmark_encoding(block: &[Symbol], prefix: &[Symbol], codec: &LandmarkCodec) -> Result<LandmarkEncoding> {
    codec.build(block, prefix)
}

pub fn decode_landmark(codec: &LandmarkCodec, enc: &LandmarkEncoding, pattern: &[Symbol], j: usize) -> Result<LandmarkEstimate> {
    codec.decode(enc, pattern, j)
}

impl LandmarkEncoding {
    /// Largest border count ℓ_k over all scales.
    pub fn max_blocks(&self) -> usize {
        self.borders.iter().map(|l| l.len() - 1).max().unwrap_or(0)
    }

    pub fn stored_words(&self) -> usize {
        let lists: usize = self.borders.iter().map(|l| 2 * l.len()).sum();
        let sketches: usize = self.snapshots.iter().map(|s| s.1.dim() + 1).sum();
        3 + self.q_list.len() + lists + sketches
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::default();
        w.varint(self.block_len as u64);
        w.f64(self.p);
        w.f64(self.epsilon);
        w.varint(self.q_list.len() as u64);
        for &q in &self.q_list {
            w.varint(q as u64);
        }
        for (list, syms) in self.borders.iter().zip(&self.symbols) {
            w.varint(list.len() as u64);
            for &x in list {
                w.varint(x as u64);
            }
            for &s in syms {
                w.varint(s as u64);
            }
        }
        w.varint(self.snapshots.len() as u64);
        for (x, sk) in &self.snapshots {
            w.varint(*x as u64);
            let blob = sk.to_bytes();
            w.varint(blob.len() as u64);
            w.bytes.extend_from_slice(&blob);
        }
        w.bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(bytes);
        let block_len = r.usize()?;
        let p = r.f64()?;
        let epsilon = r.f64()?;
        let scales = r.usize()?;
        if scales > 4096 {
            return Err(Error::Malformed("too many scales".into()));
        }
        let q_list = (0..scales).map(|_| r.usize()).collect::<Result<Vec<_>>>()?;
        let mut borders = Vec::with_capacity(scales);
        let mut symbols = Vec::with_capacity(scales);
        for _ in 0..scales {
            let len = r.usize()?;
            if len == 0 || len > block_len + 1 {
                return Err(Error::Malformed("border list".into()));
            }
            borders.push((0..len).map(|_| r.usize()).collect::<Result<Vec<_>>>()?);
            symbols.push((0..len - 1).map(|_| r.symbol()).collect::<Result<Vec<_>>>()?);
        }
        let count = r.usize()?;
        if count > block_len {
            return Err(Error::Malformed("snapshot count".into()));
        }
        let mut snapshots = Vec::with_capacity(count);
        for _ in 0..count {
            let x = r.usize()?;
            let len = r.usize()?;
            let blob = r.take(len)?;
            snapshots.push((x, PStableSketch::from_bytes(blob)?));
        }
        r.finish()?;
        Ok(LandmarkEncoding {
            block_len,
            p,
            epsilon,
            q_list,
            borders,
            symbols,
            snapshots,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn codec(p: f64, b: usize, seed: u64) -> LandmarkCodec {
        let constants = SketchConstants {
            landmark_dim_cap: 256,
            ..SketchConstants::default()
        };
        LandmarkCodec::new(p, 0.25, 4, b, seed, &constants, Execution::Sequential).unwrap()
    }

    #[test]
    fn holder_edge_cases() {
        let x = [1.0, -2.0, 0.5];
        assert_eq!(holder_perturbation_bound(&x, &[0.0; 3], 1.5).unwrap().0, 0.0);
        let (lhs, rhs) = holder_perturbation_bound(&[0.0; 3], &x, 1.5).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn identical_block_has_one_landmark() {
        let c = codec(1.5, 8, 1);
        let word: Vec<Symbol> = vec![2; 8];
        let enc = c.build(&word, &word).unwrap();
        assert!(enc.q_list.iter().all(|&q| q == 1));
        assert!(enc.borders.iter().all(|l| l == &vec![1, 9]));
    }

    #[test]
    fn landmarks_are_leftmost_and_borders_rightmost() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = 16;
        let c = codec(1.5, b, 2);
        for _ in 0..20 {
            let block: Vec<Symbol> = (0..b).map(|_| rng.gen_range(1..=4)).collect();
            let prefix: Vec<Symbol> = (0..b).map(|_| rng.gen_range(1..=4)).collect();
            let enc = c.build(&block, &prefix).unwrap();
            let m = |x: usize| if x > b { 0.0 } else { moment_of(&block[x - 1..], &prefix, 1.5) };
            for (k, &q) in enc.q_list.iter().enumerate() {
                let bound = (k as f64).exp2();
                assert!(m(q) <= bound);
                assert!((1..q).all(|x| m(x) > bound));
                let slack = 0.25f64.powf(1.5) * bound;
                for w in enc.borders[k].windows(2) {
                    let block_m = moment_of(&block[w[0] - 1..w[1] - 1], &prefix[w[0] - q..], 1.5);
                    assert!(w[1] == w[0] + 1 || block_m <= slack);
                    if w[1] <= b {
                        let longer = moment_of(&block[w[0] - 1..w[1]], &prefix[w[0] - q..], 1.5);
                        assert!(longer > slack);
                    }
                }
            }
        }
    }

    #[test]
    fn exact_parts_when_tail_empty() {
        let b = 6;
        let c = codec(2.0, b, 5);
        let block: Vec<Symbol> = vec![1, 1, 1, 1, 1, 4];
        let prefix: Vec<Symbol> = vec![1, 1, 1, 1, 1, 1];
        let enc = c.build(&block, &prefix).unwrap();
        let est = c.decode(&enc, &prefix, 6).unwrap();
        assert_eq!(est.estimate, 9.0);
        assert!(est.head_exact);
        assert!(c.decode(&enc, &prefix, 0).is_err());
    }

    #[test]
    fn serialization_round_trip() {
        let c = codec(1.25, 8, 3);
        let block: Vec<Symbol> = vec![1, 2, 3, 4, 4, 3, 2, 1];
        let prefix: Vec<Symbol> = vec![2, 2, 3, 1, 4, 4, 1, 1];
        let enc = c.build(&block, &prefix).unwrap();
        assert_eq!(LandmarkEncoding::from_bytes(&enc.to_bytes()).unwrap(), enc);
    }
}
