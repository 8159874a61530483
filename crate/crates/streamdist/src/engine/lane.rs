//! One independent estimator lane.

use std::collections::VecDeque;
use std::sync::Arc;

use super::suffix::{LinearFamily, LinearSide, StableSide};
use crate::config::{Arm, ProblemConfig, Symbol};
use crate::error::Result;
use crate::hashing::derive_seed;
use crate::par::Execution;
use crate::prefix::hamming::{build_hamming_prefix_encoding, HammingPrefixEncoding};
use crate::prefix::lp_large::{LandmarkCodec, LandmarkEncoding};
use crate::prefix::lp_small::{make_phi_params, LpSmallCodec, LpSmallPrefixEncoding, PhiOptions};
use crate::prefix::manhattan::{build_manhattan_prefix_encoding, ManhattanPrefixEncoding};
use crate::prefix::{level_count, SubsampleLevels};
use crate::sketch::{DrawTable, HammingSketcher, ManhattanSketcher, PStableSketcher};

const PREFIX_TAG: u64 = 0x9E_F1;
const PHI_TAG: u64 = 0x9E_F2;
const SUFFIX_TAG: u64 = 0x5F_F1;

/// Read-only data shared by all lanes.
#[derive(Clone, Debug)]
pub(crate) struct Shared {
    pub pattern: Vec<Symbol>,
    pub n: usize,
    pub b: usize,
    pub k: u64,
}

#[derive(Clone, Debug)]
pub(crate) enum PrefixCodec {
    Hamming(SubsampleLevels),
    Manhattan(SubsampleLevels),
    LpSmall(LpSmallCodec),
    LpLarge(LandmarkCodec),
}

#[derive(Clone, Debug)]
pub(crate) enum Encoding {
    Hamming(HammingPrefixEncoding),
    Manhattan(ManhattanPrefixEncoding),
    LpSmall(LpSmallPrefixEncoding),
    LpLarge(LandmarkEncoding),
}

impl Encoding {
    fn stored_words(&self) -> usize {
        match self {
            Encoding::Hamming(e) => e.stored_words(),
            Encoding::Manhattan(e) => e.stored_words(),
            Encoding::LpSmall(e) => e.stored_words(),
            Encoding::LpLarge(e) => e.stored_words(),
        }
    }
}

impl PrefixCodec {
    fn new(cfg: &ProblemConfig, lane_seed: u64, exec: Execution) -> Result<Self> {
        let (n, b, sigma) = (cfg.n, cfg.block_len(), cfg.sigma);
        let seed = derive_seed(lane_seed, PREFIX_TAG, 0);
        let eps = cfg.inner_epsilon();
        Ok(match cfg.arm() {
            Arm::Hamming => PrefixCodec::Hamming(SubsampleLevels::new(seed, b as u64 + 1, level_count(n as u64).max(1))),
            Arm::Manhattan => PrefixCodec::Manhattan(SubsampleLevels::new(
                seed,
                b as u64 + 1,
                level_count(n as u64 * sigma as u64).max(1),
            )),
            Arm::LpSmall => {
                let opts = PhiOptions {
                    repetition_constant: cfg.constants.phi_repetitions,
                    repetition_cap: cfg.constants.phi_repetition_cap,
                    max_word_len: n,
                };
                let params = make_phi_params(cfg.p, eps, sigma, derive_seed(lane_seed, PHI_TAG, 0), &opts)?;
                PrefixCodec::LpSmall(LpSmallCodec::new(Arc::new(params), b, seed)?)
            }
            Arm::LpLarge => PrefixCodec::LpLarge(LandmarkCodec::new(cfg.p, eps, sigma, b, seed, &cfg.constants, exec)?),
        })
    }

    fn build(&self, block: &[Symbol], prefix: &[Symbol], k: u64) -> Result<Encoding> {
        Ok(match self {
            PrefixCodec::Hamming(h) => Encoding::Hamming(build_hamming_prefix_encoding(block, prefix, k, h)?),
            PrefixCodec::Manhattan(h) => Encoding::Manhattan(build_manhattan_prefix_encoding(block, prefix, k, h)?),
            PrefixCodec::LpSmall(c) => Encoding::LpSmall(c.build(block, prefix, k)?),
            PrefixCodec::LpLarge(c) => Encoding::LpLarge(c.build(block, prefix)?),
        })
    }

    /// Moment estimate for the block suffix of length `jlen` against `P[1..jlen]`.
    fn decode(&self, enc: &Encoding, pattern: &[Symbol], jlen: usize, b: usize) -> Result<f64> {
        Ok(match (self, enc) {
            (PrefixCodec::Hamming(_), Encoding::Hamming(e)) => e.decode(pattern, jlen)?.estimate,
            (PrefixCodec::Manhattan(_), Encoding::Manhattan(e)) => e.decode(pattern, jlen)?.estimate,
            (PrefixCodec::LpSmall(c), Encoding::LpSmall(e)) => c.decode(e, pattern, jlen)?.estimate,
            (PrefixCodec::LpLarge(c), Encoding::LpLarge(e)) => c.decode(e, pattern, b - jlen + 1)?.estimate,
            _ => return Err(crate::error::Error::FamilyMismatch),
        })
    }

    fn stored_words(&self) -> usize {
        match self {
            PrefixCodec::Hamming(_) | PrefixCodec::Manhattan(_) => 6,
            PrefixCodec::LpSmall(c) => c.stored_words(),
            PrefixCodec::LpLarge(c) => c.stored_words(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum SuffixSide {
    Linear(LinearSide),
    Stable(StableSide),
}

/// Stored words by category.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WordCounts {
    pub ring_sketches: usize,
    pub encodings: usize,
    pub buffers: usize,
    pub bank: usize,
    pub seeds: usize,
    pub tables: usize,
}

impl WordCounts {
    pub fn total(&self) -> usize {
        self.ring_sketches + self.encodings + self.buffers + self.bank + self.seeds + self.tables
    }

    pub(crate) fn add(&mut self, o: &WordCounts) {
        self.ring_sketches += o.ring_sketches;
        self.encodings += o.encodings;
        self.buffers += o.buffers;
        self.bank += o.bank;
        self.seeds += o.seeds;
        self.tables += o.tables;
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Lane {
    pub codec: PrefixCodec,
    pub encodings: VecDeque<(usize, Encoding, usize)>,
    pub suffix: SuffixSide,
    pub buffer: Vec<Symbol>,
    pub position: usize,
    pub peak: WordCounts,
    pub work: u64,
    pub failures: u64,
    /// Prefix and suffix parts of the most recent emission.
    pub last_parts: Option<(f64, f64)>,
}

/// Window geometry of the alignment ending at `i`.
#[inline]
pub(crate) fn boundary(i: usize, n: usize, b: usize) -> (usize, usize, usize) {
    let s = i + 1 - n;
    let kblk = (s - 1) / b + 1;
    (kblk, kblk * b + 1 - s, kblk * b + 1)
}

impl Lane {
    pub fn new(cfg: &ProblemConfig, shared: &Shared, lane_seed: u64, exec: Execution) -> Result<Self> {
        let (n, b, sigma) = (shared.n, shared.b, cfg.sigma);
        let codec = PrefixCodec::new(cfg, lane_seed, exec)?;
        let seed = derive_seed(lane_seed, SUFFIX_TAG, 0);
        let max_blocks = n.div_ceil(b) + 1;
        let suffix = match cfg.arm() {
            Arm::Hamming => SuffixSide::Linear(LinearSide::new(
                LinearFamily::Hamming(HammingSketcher::new(seed, cfg.linear_dim(), b, sigma, max_blocks)),
                &shared.pattern,
            )),
            Arm::Manhattan => SuffixSide::Linear(LinearSide::new(
                LinearFamily::Manhattan(ManhattanSketcher::new(seed, cfg.linear_dim(), b, sigma, max_blocks)),
                &shared.pattern,
            )),
            Arm::LpSmall | Arm::LpLarge => {
                let sketcher = PStableSketcher::new(cfg.p, seed, cfg.pstable_dim())?;
                let draws = DrawTable::new(&sketcher, n, exec);
                SuffixSide::Stable(StableSide::new(sketcher, draws, &shared.pattern, b))
            }
        };
        let mut lane = Lane {
            codec,
            encodings: VecDeque::new(),
            suffix,
            buffer: Vec::with_capacity(b),
            position: 0,
            peak: WordCounts::default(),
            work: 0,
            failures: 0,
            last_parts: None,
        };
        lane.prepare_block(shared, 1);
        lane.peak = lane.words();
        Ok(lane)
    }

    /// Boundaries used by the alignments that end inside block `index`.
    fn prepare_block(&mut self, shared: &Shared, index: usize) {
        if let SuffixSide::Linear(side) = &mut self.suffix {
            let (n, b) = (shared.n, shared.b);
            let first = ((index - 1) * b + 1).max(n);
            let last = index * b;
            let mut kblks: Vec<usize> = Vec::with_capacity(2);
            if first <= last {
                for i in [first, last] {
                    let k = boundary(i, n, b).0;
                    if !kblks.contains(&k) {
                        kblks.push(k);
                    }
                }
            }
            self.work += (kblks.len() * side.ring.len() * side.dim()) as u64;
            side.prepare(index, &kblks);
        }
    }

    /// Consumes text position `position + 1`; returns the lane estimate when a window ends here.
    pub fn step(&mut self, shared: &Shared, symbol: Symbol) -> Result<Option<f64>> {
        let (n, b) = (shared.n, shared.b);
        self.position += 1;
        let i = self.position;
        let offset = (i - 1) % b;
        let current = (i - 1) / b + 1;
        self.buffer.push(symbol);
        match &mut self.suffix {
            SuffixSide::Linear(side) => {
                side.push(offset, symbol);
                self.work += side.dim() as u64;
            }
            SuffixSide::Stable(side) => {
                side.push(i, symbol, b);
                self.work += side.sketch_words() as u64;
            }
        }
        let block_done = i % b == 0;
        if block_done {
            let enc = self.codec.build(&self.buffer, &shared.pattern[..b], shared.k)?;
            let words = enc.stored_words();
            self.encodings.push_back((current, enc, words));
            self.work += (b * b) as u64;
        }
        let out = if i >= n { Some(self.emit(shared, i, current)?) } else { None };
        let counts = self.words();
        self.peak = max_counts(self.peak, counts);
        if block_done {
            self.buffer.clear();
            if let SuffixSide::Linear(side) = &mut self.suffix {
                side.complete_block(current);
            }
            self.prepare_block(shared, current + 1);
        }
        let next = i + 1;
        if next >= n {
            let (kblk, _, c) = boundary(next, n, b);
            while self.encodings.front().is_some_and(|e| e.0 < kblk) {
                self.encodings.pop_front();
            }
            match &mut self.suffix {
                SuffixSide::Linear(side) => side.evict(kblk),
                SuffixSide::Stable(side) => side.evict(c),
            }
        }
        Ok(out)
    }

    fn emit(&mut self, shared: &Shared, i: usize, current: usize) -> Result<f64> {
        let (n, b) = (shared.n, shared.b);
        let (kblk, jlen, c) = boundary(i, n, b);
        let prefix = match self.encodings.iter().find(|e| e.0 == kblk) {
            Some((_, enc, _)) => self.codec.decode(enc, &shared.pattern, jlen, b)?,
            None => {
                self.failures += 1;
                0.0
            }
        };
        self.work += jlen as u64;
        let suffix = if c > i {
            Some(0.0)
        } else {
            match &self.suffix {
                SuffixSide::Linear(side) => {
                    self.work += side.dim() as u64;
                    side.estimate(kblk, current, jlen)
                }
                SuffixSide::Stable(side) => {
                    self.work += side.sketcher.dim() as u64;
                    side.estimate(c, jlen)
                }
            }
        };
        let suffix = suffix.unwrap_or_else(|| {
            self.failures += 1;
            0.0
        });
        self.last_parts = Some((prefix, suffix));
        Ok(prefix + suffix)
    }

    pub fn words(&self) -> WordCounts {
        let (ring_sketches, bank, tables) = match &self.suffix {
            SuffixSide::Linear(side) => (side.sketch_words(), side.bank_words(), 0),
            SuffixSide::Stable(side) => (side.sketch_words(), side.bank_words(), side.draws.stored_words()),
        };
        let seeds = match &self.suffix {
            SuffixSide::Linear(side) => side.family.columns().stored_words(),
            SuffixSide::Stable(_) => 3,
        };
        WordCounts {
            ring_sketches,
            encodings: self.encodings.iter().map(|e| e.2).sum(),
            buffers: self.buffer.capacity() + 1,
            bank,
            seeds: seeds + 6,
            tables: tables + self.codec.stored_words().saturating_sub(6),
        }
    }
}

fn max_counts(peak: WordCounts, now: WordCounts) -> WordCounts {
    if now.total() > peak.total() {
        now
    } else {
        peak
    }
}

impl Lane {
    /// Retained encodings or block sketches, whichever is larger.
    pub fn ring_len(&self) -> usize {
        let blocks = match &self.suffix {
            SuffixSide::Linear(side) => side.ring.len(),
            SuffixSide::Stable(side) => side.instances.len(),
        };
        blocks.max(self.encodings.len())
    }
}
