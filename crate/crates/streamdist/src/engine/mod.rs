//! Streaming combiner: per-block prefix encodings plus block-aligned suffix sketches.

mod lane;
mod suffix;

use crate::config::{median_in_place, validate_word, AlignmentEstimate, ProblemConfig, Symbol};
use crate::error::{Error, Result};
use crate::hashing::derive_seed;
use crate::par::Execution;

use lane::{Lane, Shared};
pub use lane::WordCounts;

const LANE_TAG: u64 = 0x1A_4E;

/// Instrumentation totals across all lanes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StateSnapshot {
    pub ring_sketches: usize,
    pub encodings: usize,
    pub buffers: usize,
    pub bank: usize,
    pub seeds: usize,
    pub tables: usize,
    /// Sum of the categories above.
    pub total: usize,
    /// Largest `total` seen so far (sum of per-lane peaks).
    pub peak_total: usize,
    pub work_units: u64,
    pub characters: u64,
    pub lookup_failures: u64,
}

impl StateSnapshot {
    /// Work units per processed character.
    pub fn work_per_character(&self) -> f64 {
        if self.characters == 0 {
            0.0
        } else {
            self.work_units as f64 / self.characters as f64
        }
    }
}

/// Streaming estimator of the distance between a pattern and every text window.
#[derive(Clone, Debug)]
pub struct Engine {
    cfg: ProblemConfig,
    shared: Shared,
    lanes: Vec<Lane>,
    position: usize,
    scratch: Vec<f64>,
}

impl Engine {
    /// Preprocesses the pattern: one bank and codec per lane.
    pub fn new(pattern: &[Symbol], cfg: &ProblemConfig) -> Result<Self> {
        cfg.validate()?;
        if pattern.len() != cfg.n {
            return Err(Error::LengthMismatch {
                left: pattern.len(),
                right: cfg.n,
            });
        }
        validate_word(pattern, cfg.sigma, false)?;
        let b = cfg.block_len();
        let shared = Shared {
            pattern: pattern.to_vec(),
            n: cfg.n,
            b,
            k: cfg.threshold() as u64,
        };
        let exec = cfg.execution;
        let lanes = exec
            .map_range(cfg.repetitions, |r| {
                Lane::new(cfg, &shared, derive_seed(cfg.seed, LANE_TAG, r as u64), Execution::Sequential)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(Engine {
            cfg: cfg.clone(),
            shared,
            lanes,
            position: 0,
            scratch: Vec::with_capacity(cfg.repetitions),
        })
    }

    pub fn config(&self) -> &ProblemConfig {
        &self.cfg
    }

    pub fn block_len(&self) -> usize {
        self.shared.b
    }

    /// Number of characters consumed.
    pub fn position(&self) -> usize {
        self.position
    }

    fn check_symbol(&self, symbol: Symbol) -> Result<()> {
        validate_word(&[symbol], self.cfg.sigma, false)
    }

    /// Consumes one text symbol; returns the estimate for the window ending here once `position ≥ n`.
    pub fn process_character(&mut self, symbol: Symbol) -> Result<Option<AlignmentEstimate>> {
        self.check_symbol(symbol)?;
        let shared = &self.shared;
        let outs = self
            .cfg
            .execution
            .map_mut(&mut self.lanes, |lane| lane.step(shared, symbol));
        self.position += 1;
        self.scratch.clear();
        for out in outs {
            if let Some(v) = out? {
                self.scratch.push(v);
            }
        }
        if self.scratch.is_empty() {
            return Ok(None);
        }
        let est = median_in_place(&mut self.scratch);
        Ok(Some(AlignmentEstimate::new(self.position, est, self.cfg.p)))
    }

    /// Consumes a whole text chunk, running lanes independently, and returns estimates in stream order.
    pub fn process_text(&mut self, text: &[Symbol]) -> Result<Vec<AlignmentEstimate>> {
        validate_word(text, self.cfg.sigma, false)?;
        let shared = &self.shared;
        let per_lane = self.cfg.execution.map_mut(&mut self.lanes, |lane| {
            let mut out = Vec::with_capacity(text.len());
            for &s in text {
                if let Some(v) = lane.step(shared, s)? {
                    out.push(v);
                }
            }
            Ok::<_, Error>(out)
        });
        let per_lane = per_lane.into_iter().collect::<Result<Vec<_>>>()?;
        let start = self.position;
        self.position += text.len();
        let emitted = per_lane.first().map_or(0, Vec::len);
        let first_end = self.position + 1 - emitted;
        let mut values = vec![0.0; per_lane.len()];
        let mut out = Vec::with_capacity(emitted);
        for t in 0..emitted {
            for (v, lane) in values.iter_mut().zip(&per_lane) {
                *v = lane[t];
            }
            let est = median_in_place(&mut values);
            out.push(AlignmentEstimate::new(first_end + t, est, self.cfg.p));
        }
        debug_assert!(emitted == 0 || first_end > start);
        Ok(out)
    }

    /// Stored words by category, work counters and lookup failures.
    pub fn measure_state(&self) -> StateSnapshot {
        let mut words = WordCounts::default();
        let mut peak = 0;
        let mut snap = StateSnapshot::default();
        for lane in &self.lanes {
            words.add(&lane.words());
            peak += lane.peak.total();
            snap.work_units += lane.work;
            snap.lookup_failures += lane.failures;
        }
        snap.ring_sketches = words.ring_sketches;
        snap.encodings = words.encodings;
        snap.buffers = words.buffers;
        snap.bank = words.bank;
        snap.seeds = words.seeds;
        snap.tables = words.tables;
        snap.total = words.total();
        snap.peak_total = peak.max(snap.total);
        snap.characters = self.position as u64;
        snap
    }

    /// Number of emissions whose encoding or suffix sketch was missing (zero when bookkeeping is sound).
    pub fn lookup_failures(&self) -> u64 {
        self.lanes.iter().map(|l| l.failures).sum()
    }

    /// Largest number of retained block entries over all lanes.
    pub fn ring_len(&self) -> usize {
        self.lanes.iter().map(|l| l.ring_len()).max().unwrap_or(0)
    }
}

/// Runs a fresh engine over a whole text.
pub fn run_text(pattern: &[Symbol], text: &[Symbol], cfg: &ProblemConfig) -> Result<Vec<AlignmentEstimate>> {
    Engine::new(pattern, cfg)?.process_text(text)
}

#[cfg(test)]
mod tests;
