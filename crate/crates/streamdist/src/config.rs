//! Problem configuration, symbols, moment/norm conversion, windowing and block lengths.

use crate::error::{Error, Result};
use crate::par::Execution;

/// Alphabet symbol; regular symbols are `1..=sigma`.
pub type Symbol = u32;

/// Sentinel matching every symbol.
pub const DONT_CARE: Symbol = 0;

/// Which estimator family serves a given exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arm {
    /// p = 0.
    Hamming,
    /// p = 1.
    Manhattan,
    /// 0 < p < 1.
    LpSmall,
    /// 1 < p ≤ 2.
    LpLarge,
}

impl Arm {
    /// Arm serving exponent `p`.
    pub fn for_exponent(p: f64) -> Arm {
        if p == 0.0 {
            Arm::Hamming
        } else if p == 1.0 {
            Arm::Manhattan
        } else if p < 1.0 {
            Arm::LpSmall
        } else {
            Arm::LpLarge
        }
    }
}

/// Leading constants of the Θ(·) parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SketchConstants {
    /// Subsampling threshold k = ⌈threshold / ε′²⌉.
    pub threshold: f64,
    /// Dimension of ±1 sketches, ⌈linear_dim / ε′²⌉.
    pub linear_dim: f64,
    /// Dimension of p-stable sketches, ⌈pstable_dim / ε′²⌉.
    pub pstable_dim: f64,
    /// Upper limit on landmark sub-sketch dimension.
    pub landmark_dim_cap: usize,
    /// Norm-accuracy factor for landmark sub-sketches (accuracy C·ε/p).
    pub landmark_accuracy: f64,
    /// Leading constant of the morphism repetition count.
    pub phi_repetitions: f64,
    /// Upper limit on the morphism repetition count.
    pub phi_repetition_cap: usize,
    /// ε′ = ε / error_split.
    pub error_split: f64,
}

impl Default for SketchConstants {
    fn default() -> Self {
        SketchConstants {
            threshold: 32.0,
            linear_dim: 10.0,
            pstable_dim: 16.0,
            landmark_dim_cap: 4096,
            landmark_accuracy: 0.5,
            phi_repetitions: 8.0,
            phi_repetition_cap: 256,
            error_split: 3.0,
        }
    }
}

/// `⌈c / eps²⌉`, at least 1.
pub fn inverse_square_count(c: f64, eps: f64) -> usize {
    ((c / (eps * eps)) - 1e-9).ceil().max(1.0) as usize
}

/// Full problem description.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemConfig {
    /// Pattern length.
    pub n: usize,
    /// Alphabet size.
    pub sigma: u32,
    /// Distance exponent; 0 selects Hamming distance.
    pub p: f64,
    /// Target relative error.
    pub epsilon: f64,
    /// Failure probability target (informational; `repetitions` is the knob).
    pub delta: f64,
    /// Master seed.
    pub seed: u64,
    /// Number of independent lanes combined by a median (odd).
    pub repetitions: usize,
    /// Block length override.
    pub block_len: Option<usize>,
    pub constants: SketchConstants,
    pub execution: Execution,
}

impl ProblemConfig {
    /// Configuration with default seed, δ, repetitions and constants.
    pub fn new(n: usize, sigma: u32, p: f64, epsilon: f64) -> Result<Self> {
        let cfg = ProblemConfig {
            n,
            sigma,
            p,
            epsilon,
            delta: 0.1,
            seed: 0,
            repetitions: 7,
            block_len: None,
            constants: SketchConstants::default(),
            execution: Execution::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_repetitions(mut self, repetitions: usize) -> Self {
        self.repetitions = repetitions;
        self
    }

    pub fn with_block_len(mut self, block_len: usize) -> Self {
        self.block_len = Some(block_len);
        self
    }

    pub fn with_constants(mut self, constants: SketchConstants) -> Self {
        self.constants = constants;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// Checks every field invariant.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n == 0 {
            return fail("n must be at least 1".into());
        }
        if self.sigma == 0 {
            return fail("sigma must be at least 1".into());
        }
        if !(0.0..=2.0).contains(&self.p) || self.p.is_nan() {
            return fail(format!("p = {} outside [0, 2]", self.p));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return fail(format!("epsilon = {} outside (0, 1)", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return fail(format!("delta = {} outside (0, 1)", self.delta));
        }
        if self.repetitions == 0 || self.repetitions % 2 == 0 {
            return fail(format!("repetitions = {} must be odd", self.repetitions));
        }
        if let Some(b) = self.block_len {
            if b == 0 || b > self.n {
                return fail(format!("block length {b} outside [1, {}]", self.n));
            }
        }
        let c = &self.constants;
        if !(c.error_split >= 1.0) || !(c.threshold > 0.0) || !(c.linear_dim > 0.0) {
            return fail("sketch constants must be positive".into());
        }
        if !(c.pstable_dim > 0.0) || !(c.landmark_accuracy > 0.0) || !(c.phi_repetitions > 0.0) {
            return fail("sketch constants must be positive".into());
        }
        if c.landmark_dim_cap == 0 || c.phi_repetition_cap == 0 {
            return fail("sketch caps must be positive".into());
        }
        Ok(())
    }

    /// Estimator family for this exponent.
    pub fn arm(&self) -> Arm {
        Arm::for_exponent(self.p)
    }

    /// Effective block length.
    pub fn block_len(&self) -> usize {
        self.block_len.unwrap_or_else(|| choose_block_length(self))
    }

    /// Per-component error ε′.
    pub fn inner_epsilon(&self) -> f64 {
        self.epsilon / self.constants.error_split
    }

    /// Subsampling threshold k.
    pub fn threshold(&self) -> usize {
        inverse_square_count(self.constants.threshold, self.inner_epsilon())
    }

    /// Dimension of ±1 suffix sketches.
    pub fn linear_dim(&self) -> usize {
        inverse_square_count(self.constants.linear_dim, self.inner_epsilon())
    }

    /// Dimension of p-stable suffix sketches.
    pub fn pstable_dim(&self) -> usize {
        inverse_square_count(self.constants.pstable_dim, self.inner_epsilon())
    }
}

/// Direction of [`moment_norm_convert`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    MomentToNorm,
    NormToMoment,
}

/// Converts between a p'th moment and the L_p norm.
pub fn moment_norm_convert(value: f64, p: f64, direction: Direction) -> Result<f64> {
    if p == 0.0 {
        return Err(Error::ZeroExponent);
    }
    if !(p > 0.0) || !(value >= 0.0) {
        return Err(Error::Config(format!("cannot convert {value} at p = {p}")));
    }
    Ok(match direction {
        Direction::MomentToNorm if p == 1.0 => value,
        Direction::NormToMoment if p == 1.0 => value,
        Direction::MomentToNorm if p == 2.0 => value.sqrt(),
        Direction::NormToMoment if p == 2.0 => value * value,
        Direction::MomentToNorm => value.powf(1.0 / p),
        Direction::NormToMoment => value.powf(p),
    })
}

fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while r * r < n {
        r += 1;
    }
    r
}

/// Block length: ⌈√n⌉ for p ≤ 1, ⌈ε^{-p/2}·√n⌉ for 1 < p ≤ 2, clamped to [1, n].
pub fn choose_block_length(cfg: &ProblemConfig) -> usize {
    let b = if cfg.p <= 1.0 {
        ceil_sqrt(cfg.n)
    } else {
        let raw = cfg.epsilon.powf(-cfg.p / 2.0) * (cfg.n as f64).sqrt();
        (raw - 1e-9).ceil() as usize
    };
    b.clamp(1, cfg.n)
}

/// A chunk of the text together with the alignment end positions it reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TextWindow {
    pub start: usize,
    pub end: usize,
    /// First alignment end owned by this chunk (empty when `first_end > last_end`).
    pub first_end: usize,
    pub last_end: usize,
}

/// Splits `1..=text_len` into chunks of length 2n overlapping by n.
pub fn split_into_windows(text_len: usize, n: usize) -> Vec<TextWindow> {
    assert!(n >= 1, "pattern length must be positive");
    let mut out = Vec::new();
    let mut start = 1;
    loop {
        let end = (start + 2 * n - 1).min(text_len);
        let last = end == text_len;
        out.push(TextWindow {
            start,
            end,
            first_end: start + n - 1,
            last_end: if last { end } else { start + 2 * n - 2 },
        });
        if last {
            break;
        }
        start += n;
    }
    out
}

/// Estimate emitted for one alignment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlignmentEstimate {
    /// 1-based text index of the window end.
    pub end_pos: usize,
    /// Moment (p > 0) or mismatch count (p = 0).
    pub estimate: f64,
    /// `estimate^(1/p)` for p > 0.
    pub converted_norm: Option<f64>,
}

impl AlignmentEstimate {
    /// Builds an estimate, deriving the norm for p > 0.
    pub fn new(end_pos: usize, estimate: f64, p: f64) -> Self {
        let estimate = estimate.max(0.0);
        let converted_norm = if p > 0.0 {
            moment_norm_convert(estimate, p, Direction::MomentToNorm).ok()
        } else {
            None
        };
        AlignmentEstimate {
            end_pos,
            estimate,
            converted_norm,
        }
    }
}

/// Checks that every symbol lies in `1..=sigma` (or is DONT_CARE when allowed).
pub fn validate_word(word: &[Symbol], sigma: u32, allow_dont_care: bool) -> Result<()> {
    for (i, &s) in word.iter().enumerate() {
        if s == DONT_CARE {
            if !allow_dont_care {
                return Err(Error::DontCare(i + 1));
            }
        } else if s > sigma {
            return Err(Error::SymbolOutOfRange { symbol: s, sigma });
        }
    }
    Ok(())
}

/// Median of a non-empty slice (mean of the two middle values for even length).
pub fn median_in_place(values: &mut [f64]) -> f64 {
    let len = values.len();
    assert!(len > 0, "median of an empty slice");
    let mid = len / 2;
    let (low, upper, _) = values.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    let upper = *upper;
    if len % 2 == 1 {
        upper
    } else {
        let lower = low.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}
