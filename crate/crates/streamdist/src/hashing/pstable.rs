use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Mutex, OnceLock};

use super::mix64;
use crate::config::median_in_place;
use crate::error::{Error, Result};

/// Smallest accepted calibration sample.
pub const MIN_CALIBRATION_SAMPLES: usize = 10_000;

/// Sample size behind [`PStableSampler::new`].
pub const CALIBRATION_SAMPLES: usize = 1 << 20;

const CALIBRATION_SEED: u64 = 0x5EED_CA11_B4A7_E000;

/// Chambers–Mallows–Stuck transform of an angle `theta ∈ (−π/2, π/2)` and `w = ln(1/r) > 0`.
#[inline]
pub fn pstable_variate(p: f64, theta: f64, w: f64) -> f64 {
    if p == 1.0 {
        theta.tan()
    } else if p == 2.0 {
        2.0 * theta.sin() * w.sqrt()
    } else {
        let a = (p * theta).sin() / theta.cos().powf(1.0 / p);
        let b = ((theta * (1.0 - p)).cos() / w).powf((1.0 - p) / p);
        a * b
    }
}

#[inline]
fn unit(seed: u64, index: u64, lane: u64) -> f64 {
    let z = mix64(seed ^ mix64(index.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ lane));
    (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Symmetric p-stable variates keyed by `(seed, index)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PStableSampler {
    p: f64,
    seed: u64,
    abs_median: f64,
}

impl PStableSampler {
    /// Sampler whose scale comes from the process-wide calibration cache.
    pub fn new(p: f64, seed: u64) -> Result<Self> {
        check_exponent(p)?;
        Ok(PStableSampler {
            p,
            seed,
            abs_median: cached_abs_median(p),
        })
    }

    /// Sampler with an explicit median of |X|.
    pub fn with_abs_median(p: f64, seed: u64, abs_median: f64) -> Result<Self> {
        check_exponent(p)?;
        if !(abs_median > 0.0) {
            return Err(Error::Config("abs_median must be positive".into()));
        }
        Ok(PStableSampler { p, seed, abs_median })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn abs_median(&self) -> f64 {
        self.abs_median
    }

    /// Draw number `index`.
    #[inline]
    pub fn draw(&self, index: u64) -> f64 {
        let mut sub = 0u64;
        loop {
            let u = unit(self.seed, index, 2 * sub);
            let r = unit(self.seed, index, 2 * sub + 1);
            sub += 1;
            if u == 0.0 || r == 0.0 {
                continue;
            }
            let theta = PI * u - FRAC_PI_2;
            return pstable_variate(self.p, theta, -r.ln());
        }
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p > 0.0 && p <= 2.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("p-stable exponent {p} outside (0, 2]")))
    }
}

/// Empirical median of |X| over `sample_count` draws.
pub fn calibrate_abs_median(p: f64, sample_count: usize, seed: u64) -> Result<f64> {
    check_exponent(p)?;
    if sample_count < MIN_CALIBRATION_SAMPLES {
        return Err(Error::TooFewSamples {
            got: sample_count,
            min: MIN_CALIBRATION_SAMPLES,
        });
    }
    let sampler = PStableSampler {
        p,
        seed,
        abs_median: 1.0,
    };
    let mut values: Vec<f64> = (0..sample_count as u64).map(|i| sampler.draw(i).abs()).collect();
    Ok(median_in_place(&mut values))
}

fn cached_abs_median(p: f64) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&m) = cache.lock().expect("calibration cache").get(&p.to_bits()) {
        return m;
    }
    let m = calibrate_abs_median(p, CALIBRATION_SAMPLES, CALIBRATION_SEED).expect("valid exponent");
    cache.lock().expect("calibration cache").insert(p.to_bits(), m);
    m
}
