//! Exact reference distances.

use crate::config::{Symbol, DONT_CARE};
use crate::error::{Error, Result};

/// Exact distance per alignment, indexed by `end − n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceVector {
    pub values: Vec<f64>,
}

/// Mismatches between symbols that are both regular.
pub fn exact_hamming(u: &[Symbol], v: &[Symbol]) -> Result<u64> {
    check_lengths(u, v)?;
    Ok(u.iter()
        .zip(v)
        .filter(|&(&a, &b)| a != DONT_CARE && b != DONT_CARE && a != b)
        .count() as u64)
}

/// |a − b|^p.
#[inline]
pub fn symbol_moment(a: Symbol, b: Symbol, p: f64) -> f64 {
    let d = (a as f64 - b as f64).abs();
    if d == 0.0 {
        0.0
    } else if p == 1.0 {
        d
    } else if p == 2.0 {
        d * d
    } else {
        d.powf(p)
    }
}

/// Σ |u_i − v_i|^p with compensated summation.
pub fn exact_moment(u: &[Symbol], v: &[Symbol], p: f64) -> Result<f64> {
    check_lengths(u, v)?;
    if !(p > 0.0) {
        return Err(Error::ZeroExponent);
    }
    let mut sum = NeumaierSum::default();
    for (i, (&a, &b)) in u.iter().zip(v).enumerate() {
        if a == DONT_CARE || b == DONT_CARE {
            return Err(Error::DontCare(i + 1));
        }
        sum.add(symbol_moment(a, b, p));
    }
    Ok(sum.value())
}

/// Exact distance (count for p = 0, moment otherwise) for every alignment.
pub fn all_alignments_exact(pattern: &[Symbol], text: &[Symbol], p: f64) -> Result<DistanceVector> {
    let n = pattern.len();
    if text.len() < n {
        return Err(Error::LengthMismatch {
            left: n,
            right: text.len(),
        });
    }
    let values = (n..=text.len())
        .map(|end| {
            let window = &text[end - n..end];
            if p == 0.0 {
                exact_hamming(pattern, window).map(|c| c as f64)
            } else {
                exact_moment(pattern, window, p)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DistanceVector { values })
}

fn check_lengths(u: &[Symbol], v: &[Symbol]) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    Ok(())
}

/// Neumaier's compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
