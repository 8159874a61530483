//! Text-side suffix sketches and the pattern-suffix bank.

use std::collections::VecDeque;

use crate::config::Symbol;
use crate::sketch::pstable::median_abs_gap;
use crate::sketch::{BlockColumns, DrawTable, HammingSketcher, LinearSketch, ManhattanSketcher, PStableSketcher};

#[derive(Clone, Debug)]
pub(crate) enum LinearFamily {
    Hamming(HammingSketcher),
    Manhattan(ManhattanSketcher),
}

impl LinearFamily {
    pub fn columns(&self) -> &dyn BlockColumns {
        match self {
            LinearFamily::Hamming(h) => h,
            LinearFamily::Manhattan(m) => m,
        }
    }
}

/// Sketches of `P[j+1..n]` for `j = 1..=b` (index `j − 1`).
pub(crate) fn linear_bank(cols: &dyn BlockColumns, pattern: &[Symbol]) -> Vec<LinearSketch> {
    let (n, b, sigma) = (pattern.len(), cols.block_len(), cols.sigma() as usize);
    // weights[(j−1)·bσ + u·σ + a−1] = Σ_m α_m·[P[j+1+mb+u] = a]
    let mut weights = vec![0i64; b * b * sigma];
    for j in 1..=b {
        for (i, &s) in pattern.iter().enumerate().skip(j) {
            let rel = i - j;
            weights[(j - 1) * b * sigma + (rel % b) * sigma + s as usize - 1] += cols.alpha(rel / b);
        }
    }
    let mut bank = vec![LinearSketch::zero(cols.dim(), cols.family()); b];
    let mut column = vec![0i64; cols.dim()];
    for u in 0..b.min(n) {
        for a in 1..=sigma {
            let slot = u * sigma + a - 1;
            if (0..b).all(|j| weights[j * b * sigma + slot] == 0) {
                continue;
            }
            column.iter_mut().for_each(|v| *v = 0);
            cols.add_symbol(&mut column, u, a as Symbol, 1);
            for (j, sk) in bank.iter_mut().enumerate() {
                let w = weights[j * b * sigma + slot];
                if w != 0 {
                    for (v, c) in sk.values.iter_mut().zip(&column) {
                        *v += w * c;
                    }
                }
            }
        }
    }
    bank
}

/// α-combined suffix sketch: completed blocks plus the running block.
#[derive(Clone, Debug)]
pub(crate) struct LinearSide {
    pub family: LinearFamily,
    pub bank: Vec<LinearSketch>,
    pub ring: VecDeque<(usize, LinearSketch)>,
    pub partial: LinearSketch,
    /// Combination of ring blocks for each window boundary used in the current block.
    pub bases: Vec<(usize, LinearSketch)>,
}

impl LinearSide {
    pub fn new(family: LinearFamily, pattern: &[Symbol]) -> Self {
        let cols = family.columns();
        let bank = linear_bank(cols, pattern);
        let partial = LinearSketch::zero(cols.dim(), cols.family());
        LinearSide {
            family,
            bank,
            ring: VecDeque::new(),
            partial,
            bases: Vec::new(),
        }
    }

    pub fn push(&mut self, offset: usize, symbol: Symbol) {
        self.family
            .columns()
            .add_symbol(&mut self.partial.values, offset, symbol, 1);
    }

    /// Squared-norm estimate for the window suffix starting after block `kblk`.
    pub fn estimate(&self, kblk: usize, current: usize, jlen: usize) -> Option<f64> {
        let base = &self.bases.iter().find(|b| b.0 == kblk)?.1;
        let cols = self.family.columns();
        let alpha = cols.alpha(current - kblk - 1);
        let target = &self.bank[jlen - 1].values;
        let total: f64 = base
            .values
            .iter()
            .zip(&self.partial.values)
            .zip(target)
            .map(|((&x, &y), &z)| {
                let g = (x + alpha * y - z) as i128;
                (g * g) as f64
            })
            .sum();
        Some(cols.norm_scale() * total)
    }

    /// Moves the finished running block into the ring.
    pub fn complete_block(&mut self, index: usize) {
        let cols = self.family.columns();
        let fresh = LinearSketch::zero(cols.dim(), cols.family());
        let done = std::mem::replace(&mut self.partial, fresh);
        self.ring.push_back((index, done));
    }

    /// Precomputes the combination of completed blocks for each boundary `kblk` in `kblks`.
    pub fn prepare(&mut self, current: usize, kblks: &[usize]) {
        let cols = self.family.columns();
        let mut bases = Vec::with_capacity(kblks.len());
        for &kblk in kblks {
            if kblk >= current {
                continue;
            }
            let mut base = LinearSketch::zero(cols.dim(), cols.family());
            for (m, index) in (kblk + 1..current).enumerate() {
                if let Some((_, sk)) = self.ring.iter().find(|e| e.0 == index) {
                    let a = cols.alpha(m);
                    for (v, x) in base.values.iter_mut().zip(&sk.values) {
                        *v += a * x;
                    }
                }
            }
            bases.push((kblk, base));
        }
        self.bases = bases;
    }

    /// Drops ring blocks that no future window needs.
    pub fn evict(&mut self, next_kblk: usize) {
        while self.ring.front().is_some_and(|e| e.0 <= next_kblk) {
            self.ring.pop_front();
        }
    }

    pub fn sketch_words(&self) -> usize {
        let d = self.partial.dim();
        d * (self.ring.len() + 1 + self.bases.len())
    }

    pub fn bank_words(&self) -> usize {
        self.bank.iter().map(|s| s.dim()).sum()
    }

    pub fn dim(&self) -> usize {
        self.partial.dim()
    }

    /// Window suffix sketch `base + α·partial`.
    #[cfg(test)]
    pub fn window_sketch(&self, kblk: usize, current: usize) -> Option<LinearSketch> {
        let mut out = self.bases.iter().find(|b| b.0 == kblk)?.1.clone();
        let alpha = self.family.columns().alpha(current - kblk - 1);
        out.add_scaled(&self.partial, alpha).ok()?;
        Some(out)
    }
}

/// Start-anchored p-stable sketches, one per block boundary inside the window range.
#[derive(Clone, Debug)]
pub(crate) struct StableSide {
    pub sketcher: PStableSketcher,
    pub draws: DrawTable,
    pub bank: Vec<Vec<f64>>,
    pub instances: VecDeque<(usize, Vec<f64>)>,
}

impl StableSide {
    pub fn new(sketcher: PStableSketcher, draws: DrawTable, pattern: &[Symbol], block_len: usize) -> Self {
        let bank = (1..=block_len)
            .map(|j| {
                let mut v = vec![0.0; sketcher.dim()];
                for (o, &s) in pattern.iter().skip(j).enumerate() {
                    draws.add(&mut v, o, s as f64);
                }
                v
            })
            .collect();
        StableSide {
            sketcher,
            draws,
            bank,
            instances: VecDeque::new(),
        }
    }

    /// Feeds text position `i`; opens a new instance when `i` starts a block after the first.
    pub fn push(&mut self, i: usize, symbol: Symbol, block_len: usize) {
        if i > block_len && (i - 1) % block_len == 0 {
            self.instances.push_back((i, vec![0.0; self.sketcher.dim()]));
        }
        for (c, values) in self.instances.iter_mut() {
            self.draws.add(values, i - *c, symbol as f64);
        }
    }

    /// Moment estimate of `T[c..i]` against `P[jlen+1..n]`.
    pub fn estimate(&self, c: usize, jlen: usize) -> Option<f64> {
        let inst = &self.instances.iter().find(|e| e.0 == c)?.1;
        let norm = median_abs_gap(inst, &self.bank[jlen - 1]) / self.sketcher.abs_median();
        Some(norm.powf(self.sketcher.p()))
    }

    pub fn evict(&mut self, next_boundary: usize) {
        while self.instances.front().is_some_and(|e| e.0 < next_boundary) {
            self.instances.pop_front();
        }
    }

    pub fn sketch_words(&self) -> usize {
        self.instances.len() * self.sketcher.dim()
    }

    pub fn bank_words(&self) -> usize {
        self.bank.iter().map(Vec::len).sum()
    }
}
