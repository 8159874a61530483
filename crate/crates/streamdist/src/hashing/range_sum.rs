use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest domain served by the prefix-table backend by default.
pub const PREFIX_TABLE_LIMIT: u64 = 1 << 20;

/// How interval sums are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RangeBackend {
    /// Dyadic decomposition with closed-form exponential sums, O(log³ t) per query.
    Fast,
    /// Precomputed prefix sums, O(t) space.
    PrefixTable,
}

/// ±1 hash `(−1)^{f(x)}` for a random quadratic form `f` over GF(2)^m.
///
/// Random second-order Reed–Muller codewords are 7-wise independent, and the
/// sum over any dyadic interval reduces to an exponential sum of a quadratic
/// form, which Gaussian-style elimination evaluates exactly.
#[derive(Clone, Debug)]
pub struct RangeSummableHash {
    bits: u32,
    domain: u64,
    /// `quad[i]` holds coefficients a_ij for j > i.
    quad: Vec<u64>,
    linear: u64,
    constant: u64,
    seed: u64,
    prefix: Option<Vec<i32>>,
}

impl RangeSummableHash {
    /// Builds the hash with the default backend for `domain`.
    pub fn new(seed: u64, domain: u64) -> Self {
        let backend = if domain <= PREFIX_TABLE_LIMIT {
            RangeBackend::PrefixTable
        } else {
            RangeBackend::Fast
        };
        Self::with_backend(seed, domain, backend)
    }

    /// Builds the hash with an explicit backend.
    ///
    /// # Panics
    /// If `domain` is zero or above 2^62.
    pub fn with_backend(seed: u64, domain: u64, backend: RangeBackend) -> Self {
        assert!(domain >= 1 && domain <= 1 << 62, "unsupported domain size");
        let bits = (64 - (domain - 1).leading_zeros()).max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let quad = (0..bits)
            .map(|i| {
                let above = if i + 1 >= 64 { 0 } else { !0u64 << (i + 1) };
                rng.gen::<u64>() & above & low_mask(bits)
            })
            .collect();
        let linear = rng.gen::<u64>() & low_mask(bits);
        let constant = rng.gen::<u64>() & 1;
        let mut h = RangeSummableHash {
            bits,
            domain,
            quad,
            linear,
            constant,
            seed,
            prefix: None,
        };
        if backend == RangeBackend::PrefixTable {
            let mut table = Vec::with_capacity(domain as usize + 1);
            let mut acc = 0i32;
            table.push(0);
            for x in 0..domain {
                acc += h.value(x) as i32;
                table.push(acc);
            }
            h.prefix = Some(table);
        }
        h
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn domain(&self) -> u64 {
        self.domain
    }

    pub fn backend(&self) -> RangeBackend {
        if self.prefix.is_some() {
            RangeBackend::PrefixTable
        } else {
            RangeBackend::Fast
        }
    }

    /// Words of state held by the backend.
    pub fn stored_words(&self) -> usize {
        self.quad.len() + 3 + self.prefix.as_ref().map_or(0, |t| t.len() / 2)
    }

    #[inline]
    fn value(&self, x: u64) -> i64 {
        let mut f = self.constant ^ parity(self.linear & x);
        let mut rest = x;
        while rest != 0 {
            let i = rest.trailing_zeros();
            rest &= rest - 1;
            f ^= parity(self.quad[i as usize] & x);
        }
        1 - 2 * (f as i64)
    }

    /// Hash value at `x`.
    pub fn eval(&self, x: u64) -> Result<i64> {
        if x >= self.domain {
            return Err(Error::DomainOverflow {
                value: x,
                domain: self.domain,
            });
        }
        Ok(self.value(x))
    }

    /// Sum of hash values over `[alpha, beta)`.
    pub fn range_sum(&self, alpha: u64, beta: u64) -> Result<i64> {
        self.check_range(alpha, beta)?;
        Ok(self.range_sum_unchecked(alpha, beta))
    }

    fn check_range(&self, alpha: u64, beta: u64) -> Result<()> {
        if alpha > beta {
            return Err(Error::ReversedRange {
                start: alpha,
                end: beta,
            });
        }
        if beta > self.domain {
            return Err(Error::DomainOverflow {
                value: beta,
                domain: self.domain,
            });
        }
        Ok(())
    }

    /// Interval sum without argument checks.
    #[inline]
    pub fn range_sum_unchecked(&self, alpha: u64, beta: u64) -> i64 {
        match &self.prefix {
            Some(t) => (t[beta as usize] - t[alpha as usize]) as i64,
            None => self.prefix_fast(beta) - self.prefix_fast(alpha),
        }
    }

    /// Interval sum forced through the fast backend.
    pub fn range_sum_fast(&self, alpha: u64, beta: u64) -> Result<i64> {
        self.check_range(alpha, beta)?;
        Ok(self.prefix_fast(beta) - self.prefix_fast(alpha))
    }

    /// Σ_{y < x} h(y) via dyadic decomposition.
    fn prefix_fast(&self, x: u64) -> i64 {
        let mut total = 0;
        for j in (0..=self.bits).rev() {
            if (x >> j) & 1 == 1 {
                let high = (x >> (j + 1)) << (j + 1);
                total += self.dyadic_sum(high, j);
            }
        }
        total
    }

    /// Sum over all y with bits ≥ j equal to `high` (bit j clear) and free low bits.
    fn dyadic_sum(&self, high: u64, j: u32) -> i64 {
        let free = low_mask(j);
        let mut linear = self.linear & free;
        let mut constant = self.constant ^ parity(self.linear & high);
        let mut rest = high;
        while rest != 0 {
            let i = rest.trailing_zeros();
            rest &= rest - 1;
            constant ^= parity(self.quad[i as usize] & high);
        }
        let mut adj = [0u64; 64];
        let adj = &mut adj[..j as usize];
        for i in 0..j {
            let row = self.quad[i as usize];
            if parity(row & high) == 1 {
                linear ^= 1 << i;
            }
            let inner = row & free;
            adj[i as usize] |= inner;
            let mut r = inner;
            while r != 0 {
                let k = r.trailing_zeros();
                r &= r - 1;
                adj[k as usize] |= 1 << i;
            }
        }
        quadratic_exponential_sum(adj, free, linear, constant)
    }
}

/// Σ_y (−1)^{Q(y) + L·y + c} over the variables in `vars`, where `adj` is the
/// symmetric adjacency of the quadratic part.
fn quadratic_exponential_sum(adj: &mut [u64], mut vars: u64, mut linear: u64, mut constant: u64) -> i64 {
    let mut scale = 0u32;
    while vars != 0 {
        let v = 63 - vars.leading_zeros();
        let vbit = 1u64 << v;
        vars &= !vbit;
        let nb = adj[v as usize] & vars;
        let lv = (linear >> v) & 1;
        if nb == 0 {
            if lv == 1 {
                return 0;
            }
            scale += 1;
            continue;
        }
        // Summing y_v forces the hyperplane y_u = lv + Σ_{i ∈ rest} y_i.
        let u = 63 - nb.leading_zeros();
        let ubit = 1u64 << u;
        let rest = nb & !ubit;
        vars &= !ubit;
        scale += 1;
        let cross = adj[u as usize] & vars;
        let lu = (linear >> u) & 1;
        constant ^= lv & lu;
        if lv == 1 {
            linear ^= cross;
        }
        if lu == 1 {
            linear ^= rest;
        }
        linear ^= rest & cross;
        let mut r = rest;
        while r != 0 {
            let i = r.trailing_zeros();
            r &= r - 1;
            adj[i as usize] ^= cross;
        }
        let mut c = cross;
        while c != 0 {
            let k = c.trailing_zeros();
            c &= c - 1;
            adj[k as usize] ^= rest;
        }
        for i in 0..adj.len() {
            adj[i] &= !(vbit | ubit);
            adj[i] &= !(1u64 << i);
        }
        linear &= !(vbit | ubit);
    }
    let magnitude = 1i64 << scale;
    if constant & 1 == 1 {
        -magnitude
    } else {
        magnitude
    }
}

#[inline]
fn parity(x: u64) -> u64 {
    (x.count_ones() & 1) as u64
}

#[inline]
fn low_mask(bits: u32) -> u64 {
    if bits >= 64 {
        !0
    } else {
        (1u64 << bits) - 1
    }
}
