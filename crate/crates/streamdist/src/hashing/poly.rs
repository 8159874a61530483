use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Mersenne primes used as field moduli.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldPrime {
    /// 2^31 − 1.
    M31,
    /// 2^61 − 1.
    M61,
}

impl FieldPrime {
    pub const fn modulus(self) -> u64 {
        match self {
            FieldPrime::M31 => (1 << 31) - 1,
            FieldPrime::M61 => (1 << 61) - 1,
        }
    }

    /// Smallest table prime covering `domain` with `out_bits` nearly unbiased low bits.
    pub fn for_domain(domain: u64, out_bits: u32) -> FieldPrime {
        if domain <= FieldPrime::M31.modulus() && out_bits <= 8 {
            FieldPrime::M31
        } else {
            FieldPrime::M61
        }
    }

    #[inline]
    fn mul(self, a: u64, b: u64) -> u64 {
        match self {
            FieldPrime::M31 => {
                let m = FieldPrime::M31.modulus();
                let v = a * b;
                let mut r = (v & m) + (v >> 31);
                r = (r & m) + (r >> 31);
                if r >= m {
                    r - m
                } else {
                    r
                }
            }
            FieldPrime::M61 => {
                let m = FieldPrime::M61.modulus();
                let v = (a as u128) * (b as u128);
                let mut r = ((v as u64) & m) + ((v >> 61) as u64);
                if r >= m {
                    r -= m;
                }
                r
            }
        }
    }

    #[inline]
    fn add(self, a: u64, b: u64) -> u64 {
        let m = self.modulus();
        let r = a + b;
        if r >= m {
            r - m
        } else {
            r
        }
    }
}

/// Degree-3 polynomial over a prime field: a 4-wise independent family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolyHash {
    prime: FieldPrime,
    coeffs: [u64; 4],
    domain: u64,
    out_bits: u32,
    seed: u64,
}

impl PolyHash {
    /// Draws the coefficients from `seed`.
    ///
    /// # Panics
    /// If `domain` exceeds 2^61 − 1 or `out_bits > 60`.
    pub fn new(seed: u64, domain: u64, out_bits: u32) -> Self {
        assert!(domain <= FieldPrime::M61.modulus(), "hash domain too large");
        assert!(out_bits <= 60, "at most 60 output bits");
        let prime = FieldPrime::for_domain(domain, out_bits);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = prime.modulus();
        let coeffs = [
            rng.gen_range(0..m),
            rng.gen_range(0..m),
            rng.gen_range(0..m),
            rng.gen_range(0..m),
        ];
        PolyHash {
            prime,
            coeffs,
            domain,
            out_bits,
            seed,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn domain(&self) -> u64 {
        self.domain
    }

    pub fn out_bits(&self) -> u32 {
        self.out_bits
    }

    pub fn prime(&self) -> FieldPrime {
        self.prime
    }

    /// Field value of the polynomial at `x`.
    #[inline]
    pub fn field_value(&self, x: u64) -> u64 {
        debug_assert!(x < self.domain, "hash argument outside domain");
        let f = self.prime;
        let [a, b, c, d] = self.coeffs;
        let v = f.add(f.mul(a, x), b);
        let v = f.add(f.mul(v, x), c);
        f.add(f.mul(v, x), d)
    }

    /// Low `out_bits` bits of the field value.
    #[inline]
    pub fn bits(&self, x: u64) -> u64 {
        self.field_value(x) & ((1u64 << self.out_bits) - 1)
    }

    /// ±1 value `2·(value mod 2) − 1`.
    #[inline]
    pub fn sign(&self, x: u64) -> i64 {
        ((self.field_value(x) & 1) as i64) * 2 - 1
    }

    /// Checked evaluation returning the output bits.
    pub fn eval(&self, x: u64) -> Result<u64> {
        if x >= self.domain {
            return Err(Error::DomainOverflow {
                value: x,
                domain: self.domain,
            });
        }
        Ok(self.bits(x))
    }

    /// Checked ±1 evaluation.
    pub fn eval_sign(&self, x: u64) -> Result<i64> {
        if x >= self.domain {
            return Err(Error::DomainOverflow {
                value: x,
                domain: self.domain,
            });
        }
        Ok(self.sign(x))
    }
}
