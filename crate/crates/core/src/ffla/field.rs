use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The prime field F_p. Residues are stored as `u32` and multiplied in `u64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fp {
    p: u32,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

/// All primes in the half-open range `(lo, hi]`.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo + 1..=hi).filter(|&q| is_prime(q)).collect()
}

impl Fp {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Fp { p: p as u32 })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        if s >= self.p as u64 {
            (s - self.p as u64) as u32
        } else {
            s as u32
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.p as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse by Fermat's little theorem. Panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    pub fn from_i64(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    pub fn from_u64(self, x: u64) -> u32 {
        (x % self.p as u64) as u32
    }

    /// Symmetric representative in `(-p/2, p/2]`, handy for printing.
    pub fn signed(self, a: u32) -> i64 {
        if a as u64 * 2 > self.p as u64 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

/// A finite field F_{p^k}. Degree 1 is the prime field itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub k: u32,
}

impl FieldSpec {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        let f = Fp::new(p)?;
        if k == 0 {
            return Err(Error::Input("extension degree must be at least 1".into()));
        }
        let mut order: u64 = 1;
        for _ in 0..k {
            order = order
                .checked_mul(p)
                .ok_or(Error::FieldTooLarge { p: f.p(), k })?;
        }
        Ok(FieldSpec { p: f.p(), k })
    }

    pub fn base(self) -> Fp {
        Fp { p: self.p }
    }

    pub fn order(self) -> u64 {
        (self.p as u64).pow(self.k)
    }

    /// Smallest extension of F_p whose order exceeds `bound`.
    pub fn exceeding(p: u64, bound: u64) -> Result<Self> {
        let mut k = 1;
        let mut order = p;
        while order <= bound {
            order = order
                .checked_mul(p)
                .ok_or(Error::FieldTooLarge { p: p as u32, k: k + 1 })?;
            k += 1;
        }
        FieldSpec::new(p, k)
    }
}
