//! Arithmetic in the prime field F_p.
//!
//! Residues are kept in `[0, p)` inside a `u64`. Because `p < 2^20`, the
//! product of two residues fits comfortably and no widening is needed.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported characteristic.
pub const MAX_PRIME: u64 = 1 << 20;

/// A prime characteristic `2 <= p <= 2^20`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if !(2..=MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn reduce(self, a: u64) -> u64 {
        a % self.0
    }

    /// Reduce a signed integer into `[0, p)`.
    #[inline]
    pub fn reduce_signed(self, a: i64) -> u64 {
        a.rem_euclid(self.0 as i64) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        (a * b) % self.0
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.0;
        a %= self.0;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u64) -> u64 {
        assert!(a % self.0 != 0, "inverse of zero in F_{}", self.0);
        self.pow(a, self.0 - 2)
    }

    /// Symmetric representative in `(-p/2, p/2]`, used for display.
    pub fn signed(self, a: u64) -> i64 {
        if a > self.0 / 2 {
            a as i64 - self.0 as i64
        } else {
            a as i64
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Trial division; more than fast enough below 2^20.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites_and_range() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(13).is_ok());
        assert!(Prime::new(1).is_err());
        assert!(Prime::new(15).is_err());
        assert!(Prime::new(1_048_583).is_err());
        assert!(Prime::new(1_048_573).is_ok());
    }

    #[test]
    fn inverses() {
        let p = Prime::new(13).unwrap();
        for a in 1..13 {
            assert_eq!(p.mul(a, p.inv(a)), 1);
        }
        assert_eq!(p.reduce_signed(-4), 9);
        assert_eq!(p.signed(12), -1);
    }
}
