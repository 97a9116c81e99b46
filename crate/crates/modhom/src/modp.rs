//! Arithmetic modulo a prime. Moduli are validated by trial division once,
//! at `Prime` construction; residue operations then assume primality.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Trial-division primality check; sufficient for the word-sized moduli used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).map_or(false, |sq| sq <= n) {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Prime> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl<'de> Deserialize<'de> for Prime {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = u64::deserialize(de)?;
        Prime::new(raw).map_err(serde::de::Error::custom)
    }
}

/// An element of Z/p for prime p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    p: Prime,
}

impl Residue {
    pub fn new(value: u64, p: Prime) -> Residue {
        Residue { value: value % p.get(), p }
    }

    /// Reduces a signed integer, mapping negatives into [0, p).
    pub fn from_i64(value: i64, p: Prime) -> Residue {
        let m = p.get() as i64;
        Residue::new(value.rem_euclid(m) as u64, p)
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> Prime {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn add(self, other: Residue) -> Residue {
        assert_eq!(self.p, other.p, "mixed moduli");
        Residue::new(self.value + other.value, self.p)
    }

    pub fn sub(self, other: Residue) -> Residue {
        assert_eq!(self.p, other.p, "mixed moduli");
        Residue::new(self.value + self.p.get() - other.value, self.p)
    }

    pub fn mul(self, other: Residue) -> Residue {
        assert_eq!(self.p, other.p, "mixed moduli");
        let prod = (self.value as u128 * other.value as u128) % self.p.get() as u128;
        Residue { value: prod as u64, p: self.p }
    }

    pub fn pow(self, mut e: u64) -> Residue {
        let mut base = self;
        let mut acc = Residue::new(1, self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat's little theorem; the element must be nonzero.
    pub fn inv(self) -> Result<Residue> {
        if self.is_zero() {
            return Err(Error::InvalidInput(format!(
                "0 has no inverse modulo {}",
                self.p
            )));
        }
        Ok(self.pow(self.p.get() - 2))
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_by_trial_division() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(!is_prime(0));
        assert!(!is_prime(1));
        assert!(is_prime(2));
        assert!(!is_prime(49));
        assert!(is_prime(65537));
    }

    #[test]
    fn prime_constructor_rejects_composites() {
        assert!(Prime::new(6).is_err());
        assert!(Prime::new(1).is_err());
        assert_eq!(Prime::new(5).unwrap().get(), 5);
    }

    #[test]
    fn residue_arithmetic() {
        let p = Prime::new(7).unwrap();
        let a = Residue::new(10, p);
        assert_eq!(a.value(), 3);
        assert_eq!(a.add(Residue::new(5, p)).value(), 1);
        assert_eq!(a.sub(Residue::new(5, p)).value(), 5);
        assert_eq!(a.mul(Residue::new(4, p)).value(), 5);
        assert_eq!(a.pow(0).value(), 1);
        assert_eq!(a.pow(6).value(), 1);
        assert_eq!(Residue::from_i64(-1, p).value(), 6);
    }

    #[test]
    fn fermat_inverse() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let p = Prime::new(p).unwrap();
            for v in 1..p.get() {
                let r = Residue::new(v, p);
                assert_eq!(r.mul(r.inv().unwrap()).value(), 1);
            }
        }
        let p = Prime::new(3).unwrap();
        assert!(Residue::new(0, p).inv().is_err());
    }
}
