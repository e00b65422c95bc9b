//! Residue arithmetic over `Z/n`, trial-division factorization, totient and
//! Euler's criterion.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;

use crate::error::{Error, Result};

/// A positive modulus together with its prime factorization.
///
/// `factors` lists `(p, k)` pairs with strictly increasing primes and
/// `Π p^k == n`; it is empty exactly when `n == 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Modulus {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Modulus {
    pub fn new(n: u64) -> Result<Self> {
        factorize(n)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// `Some((p, k))` when the modulus is a prime power `p^k` with `k >= 1`.
    pub fn prime_power(&self) -> Option<(u64, u32)> {
        match self.factors.as_slice() {
            [single] => Some(*single),
            _ => None,
        }
    }

    pub fn is_prime(&self) -> bool {
        matches!(self.factors.as_slice(), [(_, 1)])
    }

    /// The prime-power components `p^k` of the modulus, in increasing prime order.
    pub fn prime_power_parts(&self) -> impl Iterator<Item = (u64, u32, u64)> + '_ {
        self.factors.iter().map(|&(p, k)| (p, k, p.pow(k)))
    }

    pub fn residue(&self, value: i64) -> Residue {
        Residue::new(value, self.n)
    }

    pub fn totient(&self) -> u64 {
        totient(self)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.n)
    }
}

/// Factor `n` by trial division up to `√n`.
pub fn factorize(n: u64) -> Result<Modulus> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= rest {
        if rest % d == 0 {
            let mut k = 0;
            while rest % d == 0 {
                rest /= d;
                k += 1;
            }
            factors.push((d, k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Modulus { n, factors })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Euler's totient from the stored factorization.
pub fn totient(m: &Modulus) -> u64 {
    m.factors
        .iter()
        .map(|&(p, k)| p.pow(k - 1) * (p - 1))
        .product()
}

pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = base as u128 % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Inverse of `a` modulo `n`, if it exists.
pub fn inverse_mod(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let e = (a as i128 % n as i128).extended_gcd(&(n as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(n as i128) as u64)
}

/// Euler's criterion: `a` is a nonzero square modulo the odd prime `p`.
///
/// Zero is reported as a non-residue.
pub fn is_quadratic_residue(a: i64, p: u64) -> Result<bool> {
    if p == 2 {
        return Err(Error::NotOddPrime(p));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return Ok(false);
    }
    Ok(pow_mod(a, (p - 1) / 2, p) == 1)
}

/// A canonical residue in `[0, modulus)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: i64, modulus: u64) -> Self {
        assert!(modulus >= 1, "residue modulus must be positive");
        Residue {
            value: (value as i128).rem_euclid(modulus as i128) as u64,
            modulus,
        }
    }

    pub fn from_u64(value: u64, modulus: u64) -> Self {
        assert!(modulus >= 1, "residue modulus must be positive");
        Residue {
            value: value % modulus,
            modulus,
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn is_unit(self) -> bool {
        self.value.gcd(&self.modulus) == 1
    }

    pub fn inverse(self) -> Result<Residue> {
        inverse_mod(self.value, self.modulus)
            .map(|v| Residue {
                value: v,
                modulus: self.modulus,
            })
            .ok_or(Error::NotAUnit {
                value: self.value,
                modulus: self.modulus,
            })
    }

    /// Reinterpret modulo a divisor `d` of the current modulus.
    pub fn reduce(self, d: u64) -> Residue {
        debug_assert_eq!(self.modulus % d, 0);
        Residue::from_u64(self.value, d)
    }

    pub fn pow(self, exp: u64) -> Residue {
        Residue {
            value: pow_mod(self.value, exp, self.modulus),
            modulus: self.modulus,
        }
    }

    fn check(self, other: Residue) {
        assert_eq!(
            self.modulus, other.modulus,
            "residues from different moduli"
        );
    }
}

pub fn mod_inv(a: Residue) -> Result<Residue> {
    a.inverse()
}

pub fn is_unit(a: Residue) -> bool {
    a.is_unit()
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        self.check(rhs);
        Residue::from_u64(self.value + rhs.value, self.modulus)
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        self.check(rhs);
        Residue::from_u64(self.value + self.modulus - rhs.value, self.modulus)
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        self.check(rhs);
        let v = (self.value as u128 * rhs.value as u128 % self.modulus as u128) as u64;
        Residue {
            value: v,
            modulus: self.modulus,
        }
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue::from_u64(self.modulus - self.value, self.modulus)
    }
}
