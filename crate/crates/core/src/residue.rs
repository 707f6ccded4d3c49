//! Arithmetic in `Z/p^nZ`.
//!
//! Every [`Residue`] carries its [`PrimePowerModulus`]. The checked operations
//! (`try_add`, `try_mul`, ...) return [`Error::ModulusMismatch`] when the moduli
//! differ; the operator impls panic instead, since mixing moduli is always a
//! programming error.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The ring `Z/p^nZ`, identified by `p` and `n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct PrimePowerModulus {
    p: u64,
    n: u32,
    q: u64,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimePowerModulus {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::ZeroExponent);
        }
        let q = p
            .checked_pow(n)
            .filter(|&q| q <= u32::MAX as u64)
            .ok_or(Error::ModulusTooLarge { p, n })?;
        Ok(Self { p, n, q })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `p^n`.
    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    /// `p^k` as an integer; `k` may range over `0..=n`.
    #[inline]
    pub fn pow_p(&self, k: u32) -> u64 {
        self.p.pow(k)
    }

    /// The modulus `p^j` for `1 <= j <= n`.
    pub fn at_level(&self, j: u32) -> Result<Self> {
        if j == 0 || j > self.n {
            return Err(Error::BadLevel {
                level: j,
                n: self.n,
            });
        }
        Ok(Self {
            p: self.p,
            n: j,
            q: self.p.pow(j),
        })
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.q
    }

    /// Canonical representative of an arbitrary signed integer.
    #[inline]
    pub fn reduce_signed(&self, x: i64) -> u64 {
        x.rem_euclid(self.q as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.q
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.q;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    #[inline]
    pub fn is_unit(&self, a: u64) -> bool {
        !a.is_multiple_of(self.p)
    }

    /// p-adic valuation of a residue; `n` for zero.
    pub fn valuation(&self, a: u64) -> u32 {
        let mut a = a % self.q;
        if a == 0 {
            return self.n;
        }
        let mut v = 0;
        while a.is_multiple_of(self.p) {
            a /= self.p;
            v += 1;
        }
        v
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = a % self.q;
        if !self.is_unit(a) {
            return Err(Error::NonUnit {
                value: a,
                modulus: self.q,
            });
        }
        // extended Euclid on (a, q)
        let (mut r0, mut r1) = (self.q as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let k = r0 / r1;
            (r0, r1) = (r1, r0 - k * r1);
            (t0, t1) = (t1, t0 - k * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce_signed(t0))
    }

    pub fn residue(&self, value: i64) -> Residue {
        Residue {
            value: self.reduce_signed(value),
            modulus: *self,
        }
    }

    pub fn zero(&self) -> Residue {
        Residue {
            value: 0,
            modulus: *self,
        }
    }

    pub fn one(&self) -> Residue {
        Residue {
            value: 1 % self.q,
            modulus: *self,
        }
    }
}

impl fmt::Display for PrimePowerModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 1 {
            write!(f, "Z/{}", self.p)
        } else {
            write!(f, "Z/{}^{}", self.p, self.n)
        }
    }
}

/// An element of `Z/p^nZ` in canonical form `0 <= value < p^n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Residue {
    value: u64,
    modulus: PrimePowerModulus,
}

impl Residue {
    pub fn new(value: i64, modulus: PrimePowerModulus) -> Self {
        modulus.residue(value)
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(&self) -> PrimePowerModulus {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_unit(&self) -> bool {
        self.modulus.is_unit(self.value)
    }

    pub fn valuation(&self) -> u32 {
        self.modulus.valuation(self.value)
    }

    fn check(&self, other: &Residue) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.q,
                right: other.modulus.q,
            });
        }
        Ok(())
    }

    pub fn try_add(self, rhs: Residue) -> Result<Residue> {
        self.check(&rhs)?;
        Ok(Residue {
            value: self.modulus.add(self.value, rhs.value),
            modulus: self.modulus,
        })
    }

    pub fn try_sub(self, rhs: Residue) -> Result<Residue> {
        self.check(&rhs)?;
        Ok(Residue {
            value: self.modulus.sub(self.value, rhs.value),
            modulus: self.modulus,
        })
    }

    pub fn try_mul(self, rhs: Residue) -> Result<Residue> {
        self.check(&rhs)?;
        Ok(Residue {
            value: self.modulus.mul(self.value, rhs.value),
            modulus: self.modulus,
        })
    }

    /// Multiplicative inverse; fails with [`Error::NonUnit`] when `p` divides the value.
    pub fn inv(self) -> Result<Residue> {
        Ok(Residue {
            value: self.modulus.inv(self.value)?,
            modulus: self.modulus,
        })
    }

    pub fn pow(self, e: u64) -> Residue {
        Residue {
            value: self.modulus.pow(self.value, e),
            modulus: self.modulus,
        }
    }

    /// Reduction to `Z/p^jZ`.
    pub fn reduce_to(self, j: u32) -> Result<Residue> {
        let m = self.modulus.at_level(j)?;
        Ok(Residue {
            value: self.value % m.q,
            modulus: m,
        })
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        self.try_add(rhs).expect("residue modulus mismatch")
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        self.try_sub(rhs).expect("residue modulus mismatch")
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        self.try_mul(rhs).expect("residue modulus mismatch")
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue {
            value: self.modulus.neg(self.value),
            modulus: self.modulus,
        }
    }
}
