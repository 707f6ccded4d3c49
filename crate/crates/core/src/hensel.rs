//! Simple-root Hensel lifting for polynomials over `Z/p^nZ`.

use crate::error::{Error, Result};
use crate::residue::{PrimePowerModulus, Residue};

/// Dense polynomial, coefficients low degree first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    coeffs: Vec<u64>,
    modulus: PrimePowerModulus,
}

impl Poly {
    pub fn new(coeffs: &[i64], modulus: PrimePowerModulus) -> Self {
        Self {
            coeffs: coeffs.iter().map(|&c| modulus.reduce_signed(c)).collect(),
            modulus,
        }
    }

    pub fn from_residues(coeffs: &[Residue]) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::Precondition("empty polynomial".into()));
        };
        let modulus = first.modulus();
        for c in coeffs {
            if c.modulus() != modulus {
                return Err(Error::ModulusMismatch {
                    left: modulus.q(),
                    right: c.modulus().q(),
                });
            }
        }
        Ok(Self {
            coeffs: coeffs.iter().map(|c| c.value()).collect(),
            modulus,
        })
    }

    pub fn modulus(&self) -> PrimePowerModulus {
        self.modulus
    }

    pub fn eval(&self, x: u64) -> u64 {
        let m = self.modulus;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| m.add(m.mul(acc, x), c))
    }

    pub fn derivative(&self) -> Poly {
        let m = self.modulus;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| m.mul(c, m.reduce(i as u64)))
            .collect();
        Poly { coeffs, modulus: m }
    }
}

/// Lifts a simple root `r` of `P mod p` to the unique root of `P mod p^n`
/// congruent to `r`, one p-adic digit at a time.
pub fn hensel_lift_roots(poly: &Poly, simple_root_mod_p: Residue) -> Result<Residue> {
    let m = poly.modulus();
    let p = m.p();
    let r0 = simple_root_mod_p.value() % p;
    if !poly.eval(r0).is_multiple_of(p) {
        return Err(Error::NotARoot);
    }
    let dp = poly.derivative();
    let slope = dp.eval(r0) % p;
    if slope == 0 {
        return Err(Error::NonSimpleRoot);
    }
    let fp = m.at_level(1)?;
    let slope_inv = fp.inv(slope)?;

    let mut r = r0;
    for k in 1..m.n() {
        // P(r) = 0 mod p^k; choose the digit t with P(r + t p^k) = 0 mod p^{k+1}
        let pk = m.pow_p(k);
        let val = poly.eval(r);
        debug_assert_eq!(val % pk, 0);
        let c = (val / pk) % p;
        let t = fp.mul(fp.neg(c), slope_inv);
        r = m.add(r, m.mul(t, pk));
    }
    debug_assert_eq!(poly.eval(r), 0);
    Ok(m.residue(r as i64))
}
