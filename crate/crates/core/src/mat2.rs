//! 2x2 matrices over `Z/p^nZ`.

use std::fmt;

use crate::error::{Error, Result};
use crate::hensel::Poly;
use crate::residue::{PrimePowerModulus, Residue};

/// Row-major `(a b / c d)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mat2 {
    e: [u64; 4],
    modulus: PrimePowerModulus,
}

/// Matrix shapes used by the triangular decompositions.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Diag,
    StrictUpper,
    StrictLower,
}

impl Mat2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64, modulus: PrimePowerModulus) -> Self {
        let r = |x| modulus.reduce_signed(x);
        Self {
            e: [r(a), r(b), r(c), r(d)],
            modulus,
        }
    }

    pub fn from_raw(e: [u64; 4], modulus: PrimePowerModulus) -> Self {
        let e = e.map(|x| modulus.reduce(x));
        Self { e, modulus }
    }

    pub fn from_residues(a: Residue, b: Residue, c: Residue, d: Residue) -> Result<Self> {
        let m = a.modulus();
        for x in [b, c, d] {
            if x.modulus() != m {
                return Err(Error::ModulusMismatch {
                    left: m.q(),
                    right: x.modulus().q(),
                });
            }
        }
        Ok(Self {
            e: [a.value(), b.value(), c.value(), d.value()],
            modulus: m,
        })
    }

    pub fn identity(modulus: PrimePowerModulus) -> Self {
        Self::from_raw([1, 0, 0, 1], modulus)
    }

    pub fn scalar(s: i64, modulus: PrimePowerModulus) -> Self {
        Self::new(s, 0, 0, s, modulus)
    }

    pub fn diag(a: i64, d: i64, modulus: PrimePowerModulus) -> Self {
        Self::new(a, 0, 0, d, modulus)
    }

    /// `(1 b / 0 1)`.
    pub fn upper_unipotent(b: i64, modulus: PrimePowerModulus) -> Self {
        Self::new(1, b, 0, 1, modulus)
    }

    /// `(1 0 / c 1)`.
    pub fn lower_unipotent(c: i64, modulus: PrimePowerModulus) -> Self {
        Self::new(1, 0, c, 1, modulus)
    }

    #[inline]
    pub fn raw(&self) -> [u64; 4] {
        self.e
    }

    #[inline]
    pub fn modulus(&self) -> PrimePowerModulus {
        self.modulus
    }

    pub fn a(&self) -> Residue {
        self.entry(0)
    }
    pub fn b(&self) -> Residue {
        self.entry(1)
    }
    pub fn c(&self) -> Residue {
        self.entry(2)
    }
    pub fn d(&self) -> Residue {
        self.entry(3)
    }

    fn entry(&self, i: usize) -> Residue {
        Residue::new(self.e[i] as i64, self.modulus)
    }

    #[inline]
    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        assert_eq!(self.modulus, rhs.modulus, "matrix modulus mismatch");
        let m = self.modulus;
        let q = m.q();
        let [a, b, c, d] = self.e;
        let [w, x, y, z] = rhs.e;
        Mat2 {
            e: [
                (a * w + b * y) % q,
                (a * x + b * z) % q,
                (c * w + d * y) % q,
                (c * x + d * z) % q,
            ],
            modulus: m,
        }
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        assert_eq!(self.modulus, rhs.modulus, "matrix modulus mismatch");
        let m = self.modulus;
        Mat2 {
            e: std::array::from_fn(|i| m.add(self.e[i], rhs.e[i])),
            modulus: m,
        }
    }

    pub fn sub(&self, rhs: &Mat2) -> Mat2 {
        assert_eq!(self.modulus, rhs.modulus, "matrix modulus mismatch");
        let m = self.modulus;
        Mat2 {
            e: std::array::from_fn(|i| m.sub(self.e[i], rhs.e[i])),
            modulus: m,
        }
    }

    pub fn det(&self) -> Residue {
        let m = self.modulus;
        let [a, b, c, d] = self.e;
        m.residue(m.sub(m.mul(a, d), m.mul(b, c)) as i64)
    }

    pub fn trace(&self) -> Residue {
        self.modulus
            .residue(self.modulus.add(self.e[0], self.e[3]) as i64)
    }

    pub fn is_invertible(&self) -> bool {
        self.det().is_unit()
    }

    pub fn inverse(&self) -> Result<Mat2> {
        let m = self.modulus;
        let di = self.det().inv().map_err(|_| Error::NotInvertible)?.value();
        let [a, b, c, d] = self.e;
        Ok(Mat2 {
            e: [
                m.mul(d, di),
                m.mul(m.neg(b), di),
                m.mul(m.neg(c), di),
                m.mul(a, di),
            ],
            modulus: m,
        })
    }

    /// `self^k` for `k >= 0`.
    pub fn pow(&self, mut k: u64) -> Mat2 {
        let mut acc = Mat2::identity(self.modulus);
        let mut base = *self;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Signed power; negative exponents need an invertible matrix.
    pub fn pow_signed(&self, k: i64) -> Result<Mat2> {
        if k >= 0 {
            Ok(self.pow(k as u64))
        } else {
            Ok(self.inverse()?.pow(k.unsigned_abs()))
        }
    }

    /// `self^m` for a class `m` in `Z/p^nZ`; only meaningful when the order
    /// of `self` divides `p^n`, which is checked.
    pub fn pow_class(&self, m: Residue) -> Result<Mat2> {
        if m.modulus() != self.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.q(),
                right: m.modulus().q(),
            });
        }
        if !self.is_invertible() {
            return Err(Error::NotInvertible);
        }
        let q = self.modulus.q();
        if !self.pow(q).is_identity() {
            return Err(Error::OrderDoesNotDivide {
                order: self.order()?,
                bound: q,
            });
        }
        Ok(self.pow(m.value()))
    }

    /// Least `k >= 1` with `self^k = I`.
    pub fn order(&self) -> Result<u64> {
        if !self.is_invertible() {
            return Err(Error::NotInvertible);
        }
        let id = Mat2::identity(self.modulus);
        let mut x = *self;
        let mut k = 1;
        while x != id {
            x = x.mul(self);
            k += 1;
        }
        Ok(k)
    }

    pub fn is_identity(&self) -> bool {
        self.e == [1 % self.modulus.q(), 0, 0, 1 % self.modulus.q()]
    }

    pub fn is_scalar(&self) -> bool {
        self.e[1] == 0 && self.e[2] == 0 && self.e[0] == self.e[3]
    }

    pub fn is_diagonal(&self) -> bool {
        self.e[1] == 0 && self.e[2] == 0
    }

    pub fn is_upper(&self) -> bool {
        self.e[2] == 0
    }

    pub fn is_lower(&self) -> bool {
        self.e[1] == 0
    }

    /// `(1 b / 0 1)`, including the identity.
    pub fn is_strict_upper(&self) -> bool {
        let one = 1 % self.modulus.q();
        self.e[0] == one && self.e[3] == one && self.e[2] == 0
    }

    /// `(1 0 / c 1)`, including the identity.
    pub fn is_strict_lower(&self) -> bool {
        let one = 1 % self.modulus.q();
        self.e[0] == one && self.e[3] == one && self.e[1] == 0
    }

    pub fn has_shape(&self, shape: Shape) -> bool {
        match shape {
            Shape::Diag => self.is_diagonal(),
            Shape::StrictUpper => self.is_strict_upper(),
            Shape::StrictLower => self.is_strict_lower(),
        }
    }

    /// Entrywise reduction to `Z/p^jZ`.
    pub fn reduce_to(&self, j: u32) -> Result<Mat2> {
        let m = self.modulus.at_level(j)?;
        Ok(Mat2::from_raw(self.e, m))
    }

    /// Reinterprets the integer entries modulo a finer modulus with the same prime.
    pub fn lift_to(&self, target: PrimePowerModulus) -> Mat2 {
        Mat2::from_raw(self.e, target)
    }

    /// Whether `self = I mod p^j`.
    pub fn is_identity_mod(&self, j: u32) -> bool {
        let pj = self.modulus.pow_p(j);
        let one = 1 % pj;
        self.e[0] % pj == one
            && self.e[1].is_multiple_of(pj)
            && self.e[2].is_multiple_of(pj)
            && self.e[3] % pj == one
    }

    /// `c^{-1} self c`: the same linear map written in the basis given by the
    /// columns of `c`.
    pub fn conjugate_by(&self, c: &Mat2) -> Result<Mat2> {
        Ok(c.inverse()?.mul(self).mul(c))
    }

    /// Commutator `x y x^{-1} y^{-1}`.
    pub fn commutator(&self, y: &Mat2) -> Result<Mat2> {
        Ok(self.mul(y).mul(&self.inverse()?).mul(&y.inverse()?))
    }

    pub fn apply(&self, v: [u64; 2]) -> [u64; 2] {
        let m = self.modulus;
        let [a, b, c, d] = self.e;
        [
            m.add(m.mul(a, v[0]), m.mul(b, v[1])),
            m.add(m.mul(c, v[0]), m.mul(d, v[1])),
        ]
    }

    pub fn transpose(&self) -> Mat2 {
        let [a, b, c, d] = self.e;
        Mat2 {
            e: [a, c, b, d],
            modulus: self.modulus,
        }
    }

    /// `x^2 - tr x + det`.
    pub fn char_poly(&self) -> Poly {
        let m = self.modulus;
        Poly::new(
            &[
                self.det().value() as i64,
                m.neg(self.trace().value()) as i64,
                1,
            ],
            m,
        )
    }

    pub fn to_rows(&self) -> [[u64; 2]; 2] {
        [[self.e[0], self.e[1]], [self.e[2], self.e[3]]]
    }
}

/// Serialized as its integer rows `[[a, b], [c, d]]`.
impl serde::Serialize for Mat2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.e;
        write!(f, "({a} {b} / {c} {d})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u64, n: u32) -> PrimePowerModulus {
        PrimePowerModulus::new(p, n).unwrap()
    }

    #[test]
    fn unipotent_has_order_p() {
        let m = z(5, 1);
        let s = Mat2::upper_unipotent(1, m);
        assert!(s.pow(5).is_identity());
        assert_eq!(s.order().unwrap(), 5);
        assert_eq!(Mat2::upper_unipotent(1, z(5, 3)).order().unwrap(), 125);
    }

    #[test]
    fn orders_and_inverses() {
        let m = z(5, 1);
        assert_eq!(Mat2::diag(2, 1, m).order().unwrap(), 4);
        let id = Mat2::identity(m);
        assert_eq!(id.inverse().unwrap(), id);
        let x = Mat2::new(3, 7, 2, 9, z(5, 2));
        assert!(x.mul(&x.inverse().unwrap()).is_identity());
        assert_eq!(
            Mat2::new(1, 2, 2, 4, m).inverse(),
            Err(Error::NotInvertible)
        );
        assert_eq!(
            Mat2::new(5, 0, 0, 1, z(5, 2)).order(),
            Err(Error::NotInvertible)
        );
    }

    #[test]
    fn power_by_class() {
        let m = z(5, 2);
        let t = Mat2::upper_unipotent(3, m);
        assert_eq!(
            t.pow_class(m.residue(7)).unwrap(),
            Mat2::upper_unipotent(21, m)
        );
        assert_eq!(t.pow_class(m.residue(-1)).unwrap(), t.inverse().unwrap());
        let rho = Mat2::diag(2, 1, m);
        assert!(matches!(
            rho.pow_class(m.residue(2)),
            Err(Error::OrderDoesNotDivide { .. })
        ));
    }

    #[test]
    fn upper_commutator_shape() {
        let m = z(5, 1);
        let delta = Mat2::new(2, 1, 0, 1, m);
        let gamma = Mat2::upper_unipotent(1, m);
        assert_eq!(
            delta.commutator(&gamma).unwrap(),
            Mat2::upper_unipotent(1, m)
        );
    }

    #[test]
    fn char_poly_kills_matrix() {
        let m = z(7, 2);
        let x = Mat2::new(3, 10, 44, 12, m);
        let p = x.char_poly();
        assert_eq!(p.eval(0), x.det().value());
        // Cayley-Hamilton: x^2 - tr(x) x + det I = 0
        let t = x.trace().value() as i64;
        let lhs = x
            .mul(&x)
            .sub(&Mat2::new(
                t * x.raw()[0] as i64,
                t * x.raw()[1] as i64,
                t * x.raw()[2] as i64,
                t * x.raw()[3] as i64,
                m,
            ))
            .add(&Mat2::scalar(x.det().value() as i64, m));
        assert_eq!(lhs.raw(), [0; 4]);
    }
}
