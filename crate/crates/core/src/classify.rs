//! Shape of the mod-p image and diagonal lifts of its semisimple part.
//!
//! [`classify_g1`] searches `GL2(F_p)` for a basis in which the mod-p image is
//! either `<rho>` or `<rho, sigma>`, with `rho` diagonal (distinct eigenvalues,
//! or the identity) and `sigma = (1 1 / 0 1)`. [`diagonal_rho_lift`] then
//! produces a diagonal element of the full group reducing to `rho`, of the same
//! order, in a basis obtained by Hensel-lifting the eigenvalues.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::hensel::hensel_lift_roots;
use crate::mat2::Mat2;
use crate::residue::{PrimePowerModulus, Residue};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum G1Form {
    /// `<rho>` with `rho` diagonal.
    CyclicDiag,
    /// `<rho, sigma>`.
    DiagPlusUnipotent,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub form: G1Form,
    /// Mod-p diagonal part, in the new basis. `None` for [`G1Form::Other`].
    pub rho: Option<Mat2>,
    pub order_rho: u64,
    pub lambda1: Option<u64>,
    pub lambda2: Option<u64>,
    /// Columns are the new basis vectors: `basis_change^{-1} g basis_change`
    /// is in normal form.
    pub basis_change: Option<Mat2>,
}

impl Classification {
    pub fn is_normal_form(&self) -> bool {
        self.form != G1Form::Other
    }

    fn other() -> Self {
        Self {
            form: G1Form::Other,
            rho: None,
            order_rho: 0,
            lambda1: None,
            lambda2: None,
            basis_change: None,
        }
    }
}

/// All of `GL2(F_p)` in lexicographic entry order.
pub fn gl2_fp(m: PrimePowerModulus) -> Vec<Mat2> {
    assert_eq!(m.n(), 1, "gl2_fp expects a prime modulus");
    let p = m.p() as i64;
    let mut out = Vec::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    let x = Mat2::new(a, b, c, d, m);
                    if x.is_invertible() {
                        out.push(x);
                    }
                }
            }
        }
    }
    out
}

/// Checks whether the conjugated element set `s` has the required normal form.
fn normal_form(s: &[Mat2], p: u64) -> Option<(G1Form, Mat2)> {
    if !s.iter().all(Mat2::is_upper) {
        return None;
    }
    let has_unipotent = s.iter().any(|x| x.is_strict_upper() && !x.is_identity());
    let diag: Vec<&Mat2> = s.iter().filter(|x| x.is_diagonal()).collect();
    if !has_unipotent && diag.len() != s.len() {
        return None;
    }
    if has_unipotent && diag.len() as u64 * p != s.len() as u64 {
        return None;
    }
    let n = diag.len() as u64;
    // a generator of the diagonal part, smallest eigenvalue pair first
    let mut rho: Option<Mat2> = None;
    for x in &diag {
        if x.order().ok()? == n
            && rho.is_none_or(|r| (x.raw()[0], x.raw()[3]) < (r.raw()[0], r.raw()[3]))
        {
            rho = Some(**x);
        }
    }
    let rho = rho?;
    if !rho.is_identity() && rho.raw()[0] == rho.raw()[3] {
        return None;
    }
    let form = if has_unipotent {
        G1Form::DiagPlusUnipotent
    } else {
        G1Form::CyclicDiag
    };
    Some((form, rho))
}

/// Classifies the mod-p image of `g` by exhausting conjugators in `GL2(F_p)`,
/// identity first, then lexicographic.
pub fn classify_g1(g: &Group) -> Result<Classification> {
    let g1 = g.reduce_mod(1)?;
    let m = g1.modulus();
    let id = Mat2::identity(m);
    let candidates = std::iter::once(id).chain(gl2_fp(m).into_iter().filter(|c| *c != id));
    for c in candidates {
        let ci = c.inverse()?;
        if !g1.generators().iter().all(|x| ci.mul(x).mul(&c).is_upper()) {
            continue;
        }
        let s: Vec<Mat2> = g1.elements().iter().map(|x| ci.mul(x).mul(&c)).collect();
        if let Some((form, rho)) = normal_form(&s, m.p()) {
            return Ok(Classification {
                form,
                rho: Some(rho),
                order_rho: rho.order()?,
                lambda1: Some(rho.raw()[0]),
                lambda2: Some(rho.raw()[3]),
                basis_change: Some(c),
            });
        }
    }
    Ok(Classification::other())
}

/// Whether some nonzero vector of `F_p^2` is fixed by the mod-p image of `g`.
pub fn fixed_point_exact_order_p(g: &Group) -> Result<bool> {
    let p = g.modulus().p();
    let gens: Vec<Mat2> = g
        .generators()
        .iter()
        .map(|x| x.reduce_to(1))
        .collect::<Result<_>>()?;
    for x in 0..p {
        for y in 0..p {
            if (x, y) != (0, 0) && gens.iter().all(|h| h.apply([x, y]) == [x, y]) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Whether the mod-p image of `g` maps some line of `F_p^2` to itself.
pub fn stabilizes_line_mod_p(g: &Group) -> Result<bool> {
    let fp = g.modulus().at_level(1)?;
    let p = fp.p();
    let gens: Vec<Mat2> = g
        .generators()
        .iter()
        .map(|x| x.reduce_to(1))
        .collect::<Result<_>>()?;
    let lines = (0..p).map(|t| [1, t]).chain(std::iter::once([0, 1]));
    for v in lines {
        let stable = gens.iter().all(|h| {
            let w = h.apply(v);
            // w parallel to v
            fp.sub(fp.mul(w[0], v[1]), fp.mul(w[1], v[0])) == 0
        });
        if stable {
            return Ok(true);
        }
    }
    Ok(false)
}

/// A diagonal lift of the mod-p semisimple part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoLift {
    pub matrix: Mat2,
    pub eigenvalues: (Residue, Residue),
    pub order: u64,
    /// Conjugating the input by this matrix puts `matrix` inside it.
    pub basis_change: Mat2,
}

impl RhoLift {
    pub fn lambda1(&self) -> Residue {
        self.eigenvalues.0
    }

    pub fn lambda2(&self) -> Residue {
        self.eigenvalues.1
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn mod_p_eigenbasis(x1: &Mat2) -> Result<(u64, u64, Mat2)> {
    let fp = x1.modulus();
    let p = fp.p();
    if x1.is_diagonal() {
        let [a, _, _, d] = x1.raw();
        if a == d {
            return Err(Error::NoRhoLift);
        }
        return Ok((a, d, Mat2::identity(fp)));
    }
    let cp = x1.char_poly();
    let roots: Vec<u64> = (0..p).filter(|&r| cp.eval(r) == 0).collect();
    if roots.len() != 2 {
        return Err(Error::NoRhoLift);
    }
    let vec_for = |r: u64| {
        let [a, b, c, d] = x1.raw();
        let ar = fp.sub(a, r);
        if ar != 0 || b != 0 {
            [b, fp.neg(ar)]
        } else {
            [fp.sub(d, r), fp.neg(c)]
        }
    };
    let v1 = vec_for(roots[0]);
    let v2 = vec_for(roots[1]);
    let c = Mat2::from_raw([v1[0], v2[0], v1[1], v2[1]], fp);
    Ok((roots[0], roots[1], c))
}

/// Diagonal lift of a single matrix whose reduction mod p has two distinct
/// eigenvalues in `F_p`.
pub fn diagonal_lift_of(x: &Mat2) -> Result<RhoLift> {
    let m = x.modulus();
    let p = m.p();
    let x1 = x.reduce_to(1)?;
    let (l1, l2, c1) = mod_p_eigenbasis(&x1)?;
    let c = c1.lift_to(m);
    let y = x.conjugate_by(&c)?;

    let cp = y.char_poly();
    let mu1 = hensel_lift_roots(&cp, m.residue(l1 as i64))?.value();
    let mu2 = hensel_lift_roots(&cp, m.residue(l2 as i64))?.value();
    let [a, b, cc, d] = y.raw();
    let t1 = m.mul(m.neg(cc), m.inv(m.sub(d, mu1))?);
    let t2 = m.mul(m.neg(b), m.inv(m.sub(a, mu2))?);
    let q = Mat2::from_raw([1, t2, t1, 1], m);
    let diag = y.conjugate_by(&q)?;
    if diag != Mat2::from_raw([mu1, 0, 0, mu2], m) {
        return Err(Error::Certificate(format!(
            "eigenbasis does not diagonalize {y}"
        )));
    }

    let fp = m.at_level(1)?;
    let rho = Mat2::from_raw([l1, 0, 0, l2], fp);
    let order_rho = rho.order()?;
    let full = diag.order()?;
    let pk = full / order_rho;
    // e = 1 mod order(rho), e = 0 mod p^k
    let e = if order_rho == 1 {
        0
    } else {
        let mut inv = 1;
        while (pk % order_rho) * inv % order_rho != 1 {
            inv += 1;
        }
        pk * inv
    };
    debug_assert_eq!(gcd(pk, order_rho), 1);
    debug_assert!(pk == 1 || pk % p == 0);
    let lifted = diag.pow(e);
    debug_assert_eq!(lifted.reduce_to(1)?, rho);
    let [r1, _, _, r2] = lifted.raw();
    Ok(RhoLift {
        matrix: lifted,
        eigenvalues: (m.residue(r1 as i64), m.residue(r2 as i64)),
        order: lifted.order()?,
        basis_change: c.mul(&q),
    })
}

/// Diagonal lift of `rho` inside `g`, when the mod-p image is in normal form
/// with `rho != I`.
pub fn diagonal_rho_lift(g: &Group) -> Result<RhoLift> {
    let cls = classify_g1(g)?;
    diagonal_rho_lift_with(g, &cls)
}

pub fn diagonal_rho_lift_with(g: &Group, cls: &Classification) -> Result<RhoLift> {
    let (Some(rho), Some(c1)) = (cls.rho, cls.basis_change) else {
        return Err(Error::NoRhoLift);
    };
    if rho.is_identity() {
        return Err(Error::NoRhoLift);
    }
    let m = g.modulus();
    let c = c1.lift_to(m);
    let conj = g.conjugate(&c)?;
    let x = conj
        .elements()
        .iter()
        .find(|x| x.reduce_to(1).map(|r| r == rho).unwrap_or(false))
        .ok_or(Error::NoRhoLift)?;
    let lift = diagonal_lift_of(x)?;
    // x is already diagonal mod p, so its eigenbasis change is trivial mod p
    let basis_change = c.mul(&lift.basis_change);
    Ok(RhoLift {
        basis_change,
        ..lift
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_CAP;

    fn z(p: u64, n: u32) -> PrimePowerModulus {
        PrimePowerModulus::new(p, n).unwrap()
    }

    fn grp(gens: &[Mat2]) -> Group {
        Group::close(gens, gens[0].modulus(), DEFAULT_CAP).unwrap()
    }

    #[test]
    fn classify_examples() {
        let m5 = z(5, 1);
        let c = classify_g1(&grp(&[Mat2::diag(2, 1, m5)])).unwrap();
        assert_eq!(c.form, G1Form::CyclicDiag);
        assert_eq!(c.order_rho, 4);
        assert_eq!((c.lambda1, c.lambda2), (Some(2), Some(1)));
        assert_eq!(c.basis_change, Some(Mat2::identity(m5)));

        let s = classify_g1(&grp(&[Mat2::upper_unipotent(1, m5)])).unwrap();
        assert_eq!(s.form, G1Form::DiagPlusUnipotent);
        assert!(s.rho.unwrap().is_identity());
        assert_eq!(s.order_rho, 1);
    }

    #[test]
    fn full_gl2_is_other() {
        let m5 = z(5, 1);
        let gl = grp(&[Mat2::new(2, 0, 0, 1, m5), Mat2::new(-1, 1, -1, 0, m5)]);
        assert_eq!(gl.order(), 480);
        assert_eq!(gl2_fp(m5).len(), 480);
        assert_eq!(classify_g1(&gl).unwrap().form, G1Form::Other);
    }

    #[test]
    fn conjugated_forms_are_found() {
        let m7 = z(7, 1);
        let c = Mat2::new(1, 3, 2, 5, m7);
        let ci = c.inverse().unwrap();
        let g = grp(&[
            ci.mul(&Mat2::diag(3, 1, m7)).mul(&c),
            ci.mul(&Mat2::upper_unipotent(2, m7)).mul(&c),
        ]);
        let cls = classify_g1(&g).unwrap();
        assert_eq!(cls.form, G1Form::DiagPlusUnipotent);
        assert_eq!(cls.order_rho, 6);
        assert_eq!(cls.lambda2, Some(1));
        // scalar diagonal part is not the normal form
        let h = grp(&[Mat2::diag(3, 3, m7), Mat2::upper_unipotent(1, m7)]);
        assert_eq!(classify_g1(&h).unwrap().form, G1Form::Other);
    }

    #[test]
    fn fixed_points_and_lines() {
        let m3 = z(3, 1);
        let m5 = z(5, 1);
        assert!(fixed_point_exact_order_p(&grp(&[Mat2::upper_unipotent(1, m3)])).unwrap());
        assert!(!fixed_point_exact_order_p(&grp(&[Mat2::scalar(2, m5)])).unwrap());
        assert!(fixed_point_exact_order_p(&grp(&[Mat2::diag(2, 1, m5)])).unwrap());

        assert!(stabilizes_line_mod_p(&grp(&[Mat2::new(2, 1, 0, 3, m5)])).unwrap());
        assert!(stabilizes_line_mod_p(&Group::trivial(m5)).unwrap());
        let gl = grp(&[Mat2::new(2, 0, 0, 1, m5), Mat2::new(-1, 1, -1, 0, m5)]);
        assert!(!stabilizes_line_mod_p(&gl).unwrap());
    }

    #[test]
    fn lift_of_diagonal_generator() {
        let m5 = z(5, 1);
        let g = grp(&[Mat2::diag(2, 3, m5)]);
        let l = diagonal_rho_lift(&g).unwrap();
        assert_eq!(l.basis_change, Mat2::identity(m5));
        assert_eq!(l.matrix, Mat2::diag(2, 3, m5));
        assert_eq!(l.order, 4);
    }

    #[test]
    fn lift_takes_p_power() {
        let m25 = z(5, 2);
        // (2 0 / 0 1) mod 25 has order 20
        let x = Mat2::diag(2, 1, m25);
        assert_eq!(x.order().unwrap(), 20);
        let g = grp(&[x]);
        let l = diagonal_rho_lift(&g).unwrap();
        assert_eq!(l.order, 4);
        assert_eq!(l.matrix.reduce_to(1).unwrap(), Mat2::diag(2, 1, z(5, 1)));
        assert!(l.matrix.is_diagonal());
        assert!(g.conjugate(&l.basis_change).unwrap().contains(&l.matrix));
    }

    #[test]
    fn no_lift_for_identity_rho() {
        let m5 = z(5, 2);
        let g = grp(&[Mat2::upper_unipotent(1, m5)]);
        assert_eq!(diagonal_rho_lift(&g), Err(Error::NoRhoLift));
    }

    #[test]
    fn lift_of_non_diagonal_matrix() {
        let m = z(7, 3);
        let c = Mat2::new(2, 5, 1, 3, m);
        let x = c
            .inverse()
            .unwrap()
            .mul(&Mat2::new(3, 14, 49, 5, m))
            .mul(&c);
        let l = diagonal_lift_of(&x).unwrap();
        let y = x.conjugate_by(&l.basis_change).unwrap();
        assert!(y.is_diagonal());
        assert_eq!(l.order, 6);
        assert_eq!(
            x.conjugate_by(&l.basis_change)
                .unwrap()
                .pow(7 * 7)
                .reduce_to(1)
                .unwrap()
                .order()
                .unwrap(),
            6
        );
    }
}
