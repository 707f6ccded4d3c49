//! Triangular decomposition of the Sylow p-subgroup `H_n` in a basis where a
//! lift `rho_n` is diagonal, plus closed forms for commutators of triangular
//! matrices.
//!
//! Every factor returned by [`decompose_in_hn`] is certified: it has the
//! declared shape, lies in `H_n`, and the word multiplies back to the input.

use serde::Serialize;

use crate::classify::RhoLift;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::mat2::{Mat2, Shape};
use crate::residue::PrimePowerModulus;

/// Whether `lambda1^2 != lambda2^2 mod p`, which makes both
/// `lambda1/lambda2 - lambda2/lambda1` and `lambda1/lambda2 - 1` units.
pub fn eigen_ratio_gap_is_unit(rho: &RhoLift) -> Result<bool> {
    let m = rho.matrix.modulus();
    let (l1, l2) = (rho.lambda1().value(), rho.lambda2().value());
    let r = m.mul(l1, m.inv(l2)?);
    let s = m.mul(l2, m.inv(l1)?);
    Ok(m.is_unit(m.sub(r, s)))
}

/// The four components of an element of `H*_n` along the eigenvectors of
/// conjugation by `rho_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenSplit {
    pub diag1: Mat2,
    pub diag2: Mat2,
    pub upper: Mat2,
    pub lower: Mat2,
}

impl EigenSplit {
    pub fn product(&self) -> Mat2 {
        self.diag1
            .mul(&self.diag2)
            .mul(&self.upper)
            .mul(&self.lower)
    }

    pub fn diag(&self) -> Mat2 {
        self.diag1.mul(&self.diag2)
    }

    pub fn factors(&self) -> [Mat2; 4] {
        [self.diag1, self.diag2, self.upper, self.lower]
    }
}

/// Splits `tau = I mod p^{n-1}` as `diag(1+p^{n-1}a, 1) diag(1, 1+p^{n-1}d)
/// (1 p^{n-1}b / 0 1) (1 0 / p^{n-1}c 1)`.
pub fn eigen_split(tau: &Mat2, rho: &RhoLift) -> Result<EigenSplit> {
    let m = tau.modulus();
    if rho.matrix.modulus() != m {
        return Err(Error::ModulusMismatch {
            left: m.q(),
            right: rho.matrix.modulus().q(),
        });
    }
    if m.n() < 2 {
        return Err(Error::Precondition("eigen split needs n >= 2".into()));
    }
    if !tau.is_identity_mod(m.n() - 1) {
        return Err(Error::Precondition(format!("{tau} is not I mod p^(n-1)")));
    }
    if !eigen_ratio_gap_is_unit(rho)? {
        return Err(Error::Precondition("lambda1^2 = lambda2^2 mod p".into()));
    }
    let [a, b, c, d] = tau.raw();
    let split = EigenSplit {
        diag1: Mat2::from_raw([a, 0, 0, 1], m),
        diag2: Mat2::from_raw([1, 0, 0, d], m),
        upper: Mat2::from_raw([1, b, 0, 1], m),
        lower: Mat2::from_raw([1, 0, c, 1], m),
    };
    if split.product() != *tau {
        return Err(Error::Certificate(format!(
            "eigen split of {tau} does not reassemble"
        )));
    }
    Ok(split)
}

/// Ordered product of triangular factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorWord {
    pub factors: Vec<(Mat2, Shape)>,
}

impl FactorWord {
    pub fn empty() -> Self {
        Self {
            factors: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn product(&self, m: PrimePowerModulus) -> Mat2 {
        self.factors
            .iter()
            .fold(Mat2::identity(m), |acc, (x, _)| acc.mul(x))
    }

    /// Appends a factor, dropping identities and merging equal neighbouring shapes.
    fn push(&mut self, x: Mat2, shape: Shape) {
        if x.is_identity() {
            return;
        }
        if let Some((last, s)) = self.factors.last_mut() {
            if *s == shape {
                *last = last.mul(&x);
                if last.is_identity() {
                    self.factors.pop();
                }
                return;
            }
        }
        self.factors.push((x, shape));
    }

    fn extend(&mut self, other: FactorWord) {
        for (x, s) in other.factors {
            self.push(x, s);
        }
    }

    /// Checks shape, membership in `h` and exact reassembly of `tau`.
    pub fn certify(&self, tau: &Mat2, h: &Group) -> Result<()> {
        for (x, s) in &self.factors {
            if !x.has_shape(*s) {
                return Err(Error::Certificate(format!("factor {x} is not {s:?}")));
            }
            if !h.contains(x) {
                return Err(Error::Certificate(format!(
                    "factor {x} of {tau} is not in H_n"
                )));
            }
        }
        if self.product(tau.modulus()) != *tau {
            return Err(Error::Certificate(format!(
                "factors of {tau} do not reassemble"
            )));
        }
        Ok(())
    }
}

/// Precomputed tower `H_1, ..., H_n` for repeated decompositions.
pub struct HnTower {
    rho: Vec<RhoLift>,
    levels: Vec<Group>,
    /// `lift[j][k]`: first element of `levels[j]` reducing to `levels[j-1].elements()[k]`.
    lift: Vec<Vec<Mat2>>,
}

impl HnTower {
    /// `hn` must already be written in the basis where `rho.matrix` is diagonal.
    pub fn new(hn: &Group, rho: &RhoLift) -> Result<HnTower> {
        let m = hn.modulus();
        if rho.matrix.modulus() != m {
            return Err(Error::ModulusMismatch {
                left: m.q(),
                right: rho.matrix.modulus().q(),
            });
        }
        if !rho.matrix.is_diagonal() {
            return Err(Error::Precondition("rho_n is not diagonal".into()));
        }
        if !hn.is_normalized_by(&rho.matrix)? {
            return Err(Error::Precondition("H_n is not normalized by rho_n".into()));
        }
        if !eigen_ratio_gap_is_unit(rho)? {
            return Err(Error::Precondition("lambda1^2 = lambda2^2 mod p".into()));
        }
        let n = m.n();
        let mut levels = Vec::with_capacity(n as usize);
        let mut rhos = Vec::with_capacity(n as usize);
        for j in 1..=n {
            levels.push(hn.reduce_mod(j)?);
            let rj = rho.matrix.reduce_to(j)?;
            let mj = m.at_level(j)?;
            rhos.push(RhoLift {
                matrix: rj,
                eigenvalues: (rho.lambda1().reduce_to(j)?, rho.lambda2().reduce_to(j)?),
                order: rj.order()?,
                basis_change: Mat2::identity(mj),
            });
        }
        if !levels[0].elements().iter().all(Mat2::is_strict_upper) {
            return Err(Error::Precondition(
                "H_1 is not inside <(1 1 / 0 1)>".into(),
            ));
        }
        let mut lift = vec![Vec::new()];
        for j in 1..n as usize {
            let below = &levels[j - 1];
            let mut table: Vec<Option<Mat2>> = vec![None; below.order()];
            for x in levels[j].elements() {
                let r = x.reduce_to(j as u32)?;
                let k = below.index_of(&r).ok_or(Error::NotSubgroup)?;
                if table[k].is_none() {
                    table[k] = Some(*x);
                }
            }
            lift.push(
                table
                    .into_iter()
                    .map(|t| t.expect("reduction is onto"))
                    .collect(),
            );
        }
        Ok(HnTower {
            rho: rhos,
            levels,
            lift,
        })
    }

    pub fn hn(&self) -> &Group {
        self.levels.last().expect("n >= 1")
    }

    /// Decomposes `tau in H_n` into certified triangular factors.
    pub fn decompose(&self, tau: &Mat2) -> Result<FactorWord> {
        let top = self.levels.len();
        if !self.levels[top - 1].contains(tau) {
            return Err(Error::Precondition(format!("{tau} is not in H_n")));
        }
        let word = self.decompose_at(top, tau)?;
        word.certify(tau, &self.levels[top - 1])?;
        Ok(word)
    }

    fn decompose_at(&self, level: usize, tau: &Mat2) -> Result<FactorWord> {
        let mut word = FactorWord::empty();
        if level == 1 {
            word.push(*tau, Shape::StrictUpper);
            return Ok(word);
        }
        let h = &self.levels[level - 1];
        let below = &self.levels[level - 2];
        let reduced = tau.reduce_to(level as u32 - 1)?;
        let inner = self.decompose_at(level - 1, &reduced)?;

        let mut lifted = Vec::with_capacity(inner.len());
        let mut tail = FactorWord::empty();
        for (f, shape) in &inner.factors {
            let k = below
                .index_of(f)
                .ok_or_else(|| Error::Certificate(format!("factor {f} not in H_{}", level - 1)))?;
            // a single factor is lifted by tau itself
            let lf = if inner.len() == 1 {
                *tau
            } else {
                self.lift[level - 1][k]
            };
            lifted.push(lf);
            tail.extend(self.lift_factor(level, &lf, *shape)?);
        }
        // tau = delta * prod(lifted), with delta = I mod p^{level-1}
        let prod = lifted
            .iter()
            .fold(Mat2::identity(tau.modulus()), |acc, x| acc.mul(x));
        let delta = tau.mul(&prod.inverse()?);
        word.extend(self.split_in(level, &delta, h)?);
        word.extend(tail);
        Ok(word)
    }

    fn split_in(&self, level: usize, tau: &Mat2, h: &Group) -> Result<FactorWord> {
        let s = eigen_split(tau, &self.rho[level - 1])?;
        let mut w = FactorWord::empty();
        w.push(s.diag(), Shape::Diag);
        w.push(s.upper, Shape::StrictUpper);
        w.push(s.lower, Shape::StrictLower);
        for (x, _) in &w.factors {
            if !h.contains(x) {
                return Err(Error::Certificate(format!(
                    "eigen component {x} of {tau} is not in H*_n"
                )));
            }
        }
        Ok(w)
    }

    /// Decomposes a lift of a single triangular factor from the level below.
    fn lift_factor(&self, level: usize, tau: &Mat2, shape: Shape) -> Result<FactorWord> {
        let h = &self.levels[level - 1];
        let rho = &self.rho[level - 1];
        let m = tau.modulus();
        let r = rho.matrix;
        let ri = r.inverse()?;
        let (l1, l2) = (rho.lambda1().value(), rho.lambda2().value());
        let l12 = m.mul(l1, m.inv(l2)?);
        let l21 = m.mul(l2, m.inv(l1)?);
        let class = |v: u64| m.residue(v as i64);
        let conj = |x: &Mat2| r.mul(x).mul(&ri);
        let mut w = FactorWord::empty();

        match shape {
            Shape::Diag => {
                // tau = D (1 p^{n-1}b / 0 1) (1 0 / p^{n-1}c 1)
                let comm = conj(tau).mul(&tau.inverse()?);
                let s = eigen_split(&comm, rho)?;
                let u = s.upper.pow_class(class(m.inv(m.sub(l12, 1))?))?;
                let l = s.lower.pow_class(class(m.inv(m.sub(l21, 1))?))?;
                let d = tau.mul(&l.inverse()?).mul(&u.inverse()?);
                w.push(d, Shape::Diag);
                w.push(u, Shape::StrictUpper);
                w.push(l, Shape::StrictLower);
            }
            Shape::StrictLower => {
                // tau = (1 0 / pc 1) D (1 p^{n-1}b / 0 1)
                let mu = l21;
                let g = conj(tau).mul(&tau.pow_class(class(m.neg(mu)))?);
                let s = eigen_split(&g, rho)?;
                if !s.lower.is_identity() {
                    return Err(Error::Certificate(format!("{g} has a lower component")));
                }
                let d = s.diag().pow_class(class(m.inv(m.sub(1, mu))?))?;
                let u = s.upper.pow_class(class(m.inv(m.sub(l12, mu))?))?;
                let l = tau.mul(&u.inverse()?).mul(&d.inverse()?);
                w.push(l, Shape::StrictLower);
                w.push(d, Shape::Diag);
                w.push(u, Shape::StrictUpper);
            }
            Shape::StrictUpper => {
                let n = m.n();
                let e = tau.raw()[1];
                if m.valuation(e) >= n - 1 {
                    return self.split_in(level, tau, h);
                }
                let mu = l21;
                let g1 = conj(tau).mul(&tau.pow_class(class(m.neg(mu)))?);
                let g2 = conj(&g1).mul(&g1.inverse()?);
                if !g2.is_strict_upper() {
                    return Err(Error::Certificate(format!(
                        "second commutator {g2} is not unipotent upper"
                    )));
                }
                let u = g2.raw()[1];
                let l = m.mul(m.sub(l12, l21), m.sub(l12, 1));
                let rr = m.valuation(e);
                let f = e / m.pow_p(rr);
                let pn1 = m.pow_p(n - 1);
                let diff = m.sub(u, m.mul(e, l));
                if !diff.is_multiple_of(pn1) {
                    return Err(Error::Certificate(format!(
                        "entry {u} differs from e*l by more than p^(n-1)"
                    )));
                }
                let e1 = diff / pn1;
                let lambda = m.add(l, m.mul(m.mul(m.pow_p(n - rr - 1), e1), m.inv(f)?));
                let corner = g2.pow_class(class(m.inv(lambda)?))?;
                if corner != Mat2::from_raw([1, e, 0, 1], m) {
                    return Err(Error::Certificate(format!(
                        "corner power {corner} is not (1 {e} / 0 1)"
                    )));
                }
                let rest = corner.inverse()?.mul(tau);
                let [a, _, c, d] = tau.raw();
                let expected = Mat2::from_raw(
                    [m.sub(a, m.mul(e, c)), m.neg(m.mul(e, m.sub(d, 1))), c, d],
                    m,
                );
                if rest != expected {
                    return Err(Error::Certificate(format!(
                        "remainder {rest} differs from closed form {expected}"
                    )));
                }
                w.push(corner, Shape::StrictUpper);
                w.extend(self.split_in(level, &rest, h)?);
            }
        }
        for (x, _) in &w.factors {
            if !h.contains(x) {
                return Err(Error::Certificate(format!(
                    "factor {x} of {tau} is not in H_n"
                )));
            }
        }
        Ok(w)
    }
}

/// One-shot decomposition; builds the tower each call.
pub fn decompose_in_hn(tau: &Mat2, hn: &Group, rho: &RhoLift) -> Result<FactorWord> {
    HnTower::new(hn, rho)?.decompose(tau)
}

/// Whether `D_n`, `sU_n`, `sL_n` of `hn` generate `hn`.
pub fn triangular_generation_holds(hn: &Group) -> Result<bool> {
    let s = hn.triangular_slices();
    let mut gens: Vec<Mat2> = Vec::new();
    for g in [&s.diag, &s.strict_upper, &s.strict_lower] {
        gens.extend_from_slice(g.generators());
    }
    let joined = Group::close(&gens, hn.modulus(), hn.cap())?;
    Ok(joined == *hn)
}

/// Closed form of `x y x^{-1} y^{-1}` for upper triangular `x, y`:
/// `(1, (a b' - a' b + b d' - b' d) d^{-1} d'^{-1} / 0 1)`.
pub fn upper_commutator_formula(x: &Mat2, y: &Mat2) -> Result<Mat2> {
    if !x.is_upper() || !y.is_upper() {
        return Err(Error::Precondition(
            "upper triangular inputs expected".into(),
        ));
    }
    let m = x.modulus();
    let [a, b, _, d] = x.raw();
    let [a2, b2, _, d2] = y.raw();
    let num = m.sub(
        m.add(m.sub(m.mul(a, b2), m.mul(a2, b)), m.mul(b, d2)),
        m.mul(b2, d),
    );
    let k = m.mul(num, m.mul(m.inv(d)?, m.inv(d2)?));
    Ok(Mat2::from_raw([1, k, 0, 1], m))
}

/// Lower triangular counterpart, through the swap of basis vectors.
pub fn lower_commutator_formula(x: &Mat2, y: &Mat2) -> Result<Mat2> {
    if !x.is_lower() || !y.is_lower() {
        return Err(Error::Precondition(
            "lower triangular inputs expected".into(),
        ));
    }
    let m = x.modulus();
    let swap = |z: &Mat2| {
        let [a, _, c, d] = z.raw();
        Mat2::from_raw([d, c, 0, a], m)
    };
    let k = upper_commutator_formula(&swap(x), &swap(y))?.raw()[1];
    Ok(Mat2::from_raw([1, 0, k, 1], m))
}

/// `Some(j)` when `h` is the cyclic group generated by `(1 p^j / 0 1)`.
pub fn unipotent_cyclic_exponent(h: &Group) -> Option<u32> {
    let m = h.modulus();
    let n = m.n();
    if !h.elements().iter().all(Mat2::is_strict_upper) {
        return None;
    }
    (0..=n).find(|&j| {
        let gen = Mat2::from_raw([1, m.pow_p(j) % m.q(), 0, 1], m);
        h.contains(&gen) && h.order() as u64 == m.pow_p(n - j)
    })
}

/// Lower triangular counterpart of [`unipotent_cyclic_exponent`].
pub fn lower_unipotent_cyclic_exponent(h: &Group) -> Option<u32> {
    let m = h.modulus();
    let n = m.n();
    if !h.elements().iter().all(Mat2::is_strict_lower) {
        return None;
    }
    (0..=n).find(|&j| {
        let gen = Mat2::from_raw([1, 0, m.pow_p(j) % m.q(), 1], m);
        h.contains(&gen) && h.order() as u64 == m.pow_p(n - j)
    })
}
