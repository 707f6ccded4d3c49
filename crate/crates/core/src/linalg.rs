//! Linear algebra over `Z/p^nZ`.
//!
//! Submodules of `(Z/p^nZ)^k` are represented by their Howell normal form,
//! which is unique for a given row span: two generator matrices span the same
//! submodule iff their Howell forms are entry-identical. Kernels, membership
//! and solving are all reductions against a Howell basis.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::residue::{PrimePowerModulus, Residue};

/// Dense row-major matrix over `Z/p^nZ`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ModMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
    modulus: PrimePowerModulus,
}

impl ModMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: PrimePowerModulus) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
            modulus,
        }
    }

    pub fn identity(k: usize, modulus: PrimePowerModulus) -> Self {
        let mut m = Self::zeros(k, k, modulus);
        for i in 0..k {
            m.data[i * k + i] = 1 % modulus.q();
        }
        m
    }

    /// Builds a matrix from integer rows, reducing each entry.
    pub fn from_rows<R: AsRef<[i64]>>(
        rows: &[R],
        cols: usize,
        modulus: PrimePowerModulus,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend(r.iter().map(|&x| modulus.reduce_signed(x)));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
            modulus,
        })
    }

    /// Builds a matrix from already-canonical raw rows.
    pub(crate) fn from_raw_rows(
        rows: Vec<Vec<u64>>,
        cols: usize,
        modulus: PrimePowerModulus,
    ) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in &rows {
            debug_assert_eq!(r.len(), cols);
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
            modulus,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> PrimePowerModulus {
        self.modulus
    }

    pub fn get(&self, i: usize, j: usize) -> Residue {
        Residue::new(self.data[i * self.cols + j] as i64, self.modulus)
    }

    pub fn raw(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: u64) {
        self.data[i * self.cols + j] = self.modulus.reduce(value);
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[u64]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn push_row(&mut self, row: &[u64]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: row.len(),
            });
        }
        self.data
            .extend(row.iter().map(|&x| self.modulus.reduce(x)));
        self.rows += 1;
        Ok(())
    }

    pub fn transpose(&self) -> ModMatrix {
        let mut t = ModMatrix::zeros(self.cols, self.rows, self.modulus);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// Row vector times matrix: `v * self`.
    pub fn left_apply(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: v.len(),
            });
        }
        let m = self.modulus;
        let mut out = vec![0u64; self.cols];
        for (i, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(self.row(i)) {
                *o = m.add(*o, m.mul(c, x));
            }
        }
        Ok(out)
    }

    pub fn mul(&self, rhs: &ModMatrix) -> Result<ModMatrix> {
        if self.modulus != rhs.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.q(),
                right: rhs.modulus.q(),
            });
        }
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: rhs.rows,
            });
        }
        let mut out = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            out.extend(rhs.left_apply(self.row(i))?);
        }
        Ok(ModMatrix {
            rows: self.rows,
            cols: rhs.cols,
            data: out,
            modulus: self.modulus,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// A submodule of `(Z/p^nZ)^cols` in Howell normal form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HowellBasis {
    matrix: ModMatrix,
    pivots: Vec<usize>,
}

impl HowellBasis {
    pub fn matrix(&self) -> &ModMatrix {
        &self.matrix
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn len(&self) -> usize {
        self.matrix.rows
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.rows == 0
    }

    pub fn ambient_dim(&self) -> usize {
        self.matrix.cols
    }

    pub fn modulus(&self) -> PrimePowerModulus {
        self.matrix.modulus
    }

    /// `log_p` of the number of elements in the span.
    pub fn log_order(&self) -> u32 {
        let m = self.matrix.modulus;
        self.pivots
            .iter()
            .enumerate()
            .map(|(i, &c)| m.n() - m.valuation(self.matrix.raw(i, c)))
            .sum()
    }

    /// Number of elements in the span, if it fits in a `u128`.
    pub fn order(&self) -> Option<u128> {
        (self.modulus().p() as u128).checked_pow(self.log_order())
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool> {
        Ok(solve_membership(self, v)?.is_some())
    }

    /// Whether every row of `self` lies in `other`.
    pub fn is_submodule_of(&self, other: &HowellBasis) -> Result<bool> {
        for r in self.matrix.row_iter() {
            if !other.contains(r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn zero(cols: usize, modulus: PrimePowerModulus) -> Self {
        Self {
            matrix: ModMatrix::zeros(0, cols, modulus),
            pivots: vec![],
        }
    }

    pub fn full(cols: usize, modulus: PrimePowerModulus) -> Self {
        howell_form(&ModMatrix::identity(cols, modulus))
    }
}

/// Core Howell elimination on raw rows. Returns the canonical rows and their
/// pivot columns.
fn howell_raw(
    rows: Vec<Vec<u64>>,
    cols: usize,
    m: PrimePowerModulus,
) -> (Vec<Vec<u64>>, Vec<usize>) {
    let p = m.p();
    let mut pool: Vec<Vec<u64>> = rows
        .into_iter()
        .filter(|r| r.iter().any(|&x| x != 0))
        .collect();
    let mut out: Vec<Vec<u64>> = Vec::new();
    let mut pivots = Vec::new();

    for c in 0..cols {
        if pool.is_empty() {
            break;
        }
        // lowest valuation in this column; first such row on ties
        let mut best: Option<(usize, u32)> = None;
        for (i, r) in pool.iter().enumerate() {
            if r[c] != 0 {
                let v = m.valuation(r[c]);
                if best.is_none_or(|(_, bv)| v < bv) {
                    best = Some((i, v));
                    if v == 0 {
                        break;
                    }
                }
            }
        }
        let Some((bi, v)) = best else { continue };
        let mut piv = pool.swap_remove(bi);

        let pv = p.pow(v);
        let unit = piv[c] / pv;
        if unit != 1 {
            let inv = m.inv(unit).expect("unit part is invertible");
            for x in piv[c..].iter_mut() {
                *x = m.mul(*x, inv);
            }
        }
        debug_assert_eq!(piv[c], pv);

        for r in pool.iter_mut() {
            if r[c] != 0 {
                let k = r[c] / pv;
                for j in c..cols {
                    if piv[j] != 0 {
                        r[j] = m.sub(r[j], m.mul(k, piv[j]));
                    }
                }
                debug_assert_eq!(r[c], 0);
            }
        }
        if v > 0 {
            let s = m.pow_p(m.n() - v);
            let ann: Vec<u64> = piv.iter().map(|&x| m.mul(x, s)).collect();
            if ann.iter().any(|&x| x != 0) {
                pool.push(ann);
            }
        }
        for o in out.iter_mut() {
            if o[c] >= pv {
                let k = o[c] / pv;
                for j in c..cols {
                    if piv[j] != 0 {
                        o[j] = m.sub(o[j], m.mul(k, piv[j]));
                    }
                }
            }
        }
        out.push(piv);
        pivots.push(c);
        pool.retain(|r| r.iter().any(|&x| x != 0));
    }
    (out, pivots)
}

/// Howell normal form of the row span of `m`.
pub fn howell_form(m: &ModMatrix) -> HowellBasis {
    let rows: Vec<Vec<u64>> = m.row_iter().map(|r| r.to_vec()).collect();
    howell_from_raw(rows, m.cols, m.modulus)
}

pub(crate) fn howell_from_raw(
    rows: Vec<Vec<u64>>,
    cols: usize,
    modulus: PrimePowerModulus,
) -> HowellBasis {
    let (out, pivots) = howell_raw(rows, cols, modulus);
    HowellBasis {
        matrix: ModMatrix::from_raw_rows(out, cols, modulus),
        pivots,
    }
}

/// Expresses `v` as a combination of the rows of `basis`, or returns `None`
/// when `v` is outside the span.
pub fn solve_membership(basis: &HowellBasis, v: &[u64]) -> Result<Option<Vec<Residue>>> {
    let m = basis.modulus();
    if v.len() != basis.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.ambient_dim(),
            got: v.len(),
        });
    }
    let mut w: Vec<u64> = v.iter().map(|&x| m.reduce(x)).collect();
    let mut coeffs = vec![m.zero(); basis.len()];
    let mut start = 0;
    for (i, &c) in basis.pivots.iter().enumerate() {
        if w[start..c].iter().any(|&x| x != 0) {
            return Ok(None);
        }
        let row = basis.matrix.row(i);
        let pv = row[c];
        if !w[c].is_multiple_of(pv) {
            return Ok(None);
        }
        let k = w[c] / pv;
        if k != 0 {
            for j in c..w.len() {
                w[j] = m.sub(w[j], m.mul(k, row[j]));
            }
        }
        coeffs[i] = m.residue(k as i64);
        start = c + 1;
    }
    if w.iter().any(|&x| x != 0) {
        return Ok(None);
    }
    Ok(Some(coeffs))
}

/// `{x : x * m = 0}` as a Howell basis of `(Z/p^nZ)^{rows(m)}`.
pub fn kernel(m: &ModMatrix) -> HowellBasis {
    let (r, c) = (m.rows, m.cols);
    let q = m.modulus;
    let rows: Vec<Vec<u64>> = (0..r)
        .map(|i| {
            let mut row = Vec::with_capacity(c + r);
            row.extend_from_slice(m.row(i));
            row.extend((0..r).map(|j| if i == j { 1 % q.q() } else { 0 }));
            row
        })
        .collect();
    let (h, pivots) = howell_raw(rows, c + r, q);
    let ker: Vec<Vec<u64>> = h
        .into_iter()
        .zip(pivots)
        .filter(|(_, pc)| *pc >= c)
        .map(|(row, _)| row[c..].to_vec())
        .collect();
    howell_from_raw(ker, r, q)
}

/// Intersection of two submodules of the same ambient module.
pub fn intersect(a: &HowellBasis, b: &HowellBasis) -> Result<HowellBasis> {
    let m = a.modulus();
    if b.modulus() != m {
        return Err(Error::ModulusMismatch {
            left: m.q(),
            right: b.modulus().q(),
        });
    }
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: a.ambient_dim(),
            got: b.ambient_dim(),
        });
    }
    let cols = a.ambient_dim();
    let rows: Vec<Vec<u64>> = a
        .matrix
        .row_iter()
        .chain(b.matrix.row_iter())
        .map(|r| r.to_vec())
        .collect();
    let stacked = ModMatrix::from_raw_rows(rows, cols, m);
    // x A + y B = 0 gives x A in both spans
    let ker = kernel(&stacked);
    let na = a.len();
    let out: Vec<Vec<u64>> = ker
        .matrix
        .row_iter()
        .map(|k| {
            let mut v = vec![0; cols];
            for (i, &coef) in k[..na].iter().enumerate() {
                if coef != 0 {
                    for (j, &x) in a.matrix.row(i).iter().enumerate() {
                        v[j] = m.add(v[j], m.mul(coef, x));
                    }
                }
            }
            v
        })
        .collect();
    Ok(howell_from_raw(out, cols, m))
}

/// Finds `t` with `t * gens = v`, i.e. coefficients with respect to the
/// original (not Howell-reduced) generators.
pub fn solve_combination(gens: &ModMatrix, v: &[u64]) -> Result<Option<Vec<u64>>> {
    let (r, c) = (gens.rows, gens.cols);
    let m = gens.modulus;
    if v.len() != c {
        return Err(Error::DimensionMismatch {
            expected: c,
            got: v.len(),
        });
    }
    let rows: Vec<Vec<u64>> = (0..r)
        .map(|i| {
            let mut row = Vec::with_capacity(c + r);
            row.extend_from_slice(gens.row(i));
            row.extend((0..r).map(|j| if i == j { 1 % m.q() } else { 0 }));
            row
        })
        .collect();
    let (h, pivots) = howell_raw(rows, c + r, m);
    let mut w: Vec<u64> = v.iter().map(|&x| m.reduce(x)).collect();
    w.extend(std::iter::repeat_n(0, r));
    let mut start = 0;
    for (row, pc) in h.iter().zip(pivots) {
        if pc >= c {
            break;
        }
        if w[start..pc].iter().any(|&x| x != 0) {
            return Ok(None);
        }
        let pv = row[pc];
        if !w[pc].is_multiple_of(pv) {
            return Ok(None);
        }
        let k = w[pc] / pv;
        if k != 0 {
            for j in pc..w.len() {
                w[j] = m.sub(w[j], m.mul(k, row[j]));
            }
        }
        start = pc + 1;
    }
    if w[..c].iter().any(|&x| x != 0) {
        return Ok(None);
    }
    Ok(Some(w[c..].iter().map(|&x| m.neg(x)).collect()))
}

/// Valuations of the nonzero Smith diagonal of `rows` (over a local ring the
/// Smith form is `diag(p^{e_1}, ..., p^{e_r}, 0, ...)`).
fn smith_valuations(mut a: Vec<Vec<u64>>, cols: usize, m: PrimePowerModulus) -> Vec<u32> {
    let p = m.p();
    let mut vals = Vec::new();
    let mut t = 0;
    loop {
        let mut best: Option<(usize, usize, u32)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 {
                    let v = m.valuation(x);
                    if best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let Some((bi, bj, v)) = best else { break };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        let pv = p.pow(v);
        let inv = m.inv(a[t][t] / pv).expect("unit part");
        for x in a[t].iter_mut() {
            *x = m.mul(*x, inv);
        }
        let piv = a[t].clone();
        for row in a.iter_mut().skip(t + 1) {
            if row[t] != 0 {
                let k = row[t] / pv;
                for j in t..cols {
                    row[j] = m.sub(row[j], m.mul(k, piv[j]));
                }
            }
        }
        // column elimination only touches row t once the column below is clear
        a[t][t + 1..cols].fill(0);
        vals.push(v);
        t += 1;
        if t >= a.len() || t >= cols {
            break;
        }
    }
    vals
}

/// Invariant factors of a finite `Z/p^nZ`-module, as prime powers.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct QuotientInvariants {
    pub p: u64,
    /// Sorted ascending; each factor is `p^e` with `e >= 1`.
    pub factors: Vec<u64>,
}

impl QuotientInvariants {
    pub fn trivial(p: u64) -> Self {
        Self { p, factors: vec![] }
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.factors.iter().map(|&f| f.ilog(self.p)).collect()
    }

    pub fn log_order(&self) -> u32 {
        self.exponents().iter().sum()
    }

    pub fn order(&self) -> Option<u128> {
        (self.p as u128).checked_pow(self.log_order())
    }

    /// Whether this module's invariants divide those of `other` in the sense
    /// of a subquotient: `self[p^i]` never exceeds `other[p^i]`.
    pub fn divides(&self, other: &QuotientInvariants) -> bool {
        let a = self.exponents();
        let b = other.exponents();
        if a.len() > b.len() {
            return false;
        }
        // both sorted ascending; compare largest against largest
        a.iter().rev().zip(b.iter().rev()).all(|(x, y)| x <= y)
    }
}

impl fmt::Display for QuotientInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.factors.iter().map(|x| format!("Z/{x}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Invariant factors of `sup / sub`.
pub fn quotient_invariants(sub: &HowellBasis, sup: &HowellBasis) -> Result<QuotientInvariants> {
    let m = sup.modulus();
    if sub.modulus() != m {
        return Err(Error::ModulusMismatch {
            left: sub.modulus().q(),
            right: m.q(),
        });
    }
    if sub.ambient_dim() != sup.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: sup.ambient_dim(),
            got: sub.ambient_dim(),
        });
    }
    let k = sup.len();
    let mut rels: Vec<Vec<u64>> = Vec::new();
    for r in sub.matrix.row_iter() {
        let coeffs = solve_membership(sup, r)?.ok_or(Error::NotContained)?;
        rels.push(coeffs.iter().map(|c| c.value()).collect());
    }
    let ker = kernel(&sup.matrix);
    rels.extend(ker.matrix.row_iter().map(|r| r.to_vec()));
    let vals = smith_valuations(rels, k, m);
    let mut exps: Vec<u32> = vals.iter().filter(|&&v| v > 0).copied().collect();
    exps.extend(std::iter::repeat_n(m.n(), k - vals.len()));
    exps.sort_unstable();
    let factors: Vec<u64> = exps.into_iter().map(|e| m.pow_p(e)).collect();
    let q = QuotientInvariants { p: m.p(), factors };
    debug_assert_eq!(q.log_order() + sub.log_order(), sup.log_order());
    Ok(q)
}
