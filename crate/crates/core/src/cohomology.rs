//! `Z^1`, `B^1`, `H^1` and the local subgroup `H^1_loc` for a finite
//! `G <= GL2(Z/p^nZ)` acting on `M = (Z/p^nZ)^2` by matrix multiplication.
//!
//! A cocycle is determined by its values on the generators, so the solver
//! works in generator coordinates `u in M^k`: the value at `x` is `u E_x` for a
//! `2k x 2` matrix `E_x` built along the closure tree. The relations
//! `Z_{gx} = Z_g + g Z_x` for every generator `g` and element `x` cut out `Z^1`.
//!
//! The local condition `Z_s in Im(s - 1)` is imposed through annihilators:
//! since `Z/p^nZ` is self-injective, `v in Im(s - 1)` iff `f v = 0` for every
//! row vector `f` with `f (s - 1) = 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::linalg::{
    howell_form, howell_from_raw, intersect, kernel, quotient_invariants, solve_combination,
};
use crate::linalg::{HowellBasis, ModMatrix, QuotientInvariants};
use crate::mat2::Mat2;
use crate::residue::PrimePowerModulus;

pub const DEFAULT_BUDGET: usize = 2000;

/// `G` acting on `(Z/p^nZ)^2`, with the size budget for exact computations.
#[derive(Clone, Debug)]
pub struct Action {
    group: Group,
    budget: usize,
}

impl Action {
    pub fn new(group: Group) -> Self {
        Self {
            group,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(group: Group, budget: usize) -> Self {
        Self { group, budget }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn modulus(&self) -> PrimePowerModulus {
        self.group.modulus()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    fn check_budget(&self) -> Result<()> {
        if self.group.order() > self.budget {
            return Err(Error::BudgetExceeded {
                order: self.group.order(),
                budget: self.budget,
            });
        }
        Ok(())
    }
}

/// A map `G -> M`, indexed by the closure order of its group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cocycle {
    pub values: Vec<[u64; 2]>,
    #[serde(skip)]
    modulus: Option<PrimePowerModulus>,
}

impl Cocycle {
    pub fn new(values: Vec<[u64; 2]>, modulus: PrimePowerModulus) -> Self {
        Self {
            values,
            modulus: Some(modulus),
        }
    }

    pub fn zero(g: &Group) -> Self {
        Self::new(vec![[0, 0]; g.order()], g.modulus())
    }

    /// `x -> (x - 1) w`.
    pub fn coboundary(g: &Group, w: [u64; 2]) -> Self {
        let m = g.modulus();
        let values = g
            .elements()
            .iter()
            .map(|x| sub_vec(m, x.apply(w), w))
            .collect();
        Self::new(values, m)
    }

    pub fn modulus(&self) -> PrimePowerModulus {
        self.modulus.expect("cocycle built through a constructor")
    }

    pub fn value(&self, g: &Group, x: &Mat2) -> Option<[u64; 2]> {
        g.index_of(x).map(|i| self.values[i])
    }

    /// Flattened coordinates in `M^{|G|}`.
    pub fn flat(&self) -> Vec<u64> {
        self.values.iter().flat_map(|v| v.iter().copied()).collect()
    }

    /// Checks `Z_{xy} = Z_x + x Z_y` on all pairs.
    pub fn is_cocycle(&self, g: &Group) -> bool {
        let m = g.modulus();
        if self.values.len() != g.order() {
            return false;
        }
        for (i, x) in g.elements().iter().enumerate() {
            for (j, y) in g.elements().iter().enumerate() {
                let k = g.index_of(&x.mul(y)).expect("closed group");
                if self.values[k] != add_vec(m, self.values[i], x.apply(self.values[j])) {
                    return false;
                }
            }
        }
        true
    }
}

/// Per-element witnesses `W_s` with `Z_s = (s - 1) W_s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalWitness {
    pub witnesses: Vec<[u64; 2]>,
}

impl LocalWitness {
    pub fn verify(&self, g: &Group, z: &Cocycle) -> bool {
        let m = g.modulus();
        g.elements()
            .iter()
            .zip(&self.witnesses)
            .zip(&z.values)
            .all(|((s, w), zv)| sub_vec(m, s.apply(*w), *w) == *zv)
    }
}

/// A submodule of `M^{|G|}` spanned by cocycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleSpace {
    pub basis: HowellBasis,
}

impl CocycleSpace {
    pub fn log_order(&self) -> u32 {
        self.basis.log_order()
    }

    pub fn cocycles(&self) -> Vec<Cocycle> {
        let m = self.basis.modulus();
        self.basis
            .matrix()
            .row_iter()
            .map(|r| Cocycle::new(r.chunks(2).map(|c| [c[0], c[1]]).collect(), m))
            .collect()
    }
}

fn add_vec(m: PrimePowerModulus, a: [u64; 2], b: [u64; 2]) -> [u64; 2] {
    [m.add(a[0], b[0]), m.add(a[1], b[1])]
}

fn sub_vec(m: PrimePowerModulus, a: [u64; 2], b: [u64; 2]) -> [u64; 2] {
    [m.sub(a[0], b[0]), m.sub(a[1], b[1])]
}

/// The rows of `(s - 1)^T`, so that `w (s - 1)^T` is `(s - 1) w` as a row.
fn minus_one_t(s: &Mat2) -> ModMatrix {
    let m = s.modulus();
    let t = s.sub(&Mat2::identity(m)).transpose();
    ModMatrix::from_raw_rows(t.to_rows().iter().map(|r| r.to_vec()).collect(), 2, m)
}

/// Generator-coordinate solver for one group.
pub struct CohomologyPlan<'g> {
    group: &'g Group,
    k: usize,
    /// `e[x]` is the `2k x 2` matrix `E_x`, stored as `2k` rows.
    e: Vec<Vec<[u64; 2]>>,
}

impl<'g> CohomologyPlan<'g> {
    pub fn new(act: &'g Action) -> Result<Self> {
        act.check_budget()?;
        let g = act.group();
        let m = g.modulus();
        let k = g.generators().len();
        let n = g.order();
        let mut e: Vec<Vec<[u64; 2]>> = vec![Vec::new(); n];
        e[0] = vec![[0, 0]; 2 * k];
        debug_assert!(g.elements()[0].is_identity());
        for i in 1..n {
            let (gi, src) = g.parents()[i].expect("non-identity elements have a parent");
            let gt = g.generators()[gi].transpose();
            // E_{g x} = U_g + E_x g^T
            let mut rows: Vec<[u64; 2]> = e[src].iter().map(|r| row_times(m, *r, &gt)).collect();
            rows[2 * gi][0] = m.add(rows[2 * gi][0], 1);
            rows[2 * gi + 1][1] = m.add(rows[2 * gi + 1][1], 1);
            e[i] = rows;
        }
        Ok(Self { group: g, k, e })
    }

    pub fn unknowns(&self) -> usize {
        2 * self.k
    }

    /// Constraint columns whose common kernel is `Z^1`.
    fn cocycle_columns(&self) -> Vec<Vec<u64>> {
        let g = self.group;
        let m = g.modulus();
        let mut cols = Vec::new();
        for (xi, x) in g.elements().iter().enumerate() {
            for (gi, gen) in g.generators().iter().enumerate() {
                let y = gen.mul(x);
                let yi = g.index_of(&y).expect("closed group");
                if g.parents()[yi] == Some((gi, xi)) {
                    continue;
                }
                let gt = gen.transpose();
                for c in 0..2 {
                    let col: Vec<u64> = (0..2 * self.k)
                        .map(|r| {
                            let lhs = self.e[yi][r][c];
                            let mut rhs = row_times(m, self.e[xi][r], &gt)[c];
                            if r == 2 * gi + c {
                                rhs = m.add(rhs, 1);
                            }
                            m.sub(lhs, rhs)
                        })
                        .collect();
                    if col.iter().any(|&v| v != 0) {
                        cols.push(col);
                    }
                }
            }
        }
        cols
    }

    /// Columns `E_s f^T` for every `s` and every `f` annihilating `Im(s - 1)`.
    fn local_columns(&self) -> Vec<Vec<u64>> {
        let g = self.group;
        let m = g.modulus();
        let mut cols = Vec::new();
        for (si, s) in g.elements().iter().enumerate() {
            let ann = kernel(&minus_one_t(s).transpose());
            for f in ann.matrix().row_iter() {
                let col: Vec<u64> = self.e[si]
                    .iter()
                    .map(|r| m.add(m.mul(r[0], f[0]), m.mul(r[1], f[1])))
                    .collect();
                if col.iter().any(|&v| v != 0) {
                    cols.push(col);
                }
            }
        }
        cols
    }

    fn kernel_of_columns(&self, cols: &[Vec<u64>]) -> HowellBasis {
        let m = self.group.modulus();
        let u = 2 * self.k;
        let mut rows = vec![Vec::with_capacity(cols.len()); u];
        for col in cols {
            for (r, v) in col.iter().enumerate() {
                rows[r].push(*v);
            }
        }
        if cols.is_empty() {
            return HowellBasis::full(u, m);
        }
        kernel(&ModMatrix::from_raw_rows(rows, cols.len(), m))
    }

    /// `Z^1` in generator coordinates.
    pub fn z1(&self) -> HowellBasis {
        self.kernel_of_columns(&self.cocycle_columns())
    }

    /// `B^1` in generator coordinates.
    pub fn b1(&self) -> HowellBasis {
        let g = self.group;
        let m = g.modulus();
        let rows: Vec<Vec<u64>> = [[1, 0], [0, 1]]
            .iter()
            .map(|w| {
                g.generators()
                    .iter()
                    .flat_map(|gen| sub_vec(m, gen.apply(*w), *w))
                    .collect()
            })
            .collect();
        howell_from_raw(rows, 2 * self.k, m)
    }

    /// Cocycles satisfying the local condition at every element.
    pub fn z1_loc(&self) -> HowellBasis {
        let mut cols = self.cocycle_columns();
        cols.extend(self.local_columns());
        self.kernel_of_columns(&cols)
    }

    /// Same submodule as [`Self::z1_loc`], computed as the intersection over
    /// cyclic subgroups `C` of the cocycles whose restriction to `C` is a
    /// coboundary (an auxiliary `W_C` per subgroup, constrained on all of `C`).
    pub fn z1_loc_via_cyclic(&self) -> Result<HowellBasis> {
        let g = self.group;
        let m = g.modulus();
        let u = 2 * self.k;
        let mut acc = self.z1();
        for c in g.cyclic_subgroups() {
            // unknowns (u, W): u E_x - W (x - 1)^T = 0 for x in C
            let mut cols: Vec<Vec<u64>> = Vec::new();
            for x in c.elements() {
                let xi = g.index_of(x).ok_or(Error::NotSubgroup)?;
                let t = minus_one_t(x);
                for col_idx in 0..2 {
                    let mut col: Vec<u64> = self.e[xi].iter().map(|r| r[col_idx]).collect();
                    col.push(m.neg(t.raw(0, col_idx)));
                    col.push(m.neg(t.raw(1, col_idx)));
                    cols.push(col);
                }
            }
            let mut rows = vec![Vec::with_capacity(cols.len()); u + 2];
            for col in &cols {
                for (r, v) in col.iter().enumerate() {
                    rows[r].push(*v);
                }
            }
            let ker = kernel(&ModMatrix::from_raw_rows(rows, cols.len(), m));
            let proj: Vec<Vec<u64>> = ker.matrix().row_iter().map(|r| r[..u].to_vec()).collect();
            let kc = howell_from_raw(proj, u, m);
            acc = intersect(&acc, &kc)?;
        }
        Ok(acc)
    }

    /// The full cocycle with generator values `u`.
    pub fn expand(&self, u: &[u64]) -> Cocycle {
        let m = self.group.modulus();
        let values = self
            .e
            .iter()
            .map(|ex| {
                let mut v = [0, 0];
                for (r, coef) in ex.iter().zip(u) {
                    if *coef != 0 {
                        v[0] = m.add(v[0], m.mul(*coef, r[0]));
                        v[1] = m.add(v[1], m.mul(*coef, r[1]));
                    }
                }
                v
            })
            .collect();
        Cocycle::new(values, m)
    }

    /// Generator values of a cocycle.
    pub fn coordinates(&self, z: &Cocycle) -> Vec<u64> {
        let g = self.group;
        g.generators()
            .iter()
            .flat_map(|x| z.value(g, x).expect("generator in group"))
            .collect()
    }

    /// Expands a generator-coordinate submodule to `M^{|G|}`.
    pub fn expand_space(&self, b: &HowellBasis) -> CocycleSpace {
        let m = self.group.modulus();
        let rows: Vec<Vec<u64>> = b
            .matrix()
            .row_iter()
            .map(|r| self.expand(r).flat())
            .collect();
        CocycleSpace {
            basis: howell_from_raw(rows, 2 * self.group.order(), m),
        }
    }
}

fn row_times(m: PrimePowerModulus, r: [u64; 2], a: &Mat2) -> [u64; 2] {
    let [a0, a1, a2, a3] = a.raw();
    [
        m.add(m.mul(r[0], a0), m.mul(r[1], a2)),
        m.add(m.mul(r[0], a1), m.mul(r[1], a3)),
    ]
}

/// Everything computed for one group.
#[derive(Clone, Debug)]
pub struct CohomologyReport {
    pub z1: HowellBasis,
    pub b1: HowellBasis,
    pub z1_loc: HowellBasis,
    pub h1: QuotientInvariants,
    pub h1_loc: QuotientInvariants,
}

pub fn cohomology(act: &Action) -> Result<CohomologyReport> {
    let plan = CohomologyPlan::new(act)?;
    let z1 = plan.z1();
    let b1 = plan.b1();
    let z1_loc = plan.z1_loc();
    let h1 = quotient_invariants(&b1, &z1)?;
    let h1_loc = quotient_invariants(&b1, &z1_loc)?;
    Ok(CohomologyReport {
        z1,
        b1,
        z1_loc,
        h1,
        h1_loc,
    })
}

pub fn cocycle_space(act: &Action) -> Result<CocycleSpace> {
    let plan = CohomologyPlan::new(act)?;
    Ok(plan.expand_space(&plan.z1()))
}

pub fn coboundary_space(act: &Action) -> Result<CocycleSpace> {
    let plan = CohomologyPlan::new(act)?;
    Ok(plan.expand_space(&plan.b1()))
}

pub fn h1(act: &Action) -> Result<QuotientInvariants> {
    let plan = CohomologyPlan::new(act)?;
    quotient_invariants(&plan.b1(), &plan.z1())
}

pub fn h1_loc(act: &Action) -> Result<QuotientInvariants> {
    let plan = CohomologyPlan::new(act)?;
    quotient_invariants(&plan.b1(), &plan.z1_loc())
}

/// `H^1_loc` through restriction kernels to cyclic subgroups.
pub fn h1_loc_via_cyclic(act: &Action) -> Result<QuotientInvariants> {
    let plan = CohomologyPlan::new(act)?;
    quotient_invariants(&plan.b1(), &plan.z1_loc_via_cyclic()?)
}

/// `Some(w)` with `Z_x = (x - 1) w` for all `x`, if `z` is a coboundary.
pub fn coboundary_witness(g: &Group, z: &Cocycle) -> Result<Option<[u64; 2]>> {
    let m = g.modulus();
    if z.values.len() != g.order() {
        return Err(Error::DimensionMismatch {
            expected: g.order(),
            got: z.values.len(),
        });
    }
    // w A = flat(z), A = [(x - 1)^T for x in G]
    let mut rows: Vec<Vec<u64>> = (0..2).map(|_| Vec::with_capacity(2 * g.order())).collect();
    for x in g.elements() {
        let t = minus_one_t(x);
        for (r, row) in rows.iter_mut().enumerate() {
            row.push(t.raw(r, 0));
            row.push(t.raw(r, 1));
        }
    }
    let a = ModMatrix::from_raw_rows(rows, 2 * g.order(), m);
    Ok(solve_combination(&a, &z.flat())?.map(|w| [w[0], w[1]]))
}

pub fn is_coboundary(g: &Group, z: &Cocycle) -> Result<bool> {
    Ok(coboundary_witness(g, z)?.is_some())
}

/// Witnesses for the local condition, or `None` if it fails somewhere.
pub fn local_witness(g: &Group, z: &Cocycle) -> Result<Option<LocalWitness>> {
    let mut witnesses = Vec::with_capacity(g.order());
    for (s, v) in g.elements().iter().zip(&z.values) {
        match solve_combination(&minus_one_t(s), v)? {
            Some(w) => witnesses.push([w[0], w[1]]),
            None => return Ok(None),
        }
    }
    Ok(Some(LocalWitness { witnesses }))
}

/// Restriction of a cocycle on `parent` to `sub`, in `sub`'s element order.
pub fn restrict(parent: &Group, z: &Cocycle, sub: &Group) -> Result<Cocycle> {
    if !sub.is_subgroup_of(parent) {
        return Err(Error::NotSubgroup);
    }
    let values = sub
        .elements()
        .iter()
        .map(|x| z.value(parent, x).expect("subgroup element"))
        .collect();
    Ok(Cocycle::new(values, parent.modulus()))
}

/// `x -> (alpha - 1) Z_x` for central `alpha`, checked to be a coboundary.
pub fn sah_annihilate(act: &Action, alpha: &Mat2, z: &Cocycle) -> Result<Cocycle> {
    let g = act.group();
    let m = g.modulus();
    for x in g.generators() {
        if x.mul(alpha) != alpha.mul(x) {
            return Err(Error::NotCentral);
        }
    }
    let am1 = alpha.sub(&Mat2::identity(m));
    let out = Cocycle::new(z.values.iter().map(|v| am1.apply(*v)).collect(), m);
    if !is_coboundary(g, &out)? {
        return Err(Error::Certificate(
            "(alpha - 1) Z is not a coboundary".into(),
        ));
    }
    Ok(out)
}

/// Howell basis of an explicit list of cocycles in `M^{|G|}`.
pub fn span_of(g: &Group, zs: &[Cocycle]) -> CocycleSpace {
    let m = g.modulus();
    let rows = ModMatrix::from_raw_rows(zs.iter().map(Cocycle::flat).collect(), 2 * g.order(), m);
    CocycleSpace {
        basis: howell_form(&rows),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_CAP;

    fn z(p: u64, n: u32) -> PrimePowerModulus {
        PrimePowerModulus::new(p, n).unwrap()
    }

    fn act(gens: &[Mat2], m: PrimePowerModulus) -> Action {
        Action::new(Group::close(gens, m, DEFAULT_CAP).unwrap())
    }

    #[test]
    fn trivial_group() {
        let a = act(&[], z(3, 2));
        let r = cohomology(&a).unwrap();
        assert_eq!(r.z1.log_order(), 0);
        assert!(r.h1.is_trivial() && r.h1_loc.is_trivial());
        assert_eq!(cocycle_space(&a).unwrap().log_order(), 0);
    }

    #[test]
    fn unipotent_mod_3() {
        let m = z(3, 1);
        let a = act(&[Mat2::upper_unipotent(1, m)], m);
        let r = cohomology(&a).unwrap();
        assert_eq!(r.z1.order(), Some(9));
        assert_eq!(r.b1.order(), Some(3));
        assert_eq!(r.h1.factors, vec![3]);
        assert!(r.h1_loc.is_trivial());
        let zs = cocycle_space(&a).unwrap();
        assert!(zs.cocycles().iter().all(|c| c.is_cocycle(a.group())));
        assert_eq!(coboundary_space(&a).unwrap().basis.order(), Some(3));
    }

    #[test]
    fn scalar_kills_h1() {
        let m = z(5, 2);
        let a = act(&[Mat2::scalar(2, m), Mat2::upper_unipotent(1, m)], m);
        assert!(h1(&a).unwrap().is_trivial());
        let b1 = coboundary_space(&a).unwrap();
        assert_eq!(b1.basis.order(), Some(625));
    }

    #[test]
    fn cyclic_path_agrees() {
        let m4 = z(2, 2);
        let a = act(
            &[
                Mat2::new(1, 1, 0, 1, m4),
                Mat2::new(1, 0, 2, 1, m4),
                Mat2::new(3, 0, 0, 1, m4),
            ],
            m4,
        );
        let plan = CohomologyPlan::new(&a).unwrap();
        assert_eq!(plan.z1_loc(), plan.z1_loc_via_cyclic().unwrap());
    }

    #[test]
    fn local_witnesses_and_restriction() {
        let m = z(3, 1);
        let g = Group::close(&[Mat2::upper_unipotent(1, m)], m, DEFAULT_CAP).unwrap();
        let a = Action::new(g.clone());
        let plan = CohomologyPlan::new(&a).unwrap();
        let cob = Cocycle::coboundary(&g, [1, 2]);
        assert_eq!(
            coboundary_witness(&g, &cob)
                .unwrap()
                .map(|w| Cocycle::coboundary(&g, w)),
            Some(cob.clone())
        );
        let lw = local_witness(&g, &cob).unwrap().unwrap();
        assert!(lw.verify(&g, &cob));
        // Z_sigma = (0, 1) is not in Im(sigma - 1) = <(1, 0)>
        let bad = plan.expand(&[0, 1]);
        assert!(bad.is_cocycle(&g));
        assert!(local_witness(&g, &bad).unwrap().is_none());
        let triv = Group::trivial(m);
        assert_eq!(restrict(&g, &bad, &triv).unwrap(), Cocycle::zero(&triv));
        assert_eq!(plan.coordinates(&bad), vec![0, 1]);
    }

    #[test]
    fn sah_on_scalar() {
        let m = z(5, 1);
        let a = act(&[Mat2::scalar(2, m)], m);
        let plan = CohomologyPlan::new(&a).unwrap();
        let z1 = plan.z1();
        for r in z1.matrix().row_iter() {
            let c = plan.expand(r);
            sah_annihilate(&a, &Mat2::scalar(2, m), &c).unwrap();
            assert_eq!(
                sah_annihilate(&a, &Mat2::identity(m), &c).unwrap(),
                Cocycle::zero(a.group())
            );
        }
        let d = act(&[Mat2::diag(2, 1, m)], m);
        assert_eq!(
            sah_annihilate(&d, &Mat2::upper_unipotent(1, m), &Cocycle::zero(d.group())),
            Err(Error::NotCentral)
        );
    }

    #[test]
    fn budget_is_enforced() {
        let m = z(5, 1);
        let g = Group::close(
            &[Mat2::diag(2, 1, m), Mat2::upper_unipotent(1, m)],
            m,
            DEFAULT_CAP,
        )
        .unwrap();
        let a = Action::with_budget(g, 10);
        assert!(matches!(
            h1(&a),
            Err(Error::BudgetExceeded {
                order: 20,
                budget: 10
            })
        ));
    }
}
