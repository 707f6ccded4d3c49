//! Finite subgroups of `GL2(Z/p^nZ)` held as a generator list plus the full
//! element set in breadth-first closure order.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::residue::PrimePowerModulus;

/// Maximum closure size accepted by default.
pub const DEFAULT_CAP: usize = 50_000;

#[derive(Clone, Debug)]
pub struct Group {
    modulus: PrimePowerModulus,
    generators: Vec<Mat2>,
    elements: Vec<Mat2>,
    index: FxHashMap<[u64; 4], usize>,
    /// For each element after the identity: (generator index, source element
    /// index) such that `element = generators[g] * elements[src]`.
    parents: Vec<Option<(usize, usize)>>,
    cap: usize,
}

/// The intersections of a group with the diagonal, strictly upper, strictly
/// lower, upper and lower triangular matrices.
#[derive(Clone, Debug)]
pub struct TriangularSlices {
    pub diag: Group,
    pub strict_upper: Group,
    pub strict_lower: Group,
    pub upper: Group,
    pub lower: Group,
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus
            && self.order() == other.order()
            && self.elements.iter().all(|x| other.contains(x))
    }
}

impl Eq for Group {}

impl Group {
    /// Breadth-first closure of `generators` under left multiplication.
    pub fn close(generators: &[Mat2], modulus: PrimePowerModulus, cap: usize) -> Result<Group> {
        for g in generators {
            if g.modulus() != modulus {
                return Err(Error::ModulusMismatch {
                    left: modulus.q(),
                    right: g.modulus().q(),
                });
            }
            if !g.is_invertible() {
                return Err(Error::NotInvertible);
            }
        }
        let id = Mat2::identity(modulus);
        let mut elements = vec![id];
        let mut parents = vec![None];
        let mut index = FxHashMap::default();
        index.insert(id.raw(), 0);
        let mut i = 0;
        while i < elements.len() {
            let x = elements[i];
            for (gi, g) in generators.iter().enumerate() {
                let y = g.mul(&x);
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(y.raw()) {
                    if elements.len() >= cap {
                        return Err(Error::CapExceeded { cap });
                    }
                    e.insert(elements.len());
                    elements.push(y);
                    parents.push(Some((gi, i)));
                }
            }
            i += 1;
        }
        Ok(Group {
            modulus,
            generators: generators.to_vec(),
            elements,
            index,
            parents,
            cap,
        })
    }

    pub fn trivial(modulus: PrimePowerModulus) -> Group {
        Group::close(&[], modulus, DEFAULT_CAP).expect("trivial group")
    }

    /// The subgroup whose element set is `set`, with a greedily chosen
    /// generating set. Fails with [`Error::NotSubgroup`] when `set` is not
    /// closed.
    pub fn from_elements(set: &[Mat2], modulus: PrimePowerModulus, cap: usize) -> Result<Group> {
        let cur = Group::generated_by(set, modulus, cap)?;
        let distinct: FxHashSet<[u64; 4]> = set.iter().map(|x| x.raw()).collect();
        if cur.order() != distinct.len() || !distinct.contains(&Mat2::identity(modulus).raw()) {
            return Err(Error::NotSubgroup);
        }
        Ok(cur)
    }

    /// The subgroup generated by `set`, using a greedily chosen subset of
    /// `set` as generators.
    pub fn generated_by(set: &[Mat2], modulus: PrimePowerModulus, cap: usize) -> Result<Group> {
        let mut gens: Vec<Mat2> = Vec::new();
        let mut cur = Group::close(&[], modulus, cap)?;
        for x in set {
            if !cur.contains(x) {
                gens.push(*x);
                cur = Group::close(&gens, modulus, cap)?;
            }
        }
        Ok(cur)
    }

    pub fn modulus(&self) -> PrimePowerModulus {
        self.modulus
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn parents(&self) -> &[Option<(usize, usize)>] {
        &self.parents
    }

    pub fn contains(&self, x: &Mat2) -> bool {
        x.modulus() == self.modulus && self.index.contains_key(&x.raw())
    }

    pub fn index_of(&self, x: &Mat2) -> Option<usize> {
        if x.modulus() != self.modulus {
            return None;
        }
        self.index.get(&x.raw()).copied()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_subgroup_of(&self, other: &Group) -> bool {
        self.elements.iter().all(|x| other.contains(x))
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().enumerate().all(|(i, x)| {
            self.generators[i + 1..]
                .iter()
                .all(|y| x.mul(y) == y.mul(x))
        })
    }

    pub fn is_cyclic(&self) -> bool {
        let n = self.order() as u64;
        self.elements
            .iter()
            .any(|x| x.order().expect("group element") == n)
    }

    /// Sorted raw entries; equal for equal element sets.
    pub fn element_key(&self) -> Vec<[u64; 4]> {
        let mut v: Vec<[u64; 4]> = self.elements.iter().map(|x| x.raw()).collect();
        v.sort_unstable();
        v
    }

    /// Whether `x` normalizes this group.
    pub fn is_normalized_by(&self, x: &Mat2) -> Result<bool> {
        let xi = x.inverse()?;
        Ok(self
            .generators
            .iter()
            .all(|g| self.contains(&x.mul(g).mul(&xi))))
    }

    /// `c^{-1} G c`, with elements in the same closure order as `self`.
    pub fn conjugate(&self, c: &Mat2) -> Result<Group> {
        let ci = c.inverse()?;
        let conj = |x: &Mat2| ci.mul(x).mul(c);
        let elements: Vec<Mat2> = self.elements.iter().map(conj).collect();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, x)| (x.raw(), i))
            .collect();
        Ok(Group {
            modulus: self.modulus,
            generators: self.generators.iter().map(conj).collect(),
            elements,
            index,
            parents: self.parents.clone(),
            cap: self.cap,
        })
    }

    /// Entrywise image in `GL2(Z/p^jZ)`, `1 <= j <= n`.
    pub fn reduce_mod(&self, j: u32) -> Result<Group> {
        if j == self.modulus.n() {
            return Ok(self.clone());
        }
        let m = self.modulus.at_level(j)?;
        let gens: Vec<Mat2> = self
            .generators
            .iter()
            .map(|g| g.reduce_to(j))
            .collect::<Result<_>>()?;
        Group::close(&gens, m, self.cap)
    }

    /// The set of p-power-order elements, when it is a subgroup (it then is
    /// the unique Sylow p-subgroup).
    pub fn sylow_p(&self) -> Result<Group> {
        let p = self.modulus.p();
        let max_steps = 4 * self.modulus.n() + 2;
        let is_p_elt = |x: &Mat2| {
            let mut y = *x;
            for _ in 0..=max_steps {
                if y.is_identity() {
                    return true;
                }
                y = y.pow(p);
            }
            false
        };
        let set: Vec<Mat2> = self
            .elements
            .iter()
            .filter(|x| is_p_elt(x))
            .copied()
            .collect();
        let h =
            Group::from_elements(&set, self.modulus, self.cap).map_err(|_| Error::NoNormalSylow)?;
        if ((self.order() / h.order()) as u64).is_multiple_of(p) {
            return Err(Error::NoNormalSylow);
        }
        Ok(h)
    }

    fn filter_subgroup(&self, pred: impl Fn(&Mat2) -> bool) -> Group {
        let set: Vec<Mat2> = self.elements.iter().filter(|x| pred(x)).copied().collect();
        Group::from_elements(&set, self.modulus, self.cap)
            .expect("intersection of subgroups is closed")
    }

    pub fn triangular_slices(&self) -> TriangularSlices {
        TriangularSlices {
            diag: self.filter_subgroup(Mat2::is_diagonal),
            strict_upper: self.filter_subgroup(Mat2::is_strict_upper),
            strict_lower: self.filter_subgroup(Mat2::is_strict_lower),
            upper: self.filter_subgroup(Mat2::is_upper),
            lower: self.filter_subgroup(Mat2::is_lower),
        }
    }

    /// Distinct cyclic subgroups `<x>`, in order of first generator appearance.
    pub fn cyclic_subgroups(&self) -> Vec<Group> {
        let mut seen: FxHashSet<Vec<usize>> = FxHashSet::default();
        let mut out = Vec::new();
        for x in &self.elements {
            let mut idx = Vec::new();
            let mut y = *x;
            loop {
                idx.push(self.index[&y.raw()]);
                if y.is_identity() {
                    break;
                }
                y = y.mul(x);
            }
            idx.sort_unstable();
            if seen.insert(idx) {
                out.push(
                    Group::close(&[*x], self.modulus, self.cap)
                        .expect("cyclic subgroup of a closed group"),
                );
            }
        }
        out
    }

    /// Subgroup generated by all commutators `x y x^{-1} y^{-1}`.
    /// Normal closure of the commutators of the generators.
    pub fn derived_subgroup(&self) -> Group {
        let gens = &self.generators;
        let mut comms = Vec::new();
        for (i, x) in gens.iter().enumerate() {
            for y in &gens[i + 1..] {
                comms.push(x.commutator(y).expect("group element"));
            }
        }
        let conj: Vec<(Mat2, Mat2)> = gens
            .iter()
            .map(|g| (*g, g.inverse().expect("group element")))
            .collect();
        let mut h = Group::generated_by(&comms, self.modulus, self.cap)
            .expect("commutators lie in the group");
        loop {
            let mut extra: Vec<Mat2> = Vec::new();
            for x in h.generators() {
                for (g, gi) in &conj {
                    let c = g.mul(x).mul(gi);
                    if !h.contains(&c) && !extra.contains(&c) {
                        extra.push(c);
                    }
                }
            }
            if extra.is_empty() {
                return h;
            }
            h = h.join(&extra).expect("conjugates lie in the group");
        }
    }

    /// The closure of `self` together with extra generators.
    pub fn join(&self, extra: &[Mat2]) -> Result<Group> {
        let mut gens = self.generators.clone();
        gens.extend_from_slice(extra);
        Group::close(&gens, self.modulus, self.cap)
    }
}
