//! Subgroups of `GL2(Z/p^nZ)`: exhaustive enumeration for small ambient
//! groups and seeded random sampling for larger ones.
//!
//! Exhaustive mode works on element indices with a full multiplication table.
//! Starting from the trivial group, every known subgroup is extended by every
//! cyclic subgroup it does not contain; results are deduplicated by element set.
//! Every subgroup is reached, since it is the join of a chain of cyclic subgroups.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::mat2::Mat2;
use crate::residue::PrimePowerModulus;

/// Ambient groups above this order are refused by [`enumerate_subgroups`].
pub const DEFAULT_EXHAUSTIVE_BOUND: usize = 4000;

/// `|GL2(Z/p^nZ)| = p^{4(n-1)} (p^2 - 1)(p^2 - p)`.
pub fn gl2_order(m: PrimePowerModulus) -> u128 {
    let p = m.p() as u128;
    p.pow(4 * (m.n() - 1)) * (p * p - 1) * (p * p - p)
}

/// All of `GL2(Z/p^nZ)` in lexicographic entry order.
pub fn gl2_elements(m: PrimePowerModulus) -> Vec<Mat2> {
    let q = m.q();
    let mut out = Vec::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    let x = Mat2::from_raw([a, b, c, d], m);
                    if x.is_invertible() {
                        out.push(x);
                    }
                }
            }
        }
    }
    out
}

struct Table {
    elements: Vec<Mat2>,
    mul: Vec<u16>,
    identity: u16,
}

impl Table {
    fn new(m: PrimePowerModulus) -> Table {
        let elements = gl2_elements(m);
        let n = elements.len();
        assert!(n < u16::MAX as usize);
        let index: FxHashMap<[u64; 4], u16> = elements
            .iter()
            .enumerate()
            .map(|(i, x)| (x.raw(), i as u16))
            .collect();
        let mut mul = vec![0u16; n * n];
        for (i, x) in elements.iter().enumerate() {
            for (j, y) in elements.iter().enumerate() {
                mul[i * n + j] = index[&x.mul(y).raw()];
            }
        }
        let identity = index[&Mat2::identity(m).raw()];
        Table {
            elements,
            mul,
            identity,
        }
    }

    fn len(&self) -> usize {
        self.elements.len()
    }

    fn prod(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.len() + b as usize]
    }

    /// Closure of `gens` as a bitset, or `None` beyond `bound` elements.
    fn close(&self, gens: &[u16], bound: usize) -> Option<(Vec<u64>, usize)> {
        let mut bits = vec![0u64; self.len().div_ceil(64)];
        let mut queue = vec![self.identity];
        set(&mut bits, self.identity);
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for &g in gens {
                let y = self.prod(g, x);
                if !get(&bits, y) {
                    set(&mut bits, y);
                    queue.push(y);
                    if queue.len() > bound {
                        return None;
                    }
                }
            }
        }
        Some((bits, queue.len()))
    }
}

fn set(bits: &mut [u64], i: u16) {
    bits[i as usize / 64] |= 1 << (i % 64);
}

fn get(bits: &[u64], i: u16) -> bool {
    bits[i as usize / 64] >> (i % 64) & 1 == 1
}

/// Every subgroup of `GL2(Z/p^nZ)`, optionally only those of order at most
/// `order_bound`. Output order: by discovery, trivial group first.
pub fn enumerate_subgroups(
    m: PrimePowerModulus,
    order_bound: Option<usize>,
    ambient_bound: usize,
) -> Result<Vec<Group>> {
    let total = gl2_order(m);
    if total > ambient_bound as u128 {
        return Err(Error::CapExceeded { cap: ambient_bound });
    }
    let t = Table::new(m);
    let bound = order_bound.unwrap_or(usize::MAX);

    // cyclic subgroups by smallest generator index
    let mut cyclic: Vec<(u16, Vec<u64>)> = Vec::new();
    let mut seen_cyclic: FxHashSet<Vec<u64>> = FxHashSet::default();
    for i in 0..t.len() as u16 {
        if let Some((bits, _)) = t.close(&[i], bound) {
            if seen_cyclic.insert(bits.clone()) {
                cyclic.push((i, bits));
            }
        }
    }

    let (triv, _) = t.close(&[], 1).expect("trivial group");
    let mut seen: FxHashSet<Vec<u64>> = FxHashSet::default();
    seen.insert(triv.clone());
    let mut found: Vec<(Vec<u64>, Vec<u16>)> = vec![(triv, Vec::new())];
    let mut head = 0;
    while head < found.len() {
        let (bits, gens) = found[head].clone();
        head += 1;
        for (c, _) in &cyclic {
            if get(&bits, *c) {
                continue;
            }
            let mut g2 = gens.clone();
            g2.push(*c);
            if let Some((b2, _)) = t.close(&g2, bound) {
                if seen.insert(b2.clone()) {
                    found.push((b2, g2));
                }
            }
        }
    }

    found
        .iter()
        .map(|(_, gens)| {
            let mats: Vec<Mat2> = gens.iter().map(|&i| t.elements[i as usize]).collect();
            Group::close(&mats, m, usize::MAX)
        })
        .collect()
}

/// Whether `det` maps `g` onto `(Z/p^nZ)^*`.
pub fn has_full_determinant(g: &Group) -> bool {
    let m = g.modulus();
    let dets: FxHashSet<u64> = g.elements().iter().map(|x| x.det().value()).collect();
    let units = m.q() - m.q() / m.p();
    dets.len() as u64 == units
}

/// Generator recipes used by the sampler, cycled in this order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// One or two uniformly random invertible matrices.
    Random,
    /// Upper triangular elements, conjugated by a random matrix.
    Borel,
    /// A diagonal lift of order at least 3 plus p-power-order elements.
    Regime,
    /// A random element together with elements of the reduction kernel.
    Kernel,
}

pub const STRATEGIES: [Strategy; 4] = [
    Strategy::Random,
    Strategy::Borel,
    Strategy::Regime,
    Strategy::Kernel,
];

pub struct Sampler {
    m: PrimePowerModulus,
    rng: ChaCha8Rng,
    cap: usize,
}

impl Sampler {
    pub fn new(m: PrimePowerModulus, seed: u64, cap: usize) -> Sampler {
        Sampler {
            m,
            rng: ChaCha8Rng::seed_from_u64(seed),
            cap,
        }
    }

    /// Uniform residue.
    pub fn entry(&mut self) -> i64 {
        self.rng.gen_range(0..self.m.q()) as i64
    }

    pub fn invertible(&mut self) -> Mat2 {
        loop {
            let x = Mat2::new(
                self.entry(),
                self.entry(),
                self.entry(),
                self.entry(),
                self.m,
            );
            if x.is_invertible() {
                return x;
            }
        }
    }

    pub fn unit(&mut self) -> i64 {
        loop {
            let u = self.entry();
            if self.m.is_unit(u as u64) {
                return u;
            }
        }
    }

    /// Uniform invertible upper triangular matrix.
    pub fn upper(&mut self) -> Mat2 {
        Mat2::new(self.unit(), self.entry(), 0, self.unit(), self.m)
    }

    /// `C diag(l1, l2) K C^{-1}` with `l1 != l2 mod p` and `K = I mod p`, so
    /// the reduction mod p has distinct eigenvalues in `F_p`. `None` for p = 2.
    pub fn split_semisimple(&mut self) -> Option<Mat2> {
        let p = self.m.p();
        if p < 3 {
            return None;
        }
        let l1 = self.rng.gen_range(1..p);
        let l2 = loop {
            let l = self.rng.gen_range(1..p);
            if l != l1 {
                break l;
            }
        };
        let c = self.invertible();
        let n = self.kernel_element();
        let d = Mat2::diag(l1 as i64, l2 as i64, self.m).mul(&n);
        Some(c.mul(&d).mul(&c.inverse().expect("invertible")))
    }

    fn kernel_element(&mut self) -> Mat2 {
        let p = self.m.p() as i64;
        let (a, b, c, d) = (self.entry(), self.entry(), self.entry(), self.entry());
        Mat2::new(1 + p * a, p * b, p * c, 1 + p * d, self.m)
    }

    /// Pairs `(l1, l2)` of Teichmueller lifts with `diag(l1, l2)` of order at
    /// least 3 and `l1^2 != l2^2 mod p`.
    fn regime_pairs(&self) -> Vec<(u64, u64)> {
        let m = self.m;
        let p = m.p();
        let teich: Vec<u64> = (1..p).map(|a| m.pow(a, m.q() / p)).collect();
        let mut out = Vec::new();
        for &x in &teich {
            for &y in &teich {
                let d = Mat2::from_raw([x, 0, 0, y], m);
                let sq_differ = m.mul(x, x) % p != m.mul(y, y) % p;
                if sq_differ && d.order().map(|o| o >= 3).unwrap_or(false) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// A regime group in the basis where the lift is diagonal, or `None` when
    /// the prime admits no such lift.
    pub fn regime_generators(&mut self) -> Option<Vec<Mat2>> {
        let pairs = self.regime_pairs();
        let &(l1, l2) = pairs.choose(&mut self.rng)?;
        let p = self.m.p() as i64;
        let mut gens = vec![Mat2::from_raw([l1, 0, 0, l2], self.m)];
        let count = self.rng.gen_range(1..=2);
        for _ in 0..count {
            let t = if self.rng.gen_bool(0.5) {
                self.rng.gen_range(0..p)
            } else {
                0
            };
            // entries chosen sparse so the p-part stays small
            let mut e = [0i64; 4];
            for v in e.iter_mut() {
                if self.rng.gen_bool(0.4) {
                    *v = self.entry();
                }
            }
            gens.push(Mat2::new(
                1 + p * e[0],
                t + p * e[1],
                p * e[2],
                1 + p * e[3],
                self.m,
            ));
        }
        Some(gens)
    }

    pub fn generators(&mut self, s: Strategy) -> Vec<Mat2> {
        match s {
            Strategy::Random => {
                let k = self.rng.gen_range(1..=2);
                (0..k).map(|_| self.invertible()).collect()
            }
            Strategy::Borel => {
                let c = self.invertible();
                let ci = c.inverse().expect("invertible");
                let k = self.rng.gen_range(1..=2);
                (0..k).map(|_| ci.mul(&self.upper()).mul(&c)).collect()
            }
            Strategy::Regime => match self.regime_generators() {
                Some(gens) => {
                    let c = self.invertible();
                    gens.iter()
                        .map(|x| x.conjugate_by(&c).expect("invertible"))
                        .collect()
                }
                None => vec![self.upper()],
            },
            Strategy::Kernel => {
                let mut g = vec![self.invertible()];
                if self.m.n() > 1 {
                    g.push(self.kernel_element());
                }
                g
            }
        }
    }

    /// Up to `count` distinct subgroups of order at most `cap`, cycling
    /// through all strategies. Gives up after `50 * count` draws.
    pub fn sample(&mut self, count: usize) -> Vec<Group> {
        self.sample_with(count, &STRATEGIES)
    }

    pub fn sample_with(&mut self, count: usize, strategies: &[Strategy]) -> Vec<Group> {
        let mut out = Vec::new();
        let mut seen: FxHashSet<Vec<[u64; 4]>> = FxHashSet::default();
        let mut attempts = 0;
        while out.len() < count && attempts < 50 * count.max(1) {
            let s = strategies[attempts % strategies.len()];
            attempts += 1;
            let gens = self.generators(s);
            if let Ok(g) = Group::close(&gens, self.m, self.cap) {
                if seen.insert(g.element_key()) {
                    out.push(g);
                }
            }
        }
        out
    }

    /// Regime groups in the diagonal basis, with their diagonal generator.
    pub fn sample_regime(&mut self, count: usize) -> Vec<(Group, Mat2)> {
        let mut out = Vec::new();
        let mut seen: FxHashSet<Vec<[u64; 4]>> = FxHashSet::default();
        let mut attempts = 0;
        while out.len() < count && attempts < 50 * count.max(1) {
            attempts += 1;
            let Some(gens) = self.regime_generators() else {
                break;
            };
            if let Ok(g) = Group::close(&gens, self.m, self.cap) {
                if seen.insert(g.element_key()) {
                    out.push((g, gens[0]));
                }
            }
        }
        out
    }
}
