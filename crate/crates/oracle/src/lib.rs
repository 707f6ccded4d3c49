//! Exhaustive reference computations for cohomology of small groups.
//!
//! Shares no code with the solver beyond matrices and group closure. A map
//! `G -> M` obeying the cocycle identity is fixed by its values on a generating
//! set, so filtering every map is the same as filtering every assignment of
//! generator values after extending along a spanning tree; each candidate is
//! then checked against the identity on all pairs.

use std::collections::HashSet;

use h1loc_core::{Group, Mat2};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub z1: u128,
    pub b1: u128,
    pub z1_loc: u128,
    /// Invariant factors, ascending.
    pub h1: Vec<u64>,
    pub h1_loc: Vec<u64>,
}

struct Small {
    n: usize,
    q: u64,
    p: u64,
    mul: Vec<usize>,
    mats: Vec<Mat2>,
}

impl Small {
    fn new(g: &Group) -> Small {
        let mats = g.elements().to_vec();
        let n = mats.len();
        assert!(n <= 128, "oracle handles groups of order <= 128");
        let mut mul = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                mul[i * n + j] = g.index_of(&mats[i].mul(&mats[j])).unwrap();
            }
        }
        let m = g.modulus();
        Small {
            n,
            q: m.q(),
            p: m.p(),
            mul,
            mats,
        }
    }

    fn closure(&self, gens: &[usize]) -> u128 {
        let id = self.mats.iter().position(|x| x.is_identity()).unwrap();
        let mut set: u128 = 1 << id;
        let mut frontier = vec![id];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul[g * self.n + x];
                if set >> y & 1 == 0 {
                    set |= 1 << y;
                    frontier.push(y);
                }
            }
        }
        set
    }

    /// A generating set of least size, by exhaustive search.
    fn minimal_generators(&self) -> Vec<usize> {
        let full: u128 = if self.n == 128 {
            u128::MAX
        } else {
            (1u128 << self.n) - 1
        };
        let mut combo = Vec::new();
        for k in 0..=self.n {
            if self.search(k, 0, &mut combo, full) {
                return combo;
            }
        }
        unreachable!("the whole group generates itself")
    }

    fn search(&self, k: usize, from: usize, combo: &mut Vec<usize>, full: u128) -> bool {
        if combo.len() == k {
            return self.closure(combo) == full;
        }
        for i in from..self.n {
            combo.push(i);
            if self.search(k, i + 1, combo, full) {
                return true;
            }
            combo.pop();
        }
        false
    }

    fn act(&self, x: usize, v: [u64; 2]) -> [u64; 2] {
        let [a, b, c, d] = self.mats[x].raw();
        let q = self.q;
        [(a * v[0] + b * v[1]) % q, (c * v[0] + d * v[1]) % q]
    }
}

fn add(q: u64, a: [u64; 2], b: [u64; 2]) -> [u64; 2] {
    [(a[0] + b[0]) % q, (a[1] + b[1]) % q]
}

fn sub(q: u64, a: [u64; 2], b: [u64; 2]) -> [u64; 2] {
    [(a[0] + q - b[0]) % q, (a[1] + q - b[1]) % q]
}

fn scale(q: u64, k: u64, v: &[u8]) -> Vec<u8> {
    v.iter().map(|&x| ((x as u64 * k) % q) as u8).collect()
}

/// Invariant factors of `A / B` from the sizes of its `p^i`-torsion.
fn invariants(a: &[Vec<u8>], b: &HashSet<Vec<u8>>, p: u64, q: u64) -> Vec<u64> {
    let mut n = 0;
    let mut t = 1;
    while t < q {
        t *= p;
        n += 1;
    }
    let log_p = |mut x: u128| {
        let mut e = 0;
        while x > 1 {
            assert_eq!(x % p as u128, 0);
            x /= p as u128;
            e += 1;
        }
        e
    };
    let bsize = b.len() as u128;
    let mut torsion_logs = vec![0u32];
    for i in 1..=n {
        let k = p.pow(i);
        let killed = a.iter().filter(|v| b.contains(&scale(q, k, v))).count() as u128;
        assert_eq!(killed % bsize, 0);
        torsion_logs.push(log_p(killed / bsize));
    }
    // number of cyclic factors of exponent >= i
    let at_least: Vec<u32> = (1..=n as usize)
        .map(|i| torsion_logs[i] - torsion_logs[i - 1])
        .collect();
    let mut factors = Vec::new();
    for i in 1..=n as usize {
        let next = if i < n as usize { at_least[i] } else { 0 };
        for _ in 0..(at_least[i - 1] - next) {
            factors.push(p.pow(i as u32));
        }
    }
    factors.sort_unstable();
    factors
}

pub fn brute_force(g: &Group) -> OracleResult {
    let s = Small::new(g);
    let (n, q) = (s.n, s.q);
    let gens = s.minimal_generators();
    let k = gens.len();

    // spanning tree from the chosen generators: element = gens[gi] * parent
    let id = s.mats.iter().position(|x| x.is_identity()).unwrap();
    let mut tree: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut order = vec![id];
    let mut seen = vec![false; n];
    seen[id] = true;
    let mut head = 0;
    while head < order.len() {
        let x = order[head];
        head += 1;
        for (gi, &gen) in gens.iter().enumerate() {
            let y = s.mul[gen * n + x];
            if !seen[y] {
                seen[y] = true;
                tree[y] = Some((gi, x));
                order.push(y);
            }
        }
    }
    assert_eq!(order.len(), n);

    // images of s - 1
    let vecs: Vec<[u64; 2]> = (0..q).flat_map(|a| (0..q).map(move |b| [a, b])).collect();
    let images: Vec<HashSet<[u64; 2]>> = (0..n)
        .map(|x| vecs.iter().map(|&w| sub(q, s.act(x, w), w)).collect())
        .collect();

    let mut z1: Vec<Vec<u8>> = Vec::new();
    let total = q.pow(2 * k as u32);
    let mut vals = vec![[0u64; 2]; n];
    for code in 0..total {
        let mut c = code;
        let mut u = vec![[0u64; 2]; k];
        for slot in u.iter_mut() {
            slot[0] = c % q;
            c /= q;
            slot[1] = c % q;
            c /= q;
        }
        vals[id] = [0, 0];
        for &y in order.iter().skip(1) {
            let (gi, x) = tree[y].unwrap();
            vals[y] = add(q, u[gi], s.act(gens[gi], vals[x]));
        }
        let holds =
            |x: usize, y: usize| vals[s.mul[x * n + y]] == add(q, vals[x], s.act(x, vals[y]));
        // generator pairs reject most candidates cheaply; survivors face every pair
        let ok = gens.iter().all(|&x| (0..n).all(|y| holds(x, y)))
            && (0..n).all(|x| (0..n).all(|y| holds(x, y)));
        if ok {
            z1.push(vals.iter().flat_map(|v| [v[0] as u8, v[1] as u8]).collect());
        }
    }

    let b1: HashSet<Vec<u8>> = vecs
        .iter()
        .map(|&w| {
            (0..n)
                .flat_map(|x| {
                    let v = sub(q, s.act(x, w), w);
                    [v[0] as u8, v[1] as u8]
                })
                .collect()
        })
        .collect();

    let z1_loc: Vec<Vec<u8>> = z1
        .iter()
        .filter(|z| (0..n).all(|x| images[x].contains(&[z[2 * x] as u64, z[2 * x + 1] as u64])))
        .cloned()
        .collect();

    OracleResult {
        z1: z1.len() as u128,
        b1: b1.len() as u128,
        z1_loc: z1_loc.len() as u128,
        h1: invariants(&z1, &b1, s.p, q),
        h1_loc: invariants(&z1_loc, &b1, s.p, q),
    }
}
