//! Acceptance criteria, one pass/fail line each. Runs without the libtest
//! harness so the lines are always printed.

use std::process::{Command, ExitCode};
use std::time::Instant;

use h1loc_cli::scan::{scan, Mode, ScanConfig};
use h1loc_cli::suite::hensel_instance;
use h1loc_core::classify::{classify_g1, diagonal_rho_lift_with};
use h1loc_core::cohomology::{
    coboundary_witness, cohomology, sah_annihilate, Action, CohomologyPlan, DEFAULT_BUDGET,
};
use h1loc_core::enumerate::{
    enumerate_subgroups, gl2_order, Sampler, Strategy, DEFAULT_EXHAUSTIVE_BOUND,
};
use h1loc_core::group::DEFAULT_CAP;
use h1loc_core::mat2::Shape;
use h1loc_core::structure::{upper_commutator_formula, HnTower};
use h1loc_core::verifier::constants;
use h1loc_core::{Group, Mat2, PrimePowerModulus};
use h1loc_oracle::brute_force;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    tolerance: &'static str,
    detail: String,
}

fn modulus(p: u64, n: u32) -> PrimePowerModulus {
    PrimePowerModulus::new(p, n).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let families = [
        (2, 1, None),
        (3, 1, None),
        (2, 2, None),
        (5, 1, Some(30)),
        (3, 2, Some(30)),
    ];
    let mut detail = Vec::new();
    let mut mismatches = Vec::new();
    for (p, n, bound) in families {
        let m = modulus(p, n);
        let groups = enumerate_subgroups(m, bound, DEFAULT_EXHAUSTIVE_BOUND).unwrap();
        for g in &groups {
            let r = cohomology(&Action::with_budget(g.clone(), usize::MAX)).unwrap();
            let o = brute_force(g);
            let same = r.z1.order() == Some(o.z1)
                && r.b1.order() == Some(o.b1)
                && r.z1_loc.order() == Some(o.z1_loc)
                && r.h1.factors == o.h1
                && r.h1_loc.factors == o.h1_loc;
            if !same {
                mismatches.push(format!("Z/{} {:?}", m.q(), g.generators()));
            }
        }
        detail.push(format!("Z/{}: {}", m.q(), groups.len()));
    }
    Outcome {
        pass: mismatches.is_empty(),
        tolerance: "exact",
        detail: format!(
            "subgroups compared [{}], mismatches {} {:?}",
            detail.join(", "),
            mismatches.len(),
            mismatches.iter().take(3).collect::<Vec<_>>()
        ),
    }
}

fn scan_config(p: u64, n: u32, mode: Mode, count: usize, budget: usize) -> ScanConfig {
    ScanConfig {
        modulus: modulus(p, n),
        mode,
        count,
        seed: SEED,
        require_full_det: false,
        budget,
        cap: 2000,
        max_order: None,
        ambient_bound: DEFAULT_EXHAUSTIVE_BOUND,
        timed: false,
    }
}

fn sentinel() -> Outcome {
    let runs = [
        (2, 2, Mode::Exhaustive, 0),
        (3, 1, Mode::Exhaustive, 0),
        (5, 1, Mode::Exhaustive, 0),
        (7, 1, Mode::Exhaustive, 0),
        (3, 2, Mode::Sample, 500),
        (5, 2, Mode::Sample, 500),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (p, n, mode, count) in runs {
        // the whole ambient group must fit the budget in exhaustive mode
        let budget = match mode {
            Mode::Exhaustive => DEFAULT_BUDGET.max(gl2_order(modulus(p, n)) as usize),
            Mode::Sample => DEFAULT_BUDGET,
        };
        let (records, summary) = scan(&scan_config(p, n, mode, count, budget)).unwrap();
        let violations = records
            .iter()
            .filter(|r| r.verdict.applicable && r.h1_loc_nontrivial())
            .count();
        let unchecked = records.iter().filter(|r| r.h1_loc.is_none()).count();
        let enough = mode == Mode::Exhaustive || records.len() >= count;
        pass &= violations == 0 && unchecked == 0 && enough && summary.counts.falsified == 0;
        detail.push(format!(
            "Z/{} {:?} groups {} applicable {} violations {} unchecked {}",
            p.pow(n),
            mode,
            records.len(),
            summary.counts.applicable,
            violations,
            unchecked
        ));
    }
    Outcome {
        pass,
        tolerance: "zero violations",
        detail: detail.join("; "),
    }
}

fn witness() -> Outcome {
    let (records, _) = scan(&scan_config(2, 2, Mode::Exhaustive, 0, DEFAULT_BUDGET)).unwrap();
    let witnesses: Vec<_> = records.iter().filter(|r| r.h1_loc_nontrivial()).collect();
    let explained = witnesses
        .iter()
        .filter(|r| {
            !r.verdict.applicable
                && (r.hypotheses.has_fixed_point_exact_order_p || r.hypotheses.order_rho < 3)
        })
        .count();
    let fixed = witnesses
        .iter()
        .filter(|r| r.hypotheses.has_fixed_point_exact_order_p)
        .count();
    Outcome {
        pass: !witnesses.is_empty() && explained == witnesses.len(),
        tolerance: "exact",
        detail: format!(
            "{} of {} subgroups of GL2(Z/4) have H1_loc != 0; {} fail a hypothesis ({} with a fixed point of order 2)",
            witnesses.len(),
            records.len(),
            explained,
            fixed
        ),
    }
}

fn decomposition() -> Outcome {
    let mut regime = 0;
    let mut taus = 0usize;
    let mut failures = Vec::new();
    let mut detail = Vec::new();
    for (p, n) in [(5u64, 2u32), (3, 2)] {
        let m = modulus(p, n);
        let groups = Sampler::new(m, SEED, DEFAULT_CAP).sample_with(250, &[Strategy::Regime]);
        let mut here = 0;
        for g in &groups {
            let cls = classify_g1(g).unwrap();
            if !cls.is_normal_form() || cls.order_rho < 3 {
                continue;
            }
            here += 1;
            let rho = diagonal_rho_lift_with(g, &cls).unwrap();
            let gd = g.conjugate(&rho.basis_change).unwrap();
            let hn = gd.sylow_p().unwrap();
            let tower = HnTower::new(&hn, &rho).unwrap();
            for tau in hn.elements() {
                taus += 1;
                let ok = tower.decompose(tau).is_ok_and(|w| {
                    let shapes = w.factors.iter().all(|(x, s)| {
                        let [a, b, c, d] = x.raw();
                        match s {
                            Shape::Diag => b == 0 && c == 0,
                            Shape::StrictUpper => a == 1 && c == 0 && d == 1,
                            Shape::StrictLower => a == 1 && b == 0 && d == 1,
                        }
                    });
                    let members = w.factors.iter().all(|(x, _)| hn.contains(x));
                    let product = w
                        .factors
                        .iter()
                        .fold(Mat2::identity(m), |acc, (x, _)| acc.mul(x));
                    shapes && members && product == *tau
                });
                if !ok {
                    failures.push(format!("{tau} in {:?}", g.generators()));
                }
            }
        }
        regime += here;
        detail.push(format!("Z/{}: {} regime groups", m.q(), here));
    }
    Outcome {
        pass: regime >= 200 && failures.is_empty(),
        tolerance: "exact",
        detail: format!(
            "{}; {} elements of H_n decomposed, {} uncertified {:?} (order(rho) | 2 over Z/9, so no regime exists there)",
            detail.join(", "),
            taus,
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    }
}

/// `(1, (a b' - a' b + b d' - b' d) / (d d'); 0 1)` computed by hand.
fn hand_commutator(x: &Mat2, y: &Mat2) -> Mat2 {
    let m = x.modulus();
    let (a, b, d) = (x.a().value(), x.b().value(), x.d().value());
    let (a2, b2, d2) = (y.a().value(), y.b().value(), y.d().value());
    let num = m.sub(
        m.add(m.mul(a, b2), m.mul(b, d2)),
        m.add(m.mul(a2, b), m.mul(b2, d)),
    );
    let den = m.inv(m.mul(d, d2)).unwrap();
    Mat2::from_raw([1, m.mul(num, den), 0, 1], m)
}

/// `Some(j)` when `h = <(1 p^j / 0 1)>`.
fn cyclic_unipotent(h: &Group, lower: bool) -> Option<u32> {
    let m = h.modulus();
    let mut j = m.n();
    for x in h.elements() {
        let (off, zero) = if lower {
            (x.c(), x.b())
        } else {
            (x.b(), x.c())
        };
        if x.a().value() != 1 || x.d().value() != 1 || !zero.is_zero() {
            return None;
        }
        j = j.min(off.valuation());
    }
    (h.order() as u64 == m.p().pow(m.n() - j)).then_some(j)
}

fn commutator() -> Outcome {
    let mut pairs = 0;
    let mut bad = Vec::new();
    let mut derived = 0;
    for (p, n) in [(2u64, 2u32), (3, 2), (5, 2), (3, 3)] {
        let m = modulus(p, n);
        let mut s = Sampler::new(m, SEED ^ m.q(), 1);
        for _ in 0..10_000 {
            let (x, y) = (s.upper(), s.upper());
            let direct = x.commutator(&y).unwrap();
            let formula = upper_commutator_formula(&x, &y).unwrap();
            pairs += 1;
            if direct != formula || direct != hand_commutator(&x, &y) {
                bad.push(format!("{x}, {y}"));
            }
        }
        // derived subgroups of upper and lower triangular groups
        for _ in 0..100 {
            let gens = [s.upper(), s.upper(), s.upper()];
            let u = Group::close(&gens, m, DEFAULT_CAP).unwrap();
            let lt: Vec<Mat2> = gens.iter().map(Mat2::transpose).collect();
            let l = Group::close(&lt, m, DEFAULT_CAP).unwrap();
            derived += 2;
            if cyclic_unipotent(&u.derived_subgroup(), false).is_none() {
                bad.push(format!("U' of {gens:?}"));
            }
            if cyclic_unipotent(&l.derived_subgroup(), true).is_none() {
                bad.push(format!("L' of {lt:?}"));
            }
        }
        for g in Sampler::new(m, SEED, DEFAULT_CAP).sample(100) {
            let sl = g.triangular_slices();
            derived += 2;
            if cyclic_unipotent(&sl.upper.derived_subgroup(), false).is_none()
                || cyclic_unipotent(&sl.lower.derived_subgroup(), true).is_none()
            {
                bad.push(format!("slices of {:?}", g.generators()));
            }
        }
    }
    Outcome {
        pass: bad.is_empty() && pairs == 40_000,
        tolerance: "exact",
        detail: format!(
            "{pairs} upper pairs over Z/4, Z/9, Z/25, Z/27; {derived} derived subgroups; {} failures {:?}",
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
    }
}

fn sah() -> Outcome {
    let mut triples = 0;
    let mut invertible = 0;
    let mut bad = Vec::new();
    let moduli = [(3u64, 2u32), (5, 2), (5, 1), (7, 1), (3, 3)];
    let mut round = 0u64;
    while triples < 200 && round < 10_000 {
        let (p, n) = moduli[(round % moduli.len() as u64) as usize];
        let m = modulus(p, n);
        let mut s = Sampler::new(m, SEED.wrapping_add(round), DEFAULT_CAP);
        round += 1;
        let mut gens = s.generators(Strategy::Random);
        if round.is_multiple_of(2) {
            let c = s.unit();
            gens.push(Mat2::scalar(c, m));
        }
        let Ok(g) = Group::close(&gens, m, DEFAULT_CAP) else {
            continue;
        };
        let id = Mat2::identity(m);
        let Some(alpha) = g
            .elements()
            .iter()
            .filter(|a| **a != id && g.elements().iter().all(|x| x.mul(a) == a.mul(x)))
            .nth((round % 3) as usize)
            .or_else(|| {
                g.elements()
                    .iter()
                    .find(|a| **a != id && g.generators().iter().all(|x| x.mul(a) == a.mul(x)))
            })
            .copied()
        else {
            continue;
        };
        let act = Action::with_budget(g.clone(), DEFAULT_BUDGET);
        let Ok(plan) = CohomologyPlan::new(&act) else {
            continue;
        };
        let z1 = plan.z1();
        let mut u = vec![0u64; plan.unknowns()];
        for row in z1.matrix().row_iter() {
            let c = s.entry() as u64;
            for (ui, r) in u.iter_mut().zip(row) {
                *ui = m.add(*ui, m.mul(c, *r));
            }
        }
        let z = plan.expand(&u);
        triples += 1;
        let am1 = alpha.sub(&id);
        let az = match sah_annihilate(&act, &alpha, &z) {
            Ok(az) => az,
            Err(e) => {
                bad.push(format!("{e}: alpha {alpha} on {:?}", g.generators()));
                continue;
            }
        };
        // independent check of the coboundary witness
        let ok = z.is_cocycle(&g)
            && coboundary_witness(&g, &az).unwrap().is_some_and(|w| {
                g.elements()
                    .iter()
                    .zip(&z.values)
                    .all(|(x, zx)| am1.apply(*zx) == x.sub(&id).apply(w))
            });
        if !ok {
            bad.push(format!(
                "(alpha - 1) Z not a coboundary: alpha {alpha} on {:?}",
                g.generators()
            ));
        }
        if am1.is_invertible() {
            invertible += 1;
            if !cohomology(&act).unwrap().h1.is_trivial() {
                bad.push(format!(
                    "alpha - 1 invertible but H1 != 0: alpha {alpha} on {:?}",
                    g.generators()
                ));
            }
        }
    }
    Outcome {
        pass: triples >= 200 && invertible > 0 && bad.is_empty(),
        tolerance: "exact",
        detail: format!(
            "{triples} (group, central element, cocycle) triples, {invertible} with alpha - 1 invertible; {} failures {:?}",
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
    }
}

fn hensel() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for (p, n) in [(5u64, 2u32), (3, 3), (7, 3)] {
        let m = modulus(p, n);
        let mut s = Sampler::new(m, SEED ^ (m.q() << 8), 1);
        for _ in 0..500 {
            let x = s.split_semisimple().expect("odd prime");
            checked += 1;
            match hensel_instance(&x) {
                Ok(None) => {}
                Ok(Some(msg)) | Err(msg) => bad.push(msg),
            }
        }
    }
    Outcome {
        pass: checked == 1500 && bad.is_empty(),
        tolerance: "exact",
        detail: format!(
            "{checked} matrices over Z/25, Z/27, Z/343; {} failures {:?}",
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
    }
}

fn constants_criterion() -> Outcome {
    let cli = |degree: &str| -> serde_json::Value {
        let out = Command::new(env!("CARGO_BIN_EXE_h1loc"))
            .args(["constants", "--degree", degree])
            .output()
            .unwrap();
        serde_json::from_slice(&out.stdout).unwrap()
    };
    let one = cli("1");
    let two = cli("2");
    let lib = constants(1).unwrap();
    let pass = one["constant"] == 7
        && one["exceptional_primes"] == serde_json::json!([2, 3, 5, 7])
        && two["constant"] == 13
        && two["exceptional_primes"] == serde_json::json!([2, 3, 5, 7, 11, 13])
        && lib.constant == Some(7);
    Outcome {
        pass,
        tolerance: "exact",
        detail: format!(
            "degree 1: C = {}, primes {}; degree 2: C = {}, primes {}",
            one["constant"], one["exceptional_primes"], two["constant"], two["exceptional_primes"]
        ),
    }
}

fn main() -> ExitCode {
    // `cargo test -- --list` and filters come through here too
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("cohomology matches brute force", oracle_equivalence),
        ("local vanishing sentinel", sentinel),
        ("counterexample witness over Z/4", witness),
        ("H_n triangular decomposition", decomposition),
        ("commutator closed form and derived subgroups", commutator),
        ("central elements annihilate H1", sah),
        ("diagonal lift of split semisimple matrices", hensel),
        ("constants for degrees 1 and 2", constants_criterion),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        all &= o.pass;
        println!(
            "criterion {} {} [{}] {} (tolerance: {}; {:.1}s)",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            name,
            o.detail,
            o.tolerance,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
