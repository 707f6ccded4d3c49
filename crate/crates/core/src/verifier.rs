//! The local vanishing theorem and its supporting statements as executable
//! predicates on concrete groups.
//!
//! Verdicts never panic on a counterexample. A group satisfying the
//! hypotheses but carrying a nontrivial local class produces
//! [`VerdictStatus::Falsified`] together with a [`Falsification`] bundle;
//! callers decide how loudly to abort.

use serde::{Deserialize, Serialize};

use crate::classify::{
    classify_g1, diagonal_rho_lift_with, fixed_point_exact_order_p, stabilizes_line_mod_p,
};
use crate::classify::{Classification, G1Form, RhoLift};
use crate::cohomology::{
    coboundary_witness, cohomology, restrict, Action, CohomologyPlan, CohomologyReport,
};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::linalg::QuotientInvariants;
use crate::mat2::Mat2;

pub const FIXED_POINT: &str = "mod-p image fixes a nonzero vector";
pub const NOT_NORMAL_FORM: &str = "mod-p image is not <rho> or <rho, sigma> in any basis";
pub const SMALL_RHO: &str = "order(rho) < 3";
pub const H1_TRIVIAL: &str = "H1 = 0";
pub const LAMBDA1_ONE: &str = "lambda1 = 1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub g1_form: G1Form,
    pub order_rho: u64,
    pub lambda1: Option<u64>,
    pub lambda2: Option<u64>,
    pub has_fixed_point_exact_order_p: bool,
    pub stabilizes_line_mod_p: bool,
    pub has_nontrivial_scalar: bool,
    /// The diagonal part of the mod-p image in the standard basis is not cyclic.
    pub diag_noncyclic: bool,
}

impl HypothesisReport {
    pub fn is_consistent(&self) -> bool {
        let normal = self.g1_form != G1Form::Other;
        (!self.diag_noncyclic || self.has_nontrivial_scalar)
            && (!self.has_fixed_point_exact_order_p || self.stabilizes_line_mod_p)
            && (!normal || self.stabilizes_line_mod_p)
            && (normal == self.lambda1.is_some())
    }
}

fn hypotheses(g: &Group) -> Result<(HypothesisReport, Classification)> {
    let cls = classify_g1(g)?;
    let g1 = g.reduce_mod(1)?;
    let has_nontrivial_scalar = g1
        .elements()
        .iter()
        .any(|x| x.is_scalar() && !x.is_identity());
    let diag_noncyclic = !g1.triangular_slices().diag.is_cyclic();
    let report = HypothesisReport {
        g1_form: cls.form,
        order_rho: cls.order_rho,
        lambda1: cls.lambda1,
        lambda2: cls.lambda2,
        has_fixed_point_exact_order_p: fixed_point_exact_order_p(g)?,
        stabilizes_line_mod_p: stabilizes_line_mod_p(g)?,
        has_nontrivial_scalar,
        diag_noncyclic,
    };
    Ok((report, cls))
}

pub fn hypothesis_report(g: &Group) -> Result<HypothesisReport> {
    Ok(hypotheses(g)?.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    /// Hypotheses hold and the conclusion was verified.
    Holds,
    /// A hypothesis fails; no claim is made.
    NotApplicable,
    /// Preconditions of a sub-statement fail.
    HypothesesNotMet,
    /// The branch is ruled out by an outer hypothesis.
    ExcludedByHypothesis,
    /// The cohomology budget was exceeded.
    Unchecked,
    Falsified,
}

/// Enough to reproduce a contradicting instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Falsification {
    pub statement: String,
    pub p: u64,
    pub n: u32,
    pub generators: Vec<[[u64; 2]; 2]>,
    /// Values of a local, non-coboundary cocycle on `generators`.
    pub cocycle_on_generators: Vec<[u64; 2]>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremVerdict {
    pub status: VerdictStatus,
    pub applicable: bool,
    /// `H1_loc` was computed and is trivial.
    pub conclusion_checked: bool,
    pub h1: Option<QuotientInvariants>,
    pub h1_loc: Option<QuotientInvariants>,
    pub violated_hypotheses: Vec<String>,
    pub notes: Vec<String>,
    pub falsification: Option<Falsification>,
}

impl TheoremVerdict {
    pub fn is_falsified(&self) -> bool {
        self.status == VerdictStatus::Falsified
    }

    fn unchecked(applicable: bool, violated: Vec<String>, reason: String) -> Self {
        TheoremVerdict {
            status: VerdictStatus::Unchecked,
            applicable,
            conclusion_checked: false,
            h1: None,
            h1_loc: None,
            violated_hypotheses: violated,
            notes: vec![reason],
            falsification: None,
        }
    }
}

/// Cohomology within budget; `Ok(None)` when the group is too large.
fn bounded_cohomology(g: &Group, budget: usize) -> Result<Option<CohomologyReport>> {
    match cohomology(&Action::with_budget(g.clone(), budget)) {
        Ok(r) => Ok(Some(r)),
        Err(Error::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn mat_rows(x: &Mat2) -> [[u64; 2]; 2] {
    let [a, b, c, d] = x.raw();
    [[a, b], [c, d]]
}

/// A local cocycle that is not a coboundary, as values on the generators.
pub fn local_nonboundary(g: &Group, budget: usize) -> Result<Option<Vec<[u64; 2]>>> {
    let act = Action::with_budget(g.clone(), budget);
    let plan = CohomologyPlan::new(&act)?;
    let b1 = plan.b1();
    for row in plan.z1_loc().matrix().row_iter() {
        if !b1.contains(row)? {
            return Ok(Some(row.chunks(2).map(|c| [c[0], c[1]]).collect()));
        }
    }
    Ok(None)
}

fn falsification(
    g: &Group,
    budget: usize,
    statement: &str,
    detail: String,
) -> Result<Falsification> {
    let m = g.modulus();
    Ok(Falsification {
        statement: statement.to_string(),
        p: m.p(),
        n: m.n(),
        generators: g.generators().iter().map(mat_rows).collect(),
        cocycle_on_generators: local_nonboundary(g, budget)?.unwrap_or_default(),
        detail,
    })
}

/// Local vanishing under "no rational point of exact order p" and the
/// `order(rho) >= 3` surrogate for the field condition.
pub fn local_vanishing_verdict(g: &Group, budget: usize) -> Result<TheoremVerdict> {
    let (hyp, cls) = hypotheses(g)?;
    let mut violated = Vec::new();
    if hyp.has_fixed_point_exact_order_p {
        violated.push(FIXED_POINT.to_string());
    }
    let Some(report) = bounded_cohomology(g, budget)? else {
        let form_ok = cls.is_normal_form() && cls.order_rho >= 3;
        return Ok(TheoremVerdict::unchecked(
            violated.is_empty() && form_ok,
            violated,
            format!("order {} exceeds budget {budget}", g.order()),
        ));
    };
    let mut notes = Vec::new();
    if report.h1.is_trivial() {
        notes.push("H1 = 0, so H1_loc = 0".to_string());
    } else if !cls.is_normal_form() {
        violated.push(NOT_NORMAL_FORM.to_string());
        notes.push("H1 != 0 although the mod-p image has no normal form".to_string());
    } else if cls.order_rho < 3 {
        violated.push(SMALL_RHO.to_string());
    }
    let applicable = violated.is_empty();
    let conclusion_checked = report.h1_loc.is_trivial();
    let (status, bundle) = match (applicable, conclusion_checked) {
        (false, _) => (VerdictStatus::NotApplicable, None),
        (true, true) => (VerdictStatus::Holds, None),
        (true, false) => {
            let detail = format!("H1_loc = {:?}", report.h1_loc.factors);
            (
                VerdictStatus::Falsified,
                Some(falsification(g, budget, "local vanishing", detail)?),
            )
        }
    };
    Ok(TheoremVerdict {
        status,
        applicable,
        conclusion_checked,
        h1: Some(report.h1),
        h1_loc: Some(report.h1_loc),
        violated_hypotheses: violated,
        notes,
        falsification: bundle,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GluingCase {
    /// `lambda1 != 1` and `lambda2 != 1`: glue over `L_n` and `U_n`.
    BothNontrivial,
    /// Non-cyclic mod-p image with `lambda2 = 1`: glue over `<rho_n, sL_n>` and `U_n`.
    NoncyclicLambda2One,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingReport {
    pub cocycles_checked: usize,
    /// `G` is generated by the two pieces being glued.
    pub generation_holds: bool,
    pub failures: Vec<String>,
}

impl GluingReport {
    pub fn ok(&self) -> bool {
        self.generation_holds && self.failures.is_empty()
    }
}

/// Replays the gluing argument on every basis vector of `Z1_loc`.
///
/// `gd` must be written in the basis where `rho.matrix` is diagonal.
pub fn gluing_check(
    gd: &Group,
    rho: &RhoLift,
    case: GluingCase,
    budget: usize,
) -> Result<GluingReport> {
    let m = gd.modulus();
    let r = rho.matrix;
    if !r.is_diagonal() || !gd.contains(&r) {
        return Err(Error::Precondition(
            "rho_n must be a diagonal element of the group".into(),
        ));
    }
    let id = Mat2::identity(m);
    let rm1 = r.sub(&id);
    let slices = gd.triangular_slices();
    let upper = slices.upper;
    let left = match case {
        GluingCase::BothNontrivial => slices.lower,
        GluingCase::NoncyclicLambda2One => slices.strict_lower.join(&[r])?,
    };
    let glue_base = match case {
        GluingCase::BothNontrivial => &left,
        GluingCase::NoncyclicLambda2One => &slices.strict_lower,
    };
    let generation_holds = glue_base.join(upper.generators())?.order() == gd.order();

    let act = Action::with_budget(gd.clone(), budget);
    let plan = CohomologyPlan::new(&act)?;
    let z1_loc = plan.z1_loc();
    let mut report = GluingReport {
        cocycles_checked: 0,
        generation_holds,
        failures: Vec::new(),
    };
    for (i, row) in z1_loc.matrix().row_iter().enumerate() {
        report.cocycles_checked += 1;
        let z = plan.expand(row);
        let Some(p) = coboundary_witness(&left, &restrict(gd, &z, &left)?)? else {
            report.failures.push(format!(
                "cocycle {i}: restriction to the lower piece is not a coboundary"
            ));
            continue;
        };
        let Some(q) = coboundary_witness(&upper, &restrict(gd, &z, &upper)?)? else {
            report.failures.push(format!(
                "cocycle {i}: restriction to U_n is not a coboundary"
            ));
            continue;
        };
        let d = [m.sub(p[0], q[0]), m.sub(p[1], q[1])];
        if rm1.apply(d) != [0, 0] {
            report.failures.push(format!(
                "cocycle {i}: P - Q = {d:?} is not killed by rho_n - 1"
            ));
            continue;
        }
        match case {
            GluingCase::BothNontrivial => {
                if d != [0, 0] {
                    report.failures.push(format!(
                        "cocycle {i}: P != Q although rho_n - 1 is invertible"
                    ));
                }
            }
            GluingCase::NoncyclicLambda2One => {
                if d[0] != 0 {
                    report.failures.push(format!(
                        "cocycle {i}: P - Q = {d:?} is not of the form (0, b)"
                    ));
                }
                for t in slices.strict_lower.elements() {
                    let zt = z.value(gd, t).expect("subgroup element");
                    if zt != t.sub(&id).apply(q) {
                        report
                            .failures
                            .push(format!("cocycle {i}: Z_tau != (tau - 1) Q for tau = {t}"));
                        break;
                    }
                }
            }
        }
        let global = gd
            .elements()
            .iter()
            .zip(&z.values)
            .all(|(x, v)| x.sub(&id).apply(q) == *v);
        if !global {
            report.failures.push(format!(
                "cocycle {i}: Q does not trivialize Z on the whole group"
            ));
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingVerdict {
    pub verdict: TheoremVerdict,
    pub case: Option<GluingCase>,
    pub gluing: Option<GluingReport>,
}

/// Local vanishing when `H1 != 0`, split by the eigenvalues of `rho`, with the
/// gluing argument replayed on cocycle representatives.
pub fn gluing_verdict(g: &Group, budget: usize) -> Result<GluingVerdict> {
    let (_, cls) = hypotheses(g)?;
    let Some(report) = bounded_cohomology(g, budget)? else {
        let reason = format!("order {} exceeds budget {budget}", g.order());
        return Ok(GluingVerdict {
            verdict: TheoremVerdict::unchecked(false, vec![], reason),
            case: None,
            gluing: None,
        });
    };
    let mut violated = Vec::new();
    if report.h1.is_trivial() {
        violated.push(H1_TRIVIAL.to_string());
    }
    if !cls.is_normal_form() {
        violated.push(NOT_NORMAL_FORM.to_string());
    } else if cls.order_rho < 3 {
        violated.push(SMALL_RHO.to_string());
    }
    let mut verdict = TheoremVerdict {
        status: VerdictStatus::HypothesesNotMet,
        applicable: false,
        conclusion_checked: report.h1_loc.is_trivial(),
        h1: Some(report.h1),
        h1_loc: Some(report.h1_loc),
        violated_hypotheses: vec![],
        notes: vec![],
        falsification: None,
    };
    if !violated.is_empty() {
        verdict.violated_hypotheses = violated;
        return Ok(GluingVerdict {
            verdict,
            case: None,
            gluing: None,
        });
    }
    let (l1, l2) = (
        cls.lambda1.expect("normal form"),
        cls.lambda2.expect("normal form"),
    );
    let case = if l1 != 1 && l2 != 1 {
        GluingCase::BothNontrivial
    } else if cls.form == G1Form::DiagPlusUnipotent && l2 == 1 {
        GluingCase::NoncyclicLambda2One
    } else if l1 == 1 {
        verdict.violated_hypotheses.push(LAMBDA1_ONE.to_string());
        return Ok(GluingVerdict {
            verdict,
            case: None,
            gluing: None,
        });
    } else {
        verdict.status = VerdictStatus::ExcludedByHypothesis;
        verdict
            .notes
            .push("cyclic image with lambda2 = 1 has a rational point of order p".into());
        return Ok(GluingVerdict {
            verdict,
            case: None,
            gluing: None,
        });
    };
    verdict.applicable = true;

    let rho = diagonal_rho_lift_with(g, &cls)?;
    let gd = g.conjugate(&rho.basis_change)?;
    let gluing = gluing_check(&gd, &rho, case, budget)?;
    if !verdict.conclusion_checked {
        let detail = format!(
            "H1_loc = {:?}",
            verdict.h1_loc.as_ref().map(|h| h.factors.clone())
        );
        verdict.falsification = Some(falsification(
            g,
            budget,
            "local vanishing when H1 != 0",
            detail,
        )?);
        verdict.status = VerdictStatus::Falsified;
    } else if !gluing.ok() {
        let detail = gluing.failures.join("; ");
        verdict.falsification = Some(falsification(g, budget, "gluing", detail)?);
        verdict.status = VerdictStatus::Falsified;
    } else {
        verdict.status = VerdictStatus::Holds;
    }
    Ok(GluingVerdict {
        verdict,
        case: Some(case),
        gluing: Some(gluing),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceCheck {
    pub part: u8,
    pub subgroup: String,
    pub order: usize,
    /// `None` when the subgroup exceeds the budget.
    pub h1_loc: Option<QuotientInvariants>,
    /// The part's hypotheses hold, so triviality is asserted.
    pub asserted: bool,
    pub ok: bool,
}

/// A cyclic normal Sylow subgroup with trivial local cohomology forces the same
/// for the overgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SylowStep {
    pub side: String,
    pub strict_cyclic: bool,
    pub strict_h1_loc_trivial: bool,
    pub strict_is_normal_sylow: bool,
    pub join_h1_loc_trivial: bool,
}

impl SylowStep {
    pub fn ok(&self) -> bool {
        self.strict_cyclic
            && self.strict_h1_loc_trivial
            && self.strict_is_normal_sylow
            && self.join_h1_loc_trivial
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceSuite {
    pub skipped: Option<String>,
    pub h1_nontrivial: bool,
    pub checks: Vec<SliceCheck>,
    pub sylow_steps: Vec<SylowStep>,
}

impl SliceSuite {
    fn skipped(reason: impl Into<String>) -> Self {
        SliceSuite {
            skipped: Some(reason.into()),
            h1_nontrivial: false,
            checks: vec![],
            sylow_steps: vec![],
        }
    }

    pub fn falsified(&self) -> bool {
        self.checks.iter().any(|c| !c.ok) || self.sylow_steps.iter().any(|s| !s.ok())
    }
}

fn h1_loc_within(h: &Group, budget: usize) -> Result<Option<QuotientInvariants>> {
    Ok(bounded_cohomology(h, budget)?.map(|r| r.h1_loc))
}

fn sylow_step(side: &str, strict: &Group, rho: &Mat2, budget: usize) -> Result<Option<SylowStep>> {
    let join = strict.join(&[*rho])?;
    let (Some(s), Some(j)) = (
        h1_loc_within(strict, budget)?,
        h1_loc_within(&join, budget)?,
    ) else {
        return Ok(None);
    };
    let sylow = join.sylow_p().ok();
    Ok(Some(SylowStep {
        side: side.to_string(),
        strict_cyclic: strict.is_cyclic(),
        strict_h1_loc_trivial: s.is_trivial(),
        strict_is_normal_sylow: sylow.is_some_and(|y| y == *strict),
        join_h1_loc_trivial: j.is_trivial(),
    }))
}

/// Local cohomology of the triangular pieces of `G` in the basis where
/// `rho_n` is diagonal. Values are always reported; triviality is asserted
/// only under each part's hypotheses, which include `H1(G) != 0`.
pub fn triangular_slice_suite(g: &Group, budget: usize) -> Result<SliceSuite> {
    let cls = classify_g1(g)?;
    if !cls.is_normal_form() {
        return Ok(SliceSuite::skipped(NOT_NORMAL_FORM));
    }
    if cls.order_rho < 3 {
        return Ok(SliceSuite::skipped(SMALL_RHO));
    }
    let Some(report) = bounded_cohomology(g, budget)? else {
        return Ok(SliceSuite::skipped(format!(
            "order {} exceeds budget {budget}",
            g.order()
        )));
    };
    let rho = diagonal_rho_lift_with(g, &cls)?;
    let gd = g.conjugate(&rho.basis_change)?;
    let r = rho.matrix;
    let h1_nontrivial = !report.h1.is_trivial();
    let (l1, l2) = (
        cls.lambda1.expect("normal form"),
        cls.lambda2.expect("normal form"),
    );
    let both = l1 != 1 && l2 != 1;
    let part3 = cls.form == G1Form::DiagPlusUnipotent && l2 == 1;
    let s = gd.triangular_slices();

    let pieces: Vec<(u8, &str, Group, bool)> = vec![
        (
            1,
            "<rho_n, sU_n>",
            s.strict_upper.join(&[r])?,
            h1_nontrivial,
        ),
        (
            1,
            "<rho_n, sL_n>",
            s.strict_lower.join(&[r])?,
            h1_nontrivial,
        ),
        (2, "U_n", s.upper.clone(), h1_nontrivial && both),
        (2, "L_n", s.lower.clone(), h1_nontrivial && both),
        (3, "U_n", s.upper.clone(), h1_nontrivial && part3),
    ];
    let mut checks = Vec::new();
    for (part, name, h, asserted) in pieces {
        let h1_loc = h1_loc_within(&h, budget)?;
        let ok = !asserted || h1_loc.as_ref().is_none_or(QuotientInvariants::is_trivial);
        checks.push(SliceCheck {
            part,
            subgroup: name.to_string(),
            order: h.order(),
            h1_loc,
            asserted,
            ok,
        });
    }
    let mut sylow_steps = Vec::new();
    for (side, strict) in [("lower", &s.strict_lower), ("upper", &s.strict_upper)] {
        sylow_steps.extend(sylow_step(side, strict, &r, budget)?);
    }
    Ok(SliceSuite {
        skipped: None,
        h1_nontrivial,
        checks,
        sylow_steps,
    })
}

/// Outcome of a single property check on one group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckOutcome {
    Pass,
    Vacuous,
    Skipped(String),
    Fail(String),
}

/// A nontrivial scalar in the mod-p image kills `H1`.
pub fn scalar_vanishing_check(g: &Group, budget: usize) -> Result<CheckOutcome> {
    let hyp = hypothesis_report(g)?;
    if !hyp.has_nontrivial_scalar {
        return Ok(CheckOutcome::Vacuous);
    }
    Ok(match bounded_cohomology(g, budget)? {
        None => CheckOutcome::Skipped("budget".into()),
        Some(r) if r.h1.is_trivial() => CheckOutcome::Pass,
        Some(r) => CheckOutcome::Fail(format!("scalar present but H1 = {:?}", r.h1.factors)),
    })
}

/// A non-cyclic diagonal part mod p contains a scalar, hence kills `H1`.
pub fn diagonal_noncyclic_check(g: &Group, budget: usize) -> Result<CheckOutcome> {
    let hyp = hypothesis_report(g)?;
    if !hyp.diag_noncyclic {
        return Ok(CheckOutcome::Vacuous);
    }
    if !hyp.has_nontrivial_scalar {
        return Ok(CheckOutcome::Fail(
            "non-cyclic diagonal part without a scalar".into(),
        ));
    }
    Ok(match bounded_cohomology(g, budget)? {
        None => CheckOutcome::Skipped("budget".into()),
        Some(r) if r.h1.is_trivial() => CheckOutcome::Pass,
        Some(r) => CheckOutcome::Fail(format!("H1 = {:?}", r.h1.factors)),
    })
}

/// `H1 != 0` forces the mod-p image into `<rho>` or `<rho, sigma>` form.
pub fn normal_form_check(g: &Group, budget: usize) -> Result<CheckOutcome> {
    let Some(r) = bounded_cohomology(g, budget)? else {
        return Ok(CheckOutcome::Skipped("budget".into()));
    };
    if r.h1.is_trivial() {
        return Ok(CheckOutcome::Vacuous);
    }
    Ok(if classify_g1(g)?.is_normal_form() {
        CheckOutcome::Pass
    } else {
        CheckOutcome::Fail(format!("H1 = {:?} but no normal form", r.h1.factors))
    })
}

pub const ISOGENY_PRIMES_Q: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 37, 43, 67, 163];
pub const TORSION_PRIMES_Q: [u64; 4] = [2, 3, 5, 7];
pub const TORSION_PRIMES_QUADRATIC: [u64; 6] = [2, 3, 5, 7, 11, 13];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub degree: u32,
    /// Primes with a rational isogeny for some curve over the rationals.
    pub isogeny_primes_q: Vec<u64>,
    /// Primes outside which the principle holds for every curve of this degree.
    pub exceptional_primes: Option<Vec<u64>>,
    /// `2 d + 1`.
    pub p0_bound: u64,
    pub largest_prime_within_p0_bound: u64,
    /// Largest prime order of a rational torsion point, when known.
    pub torsion_prime_bound: Option<u64>,
    pub merel_constant: String,
    pub constant: Option<u64>,
    pub constant_formula: String,
}

fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

pub fn constants(degree: u32) -> Result<ConstantsTable> {
    if degree == 0 {
        return Err(Error::Precondition("degree must be at least 1".into()));
    }
    let p0_bound = 2 * degree as u64 + 1;
    let largest = (2..=p0_bound)
        .rev()
        .find(|&x| is_prime(x))
        .expect("3 is prime");
    let (exceptional, torsion) = match degree {
        1 => (Some(TORSION_PRIMES_Q.to_vec()), Some(7)),
        2 => (Some(TORSION_PRIMES_QUADRATIC.to_vec()), Some(13)),
        _ => (None, None),
    };
    let constant = torsion.map(|t: u64| t.max(largest));
    let constant_formula = match constant {
        Some(c) => c.to_string(),
        None => format!("max({largest}, C_merel({degree}))"),
    };
    Ok(ConstantsTable {
        degree,
        isogeny_primes_q: ISOGENY_PRIMES_Q.to_vec(),
        exceptional_primes: exceptional,
        p0_bound,
        largest_prime_within_p0_bound: largest,
        torsion_prime_bound: torsion,
        merel_constant: match torsion {
            Some(t) => t.to_string(),
            None => "unavailable".to_string(),
        },
        constant,
        constant_formula,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::DEFAULT_BUDGET;
    use crate::group::DEFAULT_CAP;
    use crate::residue::PrimePowerModulus;

    fn z(p: u64, n: u32) -> PrimePowerModulus {
        PrimePowerModulus::new(p, n).unwrap()
    }

    fn grp(gens: &[Mat2], m: PrimePowerModulus) -> Group {
        Group::close(gens, m, DEFAULT_CAP).unwrap()
    }

    #[test]
    fn fixed_point_makes_theorem_inapplicable() {
        let m = z(3, 1);
        let v = local_vanishing_verdict(&grp(&[Mat2::upper_unipotent(1, m)], m), DEFAULT_BUDGET)
            .unwrap();
        assert_eq!(v.status, VerdictStatus::NotApplicable);
        assert!(v.violated_hypotheses.contains(&FIXED_POINT.to_string()));
    }

    #[test]
    fn scalar_short_circuits() {
        let m = z(5, 1);
        let g = grp(&[Mat2::scalar(2, m), Mat2::upper_unipotent(1, m)], m);
        let v = local_vanishing_verdict(&g, DEFAULT_BUDGET).unwrap();
        assert_eq!(v.status, VerdictStatus::Holds);
        assert!(v.h1.unwrap().is_trivial());
        assert_eq!(
            scalar_vanishing_check(&g, DEFAULT_BUDGET).unwrap(),
            CheckOutcome::Pass
        );
    }

    #[test]
    fn regime_instance_over_z25() {
        // rho = diag(7, 1) lifts diag(2, 1) mod 5 with order 4; sigma-lift upper
        let m = z(5, 2);
        let rho = diagonal_lift_of(&Mat2::diag(7, 1, m)).unwrap().matrix;
        let g = grp(&[rho, Mat2::upper_unipotent(1, m)], m);
        let v = local_vanishing_verdict(&g, DEFAULT_BUDGET).unwrap();
        assert!(v.conclusion_checked);
        assert_eq!(v.status, VerdictStatus::Holds);
        let p8 = gluing_verdict(&g, DEFAULT_BUDGET).unwrap();
        assert!(!p8.verdict.is_falsified());
        if p8.verdict.applicable {
            assert_eq!(p8.case, Some(GluingCase::NoncyclicLambda2One));
            assert!(p8.gluing.unwrap().ok());
        }
    }

    use crate::classify::diagonal_lift_of;

    #[test]
    fn case_one_instance() {
        // diag(2, 3) mod 5 has order 4 and both eigenvalues nontrivial
        let m = z(5, 2);
        let rho = diagonal_lift_of(&Mat2::diag(2, 3, m)).unwrap().matrix;
        let g = grp(
            &[
                rho,
                Mat2::upper_unipotent(5, m),
                Mat2::lower_unipotent(5, m),
            ],
            m,
        );
        let suite = triangular_slice_suite(&g, DEFAULT_BUDGET).unwrap();
        assert!(suite.skipped.is_none());
        assert!(!suite.falsified(), "{suite:?}");
        let p8 = gluing_verdict(&g, DEFAULT_BUDGET).unwrap();
        assert!(!p8.verdict.is_falsified());
    }

    #[test]
    fn lambda_one_is_not_dispatched() {
        // fixed point (1, 0): cannot reach a gluing case
        let m = z(5, 2);
        let rho = diagonal_lift_of(&Mat2::diag(1, 2, m)).unwrap().matrix;
        let g = grp(&[rho, Mat2::upper_unipotent(1, m)], m);
        let p8 = gluing_verdict(&g, DEFAULT_BUDGET).unwrap();
        assert!(p8.case.is_none());
        assert!(!p8.verdict.applicable);
    }

    #[test]
    fn small_rho_skips_suite() {
        let m = z(3, 2);
        let g = grp(&[Mat2::diag(2, 1, m), Mat2::upper_unipotent(1, m)], m);
        assert!(triangular_slice_suite(&g, DEFAULT_BUDGET)
            .unwrap()
            .skipped
            .is_some());
    }

    #[test]
    fn budget_marks_unchecked() {
        let m = z(5, 1);
        let g = grp(&[Mat2::diag(2, 3, m), Mat2::upper_unipotent(1, m)], m);
        let v = local_vanishing_verdict(&g, 1).unwrap();
        assert_eq!(v.status, VerdictStatus::Unchecked);
    }

    #[test]
    fn hypothesis_examples() {
        let m = z(5, 1);
        let h = hypothesis_report(&grp(&[Mat2::diag(2, 1, m)], m)).unwrap();
        assert!(
            h.has_fixed_point_exact_order_p && h.stabilizes_line_mod_p && !h.has_nontrivial_scalar
        );
        assert!(h.is_consistent());
        let k = hypothesis_report(&grp(&[Mat2::diag(2, 1, m), Mat2::diag(1, 2, m)], m)).unwrap();
        assert!(k.diag_noncyclic && k.has_nontrivial_scalar && !k.has_fixed_point_exact_order_p);
        assert!(k.is_consistent());
    }

    #[test]
    fn constant_tables() {
        let c1 = constants(1).unwrap();
        assert_eq!(
            (c1.constant, c1.exceptional_primes.clone()),
            (Some(7), Some(vec![2, 3, 5, 7]))
        );
        let c2 = constants(2).unwrap();
        assert_eq!(
            (c2.constant, c2.exceptional_primes.clone()),
            (Some(13), Some(vec![2, 3, 5, 7, 11, 13]))
        );
        let c3 = constants(3).unwrap();
        assert_eq!(
            (c3.p0_bound, c3.constant, c3.merel_constant.as_str()),
            (7, None, "unavailable")
        );
        let c4 = constants(4).unwrap();
        assert_eq!((c4.p0_bound, c4.largest_prime_within_p0_bound), (9, 7));
        assert_eq!(c1.isogeny_primes_q.len(), 12);
        assert!(constants(0).is_err());
    }
}
