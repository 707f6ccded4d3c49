//! Full report for one user-supplied group.

use serde::{Deserialize, Serialize};

use h1loc_core::classify::{classify_g1, diagonal_rho_lift_with, G1Form};
use h1loc_core::verifier::{
    gluing_verdict, hypothesis_report, local_vanishing_verdict, triangular_slice_suite,
    Falsification, GluingVerdict, HypothesisReport, SliceSuite, TheoremVerdict,
};
use h1loc_core::{Group, QuotientInvariants};

use crate::input::LoadedSpec;
use crate::record::group_hash;
use crate::report::ReportHeader;

type Rows = [[u64; 2]; 2];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationSummary {
    pub form: G1Form,
    pub rho_mod_p: Option<Rows>,
    pub order_rho: u64,
    pub basis_change_mod_p: Option<Rows>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoLiftSummary {
    pub matrix: Rows,
    pub eigenvalues: [u64; 2],
    pub order: u64,
    pub basis_change: Rows,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceOrders {
    /// `rho-diagonal` when a diagonal lift exists, else `standard`.
    pub basis: String,
    pub diag: usize,
    pub strict_upper: usize,
    pub strict_lower: usize,
    pub upper: usize,
    pub lower: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SylowSummary {
    pub order: usize,
    pub generators: Vec<Rows>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub header: ReportHeader,
    pub label: Option<String>,
    pub p: u64,
    pub n: u32,
    pub hash: String,
    pub order: usize,
    pub generators: Vec<Rows>,
    pub hypotheses: HypothesisReport,
    pub classification: ClassificationSummary,
    pub rho_lift: Option<RhoLiftSummary>,
    pub slices: SliceOrders,
    /// The normal Sylow p-subgroup in the working basis, when it exists.
    pub hn: Option<SylowSummary>,
    pub h1: Option<QuotientInvariants>,
    pub h1_loc: Option<QuotientInvariants>,
    pub local_vanishing: TheoremVerdict,
    pub gluing: GluingVerdict,
    pub triangular_local_vanishing: SliceSuite,
}

impl AnalyzeReport {
    pub fn falsifications(&self) -> Vec<Falsification> {
        let mut out: Vec<Falsification> =
            self.local_vanishing.falsification.iter().cloned().collect();
        out.extend(self.gluing.verdict.falsification.iter().cloned());
        if self.triangular_local_vanishing.falsified() {
            out.push(Falsification {
                statement: "triangular local vanishing".into(),
                p: self.p,
                n: self.n,
                generators: self.generators.clone(),
                cocycle_on_generators: vec![],
                detail: format!("{:?}", self.triangular_local_vanishing.checks),
            });
        }
        out
    }
}

pub fn analyze(spec: &LoadedSpec, g: &Group, budget: usize) -> h1loc_core::Result<AnalyzeReport> {
    let m = g.modulus();
    let cls = classify_g1(g)?;
    let lift = if cls.rho.is_some_and(|r| !r.is_identity()) {
        diagonal_rho_lift_with(g, &cls).ok()
    } else {
        None
    };
    let (work, basis) = match &lift {
        Some(l) => (g.conjugate(&l.basis_change)?, "rho-diagonal"),
        None => (g.clone(), "standard"),
    };
    let s = work.triangular_slices();
    let local_vanishing = local_vanishing_verdict(g, budget)?;
    Ok(AnalyzeReport {
        header: ReportHeader::new("analyze", None, Some(budget)),
        label: spec.label.clone(),
        p: m.p(),
        n: m.n(),
        hash: group_hash(g),
        order: g.order(),
        generators: g.generators().iter().map(|x| x.to_rows()).collect(),
        hypotheses: hypothesis_report(g)?,
        classification: ClassificationSummary {
            form: cls.form,
            rho_mod_p: cls.rho.map(|r| r.to_rows()),
            order_rho: cls.order_rho,
            basis_change_mod_p: cls.basis_change.map(|c| c.to_rows()),
        },
        rho_lift: lift.as_ref().map(|l| RhoLiftSummary {
            matrix: l.matrix.to_rows(),
            eigenvalues: [l.lambda1().value(), l.lambda2().value()],
            order: l.order,
            basis_change: l.basis_change.to_rows(),
        }),
        slices: SliceOrders {
            basis: basis.into(),
            diag: s.diag.order(),
            strict_upper: s.strict_upper.order(),
            strict_lower: s.strict_lower.order(),
            upper: s.upper.order(),
            lower: s.lower.order(),
        },
        hn: work.sylow_p().ok().map(|h| SylowSummary {
            order: h.order(),
            generators: h.generators().iter().map(|x| x.to_rows()).collect(),
        }),
        h1: local_vanishing.h1.clone(),
        h1_loc: local_vanishing.h1_loc.clone(),
        local_vanishing,
        gluing: gluing_verdict(g, budget)?,
        triangular_local_vanishing: triangular_slice_suite(g, budget)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use h1loc_core::cohomology::DEFAULT_BUDGET;
    use h1loc_core::group::DEFAULT_CAP;
    use h1loc_core::{Mat2, PrimePowerModulus};

    fn spec(p: u64, n: u32, gens: &[Mat2]) -> LoadedSpec {
        LoadedSpec {
            label: None,
            modulus: PrimePowerModulus::new(p, n).unwrap(),
            generators: gens.to_vec(),
        }
    }

    #[test]
    fn conjugated_group_is_read_in_diagonal_basis() {
        let m = PrimePowerModulus::new(5, 2).unwrap();
        let c = Mat2::new(1, 2, 3, 2, m);
        let gens = [Mat2::diag(7, 1, m), Mat2::upper_unipotent(1, m)];
        let conj: Vec<Mat2> = gens.iter().map(|x| x.conjugate_by(&c).unwrap()).collect();
        let s = spec(5, 2, &conj);
        let g = s.close(DEFAULT_CAP).unwrap();
        let r = analyze(&s, &g, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.slices.basis, "rho-diagonal");
        assert_eq!(r.slices.diag, 4);
        assert_eq!(r.hn.as_ref().map(|h| h.order), Some(25));
        assert!(r.falsifications().is_empty());
    }

    #[test]
    fn trivial_group() {
        let s = spec(2, 1, &[]);
        let g = s.close(DEFAULT_CAP).unwrap();
        let r = analyze(&s, &g, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.order, 1);
        assert!(r.rho_lift.is_none());
        assert_eq!(r.slices.basis, "standard");
        assert!(r.h1.unwrap().is_trivial());
    }
}
