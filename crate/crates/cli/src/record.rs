//! Per-group scan records and the group hash used to order them.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use h1loc_core::verifier::{
    hypothesis_report, local_vanishing_verdict, HypothesisReport, TheoremVerdict,
};
use h1loc_core::{Group, QuotientInvariants};

/// SHA-256 over the modulus and the sorted element set, so equal groups hash
/// equally whatever their generators.
pub fn group_hash(g: &Group) -> String {
    let m = g.modulus();
    let mut h = Sha256::new();
    h.update(m.p().to_le_bytes());
    h.update(m.n().to_le_bytes());
    for e in g.element_key() {
        for x in e {
            h.update(x.to_le_bytes());
        }
    }
    format!("{:x}", h.finalize())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub hash: String,
    pub p: u64,
    pub n: u32,
    pub order: usize,
    pub generators: Vec<[[u64; 2]; 2]>,
    pub full_determinant: bool,
    pub hypotheses: HypothesisReport,
    pub h1: Option<QuotientInvariants>,
    pub h1_loc: Option<QuotientInvariants>,
    pub verdict: TheoremVerdict,
    /// Only present when timing was requested, so default output stays reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_us: Option<u64>,
}

impl ScanRecord {
    pub fn compute(g: &Group, budget: usize, timed: bool) -> h1loc_core::Result<ScanRecord> {
        let start = std::time::Instant::now();
        let m = g.modulus();
        let hypotheses = hypothesis_report(g)?;
        let verdict = local_vanishing_verdict(g, budget)?;
        let wall = start.elapsed().as_micros() as u64;
        Ok(ScanRecord {
            hash: group_hash(g),
            p: m.p(),
            n: m.n(),
            order: g.order(),
            generators: g.generators().iter().map(|x| x.to_rows()).collect(),
            full_determinant: h1loc_core::enumerate::has_full_determinant(g),
            hypotheses,
            h1: verdict.h1.clone(),
            h1_loc: verdict.h1_loc.clone(),
            verdict,
            wall_time_us: timed.then_some(wall),
        })
    }

    pub fn h1_loc_nontrivial(&self) -> bool {
        self.h1_loc.as_ref().is_some_and(|h| !h.is_trivial())
    }
}
