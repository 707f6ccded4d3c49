//! Exhaustive or sampled scans over subgroups of `GL2(Z/p^nZ)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use h1loc_core::enumerate::{enumerate_subgroups, has_full_determinant, Sampler};
use h1loc_core::verifier::VerdictStatus;
use h1loc_core::PrimePowerModulus;

use crate::record::ScanRecord;
use crate::report::ReportHeader;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exhaustive,
    Sample,
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub modulus: PrimePowerModulus,
    pub mode: Mode,
    /// Distinct groups to draw in sample mode.
    pub count: usize,
    pub seed: u64,
    pub require_full_det: bool,
    pub budget: usize,
    /// Closure cap for sampled groups.
    pub cap: usize,
    /// Exhaustive mode: skip subgroups above this order.
    pub max_order: Option<usize>,
    /// Exhaustive mode refuses ambient groups larger than this.
    pub ambient_bound: usize,
    pub timed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanCounts {
    pub groups: usize,
    pub h1_nontrivial: usize,
    pub h1_loc_nontrivial: usize,
    pub applicable: usize,
    pub holds: usize,
    pub not_applicable: usize,
    pub unchecked: usize,
    pub falsified: usize,
    /// Groups with nontrivial `H1_loc` that fail a hypothesis.
    pub witnesses: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub header: ReportHeader,
    pub p: u64,
    pub n: u32,
    pub mode: Mode,
    pub require_full_det: bool,
    pub counts: ScanCounts,
    /// `pass` when no group satisfies the hypotheses with `H1_loc != 0`.
    pub sentinel: String,
}

fn groups(cfg: &ScanConfig) -> h1loc_core::Result<Vec<h1loc_core::Group>> {
    Ok(match cfg.mode {
        Mode::Exhaustive => enumerate_subgroups(cfg.modulus, cfg.max_order, cfg.ambient_bound)?,
        Mode::Sample => Sampler::new(cfg.modulus, cfg.seed, cfg.cap).sample(cfg.count),
    })
}

/// Records sorted by group hash, and the summary.
pub fn scan(cfg: &ScanConfig) -> h1loc_core::Result<(Vec<ScanRecord>, ScanSummary)> {
    let mut gs = groups(cfg)?;
    if cfg.require_full_det {
        gs.retain(has_full_determinant);
    }
    let mut records: Vec<ScanRecord> = gs
        .par_iter()
        .map(|g| ScanRecord::compute(g, cfg.budget, cfg.timed))
        .collect::<h1loc_core::Result<_>>()?;
    records.sort_by(|a, b| a.hash.cmp(&b.hash));

    let mut c = ScanCounts {
        groups: records.len(),
        ..Default::default()
    };
    for r in &records {
        c.h1_nontrivial += usize::from(r.h1.as_ref().is_some_and(|h| !h.is_trivial()));
        c.h1_loc_nontrivial += usize::from(r.h1_loc_nontrivial());
        c.applicable += usize::from(r.verdict.applicable);
        c.witnesses += usize::from(r.h1_loc_nontrivial() && !r.verdict.applicable);
        match r.verdict.status {
            VerdictStatus::Holds => c.holds += 1,
            VerdictStatus::Unchecked => c.unchecked += 1,
            VerdictStatus::Falsified => c.falsified += 1,
            _ => c.not_applicable += 1,
        }
    }
    let seed = (cfg.mode == Mode::Sample).then_some(cfg.seed);
    let summary = ScanSummary {
        header: ReportHeader::new("scan", seed, Some(cfg.budget)),
        p: cfg.modulus.p(),
        n: cfg.modulus.n(),
        mode: cfg.mode,
        require_full_det: cfg.require_full_det,
        sentinel: if c.falsified == 0 { "pass" } else { "fail" }.into(),
        counts: c,
    };
    Ok((records, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(mode: Mode, count: usize) -> ScanConfig {
        ScanConfig {
            modulus: PrimePowerModulus::new(3, 1).unwrap(),
            mode,
            count,
            seed: 5,
            require_full_det: false,
            budget: 2000,
            cap: 2000,
            max_order: None,
            ambient_bound: 4000,
            timed: false,
        }
    }

    #[test]
    fn exhaustive_f3() {
        let (records, summary) = scan(&config(Mode::Exhaustive, 0)).unwrap();
        assert_eq!(records.len(), 55);
        assert!(records.windows(2).all(|w| w[0].hash < w[1].hash));
        assert_eq!(summary.counts.groups, 55);
        assert_eq!(summary.counts.h1_loc_nontrivial, 0);
        assert_eq!(summary.sentinel, "pass");
        assert_eq!(summary.header.seed, None);
    }

    #[test]
    fn counts_add_up() {
        let (_, s) = scan(&config(Mode::Sample, 20)).unwrap();
        let c = &s.counts;
        assert_eq!(
            c.holds + c.not_applicable + c.unchecked + c.falsified,
            c.groups
        );
        assert_eq!(s.header.seed, Some(5));
    }

    #[test]
    fn empty_sample() {
        let (records, summary) = scan(&config(Mode::Sample, 0)).unwrap();
        assert!(records.is_empty());
        assert_eq!(summary.counts, ScanCounts::default());
    }

    #[test]
    fn full_determinant_filter() {
        let mut cfg = config(Mode::Exhaustive, 0);
        cfg.require_full_det = true;
        let (records, _) = scan(&cfg).unwrap();
        assert!(!records.is_empty() && records.len() < 55);
        assert!(records.iter().all(|r| r.full_determinant));
    }
}
