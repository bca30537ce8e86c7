//! The whole chain for one pair `(f, g)`: Kuo estimation on `f`, sequences
//! on `Y`, the four condition reports and the claim checks, with the
//! consistency flags between them.

use serde::{Deserialize, Serialize};

use crate::horn::{derive_seed, HornSpec};

use super::claims::{ClaimConfig, ClaimReports};
use super::conditions::ConditionReports;
use super::kuo::{empty_report, kuo_check, KuoReport, ScanConfig};
use super::sequence::{y_sequences, YSampling};
use super::{t_grid, Condition, DeformationFamily, RegularityError, Thresholds, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Horn width for the Kuo scan.
    pub width: f64,
    /// Horn width for the claim checks.
    pub claim_width: f64,
    pub radius_cap: f64,
    pub scan: ScanConfig,
    /// Number of equispaced `t` values in `[0, 1]`; the endpoints of `J`
    /// are added.
    pub t_grid: usize,
    /// Axis points `t0` the sequences on `Y` tend to.
    pub targets: Vec<f64>,
    pub thresholds: Thresholds,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            width: 2.0,
            claim_width: 0.5,
            radius_cap: 0.5,
            scan: ScanConfig::default(),
            t_grid: 11,
            targets: vec![0.0, 0.5, 1.0],
            thresholds: Thresholds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineBundle {
    pub kuo: KuoReport,
    pub sequences: YSampling,
    pub conditions: ConditionReports,
    pub claims: ClaimReports,
    /// Combined verdict over Kuo, (a), (m), (c) and (c_d).
    pub verdict: Verdict,
    /// No sequence satisfies (a), (m), (c_d) while failing (c).
    pub implication_consistent: bool,
    /// Kuo holding is accompanied by (c_d) and (c) holding.
    pub theorem_consistent: bool,
    pub notes: Vec<String>,
}

impl PipelineBundle {
    /// Exit-style summary: implication failures outrank verdicts.
    pub fn consistent(&self) -> bool {
        self.implication_consistent && self.theorem_consistent
    }
}

/// Runs every check on the family with the given configuration.
pub fn full_pipeline(
    fam: &DeformationFamily,
    cfg: &PipelineConfig,
) -> Result<PipelineBundle, RegularityError> {
    let th = &cfg.thresholds;
    let spec = HornSpec::new(fam.r(), cfg.width, cfg.radius_cap)?;
    let exponent = f64::from(fam.r()) - 1.0;
    let mut notes = Vec::new();
    let kuo = match kuo_check(fam.f(), fam.r(), &spec, &cfg.scan, th) {
        Ok(rep) => rep,
        Err(RegularityError::AllShellsEmpty) => {
            let mut rep = empty_report(
                Condition::Kuo,
                fam.f(),
                fam.f(),
                spec,
                exponent,
                &cfg.scan,
                th,
            );
            rep.notes
                .push("horn is empty on every sampled shell".into());
            rep
        }
        Err(e) => return Err(e),
    };

    let sequences = y_sequences(
        fam,
        &cfg.scan.schedule,
        cfg.scan.samples,
        derive_seed(cfg.scan.seed, 1),
        &cfg.targets,
        th,
    )?;
    if sequences.empty_y {
        notes.push("empty_Y: no point of F = 0 off the axis was found on any shell".into());
    }
    let conditions = ConditionReports::run(fam, &sequences, th);

    let claim_cfg = ClaimConfig {
        width: cfg.claim_width,
        radius_cap: cfg.radius_cap,
        scan: cfg.scan,
        t_grid: t_grid(cfg.t_grid, fam.interval()),
    };
    let claims = ClaimReports::run(fam, &claim_cfg, th, kuo.verdict.holds())?;

    let verdict = Verdict::all([
        kuo.verdict,
        conditions.a.verdict,
        conditions.m.verdict,
        conditions.c.verdict,
        conditions.cd.verdict,
    ]);
    let implication_consistent = conditions.implication_counterexamples == 0;
    let theorem_consistent = !kuo.verdict.holds()
        || (conditions.cd.verdict != Verdict::Fails && conditions.c.verdict != Verdict::Fails);
    if !theorem_consistent {
        notes.push("Kuo holds but (c_d) or (c) fails on the sampled sequences".into());
    }
    Ok(PipelineBundle {
        kuo,
        sequences,
        conditions,
        claims,
        verdict,
        implication_consistent,
        theorem_consistent,
        notes,
    })
}
