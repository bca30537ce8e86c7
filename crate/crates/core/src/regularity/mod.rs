//! Kuo and second Kuo estimation, the deformation family `F(x, t)`, the
//! conditions (a), (m), (c), (c_d) along sampled sequences on the zero-set
//! stratum, and the quantitative inequality checks behind them.
//!
//! Every verdict is recomputable from the stored measurements and the
//! thresholds recorded next to them.

mod claims;
mod conditions;
mod family;
mod kuo;
mod pipeline;
mod sequence;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::horn::HornError;
use crate::poly::PolyError;
use crate::subspace::{SubspaceError, DEFAULT_ANGLE_TOL, DEFAULT_RANK_TOL};

pub use claims::{
    claim_i_verify, claim_ii_and_iii_verify, claim_iv_verify, key_estimation_verify,
    lemma_cd_verify, ClaimConfig, ClaimReports,
};
pub use conditions::{
    a_regularity_test, c_regularity_test, cd_condition_test, condition_m_check, tangent_plane_y,
    transversality_tests, ConditionReports, TransversalityTests,
};
pub use family::{build_family, control_function, DeformationFamily, PointGradients};
pub use kuo::{empty_report, kuo_check, second_kuo_check, KuoReport, KuoShell, ScanConfig};
pub use pipeline::{full_pipeline, PipelineBundle, PipelineConfig};
pub use sequence::{y_sequences, SequencePoint, SequenceSpec, YSampling};

#[derive(Debug, Error)]
pub enum RegularityError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Horn(#[from] HornError),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
    #[error("every horn shell is empty; the Kuo inequality cannot be estimated")]
    AllShellsEmpty,
    #[error("point is off the zero set: |F| = {residual:e} > {tol:e}")]
    OffStratum { residual: f64, tol: f64 },
    #[error("dF has rank below p at the point (kappa = {kappa:e})")]
    SingularPoint { kappa: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown threshold `{0}`")]
    UnknownThreshold(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }

    /// `Fails` dominates, then `Inconclusive`.
    pub fn all(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut out = Verdict::Holds;
        for v in verdicts {
            match v {
                Verdict::Fails => return Verdict::Fails,
                Verdict::Inconclusive => out = Verdict::Inconclusive,
                Verdict::Holds => {}
            }
        }
        out
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "m")]
    M,
    #[serde(rename = "c_d")]
    Cd,
    #[serde(rename = "kuo")]
    Kuo,
    #[serde(rename = "kuo2")]
    Kuo2,
    #[serde(rename = "claimI")]
    ClaimI,
    #[serde(rename = "claimII")]
    ClaimII,
    #[serde(rename = "claimIV")]
    ClaimIV,
    #[serde(rename = "lemma_cd")]
    LemmaCd,
    #[serde(rename = "key_estimation")]
    KeyEstimation,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::A => "a",
            Condition::C => "c",
            Condition::M => "m",
            Condition::Cd => "c_d",
            Condition::Kuo => "kuo",
            Condition::Kuo2 => "kuo2",
            Condition::ClaimI => "claimI",
            Condition::ClaimII => "claimII",
            Condition::ClaimIV => "claimIV",
            Condition::LemmaCd => "lemma_cd",
            Condition::KeyEstimation => "key_estimation",
        }
    }
}

/// Numerical thresholds for every verdict. All are recorded in the reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// (a), (c): gap of the t-direction to the plane must fall below this.
    pub gap_pass: f64,
    /// Consecutive-plane gap below which a sequence counts as pre-regular.
    pub cauchy_tol: f64,
    /// (c_d), Lemma (c_d), key estimation: lower bound on the gap.
    pub cd_floor: f64,
    /// Kuo: smallest acceptable constant estimate.
    pub c_floor: f64,
    /// Kuo: allowed excess of the decay slope over the target exponent;
    /// (a): allowed negative trend of log-gap against log-radius.
    pub slope_tol: f64,
    /// Points of the zero-set stratum satisfy `|F| <= feas_scale * rho^r`.
    pub feas_scale: f64,
    /// (m): smallest acceptable ratio of singular values.
    pub m_tol: f64,
    /// Claim II: lower bound on `d(x, V_{t,x}) / |x|`.
    pub claim2_floor: f64,
    /// Claim I: `d(x, V_x) / |x| >= 1 - eps1`.
    pub eps1: f64,
    /// Claim IV: ratios within `[1 - eps2, 1 + eps2]`.
    pub eps2: f64,
    /// Claim III: `|d(x, V_{t,x}) - d(x, V_x)| / |x| <= eps5`.
    pub eps5: f64,
    pub angle_tol: f64,
    pub rank_tol: f64,
    /// A shell minimum of the Kuo distance below this fraction of the
    /// largest gradient norm on the shell counts as zero.
    pub vanishing_tol: f64,
    /// Verdicts are taken over radii at or below this value.
    pub verdict_radius: f64,
    /// Minimum number of distinct radii needed below `verdict_radius`.
    pub min_tail: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            gap_pass: 0.05,
            cauchy_tol: 0.02,
            cd_floor: 0.25 * (1.0 - 0.2),
            c_floor: 1e-3,
            slope_tol: 0.1,
            feas_scale: 1e-10,
            m_tol: 1e-6,
            claim2_floor: 0.5 - 0.1,
            eps1: 0.25,
            eps2: 0.1,
            eps5: 0.25,
            angle_tol: DEFAULT_ANGLE_TOL,
            rank_tol: DEFAULT_RANK_TOL,
            vanishing_tol: 1e-9,
            verdict_radius: 1e-3,
            min_tail: 3,
        }
    }
}

impl Thresholds {
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        let value = serde_json::to_value(self).expect("plain struct");
        value
            .as_object()
            .expect("struct serializes to an object")
            .iter()
            .map(|(k, v)| (k.clone(), v.as_f64().expect("numeric field")))
            .collect()
    }

    /// Overrides one threshold by name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), RegularityError> {
        let mut json = serde_json::to_value(*self).expect("plain struct");
        let obj = json.as_object_mut().expect("object");
        if !obj.contains_key(name) {
            return Err(RegularityError::UnknownThreshold(name.to_string()));
        }
        if !value.is_finite() || value < 0.0 {
            return Err(RegularityError::Config(format!(
                "threshold `{name}` must be finite and non-negative"
            )));
        }
        let v = if name == "min_tail" {
            if value.fract() != 0.0 {
                return Err(RegularityError::Config(
                    "min_tail must be an integer".into(),
                ));
            }
            serde_json::json!(value as u64)
        } else {
            serde_json::json!(value)
        };
        obj.insert(name.to_string(), v);
        *self = serde_json::from_value(json).map_err(|e| RegularityError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn names() -> Vec<String> {
        Thresholds::default().to_map().into_keys().collect()
    }
}

/// A violating sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub radius: f64,
    pub point: Vec<f64>,
    pub t: Option<f64>,
    pub value: f64,
    pub reason: String,
}

/// Measurements, verdict and violations for one condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub condition: Condition,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub verdict: Verdict,
    /// Largest sampled radius at and below which the inequality held on
    /// every sample.
    pub searched_radius: Option<f64>,
    pub witnesses: Vec<Witness>,
    /// Set when the statement is conditional on the Kuo condition and the
    /// Kuo check did not hold.
    pub vacuous: bool,
    pub thresholds: BTreeMap<String, f64>,
    pub extra_verdicts: BTreeMap<String, Verdict>,
    pub notes: Vec<String>,
}

/// Cap on stored witnesses per report.
pub const MAX_WITNESSES: usize = 20;

impl RegularityReport {
    pub(crate) fn new(condition: Condition, columns: &[&str]) -> Self {
        RegularityReport {
            condition,
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            verdict: Verdict::Inconclusive,
            searched_radius: None,
            witnesses: Vec::new(),
            vacuous: false,
            thresholds: BTreeMap::new(),
            extra_verdicts: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub(crate) fn witness(&mut self, w: Witness) {
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(w);
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Measurements as CSV with the column names as header.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Largest radius `r` such that every entry with radius `<= r` passes.
pub(crate) fn searched_radius(entries: &[(f64, bool)]) -> Option<f64> {
    let first_fail = entries
        .iter()
        .filter(|e| !e.1)
        .map(|e| e.0)
        .fold(f64::INFINITY, f64::min);
    entries
        .iter()
        .filter(|e| e.1 && e.0 < first_fail)
        .map(|e| e.0)
        .fold(None, |acc: Option<f64>, r| {
            Some(acc.map_or(r, |a| a.max(r)))
        })
}

/// Verdict over the entries at radii `<= verdict_radius`: at least
/// `min_tail` distinct radii are needed, and all must pass.
pub(crate) fn tail_verdict(entries: &[(f64, bool)], th: &Thresholds) -> Verdict {
    let cut = th.verdict_radius * (1.0 + 1e-9);
    let tail: Vec<&(f64, bool)> = entries.iter().filter(|e| e.0 <= cut).collect();
    if tail.iter().any(|e| !e.1) {
        return Verdict::Fails;
    }
    let mut radii: Vec<f64> = tail.iter().map(|e| e.0).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    if radii.len() < th.min_tail.max(1) {
        Verdict::Inconclusive
    } else {
        Verdict::Holds
    }
}

/// The t-grid: `count` equispaced values in `[0, 1]` followed by the
/// endpoints of `J`.
pub fn t_grid(count: usize, interval: (f64, f64)) -> Vec<f64> {
    let mut ts: Vec<f64> = match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count).map(|i| i as f64 / (count - 1) as f64).collect(),
    };
    ts.push(interval.0);
    ts.push(interval.1);
    ts
}
