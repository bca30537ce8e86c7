use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::horn::{derive_seed, Horn, HornSpec, ShellSchedule};
use crate::linalg::ls_slope;
use crate::poly::{MapGerm, Polynomial};
use crate::subspace::{kuo_distance, Frame};

use super::{Condition, RegularityError, Thresholds, Verdict};

/// Shell schedule, sample count, seed and refinement restarts of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub schedule: ShellSchedule,
    pub samples: usize,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            schedule: ShellSchedule::default(),
            samples: 2000,
            seed: 0,
            restarts: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KuoShell {
    pub radius: f64,
    pub points: usize,
    pub recovered: usize,
    pub seed: u64,
    pub min_kappa: Option<f64>,
    pub argmin: Option<Vec<f64>>,
    /// Largest gradient norm over the shell points.
    pub max_grad_norm: Option<f64>,
    /// The shell minimum is zero to working precision.
    pub vanishing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KuoReport {
    pub condition: Condition,
    /// Germ whose gradients enter the Kuo distance.
    pub germ: String,
    /// Germ defining the horn.
    pub horn_germ: String,
    pub horn: HornSpec,
    /// Target exponent `e` in `kappa >= C |x|^e`.
    pub exponent: f64,
    pub scan: ScanConfig,
    pub shells: Vec<KuoShell>,
    /// `inf_k min kappa / rho_k^e`.
    pub c_est: Option<f64>,
    /// Least-squares slope of `log min kappa` against `log rho`; `None` when
    /// a shell minimum vanishes or fewer than two shells are populated.
    pub slope: Option<f64>,
    /// Same fit including vanishing shells, for inspection only.
    pub raw_slope: Option<f64>,
    pub slope_unbounded: bool,
    pub verdict: Verdict,
    pub vacuous: bool,
    pub thresholds: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl KuoReport {
    /// Observed decay exponent of the shell minima: infinite when some
    /// minimum vanishes.
    pub fn decay_exponent(&self) -> Option<f64> {
        if self.slope_unbounded {
            Some(f64::INFINITY)
        } else {
            self.slope
        }
    }

    pub fn populated_shells(&self) -> usize {
        self.shells.iter().filter(|s| s.min_kappa.is_some()).count()
    }

    /// `radius,min_value,x1..xn`; empty shells omitted.
    pub fn shells_csv(&self, nvars: usize) -> String {
        let mut out = String::from("radius,min_value");
        for i in 1..=nvars {
            out.push_str(&format!(",x{i}"));
        }
        out.push('\n');
        for s in &self.shells {
            if let (Some(m), Some(x)) = (s.min_kappa, &s.argmin) {
                out.push_str(&format!("{:e},{m:e}", s.radius));
                for c in x {
                    out.push_str(&format!(",{c:e}"));
                }
                out.push('\n');
            }
        }
        out
    }
}

fn gradient_frame(grads: &[Vec<Polynomial>], x: &[f64]) -> Frame {
    let rows = grads
        .iter()
        .map(|row| row.iter().map(|p| p.eval_unchecked(x)).collect())
        .collect();
    Frame::new(rows, x.len()).expect("finite gradients")
}

/// Scans `kappa(grad f(x))` over the horn of `horn_germ` and fits the decay.
/// Returns `None` when every shell is empty.
#[allow(clippy::too_many_arguments)]
fn kuo_scan(
    condition: Condition,
    f: &MapGerm,
    horn_germ: &MapGerm,
    spec: HornSpec,
    exponent: f64,
    scan: &ScanConfig,
    th: &Thresholds,
) -> Result<Option<KuoReport>, RegularityError> {
    scan.schedule.validate(spec.radius_cap)?;
    let horn = Horn::new(horn_germ, spec)?;
    let grads = f.gradients();
    let kappa = |x: &[f64]| kuo_distance(&gradient_frame(&grads, x));
    let radii = scan.schedule.radii();
    let shells: Vec<Result<KuoShell, RegularityError>> = radii
        .par_iter()
        .enumerate()
        .map(|(k, &rho)| {
            let seed = derive_seed(scan.seed, k as u64);
            let shell = horn.sample_shell(rho, scan.samples, seed)?;
            let mut rec = KuoShell {
                radius: rho,
                points: shell.points.len(),
                recovered: shell.recovered,
                seed,
                min_kappa: None,
                argmin: None,
                max_grad_norm: None,
                vanishing: false,
            };
            if shell.is_empty() {
                return Ok(rec);
            }
            let m = horn.shell_min(&kappa, &shell, scan.restarts)?;
            let max_grad = shell
                .points
                .iter()
                .map(|x| gradient_frame(&grads, x).max_norm())
                .fold(0.0, f64::max);
            rec.vanishing = m.value <= th.vanishing_tol * max_grad;
            rec.min_kappa = Some(m.value);
            rec.argmin = Some(m.argmin);
            rec.max_grad_norm = Some(max_grad);
            Ok(rec)
        })
        .collect();
    let shells = shells.into_iter().collect::<Result<Vec<_>, _>>()?;

    let populated: Vec<(f64, f64, bool)> = shells
        .iter()
        .filter_map(|s| s.min_kappa.map(|m| (s.radius, m, s.vanishing)))
        .collect();
    let mut report = KuoReport {
        condition,
        germ: f.to_string(),
        horn_germ: horn_germ.to_string(),
        horn: spec,
        exponent,
        scan: *scan,
        shells,
        c_est: None,
        slope: None,
        raw_slope: None,
        slope_unbounded: false,
        verdict: Verdict::Inconclusive,
        vacuous: false,
        thresholds: [
            ("c_floor".to_string(), th.c_floor),
            ("slope_tol".to_string(), th.slope_tol),
            ("vanishing_tol".to_string(), th.vanishing_tol),
        ]
        .into_iter()
        .collect(),
        notes: Vec::new(),
    };
    if populated.is_empty() {
        return Ok(None);
    }
    let empty = report.shells.len() - populated.len();
    if empty > 0 {
        report.notes.push(format!(
            "{empty} shell(s) had no horn points and were skipped"
        ));
    }

    report.c_est = Some(
        populated
            .iter()
            .map(|&(rho, m, _)| m / rho.powf(exponent))
            .fold(f64::INFINITY, f64::min),
    );
    report.slope_unbounded = populated.iter().any(|p| p.2);
    let positive: Vec<(f64, f64)> = populated
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    let (lx, ly): (Vec<f64>, Vec<f64>) = positive.into_iter().unzip();
    report.raw_slope = ls_slope(&lx, &ly);
    if !report.slope_unbounded {
        report.slope = report.raw_slope;
    }

    let c_est = report.c_est.expect("set above");
    report.verdict = if report.slope_unbounded {
        report
            .notes
            .push("a shell minimum vanishes: decay faster than any power".into());
        Verdict::Fails
    } else if c_est < th.c_floor {
        Verdict::Fails
    } else {
        match report.slope {
            None => {
                report
                    .notes
                    .push("fewer than two populated shells; slope undetermined".into());
                Verdict::Inconclusive
            }
            Some(s) if s > exponent + th.slope_tol => Verdict::Fails,
            Some(_) => Verdict::Holds,
        }
    };
    Ok(Some(report))
}

/// Estimates `C` and the decay of `min kappa(grad f_1, .., grad f_p)` over
/// `H_r(f; w) ∩ {|x| < alpha}` against the target `C |x|^{r-1}`.
pub fn kuo_check(
    f: &MapGerm,
    r: u32,
    spec: &HornSpec,
    scan: &ScanConfig,
    th: &Thresholds,
) -> Result<KuoReport, RegularityError> {
    if spec.degree_r != r {
        return Err(RegularityError::Config(format!(
            "horn degree {} differs from r = {r}",
            spec.degree_r
        )));
    }
    kuo_scan(Condition::Kuo, f, f, *spec, f64::from(r) - 1.0, scan, th)?
        .ok_or(RegularityError::AllShellsEmpty)
}

/// One report per perturbation `g`: `kappa(grad f)` against `C |x|^{r-delta}`
/// over `H_{r+1}(g; w)`. A horn that is empty on every shell makes the
/// inequality hold vacuously on the sampled radii; the report says so.
pub fn second_kuo_check(
    f: &MapGerm,
    perturbations: &[MapGerm],
    r: u32,
    delta: f64,
    spec: &HornSpec,
    scan: &ScanConfig,
    th: &Thresholds,
) -> Result<Vec<KuoReport>, RegularityError> {
    if !(delta > 0.0 && delta < f64::from(r)) {
        return Err(RegularityError::Config(format!(
            "delta must lie in (0, {r}), got {delta}"
        )));
    }
    let horn_spec = HornSpec {
        degree_r: r + 1,
        ..*spec
    };
    let exponent = f64::from(r) - delta;
    perturbations
        .iter()
        .map(|g| {
            f.check_jet_match(g, r + 1)?;
            match kuo_scan(Condition::Kuo2, f, g, horn_spec, exponent, scan, th)? {
                Some(rep) => Ok(rep),
                None => {
                    let mut rep =
                        empty_report(Condition::Kuo2, f, g, horn_spec, exponent, scan, th);
                    rep.verdict = Verdict::Holds;
                    rep.vacuous = true;
                    rep.notes.push(
                        "horn is empty on every sampled shell; the inequality holds vacuously there"
                            .into(),
                    );
                    Ok(rep)
                }
            }
        })
        .collect()
}

/// Report skeleton for a scan whose shells were all empty.
pub fn empty_report(
    condition: Condition,
    f: &MapGerm,
    horn_germ: &MapGerm,
    spec: HornSpec,
    exponent: f64,
    scan: &ScanConfig,
    th: &Thresholds,
) -> KuoReport {
    KuoReport {
        condition,
        germ: f.to_string(),
        horn_germ: horn_germ.to_string(),
        horn: spec,
        exponent,
        scan: *scan,
        shells: scan
            .schedule
            .radii()
            .into_iter()
            .enumerate()
            .map(|(k, radius)| KuoShell {
                radius,
                points: 0,
                recovered: 0,
                seed: derive_seed(scan.seed, k as u64),
                min_kappa: None,
                argmin: None,
                max_grad_norm: None,
                vanishing: false,
            })
            .collect(),
        c_est: None,
        slope: None,
        raw_slope: None,
        slope_unbounded: false,
        verdict: Verdict::Inconclusive,
        vacuous: false,
        thresholds: [
            ("c_floor".to_string(), th.c_floor),
            ("slope_tol".to_string(), th.slope_tol),
            ("vanishing_tol".to_string(), th.vanishing_tol),
        ]
        .into_iter()
        .collect(),
        notes: vec!["every shell is empty".into()],
    }
}
