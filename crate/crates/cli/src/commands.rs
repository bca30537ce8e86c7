use std::fmt;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use stratcheck_core::horn::{derive_seed, Horn, HornSpec};
use stratcheck_core::regularity::{
    build_family, empty_report, full_pipeline, kuo_check, second_kuo_check, Condition,
    RegularityError, Verdict,
};
use stratcheck_core::subspace::{gap, intersection_dim, principal_angles, Subspace};

use crate::config::{load_germ, RunConfig};
use crate::output::{Outputs, Report};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FAILS: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_IMPLICATION: i32 = 4;

pub fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Holds => EXIT_HOLDS,
        Verdict::Fails => EXIT_FAILS,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// A finished command: exit code, the report and the files to write.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Report,
    pub outputs: Outputs,
    pub summary: String,
}

struct Stages {
    start: Instant,
    report: Report,
}

impl Stages {
    fn new(command: &str, cfg: &RunConfig) -> Self {
        Stages {
            start: Instant::now(),
            report: Report::new(command, cfg),
        }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.report
            .timings
            .insert(stage.into(), now.duration_since(self.start).as_secs_f64());
        self.start = now;
    }
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("reports serialize")
}

pub fn cmd_kuo(cfg: &RunConfig) -> Result<Outcome> {
    let mut st = Stages::new("kuo", cfg);
    let f = cfg.germ_f()?;
    let spec = HornSpec::new(cfg.r, cfg.width, cfg.radius_cap)?;
    st.lap("load");
    let rep = match kuo_check(&f, cfg.r, &spec, &cfg.scan(), &cfg.thresholds) {
        Ok(rep) => rep,
        Err(RegularityError::AllShellsEmpty) => {
            let mut rep = empty_report(
                Condition::Kuo,
                &f,
                &f,
                spec,
                f64::from(cfg.r) - 1.0,
                &cfg.scan(),
                &cfg.thresholds,
            );
            rep.notes
                .push("horn is empty on every sampled shell".into());
            rep
        }
        Err(e) => return Err(e.into()),
    };
    st.lap("scan");
    let slope = if rep.slope_unbounded {
        "unbounded, shell minima vanish".into()
    } else {
        fmt_opt(rep.slope)
    };
    let summary = format!(
        "kuo: {} (C_est = {}, slope = {slope})",
        rep.verdict,
        fmt_opt(rep.c_est),
    );
    let mut outputs = Outputs::default();
    outputs.add("kuo_shells.csv", rep.shells_csv(f.nvars()));
    let code = verdict_code(rep.verdict);
    st.report.payload = to_value(&rep);
    outputs.add_json("kuo.json", &st.report)?;
    Ok(Outcome {
        code,
        report: st.report,
        outputs,
        summary,
    })
}

pub fn cmd_kuo2(cfg: &RunConfig) -> Result<Outcome> {
    let mut st = Stages::new("kuo2", cfg);
    let f = cfg.germ_f()?;
    if cfg.perturbations.is_empty() {
        bail!("no perturbations given (use --perturbation or the config)");
    }
    let gs = cfg
        .perturbations
        .iter()
        .map(|p| load_germ(p))
        .collect::<Result<Vec<_>>>()?;
    let spec = HornSpec::new(cfg.r, cfg.width, cfg.radius_cap)?;
    st.lap("load");
    let reps = second_kuo_check(
        &f,
        &gs,
        cfg.r,
        cfg.delta,
        &spec,
        &cfg.scan(),
        &cfg.thresholds,
    )?;
    st.lap("scan");
    let mut outputs = Outputs::default();
    let mut lines = Vec::new();
    for (i, rep) in reps.iter().enumerate() {
        outputs.add(format!("kuo2_shells_{i}.csv"), rep.shells_csv(f.nvars()));
        lines.push(format!(
            "kuo2[{i}]: {}{} (C_est = {})",
            rep.verdict,
            if rep.vacuous { " (vacuous)" } else { "" },
            fmt_opt(rep.c_est)
        ));
    }
    let code = verdict_code(Verdict::all(reps.iter().map(|r| r.verdict)));
    st.report.payload = to_value(&reps);
    outputs.add_json("kuo2.json", &st.report)?;
    Ok(Outcome {
        code,
        report: st.report,
        outputs,
        summary: lines.join("\n"),
    })
}

pub fn cmd_regularity(cfg: &RunConfig) -> Result<Outcome> {
    let mut st = Stages::new("regularity", cfg);
    let f = cfg.germ_f()?;
    let g = cfg.germ_g()?;
    let fam = build_family(&f, &g, cfg.r)?;
    st.lap("load");
    let bundle = full_pipeline(&fam, &cfg.pipeline())?;
    st.lap("pipeline");

    let mut outputs = Outputs::default();
    outputs.add("kuo_shells.csv", bundle.kuo.shells_csv(fam.nvars()));
    let c = &bundle.conditions;
    let cl = &bundle.claims;
    for rep in [&c.a, &c.m, &c.c, &c.cd].into_iter().chain(cl.all()) {
        outputs.add(format!("{}.csv", rep.condition.name()), rep.to_csv());
    }
    outputs.add(
        "sequences.csv",
        sequences_csv(&bundle.sequences, fam.nvars()),
    );

    let mut lines = vec![format!("kuo: {}", bundle.kuo.verdict)];
    for rep in [&c.a, &c.m, &c.c, &c.cd] {
        lines.push(format!("{}: {}", rep.condition.name(), rep.verdict));
    }
    for rep in cl.all() {
        lines.push(format!(
            "{}: {}{}",
            rep.condition.name(),
            rep.verdict,
            if rep.vacuous { " (vacuous)" } else { "" }
        ));
    }
    if bundle.sequences.empty_y {
        lines.push("empty_Y".into());
    }
    lines.push(format!("overall: {}", bundle.verdict));
    if !bundle.implication_consistent {
        lines.push(format!(
            "implication check failed on {} sequence(s)",
            c.implication_counterexamples
        ));
    }
    let code = if bundle.implication_consistent {
        verdict_code(bundle.verdict)
    } else {
        EXIT_IMPLICATION
    };
    st.report.payload = to_value(&bundle);
    outputs.add_json("regularity.json", &st.report)?;
    Ok(Outcome {
        code,
        report: st.report,
        outputs,
        summary: lines.join("\n"),
    })
}

fn sequences_csv(ys: &stratcheck_core::regularity::YSampling, n: usize) -> String {
    let mut out = String::from("radius,target,branch,t");
    for i in 1..=n {
        out.push_str(&format!(",x{i}"));
    }
    out.push_str(",residual\n");
    for s in &ys.sequences {
        for p in &s.points {
            out.push_str(&format!(
                "{:e},{:e},{},{:e}",
                p.radius, s.target, s.branch, p.t
            ));
            for c in &p.x {
                out.push_str(&format!(",{c:e}"));
            }
            out.push_str(&format!(",{:e}\n", p.residual));
        }
    }
    out
}

#[derive(Debug, Serialize)]
struct HornShellSummary {
    radius: f64,
    seed: u64,
    points: usize,
    drawn: usize,
    recovered: usize,
}

pub fn cmd_sample_horn(cfg: &RunConfig) -> Result<Outcome> {
    let mut st = Stages::new("sample-horn", cfg);
    let f = cfg.germ_f()?;
    let horn = Horn::new(&f, HornSpec::new(cfg.r, cfg.width, cfg.radius_cap)?)?;
    st.lap("load");
    let mut csv = String::from("radius");
    for i in 1..=f.nvars() {
        csv.push_str(&format!(",x{i}"));
    }
    csv.push('\n');
    let mut shells = Vec::new();
    for (k, rho) in cfg.schedule.radii().into_iter().enumerate() {
        let seed = derive_seed(cfg.seed, k as u64);
        let shell = horn.sample_shell(rho, cfg.samples, seed)?;
        for x in &shell.points {
            csv.push_str(&format!("{rho:e}"));
            for c in x {
                csv.push_str(&format!(",{c:e}"));
            }
            csv.push('\n');
        }
        shells.push(HornShellSummary {
            radius: rho,
            seed,
            points: shell.points.len(),
            drawn: shell.drawn,
            recovered: shell.recovered,
        });
    }
    st.lap("sample");
    let total: usize = shells.iter().map(|s| s.points).sum();
    let summary = format!("sampled {total} horn points on {} shells", shells.len());
    let mut outputs = Outputs::default();
    outputs.add("horn_samples.csv", csv);
    st.report.payload = to_value(&shells);
    outputs.add_json("horn.json", &st.report)?;
    Ok(Outcome {
        code: EXIT_HOLDS,
        report: st.report,
        outputs,
        summary,
    })
}

/// Printed result of the `gap` command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSummary {
    pub gap: f64,
    pub angles: Vec<f64>,
    pub intersection_dim: usize,
}

impl fmt::Display for GapSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gap {}", self.gap)?;
        let angles: Vec<String> = self.angles.iter().map(f64::to_string).collect();
        writeln!(f, "angles {}", angles.join(" "))?;
        write!(f, "intersection_dim {}", self.intersection_dim)
    }
}

fn load_basis(path: &Path) -> Result<Subspace> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let vecs: Vec<Vec<f64>> = serde_json::from_str(&text)
        .with_context(|| format!("{}: expected a JSON array of basis vectors", path.display()))?;
    let Some(m) = vecs.first().map(Vec::len) else {
        bail!("{}: empty basis", path.display());
    };
    Subspace::span(vecs, m).with_context(|| path.display().to_string())
}

/// `gap(l, w)`, the principal angles and the intersection dimension.
pub fn cmd_gap(l: &Path, w: &Path, angle_tol: f64) -> Result<GapSummary> {
    let l = load_basis(l)?;
    let w = load_basis(w)?;
    if l.dim_ambient() != w.dim_ambient() {
        bail!(
            "dimension mismatch: vectors of length {} and {}",
            l.dim_ambient(),
            w.dim_ambient()
        );
    }
    Ok(GapSummary {
        gap: gap(&l, &w)?.gap,
        angles: principal_angles(&l, &w)?,
        intersection_dim: intersection_dim(&l, &w, angle_tol)?,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| format!("{v:.6}"))
}
