use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use stratcheck_core::horn::ShellSchedule;
use stratcheck_core::poly::MapGerm;
use stratcheck_core::regularity::{PipelineConfig, ScanConfig, Thresholds};

/// Everything a run depends on. Missing fields take their defaults, and the
/// materialized config is echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub f: Option<PathBuf>,
    pub g: Option<PathBuf>,
    /// Perturbations for the second Kuo check.
    pub perturbations: Vec<PathBuf>,
    pub r: u32,
    pub delta: f64,
    pub width: f64,
    pub claim_width: f64,
    pub radius_cap: f64,
    pub schedule: ShellSchedule,
    pub samples: usize,
    pub seed: u64,
    pub restarts: usize,
    pub t_grid: usize,
    pub targets: Vec<f64>,
    pub thresholds: Thresholds,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = PipelineConfig::default();
        RunConfig {
            f: None,
            g: None,
            perturbations: Vec::new(),
            r: 2,
            delta: 0.5,
            width: p.width,
            claim_width: p.claim_width,
            radius_cap: p.radius_cap,
            schedule: p.scan.schedule,
            samples: p.scan.samples,
            seed: p.scan.seed,
            restarts: p.scan.restarts,
            t_grid: p.t_grid,
            targets: p.targets,
            thresholds: p.thresholds,
            out: PathBuf::from("out"),
        }
    }
}

/// Flag values that override the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub f: Option<PathBuf>,
    pub g: Option<PathBuf>,
    pub perturbations: Vec<PathBuf>,
    pub r: Option<u32>,
    pub delta: Option<f64>,
    pub width: Option<f64>,
    pub shells: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub t_grid: Option<usize>,
    pub out: Option<PathBuf>,
    /// `name=value` pairs.
    pub thresholds: Vec<String>,
}

impl RunConfig {
    /// Reads a config file; relative germ paths resolve against its folder.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("invalid config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.f.as_mut().map(fix);
        cfg.g.as_mut().map(fix);
        cfg.perturbations.iter_mut().for_each(fix);
        Ok(cfg)
    }

    pub fn from_sources(config: Option<&Path>, ov: &Overrides) -> Result<RunConfig> {
        let mut cfg = match config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        cfg.apply(ov)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, ov: &Overrides) -> Result<()> {
        if let Some(f) = &ov.f {
            self.f = Some(f.clone());
        }
        if let Some(g) = &ov.g {
            self.g = Some(g.clone());
        }
        if !ov.perturbations.is_empty() {
            self.perturbations = ov.perturbations.clone();
        }
        if let Some(v) = ov.r {
            self.r = v;
        }
        if let Some(v) = ov.delta {
            self.delta = v;
        }
        if let Some(v) = ov.width {
            self.width = v;
        }
        if let Some(v) = ov.shells {
            self.schedule.count = v;
        }
        if let Some(v) = ov.samples {
            self.samples = v;
        }
        if let Some(v) = ov.seed {
            self.seed = v;
        }
        if let Some(v) = ov.t_grid {
            self.t_grid = v;
        }
        if let Some(v) = &ov.out {
            self.out = v.clone();
        }
        for kv in &ov.thresholds {
            let (name, value) = kv
                .split_once('=')
                .with_context(|| format!("threshold `{kv}` is not name=value"))?;
            let value: f64 = value
                .trim()
                .parse()
                .with_context(|| format!("threshold `{kv}` has a non-numeric value"))?;
            self.thresholds.set(name.trim(), value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            bail!("r must be at least 1");
        }
        for (name, v) in [
            ("width", self.width),
            ("claim_width", self.claim_width),
            ("radius_cap", self.radius_cap),
        ] {
            if !(v.is_finite() && v > 0.0) {
                bail!("{name} must be positive, got {v}");
            }
        }
        self.schedule.validate(self.radius_cap)?;
        if self.samples == 0 {
            bail!("samples must be positive");
        }
        if self.t_grid < 2 {
            bail!("t_grid needs at least 2 points");
        }
        if self.targets.iter().any(|t| !(-0.1..=1.1).contains(t)) {
            bail!("targets must lie in J = [-0.1, 1.1]");
        }
        Ok(())
    }

    pub fn scan(&self) -> ScanConfig {
        ScanConfig {
            schedule: self.schedule,
            samples: self.samples,
            seed: self.seed,
            restarts: self.restarts,
        }
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            width: self.width,
            claim_width: self.claim_width,
            radius_cap: self.radius_cap,
            scan: self.scan(),
            t_grid: self.t_grid,
            targets: self.targets.clone(),
            thresholds: self.thresholds,
        }
    }

    pub fn germ_f(&self) -> Result<MapGerm> {
        load_germ(
            self.f
                .as_deref()
                .context("no germ f given (use --f or the config)")?,
        )
    }

    pub fn germ_g(&self) -> Result<MapGerm> {
        load_germ(
            self.g
                .as_deref()
                .context("no germ g given (use --g or the config)")?,
        )
    }
}

pub fn load_germ(path: &Path) -> Result<MapGerm> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read germ {}", path.display()))?;
    MapGerm::from_json(&text).with_context(|| format!("germ {}", path.display()))
}
