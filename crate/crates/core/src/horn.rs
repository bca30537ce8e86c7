//! Horn-neighbourhoods `H_r(f; w) = { x : |f(x)| <= w |x|^r }` sampled on
//! shrinking spheres, and per-shell minimization of scalar functionals over
//! `sphere ∩ horn`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{axpy, dot, norm, scaled};
use crate::poly::{MapGerm, Polynomial};

/// Iteration cap for both descent procedures.
pub const DESCENT_MAX_ITERS: usize = 200;
/// Angular step (radians) below which descent stops.
pub const DESCENT_STEP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HornError {
    #[error("invalid horn spec: {0}")]
    InvalidSpec(String),
    #[error("radius {rho} must lie in (0, {cap})")]
    InvalidRadius { rho: f64, cap: f64 },
    #[error("horn membership is undefined at the germ point x = 0")]
    ZeroPoint,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("functional is not finite at {point:?}")]
    NonFinite { point: Vec<f64> },
    #[error("shell at radius {radius} has no points")]
    EmptyShell { radius: f64 },
}

/// Degree, width and radius cap of `H_r(f; w) ∩ {|x| < alpha}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HornSpec {
    pub degree_r: u32,
    pub width: f64,
    pub radius_cap: f64,
}

impl HornSpec {
    pub fn new(degree_r: u32, width: f64, radius_cap: f64) -> Result<Self, HornError> {
        let spec = HornSpec {
            degree_r,
            width,
            radius_cap,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), HornError> {
        if self.degree_r < 1 {
            return Err(HornError::InvalidSpec("degree must be >= 1".into()));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(HornError::InvalidSpec("width must be positive".into()));
        }
        if !(self.radius_cap > 0.0 && self.radius_cap.is_finite()) {
            return Err(HornError::InvalidSpec("radius cap must be positive".into()));
        }
        Ok(())
    }

    pub fn with_width(self, width: f64) -> Self {
        HornSpec { width, ..self }
    }
}

/// Geometric radii `rho_k = rho0 * gamma^k`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShellSchedule {
    pub rho0: f64,
    pub gamma: f64,
    pub count: usize,
}

impl Default for ShellSchedule {
    /// Four shells per decade from 1e-1 down to 1e-5.
    fn default() -> Self {
        ShellSchedule {
            rho0: 0.1,
            gamma: 10f64.powf(-0.25),
            count: 17,
        }
    }
}

impl ShellSchedule {
    pub fn validate(&self, radius_cap: f64) -> Result<(), HornError> {
        if !(self.rho0 > 0.0 && self.rho0 < radius_cap) {
            return Err(HornError::InvalidRadius {
                rho: self.rho0,
                cap: radius_cap,
            });
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(HornError::InvalidSpec(
                "shell ratio must lie in (0, 1)".into(),
            ));
        }
        if self.count == 0 {
            return Err(HornError::InvalidSpec("need at least one shell".into()));
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.count)
            .map(|k| self.rho0 * self.gamma.powi(k as i32))
            .collect()
    }
}

/// Points of `H_r(f; w)` on the sphere `|x| = radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub radius: f64,
    pub points: Vec<Vec<f64>>,
    pub seed: u64,
    /// Directions drawn before filtering.
    pub drawn: usize,
    /// Points recovered by descent after failing the first membership test.
    pub recovered: usize,
}

impl Shell {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellMin {
    pub value: f64,
    pub argmin: Vec<f64>,
}

/// Per-shell minima of one functional over a radius schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellScan {
    pub radii: Vec<f64>,
    pub minima: Vec<Option<ShellMin>>,
}

impl ShellScan {
    /// `radius,min_value,x1..xn`; empty shells are omitted.
    pub fn to_csv(&self, nvars: usize) -> String {
        let mut out = String::from("radius,min_value");
        for i in 1..=nvars {
            out.push_str(&format!(",x{i}"));
        }
        out.push('\n');
        for (rho, m) in self.radii.iter().zip(&self.minima) {
            if let Some(m) = m {
                out.push_str(&format!("{rho:e},{:e}", m.value));
                for c in &m.argmin {
                    out.push_str(&format!(",{c:e}"));
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Mixes a base seed with a stream index (SplitMix64 finalizer).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform direction on the unit sphere of `R^n`.
pub fn random_direction(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let len = norm(&v);
        if len > 1e-12 {
            return scaled(&v, 1.0 / len);
        }
    }
}

/// Orthonormal basis of the tangent space `u^⊥` of the unit sphere at `u`.
pub(crate) fn tangent_basis(u: &[f64]) -> Vec<Vec<f64>> {
    let n = u.len();
    let mut basis: Vec<Vec<f64>> = vec![u.to_vec()];
    let mut axes: Vec<usize> = (0..n).collect();
    // Axes least aligned with u first.
    axes.sort_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()));
    for i in axes {
        if basis.len() == n {
            break;
        }
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                axpy(-c, b, &mut w);
            }
        }
        let len = norm(&w);
        if len > 1e-8 {
            basis.push(scaled(&w, 1.0 / len));
        }
    }
    basis.remove(0);
    basis
}

/// Moves along the great circle through `u` in tangent direction `d`.
pub(crate) fn geodesic_step(u: &[f64], d: &[f64], theta: f64) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    let v: Vec<f64> = u.iter().zip(d).map(|(a, b)| a * c + b * s).collect();
    let len = norm(&v);
    scaled(&v, 1.0 / len)
}

/// A germ together with a horn spec and cached symbolic gradients.
#[derive(Debug, Clone)]
pub struct Horn {
    germ: MapGerm,
    grads: Vec<Vec<Polynomial>>,
    spec: HornSpec,
}

impl Horn {
    pub fn new(germ: &MapGerm, spec: HornSpec) -> Result<Self, HornError> {
        spec.validate()?;
        Ok(Horn {
            grads: germ.gradients(),
            germ: germ.clone(),
            spec,
        })
    }

    pub fn spec(&self) -> &HornSpec {
        &self.spec
    }

    pub fn germ(&self) -> &MapGerm {
        &self.germ
    }

    /// `|f(x)| / |x|^r`; membership means this is at most the width.
    pub fn ratio(&self, x: &[f64]) -> f64 {
        norm(&self.germ.eval_unchecked(x)) / norm(x).powi(self.spec.degree_r as i32)
    }

    /// Membership for `x != 0` of the right dimension.
    pub fn contains(&self, x: &[f64]) -> bool {
        let fx = self.germ.eval_unchecked(x);
        norm(&fx) <= self.spec.width * norm(x).powi(self.spec.degree_r as i32)
    }

    /// Draws `count` directions on `|x| = rho`, keeps horn members and pulls
    /// rejected points toward the horn by descent on `|f(x)|^2` along the
    /// sphere. Deterministic in `(f, spec, rho, count, seed)`.
    pub fn sample_shell(&self, rho: f64, count: usize, seed: u64) -> Result<Shell, HornError> {
        if !(rho > 0.0 && rho < self.spec.radius_cap) {
            return Err(HornError::InvalidRadius {
                rho,
                cap: self.spec.radius_cap,
            });
        }
        let n = self.germ.nvars();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::new();
        let mut recovered = 0;
        for _ in 0..count {
            let u = random_direction(&mut rng, n);
            let x = scaled(&u, rho);
            if self.contains(&x) {
                points.push(x);
            } else if let Some(x) = self.descend_into_horn(u, rho) {
                // Post-filter re-check.
                if self.contains(&x) {
                    points.push(x);
                    recovered += 1;
                }
            }
        }
        Ok(Shell {
            radius: rho,
            points,
            seed,
            drawn: count,
            recovered,
        })
    }

    /// `(|f|^2, tangential gradient w.r.t. the unit direction)` at `x = rho u`.
    fn residual_and_grad(&self, u: &[f64], rho: f64) -> (f64, Vec<f64>) {
        let x = scaled(u, rho);
        let fx = self.germ.eval_unchecked(&x);
        let mut g = vec![0.0; u.len()];
        for (fj, row) in fx.iter().zip(&self.grads) {
            for (gi, p) in g.iter_mut().zip(row) {
                *gi += 2.0 * fj * p.eval_unchecked(&x) * rho;
            }
        }
        let radial = dot(&g, u);
        axpy(-radial, u, &mut g);
        (dot(&fx, &fx), g)
    }

    fn descend_into_horn(&self, mut u: Vec<f64>, rho: f64) -> Option<Vec<f64>> {
        let mut theta: f64 = 0.5;
        let (mut phi, mut g) = self.residual_and_grad(&u, rho);
        for _ in 0..DESCENT_MAX_ITERS {
            let gn = norm(&g);
            if gn == 0.0 || !phi.is_finite() {
                return None;
            }
            let d = scaled(&g, -1.0 / gn);
            // Armijo backtracking along the geodesic.
            let mut accepted = None;
            while theta >= DESCENT_STEP_TOL {
                let cand = geodesic_step(&u, &d, theta);
                let (phi_c, g_c) = self.residual_and_grad(&cand, rho);
                if phi_c <= phi - 1e-4 * theta * gn {
                    accepted = Some((cand, phi_c, g_c));
                    break;
                }
                theta *= 0.5;
            }
            let (cand, phi_c, g_c) = accepted?;
            u = cand;
            phi = phi_c;
            g = g_c;
            let x = scaled(&u, rho);
            if self.contains(&x) {
                return Some(x);
            }
            theta = (theta * 2.0).min(0.5);
        }
        None
    }

    /// Minimum of `func` over the shell points, refined by a compass search
    /// on `sphere ∩ horn` started from the `restarts` best points.
    pub fn shell_min<F>(
        &self,
        func: &F,
        shell: &Shell,
        restarts: usize,
    ) -> Result<ShellMin, HornError>
    where
        F: Fn(&[f64]) -> f64 + ?Sized,
    {
        if shell.is_empty() {
            return Err(HornError::EmptyShell {
                radius: shell.radius,
            });
        }
        let mut values = Vec::with_capacity(shell.points.len());
        for (i, x) in shell.points.iter().enumerate() {
            let v = func(x);
            if !v.is_finite() {
                return Err(HornError::NonFinite { point: x.clone() });
            }
            values.push((v, i));
        }
        values.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut best = ShellMin {
            value: values[0].0,
            argmin: shell.points[values[0].1].clone(),
        };
        for &(v, i) in values.iter().take(restarts) {
            let refined = self.compass_search(func, &shell.points[i], v, shell.radius);
            if refined.value < best.value {
                best = refined;
            }
        }
        Ok(best)
    }

    fn compass_search<F>(&self, func: &F, start: &[f64], start_value: f64, rho: f64) -> ShellMin
    where
        F: Fn(&[f64]) -> f64 + ?Sized,
    {
        let mut u = scaled(start, 1.0 / norm(start));
        let mut value = start_value;
        let mut theta: f64 = 1e-2;
        for _ in 0..DESCENT_MAX_ITERS {
            if theta < DESCENT_STEP_TOL {
                break;
            }
            let mut best: Option<(Vec<f64>, f64)> = None;
            for d in tangent_basis(&u) {
                for sign in [1.0, -1.0] {
                    let cand = geodesic_step(&u, &scaled(&d, sign), theta);
                    let x = scaled(&cand, rho);
                    if !self.contains(&x) {
                        continue;
                    }
                    let v = func(&x);
                    if v.is_finite() && v < best.as_ref().map_or(value, |b| b.1) {
                        best = Some((cand, v));
                    }
                }
            }
            match best {
                Some((cand, v)) => {
                    u = cand;
                    value = v;
                    theta = (theta * 2.0).min(0.25);
                }
                None => theta *= 0.5,
            }
        }
        ShellMin {
            value,
            argmin: scaled(&u, rho),
        }
    }

    /// Samples every radius of `schedule` (in parallel, merged by shell
    /// index) and minimizes `func` on each non-empty shell.
    pub fn scan<F>(
        &self,
        schedule: &ShellSchedule,
        count: usize,
        seed: u64,
        restarts: usize,
        func: &F,
    ) -> Result<(Vec<Shell>, ShellScan), HornError>
    where
        F: Fn(&[f64]) -> f64 + Sync + ?Sized,
    {
        schedule.validate(self.spec.radius_cap)?;
        let radii = schedule.radii();
        let results: Vec<Result<(Shell, Option<ShellMin>), HornError>> = radii
            .par_iter()
            .enumerate()
            .map(|(k, &rho)| {
                let shell = self.sample_shell(rho, count, derive_seed(seed, k as u64))?;
                let min = if shell.is_empty() {
                    None
                } else {
                    Some(self.shell_min(func, &shell, restarts)?)
                };
                Ok((shell, min))
            })
            .collect();
        let mut shells = Vec::with_capacity(radii.len());
        let mut minima = Vec::with_capacity(radii.len());
        for r in results {
            let (s, m) = r?;
            shells.push(s);
            minima.push(m);
        }
        Ok((shells, ShellScan { radii, minima }))
    }
}

/// `|f(x)| <= w |x|^r` for `x != 0`.
pub fn horn_contains(f: &MapGerm, spec: &HornSpec, x: &[f64]) -> Result<bool, HornError> {
    if x.len() != f.nvars() {
        return Err(HornError::DimensionMismatch {
            expected: f.nvars(),
            got: x.len(),
        });
    }
    if x.iter().all(|&c| c == 0.0) {
        return Err(HornError::ZeroPoint);
    }
    let fx = f.eval_unchecked(x);
    Ok(norm(&fx) <= spec.width * norm(x).powi(spec.degree_r as i32))
}

pub fn sample_shell(
    f: &MapGerm,
    spec: &HornSpec,
    rho: f64,
    count: usize,
    seed: u64,
) -> Result<Shell, HornError> {
    Horn::new(f, *spec)?.sample_shell(rho, count, seed)
}

pub fn shell_min<F>(
    func: &F,
    shell: &Shell,
    restarts: usize,
    f: &MapGerm,
    spec: &HornSpec,
) -> Result<ShellMin, HornError>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    Horn::new(f, *spec)?.shell_min(func, shell, restarts)
}

/// Outcome of [`horn_inclusion_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionResult {
    pub holds: bool,
    pub witness: Option<Vec<f64>>,
    pub checked: usize,
}

/// Empirical test of `H_r(f; b) ∩ {|x| < beta} ⊂ H_r(ft; a)`: samples the
/// smaller horn on 13 shells below `beta` and reports the first point that
/// falls outside the larger one.
#[allow(clippy::too_many_arguments)]
pub fn horn_inclusion_check(
    f: &MapGerm,
    ft: &MapGerm,
    r: u32,
    b: f64,
    a: f64,
    beta: f64,
    samples: usize,
    seed: u64,
) -> Result<InclusionResult, HornError> {
    if !(b > 0.0 && b <= a) {
        return Err(HornError::InvalidSpec("need 0 < b <= a".into()));
    }
    let inner = Horn::new(f, HornSpec::new(r, b, beta)?)?;
    let outer = Horn::new(ft, HornSpec::new(r, a, beta)?)?;
    let schedule = ShellSchedule {
        rho0: 0.9 * beta,
        gamma: 10f64.powf(-0.25),
        count: 13,
    };
    let mut checked = 0;
    for (k, rho) in schedule.radii().into_iter().enumerate() {
        let shell = inner.sample_shell(rho, samples, derive_seed(seed, k as u64))?;
        for x in shell.points {
            checked += 1;
            if !outer.contains(&x) {
                return Ok(InclusionResult {
                    holds: false,
                    witness: Some(x),
                    checked,
                });
            }
        }
    }
    Ok(InclusionResult {
        holds: true,
        witness: None,
        checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::{kuo_distance, Frame};

    fn germ(n: usize, comps: &[&str]) -> MapGerm {
        MapGerm::parse(n, comps).unwrap()
    }

    fn spec(r: u32, w: f64) -> HornSpec {
        HornSpec::new(r, w, 100.0).unwrap()
    }

    #[test]
    fn membership_examples() {
        let f = germ(2, &["x1^2 + x2^2"]);
        assert!(horn_contains(&f, &spec(2, 1.5), &[0.3, -0.2]).unwrap());
        let lin = germ(2, &["x1"]);
        for rho in [1e-3, 0.5, 9.0] {
            assert!(!horn_contains(&lin, &spec(2, 0.1), &[rho, 0.0]).unwrap());
            assert!(horn_contains(&lin, &spec(2, 0.1), &[0.0, rho]).unwrap());
        }
        assert_eq!(
            horn_contains(&lin, &spec(2, 0.1), &[0.0, 0.0]).unwrap_err(),
            HornError::ZeroPoint
        );
    }

    #[test]
    fn homogeneous_membership_is_radius_independent() {
        let f = germ(3, &["x1^2 - x2*x3 + 0.3*x3^2"]);
        let s = spec(2, 0.4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let u = random_direction(&mut rng, 3);
            let first = horn_contains(&f, &s, &scaled(&u, 0.5)).unwrap();
            for rho in [1e-1, 1e-2, 1e-3, 1e-4] {
                assert_eq!(horn_contains(&f, &s, &scaled(&u, rho)).unwrap(), first);
            }
        }
    }

    #[test]
    fn full_sphere_retained() {
        let f = germ(2, &["x1^2 + x2^2"]);
        let shell = sample_shell(&f, &spec(2, 1.5), 0.01, 300, 7).unwrap();
        assert_eq!(shell.points.len(), 300);
        assert_eq!(shell.recovered, 0);
        for x in &shell.points {
            assert!((norm(x) - 0.01).abs() <= 1e-12 * 0.01);
        }
    }

    #[test]
    fn thin_horn_around_axis() {
        let f = germ(2, &["x1"]);
        let s = spec(2, 0.1);
        let shell = sample_shell(&f, &s, 0.01, 200, 3).unwrap();
        assert!(!shell.is_empty());
        assert!(shell.recovered > 0);
        for x in &shell.points {
            // direct membership oracle: |x1| <= 0.1 * rho^2
            assert!(x[0].abs() <= 0.1 * 0.01f64.powi(2) * (1.0 + 1e-12));
            assert!(horn_contains(&f, &s, x).unwrap());
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let f = germ(3, &["x1^2 - x2^2 + x3^3"]);
        let a = sample_shell(&f, &spec(2, 0.2), 0.05, 100, 42).unwrap();
        let b = sample_shell(&f, &spec(2, 0.2), 0.05, 100, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_shell(&f, &spec(2, 0.2), 0.05, 100, 43).unwrap();
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn invalid_radius() {
        let f = germ(1, &["x1"]);
        let s = HornSpec::new(1, 1.0, 0.5).unwrap();
        assert!(matches!(
            sample_shell(&f, &s, 0.7, 10, 0),
            Err(HornError::InvalidRadius { .. })
        ));
        assert!(HornSpec::new(1, 0.0, 1.0).is_err());
    }

    #[test]
    fn shell_min_constant_and_linear() {
        let f = germ(2, &["x1^2 + x2^2"]);
        let s = spec(2, 1.5);
        let shell = sample_shell(&f, &s, 1.0, 50, 1).unwrap();
        let m = shell_min(&|_: &[f64]| 3.5, &shell, 4, &f, &s).unwrap();
        assert_eq!(m.value, 3.5);
        // closed form: min of x1 on the unit circle is -1
        let m = shell_min(&|x: &[f64]| x[0], &shell, 4, &f, &s).unwrap();
        assert!((m.value + 1.0).abs() < 1e-6);
    }

    #[test]
    fn shell_min_of_gradient_norm() {
        let f = germ(2, &["x1^2 + x2^2"]);
        let s = spec(2, 1.5);
        let grads = f.gradients();
        let kappa = |x: &[f64]| {
            let rows = grads
                .iter()
                .map(|g| g.iter().map(|p| p.eval_unchecked(x)).collect())
                .collect();
            kuo_distance(&Frame::new(rows, 2).unwrap())
        };
        for rho in [1e-1, 1e-3] {
            let shell = sample_shell(&f, &s, rho, 100, 2).unwrap();
            let m = shell_min(&kappa, &shell, 4, &f, &s).unwrap();
            assert!((m.value - 2.0 * rho).abs() < 1e-6);
        }
    }

    #[test]
    fn shell_min_never_exceeds_plain_minimum() {
        let f = germ(2, &["x1^2 - x2^2"]);
        let s = spec(2, 0.5);
        let shell = sample_shell(&f, &s, 0.1, 100, 5).unwrap();
        let func = |x: &[f64]| (x[0] - 0.03).powi(2) + x[1];
        let plain = shell
            .points
            .iter()
            .map(|x| func(x))
            .fold(f64::INFINITY, f64::min);
        let m = shell_min(&func, &shell, 3, &f, &s).unwrap();
        assert!(m.value <= plain);
        assert!(horn_contains(&f, &s, &m.argmin).unwrap());
    }

    #[test]
    fn shell_min_errors() {
        let f = germ(2, &["x1"]);
        let s = spec(1, 0.5);
        let shell = sample_shell(&f, &s, 0.1, 20, 5).unwrap();
        assert!(matches!(
            shell_min(&|_: &[f64]| f64::NAN, &shell, 1, &f, &s),
            Err(HornError::NonFinite { .. })
        ));
        let empty = Shell {
            radius: 0.1,
            points: vec![],
            seed: 0,
            drawn: 0,
            recovered: 0,
        };
        assert!(matches!(
            shell_min(&|_: &[f64]| 0.0, &empty, 1, &f, &s),
            Err(HornError::EmptyShell { .. })
        ));
    }

    #[test]
    fn inclusion_identity_and_perturbation() {
        let f = germ(2, &["x1^2"]);
        let r = horn_inclusion_check(&f, &f, 2, 0.5, 0.5, 0.1, 100, 1).unwrap();
        assert!(r.holds && r.checked > 0);
        let ft = germ(2, &["x1^2 + x1^3"]);
        let r = horn_inclusion_check(&f, &ft, 2, 0.3, 0.6, 0.1, 200, 2).unwrap();
        assert!(r.holds, "witness {:?}", r.witness);
        // smaller inner width on the same seed
        let r2 = horn_inclusion_check(&f, &ft, 2, 0.1, 0.6, 0.1, 200, 2).unwrap();
        assert!(r2.holds);
    }

    #[test]
    fn inclusion_failure_has_witness() {
        let f = germ(2, &["x1^2"]);
        let ft = germ(2, &["2*x1^2 + x2^2"]);
        let r = horn_inclusion_check(&f, &ft, 2, 0.5, 0.5, 0.1, 50, 1).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        let outer = HornSpec::new(2, 0.5, 0.1).unwrap();
        assert!(!horn_contains(&ft, &outer, &w).unwrap());
    }

    #[test]
    fn schedule_radii() {
        let s = ShellSchedule::default();
        let radii = s.radii();
        assert_eq!(radii.len(), 17);
        assert!((radii[16] - 1e-5).abs() < 1e-18);
        assert!(radii.windows(2).all(|w| w[1] < w[0]));
    }
}
