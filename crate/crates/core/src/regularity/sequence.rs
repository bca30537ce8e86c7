//! Point sequences on the zero-set stratum `Y = F^{-1}(0) \ {0} x J`
//! tending to axis points `(0, t0)`: one point per shell radius, obtained by
//! a minimum-norm Newton projection onto `{F = 0, |x| = rho}` with `t`
//! confined to the window `|t - t0| <= rho`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::horn::{derive_seed, random_direction, ShellSchedule};
use crate::linalg::{dot, norm, scaled, sub};

use super::{DeformationFamily, RegularityError, Thresholds};

const NEWTON_MAX_ITERS: usize = 80;
/// Newton is started from this many of the best sampled directions.
const NEWTON_STARTS: usize = 32;
/// At most this many branches are followed per target.
const MAX_BRANCHES: usize = 4;
/// Branches closer than this (in unit directions) are merged.
const BRANCH_SEPARATION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequencePoint {
    pub radius: f64,
    pub x: Vec<f64>,
    pub t: f64,
    /// `|F(x, t)|`
    pub residual: f64,
}

/// A ray-like sequence on `Y` toward `(0, target)`, radii decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub target: f64,
    pub branch: usize,
    pub points: Vec<SequencePoint>,
    /// Set when the continuation lost the branch before the last radius.
    pub truncated: bool,
}

/// All sequences for a set of targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YSampling {
    pub sequences: Vec<SequenceSpec>,
    /// No shell of any target produced a point of `Y`.
    pub empty_y: bool,
}

struct Projector<'a> {
    fam: &'a DeformationFamily,
    feas_scale: f64,
}

impl Projector<'_> {
    fn feas_tol(&self, rho: f64) -> f64 {
        self.feas_scale * rho.powi(self.fam.r() as i32)
    }

    /// Newton on `[F(x,t); (|x|^2 - rho^2) / (2 rho)] = 0` with minimum-norm
    /// steps. Returns a point with `|x| = rho`, `|F| <= feas_tol`,
    /// `|t - t0| <= rho`.
    fn project(&self, x0: &[f64], t_start: f64, t0: f64, rho: f64) -> Option<SequencePoint> {
        let n = x0.len();
        let p = self.fam.ncomps();
        let tol = self.feas_tol(rho);
        let mut x = x0.to_vec();
        let mut t = t_start;
        for _ in 0..NEWTON_MAX_ITERS {
            let fx = self.fam.eval(&x, t);
            let res = norm(&fx);
            let sphere = (dot(&x, &x) - rho * rho) / (2.0 * rho);
            if !res.is_finite() {
                return None;
            }
            if res <= tol && sphere.abs() <= 1e-13 * rho {
                break;
            }
            let grads = self.fam.grad(&x, t);
            let jac = DMatrix::from_fn(p + 1, n + 1, |i, j| {
                if i < p {
                    grads[i][j]
                } else if j < n {
                    x[j] / rho
                } else {
                    0.0
                }
            });
            let rhs = DVector::from_fn(p + 1, |i, _| if i < p { -fx[i] } else { -sphere });
            let svd = jac.svd(true, true);
            let smax = svd.singular_values.max();
            if smax == 0.0 {
                return None;
            }
            let step = svd.solve(&rhs, 1e-12 * smax).ok()?;
            for (xi, s) in x.iter_mut().zip(step.iter()) {
                *xi += s;
            }
            t += step[n];
        }
        let len = norm(&x);
        if len == 0.0 {
            return None;
        }
        let x = scaled(&x, rho / len);
        let residual = norm(&self.fam.eval(&x, t));
        if residual <= tol && (t - t0).abs() <= rho {
            Some(SequencePoint {
                radius: rho,
                x,
                t,
                residual,
            })
        } else {
            None
        }
    }

    /// Samples directions on `|x| = rho` at `t = t0` and projects the best
    /// ones; returns distinct solutions in sampling order.
    fn seed_points(&self, rho: f64, t0: f64, samples: usize, seed: u64) -> Vec<SequencePoint> {
        let n = self.fam.nvars();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cands: Vec<(f64, usize, Vec<f64>)> = (0..samples.max(1))
            .map(|i| {
                let x = scaled(&random_direction(&mut rng, n), rho);
                (norm(&self.fam.eval(&x, t0)), i, x)
            })
            .collect();
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut found: Vec<SequencePoint> = Vec::new();
        for (_, _, x) in cands.into_iter().take(NEWTON_STARTS) {
            if let Some(pt) = self.project(&x, t0, t0, rho) {
                let dir = scaled(&pt.x, 1.0 / rho);
                let distinct = found
                    .iter()
                    .all(|q| norm(&sub(&scaled(&q.x, 1.0 / rho), &dir)) > BRANCH_SEPARATION);
                if distinct {
                    found.push(pt);
                }
            }
        }
        found
    }
}

/// Builds sequences on `Y` toward `(0, t0)` for every target: branches are
/// seeded on the first shell that meets `Y` and continued by rescaling the
/// previous point; a lost branch is re-seeded from fresh samples nearest
/// to its last direction.
pub fn y_sequences(
    fam: &DeformationFamily,
    schedule: &ShellSchedule,
    samples: usize,
    seed: u64,
    targets: &[f64],
    th: &Thresholds,
) -> Result<YSampling, RegularityError> {
    let radii = schedule.radii();
    if radii.is_empty() {
        return Err(RegularityError::Config("empty shell schedule".into()));
    }
    let proj = Projector {
        fam,
        feas_scale: th.feas_scale,
    };
    let mut sequences = Vec::new();
    for (ti, &t0) in targets.iter().enumerate() {
        let target_seed = derive_seed(seed, 1000 + ti as u64);
        let mut start = None;
        for (k, &rho) in radii.iter().enumerate() {
            let pts = proj.seed_points(rho, t0, samples, derive_seed(target_seed, k as u64));
            if !pts.is_empty() {
                start = Some((k, pts));
                break;
            }
        }
        let Some((k0, seeds)) = start else {
            continue;
        };
        for (b, first) in seeds.into_iter().take(MAX_BRANCHES).enumerate() {
            let mut points = vec![first];
            let mut truncated = false;
            for (k, &rho) in radii.iter().enumerate().skip(k0 + 1) {
                let prev = points.last().expect("non-empty");
                let guess = scaled(&prev.x, rho / prev.radius);
                let next = proj.project(&guess, prev.t, t0, rho).or_else(|| {
                    let dir = scaled(&prev.x, 1.0 / prev.radius);
                    proj.seed_points(rho, t0, samples, derive_seed(target_seed, k as u64))
                        .into_iter()
                        .min_by(|a, c| {
                            let da = norm(&sub(&scaled(&a.x, 1.0 / rho), &dir));
                            let dc = norm(&sub(&scaled(&c.x, 1.0 / rho), &dir));
                            da.total_cmp(&dc)
                        })
                });
                match next {
                    Some(pt) => points.push(pt),
                    None => {
                        truncated = true;
                        break;
                    }
                }
            }
            sequences.push(SequenceSpec {
                target: t0,
                branch: b,
                points,
                truncated,
            });
        }
    }
    let empty_y = sequences.is_empty();
    Ok(YSampling { sequences, empty_y })
}
