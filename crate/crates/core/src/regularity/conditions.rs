use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg::{ls_slope, norm, normalized};
use crate::subspace::{gap, intersection_dim, kuo_distance, orthonormalize, Frame, Subspace};

use super::{
    control_function, searched_radius, tail_verdict, Condition, DeformationFamily, RegularityError,
    RegularityReport, SequenceSpec, Thresholds, Verdict, Witness, YSampling,
};

/// Tangent plane of `Y` at `(x, t)`: the orthogonal complement of
/// `span{grad F_j(x, t)}`.
pub fn tangent_plane_y(
    fam: &DeformationFamily,
    x: &[f64],
    t: f64,
    th: &Thresholds,
) -> Result<Subspace, RegularityError> {
    let rho = norm(x);
    let residual = norm(&fam.eval(x, t));
    let tol = th.feas_scale * rho.powi(fam.r() as i32);
    if residual > tol {
        return Err(RegularityError::OffStratum { residual, tol });
    }
    let frame = Frame::new(fam.grad(x, t), x.len() + 1)?;
    let kappa = kuo_distance(&frame);
    if kappa.is_nan() || kappa <= th.rank_tol * frame.max_norm() {
        return Err(RegularityError::SingularPoint { kappa });
    }
    Ok(orthonormalize(&frame, th.rank_tol)?.complement())
}

/// Measurements at one sequence point.
#[derive(Debug, Clone)]
struct Geometry {
    gap_a: f64,
    m_margin: f64,
    m_rank: usize,
    plane: Subspace,
    gap_c: f64,
    gap_cd: f64,
    inter_dim: usize,
}

fn e_t(m: usize) -> Vec<f64> {
    let mut v = vec![0.0; m];
    v[m - 1] = 1.0;
    v
}

fn geometry(
    fam: &DeformationFamily,
    x: &[f64],
    t: f64,
    th: &Thresholds,
) -> Result<Geometry, RegularityError> {
    let n = fam.nvars();
    let p = fam.ncomps();
    let m = n + 1;
    let ty = tangent_plane_y(fam, x, t, th)?;
    let w = ty.complement();
    let (_, grad_rho) = control_function(x, t);
    let ell = Subspace::span(vec![grad_rho.clone()], m)?;
    let et = Subspace::span(vec![e_t(m)], m)?;

    let gap_a = gap(&et, &ty)?.gap;

    let a = ty.project(&e_t(m));
    let b = ty.project(&normalized(&grad_rho));
    let sv = DMatrix::from_fn(m, 2, |i, j| if j == 0 { a[i] } else { b[i] }).singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    let m_margin = if smax > 0.0 { smin / smax } else { 0.0 };
    let m_rank = sv
        .iter()
        .filter(|&&s| s > th.m_tol * smax && s > 0.0)
        .count();

    let plane = w.sum(&ell).complement();
    let gap_c = if plane.dim() == 0 {
        1.0
    } else {
        gap(&et, &plane)?.gap
    };

    let gap_cd = gap(&ell, &w)?.gap;
    let inter_dim = intersection_dim(&ell.complement(), &ty, th.angle_tol)?;
    debug_assert!(ty.dim() == m - p);
    Ok(Geometry {
        gap_a,
        m_margin,
        m_rank,
        plane,
        gap_c,
        gap_cd,
        inter_dim,
    })
}

/// Verdicts of one sequence, for the implication check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceVerdicts {
    pub target: f64,
    pub branch: usize,
    pub a: Verdict,
    pub m: Verdict,
    pub c: Verdict,
    pub cd: Verdict,
    pub pre_regular: Verdict,
}

impl SequenceVerdicts {
    /// `(a) and (m) and (c_d)` hold but `(c)` does not.
    pub fn violates_implication(&self) -> bool {
        self.a.holds() && self.m.holds() && self.cd.holds() && !self.c.holds()
    }
}

/// The four sequence-based reports plus the per-sequence verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReports {
    pub a: RegularityReport,
    pub m: RegularityReport,
    pub c: RegularityReport,
    pub cd: RegularityReport,
    pub per_sequence: Vec<SequenceVerdicts>,
    pub implication_counterexamples: usize,
}

const SEQ_COLUMNS: [&str; 4] = ["radius", "target", "branch", "t"];

fn columns<'a>(extra: &[&'a str]) -> Vec<&'a str> {
    SEQ_COLUMNS
        .iter()
        .copied()
        .chain(extra.iter().copied())
        .collect()
}

fn seq_row(s: &SequenceSpec, i: usize, extra: &[f64]) -> Vec<f64> {
    let p = &s.points[i];
    let mut row = vec![p.radius, s.target, s.branch as f64, p.t];
    row.extend_from_slice(extra);
    row
}

fn witness(s: &SequenceSpec, i: usize, value: f64, reason: &str) -> Witness {
    let p = &s.points[i];
    Witness {
        radius: p.radius,
        point: p.x.clone(),
        t: Some(p.t),
        value,
        reason: reason.to_string(),
    }
}

/// Slope of `log gap` against `log rho` over the tail; `None` when the gaps
/// are zero to working precision or too few are positive.
fn gap_trend(entries: &[(f64, f64)], th: &Thresholds) -> Option<f64> {
    let cut = th.verdict_radius * (1.0 + 1e-9);
    let tail: Vec<(f64, f64)> = entries.iter().copied().filter(|e| e.0 <= cut).collect();
    if tail.iter().all(|e| e.1 <= 1e-12) {
        return None;
    }
    let pos: Vec<(f64, f64)> = tail
        .iter()
        .filter(|e| e.1 > 0.0)
        .map(|e| (e.0.ln(), e.1.ln()))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = pos.into_iter().unzip();
    ls_slope(&xs, &ys)
}

fn cauchy_defect(a: &Subspace, b: &Subspace) -> f64 {
    if a.dim() != b.dim() || a.dim() == 0 {
        return 1.0;
    }
    gap(a, b).map(|g| g.gap).unwrap_or(1.0)
}

fn trivial_reports(th: &Thresholds) -> ConditionReports {
    let mk = |cond: Condition, extra: &[&str]| {
        let mut r = RegularityReport::new(cond, &columns(extra));
        r.verdict = Verdict::Holds;
        r.thresholds = th.to_map();
        r.notes.push(
            "empty_Y: F^-1(0) = {0} x J near the axis; the two-stratum decomposition is trivially (c)-regular"
                .into(),
        );
        r
    };
    ConditionReports {
        a: mk(Condition::A, &["gap"]),
        m: mk(Condition::M, &["margin", "rank"]),
        c: mk(Condition::C, &["gap", "cauchy_defect", "plane_dim"]),
        cd: mk(Condition::Cd, &["gap_l_w", "intersection_dim"]),
        per_sequence: Vec::new(),
        implication_counterexamples: 0,
    }
}

impl ConditionReports {
    /// Runs all four tests on the sampled sequences.
    pub fn run(fam: &DeformationFamily, ys: &YSampling, th: &Thresholds) -> ConditionReports {
        if ys.empty_y {
            return trivial_reports(th);
        }
        let n = fam.nvars();
        let p = fam.ncomps();
        let plane_dim = n - p;
        let mut a = RegularityReport::new(Condition::A, &columns(&["gap"]));
        let mut m = RegularityReport::new(Condition::M, &columns(&["margin", "rank"]));
        let mut c = RegularityReport::new(
            Condition::C,
            &columns(&["gap", "cauchy_defect", "plane_dim"]),
        );
        let mut cd =
            RegularityReport::new(Condition::Cd, &columns(&["gap_l_w", "intersection_dim"]));
        let mut all_a = Vec::new();
        let mut all_m = Vec::new();
        let mut all_c = Vec::new();
        let mut all_cd = Vec::new();
        let mut per_sequence = Vec::new();
        let mut trend_verdicts = Vec::new();

        for s in &ys.sequences {
            let geoms: Vec<Result<Geometry, RegularityError>> = s
                .points
                .iter()
                .map(|pt| geometry(fam, &pt.x, pt.t, th))
                .collect();
            let mut ea = Vec::new();
            let mut em = Vec::new();
            let mut ec = Vec::new();
            let mut ecd = Vec::new();
            let mut eprereg = Vec::new();
            let mut gaps_a = Vec::new();
            for (i, g) in geoms.iter().enumerate() {
                let radius = s.points[i].radius;
                let g = match g {
                    Ok(g) => g,
                    Err(e) => {
                        let reason = format!("not a regular point of Y: {e}");
                        for rep in [&mut a, &mut m, &mut c, &mut cd] {
                            rep.witness(witness(s, i, 0.0, &reason));
                        }
                        for list in [&mut ea, &mut em, &mut ec, &mut ecd] {
                            list.push((radius, false));
                        }
                        continue;
                    }
                };
                a.rows.push(seq_row(s, i, &[g.gap_a]));
                let pa = g.gap_a < th.gap_pass;
                if !pa {
                    a.witness(witness(s, i, g.gap_a, "gap(e_t, T Y) >= gap_pass"));
                }
                ea.push((radius, pa));
                gaps_a.push((radius, g.gap_a));

                m.rows.push(seq_row(s, i, &[g.m_margin, g.m_rank as f64]));
                let pm = g.m_margin >= th.m_tol && g.m_rank == 2;
                if !pm {
                    m.witness(witness(
                        s,
                        i,
                        g.m_margin,
                        "(t, rho) restricted to T Y has rank < 2",
                    ));
                }
                em.push((radius, pm));

                let defect = geoms
                    .get(i + 1)
                    .and_then(|n| n.as_ref().ok())
                    .map(|next| cauchy_defect(&g.plane, &next.plane));
                c.rows.push(seq_row(
                    s,
                    i,
                    &[g.gap_c, defect.unwrap_or(0.0), g.plane.dim() as f64],
                ));
                let dim_ok = g.plane.dim() == plane_dim;
                if !dim_ok {
                    let reason = format!(
                        "ker d rho ∩ T Y has dimension {} instead of {plane_dim}",
                        g.plane.dim()
                    );
                    c.witness(witness(s, i, g.plane.dim() as f64, &reason));
                    m.notes
                        .push(format!("anomaly at radius {radius:e}: {reason}"));
                    cd.notes
                        .push(format!("anomaly at radius {radius:e}: {reason}"));
                }
                let pc = dim_ok && g.gap_c < th.gap_pass;
                if dim_ok && !pc {
                    c.witness(witness(
                        s,
                        i,
                        g.gap_c,
                        "gap(e_t, ker d rho ∩ T Y) >= gap_pass",
                    ));
                }
                ec.push((radius, pc));
                if let Some(d) = defect {
                    eprereg.push((radius, d < th.cauchy_tol));
                }

                cd.rows.push(seq_row(s, i, &[g.gap_cd, g.inter_dim as f64]));
                let pcd = g.gap_cd >= th.cd_floor && g.inter_dim == plane_dim;
                if !pcd {
                    cd.witness(witness(
                        s,
                        i,
                        g.gap_cd,
                        "gap(l, W) < cd_floor or non-transverse limit planes",
                    ));
                }
                ecd.push((radius, pcd));
            }

            let trend = gap_trend(&gaps_a, th);
            let trend_ok = trend.map_or(true, |sl| sl >= -th.slope_tol);
            let trend_v = if trend_ok {
                Verdict::Holds
            } else {
                Verdict::Fails
            };
            trend_verdicts.push(trend_v);
            if !trend_ok {
                a.notes.push(format!(
                    "target {} branch {}: log-gap slope {:.3} indicates growth as rho -> 0",
                    s.target,
                    s.branch,
                    trend.unwrap_or(0.0)
                ));
            }
            let va = Verdict::all([tail_verdict(&ea, th), trend_v]);
            let sv = SequenceVerdicts {
                target: s.target,
                branch: s.branch,
                a: va,
                m: tail_verdict(&em, th),
                c: tail_verdict(&ec, th),
                cd: tail_verdict(&ecd, th),
                pre_regular: tail_verdict(
                    &eprereg,
                    &Thresholds {
                        min_tail: th.min_tail.saturating_sub(1).max(1),
                        ..*th
                    },
                ),
            };
            per_sequence.push(sv);
            all_a.extend(ea);
            all_m.extend(em);
            all_c.extend(ec);
            all_cd.extend(ecd);
        }

        let finish = |rep: &mut RegularityReport, entries: &[(f64, bool)], v: Verdict| {
            rep.verdict = v;
            rep.searched_radius = searched_radius(entries);
            rep.thresholds = th.to_map();
        };
        finish(
            &mut a,
            &all_a,
            Verdict::all(per_sequence.iter().map(|s| s.a)),
        );
        finish(
            &mut m,
            &all_m,
            Verdict::all(per_sequence.iter().map(|s| s.m)),
        );
        finish(
            &mut c,
            &all_c,
            Verdict::all(per_sequence.iter().map(|s| s.c)),
        );
        finish(
            &mut cd,
            &all_cd,
            Verdict::all(per_sequence.iter().map(|s| s.cd)),
        );
        a.extra_verdicts
            .insert("trend".into(), Verdict::all(trend_verdicts));
        c.extra_verdicts.insert(
            "pre_regular".into(),
            Verdict::all(per_sequence.iter().map(|s| s.pre_regular)),
        );
        for rep in [&mut a, &mut m, &mut c, &mut cd] {
            rep.notes.dedup();
        }
        let truncated = ys.sequences.iter().filter(|s| s.truncated).count();
        if truncated > 0 {
            c.notes.push(format!(
                "{truncated} sequence(s) lost their branch before the last radius"
            ));
        }
        let implication_counterexamples = per_sequence
            .iter()
            .filter(|s| s.violates_implication())
            .count();
        ConditionReports {
            a,
            m,
            c,
            cd,
            per_sequence,
            implication_counterexamples,
        }
    }
}

/// Condition (m): `(t, rho)` restricted to `T Y` has rank 2 along the
/// sequences.
pub fn condition_m_check(
    fam: &DeformationFamily,
    ys: &YSampling,
    th: &Thresholds,
) -> RegularityReport {
    ConditionReports::run(fam, ys, th).m
}

/// (a)-regularity of `(Y, Z)`: `gap(e_t, T Y)` small and non-increasing.
pub fn a_regularity_test(
    fam: &DeformationFamily,
    ys: &YSampling,
    th: &Thresholds,
) -> RegularityReport {
    ConditionReports::run(fam, ys, th).a
}

/// (c)-regularity of `(Y, Z)` for `rho = |x|^2`: `gap(e_t, ker d rho ∩ T Y)`
/// small; reports the Cauchy defect of the plane sequence.
pub fn c_regularity_test(
    fam: &DeformationFamily,
    ys: &YSampling,
    th: &Thresholds,
) -> RegularityReport {
    ConditionReports::run(fam, ys, th).c
}

/// Condition (c_d): `gap(l, W)` bounded below and `ker d rho` transverse to
/// `T Y`.
pub fn cd_condition_test(
    fam: &DeformationFamily,
    ys: &YSampling,
    th: &Thresholds,
) -> RegularityReport {
    ConditionReports::run(fam, ys, th).cd
}

/// Three equivalent transversality tests for a hyperplane `mu` and a
/// subspace `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransversalityTests {
    /// `dim(mu ∩ sigma) = dim sigma - 1`
    pub intersection: bool,
    /// `sigma ⊄ mu`
    pub sigma_not_in_mu: bool,
    /// `mu^⊥ ⊄ sigma^⊥`
    pub normals_not_nested: bool,
}

impl TransversalityTests {
    pub fn agree(&self) -> bool {
        self.intersection == self.sigma_not_in_mu && self.sigma_not_in_mu == self.normals_not_nested
    }
}

pub fn transversality_tests(
    mu: &Subspace,
    sigma: &Subspace,
    angle_tol: f64,
) -> Result<TransversalityTests, RegularityError> {
    let m = mu.dim_ambient();
    if mu.dim() + 1 != m {
        return Err(RegularityError::Config("mu must be a hyperplane".into()));
    }
    if sigma.dim() == 0 || sigma.dim() >= m {
        return Err(RegularityError::Config(
            "sigma must be a proper non-zero subspace".into(),
        ));
    }
    let margin = 10.0 * angle_tol;
    Ok(TransversalityTests {
        intersection: intersection_dim(mu, sigma, angle_tol)? + 1 == sigma.dim(),
        sigma_not_in_mu: gap(sigma, mu)?.gap > margin,
        normals_not_nested: gap(&mu.complement(), &sigma.complement())?.gap > margin,
    })
}
