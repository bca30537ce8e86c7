//! Acceptance suite: one PASS/FAIL line per criterion.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stratcheck_cli::commands::cmd_regularity;
use stratcheck_cli::config::RunConfig;
use stratcheck_core::horn::{HornSpec, ShellSchedule};
use stratcheck_core::poly::{MapGerm, Polynomial};
use stratcheck_core::regularity::{
    build_family, claim_ii_and_iii_verify, full_pipeline, key_estimation_verify, kuo_check,
    lemma_cd_verify, t_grid, transversality_tests, ClaimConfig, DeformationFamily, PipelineConfig,
    RegularityReport, ScanConfig, Thresholds, Verdict,
};
use stratcheck_core::subspace::{
    elimination_basis, kuo_distance, kuo_projection, Frame, Subspace, DEFAULT_ANGLE_TOL,
};
use stratcheck_core::suite;

type Check = Result<String, String>;
/// Number, name, runtime limit, check.
type Criterion = (u32, &'static str, Option<Duration>, fn() -> Check);

fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn to_matrix(vs: &[Vec<f64>], rows: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, vs.len(), |i, j| vs[j][i])
}

/// Distance from `v` to the column span of `a` via the normal equations.
fn normal_equations_distance(v: &[f64], a: &DMatrix<f64>) -> f64 {
    let b = DVector::from_column_slice(v);
    if a.ncols() == 0 {
        return b.norm();
    }
    let ata = a.transpose() * a;
    let c = ata
        .cholesky()
        .expect("full rank")
        .solve(&(a.transpose() * &b));
    (b - a * c).norm()
}

fn kappa_oracle(vs: &[Vec<f64>], n: usize) -> f64 {
    (0..vs.len())
        .map(|i| {
            let others: Vec<Vec<f64>> = vs
                .iter()
                .enumerate()
                .filter(|e| e.0 != i)
                .map(|e| e.1.clone())
                .collect();
            normal_equations_distance(&vs[i], &to_matrix(&others, n))
        })
        .fold(f64::INFINITY, f64::min)
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut worst, mut worst_p1) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let n = rng.random_range(1..=8usize);
        let p = rng.random_range(1..=3usize.min(n));
        let vs: Vec<Vec<f64>> = (0..p).map(|_| gaussian_vec(&mut rng, n)).collect();
        let k = kuo_distance(&Frame::new(vs.clone(), n).unwrap());
        if p == 1 {
            let nrm = DVector::from_column_slice(&vs[0]).norm();
            worst_p1 = worst_p1.max((k - nrm).abs() / nrm);
        } else {
            let o = kappa_oracle(&vs, n);
            worst = worst.max((k - o).abs() / o);
        }
    }
    let detail = format!("max rel err {worst:.2e} (p>1), {worst_p1:.2e} (p=1)");
    if worst <= 1e-9 && worst_p1 <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn qr_projection(x: &[f64], vs: &[Vec<f64>]) -> Vec<f64> {
    let a = to_matrix(vs, x.len());
    let q = a.qr().q();
    let b = DVector::from_column_slice(x);
    (&q * (q.transpose() * b)).as_slice().to_vec()
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    let mut counts = [0usize; 4];
    for i in 0..500 {
        let form = i % 4;
        let n = rng.random_range(2..=6usize);
        let p = rng.random_range(1..=3usize.min(n));
        let x = gaussian_vec(&mut rng, n);
        // v and v_t: gradient frames in R^n; u: the same frame with a zero
        // t-slot; omega: a full frame in R^{n+1}. x is padded for the last two.
        let (vs, xx, m) = match form {
            0 | 1 => (
                (0..p)
                    .map(|_| gaussian_vec(&mut rng, n))
                    .collect::<Vec<_>>(),
                x,
                n,
            ),
            2 => {
                let vs = (0..p)
                    .map(|_| {
                        let mut v = gaussian_vec(&mut rng, n);
                        v.push(0.0);
                        v
                    })
                    .collect();
                let mut x0 = x;
                x0.push(0.0);
                (vs, x0, n + 1)
            }
            _ => {
                let vs = (0..p).map(|_| gaussian_vec(&mut rng, n + 1)).collect();
                let mut x0 = x;
                x0.push(0.0);
                (vs, x0, n + 1)
            }
        };
        let fr = Frame::new(vs.clone(), m).unwrap();
        let nb = elimination_basis(&fr).map_err(|e| e.to_string())?;
        let formula = kuo_projection(&xx, &fr, &nb).unwrap();
        let oracle = qr_projection(&xx, &vs);
        let err = formula
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
            / DVector::from_column_slice(&xx).norm();
        worst = worst.max(err);
        counts[form] += 1;
    }
    let detail = format!("max rel err {worst:.2e} over v/v_t/u/omega counts {counts:?}");
    if worst <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_polynomial(rng: &mut ChaCha8Rng, n: usize) -> Polynomial {
    let count = rng.random_range(1..=10usize);
    let terms: Vec<(Vec<u32>, f64)> = (0..count)
        .map(|_| {
            let deg = rng.random_range(0..=6u32);
            let mut exps = vec![0u32; n];
            for _ in 0..deg {
                exps[rng.random_range(0..n)] += 1;
            }
            (exps, rng.random_range(-2.0..2.0))
        })
        .collect();
    Polynomial::from_terms(n, terms).unwrap()
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    let mut checked = 0;
    while checked < 100 {
        let n = rng.random_range(1..=4usize);
        let poly = random_polynomial(&mut rng, n);
        if poly.degree() == 0 {
            continue;
        }
        checked += 1;
        let grad = poly.gradient();
        let x = gaussian_vec(&mut rng, n);
        let g: Vec<f64> = grad.iter().map(|d| d.eval(&x).unwrap()).collect();
        let h = 1e-5;
        let fd: Vec<f64> = (0..n)
            .map(|i| {
                let mut a = x.clone();
                let mut b = x.clone();
                a[i] += h;
                b[i] -= h;
                (poly.eval(&a).unwrap() - poly.eval(&b).unwrap()) / (2.0 * h)
            })
            .collect();
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let en = g
            .iter()
            .zip(&fd)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        if gn > 0.0 {
            worst = worst.max(en / gn);
        } else if en > 1e-9 {
            return Err(format!("zero gradient but finite differences {en:e}"));
        }
    }
    let detail = format!("max rel err {worst:.2e} over 100 polynomials");
    if worst <= 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn kuo_scan_config() -> ScanConfig {
    ScanConfig {
        schedule: ShellSchedule {
            rho0: 0.1,
            gamma: 10f64.powf(-0.25),
            count: 13,
        },
        samples: 2000,
        seed: 404,
        restarts: 4,
    }
}

fn criterion_4() -> Check {
    let th = Thresholds::default();
    let scan = kuo_scan_config();
    let sos = MapGerm::parse(2, &["x1^2 + x2^2"]).unwrap();
    let a = kuo_check(&sos, 2, &HornSpec::new(2, 2.0, 0.5).unwrap(), &scan, &th)
        .map_err(|e| e.to_string())?;
    let c = a.c_est.unwrap_or(f64::NAN);
    let line = MapGerm::parse(2, &["x1^2"]).unwrap();
    let b = kuo_check(&line, 2, &HornSpec::new(2, 1.0, 0.5).unwrap(), &scan, &th)
        .map_err(|e| e.to_string())?;
    let decay = b.decay_exponent().unwrap_or(f64::NAN);
    let vanishing = b.shells.iter().filter(|s| s.vanishing).count();
    let detail = format!(
        "x1^2+x2^2: C_est {c:.4}, slope {:.4}, {}; x1^2: {}, decay exponent {decay} \
         ({vanishing} shell minima vanish, raw slope {:?})",
        a.slope.unwrap_or(f64::NAN),
        a.verdict,
        b.verdict,
        b.raw_slope
    );
    if (1.8..=2.05).contains(&c)
        && a.verdict == Verdict::Holds
        && b.verdict == Verdict::Fails
        && decay >= 1.5
    {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn claim_family() -> DeformationFamily {
    build_family(
        &MapGerm::parse(2, &["x1^2 - x2^2"]).unwrap(),
        &MapGerm::parse(2, &["x1^2 - x2^2 + x1^3"]).unwrap(),
        2,
    )
    .unwrap()
}

fn claim_config() -> ClaimConfig {
    ClaimConfig {
        width: 0.5,
        radius_cap: 0.5,
        scan: ScanConfig {
            schedule: ShellSchedule::default(),
            samples: 2000,
            seed: 505,
            restarts: 4,
        },
        t_grid: t_grid(11, (-0.1, 1.1)),
    }
}

/// Smallest value of `col` over rows with radius at most `cut`.
fn tail_min(rep: &RegularityReport, col: &str, cut: f64) -> Result<(f64, usize), String> {
    let radii = rep.column("radius").ok_or("missing radius column")?;
    let vals = rep.column(col).ok_or(format!("missing column {col}"))?;
    let tail: Vec<f64> = radii
        .iter()
        .zip(&vals)
        .filter(|(r, _)| **r <= cut * (1.0 + 1e-9))
        .map(|(_, v)| *v)
        .collect();
    if tail.is_empty() {
        return Err(format!("no rows at radius <= {cut:e}"));
    }
    Ok((
        tail.iter().copied().fold(f64::INFINITY, f64::min),
        tail.len(),
    ))
}

fn kuo_precheck(fam: &DeformationFamily) -> Result<(), String> {
    let rep = kuo_check(
        fam.f(),
        2,
        &HornSpec::new(2, 2.0, 0.5).unwrap(),
        &kuo_scan_config(),
        &Thresholds::default(),
    )
    .map_err(|e| e.to_string())?;
    if rep.verdict == Verdict::Holds {
        Ok(())
    } else {
        Err(format!("family is not Kuo-passing: {}", rep.verdict))
    }
}

fn criterion_5() -> Check {
    let fam = claim_family();
    kuo_precheck(&fam)?;
    let rep = claim_ii_and_iii_verify(&fam, &claim_config(), &Thresholds::default())
        .map_err(|e| e.to_string())?;
    let (min, rows) = tail_min(&rep, "min_dist_t_ratio", 1e-3)?;
    let detail = format!("min d(x, V_t,x)/|x| = {min:.4} over {rows} (shell, t) cells");
    if min >= 0.5 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_6() -> Check {
    let fam = claim_family();
    kuo_precheck(&fam)?;
    let th = Thresholds::default();
    let lemma = lemma_cd_verify(&fam, &claim_config(), &th).map_err(|e| e.to_string())?;
    let key = key_estimation_verify(&fam, &claim_config(), &th).map_err(|e| e.to_string())?;
    let (dw, _) = tail_min(&lemma, "min_dist_w_ratio", 1e-3)?;
    let (g, rows) = tail_min(&key, "min_gap_l_w", 1e-3)?;
    let detail = format!("min d((x,0), W)/|x| = {dw:.4}, min gap(l, W) = {g:.4} over {rows} cells");
    if dw >= 0.25 && g >= 0.25 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_7() -> Check {
    let cfg = PipelineConfig {
        scan: ScanConfig {
            samples: 500,
            seed: 707,
            ..ScanConfig::default()
        },
        ..PipelineConfig::default()
    };
    let mut counterexamples = 0;
    let mut problems = Vec::new();
    let mut verdicts = Vec::new();
    let fams = suite::bundled();
    for s in &fams {
        let fam = s.family().map_err(|e| e.to_string())?;
        let b = full_pipeline(&fam, &cfg).map_err(|e| format!("{}: {e}", s.name))?;
        counterexamples += b.conditions.implication_counterexamples;
        verdicts.push(format!("{}={}", s.name, b.verdict));
        let c = &b.conditions;
        let premises = c.a.verdict.holds() && c.m.verdict.holds() && c.cd.verdict.holds();
        if premises && !c.c.verdict.holds() {
            counterexamples += 1;
        }
        if premises
            && c.c.searched_radius
                < [
                    c.a.searched_radius,
                    c.m.searched_radius,
                    c.cd.searched_radius,
                ]
                .into_iter()
                .flatten()
                .reduce(f64::min)
        {
            counterexamples += 1;
        }
        if b.kuo.verdict != s.expected_kuo {
            problems.push(format!(
                "{}: kuo {} (expected {})",
                s.name, b.kuo.verdict, s.expected_kuo
            ));
        }
        if b.sequences.empty_y != s.empty_y {
            problems.push(format!("{}: empty_Y = {}", s.name, b.sequences.empty_y));
        }
    }
    let detail = format!(
        "{} families, {counterexamples} counterexamples ({}){}",
        fams.len(),
        verdicts.join(" "),
        if problems.is_empty() {
            String::new()
        } else {
            format!("; {}", problems.join("; "))
        }
    );
    if counterexamples == 0 && problems.is_empty() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut transversal = 0;
    for i in 0..500 {
        let n = rng.random_range(2..=6usize);
        let m = n + 1;
        // mu: kernel of a linear form vanishing on e_t (the control function
        // kind) or a generic hyperplane
        let mut normal = gaussian_vec(&mut rng, m);
        if i % 2 == 0 {
            normal[n] = 0.0;
        }
        let nn = DVector::from_column_slice(&normal).norm();
        let normal: Vec<f64> = normal.iter().map(|v| v / nn).collect();
        let mu = Subspace::span(vec![normal.clone()], m)
            .unwrap()
            .complement();
        let k = rng.random_range(1..m);
        let class = (i / 2) % 3;
        let sigma_vecs: Vec<Vec<f64>> = (0..k)
            .map(|j| {
                let v = gaussian_vec(&mut rng, m);
                match class {
                    0 => v,
                    1 => mu.project(&v),
                    _ if j == 0 => normal.clone(),
                    _ => v,
                }
            })
            .collect();
        let sigma = Subspace::span(sigma_vecs, m).unwrap();
        if sigma.dim() == 0 || sigma.dim() >= m {
            return Err(format!("degenerate construction at case {i}"));
        }
        let t = transversality_tests(&mu, &sigma, DEFAULT_ANGLE_TOL).map_err(|e| e.to_string())?;
        if !(t.intersection == t.sigma_not_in_mu && t.sigma_not_in_mu == t.normals_not_nested) {
            return Err(format!("tests disagree at case {i}: {t:?}"));
        }
        if (class == 1) == t.intersection {
            return Err(format!(
                "case {i} (class {class}) classified as {}",
                t.intersection
            ));
        }
        transversal += usize::from(t.intersection);
    }
    Ok(format!("500 pairs agree ({transversal} transversal)"))
}

fn criterion_9() -> Check {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let cfg = RunConfig {
        f: Some(data.join("saddle.json")),
        g: Some(data.join("saddle_cubic.json")),
        samples: 300,
        seed: 909,
        ..RunConfig::default()
    };
    let a = cmd_regularity(&cfg).map_err(|e| e.to_string())?;
    let b = cmd_regularity(&cfg).map_err(|e| e.to_string())?;
    let pa = a.report.payload_bytes();
    if pa != b.report.payload_bytes() {
        return Err("payloads differ".into());
    }
    if a.code != b.code {
        return Err("exit codes differ".into());
    }
    Ok(format!(
        "{} payload bytes identical, exit code {}",
        pa.len(),
        a.code
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            1,
            "kappa oracle equivalence",
            Some(Duration::from_secs(10)),
            criterion_1,
        ),
        (
            2,
            "projection formula equivalence",
            Some(Duration::from_secs(10)),
            criterion_2,
        ),
        (
            3,
            "gradient correctness",
            Some(Duration::from_secs(10)),
            criterion_3,
        ),
        (
            4,
            "Kuo verdicts",
            Some(Duration::from_secs(120)),
            criterion_4,
        ),
        (
            5,
            "distance constant 1/2",
            Some(Duration::from_secs(120)),
            criterion_5,
        ),
        (
            6,
            "distance and gap constant 1/4",
            Some(Duration::from_secs(120)),
            criterion_6,
        ),
        (
            7,
            "(a), (m), (c_d) imply (c) on the suite",
            None,
            criterion_7,
        ),
        (
            8,
            "transversality test equivalence",
            Some(Duration::from_secs(10)),
            criterion_8,
        ),
        (9, "determinism", None, criterion_9),
    ];
    let filter: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let over = limit.is_some_and(|l| took > l);
        let (status, detail) = match (&result, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; exceeded {:?}", limit.unwrap())),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "{status} criterion {id}: {name}: {detail} [{:.2}s]",
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        eprintln!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
