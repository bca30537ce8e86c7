use nalgebra::DMatrix;
use proptest::prelude::*;
use stratcheck_core::horn::{Horn, HornSpec};
use stratcheck_core::poly::{jet, MapGerm, Polynomial};
use stratcheck_core::regularity::{build_family, kuo_check, ScanConfig, Thresholds, Verdict};
use stratcheck_core::subspace::{
    elimination_basis, gap, intersection_dim, kuo_distance, kuo_projection, orthonormalize,
    principal_angles, Frame, Subspace, DEFAULT_ANGLE_TOL, DEFAULT_RANK_TOL,
};
use stratcheck_core::ShellSchedule;

fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

fn frame(n: usize, p: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(vector(n), p)
}

/// Dimension, frame size and a frame in `R^n` with `p <= n`.
fn sized_frame() -> impl Strategy<Value = (usize, Vec<Vec<f64>>)> {
    (1usize..=6)
        .prop_flat_map(|n| (Just(n), 1usize..=n.min(3)))
        .prop_flat_map(|(n, p)| (Just(n), frame(n, p)))
}

fn integer_poly(n: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0u32..4, n), -50i32..50), 1..8).prop_map(
        move |terms| {
            Polynomial::from_terms(n, terms.into_iter().map(|(e, c)| (e, f64::from(c)))).unwrap()
        },
    )
}

fn rank(vs: &[Vec<f64>], m: usize) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let a = DMatrix::from_fn(m, vs.len(), |i, j| vs[j][i]);
    let sv = a.singular_values();
    let top = sv.max();
    sv.iter().filter(|&&s| s > 1e-9 * top).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gradient_is_linear(
        (p, q) in (1usize..4).prop_flat_map(|n| (integer_poly(n), integer_poly(n))),
        a in -5i32..5,
        b in -5i32..5,
    ) {
        let (a, b) = (f64::from(a), f64::from(b));
        let combined = (&p.scale(a) + &q.scale(b)).gradient();
        let separate: Vec<Polynomial> = p
            .gradient()
            .iter()
            .zip(q.gradient())
            .map(|(gp, gq)| &gp.scale(a) + &gq.scale(b))
            .collect();
        prop_assert_eq!(combined, separate);
    }

    #[test]
    fn jet_is_a_projection(p in (1usize..4).prop_flat_map(integer_poly), r in 1u32..6) {
        let n = p.nvars();
        // drop the constant term so the components form a germ
        let p = p.filter_degree(|d| d > 0);
        prop_assume!(!p.is_zero());
        let f = MapGerm::new(vec![p]).unwrap();
        let once = jet(&f, r);
        prop_assert_eq!(jet(&once, r), once.clone());
        prop_assert_eq!(once.nvars(), n);
    }

    #[test]
    fn kuo_distance_permutation_invariant((n, vs) in sized_frame(), k in 0usize..6) {
        let mut rotated = vs.clone();
        let len = rotated.len();
        rotated.rotate_left(k % len);
        let a = kuo_distance(&Frame::new(vs, n).unwrap());
        let b = kuo_distance(&Frame::new(rotated.clone(), n).unwrap());
        prop_assert_eq!(a, b);
        rotated.reverse();
        prop_assert_eq!(a, kuo_distance(&Frame::new(rotated, n).unwrap()));
    }

    #[test]
    fn kuo_distance_scales_linearly((n, vs) in sized_frame(), c in -10.0f64..10.0) {
        prop_assume!(c.abs() > 1e-3);
        let base = kuo_distance(&Frame::new(vs.clone(), n).unwrap());
        let scaled: Vec<Vec<f64>> = vs.iter().map(|v| v.iter().map(|x| c * x).collect()).collect();
        let k = kuo_distance(&Frame::new(scaled, n).unwrap());
        prop_assert!((k - c.abs() * base).abs() <= 1e-12 * (c.abs() * base).max(1e-300));
    }

    #[test]
    fn projection_formula_matches_orthonormal_projection(
        (n, vs) in sized_frame(),
        seed in vector(6),
    ) {
        let fr = Frame::new(vs, n).unwrap();
        prop_assume!(kuo_distance(&fr) >= 1e-6 * fr.max_norm());
        let x = &seed[..n];
        let nb = elimination_basis(&fr).unwrap();
        let v = kuo_projection(x, &fr, &nb).unwrap();
        let w = orthonormalize(&fr, DEFAULT_RANK_TOL).unwrap().project(x);
        let err = v.iter().zip(&w).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-9 * x.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-12));
    }

    #[test]
    fn gap_vanishes_on_subspaces_and_is_monotone(
        (m, base, extra) in (2usize..7).prop_flat_map(|m| (Just(m), frame(m, 2), frame(m, 2))),
        pick in 0usize..2,
    ) {
        let w = Subspace::span(base.clone(), m).unwrap();
        prop_assume!(w.dim() == 2);
        let inside = Subspace::span(vec![base[pick].clone()], m).unwrap();
        prop_assert!(gap(&inside, &w).unwrap().gap <= 1e-12);
        let l = Subspace::span(vec![extra[0].clone()], m).unwrap();
        let bigger = Subspace::span(base.iter().chain(&extra[1..]).cloned().collect(), m).unwrap();
        prop_assert!(gap(&l, &bigger).unwrap().gap <= gap(&l, &w).unwrap().gap + 1e-12);
    }

    #[test]
    fn intersection_dim_matches_rank_oracle(
        (m, k, common, pa, pb) in (3usize..7)
            .prop_flat_map(|m| (Just(m), 0usize..=2))
            .prop_flat_map(|(m, k)| (Just(m), Just(k), frame(m, k), frame(m, 1), frame(m, 2))),
    ) {
        let a_vecs: Vec<Vec<f64>> = common.iter().chain(&pa).cloned().collect();
        let b_vecs: Vec<Vec<f64>> = common.iter().chain(&pb).cloned().collect();
        let a = Subspace::span(a_vecs.clone(), m).unwrap();
        let b = Subspace::span(b_vecs.clone(), m).unwrap();
        prop_assume!(a.dim() == a_vecs.len() && b.dim() == b_vecs.len());
        let angles = principal_angles(&a, &b).unwrap();
        prop_assume!(angles
            .iter()
            .all(|&t| t <= DEFAULT_ANGLE_TOL / 10.0 || t >= 10.0 * DEFAULT_ANGLE_TOL));
        let stacked: Vec<Vec<f64>> = a.basis().iter().chain(b.basis()).cloned().collect();
        let oracle = a.dim() + b.dim() - rank(&stacked, m);
        prop_assert_eq!(intersection_dim(&a, &b, DEFAULT_ANGLE_TOL).unwrap(), oracle);
        prop_assert!(oracle >= k);
    }

    #[test]
    fn homogeneous_membership_depends_on_direction_only(
        dir in vector(3),
        s in 0.01f64..1.0,
        w in 0.05f64..2.0,
    ) {
        let nrm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
        prop_assume!(nrm > 1e-3);
        let f = MapGerm::parse(3, &["x1^2 + x2^2 - x3^2 - 2*x1*x3"]).unwrap();
        let horn = Horn::new(&f, HornSpec::new(2, w, 1.0).unwrap()).unwrap();
        let x: Vec<f64> = dir.iter().map(|c| c / nrm).collect();
        let y: Vec<f64> = x.iter().map(|c| c * s).collect();
        // the ratio is scale-free up to rounding; skip boundary directions
        prop_assume!((horn.ratio(&x) - w).abs() > 1e-9);
        prop_assert_eq!(horn.contains(&x), horn.contains(&y));
    }

    #[test]
    fn sampled_points_are_horn_members_and_reproducible(seed in 0u64..1000, w in 0.05f64..1.0) {
        let f = MapGerm::parse(2, &["x1^2 - x2^2 + x1^3"]).unwrap();
        let horn = Horn::new(&f, HornSpec::new(2, w, 0.5).unwrap()).unwrap();
        let a = horn.sample_shell(0.01, 60, seed).unwrap();
        let b = horn.sample_shell(0.01, 60, seed).unwrap();
        prop_assert_eq!(&a, &b);
        for x in &a.points {
            prop_assert!(horn.contains(x));
        }
    }

    #[test]
    fn shell_min_bounded_by_sample_minimum(seed in 0u64..1000) {
        let f = MapGerm::parse(2, &["x1^2 - x2^2"]).unwrap();
        let horn = Horn::new(&f, HornSpec::new(2, 0.5, 0.5).unwrap()).unwrap();
        let shell = horn.sample_shell(0.05, 40, seed).unwrap();
        prop_assume!(!shell.is_empty());
        let func = |x: &[f64]| (x[0] - 0.3 * x[1]).abs();
        let plain = shell.points.iter().map(|x| func(x)).fold(f64::INFINITY, f64::min);
        let m = horn.shell_min(&func, &shell, 2).unwrap();
        prop_assert!(m.value <= plain);
        prop_assert!(horn.contains(&m.argmin));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// The verdict can be recomputed from the stored constant and slope.
    #[test]
    fn kuo_verdict_is_recomputable(c in 0.5f64..3.0, b in -2.0f64..2.0, seed in 0u64..100) {
        let text = format!("{c}*x1^2 + {b}*x1*x2 - x2^2");
        let f = MapGerm::parse(2, &[text.as_str()]).unwrap();
        let scan = ScanConfig {
            schedule: ShellSchedule { rho0: 0.1, gamma: 0.5, count: 6 },
            samples: 100,
            seed,
            restarts: 1,
        };
        let th = Thresholds::default();
        let rep = kuo_check(&f, 2, &HornSpec::new(2, 2.0, 0.5).unwrap(), &scan, &th).unwrap();
        let holds = rep.c_est.unwrap() >= th.c_floor
            && !rep.slope_unbounded
            && rep.slope.is_some_and(|s| s <= rep.exponent + th.slope_tol);
        prop_assert_eq!(rep.verdict == Verdict::Holds, holds);
    }

    #[test]
    fn single_component_kappa_is_gradient_norm(x in vector(3)) {
        let nrm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        prop_assume!(nrm > 1e-3);
        let f = MapGerm::parse(3, &["x1^2 - x2*x3 + x1^3"]).unwrap();
        let g = f.gradients();
        let grad: Vec<f64> = g[0].iter().map(|d| d.eval(&x).unwrap()).collect();
        let gn = grad.iter().map(|c| c * c).sum::<f64>().sqrt();
        prop_assume!(gn > 0.0);
        let k = kuo_distance(&Frame::new(vec![grad], 3).unwrap());
        prop_assert!((k - gn).abs() <= 1e-12 * gn);
    }

    /// With `g = f` nothing depends on `t`.
    #[test]
    fn degenerate_family_is_t_independent(x in vector(2), t in -0.1f64..1.1) {
        let f = MapGerm::parse(2, &["x1^2 - x2^2 + x1^2*x2"]).unwrap();
        let fam = build_family(&f, &f, 2).unwrap();
        let pg = fam.point_gradients(&x);
        prop_assert_eq!(pg.grad_ft(t), pg.grad_ft(0.0));
        prop_assert_eq!(fam.eval(&x, t), fam.eval(&x, 0.0));
        prop_assert!(pg.dt.iter().all(|&d| d == 0.0));
    }
}
