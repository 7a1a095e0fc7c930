use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tubenorm::asymptotics::{g_zero, solve_screened};
use tubenorm::curve::generators::{circle_at, perturbed_circle};
use tubenorm::mapped::{solve_closed, xeps_evaluate, MappedField};
use tubenorm::system::{
    default_dist_tol, detect_transverse_crossings, systems_equivalent, CurveSystem, DEFAULT_ANGLE_TOL,
};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 12, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn norm_scales_with_fourth_power(
        amp in 0.0..0.05f64,
        k in 1u32..5,
        phase in 0.0..6.28f64,
        lambda in 0.3..3.0f64,
    ) {
        let c = perturbed_circle(1.0, amp, k, phase, 512).unwrap();
        let eps = 0.08;
        let (_, a) = solve_closed(&c, eps, (128, 17)).unwrap();
        let (_, b) = solve_closed(&c.scaled(lambda).unwrap(), lambda * eps, (128, 17)).unwrap();
        prop_assert!((b.norm_sq / a.norm_sq / lambda.powi(4) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn solution_dominates_perturbations(
        amp in 0.0..0.05f64,
        k in 1u32..5,
        seed in any::<u64>(),
        size in 1e-4..1.0f64,
    ) {
        let c = perturbed_circle(1.0, amp, k, 0.0, 512).unwrap();
        let eps = 0.1;
        let (f, res) = solve_closed(&c, eps, (128, 17)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g: Vec<f64> = (0..f.grid.ns)
            .flat_map(|_| {
                let v: Vec<f64> = (0..f.grid.nt).map(|_| rng.gen_range(-1.0..1.0)).collect();
                v
            })
            .collect();
        let mut values = f.values.clone();
        for (j, (v, d)) in values.iter_mut().zip(&g).enumerate() {
            let t = f.grid.t(j % f.grid.nt);
            *v += size * eps * eps * d * (1.0 - t * t);
        }
        let x = xeps_evaluate(&c, eps, &MappedField { grid: f.grid, values }).unwrap();
        prop_assert!(x <= res.norm_sq + 1e-12);
    }

    #[test]
    fn screening_preserves_mean(seed in any::<u64>(), a in 0.0..0.05f64, n in 16usize..300) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let (u, residual) = solve_screened(&f, a).unwrap();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        prop_assert!((mean(&u) - mean(&f)).abs() < 1e-12);
        prop_assert!(residual < 1e-12);
    }

    #[test]
    fn crossing_reports_ignore_member_order(dx in 0.5..1.5f64, dy in -0.5..0.5f64) {
        let a = circle_at([0.0, 0.0], 1.0, 512, 0.0).unwrap();
        let b = circle_at([dx, dy], 1.0, 512, 0.3).unwrap();
        let ab = CurveSystem::new(vec![a.clone(), b.clone()]).unwrap();
        let ba = CurveSystem::new(vec![b, a]).unwrap();
        let tol = default_dist_tol(ab.curves());
        let r1 = detect_transverse_crossings(&ab, tol, DEFAULT_ANGLE_TOL);
        let r2 = detect_transverse_crossings(&ba, tol, DEFAULT_ANGLE_TOL);
        prop_assert_eq!(r1.len(), 2);
        prop_assert_eq!(r1.len(), r2.len());
        for (p, q) in r1.iter().zip(&r2) {
            prop_assert_eq!(p.classification, q.classification);
            prop_assert!((p.location[0] - q.location[0]).hypot(p.location[1] - q.location[1]) < 2.0 * tol);
            prop_assert!((p.angle - q.angle).abs() < 0.05);
        }
    }

    #[test]
    fn reparametrised_systems_are_equivalent(phase in 0.0..6.28f64, shift in 0.05..0.5f64) {
        let base = CurveSystem::single(circle_at([0.0, 0.0], 1.0, 512, 0.0).unwrap()).unwrap();
        let rotated = CurveSystem::single(circle_at([0.0, 0.0], 1.0, 700, phase).unwrap()).unwrap();
        let moved = CurveSystem::single(circle_at([shift, 0.0], 1.0, 512, 0.0).unwrap()).unwrap();
        prop_assert!(systems_equivalent(&base, &rotated, 1e-3));
        prop_assert!(!systems_equivalent(&base, &moved, 1e-3));
    }

    #[test]
    fn elastica_limit_is_scale_invariant(amp in 0.0..0.1f64, k in 1u32..6, lambda in 0.2..5.0f64) {
        let sys = CurveSystem::single(perturbed_circle(1.0, amp, k, 0.0, 1024).unwrap()).unwrap();
        let scaled = sys.scaled(lambda).unwrap();
        prop_assert!((g_zero(&sys) - g_zero(&scaled)).abs() < 1e-9 * g_zero(&sys));
        prop_assert!(g_zero(&sys) >= 8.0 * PI * PI / 45.0 - 1e-9);
    }
}
