// Property tests for the projector, the NST step, feedback and the RIP scans.

use nst::analysis::{rip_report, ConvergenceCertificate, RipMethod};
use nst::linalg::{dist2, norm2, sub};
use nst::probgen::gaussian_matrix;
use nst::solvers::{feedback_approximant, nst_step, nst_step_projected};
use nst::{hard_threshold, MeasurementOperator, SupportSet};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn operator(n: usize, big_n: usize, seed: u64) -> MeasurementOperator {
    MeasurementOperator::new(gaussian_matrix(n, big_n, seed)).unwrap()
}

fn dims() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..10, 1usize..10, any::<u64>()).prop_map(|(n, extra, seed)| (n, n + extra, seed))
}

fn vec_of(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projector_is_idempotent_and_maps_into_kernel((n, big_n, seed) in dims(), vs in any::<u64>()) {
        let op = operator(n, big_n, seed);
        let z = vec_of(big_n, vs);
        let pz = op.project_nullspace(&z).unwrap();
        let ppz = op.project_nullspace(&pz).unwrap();
        prop_assert!(dist2(&pz, &ppz) <= 1e-10 * (1.0 + norm2(&z)));
        prop_assert!(norm2(&op.apply(&pz).unwrap()) <= 1e-10 * (1.0 + norm2(&z)));
        // ℙ is an orthogonal projector: z − ℙz is orthogonal to ℙz.
        let r = sub(&z, &pz);
        prop_assert!(nst::linalg::dot(&r, &pz).abs() <= 1e-10 * (1.0 + norm2(&z)).powi(2));
    }

    #[test]
    fn nst_step_is_feasible_and_matches_projected_form(
        (n, big_n, seed) in dims(), vs in any::<u64>(), s_frac in 0.0f64..1.0,
    ) {
        let op = operator(n, big_n, seed);
        let x_true = vec_of(big_n, vs);
        let b = op.apply(&x_true).unwrap();
        let s = 1 + ((n - 1) as f64 * s_frac) as usize;
        let x = nst::solvers::initial_iterate(&op, &b).unwrap();
        let u = hard_threshold(&x, s).unwrap();
        let a = nst_step(&op, &b, &u).unwrap();
        let c = nst_step_projected(&op, &u, &x).unwrap();
        prop_assert!(dist2(&a, &c) <= 1e-9 * (1.0 + norm2(&a)));
        prop_assert!(dist2(&op.apply(&a).unwrap(), &b) <= 1e-9 * (1.0 + norm2(&b)));
    }

    #[test]
    fn nst_step_is_the_closest_feasible_point((n, big_n, seed) in dims(), vs in any::<u64>()) {
        let op = operator(n, big_n, seed);
        let x_true = vec_of(big_n, vs);
        let b = op.apply(&x_true).unwrap();
        let u = hard_threshold(&vec_of(big_n, vs ^ 1), 1).unwrap();
        let proj = nst_step(&op, &b, &u).unwrap();
        let d = dist2(&proj, &u);
        let mut rng = ChaCha8Rng::seed_from_u64(vs);
        for _ in 0..100 {
            let z: Vec<f64> = (0..big_n).map(|_| rng.random::<f64>() * 6.0 - 3.0).collect();
            let mut y = op.project_nullspace(&z).unwrap();
            nst::linalg::axpy(1.0, &x_true, &mut y);
            prop_assert!(d <= dist2(&y, &u) + 1e-9);
        }
    }

    #[test]
    fn feedback_satisfies_normal_equations((n, big_n, seed) in dims(), vs in any::<u64>(), k in 1usize..10) {
        let op = operator(n, big_n, seed);
        let x = vec_of(big_n, vs);
        let s = k.min(n);
        let t = nst::select_support(&x, s).unwrap();
        let u = feedback_approximant(&op, &x, &t).unwrap();
        // u lives on T and A_Tᵀ(A u − A x) = 0.
        for i in t.complement().indices() {
            prop_assert_eq!(u[*i], 0.0);
        }
        let r = sub(&op.apply(&u).unwrap(), &op.apply(&x).unwrap());
        let g = op.adjoint_on(&t, &r).unwrap();
        prop_assert!(norm2(&g) <= 1e-9 * (1.0 + norm2(&x)));
    }

    #[test]
    fn pinned_feedback_step_is_a_fixed_point((n, big_n, seed) in dims(), vs in any::<u64>(), k in 1usize..10) {
        let op = operator(n, big_n, seed);
        let x0 = vec_of(big_n, vs);
        let b = op.apply(&x0).unwrap();
        let t = SupportSet::new((0..k.min(n)).collect(), big_n).unwrap();
        let x1 = nst_step(&op, &b, &feedback_approximant(&op, &x0, &t).unwrap()).unwrap();
        let x2 = nst_step(&op, &b, &feedback_approximant(&op, &x1, &t).unwrap()).unwrap();
        prop_assert!(dist2(&x1, &x2) <= 1e-8 * (1.0 + norm2(&x1)));
    }

    #[test]
    fn sampled_constants_never_exceed_exhaustive(seed in any::<u64>(), s in 1usize..4, count in 1usize..40) {
        let op = operator(5, 9, seed);
        let exact = rip_report(&op, s, RipMethod::Exhaustive).unwrap();
        let sampled = rip_report(&op, s, RipMethod::RandomSample { count, seed }).unwrap();
        prop_assert!(sampled.delta_s <= exact.delta_s + 1e-12);
        prop_assert!(sampled.gamma_s <= exact.gamma_s + 1e-12);
    }

    #[test]
    fn rip_report_ranges_and_monotonicity(seed in any::<u64>()) {
        let op = operator(5, 9, seed);
        let mut prev = (0.0, 0.0);
        for s in 1..=4 {
            let r = rip_report(&op, s, RipMethod::Exhaustive).unwrap();
            prop_assert!(r.delta_s >= 0.0);
            prop_assert!(r.gamma_s >= 0.0 && r.gamma_s <= 1.0 + 1e-12);
            prop_assert!(r.delta_s >= prev.0 - 1e-12 && r.gamma_s >= prev.1 - 1e-12);
            prev = (r.delta_s, r.gamma_s);
        }
    }

    #[test]
    fn certificate_flags_match_rates(d1 in 0.0f64..1.5, d2 in 0.0f64..1.5, g in 0.0f64..1.0) {
        let c = ConvergenceCertificate::from_constants(1, d1, d2, g, true);
        prop_assert_eq!(c.ht_condition_met, c.rho_ht < 1.0);
        if c.fb_condition_met {
            prop_assert!(c.rho_fb < 1.0);
        }
    }
}
