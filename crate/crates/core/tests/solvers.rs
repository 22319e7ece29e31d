use nst::linalg::{dist2, norm2};
use nst::probgen::{generate, Ensemble, GeneratedProblem, ProblemSpec};
use nst::solvers::{solve_adaptive, solve_nst_ht, solve_nst_ht_fb, solve_omp};
use nst::{AdaptiveConfig, Algorithm, LambdaMode, NstVariant, SolverConfig, Termination};

fn problem(n: usize, big_n: usize, s: usize, seed: u64) -> GeneratedProblem {
    generate(&ProblemSpec::new(n, big_n, s, Ensemble::Gaussian).with_seed(seed)).unwrap()
}

fn rel(p: &GeneratedProblem, u: &[f64]) -> f64 {
    dist2(u, &p.x_true) / norm2(&p.x_true)
}

#[test]
fn every_solver_recovers_an_easy_instance() {
    let p = problem(64, 128, 5, 1);
    let cfg = SolverConfig::new(5);
    for alg in Algorithm::ALL {
        if alg == Algorithm::Iht {
            continue;
        }
        let res = alg.solve(&p.op, &p.b, &cfg, None).unwrap();
        assert!(rel(&p, &res.u) < 1e-4, "{alg}: {}", rel(&p, &res.u));
        assert!(nst::sparsity::l0(&res.u) <= 5);
    }
}

#[test]
fn fb_needs_no_more_iterations_than_ht() {
    let mut fewer = 0;
    for seed in 0..100 {
        let p = problem(128, 256, 30, 500 + seed);
        let cfg = SolverConfig::new(30);
        let fb = solve_nst_ht_fb(&p.op, &p.b, &cfg, None).unwrap();
        let ht = solve_nst_ht(&p.op, &p.b, &cfg, None).unwrap();
        if fb.iterations <= ht.iterations {
            fewer += 1;
        }
    }
    assert!(fewer >= 90, "{fewer}");
}

#[test]
fn iterations_and_trace_respect_the_cap() {
    let p = problem(32, 64, 14, 9);
    for alg in Algorithm::ALL {
        let cfg = SolverConfig::new(14).with_max_iters(7).with_trace(true);
        let res = alg.solve(&p.op, &p.b, &cfg, None).unwrap();
        if alg != Algorithm::Omp {
            assert!(res.iterations <= 7, "{alg}");
        }
        if let Some(t) = res.trace {
            assert!(t.len() <= cfg.max_iters + 1);
            assert_eq!(t.len(), res.iterations);
        }
    }
}

#[test]
fn nst_iterates_stay_feasible() {
    let p = problem(40, 100, 12, 4);
    for alg in [Algorithm::NstHt, Algorithm::NstHtFb, Algorithm::NstHtSubfb, Algorithm::NstStretchedHt] {
        let cfg = SolverConfig::new(12).with_feasibility_check(true);
        let res = alg.solve(&p.op, &p.b, &cfg, None).unwrap();
        assert!(res.max_feasibility_residual.unwrap() <= 1e-9, "{alg}");
        let ax = p.op.apply(&res.x).unwrap();
        assert!(dist2(&ax, &p.b) / norm2(&p.b) <= 1e-9);
    }
}

#[test]
fn spectral_lambda_also_converges() {
    let p = problem(64, 128, 8, 6);
    let cfg = SolverConfig::new(8).with_lambda(LambdaMode::Spectral);
    let res = Algorithm::NstHtSubfb.solve(&p.op, &p.b, &cfg, None).unwrap();
    assert!(rel(&p, &res.u) < 1e-4);
}

#[test]
fn adaptive_with_full_start_matches_plain_run_when_that_succeeds() {
    for seed in 0..10 {
        let p = problem(64, 128, 10, 40 + seed);
        let cfg = SolverConfig::new(10);
        let plain = solve_nst_ht(&p.op, &p.b, &cfg, None).unwrap();
        let acfg = AdaptiveConfig::new(NstVariant::Ht, 10, 1, 32, cfg.clone());
        let ada = solve_adaptive(&p.op, &p.b, &acfg).unwrap();
        if plain.termination == Termination::ResidualMet {
            assert_eq!(ada.u, plain.u);
            assert_eq!(ada.iterations, plain.iterations);
            assert_eq!(ada.sparsity, 10);
        }
    }
}

#[test]
fn adaptive_climbs_from_small_start() {
    let p = problem(64, 128, 12, 77);
    let acfg = AdaptiveConfig::new(NstVariant::Ht, 3, 1, 32, SolverConfig::new(3).with_trace(true));
    let res = solve_adaptive(&p.op, &p.b, &acfg).unwrap();
    assert!(rel(&p, &res.u) < 1e-4);
    assert!(res.sparsity >= 12);
    let trace = res.trace.unwrap();
    assert_eq!(trace.len(), res.iterations);
    assert!(trace.windows(2).all(|w| w[1].iter == w[0].iter + 1));
}

#[test]
fn omp_takes_exactly_s_steps() {
    let p = problem(30, 60, 6, 2);
    let res = solve_omp(&p.op, &p.b, 6).unwrap();
    assert_eq!(res.iterations, 6);
    assert_eq!(nst::sparsity::l0(&res.u), 6);
}

#[test]
fn wrong_lengths_are_errors() {
    let p = problem(8, 16, 2, 1);
    let cfg = SolverConfig::new(2);
    for alg in Algorithm::ALL {
        assert!(alg.solve(&p.op, &p.b[..7], &cfg, None).is_err(), "{alg}");
    }
    assert!(solve_nst_ht(&p.op, &p.b, &cfg, Some(&[0.0; 15])).is_err());
}
