//! Solve times of NST+HT+FB against the greedy baselines as s grows.

use nst::bench::{run_timing, ExperimentKind, ExperimentSpec, Sweep};
use nst::probgen::{Ensemble, ProblemSpec};
use nst::Algorithm;

pub fn run(trials: usize) -> nst::Result<Vec<nst::bench::TimingRow>> {
    let spec = ExperimentSpec::new(
        ExperimentKind::Timing,
        ProblemSpec::new(128, 256, 1, Ensemble::Gaussian).with_seed(8),
        vec![Algorithm::NstHtFb.into(), Algorithm::Omp.into(), Algorithm::Sp.into(), Algorithm::Htp.into()],
        Sweep {
            s: vec![10, 38],
            ..Sweep::default()
        },
    )
    .with_trials(trials);
    let out = run_timing(&spec)?;
    println!("{:<10} {:>4} {:>14} {:>14}", "algorithm", "s", "median solve", "median build");
    for r in &out.timing {
        println!(
            "{:<10} {:>4} {:>12.3}ms {:>12.3}ms",
            r.algorithm,
            r.s,
            1e3 * r.median_solve_s,
            1e3 * r.median_build_s
        );
    }
    Ok(out.timing)
}

#[allow(dead_code)]
fn main() -> nst::Result<()> {
    let trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10);
    run(trials).map(|_| ())
}
