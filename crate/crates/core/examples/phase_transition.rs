//! Success frequency against s/n for NST+HT+FB, adaptive NST+HT and IHT.
//!
//! Pass a trial count as the first argument for a finer estimate.

use nst::bench::{run_phase_transition, AdaptiveSpec, AlgorithmSpec, ExperimentKind, ExperimentSpec, Sweep};
use nst::probgen::{Ensemble, ProblemSpec};
use nst::{Algorithm, NstVariant};

pub fn run(trials: usize) -> nst::Result<nst::bench::ExperimentOutput> {
    let spec = ExperimentSpec::new(
        ExperimentKind::PhaseTransition,
        ProblemSpec::new(64, 128, 1, Ensemble::Gaussian).with_seed(5),
        vec![
            Algorithm::NstHtFb.into(),
            AlgorithmSpec::Adaptive {
                adaptive: AdaptiveSpec::new(NstVariant::Ht, 0.3),
            },
            Algorithm::Iht.into(),
        ],
        Sweep {
            s: vec![8, 16, 24, 32],
            ..Sweep::default()
        },
    )
    .with_trials(trials);
    let out = run_phase_transition(&spec)?;
    println!("{:<28} {:>5} {:>8}", "algorithm", "s/n", "success");
    for r in &out.aggregates {
        println!("{:<28} {:>5.3} {:>8.2}", r.algorithm, r.s_over_n, r.success_freq);
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> nst::Result<()> {
    let trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20);
    run(trials).map(|_| ())
}
