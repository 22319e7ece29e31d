//! Adaptive NST+HT started from s₀ = κs for several κ, with Gaussian and
//! Bernoulli signals.

use nst::bench::{run_adaptive_s0_sweep, AdaptiveSpec, AlgorithmSpec, ExperimentKind, ExperimentSpec, Sweep};
use nst::probgen::{Ensemble, ProblemSpec};
use nst::NstVariant;

pub fn run(trials: usize) -> nst::Result<Vec<nst::bench::AggregateRow>> {
    let mut rows = Vec::new();
    for ensemble in [Ensemble::Gaussian, Ensemble::Bernoulli] {
        let spec = ExperimentSpec::new(
            ExperimentKind::AdaptiveS0Sweep,
            ProblemSpec::new(64, 128, 1, ensemble).with_seed(3),
            vec![AlgorithmSpec::Adaptive {
                adaptive: AdaptiveSpec::new(NstVariant::Ht, 1.0),
            }],
            Sweep {
                s: vec![20, 26],
                kappa: vec![0.3, 0.6, 0.9],
                ..Sweep::default()
            },
        )
        .with_trials(trials);
        let out = run_adaptive_s0_sweep(&spec)?;
        println!("{ensemble:?} signals");
        for r in &out.aggregates {
            println!("  s = {:<3} kappa = {:<4} success {:.2}", r.s, r.kappa.unwrap_or(1.0), r.success_freq);
        }
        rows.extend(out.aggregates);
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> nst::Result<()> {
    let trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20);
    run(trials).map(|_| ())
}
