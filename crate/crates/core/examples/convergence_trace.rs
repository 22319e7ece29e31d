//! Relative error of every approximant, averaged over trials, for the four
//! NST variants and IHT at s = 30 on 128 × 256 matrices.

use nst::bench::{run_convergence_trace, ExperimentKind, ExperimentSpec, Sweep};
use nst::probgen::{Ensemble, ProblemSpec};
use nst::Algorithm;

pub fn run(trials: usize) -> nst::Result<nst::bench::ExperimentOutput> {
    let spec = ExperimentSpec::new(
        ExperimentKind::ConvergenceTrace,
        ProblemSpec::new(128, 256, 30, Ensemble::Gaussian).with_seed(1),
        vec![
            Algorithm::NstHt.into(),
            Algorithm::NstHtFb.into(),
            Algorithm::NstHtSubfb.into(),
            Algorithm::NstStretchedHt.into(),
            Algorithm::Iht.into(),
        ],
        Sweep {
            s: vec![30],
            ..Sweep::default()
        },
    )
    .with_trials(trials);
    let out = run_convergence_trace(&spec)?;
    for alg in ["nst_ht", "nst_ht_fb", "nst_ht_subfb", "nst_stretched_ht", "iht"] {
        let curve: Vec<String> = out
            .trace_means
            .iter()
            .filter(|r| r.algorithm == alg)
            .take(12)
            .map(|r| format!("{:.1e}", r.mean_rel_error))
            .collect();
        println!("{alg:<17} {}", curve.join(" "));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> nst::Result<()> {
    let trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10);
    run(trials).map(|_| ())
}
