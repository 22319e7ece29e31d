//! Mean relative error against the noise level for a contaminated sparse
//! signal, written to CSV under the system temp directory.

use nst::bench::{run_noise_sweep, write_outputs, ExperimentKind, ExperimentSpec, Sweep};
use nst::probgen::{Ensemble, NoiseSpec, ProblemSpec};
use nst::Algorithm;

pub fn run(trials: usize) -> nst::Result<nst::bench::ExperimentOutput> {
    let spec = ExperimentSpec::new(
        ExperimentKind::NoiseSweep,
        ProblemSpec::new(64, 128, 5, Ensemble::Gaussian)
            .with_noise(NoiseSpec::signal(0.0))
            .with_seed(9),
        vec![Algorithm::NstHt.into(), Algorithm::NstHtFb.into(), Algorithm::Iht.into(), Algorithm::Omp.into()],
        Sweep {
            s: vec![5],
            eps: vec![0.0, 0.05, 0.1, 0.2],
            ..Sweep::default()
        },
    )
    .with_trials(trials);
    let out = run_noise_sweep(&spec)?;
    for r in &out.aggregates {
        println!("{:<12} eps = {:<5} mean rel error {:.4}", r.algorithm, r.eps.unwrap_or(0.0), r.mean_rel_error);
    }
    let dir = std::env::temp_dir().join("nst-noise-sweep");
    write_outputs(&out, &dir)?;
    println!("CSV files in {}", dir.display());
    Ok(out)
}

#[allow(dead_code)]
fn main() -> nst::Result<()> {
    let trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(50);
    run(trials).map(|_| ())
}
