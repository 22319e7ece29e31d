//! Every solver on the same random 64 × 128 instance.

use nst::probgen::{generate, Ensemble, ProblemSpec};
use nst::{Algorithm, SolverConfig};

pub fn run() -> nst::Result<Vec<(Algorithm, f64)>> {
    let spec = ProblemSpec::new(64, 128, 12, Ensemble::Gaussian).with_seed(11);
    let p = generate(&spec)?;
    let cfg = SolverConfig::new(spec.s);
    let mut out = Vec::new();
    println!("{:<18} {:>12} {:>6}  termination", "algorithm", "rel_error", "iters");
    for alg in Algorithm::ALL {
        let res = alg.solve(&p.op, &p.b, &cfg, None)?;
        let err = nst::linalg::dist2(&res.u, &p.x_true) / nst::linalg::norm2(&p.x_true);
        println!("{:<18} {:>12.3e} {:>6}  {}", alg.name(), err, res.iterations, res.termination.label());
        out.push((alg, err));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> nst::Result<()> {
    run().map(|_| ())
}
