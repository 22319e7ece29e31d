//! Restricted-isometry constants and the convergence certificate of a
//! small matrix, exhaustively and by sampling.

use nst::analysis::{certificate, gamma_upper_bound, rip_report, RipMethod};
use nst::probgen::gaussian_matrix;
use nst::MeasurementOperator;

pub fn run() -> nst::Result<nst::analysis::ConvergenceCertificate> {
    let op = MeasurementOperator::new(gaussian_matrix(8, 16, 4))?;
    for s in 1..=3 {
        let exact = rip_report(&op, s, RipMethod::Exhaustive)?;
        let sampled = rip_report(&op, s, RipMethod::RandomSample { count: 50, seed: 1 })?;
        println!(
            "s = {s}: delta = {:.4}, gamma = {:.4} over {} supports; sampled {:.4} / {:.4}; gamma bound {:.4}",
            exact.delta_s,
            exact.gamma_s,
            exact.supports_checked,
            sampled.delta_s,
            sampled.gamma_s,
            gamma_upper_bound(&op, exact.delta_s)
        );
    }
    let cert = certificate(&op, 1, RipMethod::Exhaustive)?;
    println!("{}", serde_json::to_string_pretty(&cert).unwrap());
    Ok(cert)
}

#[allow(dead_code)]
fn main() -> nst::Result<()> {
    run().map(|_| ())
}
