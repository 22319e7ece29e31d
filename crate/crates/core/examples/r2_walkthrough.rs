//! One equation, two unknowns: `2x₁ + x₂ = 2`, looking for a 1-sparse
//! solution. Prints every iterate of NST+HT and shows NST+HT+FB landing on
//! `(1, 0)` in a single step.

use nst::solvers::{initial_iterate, nst_step};
use nst::{hard_threshold, DenseMatrix, MeasurementOperator, SolverConfig};

pub fn run() -> nst::Result<Vec<f64>> {
    let op = MeasurementOperator::new(DenseMatrix::from_rows(&[vec![2.0, 1.0]])?)?;
    let b = [2.0];

    let mut x = initial_iterate(&op, &b)?;
    println!("x0 = {x:?}");
    for k in 0..6 {
        let u = hard_threshold(&x, 1)?;
        x = nst_step(&op, &b, &u)?;
        println!("k = {k}: u = {u:?}, next x = {x:?}");
    }

    let cfg = SolverConfig::new(1).with_trace(true);
    let ht = nst::solvers::solve_nst_ht(&op, &b, &cfg, None)?;
    println!("NST+HT: {} after {} iterations, u = {:?}", ht.termination.label(), ht.iterations, ht.u);

    let fb = nst::solvers::solve_nst_ht_fb(&op, &b, &cfg, None)?;
    println!("NST+HT+FB: {} after {} iterations, u = {:?}", fb.termination.label(), fb.iterations, fb.u);
    Ok(fb.u)
}

#[allow(dead_code)]
fn main() -> nst::Result<()> {
    run().map(|_| ())
}
