//! Where NST+HT and NST+HT+FB go once the support stops changing, compared
//! with iterating the pinned-support updates directly.

use nst::analysis::{fixed_support_limit_fb, fixed_support_limit_ht};
use nst::linalg::{dist2, DenseMatrix};
use nst::probgen::parseval_frame;
use nst::solvers::{feedback_approximant, nst_step};
use nst::{MeasurementOperator, SupportSet};

pub fn run() -> nst::Result<(f64, f64)> {
    let op = MeasurementOperator::new(parseval_frame(20, 40, 6)?)?;
    let t = SupportSet::new(vec![3, 17, 29], 40)?;
    let x_j: Vec<f64> = (0..40).map(|i| ((i * 37 % 11) as f64 - 5.0) / 5.0).collect();
    let b = op.apply(&x_j)?;

    let natural = fixed_support_limit_ht(&op, &t, &x_j)?;
    let mut x = x_j.clone();
    for _ in 0..500 {
        x = nst_step(&op, &b, &nst::sparsity::restrict(&x, &t))?;
    }
    let ht_gap = dist2(&x, &natural);
    println!("pinned NST+HT after 500 steps vs closed form: {ht_gap:.2e}");

    let ddag = fixed_support_limit_fb(&op, &t, &x_j)?;
    let one = nst_step(&op, &b, &feedback_approximant(&op, &x_j, &t)?)?;
    let fb_gap = dist2(&one, &ddag);
    println!("one pinned NST+HT+FB step vs closed form:   {fb_gap:.2e}");
    println!("the two limits differ by {:.2e} on this Parseval frame", dist2(&natural, &ddag));

    let gauss = MeasurementOperator::new(DenseMatrix::new(
        3,
        6,
        (0..18).map(|i| ((i * 7 % 5) as f64 - 2.0) + 0.1 * i as f64).collect(),
    )?)?;
    let t2 = SupportSet::new(vec![0, 4], 6)?;
    let y = [1.0, -0.5, 0.25, 2.0, 0.0, 1.5];
    let closed = fixed_support_limit_fb(&gauss, &t2, &y)?;
    let stepped = nst_step(&gauss, &gauss.apply(&y)?, &feedback_approximant(&gauss, &y, &t2)?)?;
    println!("non-Parseval operator, FB step vs closed form: {:.2e}", dist2(&closed, &stepped));
    Ok((ht_gap, fb_gap))
}

#[allow(dead_code)]
fn main() -> nst::Result<()> {
    run().map(|_| ())
}
