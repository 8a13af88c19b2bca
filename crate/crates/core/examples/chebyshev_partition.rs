//! The Chebyshev partition, sample bucketing, goodness and the closeness vector.

use robustpoly::partition::midpoint_anchors;
use robustpoly::simulator::{make_instance, random_truth, Adversary, Measure, NoiseModel};
use robustpoly::{e_vector, goodness, piecewise_project, Partition};

fn main() -> robustpoly::Result<()> {
    let part = Partition::new(8)?;
    for j in 1..=part.m() {
        let (lo, hi) = part.interval(j);
        println!("I_{j} = [{lo:+.4}, {hi:+.4}]  length {:.4}", part.length(j));
    }
    println!("x = 0.1 lies in I_{}", part.locate(0.1)?);

    let truth = random_truth(3, 1);
    let model = NoiseModel::new(0.1, 0.1, Adversary::SignFlip);
    let inst = make_instance(&truth, 4000, Measure::Chebyshev, &model, 1)?;
    let big = Partition::new(32)?;
    let report = goodness(&big, &inst.samples, 0.35)?;
    println!(
        "0.35-good: {} (worst interval outlier fraction {:.3})",
        report.is_good,
        report
            .per_interval
            .iter()
            .map(|c| c.fraction)
            .fold(0.0, f64::max)
    );
    let e = e_vector(&big, &inst.samples, &truth, 0.35)?;
    println!(
        "closeness sum_j |I_j| e_j = {:.4} (inlier noise 0.1)",
        e.weighted_sum
    );

    let r = piecewise_project(&truth, &big, &midpoint_anchors(&big))?;
    println!(
        "||p - r||_1 for the midpoint step function: {:.5}",
        r.l1_distance(&truth, 32)
    );
    Ok(())
}
