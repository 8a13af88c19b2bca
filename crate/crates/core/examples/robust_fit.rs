//! End-to-end robust fit: l1 start, then median refinement rounds.

use robustpoly::simulator::{make_instance, random_truth, Adversary, Measure, NoiseModel};
use robustpoly::{approx, goodness, norm_inf_grid, FitConfig, GridSpec, Partition};

fn main() -> robustpoly::Result<()> {
    let (d, sigma) = (6, 0.05);
    let cfg = FitConfig {
        alpha: 0.3,
        ..FitConfig::new(d, 0.25)
    };
    let truth = random_truth(d, 42);
    let model = NoiseModel::new(sigma, 0.1, Adversary::SignFlip);
    let inst = make_instance(&truth, 50 * cfg.m(), Measure::Chebyshev, &model, 42)?;
    let good = goodness(&Partition::new(cfg.m())?, &inst.samples, cfg.alpha)?.is_good;
    println!(
        "m = {}, rounds = {}, n = {}, alpha-good = {good}",
        cfg.m(),
        cfg.rounds(),
        inst.samples.len()
    );

    let report = approx(&inst.samples.without_flags(), &cfg)?;
    let grid = GridSpec::default_inf(d);
    for (t, p) in report.iterates.iter().enumerate() {
        println!(
            "iterate {t}: ||p_t - p||_inf = {:.5}",
            norm_inf_grid(&p.sub(&truth), &grid)
        );
    }
    println!(
        "final error {:.5} vs (2 + eps) sigma = {:.5}; converged = {}",
        norm_inf_grid(&report.final_poly.sub(&truth), &grid),
        (2.0 + cfg.epsilon) * sigma,
        report.converged
    );
    Ok(())
}
