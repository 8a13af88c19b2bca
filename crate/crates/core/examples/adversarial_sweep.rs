//! A small parameter sweep over outlier rates and adversaries, printed as CSV.

use robustpoly::cli::{run_experiment, write_records, ExperimentConfig, NSchedule};
use robustpoly::simulator::{Adversary, Measure};

fn main() -> robustpoly::Result<()> {
    let cfg = ExperimentConfig {
        degrees: vec![4],
        rhos: vec![0.05, 0.15, 0.3],
        sigmas: vec![0.05],
        measures: vec![Measure::Chebyshev],
        adversaries: vec![
            Adversary::ConstantOffset,
            Adversary::SignFlip,
            Adversary::TwoPolyMixture,
        ],
        n_schedule: NSchedule::MLogM(3.0),
        trials: 2,
        base_seed: 1,
        epsilon: 0.3,
        alpha: None,
    };
    let records = run_experiment(&cfg, None)?;
    for r in &records {
        eprintln!(
            "{:<16} rho {:.2}: good {:5}  l1 start {:.4}  final {:.4}",
            r.adversary.name(),
            r.rho,
            r.good,
            r.l1_init_linf_error,
            r.linf_error
        );
    }
    write_records(&records, std::io::stdout())
}
