//! Robust polynomial regression when a random fraction of samples are
//! arbitrary outliers.
//!
//! The pipeline fits a degree-`d` polynomial in the Chebyshev basis by a
//! weighted `l1` regression over a Chebyshev partition of `[-1, 1]`, then
//! repeatedly corrects it with per-interval medians and a discrete minimax fit.
//! Alongside the estimator the crate ships a seeded instance simulator and
//! executable versions of the constructions that bound what any estimator can
//! achieve.
//!
//! ```
//! use robustpoly::simulator::{make_instance, random_truth, Adversary, Measure, NoiseModel};
//! use robustpoly::{approx, norm_inf_grid, FitConfig, GridSpec};
//!
//! let truth = random_truth(3, 1);
//! let model = NoiseModel::new(0.05, 0.1, Adversary::ConstantOffset);
//! let cfg = FitConfig { alpha: 0.3, ..FitConfig::new(3, 0.3) };
//! let inst = make_instance(&truth, 40 * cfg.m(), Measure::Chebyshev, &model, 1).unwrap();
//! let report = approx(&inst.samples.without_flags(), &cfg).unwrap();
//! let err = norm_inf_grid(&report.final_poly.sub(&truth), &GridSpec::default_inf(3));
//! assert!(err <= (2.0 + cfg.epsilon) * 0.05);
//! ```

// NaN must fail range checks, and index loops mirror the math.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cheb;
pub mod cli;
pub mod error;
pub mod lowerbounds;
pub mod lp;
pub mod partition;
pub mod regression;
pub mod simulator;

pub use cheb::{cheb_eval, norm_1_grid, norm_inf_grid, poly_lincomb, ChebPoly, GridSpec, NodeKind};
pub use error::{Error, Result};
pub use lp::{lp_solve, LpError, LpProblem, LpSolution, LpStatus, SimplexSolver};
pub use partition::{
    build_partition, e_vector, goodness, piecewise_project, GoodnessReport, Partition, SampleSet,
};
pub use regression::{
    approx, interval_medians, l1_fit, linf_point_fit, minimax_fit, refine, FitConfig, FitReport,
};
