//! Command-line front end: `fit`, `simulate`, `experiment` and `lowerbound`.
//!
//! Exit codes: 0 on success, 1 for usage or validation errors, 2 for runtime
//! failures. Every random choice derives from `--seed` or the config's
//! `base_seed`, so identical argv produce identical files.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cheb::{norm_1_grid, norm_inf_grid, ChebPoly, GridSpec};
use crate::error::{invalid, malformed, Error, Result};
use crate::lowerbounds::{
    check_sandwich, indicator_report, listdecode_adversary, oscillation_report,
    projection_gap_report, quad_triple_report, safe_region_rate, uniform_lb_instance, FamilySpec,
    IndicatorSpec,
};
use crate::partition::{goodness, Partition, SampleSet};
use crate::regression::{approx, DerivedSizes, FitConfig};
use crate::simulator::{
    derive_seed, make_instance, random_truth, sample_x, Adversary, AdversaryParams, Measure,
    NoiseModel,
};

/// Environment variable overriding the norm grid size used in reports.
pub const GRID_ENV: &str = "ROBUSTPOLY_GRID_M";

#[derive(Debug, Parser)]
#[command(
    name = "robustpoly",
    version,
    about = "Robust polynomial regression with random outliers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a polynomial to a sample CSV (`x,y[,outlier]`).
    Fit(FitArgs),
    /// Generate a seeded instance as `<prefix>.csv` plus `<prefix>.json`.
    Simulate(SimulateArgs),
    /// Run a parameter sweep described by a JSON config; one CSV row per trial.
    Experiment(ExperimentArgs),
    /// Build and check a lower-bound construction.
    Lowerbound(LowerboundArgs),
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    degree: usize,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Defaults to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    dry_run: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    degree: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "chebyshev")]
    measure: Measure,
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value = "sign_flip")]
    adversary: Adversary,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    output_prefix: PathBuf,
    /// Used only for the partition size reported by `--dry-run`.
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long)]
    outlier_scale: Option<f64>,
    #[arg(long)]
    oscillation: Option<usize>,
    #[arg(long)]
    peak: Option<f64>,
    /// Use the zero polynomial as the truth instead of a random one.
    #[arg(long)]
    zero_truth: bool,
    #[arg(long)]
    dry_run: bool,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    dry_run: bool,
}

#[derive(Debug, Args)]
struct LowerboundArgs {
    #[command(subcommand)]
    gadget: Gadget,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    dry_run: bool,
}

#[derive(Debug, Subcommand)]
enum Gadget {
    /// Chebyshev center of three quadratics that are pairwise within 2.
    QuadTriple {
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Peaked indicator polynomial `p_b`.
    Indicator {
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        center: f64,
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Sandwich property of the `f_S` family for random subsets.
    FsSandwich {
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        alpha: f64,
        #[arg(long, default_value_t = 10)]
        subsets: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Pairwise distances of the quadratic oscillation family.
    Oscillation {
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 8192)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Shifted Chebyshev polynomial indistinguishable from zero on most of the domain.
    UniformGap {
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 1.5)]
        factor: f64,
        /// Sample count for the empirical safe-region rate.
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Line projection of a ramp that lands far from the constant it tracks.
    ProjectionGap {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 8192)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Outlier-rate-1/2 adversary whose output does not depend on the truth.
    ListDecode {
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 1.0)]
        factor: f64,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Error::InvalidArgument(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Fit(a) => cmd_fit(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Lowerbound(a) => cmd_lowerbound(a.gadget),
    }
}

/// Grid size from [`GRID_ENV`], if set.
pub fn grid_override() -> Result<Option<usize>> {
    match std::env::var(GRID_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&m| m > 0)
            .map(Some)
            .ok_or_else(|| invalid(format!("{GRID_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(output: Option<&Path>, value: &T) -> Result<()> {
    emit(output, &(serde_json::to_string_pretty(value)? + "\n"))
}

#[derive(Serialize)]
struct DryRun {
    m: Option<usize>,
    rounds: Option<usize>,
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<usize>,
}

fn print_dry_run(d: DryRun) -> Result<()> {
    println!("{}", serde_json::to_string(&d)?);
    Ok(())
}

#[derive(Serialize)]
struct FitOutput<'a> {
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_good: Option<bool>,
    #[serde(flatten)]
    report: &'a crate::regression::FitReport,
}

fn cmd_fit(a: FitArgs) -> Result<()> {
    let cfg = FitConfig {
        degree: a.degree,
        epsilon: a.epsilon,
        alpha: a.alpha,
        m_override: a.m,
        max_rounds: a.max_rounds,
    };
    cfg.validate()?;
    let samples = SampleSet::read_csv(&a.input)?;
    if a.dry_run {
        let sizes = DerivedSizes::from(&cfg);
        return print_dry_run(DryRun {
            m: Some(sizes.m),
            rounds: Some(sizes.rounds),
            n: Some(samples.len()),
            trials: None,
        });
    }
    let report = approx(&samples.without_flags(), &cfg)?;
    let alpha_good = match samples.flags() {
        Some(_) => Some(goodness(&Partition::new(report.m)?, &samples, cfg.alpha)?.is_good),
        None => None,
    };
    emit_json(
        a.output.as_deref(),
        &FitOutput {
            n: samples.len(),
            alpha_good,
            report: &report,
        },
    )
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let model = NoiseModel::new(a.sigma, a.rho, a.adversary).with_params(AdversaryParams {
        outlier_scale: a.outlier_scale,
        oscillation: a.oscillation,
        decoy_degree: Some(a.degree),
        peak: a.peak,
        ..Default::default()
    });
    model.validate()?;
    if a.adversary == Adversary::CustomValues {
        return Err(invalid(
            "custom_values needs explicit per-sample lists; use the library API",
        ));
    }
    let cfg = FitConfig::new(a.degree, a.epsilon);
    cfg.validate()?;
    if a.dry_run {
        return print_dry_run(DryRun {
            m: Some(cfg.m()),
            rounds: Some(cfg.rounds()),
            n: Some(a.n),
            trials: None,
        });
    }
    let truth = if a.zero_truth {
        ChebPoly::zero()
    } else {
        random_truth(a.degree, a.seed)
    };
    let inst = make_instance(&truth, a.n, a.measure, &model, a.seed)?;
    let (csv, json) = inst.write_files(&a.output_prefix)?;
    eprintln!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}

/// How many samples a trial draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NSchedule {
    Fixed(usize),
    /// `ceil(k m ln(10 m))`.
    MLogM(f64),
    /// `ceil(k m^2)`.
    MSquared(f64),
}

impl NSchedule {
    pub fn n(&self, m: usize) -> usize {
        let m = m as f64;
        match *self {
            NSchedule::Fixed(n) => n,
            NSchedule::MLogM(k) => (k * m * (10.0 * m).ln()).ceil() as usize,
            NSchedule::MSquared(k) => (k * m * m).ceil() as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub degrees: Vec<usize>,
    pub rhos: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub measures: Vec<Measure>,
    #[serde(default = "default_adversaries")]
    pub adversaries: Vec<Adversary>,
    pub n_schedule: NSchedule,
    pub trials: usize,
    pub base_seed: u64,
    pub epsilon: f64,
    /// Defaults to `(rho + 1/2) / 2` per cell.
    #[serde(default)]
    pub alpha: Option<f64>,
}

fn default_adversaries() -> Vec<Adversary> {
    vec![Adversary::SignFlip]
}

/// One cell-and-trial of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub degree: usize,
    pub rho: f64,
    pub sigma: f64,
    pub measure: Measure,
    pub adversary: Adversary,
    pub trial: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub alpha: f64,
    pub n_schedule: NSchedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub degree: usize,
    pub rho: f64,
    pub sigma: f64,
    pub measure: Measure,
    pub adversary: Adversary,
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub rounds: usize,
    pub alpha: f64,
    pub good: bool,
    pub linf_error: f64,
    pub l1_error: f64,
    pub l1_init_linf_error: f64,
    pub l1_init_l1_error: f64,
    /// `||p_t - p||_inf` for `t = 0..=rounds`, `;`-separated in CSV.
    pub iterate_linf_errors: Vec<f64>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.degrees.is_empty()
            || self.rhos.is_empty()
            || self.sigmas.is_empty()
            || self.measures.is_empty()
            || self.adversaries.is_empty()
        {
            return Err(invalid("every sweep axis needs at least one value"));
        }
        if let Some(r) = self.rhos.iter().find(|r| !(**r >= 0.0 && **r < 1.0)) {
            return Err(invalid(format!("rho must lie in [0, 1), got {r}")));
        }
        if self.adversaries.contains(&Adversary::CustomValues) {
            return Err(invalid("custom_values cannot be swept"));
        }
        for &rho in &self.rhos {
            FitConfig {
                alpha: self.alpha_for(rho),
                ..FitConfig::new(0, self.epsilon)
            }
            .validate()?;
        }
        Ok(())
    }

    pub fn alpha_for(&self, rho: f64) -> f64 {
        self.alpha.unwrap_or((rho + 0.5) / 2.0)
    }

    /// All trials in output order: degree, rho, sigma, measure, adversary, trial.
    pub fn trials(&self) -> Vec<TrialSpec> {
        let mut out = Vec::new();
        for &degree in &self.degrees {
            for &rho in &self.rhos {
                for &sigma in &self.sigmas {
                    for &measure in &self.measures {
                        for &adversary in &self.adversaries {
                            for trial in 0..self.trials {
                                out.push(TrialSpec {
                                    degree,
                                    rho,
                                    sigma,
                                    measure,
                                    adversary,
                                    trial,
                                    seed: derive_seed(self.base_seed, out.len() as u64),
                                    epsilon: self.epsilon,
                                    alpha: self.alpha_for(rho),
                                    n_schedule: self.n_schedule,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Draws one instance, checks goodness and runs the full fit.
pub fn run_trial(spec: &TrialSpec, grid_m: Option<usize>) -> Result<TrialRecord> {
    let cfg = FitConfig {
        alpha: spec.alpha,
        ..FitConfig::new(spec.degree, spec.epsilon)
    };
    let m = cfg.m();
    let n = spec.n_schedule.n(m);
    let truth = random_truth(spec.degree, spec.seed);
    let model =
        NoiseModel::new(spec.sigma, spec.rho, spec.adversary).with_params(AdversaryParams {
            oscillation: Some(m),
            decoy_degree: Some(spec.degree),
            ..Default::default()
        });
    let inst = make_instance(&truth, n, spec.measure, &model, spec.seed)?;
    let part = Partition::new(m)?;
    let good = goodness(&part, &inst.samples, spec.alpha)?.is_good;
    let inf_grid = grid_m.map_or_else(|| GridSpec::default_inf(spec.degree), GridSpec::chebyshev);
    let l1_grid = grid_m.map_or_else(|| GridSpec::default_l1(spec.degree), GridSpec::chebyshev);
    let blank = |rounds| TrialRecord {
        degree: spec.degree,
        rho: spec.rho,
        sigma: spec.sigma,
        measure: spec.measure,
        adversary: spec.adversary,
        trial: spec.trial,
        seed: spec.seed,
        n,
        m,
        rounds,
        alpha: spec.alpha,
        good,
        linf_error: f64::NAN,
        l1_error: f64::NAN,
        l1_init_linf_error: f64::NAN,
        l1_init_l1_error: f64::NAN,
        iterate_linf_errors: Vec::new(),
    };
    let report = match approx(&inst.samples.without_flags(), &cfg) {
        Ok(r) => r,
        // An empty interval leaves the estimator undefined; record the trial.
        Err(Error::EmptyInterval(_)) => return Ok(blank(cfg.rounds())),
        Err(e) => return Err(e),
    };
    let err = |p: &ChebPoly, g: &GridSpec, l1: bool| {
        let diff = p.sub(&truth);
        if l1 {
            norm_1_grid(&diff, g)
        } else {
            norm_inf_grid(&diff, g)
        }
    };
    Ok(TrialRecord {
        linf_error: err(&report.final_poly, &inf_grid, false),
        l1_error: err(&report.final_poly, &l1_grid, true),
        l1_init_linf_error: err(&report.l1_init_poly, &inf_grid, false),
        l1_init_l1_error: err(&report.l1_init_poly, &l1_grid, true),
        iterate_linf_errors: report
            .iterates
            .iter()
            .map(|p| err(p, &inf_grid, false))
            .collect(),
        ..blank(report.planned_rounds)
    })
}

/// Runs every trial (in parallel) and returns records in config order.
pub fn run_experiment(cfg: &ExperimentConfig, grid_m: Option<usize>) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    cfg.trials()
        .par_iter()
        .map(|t| run_trial(t, grid_m))
        .collect()
}

/// Writes records as CSV with a fixed column order.
pub fn write_records(records: &[TrialRecord], out: impl std::io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "degree",
        "rho",
        "sigma",
        "measure",
        "adversary",
        "trial",
        "seed",
        "n",
        "m",
        "rounds",
        "alpha",
        "good",
        "linf_error",
        "l1_error",
        "l1_init_linf_error",
        "l1_init_l1_error",
        "iterate_linf_errors",
    ])?;
    let f = |v: f64| format!("{v:?}");
    for r in records {
        w.write_record([
            r.degree.to_string(),
            f(r.rho),
            f(r.sigma),
            format!("{:?}", r.measure).to_lowercase(),
            r.adversary.name().to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            r.rounds.to_string(),
            f(r.alpha),
            (r.good as u8).to_string(),
            f(r.linf_error),
            f(r.l1_error),
            f(r.l1_init_linf_error),
            f(r.l1_init_l1_error),
            r.iterate_linf_errors
                .iter()
                .map(|&v| f(v))
                .collect::<Vec<_>>()
                .join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_experiment(a: ExperimentArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.config)?;
    let cfg: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| malformed(format!("bad config {}: {e}", a.config.display())))?;
    cfg.validate()?;
    let grid_m = grid_override()?;
    if a.dry_run {
        for &degree in &cfg.degrees {
            let fc = FitConfig::new(degree, cfg.epsilon);
            print_dry_run(DryRun {
                m: Some(fc.m()),
                rounds: Some(fc.rounds()),
                n: Some(cfg.n_schedule.n(fc.m())),
                trials: Some(cfg.trials().len() / cfg.degrees.len()),
            })?;
        }
        return Ok(());
    }
    let records = run_experiment(&cfg, grid_m)?;
    let mut buf = Vec::new();
    write_records(&records, &mut buf)?;
    emit(
        a.output.as_deref(),
        &String::from_utf8(buf).map_err(|e| Error::Internal(e.to_string()))?,
    )
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    gadget: &'static str,
    #[serde(flatten)]
    body: T,
}

fn gadget_out<T: Serialize>(name: &'static str, common: &Common, body: T) -> Result<()> {
    emit_json(common.output.as_deref(), &Report { gadget: name, body })
}

#[derive(Serialize)]
struct FsSandwichBody {
    family: FamilySpec,
    grid_m: usize,
    all_hold: bool,
    subsets: Vec<crate::lowerbounds::SandwichReport>,
}

#[derive(Serialize)]
struct UniformGapBody {
    #[serde(flatten)]
    gap: crate::lowerbounds::UniformGap,
    n: usize,
    trials: usize,
    safe_rate: f64,
    /// `exp(-n alpha / d^2)`.
    rate_lower_bound: f64,
}

#[derive(Serialize)]
struct ListDecodeBody {
    family: FamilySpec,
    n: usize,
    seed: u64,
    subsets: Vec<Vec<usize>>,
    outputs_identical: bool,
    inliers_within_alpha: bool,
    outlier_fractions: Vec<f64>,
}

fn cmd_lowerbound(g: Gadget) -> Result<()> {
    let env_grid = grid_override()?;
    match g {
        Gadget::QuadTriple { grid, common } => {
            if grid < 48 {
                return Err(invalid(format!(
                    "grid of {grid} nodes is too coarse for degree 2"
                )));
            }
            if common.dry_run {
                return print_dry_run(DryRun {
                    m: Some(grid),
                    rounds: None,
                    n: None,
                    trials: None,
                });
            }
            gadget_out("quad-triple", &common, quad_triple_report(grid)?)
        }
        Gadget::Indicator {
            degree,
            center,
            grid,
            common,
        } => {
            let grid = grid.or(env_grid).unwrap_or(4096);
            crate::lowerbounds::indicator_poly(IndicatorSpec {
                d: degree,
                b: center,
            })?;
            if common.dry_run {
                return print_dry_run(DryRun {
                    m: Some(grid),
                    rounds: None,
                    n: None,
                    trials: None,
                });
            }
            gadget_out(
                "indicator",
                &common,
                indicator_report(
                    IndicatorSpec {
                        d: degree,
                        b: center,
                    },
                    grid,
                )?,
            )
        }
        Gadget::FsSandwich {
            degree,
            alpha,
            subsets,
            seed,
            grid,
            common,
        } => {
            let family = FamilySpec::new(degree, alpha)?;
            let grid_m = grid.or(env_grid).unwrap_or(2000);
            if common.dry_run {
                return print_dry_run(DryRun {
                    m: Some(family.m),
                    rounds: None,
                    n: None,
                    trials: Some(subsets),
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let reports = (0..subsets)
                .map(|_| {
                    check_sandwich(
                        &family,
                        &family.random_subset(&mut rng),
                        &GridSpec::chebyshev(grid_m),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            gadget_out(
                "fs-sandwich",
                &common,
                FsSandwichBody {
                    all_hold: reports.iter().all(|r| r.holds),
                    family,
                    grid_m,
                    subsets: reports,
                },
            )
        }
        Gadget::Oscillation {
            degree,
            grid,
            common,
        } => {
            crate::lowerbounds::oscillation_family(degree)?;
            if common.dry_run {
                return print_dry_run(DryRun {
                    m: Some(grid),
                    rounds: None,
                    n: None,
                    trials: None,
                });
            }
            gadget_out("oscillation", &common, oscillation_report(degree, grid)?)
        }
        Gadget::UniformGap {
            degree,
            factor,
            n,
            trials,
            seed,
            common,
        } => {
            let gap = uniform_lb_instance(degree, factor)?;
            if common.dry_run {
                return print_dry_run(DryRun {
                    m: None,
                    rounds: None,
                    n: Some(n),
                    trials: Some(trials),
                });
            }
            let safe_rate = safe_region_rate(&gap, n, trials, seed);
            let rate_lower_bound = (-(n as f64) * gap.alpha / (degree * degree) as f64).exp();
            gadget_out(
                "uniform-gap",
                &common,
                UniformGapBody {
                    gap,
                    n,
                    trials,
                    safe_rate,
                    rate_lower_bound,
                },
            )
        }
        Gadget::ProjectionGap {
            alpha,
            sigma,
            grid,
            common,
        } => {
            crate::lowerbounds::linf_projection_instance(alpha, sigma)?;
            if common.dry_run {
                return print_dry_run(DryRun {
                    m: Some(grid),
                    rounds: None,
                    n: None,
                    trials: None,
                });
            }
            gadget_out(
                "projection-gap",
                &common,
                projection_gap_report(alpha, sigma, grid)?,
            )
        }
        Gadget::ListDecode {
            degree,
            factor,
            n,
            seed,
            common,
        } => {
            let family = FamilySpec::for_approximation_factor(degree, factor)?;
            if common.dry_run {
                return print_dry_run(DryRun {
                    m: Some(family.m),
                    rounds: None,
                    n: Some(n),
                    trials: None,
                });
            }
            let xs = sample_x(Measure::Uniform, n, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let subsets: Vec<Vec<usize>> = (0..4).map(|_| family.random_subset(&mut rng)).collect();
            let mut draws = Vec::new();
            let mut inliers_within_alpha = true;
            for s in &subsets {
                let draw = listdecode_adversary(&family, s, &xs, seed)?;
                let f = crate::lowerbounds::fs_family(&family, s)?;
                inliers_within_alpha &= xs
                    .iter()
                    .zip(&draw.ys)
                    .zip(&draw.flags)
                    .all(|((&x, &y), &out)| out || (y - f.eval(x)).abs() <= family.alpha);
                draws.push(draw);
            }
            let outputs_identical = draws.windows(2).all(|w| w[0].ys == w[1].ys);
            let outlier_fractions = draws
                .iter()
                .map(|d| d.flags.iter().filter(|&&f| f).count() as f64 / n.max(1) as f64)
                .collect();
            gadget_out(
                "list-decode",
                &common,
                ListDecodeBody {
                    family,
                    n,
                    seed,
                    subsets,
                    outputs_identical,
                    inliers_within_alpha,
                    outlier_fractions,
                },
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules() {
        assert_eq!(NSchedule::Fixed(7).n(100), 7);
        assert_eq!(
            NSchedule::MLogM(3.0).n(352),
            (3.0 * 352.0 * 3520f64.ln()).ceil() as usize
        );
        assert_eq!(NSchedule::MSquared(0.5).n(10), 50);
    }

    #[test]
    fn config_json_and_trial_order() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"degrees":[2],"rhos":[0.1,0.2],"sigmas":[0.1],"measures":["chebyshev"],
                "n_schedule":{"fixed":500},"trials":2,"base_seed":5,"epsilon":0.25}"#,
        )
        .unwrap();
        cfg.validate().unwrap();
        let t = cfg.trials();
        assert_eq!(t.len(), 4);
        assert_eq!((t[0].rho, t[0].trial), (0.1, 0));
        assert_eq!((t[3].rho, t[3].trial), (0.2, 1));
        assert!((t[0].alpha - 0.3).abs() < 1e-15);
        let bad = ExperimentConfig {
            trials: 0,
            ..cfg.clone()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig {
            rhos: vec![1.0],
            ..cfg
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(
            run_cli([
                "robustpoly",
                "fit",
                "--degree",
                "-1",
                "--input",
                "x.csv",
                "--epsilon",
                "0.25"
            ]),
            1
        );
        assert_eq!(run_cli(["robustpoly", "bogus"]), 1);
        assert_eq!(
            run_cli([
                "robustpoly",
                "lowerbound",
                "projection-gap",
                "--alpha",
                "0.7",
                "--dry-run"
            ]),
            1
        );
        assert_eq!(
            run_cli([
                "robustpoly",
                "lowerbound",
                "projection-gap",
                "--alpha",
                "0.25",
                "--dry-run"
            ]),
            0
        );
        assert_eq!(
            run_cli(["robustpoly", "lowerbound", "oscillation", "--degree", "1"]),
            1
        );
    }

    #[test]
    fn missing_input_is_a_runtime_error() {
        assert_eq!(
            run_cli([
                "robustpoly",
                "fit",
                "--input",
                "/nonexistent/x.csv",
                "--degree",
                "2",
                "--epsilon",
                "0.25"
            ]),
            2
        );
    }
}
