//! Robust estimators over a Chebyshev partition.
//!
//! [`l1_fit`] is the interval-weighted least-absolute-deviations fit, and
//! [`refine`] is one median-plus-minimax correction round. [`approx`] chains
//! them: one `l1` fit followed by a fixed number of refinement rounds.
//!
//! Both fits are solved through their LP duals. These have `d + 1` (or `d + 2`)
//! rows and one bounded column per data point, whereas the textbook primal
//! forms have one row per data point. Fit coefficients are read off as the
//! negated row multipliers of the dual.

use serde::{Deserialize, Serialize};

use crate::cheb::{cheb_row, norm_1_grid, norm_inf_grid, ChebPoly, GridSpec};
use crate::error::{invalid, Error, Result};
use crate::lp::{LpProblem, SimplexSolver};
use crate::partition::{Partition, SampleSet};

/// Constant `K` in the default partition size `m = ceil(K (d + 1) / eps)`.
pub const PARTITION_K: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub degree: usize,
    pub epsilon: f64,
    pub alpha: f64,
    #[serde(default)]
    pub m_override: Option<usize>,
    #[serde(default)]
    pub max_rounds: Option<usize>,
}

impl FitConfig {
    pub fn new(degree: usize, epsilon: f64) -> Self {
        FitConfig {
            degree,
            epsilon,
            alpha: 0.25,
            m_override: None,
            max_rounds: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(invalid(format!(
                "epsilon must lie in (0, 1/2), got {}",
                self.epsilon
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(invalid(format!(
                "alpha must lie in (0, 1/2), got {}",
                self.alpha
            )));
        }
        if let Some(m) = self.m_override {
            if m < self.degree + 1 {
                return Err(invalid(format!(
                    "partition size {m} is below degree + 1 = {}",
                    self.degree + 1
                )));
            }
        }
        Ok(())
    }

    /// Partition size, never below `d + 1`.
    pub fn m(&self) -> usize {
        self.m_override.unwrap_or_else(|| {
            let m = (PARTITION_K * (self.degree + 1) as f64 / self.epsilon).ceil() as usize;
            m.max(self.degree + 1)
        })
    }

    /// `ceil(ln(4 (d + 1)^2) / ln(1 / eps)) + 2`, capped by `max_rounds`.
    pub fn rounds(&self) -> usize {
        let d1 = (self.degree + 1) as f64;
        let r = ((4.0 * d1 * d1).ln() / (1.0 / self.epsilon).ln()).ceil() as usize + 2;
        self.max_rounds.map_or(r, |cap| r.min(cap))
    }
}

/// Sizes implied by a configuration, for dry runs and reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedSizes {
    pub m: usize,
    pub rounds: usize,
}

impl From<&FitConfig> for DerivedSizes {
    fn from(cfg: &FitConfig) -> Self {
        DerivedSizes {
            m: cfg.m(),
            rounds: cfg.rounds(),
        }
    }
}

/// Size of one refinement correction `r_t = p_{t+1} - p_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub t: usize,
    pub residual_linf_estimate: f64,
    pub residual_l1_estimate: f64,
    /// Discrete minimax error of the correction against the interval medians.
    pub median_fit_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub config: FitConfig,
    pub m: usize,
    pub planned_rounds: usize,
    pub l1_init_poly: ChebPoly,
    pub rounds: Vec<RoundRecord>,
    /// `p_0 = l1_init_poly`, then the estimate after each round.
    pub iterates: Vec<ChebPoly>,
    pub final_poly: ChebPoly,
    /// No two consecutive increases of the correction size, and the last
    /// correction is at most `eps` times the first (or below `1e-12`).
    pub converged: bool,
    /// The correction size increased in two consecutive rounds.
    pub non_contraction: bool,
}

/// Per-sample weights `|I_j| / |S_j|`; fails on an empty interval.
pub fn interval_weights(part: &Partition, samples: &SampleSet) -> Result<Vec<f64>> {
    let buckets = part.assign_nonempty(samples)?;
    let mut w = vec![0.0; samples.len()];
    for (j, bucket) in buckets.iter().enumerate() {
        let wj = part.length(j + 1) / bucket.len() as f64;
        for &i in bucket {
            w[i] = wj;
        }
    }
    Ok(w)
}

/// `sum_i w_i |y_i - q(x_i)|`.
pub fn weighted_l1_objective(samples: &SampleSet, weights: &[f64], q: &ChebPoly) -> f64 {
    samples
        .xs()
        .iter()
        .zip(samples.ys())
        .zip(weights)
        .map(|((&x, &y), &w)| w * (y - q.eval(x)).abs())
        .sum()
}

/// Weighted least-absolute-deviations fit of degree `d`, with weights
/// `|I_j| / |S_j|`.
pub fn l1_fit(samples: &SampleSet, part: &Partition, d: usize) -> Result<ChebPoly> {
    let weights = interval_weights(part, samples)?;
    weighted_l1_fit(samples.xs(), samples.ys(), &weights, d)
}

/// `argmin_q sum_i w_i |y_i - q(x_i)|` over degree-`d` polynomials.
///
/// Dual: `max y^T u` subject to `sum_i u_i T_k(x_i) = 0` for `k <= d` and
/// `|u_i| <= w_i`.
pub fn weighted_l1_fit(xs: &[f64], ys: &[f64], weights: &[f64], d: usize) -> Result<ChebPoly> {
    let n = xs.len();
    if ys.len() != n || weights.len() != n {
        return Err(invalid("xs, ys and weights differ in length"));
    }
    if n < d + 1 {
        return Err(Error::DegenerateNodes {
            needed: d + 1,
            got: n,
        });
    }
    if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(invalid("weights must be positive and finite"));
    }
    let vander: Vec<Vec<f64>> = xs.iter().map(|&x| cheb_row(d, x)).collect();
    let mut lp = LpProblem::new(ys.iter().map(|y| -y).collect());
    for k in 0..=d {
        let row: Vec<f64> = vander.iter().map(|v| v[k]).collect();
        lp.add_eq(&row, 0.0)?;
    }
    for (i, &w) in weights.iter().enumerate() {
        lp.set_bounds(i, -w, w)?;
    }
    let sol = SimplexSolver::default().solve(&lp)?.optimal()?;
    Ok(ChebPoly::new(sol.duals.iter().map(|y| -y).collect()))
}

/// Discrete minimax fit: `argmin_q max_j |y_j - q(x_j)|` over degree `d`.
/// Returns the polynomial and its maximal error.
///
/// Dual: `max sum_j y_j (l+_j - l-_j)` subject to
/// `sum_j (l+_j - l-_j) T_k(x_j) = 0`, `sum_j (l+_j + l-_j) <= 1`, `l >= 0`.
pub fn minimax_fit(points: &[(f64, f64)], d: usize) -> Result<(ChebPoly, f64)> {
    let distinct = distinct_count(points.iter().map(|p| p.0));
    if distinct < d + 1 {
        return Err(Error::DegenerateNodes {
            needed: d + 1,
            got: distinct,
        });
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(invalid("non-finite point"));
    }
    let n = points.len();
    let vander: Vec<Vec<f64>> = points.iter().map(|&(x, _)| cheb_row(d, x)).collect();
    let mut objective = Vec::with_capacity(2 * n);
    objective.extend(points.iter().map(|p| -p.1));
    objective.extend(points.iter().map(|p| p.1));
    let mut lp = LpProblem::new(objective);
    for k in 0..=d {
        let mut row = Vec::with_capacity(2 * n);
        row.extend(vander.iter().map(|v| v[k]));
        row.extend(vander.iter().map(|v| -v[k]));
        lp.add_eq(&row, 0.0)?;
    }
    lp.add_le(&vec![1.0; 2 * n], 1.0)?;
    for j in 0..2 * n {
        lp.set_bounds(j, 0.0, f64::INFINITY)?;
    }
    let sol = SimplexSolver::default().solve(&lp)?.optimal()?;
    let q = ChebPoly::new(sol.duals[..=d].iter().map(|y| -y).collect());
    let err = points
        .iter()
        .fold(0.0f64, |m, &(x, y)| m.max((y - q.eval(x)).abs()));
    Ok((q, err))
}

/// [`minimax_fit`] without the error value.
pub fn linf_point_fit(points: &[(f64, f64)], d: usize) -> Result<ChebPoly> {
    minimax_fit(points, d).map(|(q, _)| q)
}

fn distinct_count(xs: impl Iterator<Item = f64>) -> usize {
    let mut v: Vec<f64> = xs.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

/// Lower median: the `ceil(n/2)`-th smallest value.
pub fn lower_median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty set");
    let k = (values.len() - 1) / 2;
    let (_, m, _) = values.select_nth_unstable_by(k, f64::total_cmp);
    *m
}

/// `(midpoint(I_j), lower median of y_i - center(x_i) over S_j)` for every `j`.
pub fn interval_medians(
    samples: &SampleSet,
    part: &Partition,
    center: &ChebPoly,
) -> Result<Vec<(f64, f64)>> {
    let buckets = part.assign_nonempty(samples)?;
    Ok(buckets
        .iter()
        .enumerate()
        .map(|(j, bucket)| {
            let mut r: Vec<f64> = bucket
                .iter()
                .map(|&i| samples.ys()[i] - center.eval(samples.xs()[i]))
                .collect();
            (part.midpoint(j + 1), lower_median(&mut r))
        })
        .collect())
}

/// One refinement round: `p_hat + r` with `r` the minimax fit to the medians.
pub fn refine(
    samples: &SampleSet,
    part: &Partition,
    p_hat: &ChebPoly,
    d: usize,
) -> Result<ChebPoly> {
    refine_step(samples, part, p_hat, d).map(|(p, _, _)| p)
}

fn refine_step(
    samples: &SampleSet,
    part: &Partition,
    p_hat: &ChebPoly,
    d: usize,
) -> Result<(ChebPoly, ChebPoly, f64)> {
    let medians = interval_medians(samples, part, p_hat)?;
    let (r, err) = minimax_fit(&medians, d)?;
    Ok((p_hat.add(&r), r, err))
}

/// `l1` fit followed by [`FitConfig::rounds`] refinement rounds.
pub fn approx(samples: &SampleSet, cfg: &FitConfig) -> Result<FitReport> {
    cfg.validate()?;
    let d = cfg.degree;
    let part = Partition::new(cfg.m())?;
    let planned_rounds = cfg.rounds();
    let l1_init = l1_fit(samples, &part, d)?;
    let inf_grid = GridSpec::default_inf(d);
    let l1_grid = GridSpec::default_l1(d);

    let mut iterates = vec![l1_init.clone()];
    let mut rounds = Vec::with_capacity(planned_rounds);
    let mut current = l1_init.clone();
    for t in 0..planned_rounds {
        let (next, r, err) = refine_step(samples, &part, &current, d)?;
        rounds.push(RoundRecord {
            t,
            residual_linf_estimate: norm_inf_grid(&r, &inf_grid),
            residual_l1_estimate: norm_1_grid(&r, &l1_grid),
            median_fit_error: err,
        });
        iterates.push(next.clone());
        current = next;
    }

    let sizes: Vec<f64> = rounds.iter().map(|r| r.residual_linf_estimate).collect();
    let non_contraction = sizes.windows(3).any(|w| w[1] > w[0] && w[2] > w[1]);
    let settled = match (sizes.first(), sizes.last()) {
        (Some(&first), Some(&last)) => last <= 1e-12 || last <= cfg.epsilon * first,
        _ => true,
    };
    Ok(FitReport {
        config: cfg.clone(),
        m: part.m(),
        planned_rounds,
        l1_init_poly: l1_init,
        rounds,
        iterates,
        final_poly: current,
        converged: settled && !non_contraction,
        non_contraction,
    })
}

impl FitReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cheb_xs(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| (std::f64::consts::PI * rng.random::<f64>()).cos())
            .collect()
    }

    #[test]
    fn config_sizes() {
        let cfg = FitConfig::new(10, 0.25);
        assert_eq!(cfg.m(), 352);
        assert_eq!(cfg.rounds(), 7);
        let capped = FitConfig {
            max_rounds: Some(0),
            ..cfg.clone()
        };
        assert_eq!(capped.rounds(), 0);
        assert!(FitConfig::new(3, 0.5).validate().is_err());
        assert!(FitConfig {
            m_override: Some(2),
            ..FitConfig::new(3, 0.25)
        }
        .validate()
        .is_err());
    }

    #[test]
    fn l1_fit_recovers_noiseless_polynomial() {
        let truth = ChebPoly::new(vec![-1.0, 0.0, 3.0]);
        let xs = cheb_xs(400, 11);
        let ys = truth.eval_many(&xs);
        let samples = SampleSet::new(xs, ys).unwrap();
        let part = Partition::new(8).unwrap();
        let fit = l1_fit(&samples, &part, 2).unwrap();
        for (a, b) in fit.coeffs().iter().zip(truth.coeffs()) {
            assert!((a - b).abs() < 1e-7, "{fit:?}");
        }
    }

    #[test]
    fn l1_fit_is_locally_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let xs = cheb_xs(300, 22);
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| {
                x * x - 0.3
                    + if rng.random::<f64>() < 0.2 {
                        5.0
                    } else {
                        0.05 * rng.random::<f64>()
                    }
            })
            .collect();
        let samples = SampleSet::new(xs, ys).unwrap();
        let part = Partition::new(12).unwrap();
        let w = interval_weights(&part, &samples).unwrap();
        let fit = l1_fit(&samples, &part, 4).unwrap();
        let base = weighted_l1_objective(&samples, &w, &fit);
        for k in 0..=4 {
            for delta in [-1e-3, 1e-3] {
                let mut c = fit.coeffs().to_vec();
                c[k] += delta;
                let moved = weighted_l1_objective(&samples, &w, &ChebPoly::new(c));
                assert!(
                    moved >= base - 1e-9,
                    "k={k} delta={delta}: {moved} < {base}"
                );
            }
        }
    }

    #[test]
    fn l1_fit_rejects_empty_interval() {
        let samples = SampleSet::new(vec![0.9, 0.95], vec![0.0, 0.0]).unwrap();
        let part = Partition::new(2).unwrap();
        assert!(matches!(
            l1_fit(&samples, &part, 0),
            Err(Error::EmptyInterval(2))
        ));
    }

    #[test]
    fn symmetric_three_points() {
        let (q, err) = minimax_fit(&[(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)], 1).unwrap();
        assert!((err - 0.5).abs() < 1e-12);
        assert!((q.eval(-0.7) - 0.5).abs() < 1e-12 && (q.eval(0.4) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn interpolation_is_exact() {
        let p = ChebPoly::new(vec![0.5, -1.0, 2.0, 0.25]);
        let pts: Vec<(f64, f64)> = [-0.9, -0.2, 0.3, 0.8]
            .iter()
            .map(|&x| (x, p.eval(x)))
            .collect();
        let (q, err) = minimax_fit(&pts, 3).unwrap();
        assert!(err < 1e-10);
        for (a, b) in q.coeffs().iter().zip(p.coeffs()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_nodes() {
        let pts = [(0.1, 1.0), (0.1, 2.0), (0.3, 0.0)];
        assert!(matches!(
            minimax_fit(&pts, 2),
            Err(Error::DegenerateNodes { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn minimax_equioscillates_and_is_locally_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let pts: Vec<(f64, f64)> = (0..40)
            .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let d = 5;
        let (q, err) = minimax_fit(&pts, d).unwrap();
        let max_err = |q: &ChebPoly| {
            pts.iter()
                .fold(0.0f64, |m, &(x, y)| m.max((y - q.eval(x)).abs()))
        };
        let attained = pts
            .iter()
            .filter(|&&(x, y)| ((y - q.eval(x)).abs() - err).abs() < 1e-6)
            .count();
        assert!(attained >= d + 2, "only {attained} extremal points");
        for k in 0..=d {
            for delta in [-1e-3, -1e-4, 1e-4, 1e-3] {
                let mut c = q.coeffs().to_vec();
                c[k] += delta;
                assert!(max_err(&ChebPoly::new(c)) >= err - 1e-6);
            }
        }
    }

    #[test]
    fn medians_use_lower_median() {
        assert_eq!(lower_median(&mut [5.0, 0.1, 0.2]), 0.2);
        assert_eq!(lower_median(&mut [4.0, 1.0, 3.0, 2.0]), 2.0);
        assert_eq!(lower_median(&mut [-3.5]), -3.5);
        let samples = SampleSet::new(vec![0.5, 0.6, 0.7, -0.5], vec![0.1, 5.0, 0.2, 1.0]).unwrap();
        let part = Partition::new(2).unwrap();
        let med = interval_medians(&samples, &part, &ChebPoly::zero()).unwrap();
        assert_eq!(med[0], (0.5, 0.2));
        assert_eq!(med[1], (-0.5, 1.0));
    }

    #[test]
    fn refine_fixed_point_and_offset() {
        let p = ChebPoly::new(vec![0.2, -0.4, 0.7]);
        let xs = cheb_xs(2000, 3);
        let ys = p.eval_many(&xs);
        let samples = SampleSet::new(xs, ys).unwrap();
        let eps = 0.25;
        let part = Partition::new((PARTITION_K * 3.0 / eps).ceil() as usize).unwrap();
        let same = refine(&samples, &part, &p, 2).unwrap();
        assert!(norm_inf_grid(&same.sub(&p), &GridSpec::default_inf(2)) < 1e-12);
        let shifted = p.add(&ChebPoly::constant(1.0));
        let back = refine(&samples, &part, &shifted, 2).unwrap();
        assert!(norm_inf_grid(&back.sub(&p), &GridSpec::default_inf(2)) <= eps);
    }

    #[test]
    fn approx_with_zero_rounds_is_the_l1_fit() {
        let xs = cheb_xs(500, 9);
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let samples = SampleSet::new(xs, ys).unwrap();
        let cfg = FitConfig {
            max_rounds: Some(0),
            m_override: Some(16),
            ..FitConfig::new(3, 0.25)
        };
        let report = approx(&samples, &cfg).unwrap();
        assert!(report.rounds.is_empty());
        assert_eq!(report.final_poly, report.l1_init_poly);
        let json = report.to_json().unwrap();
        assert!(json.contains("\"basis\": \"chebyshev\""));
    }

    #[test]
    fn approx_exact_on_noiseless_data() {
        let truth = ChebPoly::new(vec![0.1, 0.3, -0.2, 0.05]);
        let xs = cheb_xs(3000, 4);
        let ys = truth.eval_many(&xs);
        let samples = SampleSet::new(xs, ys).unwrap();
        let cfg = FitConfig {
            m_override: Some(64),
            ..FitConfig::new(3, 0.25)
        };
        let a = approx(&samples, &cfg).unwrap();
        for (x, y) in a.final_poly.coeffs().iter().zip(truth.coeffs()) {
            assert!((x - y).abs() < 1e-7);
        }
        let b = approx(&samples, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
