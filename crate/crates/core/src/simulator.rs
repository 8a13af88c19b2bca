//! Seeded instance generator for the random-outlier model.
//!
//! Each sample is an outlier independently with probability exactly `rho`.
//! Inliers are `p(x) + w` with `|w| <= sigma` chosen by an adversary from a
//! fixed menu, and outliers take adversary-chosen values.
//!
//! Randomness comes from ChaCha8 substreams keyed by `(seed, purpose, index)`,
//! so the draws for sample `i` do not depend on how many samples come before
//! or after it.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cheb::{norm_inf, ChebPoly};
use crate::error::{invalid, malformed, Error, Result};
use crate::partition::SampleSet;

const STREAM_X: u64 = 0x5841_4d50_4c45_5f58;
const STREAM_NOISE: u64 = 0x4e4f_4953_455f_5743;
const STREAM_TRUTH: u64 = 0x5452_5554_485f_5043;

/// ChaCha8 generator for sample `index` of the given purpose.
pub fn substream(seed: u64, purpose: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&purpose.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Deterministic child seed, used to derive per-trial seeds from a base seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    substream(base, 0x5452_4941_4c53_4545, index).random()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    /// `x = 2U - 1`.
    Uniform,
    /// `x = cos(pi U)`, density `1 / (pi sqrt(1 - x^2))`.
    Chebyshev,
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Measure::Uniform),
            "chebyshev" => Ok(Measure::Chebyshev),
            _ => Err(invalid(format!("unknown measure {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adversary {
    /// Inliers `w = +sigma`; outliers `p(x) + B`.
    ConstantOffset,
    /// Inliers `w = sigma sgn(T_m(x))`; outliers on the decoy `p - B T_m`.
    SignFlip,
    /// Inliers are the decoy `sigma T_D(lambda x)` clipped to `[-sigma, sigma]`,
    /// where the unclipped decoy peaks at `peak * sigma` at `x = +-1`;
    /// outliers lie on the decoy.
    ChebConfuser,
    /// Inliers uniform in `[-sigma, sigma]`; outliers on a second polynomial.
    TwoPolyMixture,
    /// Explicit per-sample inlier noise and outlier values.
    CustomValues,
}

impl Adversary {
    pub const ALL: [Adversary; 5] = [
        Adversary::ConstantOffset,
        Adversary::SignFlip,
        Adversary::ChebConfuser,
        Adversary::TwoPolyMixture,
        Adversary::CustomValues,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Adversary::ConstantOffset => "constant_offset",
            Adversary::SignFlip => "sign_flip",
            Adversary::ChebConfuser => "cheb_confuser",
            Adversary::TwoPolyMixture => "two_poly_mixture",
            Adversary::CustomValues => "custom_values",
        }
    }
}

impl std::str::FromStr for Adversary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Adversary::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| invalid(format!("unknown adversary {s:?}")))
    }
}

/// Optional knobs; each adversary reads the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdversaryParams {
    /// Outlier magnitude `B`; defaults to `1000 (1 + ||p||_inf)`.
    pub outlier_scale: Option<f64>,
    /// Oscillation order for `sign_flip`; defaults to 16.
    pub oscillation: Option<usize>,
    /// Decoy degree for `cheb_confuser`; defaults to the truth's degree.
    pub decoy_degree: Option<usize>,
    /// Decoy peak in units of sigma for `cheb_confuser`; defaults to 3.
    pub peak: Option<f64>,
    /// Second polynomial for `two_poly_mixture`; defaults to `p + 1`.
    pub decoy: Option<ChebPoly>,
    /// Per-sample inlier noise for `custom_values`.
    pub inlier_noise: Option<Vec<f64>>,
    /// Per-sample outlier values for `custom_values`; defaults to `p(x) + B`.
    pub outlier_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma: f64,
    pub rho: f64,
    pub adversary: Adversary,
    #[serde(default)]
    pub params: AdversaryParams,
}

impl NoiseModel {
    pub fn new(sigma: f64, rho: f64, adversary: Adversary) -> Self {
        NoiseModel {
            sigma,
            rho,
            adversary,
            params: AdversaryParams::default(),
        }
    }

    pub fn with_params(mut self, params: AdversaryParams) -> Self {
        self.params = params;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(invalid(format!(
                "sigma must be finite and nonnegative, got {}",
                self.sigma
            )));
        }
        if !(self.rho >= 0.0 && self.rho < 1.0) {
            return Err(invalid(format!("rho must lie in [0, 1), got {}", self.rho)));
        }
        if let Some(b) = self.params.outlier_scale {
            if !b.is_finite() {
                return Err(invalid("outlier_scale must be finite"));
            }
        }
        if let Some(peak) = self.params.peak {
            if !(peak >= 1.0 && peak.is_finite()) {
                return Err(invalid(format!("peak must be at least 1, got {peak}")));
            }
        }
        if self.adversary == Adversary::CustomValues && self.params.inlier_noise.is_none() {
            return Err(invalid("custom_values needs inlier_noise"));
        }
        Ok(())
    }
}

/// `x` values drawn from `measure`.
pub fn sample_x(measure: Measure, n: usize, seed: u64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let u: f64 = substream(seed, STREAM_X, i as u64).random();
            match measure {
                Measure::Uniform => 2.0 * u - 1.0,
                Measure::Chebyshev => (std::f64::consts::PI * u).cos(),
            }
        })
        .collect()
}

/// `T_D(lambda x)` re-expanded in the Chebyshev basis, with `lambda` chosen so
/// the value at `x = 1` is `peak`.
pub fn dilated_chebyshev(degree: usize, peak: f64) -> ChebPoly {
    if degree == 0 {
        return ChebPoly::constant(1.0);
    }
    let lambda = (peak.acosh() / degree as f64).cosh();
    ChebPoly::basis(degree).compose_affine(lambda, 0.0)
}

fn sgn(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Labels each `x` inlier or outlier and assigns values per the model.
pub fn corrupt(truth: &ChebPoly, xs: &[f64], model: &NoiseModel, seed: u64) -> Result<SampleSet> {
    model.validate()?;
    let n = xs.len();
    let sigma = model.sigma;
    let params = &model.params;
    let big = params
        .outlier_scale
        .unwrap_or_else(|| 1e3 * (1.0 + norm_inf(truth)));
    let osc = ChebPoly::basis(params.oscillation.unwrap_or(16));
    let confuser = dilated_chebyshev(
        params.decoy_degree.unwrap_or_else(|| truth.degree()),
        params.peak.unwrap_or(3.0),
    );
    let decoy = params
        .decoy
        .clone()
        .unwrap_or_else(|| truth.add(&ChebPoly::constant(1.0)));
    if model.adversary == Adversary::CustomValues {
        let w = params.inlier_noise.as_deref().unwrap_or_default();
        if w.len() != n {
            return Err(invalid(format!(
                "{} inlier_noise values for {n} samples",
                w.len()
            )));
        }
        if let Some(&bad) = w.iter().find(|v| !(v.abs() <= sigma)) {
            return Err(Error::NoiseTooLarge { value: bad, sigma });
        }
        if let Some(o) = &params.outlier_values {
            if o.len() != n {
                return Err(invalid(format!(
                    "{} outlier_values for {n} samples",
                    o.len()
                )));
            }
        }
    }

    let mut ys = Vec::with_capacity(n);
    let mut flags = Vec::with_capacity(n);
    for (i, &x) in xs.iter().enumerate() {
        let mut rng = substream(seed, STREAM_NOISE, i as u64);
        let outlier = rng.random::<f64>() < model.rho;
        let px = truth.eval(x);
        let y = match (model.adversary, outlier) {
            (Adversary::ConstantOffset, false) => px + sigma,
            (Adversary::ConstantOffset, true) => px + big,
            (Adversary::SignFlip, false) => px + sigma * sgn(osc.eval(x)),
            (Adversary::SignFlip, true) => px - big * osc.eval(x),
            (Adversary::ChebConfuser, false) => {
                px + (sigma * confuser.eval(x)).clamp(-sigma, sigma)
            }
            (Adversary::ChebConfuser, true) => px + sigma * confuser.eval(x),
            (Adversary::TwoPolyMixture, false) => px + sigma * (2.0 * rng.random::<f64>() - 1.0),
            (Adversary::TwoPolyMixture, true) => decoy.eval(x),
            (Adversary::CustomValues, false) => {
                px + params.inlier_noise.as_ref().map_or(0.0, |w| w[i])
            }
            (Adversary::CustomValues, true) => {
                params.outlier_values.as_ref().map_or(px + big, |o| o[i])
            }
        };
        ys.push(y);
        flags.push(outlier);
    }
    SampleSet::with_flags(xs.to_vec(), ys, flags)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub truth: ChebPoly,
    pub samples: SampleSet,
    pub model: NoiseModel,
    pub measure: Measure,
    pub seed: u64,
}

/// `sample_x` followed by `corrupt`, both keyed by `seed`.
pub fn make_instance(
    truth: &ChebPoly,
    n: usize,
    measure: Measure,
    model: &NoiseModel,
    seed: u64,
) -> Result<Instance> {
    let xs = sample_x(measure, n, seed);
    let samples = corrupt(truth, &xs, model, seed)?;
    Ok(Instance {
        truth: truth.clone(),
        samples,
        model: model.clone(),
        measure,
        seed,
    })
}

/// Random degree-`d` polynomial scaled to grid sup-norm 1. Coefficient `k` is
/// uniform in `[-1, 1] / (k + 1)` before scaling.
pub fn random_truth(d: usize, seed: u64) -> ChebPoly {
    let coeffs: Vec<f64> = (0..=d)
        .map(|k| {
            let u: f64 = substream(seed, STREAM_TRUTH, k as u64).random();
            (2.0 * u - 1.0) / (k + 1) as f64
        })
        .collect();
    let p = ChebPoly::new(coeffs);
    let s = norm_inf(&p);
    if s > 0.0 {
        p.scale(1.0 / s)
    } else {
        ChebPoly::constant(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Sidecar {
    truth: ChebPoly,
    model: NoiseModel,
    measure: Measure,
    seed: u64,
    n: usize,
}

impl Instance {
    fn paths(prefix: &Path) -> (PathBuf, PathBuf) {
        let base = prefix.as_os_str().to_owned();
        let mut csv = base.clone();
        csv.push(".csv");
        let mut json = base;
        json.push(".json");
        (csv.into(), json.into())
    }

    /// Writes `<prefix>.csv` (samples with flags) and `<prefix>.json` (truth,
    /// model, measure, seed). Returns both paths.
    pub fn write_files(&self, prefix: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
        let (csv, json) = Self::paths(prefix.as_ref());
        self.samples.write_csv(&csv)?;
        let sidecar = Sidecar {
            truth: self.truth.clone(),
            model: self.model.clone(),
            measure: self.measure,
            seed: self.seed,
            n: self.samples.len(),
        };
        std::fs::write(&json, serde_json::to_string_pretty(&sidecar)? + "\n")?;
        Ok((csv, json))
    }

    pub fn read_files(prefix: impl AsRef<Path>) -> Result<Instance> {
        let (csv, json) = Self::paths(prefix.as_ref());
        let samples = SampleSet::read_csv(csv)?;
        let sidecar: Sidecar = serde_json::from_str(&std::fs::read_to_string(json)?)?;
        if sidecar.n != samples.len() {
            return Err(malformed(format!(
                "sidecar says {} samples, csv has {}",
                sidecar.n,
                samples.len()
            )));
        }
        Ok(Instance {
            truth: sidecar.truth,
            samples,
            model: sidecar.model,
            measure: sidecar.measure,
            seed: sidecar.seed,
        })
    }
}
