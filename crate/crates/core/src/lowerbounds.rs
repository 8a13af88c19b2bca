//! Constructions that limit what any estimator can achieve, with checkers.
//!
//! Each gadget is a plain function returning polynomials and numbers, plus a
//! `*Report` type carrying the measured quantities and a verdict so the CLI
//! can dump it as JSON.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cheb::{ChebPoly, GridSpec};
use crate::error::{invalid, Error, Result};
use crate::regression::minimax_fit;
use crate::simulator::substream;

/// `q` with `x q(x) = p(x)`, or `None` if `p(0) != 0` beyond `tol`.
///
/// Solves `x T_k = (T_{k+1} + T_{k-1}) / 2` backward from the top coefficient.
pub fn divide_by_x(p: &ChebPoly, tol: f64) -> Option<ChebPoly> {
    let t = p.trimmed();
    let t = t.coeffs();
    let n = t.len() - 1;
    if n == 0 {
        return (t[0].abs() <= tol).then(ChebPoly::zero);
    }
    let deg = n - 1;
    let mut q = vec![0.0; deg + 1];
    let at = |v: &Vec<f64>, k: usize| v.get(k).copied().unwrap_or(0.0);
    for k in (1..=n).rev() {
        let qk = k - 1;
        q[qk] = if qk == 0 {
            t[1] - at(&q, 2) / 2.0
        } else {
            2.0 * t[k] - at(&q, k + 1)
        };
    }
    let remainder = t[0] - at(&q, 1) / 2.0;
    (remainder.abs() <= tol * (1.0 + t.iter().fold(0.0f64, |m, c| m.max(c.abs()))))
        .then(|| ChebPoly::new(q))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSpec {
    pub d: usize,
    pub b: f64,
}

/// The peaked polynomial `p_b` of degree at most `d`.
///
/// For even `e`, `p_0 = (-1)^{e/2} T_{e+1}(x) / ((e + 1) x)`, where `e = d` for
/// even `d` and `e = d - 1` otherwise. For `b = 0` this is `p_0` itself, with
/// `|p_0(x)| <= 1 / ((e + 1) |x|)`; otherwise `p_b(x) = p_0((x - b) / 2)`.
/// `p_b(b) = 1`, `|p_b| <= 1` and `|p_b(x)| <= 2 / ((e + 1) |x - b|)` on `[-1, 1]`.
pub fn indicator_poly(spec: IndicatorSpec) -> Result<ChebPoly> {
    if spec.d == 0 {
        return Err(invalid("indicator degree must be at least 1"));
    }
    if !(spec.b.abs() <= 1.0) {
        return Err(Error::OutOfDomain(spec.b));
    }
    let e = spec.d - spec.d % 2;
    let sign = if (e / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let q = divide_by_x(&ChebPoly::basis(e + 1), 1e-12)
        .ok_or_else(|| Error::Internal("T_{e+1} not divisible by x".into()))?;
    let p0 = q.scale(sign / (e + 1) as f64);
    if spec.b == 0.0 {
        return Ok(p0);
    }
    Ok(p0.compose_affine(0.5, -0.5 * spec.b))
}

/// Parameters of the `f_S = sum_{j in S} p_{b_j}^2` family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub d: usize,
    pub alpha: f64,
    /// Indicator degree `floor(d / 2)`, so `deg f_S <= d`.
    pub ind_deg: usize,
    /// `floor(ind_deg sqrt(alpha) / 2)`.
    pub m: usize,
    /// `b_j = -1 + 2 j / m` for `j = 1..=m`.
    pub centers: Vec<f64>,
}

impl FamilySpec {
    pub fn new(d: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        let ind_deg = d / 2;
        let m = (ind_deg as f64 * alpha.sqrt() / 2.0).floor() as usize;
        if m == 0 {
            return Err(invalid(format!(
                "family is empty: floor({ind_deg} * sqrt({alpha}) / 2) = 0"
            )));
        }
        let centers = (1..=m).map(|j| -1.0 + 2.0 * j as f64 / m as f64).collect();
        Ok(FamilySpec {
            d,
            alpha,
            ind_deg,
            m,
            centers,
        })
    }

    /// `alpha = 1 / (3 C)`.
    pub fn for_approximation_factor(d: usize, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(invalid(format!(
                "approximation factor must be positive, got {c}"
            )));
        }
        Self::new(d, 1.0 / (3.0 * c))
    }

    /// 1-based index of the center nearest to `x`; ties go to the smaller index.
    pub fn k_x(&self, x: f64) -> usize {
        let mut best = 1;
        for (j, &b) in self.centers.iter().enumerate() {
            if (b - x).abs() < (self.centers[best - 1] - x).abs() {
                best = j + 1;
            }
        }
        best
    }

    pub fn indicators(&self) -> Result<Vec<ChebPoly>> {
        self.centers
            .iter()
            .map(|&b| indicator_poly(IndicatorSpec { d: self.ind_deg, b }))
            .collect()
    }

    pub fn all(&self) -> Vec<usize> {
        (1..=self.m).collect()
    }

    /// Uniformly random subset of `1..=m`.
    pub fn random_subset(&self, rng: &mut impl Rng) -> Vec<usize> {
        (1..=self.m).filter(|_| rng.random::<bool>()).collect()
    }
}

/// `f_S = sum_{j in S} p_{b_j}^2` for a set of 1-based indices.
pub fn fs_family(spec: &FamilySpec, subset: &[usize]) -> Result<ChebPoly> {
    let mut seen = vec![false; spec.m];
    let mut out = ChebPoly::zero();
    for &j in subset {
        if j == 0 || j > spec.m {
            return Err(invalid(format!("index {j} outside 1..={}", spec.m)));
        }
        if std::mem::replace(&mut seen[j - 1], true) {
            return Err(invalid(format!("index {j} repeated")));
        }
        let p = indicator_poly(IndicatorSpec {
            d: spec.ind_deg,
            b: spec.centers[j - 1],
        })?;
        out = out.add(&p.mul(&p));
    }
    Ok(out)
}

/// Measured margins of `f_{k_x cap S} <= f_S <= f_{k_x cap S} + alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub subset: Vec<usize>,
    pub degree: usize,
    /// Largest `f_{k_x cap S} - f_S`; must be `<= 0`.
    pub lower_excess: f64,
    /// Largest `f_S - f_{k_x cap S}`; must be `< alpha`.
    pub tail_max: f64,
    pub min_value: f64,
    pub holds: bool,
}

pub fn check_sandwich(
    spec: &FamilySpec,
    subset: &[usize],
    grid: &GridSpec,
) -> Result<SandwichReport> {
    let ind = spec.indicators()?;
    let f = fs_family(spec, subset)?;
    let mut member = vec![false; spec.m];
    for &j in subset {
        member[j - 1] = true;
    }
    let (mut lower_excess, mut tail_max, mut min_value) =
        (f64::NEG_INFINITY, 0.0f64, f64::INFINITY);
    for x in grid.nodes() {
        let k = spec.k_x(x);
        let fx = f.eval(x);
        let near = if member[k - 1] {
            ind[k - 1].eval(x).powi(2)
        } else {
            0.0
        };
        lower_excess = lower_excess.max(near - fx);
        tail_max = tail_max.max(fx - near);
        min_value = min_value.min(fx);
    }
    Ok(SandwichReport {
        subset: subset.to_vec(),
        degree: f.degree(),
        lower_excess,
        tail_max,
        min_value,
        holds: lower_excess <= 1e-12 && tail_max < spec.alpha && f.degree() <= spec.d,
    })
}

/// Two degree-`d` polynomials that agree within 1 on most of `[-1, 1]` but
/// differ by more than `2 C` at `x = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformGap {
    pub d: usize,
    pub c: f64,
    /// `4 sqrt(2 (C - 1))`.
    pub alpha: f64,
    /// `T_d(x + alpha / d^2)`.
    pub f: ChebPoly,
    pub g: ChebPoly,
    /// `[-1, 1 - alpha / d^2]`, where `|f - g| <= 1`.
    pub safe_region: (f64, f64),
    pub f_at_one: f64,
    pub max_in_safe_region: f64,
    pub holds: bool,
}

pub fn uniform_lb_instance(d: usize, c: f64) -> Result<UniformGap> {
    if d < 4 {
        return Err(invalid(format!("degree must be at least 4, got {d}")));
    }
    if !(c > 1.0 && c.is_finite()) {
        return Err(invalid(format!(
            "approximation factor must exceed 1, got {c}"
        )));
    }
    let alpha = 4.0 * (2.0 * (c - 1.0)).sqrt();
    let shift = alpha / (d * d) as f64;
    let f = ChebPoly::basis(d).compose_affine(1.0, shift);
    let hi = 1.0 - shift;
    let max_in_safe_region = (0..=4000)
        .map(|i| -1.0 + (hi + 1.0) * i as f64 / 4000.0)
        .fold(0.0f64, |m, x| m.max(f.eval(x).abs()));
    let f_at_one = f.eval(1.0);
    Ok(UniformGap {
        d,
        c,
        alpha,
        f,
        g: ChebPoly::zero(),
        safe_region: (-1.0, hi),
        f_at_one,
        max_in_safe_region,
        holds: f_at_one.abs() > 2.0 * c && max_in_safe_region <= 1.0 + 1e-9,
    })
}

/// `v = 1 / (3 + 2 sqrt 2)`.
pub fn quad_triple_v() -> f64 {
    1.0 / (3.0 + 2.0 * std::f64::consts::SQRT_2)
}

/// `x + 1`, `1 - x` and `((3 + 2 sqrt 2) / 2) (1 - x^2)`.
pub fn quad_triple() -> [ChebPoly; 3] {
    let k = (3.0 + 2.0 * std::f64::consts::SQRT_2) / 2.0;
    [
        ChebPoly::from_monomial(&[1.0, 1.0]),
        ChebPoly::from_monomial(&[1.0, -1.0]),
        ChebPoly::from_monomial(&[k, 0.0, -k]),
    ]
}

/// Discrete Chebyshev center: the degree-`d` `q` minimizing
/// `max_{i, g} |f_i(x_g) - q(x_g)|` over grid nodes. Returns `(q, radius)`;
/// the radius never exceeds the continuous one.
pub fn chebyshev_center(
    funcs: &[&dyn Fn(f64) -> f64],
    d: usize,
    grid: &GridSpec,
) -> Result<(ChebPoly, f64)> {
    if funcs.is_empty() {
        return Err(invalid("need at least one function"));
    }
    let nodes = grid.nodes();
    let points: Vec<(f64, f64)> = funcs
        .iter()
        .flat_map(|f| nodes.iter().map(move |&x| (x, f(x))))
        .collect();
    minimax_fit(&points, d)
}

/// [`chebyshev_center`] of polynomials; requires `M >= 16 (d + 1)`.
pub fn minimax_center(polys: &[ChebPoly], d: usize, grid: &GridSpec) -> Result<(ChebPoly, f64)> {
    if grid.m < 16 * (d + 1) {
        return Err(invalid(format!(
            "grid of {} nodes is too coarse for degree {d}",
            grid.m
        )));
    }
    let funcs: Vec<Box<dyn Fn(f64) -> f64 + '_>> = polys
        .iter()
        .map(|p| Box::new(move |x| p.eval(x)) as Box<dyn Fn(f64) -> f64>)
        .collect();
    let refs: Vec<&dyn Fn(f64) -> f64> = funcs.iter().map(|f| f.as_ref()).collect();
    chebyshev_center(&refs, d, grid)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadTripleReport {
    pub polys: Vec<ChebPoly>,
    pub v: f64,
    pub grid_m: usize,
    pub pairwise_linf: Vec<f64>,
    pub center: ChebPoly,
    pub radius: f64,
    pub exceeds_1_09: bool,
}

pub fn quad_triple_report(grid_m: usize) -> Result<QuadTripleReport> {
    let polys = quad_triple();
    let grid = GridSpec::chebyshev(grid_m);
    let nodes = grid.nodes();
    let dist = |a: &ChebPoly, b: &ChebPoly| {
        nodes
            .iter()
            .fold(0.0f64, |m, &x| m.max((a.eval(x) - b.eval(x)).abs()))
    };
    let pairwise_linf = vec![
        dist(&polys[0], &polys[1]),
        dist(&polys[0], &polys[2]),
        dist(&polys[1], &polys[2]),
    ];
    let (center, radius) = minimax_center(&polys, 2, &grid)?;
    Ok(QuadTripleReport {
        polys: polys.to_vec(),
        v: quad_triple_v(),
        grid_m,
        pairwise_linf,
        center,
        radius,
        exceeds_1_09: radius > 1.09,
    })
}

/// `(sigma / alpha) max(0, x - (1 - 2 alpha))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ramp {
    pub knee: f64,
    pub slope: f64,
}

impl Ramp {
    pub fn eval(&self, x: f64) -> f64 {
        self.slope * (x - self.knee).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionGap {
    pub alpha: f64,
    pub sigma: f64,
    /// The constant `sigma`.
    pub p: ChebPoly,
    pub f: Ramp,
    /// `(2 - alpha) sigma`.
    pub predicted_gap: f64,
}

pub fn linf_projection_instance(alpha: f64, sigma: f64) -> Result<ProjectionGap> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(invalid(format!("alpha must lie in (0, 1/2), got {alpha}")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid(format!("sigma must be positive, got {sigma}")));
    }
    Ok(ProjectionGap {
        alpha,
        sigma,
        p: ChebPoly::constant(sigma),
        f: Ramp {
            knee: 1.0 - 2.0 * alpha,
            slope: sigma / alpha,
        },
        predicted_gap: (2.0 - alpha) * sigma,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionGapReport {
    pub gadget: ProjectionGap,
    pub grid_m: usize,
    /// Largest `|p - f|` on the grid; at most `sigma`.
    pub p_to_f: f64,
    pub projection: ChebPoly,
    pub projection_error: f64,
    /// `||p - q||_inf`, attained at an endpoint since `p - q` is linear.
    pub measured_gap: f64,
    pub holds: bool,
}

/// Projects the ramp onto lines on a grid and measures the distance to `p`.
pub fn projection_gap_report(alpha: f64, sigma: f64, grid_m: usize) -> Result<ProjectionGapReport> {
    let gadget = linf_projection_instance(alpha, sigma)?;
    let grid = GridSpec::chebyshev(grid_m);
    let ramp = gadget.f;
    let f = move |x: f64| ramp.eval(x);
    let (q, err) = chebyshev_center(&[&f], 1, &grid)?;
    let p_to_f = grid
        .nodes()
        .iter()
        .fold(0.0f64, |m, &x| m.max((gadget.p.eval(x) - f(x)).abs()));
    let measured_gap = [-1.0, 1.0]
        .iter()
        .fold(0.0f64, |m, &x| m.max((gadget.p.eval(x) - q.eval(x)).abs()));
    Ok(ProjectionGapReport {
        holds: (measured_gap - gadget.predicted_gap).abs() <= 1e-3 && p_to_f <= sigma + 1e-12,
        gadget,
        grid_m,
        p_to_f,
        projection: q,
        projection_error: err,
        measured_gap,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationFamily {
    pub d: usize,
    /// `1 / (2 d)`.
    pub a: f64,
    /// `1 / (4 d)`.
    pub c: f64,
    pub t_max: i64,
    /// `(t, member)`, four per `t` in `-t_max..=t_max`.
    pub members: Vec<(i64, ChebPoly)>,
}

impl OscillationFamily {
    /// `1 - 1 / (64 d^3)`.
    pub fn distance_bound(&self) -> f64 {
        1.0 - 1.0 / (64.0 * (self.d as f64).powi(3))
    }
}

/// `S_t = {1 - A(x - s)^2, A(x - s - c)^2, A(x - s + c)^2, A(x - s)^2 + A c^2 / 2}`
/// with `s = 2 c t`, for `|t| <= ceil(1.5 d)`.
pub fn oscillation_family(d: usize) -> Result<OscillationFamily> {
    if d < 2 {
        return Err(invalid(format!("degree must be at least 2, got {d}")));
    }
    let a = 1.0 / (2.0 * d as f64);
    let c = 1.0 / (4.0 * d as f64);
    let t_max = (1.5 * d as f64).ceil() as i64;
    // A (x - s)^2 + k in monomial form.
    let bowl = |s: f64, k: f64| ChebPoly::from_monomial(&[a * s * s + k, -2.0 * a * s, a]);
    let mut members = Vec::with_capacity(4 * (2 * t_max as usize + 1));
    for t in -t_max..=t_max {
        let s = 2.0 * c * t as f64;
        members.push((t, bowl(s, 0.0).scale(-1.0).add(&ChebPoly::constant(1.0))));
        members.push((t, bowl(s + c, 0.0)));
        members.push((t, bowl(s - c, 0.0)));
        members.push((t, bowl(s, a * c * c / 2.0)));
    }
    Ok(OscillationFamily {
        d,
        a,
        c,
        t_max,
        members,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    pub d: usize,
    pub members: usize,
    pub grid_m: usize,
    pub bound: f64,
    pub max_within_group: f64,
    pub max_across_groups: f64,
    pub max_degree: usize,
    pub holds: bool,
}

pub fn oscillation_report(d: usize, grid_m: usize) -> Result<OscillationReport> {
    let fam = oscillation_family(d)?;
    let nodes = GridSpec::chebyshev(grid_m).nodes();
    let values: Vec<Vec<f64>> = fam
        .members
        .iter()
        .map(|(_, p)| p.eval_many(&nodes))
        .collect();
    let (mut within, mut across) = (0.0f64, 0.0f64);
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let dist = values[i]
                .iter()
                .zip(&values[j])
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            if fam.members[i].0 == fam.members[j].0 {
                within = within.max(dist);
            } else {
                across = across.max(dist);
            }
        }
    }
    let max_degree = fam
        .members
        .iter()
        .map(|(_, p)| p.degree())
        .max()
        .unwrap_or(0);
    let bound = fam.distance_bound();
    Ok(OscillationReport {
        d,
        members: fam.members.len(),
        grid_m,
        bound,
        max_within_group: within,
        max_across_groups: across,
        max_degree,
        holds: within.max(across) <= bound + 1e-9 && max_degree <= 2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorReport {
    pub spec: IndicatorSpec,
    pub poly: ChebPoly,
    pub value_at_b: f64,
    /// `max(|p_b|)` over the grid nodes and `b`.
    pub sup_norm: f64,
    /// Largest `|p_b(x)| d |x - b| / 2` over grid nodes away from `b`; at most 1.
    pub decay_ratio: f64,
    pub holds: bool,
}

pub fn indicator_report(spec: IndicatorSpec, grid_m: usize) -> Result<IndicatorReport> {
    let poly = indicator_poly(spec)?;
    let value_at_b = poly.eval(spec.b);
    let mut sup_norm = value_at_b.abs();
    let mut decay_ratio = 0.0f64;
    for x in GridSpec::chebyshev(grid_m).nodes() {
        let v = poly.eval(x).abs();
        sup_norm = sup_norm.max(v);
        if (x - spec.b).abs() > 1e-9 {
            decay_ratio = decay_ratio.max(v * spec.d as f64 * (x - spec.b).abs() / 2.0);
        }
    }
    Ok(IndicatorReport {
        holds: (value_at_b - 1.0).abs() <= 1e-9
            && (sup_norm - 1.0).abs() <= 1e-6
            && decay_ratio <= 1.0 + 1e-9,
        spec,
        poly,
        value_at_b,
        sup_norm,
        decay_ratio,
    })
}

/// Output of [`listdecode_adversary`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ListDecodeDraw {
    pub ys: Vec<f64>,
    /// Whether each sample is an outlier relative to `f_S`.
    pub flags: Vec<bool>,
}

/// Adversary for outlier rate 1/2 that hides which `f_S` is the truth.
///
/// Every sample gets its own fair coin, keyed by `(seed, index)`, choosing
/// between `f_{}(x)` and `f_{[m]}(x)`. For any `S` one of these is within
/// `alpha` of `f_S(x)`; the sample is an inlier exactly when the coin picked
/// that one. So the emitted values depend only on `xs` and `seed`, while each
/// sample is an outlier with probability 1/2 independently.
pub fn listdecode_adversary(
    spec: &FamilySpec,
    subset: &[usize],
    xs: &[f64],
    seed: u64,
) -> Result<ListDecodeDraw> {
    let truth = fs_family(spec, subset)?;
    let full = fs_family(spec, &spec.all())?;
    let empty = ChebPoly::zero();
    let mut ys = Vec::with_capacity(xs.len());
    let mut flags = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let take_empty: bool = substream(seed, 0x4c49_5354_4445_434f, i as u64).random();
        let fx = truth.eval(x);
        let (lo, hi) = (empty.eval(x), full.eval(x));
        let (near_lo, near_hi) = ((fx - lo).abs() <= spec.alpha, (hi - fx).abs() <= spec.alpha);
        if !near_lo && !near_hi {
            return Err(Error::Internal(format!(
                "f_S({x}) = {fx} is not within {} of either branch",
                spec.alpha
            )));
        }
        let (y, near) = if take_empty {
            (lo, near_lo)
        } else {
            (hi, near_hi)
        };
        ys.push(y);
        flags.push(!near);
    }
    Ok(ListDecodeDraw { ys, flags })
}

/// Fraction of `trials` runs in which `n` uniform draws all land in the safe
/// region of `gap`.
pub fn safe_region_rate(gap: &UniformGap, n: usize, trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..trials)
        .filter(|_| (0..n).all(|_| rng.random_range(-1.0..=1.0) <= gap.safe_region.1))
        .count();
    hits as f64 / trials as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divide_by_x_round_trips() {
        let q = ChebPoly::new(vec![0.3, -1.0, 0.5, 2.0]);
        let back = divide_by_x(&q.mul_x(), 1e-12).unwrap();
        for (a, b) in back.coeffs().iter().zip(q.coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(divide_by_x(&ChebPoly::constant(1.0), 1e-12).is_none());
        assert!(divide_by_x(&ChebPoly::basis(2), 1e-12).is_none());
    }

    #[test]
    fn degree_two_indicator() {
        let p = indicator_poly(IndicatorSpec { d: 2, b: 0.0 }).unwrap();
        let mono = p.to_monomial();
        assert!((mono[0] - 1.0).abs() < 1e-12);
        assert!(mono[1].abs() < 1e-12);
        assert!((mono[2] + 4.0 / 3.0).abs() < 1e-12);
        assert!(indicator_poly(IndicatorSpec { d: 0, b: 0.0 }).is_err());
    }

    #[test]
    fn indicators_peak_and_decay() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..20 {
            let spec = IndicatorSpec {
                d: rng.random_range(1..=40),
                b: rng.random_range(-1.0..=1.0),
            };
            let r = indicator_report(spec, 4096).unwrap();
            assert!(r.holds, "{spec:?}: {r:?}");
            assert!(r.poly.degree() <= spec.d);
        }
    }

    #[test]
    fn sharper_decay_at_origin() {
        for d in [2, 10, 40] {
            let p = indicator_poly(IndicatorSpec { d, b: 0.0 }).unwrap();
            for x in GridSpec::chebyshev(2000).nodes() {
                if x != 0.0 {
                    assert!(p.eval(x).abs() <= 1.0 / ((d + 1) as f64 * x.abs()) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn family_basics() {
        let spec = FamilySpec::new(40, 1.0 / 3.0).unwrap();
        assert_eq!((spec.ind_deg, spec.m), (20, 5));
        assert!(fs_family(&spec, &[]).unwrap().is_zero());
        for j in 1..=spec.m {
            let f = fs_family(&spec, &[j]).unwrap();
            assert!((f.eval(spec.centers[j - 1]) - 1.0).abs() < 1e-12);
        }
        assert!(fs_family(&spec, &[0]).is_err());
        assert!(fs_family(&spec, &[2, 2]).is_err());
        assert!(FamilySpec::new(10, 1.0 / 12.0).is_err());
        assert_eq!(spec.k_x(-1.0), 1);
        assert_eq!(spec.k_x(1.0), 5);
    }

    #[test]
    fn sandwich_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (d, alpha) in [(20, 1.0 / 3.0), (40, 1.0 / 3.0), (40, 1.0 / 12.0)] {
            let spec = FamilySpec::new(d, alpha).unwrap();
            for _ in 0..5 {
                let s = spec.random_subset(&mut rng);
                let r = check_sandwich(&spec, &s, &GridSpec::chebyshev(2000)).unwrap();
                assert!(r.holds, "{r:?}");
                assert!(r.min_value >= -1e-12);
            }
        }
    }

    #[test]
    fn uniform_gap_d4() {
        let g = uniform_lb_instance(4, 1.5).unwrap();
        assert!(g.f_at_one > 3.0);
        assert!(g.holds);
        assert!(uniform_lb_instance(3, 1.5).is_err());
        assert!(uniform_lb_instance(8, 1.0).is_err());
    }

    #[test]
    fn quad_triple_distances() {
        let [p1, p2, p3] = quad_triple();
        let v = quad_triple_v();
        assert!((v - 0.171573).abs() < 1e-6);
        assert!(((p1.eval(1.0) - p2.eval(1.0)).abs() - 2.0).abs() < 1e-12);
        assert!(((p1.eval(-1.0) - p2.eval(-1.0)).abs() - 2.0).abs() < 1e-12);
        assert!(((p1.eval(-v) - p3.eval(-v)).abs() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trivial_centers() {
        let p = ChebPoly::new(vec![0.1, 0.2, 0.3]);
        let (q, r) = minimax_center(std::slice::from_ref(&p), 2, &GridSpec::chebyshev(64)).unwrap();
        assert!(r < 1e-12);
        assert!((q.eval(0.37) - p.eval(0.37)).abs() < 1e-10);
        let (q, r) = minimax_center(
            &[ChebPoly::zero(), ChebPoly::constant(2.0)],
            0,
            &GridSpec::chebyshev(64),
        )
        .unwrap();
        assert!((r - 1.0).abs() < 1e-12 && (q.eval(0.0) - 1.0).abs() < 1e-12);
        assert!(minimax_center(&[p], 2, &GridSpec::chebyshev(40)).is_err());
    }

    #[test]
    fn projection_gap() {
        let r = projection_gap_report(0.25, 1.0, 4096).unwrap();
        assert_eq!(r.gadget.predicted_gap, 1.75);
        assert!(r.holds, "{r:?}");
        // Equalized line: q(x) = sigma x + alpha sigma.
        assert!((r.projection.eval(0.0) - 0.25).abs() < 1e-3);
        assert!((r.projection.eval(1.0) - 1.25).abs() < 1e-3);
        assert!(linf_projection_instance(0.5, 1.0).is_err());
    }

    #[test]
    fn oscillation_small() {
        let fam = oscillation_family(2).unwrap();
        assert_eq!(fam.members.len(), 28);
        let r = oscillation_report(2, 2048).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(oscillation_family(1).is_err());
    }

    #[test]
    fn listdecode_is_independent_of_s() {
        let spec = FamilySpec::for_approximation_factor(40, 1.0).unwrap();
        let xs: Vec<f64> = (0..300).map(|i| -1.0 + 2.0 * i as f64 / 299.0).collect();
        let empty = ChebPoly::zero();
        let full = fs_family(&spec, &spec.all()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut previous: Option<Vec<f64>> = None;
        for _ in 0..4 {
            let s = spec.random_subset(&mut rng);
            let f = fs_family(&spec, &s).unwrap();
            let draw = listdecode_adversary(&spec, &s, &xs, 99).unwrap();
            for ((&x, &y), &out) in xs.iter().zip(&draw.ys).zip(&draw.flags) {
                assert!(y == empty.eval(x) || y == full.eval(x));
                if !out {
                    assert!((y - f.eval(x)).abs() <= spec.alpha);
                }
            }
            if let Some(prev) = &previous {
                assert_eq!(prev, &draw.ys);
            }
            previous = Some(draw.ys);
        }
    }
}
