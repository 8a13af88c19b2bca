//! The size-`m` Chebyshev partition of `[-1, 1]`, sample bucketing and the
//! per-interval statistics the estimators are analysed with.
//!
//! Intervals are numbered `1..=m` from right to left:
//! `I_j = [cos(pi j / m), cos(pi (j - 1) / m)]`. Slices returned by this module
//! are indexed by `j - 1`; error values and reports use the 1-based `j`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cheb::{ChebPoly, DOMAIN_SLACK};
use crate::error::{invalid, malformed, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    m: usize,
    /// `cos(pi j / m)` for `j = 0..=m`, descending.
    boundaries: Vec<f64>,
    /// `|I_j|` at index `j - 1`.
    lengths: Vec<f64>,
}

/// Builds the size-`m` Chebyshev partition.
pub fn build_partition(m: usize) -> Result<Partition> {
    if m == 0 {
        return Err(invalid("partition size m must be at least 1"));
    }
    let boundaries: Vec<f64> = (0..=m)
        .map(|j| {
            if j == 0 {
                1.0
            } else if j == m {
                -1.0
            } else if 2 * j == m {
                0.0
            } else {
                (std::f64::consts::PI * j as f64 / m as f64).cos()
            }
        })
        .collect();
    let lengths = boundaries.windows(2).map(|w| w[0] - w[1]).collect();
    Ok(Partition {
        m,
        boundaries,
        lengths,
    })
}

impl Partition {
    pub fn new(m: usize) -> Result<Self> {
        build_partition(m)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// `(lo, hi)` of `I_j`, 1-based.
    pub fn interval(&self, j: usize) -> (f64, f64) {
        (self.boundaries[j], self.boundaries[j - 1])
    }

    pub fn length(&self, j: usize) -> f64 {
        self.lengths[j - 1]
    }

    pub fn midpoint(&self, j: usize) -> f64 {
        let (lo, hi) = self.interval(j);
        0.5 * (lo + hi)
    }

    pub fn midpoints(&self) -> Vec<f64> {
        (1..=self.m).map(|j| self.midpoint(j)).collect()
    }

    /// Index `j` (1-based) of the interval containing `x`.
    ///
    /// A point on a shared boundary belongs to the larger-`x` interval, i.e.
    /// the smaller `j`. The result is nonincreasing in `x`.
    pub fn locate(&self, x: f64) -> Result<usize> {
        if !(x.abs() <= 1.0 + DOMAIN_SLACK) {
            return Err(Error::OutOfDomain(x));
        }
        // smallest j >= 1 with boundaries[j] <= x
        let j = self.boundaries[1..].partition_point(|&b| b > x) + 1;
        Ok(j.min(self.m))
    }

    /// Sample indices per interval; entry `j - 1` is `S_j`.
    pub fn assign(&self, samples: &SampleSet) -> Result<Vec<Vec<usize>>> {
        let mut buckets = vec![Vec::new(); self.m];
        for (i, &x) in samples.xs().iter().enumerate() {
            buckets[self.locate(x)? - 1].push(i);
        }
        Ok(buckets)
    }

    /// Buckets, failing on the first empty interval.
    pub fn assign_nonempty(&self, samples: &SampleSet) -> Result<Vec<Vec<usize>>> {
        let buckets = self.assign(samples)?;
        if let Some(j) = buckets.iter().position(Vec::is_empty) {
            return Err(Error::EmptyInterval(j + 1));
        }
        Ok(buckets)
    }
}

/// Free-function form of [`Partition::locate`].
pub fn locate(part: &Partition, x: f64) -> Result<usize> {
    part.locate(x)
}

/// Free-function form of [`Partition::assign`].
pub fn assign(part: &Partition, samples: &SampleSet) -> Result<Vec<Vec<usize>>> {
    part.assign(samples)
}

/// Observations `(x_i, y_i)` with optional ground-truth outlier flags.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SampleSet {
    xs: Vec<f64>,
    ys: Vec<f64>,
    flags: Option<Vec<bool>>,
}

impl SampleSet {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        Self::build(xs, ys, None)
    }

    pub fn with_flags(xs: Vec<f64>, ys: Vec<f64>, flags: Vec<bool>) -> Result<Self> {
        Self::build(xs, ys, Some(flags))
    }

    fn build(xs: Vec<f64>, ys: Vec<f64>, flags: Option<Vec<bool>>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(invalid(format!(
                "{} x values but {} y values",
                xs.len(),
                ys.len()
            )));
        }
        if let Some(f) = &flags {
            if f.len() != xs.len() {
                return Err(invalid(format!(
                    "{} flags for {} samples",
                    f.len(),
                    xs.len()
                )));
            }
        }
        if let Some(&x) = xs.iter().find(|x| !x.is_finite()) {
            return Err(Error::OutOfDomain(x));
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(invalid("non-finite y value"));
        }
        Ok(SampleSet { xs, ys, flags })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn flags(&self) -> Option<&[bool]> {
        self.flags.as_deref()
    }

    /// Drops the ground-truth flags, as an estimator would see the data.
    pub fn without_flags(&self) -> SampleSet {
        SampleSet {
            xs: self.xs.clone(),
            ys: self.ys.clone(),
            flags: None,
        }
    }

    /// Reads the `x,y[,outlier]` CSV layout.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn from_csv_reader(reader: impl std::io::Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let (xi, yi) = match (col("x"), col("y")) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(malformed("CSV header must contain x and y columns")),
        };
        let oi = col("outlier");
        let (mut xs, mut ys, mut flags) = (Vec::new(), Vec::new(), Vec::new());
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| malformed(format!("row {}: missing column", line + 1)))?
                    .parse::<f64>()
                    .map_err(|e| malformed(format!("row {}: {e}", line + 1)))
            };
            xs.push(field(xi)?);
            ys.push(field(yi)?);
            if let Some(oi) = oi {
                match rec.get(oi) {
                    Some("0") => flags.push(false),
                    Some("1") => flags.push(true),
                    other => {
                        return Err(malformed(format!(
                            "row {}: outlier must be 0 or 1, got {other:?}",
                            line + 1
                        )))
                    }
                }
            }
        }
        Self::build(xs, ys, oi.map(|_| flags)).map_err(|e| match e {
            Error::InvalidArgument(msg) => Error::MalformedInput(msg),
            other => other,
        })
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.to_csv_writer(file)
    }

    pub fn to_csv_writer(&self, writer: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        match &self.flags {
            Some(flags) => {
                w.write_record(["x", "y", "outlier"])?;
                for ((x, y), f) in self.xs.iter().zip(&self.ys).zip(flags) {
                    w.write_record([fmt_f64(*x), fmt_f64(*y), u8::from(*f).to_string()])?;
                }
            }
            None => {
                w.write_record(["x", "y"])?;
                for (x, y) in self.xs.iter().zip(&self.ys) {
                    w.write_record([fmt_f64(*x), fmt_f64(*y)])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest representation that parses back to the same bits.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalCount {
    pub count: usize,
    pub outlier_count: usize,
    /// `outlier_count / count`, zero for an empty interval.
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodnessReport {
    pub alpha: f64,
    pub per_interval: Vec<IntervalCount>,
    pub is_good: bool,
    /// 1-based indices of intervals without samples.
    pub empty_intervals: Vec<usize>,
}

impl GoodnessReport {
    /// 1-based indices of nonempty intervals whose outlier fraction is not
    /// strictly below `alpha`.
    pub fn bad_intervals(&self) -> Vec<usize> {
        self.per_interval
            .iter()
            .enumerate()
            .filter(|(_, c)| c.count > 0 && c.fraction >= self.alpha)
            .map(|(j, _)| j + 1)
            .collect()
    }
}

/// Whether fewer than an `alpha` fraction of each interval's samples are
/// outliers. Empty intervals make the set not good.
pub fn goodness(part: &Partition, samples: &SampleSet, alpha: f64) -> Result<GoodnessReport> {
    check_fraction("alpha", alpha)?;
    let flags = samples.flags().ok_or(Error::MissingFlags)?;
    let buckets = part.assign(samples)?;
    let per_interval: Vec<IntervalCount> = buckets
        .iter()
        .map(|b| {
            let outliers = b.iter().filter(|&&i| flags[i]).count();
            IntervalCount {
                count: b.len(),
                outlier_count: outliers,
                fraction: if b.is_empty() {
                    0.0
                } else {
                    outliers as f64 / b.len() as f64
                },
            }
        })
        .collect();
    let empty_intervals: Vec<usize> = per_interval
        .iter()
        .enumerate()
        .filter(|(_, c)| c.count == 0)
        .map(|(j, _)| j + 1)
        .collect();
    let is_good = empty_intervals.is_empty() && per_interval.iter().all(|c| c.fraction < alpha);
    Ok(GoodnessReport {
        alpha,
        per_interval,
        is_good,
        empty_intervals,
    })
}

pub(crate) fn check_fraction(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in (0, 1), got {v}")))
    }
}

/// Per-interval trimmed residual maxima and their length-weighted sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EVector {
    pub e: Vec<f64>,
    pub weighted_sum: f64,
}

/// Number of residuals kept per bucket: `ceil((1 - alpha) n)`, at least one.
pub(crate) fn kept_count(alpha: f64, n: usize) -> usize {
    let k = ((1.0 - alpha) * n as f64 - 1e-9).ceil();
    (k.max(1.0) as usize).min(n)
}

/// `e_j` is the `ceil((1 - alpha) |S_j|)`-th smallest `|p(x_i) - y_i|` over
/// `S_j`; `weighted_sum = sum_j |I_j| e_j`.
pub fn e_vector(
    part: &Partition,
    samples: &SampleSet,
    p: &ChebPoly,
    alpha: f64,
) -> Result<EVector> {
    check_fraction("alpha", alpha)?;
    let buckets = part.assign_nonempty(samples)?;
    let mut e = Vec::with_capacity(part.m());
    for bucket in &buckets {
        let mut res: Vec<f64> = bucket
            .iter()
            .map(|&i| (p.eval(samples.xs()[i]) - samples.ys()[i]).abs())
            .collect();
        res.sort_by(f64::total_cmp);
        e.push(res[kept_count(alpha, res.len()) - 1]);
    }
    let weighted_sum = e.iter().zip(part.lengths()).map(|(e, l)| e * l).sum();
    Ok(EVector { e, weighted_sum })
}

/// A function that is constant on each partition interval.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    part: Partition,
    values: Vec<f64>,
}

impl PiecewiseConstant {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.values[self.part.locate(x)? - 1])
    }

    /// `int |p - r|` with `nodes_per_interval` trapezoid nodes inside each
    /// interval, so the jumps between intervals are never straddled.
    pub fn l1_distance(&self, p: &ChebPoly, nodes_per_interval: usize) -> f64 {
        let k = nodes_per_interval.max(2);
        (1..=self.part.m())
            .map(|j| {
                let (lo, hi) = self.part.interval(j);
                let v = self.values[j - 1];
                let nodes: Vec<f64> = (0..k)
                    .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
                    .collect();
                crate::cheb::trapezoid_abs(&nodes, |x| p.eval(x) - v)
            })
            .sum()
    }

    /// Largest `|p - r|` sampled the same way as [`Self::l1_distance`].
    pub fn linf_distance(&self, p: &ChebPoly, nodes_per_interval: usize) -> f64 {
        let k = nodes_per_interval.max(2);
        let mut worst = 0.0f64;
        for j in 1..=self.part.m() {
            let (lo, hi) = self.part.interval(j);
            for i in 0..k {
                let x = lo + (hi - lo) * i as f64 / (k - 1) as f64;
                worst = worst.max((p.eval(x) - self.values[j - 1]).abs());
            }
        }
        worst
    }
}

/// Midpoint of every interval, the default anchors for [`piecewise_project`].
pub fn midpoint_anchors(part: &Partition) -> Vec<f64> {
    part.midpoints()
}

/// `r(x) = p(anchor_j)` on `I_j`.
pub fn piecewise_project(
    p: &ChebPoly,
    part: &Partition,
    anchors: &[f64],
) -> Result<PiecewiseConstant> {
    if anchors.len() != part.m() {
        return Err(invalid(format!(
            "{} anchors for {} intervals",
            anchors.len(),
            part.m()
        )));
    }
    for (j, &a) in (1..=part.m()).zip(anchors) {
        let (lo, hi) = part.interval(j);
        if !(a >= lo - DOMAIN_SLACK && a <= hi + DOMAIN_SLACK) {
            return Err(invalid(format!(
                "anchor {a} is outside I_{j} = [{lo}, {hi}]"
            )));
        }
    }
    Ok(PiecewiseConstant {
        part: part.clone(),
        values: anchors.iter().map(|&a| p.eval(a)).collect(),
    })
}
