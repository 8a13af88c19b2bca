//! Polynomials on `[-1, 1]` stored in the Chebyshev basis.
//!
//! Everything in this crate (fits, partitions, lower-bound gadgets) works with
//! [`ChebPoly`]. Monomial conversion is provided for display and import only.

use serde::{Deserialize, Serialize};

/// Coefficients with `|c_k| <= TRIM_REL * max|c|` are ignored when reporting degree.
pub const TRIM_REL: f64 = 1e-14;

/// Inputs this far outside `[-1, 1]` are clamped back onto the interval.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// `T_k(x)` by the three-term recurrence.
///
/// Arguments within [`DOMAIN_SLACK`] of the interval are clamped onto it;
/// anything further out evaluates the polynomial extension.
pub fn cheb_eval(k: usize, x: f64) -> f64 {
    let x = clamp_unit(x);
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..k {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Values `T_0(x), ..., T_d(x)`.
pub fn cheb_row(degree: usize, x: f64) -> Vec<f64> {
    let x = clamp_unit(x);
    let mut row = Vec::with_capacity(degree + 1);
    row.push(1.0);
    if degree >= 1 {
        row.push(x);
    }
    for k in 2..=degree {
        let next = 2.0 * x * row[k - 1] - row[k - 2];
        row.push(next);
    }
    row
}

pub(crate) fn clamp_unit(x: f64) -> f64 {
    if x > 1.0 && x <= 1.0 + DOMAIN_SLACK {
        1.0
    } else if (-1.0 - DOMAIN_SLACK..-1.0).contains(&x) {
        -1.0
    } else {
        x
    }
}

/// A real polynomial `sum_k c_k T_k(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyJson", into = "PolyJson")]
pub struct ChebPoly {
    coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    basis: String,
    coeffs: Vec<f64>,
}

impl From<ChebPoly> for PolyJson {
    fn from(p: ChebPoly) -> Self {
        PolyJson {
            basis: "chebyshev".to_string(),
            coeffs: p.coeffs,
        }
    }
}

impl TryFrom<PolyJson> for ChebPoly {
    type Error = String;

    fn try_from(j: PolyJson) -> Result<Self, Self::Error> {
        if j.basis != "chebyshev" {
            return Err(format!("unsupported basis {:?}", j.basis));
        }
        if j.coeffs.iter().any(|c| !c.is_finite()) {
            return Err("non-finite coefficient".to_string());
        }
        Ok(ChebPoly::new(j.coeffs))
    }
}

impl ChebPoly {
    /// Builds a polynomial from `c_0..c_d`. An empty list is the zero polynomial.
    pub fn new(coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            return Self::zero();
        }
        ChebPoly { coeffs }
    }

    pub fn zero() -> Self {
        ChebPoly { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        ChebPoly { coeffs: vec![c] }
    }

    /// The basis polynomial `T_k`.
    pub fn basis(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        ChebPoly { coeffs }
    }

    /// Converts `a_0 + a_1 x + ... + a_d x^d` into the Chebyshev basis.
    pub fn from_monomial(mono: &[f64]) -> Self {
        let mut acc = ChebPoly::zero();
        for &a in mono.iter().rev() {
            acc = acc.mul_x();
            acc.coeffs[0] += a;
        }
        acc
    }

    /// Monomial coefficients `a_0..a_d`. Ill-conditioned for large degree.
    pub fn to_monomial(&self) -> Vec<f64> {
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        // Monomial forms of T_{k-1} and T_k, advanced by the recurrence.
        let mut prev = vec![0.0; n + 1];
        let mut cur = vec![0.0; n + 1];
        prev[0] = 1.0;
        if n > 0 {
            out[0] += self.coeffs[0];
        }
        if n > 1 {
            cur[1] = 1.0;
            out[1] += self.coeffs[1];
        }
        for k in 2..n {
            let mut next = vec![0.0; n + 1];
            for i in 0..n {
                next[i + 1] += 2.0 * cur[i];
                next[i] -= prev[i];
            }
            for (o, v) in out.iter_mut().zip(&next) {
                *o += self.coeffs[k] * v;
            }
            prev = std::mem::replace(&mut cur, next);
        }
        out
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Number of stored coefficients minus one.
    pub fn stored_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Degree after dropping trailing coefficients that are negligible
    /// relative to the largest one.
    pub fn degree(&self) -> usize {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if scale == 0.0 {
            return 0;
        }
        self.coeffs
            .iter()
            .rposition(|c| c.abs() > TRIM_REL * scale)
            .unwrap_or(0)
    }

    /// Copy with negligible trailing coefficients removed.
    pub fn trimmed(&self) -> Self {
        ChebPoly {
            coeffs: self.coeffs[..=self.degree()].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Clenshaw evaluation of `sum c_k T_k(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        let x = clamp_unit(x);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs[1..].iter().rev() {
            let b0 = c + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + x * b1 - b2
    }

    pub fn eval_many(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }

    pub fn scale(&self, a: f64) -> Self {
        ChebPoly {
            coeffs: self.coeffs.iter().map(|c| a * c).collect(),
        }
    }

    pub fn add(&self, other: &ChebPoly) -> Self {
        poly_lincomb(1.0, self, 1.0, other)
    }

    pub fn sub(&self, other: &ChebPoly) -> Self {
        poly_lincomb(1.0, self, -1.0, other)
    }

    /// Exact derivative via `c'_{k-1} = c'_{k+1} + 2k c_k`.
    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len() - 1;
        if n == 0 {
            return ChebPoly::zero();
        }
        let mut d = vec![0.0; n + 1];
        for k in (1..=n).rev() {
            let above = if k < n { d[k + 1] } else { 0.0 };
            d[k - 1] = above + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(n);
        ChebPoly::new(d)
    }

    /// `x * p(x)` using `x T_0 = T_1` and `x T_k = (T_{k+1} + T_{k-1}) / 2`.
    pub fn mul_x(&self) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![0.0; n + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            if k == 0 {
                out[1] += c;
            } else {
                out[k + 1] += 0.5 * c;
                out[k - 1] += 0.5 * c;
            }
        }
        ChebPoly { coeffs: out }
    }

    /// Product via `T_j T_k = (T_{j+k} + T_{|j-k|}) / 2`.
    pub fn mul(&self, other: &ChebPoly) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (j, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (k, &b) in other.coeffs.iter().enumerate() {
                let half = 0.5 * a * b;
                out[j + k] += half;
                out[j.abs_diff(k)] += half;
            }
        }
        ChebPoly { coeffs: out }
    }

    /// The polynomial `x -> p(scale * x + shift)`, re-expanded in the Chebyshev
    /// basis by running Clenshaw's recurrence over polynomials.
    pub fn compose_affine(&self, scale: f64, shift: f64) -> Self {
        let times_inner = |q: &ChebPoly| poly_lincomb(scale, &q.mul_x(), shift, q);
        let mut b1 = ChebPoly::zero();
        let mut b2 = ChebPoly::zero();
        for &c in self.coeffs[1..].iter().rev() {
            let mut b0 = poly_lincomb(2.0, &times_inner(&b1), -1.0, &b2);
            b0.coeffs[0] += c;
            b2 = b1;
            b1 = b0;
        }
        let mut out = poly_lincomb(1.0, &times_inner(&b1), -1.0, &b2);
        out.coeffs[0] += self.coeffs[0];
        out.coeffs.truncate(self.coeffs.len());
        out
    }
}

/// Coefficient-wise `a p + b q`, zero-padded to the longer operand.
pub fn poly_lincomb(a: f64, p: &ChebPoly, b: f64, q: &ChebPoly) -> ChebPoly {
    let n = p.coeffs.len().max(q.coeffs.len());
    let coeffs = (0..n)
        .map(|k| {
            let pk = p.coeffs.get(k).copied().unwrap_or(0.0);
            let qk = q.coeffs.get(k).copied().unwrap_or(0.0);
            a * pk + b * qk
        })
        .collect();
    ChebPoly { coeffs }
}

/// Node layout for grid-based norm estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    /// `cos(pi j / M)` for `j = 0..=M`.
    ChebyshevExtrema,
    /// `-1 + 2 j / M` for `j = 0..=M`.
    Uniform,
}

/// `M + 1` evaluation nodes on `[-1, 1]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub m: usize,
    pub kind: NodeKind,
}

impl GridSpec {
    pub fn chebyshev(m: usize) -> Self {
        GridSpec {
            m: m.max(1),
            kind: NodeKind::ChebyshevExtrema,
        }
    }

    pub fn uniform(m: usize) -> Self {
        GridSpec {
            m: m.max(1),
            kind: NodeKind::Uniform,
        }
    }

    /// Default sup-norm grid: `max(512, 16 (d + 1))` Chebyshev extrema.
    pub fn default_inf(degree: usize) -> Self {
        Self::chebyshev(512.max(16 * (degree + 1)))
    }

    /// Default `l1` grid: 4096 Chebyshev extrema, more for very high degree.
    pub fn default_l1(degree: usize) -> Self {
        Self::chebyshev(4096.max(8 * (degree + 1)))
    }

    /// Nodes in ascending order.
    pub fn nodes(&self) -> Vec<f64> {
        let m = self.m as f64;
        match self.kind {
            NodeKind::ChebyshevExtrema => (0..=self.m)
                .rev()
                .map(|j| {
                    // Exact endpoints and midpoint; cos(pi/2) is not exactly 0.
                    if 2 * j == self.m {
                        0.0
                    } else {
                        (std::f64::consts::PI * j as f64 / m).cos()
                    }
                })
                .collect(),
            NodeKind::Uniform => (0..=self.m).map(|j| -1.0 + 2.0 * j as f64 / m).collect(),
        }
    }
}

/// Largest `|p|` over the grid nodes.
///
/// This never exceeds the true supremum. For degree `d` and a Chebyshev grid
/// with `M >= 8 (d + 1)`, the shortfall is at most about `pi^2 d^2 / (8 M^2)`
/// relative, since `p(cos t)` is a trigonometric polynomial sampled on a
/// uniform `t` grid.
pub fn norm_inf_grid(p: &ChebPoly, grid: &GridSpec) -> f64 {
    debug_assert!(grid.m >= 8 * (p.stored_degree() + 1) || p.stored_degree() == 0);
    grid.nodes()
        .iter()
        .fold(0.0f64, |m, &x| m.max(p.eval(x).abs()))
}

/// Composite trapezoid estimate of `int_{-1}^{1} |p(x)| dx` on the grid.
pub fn norm_1_grid(p: &ChebPoly, grid: &GridSpec) -> f64 {
    debug_assert!(grid.m >= 8 * (p.stored_degree() + 1) || p.stored_degree() == 0);
    trapezoid_abs(&grid.nodes(), |x| p.eval(x))
}

/// Trapezoid rule for `int |f|` over ascending nodes.
pub(crate) fn trapezoid_abs(nodes: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let vals: Vec<f64> = nodes.iter().map(|&x| f(x).abs()).collect();
    nodes
        .windows(2)
        .zip(vals.windows(2))
        .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
        .sum()
}

/// `norm_inf_grid` on the default grid for the polynomial's degree.
pub fn norm_inf(p: &ChebPoly) -> f64 {
    norm_inf_grid(p, &GridSpec::default_inf(p.stored_degree()))
}

/// `norm_1_grid` on the default grid for the polynomial's degree.
pub fn norm_1(p: &ChebPoly) -> f64 {
    norm_1_grid(p, &GridSpec::default_l1(p.stored_degree()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn cheb_eval_small_cases() {
        assert_eq!(cheb_eval(0, 0.37), 1.0);
        assert!(close(cheb_eval(3, 0.5), -1.0, 1e-15));
        assert!(close(cheb_eval(2, 0.8), 0.28, 1e-15));
    }

    #[test]
    fn cheb_eval_matches_cosine_form() {
        for k in 0..=200 {
            for i in 0..1000 {
                let x = -1.0 + 2.0 * i as f64 / 999.0;
                let want = (k as f64 * x.acos()).cos();
                assert!(
                    close(cheb_eval(k, x), want, 1e-9),
                    "k={k} x={x} got {} want {want}",
                    cheb_eval(k, x)
                );
            }
        }
    }

    #[test]
    fn eval_small_cases() {
        assert!(close(ChebPoly::new(vec![0.0, 1.0]).eval(0.3), 0.3, 1e-15));
        assert!(close(
            ChebPoly::new(vec![1.0, 0.0, 1.0]).eval(1.0),
            2.0,
            1e-15
        ));
    }

    #[test]
    fn slightly_outside_is_clamped() {
        let p = ChebPoly::basis(7);
        assert_eq!(p.eval(1.0 + 1e-13), p.eval(1.0));
        assert_eq!(cheb_eval(7, -1.0 - 1e-13), cheb_eval(7, -1.0));
    }

    #[test]
    fn lincomb_cases() {
        let p = ChebPoly::new(vec![1.0, 2.0]);
        assert_eq!(poly_lincomb(1.0, &p, -1.0, &p).coeffs(), &[0.0, 0.0]);
        let r = poly_lincomb(
            2.0,
            &ChebPoly::new(vec![0.0, 1.0]),
            0.0,
            &ChebPoly::constant(5.0),
        );
        assert_eq!(r.coeffs(), &[0.0, 2.0]);
        let r = poly_lincomb(1.0, &ChebPoly::constant(1.0), 1.0, &ChebPoly::basis(2));
        assert_eq!(r.coeffs(), &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn derivative_cases() {
        assert_eq!(ChebPoly::basis(2).derivative().coeffs(), &[0.0, 4.0]);
        assert_eq!(ChebPoly::constant(7.0).derivative().coeffs(), &[0.0]);
    }

    #[test]
    fn derivative_of_t5_matches_finite_differences() {
        let p = ChebPoly::basis(5);
        let dp = p.derivative();
        let h = 1e-6;
        for i in 0..10 {
            let x = -0.9 + 1.8 * i as f64 / 9.0;
            let fd = (p.eval(x + h) - p.eval(x - h)) / (2.0 * h);
            assert!(close(dp.eval(x), fd, 1e-4), "x={x}");
            // 5 U_4(x) = 5 sin(5t)/sin(t)
            let t = x.acos();
            assert!(close(dp.eval(x), 5.0 * (5.0 * t).sin() / t.sin(), 1e-9));
        }
    }

    #[test]
    fn degree_trims_tiny_tail() {
        let p = ChebPoly::new(vec![1.0, 2.0, 1e-16, 0.0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(p.stored_degree(), 3);
        assert_eq!(ChebPoly::zero().degree(), 0);
        assert_eq!(p.trimmed().coeffs(), &[1.0, 2.0]);
    }

    #[test]
    fn monomial_round_trip() {
        // 2x^2 - 1 = T_2
        let t2 = ChebPoly::from_monomial(&[-1.0, 0.0, 2.0]);
        assert!(close(t2.coeffs()[2], 1.0, 1e-15));
        assert!(close(t2.coeffs()[0], 0.0, 1e-15));
        let t5 = ChebPoly::basis(5).to_monomial();
        assert_eq!(t5, vec![0.0, 5.0, 0.0, -20.0, 0.0, 16.0]);
    }

    #[test]
    fn product_and_composition() {
        let x = ChebPoly::basis(1);
        let sq = x.mul(&x);
        assert!(close(sq.eval(0.3), 0.09, 1e-15));
        let p = ChebPoly::new(vec![0.3, -1.0, 0.5, 0.25]);
        let q = p.compose_affine(0.5, -0.2);
        for i in 0..=20 {
            let t = -1.0 + 0.1 * i as f64;
            assert!(close(q.eval(t), p.eval(0.5 * t - 0.2), 1e-13));
        }
        assert_eq!(q.stored_degree(), 3);
    }

    #[test]
    fn grid_norms() {
        assert!(close(
            norm_inf_grid(&ChebPoly::basis(5), &GridSpec::chebyshev(512)),
            1.0,
            1e-9
        ));
        assert_eq!(
            norm_inf_grid(&ChebPoly::zero(), &GridSpec::chebyshev(64)),
            0.0
        );
        assert!(close(
            norm_inf_grid(&ChebPoly::basis(1).scale(2.0), &GridSpec::chebyshev(64)),
            2.0,
            1e-15
        ));
        assert!(close(
            norm_1_grid(&ChebPoly::basis(1), &GridSpec::chebyshev(4096)),
            1.0,
            1e-4
        ));
        assert!(close(
            norm_1_grid(&ChebPoly::constant(1.0), &GridSpec::chebyshev(4096)),
            2.0,
            1e-6
        ));
        // int |2x^2 - 1| = (4 sqrt 2 - 2) / 3
        let want = (4.0 * 2f64.sqrt() - 2.0) / 3.0;
        assert!(close(
            norm_1_grid(&ChebPoly::basis(2), &GridSpec::chebyshev(4096)),
            want,
            1e-3
        ));
    }

    #[test]
    fn grid_nodes_ascending_with_endpoints() {
        for g in [
            GridSpec::chebyshev(9),
            GridSpec::uniform(9),
            GridSpec::chebyshev(10),
        ] {
            let n = g.nodes();
            assert_eq!(n.len(), 10 + (g.m - 9));
            assert_eq!(n[0], -1.0);
            assert_eq!(*n.last().unwrap(), 1.0);
            assert!(n.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn json_shape() {
        let p = ChebPoly::new(vec![1.0, -0.5]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"basis":"chebyshev","coeffs":[1.0,-0.5]}"#);
        let back: ChebPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<ChebPoly>(r#"{"basis":"monomial","coeffs":[1]}"#).is_err());
    }
}
