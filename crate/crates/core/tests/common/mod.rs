#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robustpoly::{LpProblem, LpSolution};

/// Feasible, bounded LP: `rows` inequality rows over `cols` box-bounded
/// variables, built around an interior point so feasibility is certain.
pub fn random_lp(rows: usize, cols: usize, seed: u64) -> LpProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<f64> = (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect();
    let x0: Vec<f64> = (0..cols).map(|_| rng.random_range(0.0..1.0)).collect();
    let mut lp = LpProblem::new(c);
    for _ in 0..rows {
        let a: Vec<f64> = (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b = a.iter().zip(&x0).map(|(a, x)| a * x).sum::<f64>() + rng.random_range(0.0..1.0);
        lp.add_le(&a, b).unwrap();
    }
    for j in 0..cols {
        lp.set_bounds(j, 0.0, 2.0).unwrap();
    }
    lp
}

/// Largest violation of the optimality conditions for a minimization with
/// `<=`/`=` rows: dual sign, complementary slackness and reduced-cost signs
/// against active bounds.
pub fn kkt_violation(lp: &LpProblem, sol: &LpSolution) -> f64 {
    use robustpoly::lp::RowKind;
    let (m, n) = (lp.rows(), lp.vars());
    let mut worst = lp.max_violation(&sol.x);
    for i in 0..m {
        let y = sol.duals[i];
        if lp.kinds()[i] == RowKind::LessEq {
            let slack = lp.rhs()[i] - dot(lp.row(i), &sol.x);
            worst = worst.max(y).max((y * slack).abs());
        }
    }
    for j in 0..n {
        let rc = lp.objective()[j] - (0..m).map(|i| lp.row(i)[j] * sol.duals[i]).sum::<f64>();
        let (lo, hi) = lp.bounds(j);
        let x = sol.x[j];
        let tol = 1e-9 * (1.0 + x.abs());
        let v = if (x - lo).abs() <= tol {
            (-rc).max(0.0)
        } else if (x - hi).abs() <= tol {
            rc.max(0.0)
        } else {
            rc.abs()
        };
        worst = worst.max(v);
    }
    worst
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}
