//! The dense two-phase simplex solver on a small production-planning LP.

use robustpoly::{lp_solve, LpProblem, LpStatus};

fn main() -> Result<(), robustpoly::LpError> {
    // maximize 3a + 5b  s.t.  a <= 4, 2b <= 12, 3a + 2b <= 18, a, b >= 0
    let mut lp = LpProblem::new(vec![-3.0, -5.0]);
    lp.add_le(&[1.0, 0.0], 4.0)?;
    lp.add_le(&[0.0, 2.0], 12.0)?;
    lp.add_le(&[3.0, 2.0], 18.0)?;
    lp.set_bounds(0, 0.0, f64::INFINITY)?;
    lp.set_bounds(1, 0.0, f64::INFINITY)?;
    let sol = lp_solve(&lp)?.optimal()?;
    println!(
        "x = {:?}, objective {} after {} pivots",
        sol.x, sol.objective_value, sol.iterations
    );
    println!(
        "row duals (shadow prices of the minimization) = {:?}",
        sol.duals
    );

    // Equality row plus box bounds.
    let mut eq = LpProblem::new(vec![-1.0, -2.0]);
    eq.add_eq(&[1.0, 1.0], 1.0)?;
    eq.set_bounds(0, 0.0, 1.0)?;
    eq.set_bounds(1, 0.0, 0.25)?;
    println!("box-bounded optimum: {:?}", lp_solve(&eq)?.optimal()?.x);

    let mut bad = LpProblem::new(vec![1.0]);
    bad.add_le(&[1.0], 0.0)?;
    bad.add_le(&[-1.0], -1.0)?;
    assert_eq!(lp_solve(&bad)?.status, LpStatus::Infeasible);
    println!("contradictory rows are reported as infeasible");
    Ok(())
}
