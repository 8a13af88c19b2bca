//! The lower-bound constructions and their numeric checks.

use robustpoly::lowerbounds::{
    check_sandwich, indicator_report, oscillation_report, projection_gap_report,
    quad_triple_report, uniform_lb_instance, FamilySpec, IndicatorSpec,
};
use robustpoly::GridSpec;

fn main() -> robustpoly::Result<()> {
    let qt = quad_triple_report(4096)?;
    println!(
        "three quadratics pairwise {:?} apart; best center radius {:.6}",
        qt.pairwise_linf, qt.radius
    );

    for alpha in [0.1, 0.25, 0.4] {
        let g = projection_gap_report(alpha, 1.0, 8192)?;
        println!(
            "ramp with alpha {alpha}: projection lands {:.6} from the truth",
            g.measured_gap
        );
    }

    for d in [2, 4, 8] {
        let o = oscillation_report(d, 8192)?;
        println!(
            "degree {d}: {} oscillating members, max distance {:.9} (bound {:.9})",
            o.members,
            o.max_within_group.max(o.max_across_groups),
            o.bound
        );
    }

    let ind = indicator_report(IndicatorSpec { d: 20, b: 0.3 }, 8192)?;
    println!(
        "indicator at b = 0.3: p(b) = {:.12}, sup = {:.12}, decay ratio {:.3}",
        ind.value_at_b, ind.sup_norm, ind.decay_ratio
    );

    let spec = FamilySpec::new(40, 1.0 / 3.0)?;
    let s = check_sandwich(&spec, &[1, 3, 4], &GridSpec::chebyshev(8192))?;
    println!(
        "f_S with S = {{1,3,4}} of m = {}: tail {:.4}, holds {}",
        spec.m, s.tail_max, s.holds
    );

    let u = uniform_lb_instance(30, 1.5)?;
    println!(
        "shifted T_30: |f(1) - g(1)| = {:.3}, max inside the safe region {:.3}, holds {}",
        u.f_at_one, u.max_in_safe_region, u.holds
    );
    Ok(())
}
