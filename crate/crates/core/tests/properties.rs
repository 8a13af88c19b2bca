use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robustpoly::cheb::{cheb_eval, norm_1, poly_lincomb};
use robustpoly::lowerbounds::{
    check_sandwich, minimax_center, quad_triple, safe_region_rate, uniform_lb_instance, FamilySpec,
};
use robustpoly::partition::midpoint_anchors;
use robustpoly::simulator::{
    corrupt, make_instance, random_truth, sample_x, Adversary, AdversaryParams, Measure, NoiseModel,
};
use robustpoly::{
    approx, goodness, norm_inf_grid, piecewise_project, ChebPoly, FitConfig, GridSpec, Partition,
};

fn coeffs(max_degree: usize) -> impl Strategy<Value = Vec<f64>> {
    (0..=max_degree).prop_flat_map(|d| prop::collection::vec(-1.0f64..1.0, d + 1))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn basis_matches_cosine_form(k in 0usize..=200, x in -1.0f64..=1.0) {
        let want = (k as f64 * x.acos()).cos();
        prop_assert!((cheb_eval(k, x) - want).abs() <= 1e-9);
    }

    #[test]
    fn evaluation_is_linear(p in coeffs(30), q in coeffs(30), a in -3.0f64..3.0, b in -3.0f64..3.0, x in -1.0f64..=1.0) {
        let (p, q) = (ChebPoly::new(p), ChebPoly::new(q));
        let lhs = poly_lincomb(a, &p, b, &q).eval(x);
        prop_assert!((lhs - (a * p.eval(x) + b * q.eval(x))).abs() <= 1e-10);
    }

    #[test]
    fn markov_brothers(c in coeffs(40)) {
        let p = ChebPoly::new(c);
        let d = p.degree();
        prop_assume!(d >= 1);
        let grid = GridSpec::chebyshev(20 * (d + 1));
        let bound = (1.0 + 1e-6) * (d * d) as f64 * norm_inf_grid(&p, &grid);
        prop_assert!(norm_inf_grid(&p.derivative(), &grid) <= bound);
    }

    #[test]
    fn coarse_grid_sup_within_curvature_bound(c in coeffs(40)) {
        // p(cos t) has |f''| <= d^2 ||f||, and every t lies within pi/(2M) of a node.
        let p = ChebPoly::new(c);
        let d = p.stored_degree();
        let shortfall = |m: usize| (std::f64::consts::PI * d as f64).powi(2) / (8.0 * (m * m) as f64);
        let (mf, mc) = (20 * (d + 1), 8 * (d + 1));
        let fine = norm_inf_grid(&p, &GridSpec::chebyshev(mf));
        let coarse = norm_inf_grid(&p, &GridSpec::chebyshev(mc));
        let sup = fine / (1.0 - shortfall(mf));
        prop_assert!(coarse <= sup * (1.0 + 1e-12));
        prop_assert!(sup - coarse <= shortfall(mc) * sup + 1e-12, "d={} coarse {} fine {}", d, coarse, fine);
    }

    #[test]
    fn weighted_bucket_average_tracks_l1_norm(seed in 0u64..1000, d in 1usize..=12) {
        let eps = 0.25;
        let m = (8.0 * d as f64 / eps).ceil() as usize;
        let part = Partition::new(m).unwrap();
        let p = random_truth(d, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut total = 0.0;
        for j in 1..=m {
            let (lo, hi) = part.interval(j);
            let k = rng.random_range(1..=5usize);
            let s: f64 = (0..k).map(|_| p.eval(rng.random_range(lo..=hi)).abs()).sum();
            total += part.length(j) * s / k as f64;
        }
        let l1 = norm_1(&p);
        prop_assert!((total - l1).abs() <= eps * l1, "total {} l1 {}", total, l1);
    }

    #[test]
    fn inliers_stay_within_sigma(seed in 0u64..10_000, rho in 0.0f64..0.6, sigma in 0.0f64..2.0, adv in 0usize..4, d in 0usize..8) {
        let adversary = [Adversary::ConstantOffset, Adversary::SignFlip, Adversary::ChebConfuser, Adversary::TwoPolyMixture][adv];
        let truth = random_truth(d, seed);
        let model = NoiseModel::new(sigma, rho, adversary).with_params(AdversaryParams { decoy_degree: Some(d), ..Default::default() });
        let xs = sample_x(Measure::Uniform, 300, seed);
        let s = corrupt(&truth, &xs, &model, seed).unwrap();
        for ((&x, &y), &f) in s.xs().iter().zip(s.ys()).zip(s.flags().unwrap()) {
            if !f {
                prop_assert!((y - truth.eval(x)).abs() <= sigma + 1e-12);
            }
        }
    }
}

#[test]
fn piecewise_constant_ratio_is_bounded() {
    let d = 16usize;
    let p = random_truth(d, 1_600);
    for k in [2usize, 4, 8, 16] {
        let m = k * d;
        let part = Partition::new(m).unwrap();
        let r = piecewise_project(&p, &part, &midpoint_anchors(&part)).unwrap();
        let ratio = r.l1_distance(&p, 64) / ((d as f64 / m as f64) * norm_1(&p));
        assert!(ratio <= 4.0, "m={m} ratio {ratio}");
    }
}

#[test]
fn refine_contracts_on_good_instances() {
    let (d, eps, sigma) = (4usize, 0.25, 0.1);
    let cfg = FitConfig {
        alpha: 0.3,
        ..FitConfig::new(d, eps)
    };
    let part = Partition::new(cfg.m()).unwrap();
    for (seed, adversary) in [
        (1u64, Adversary::SignFlip),
        (2, Adversary::ConstantOffset),
        (3, Adversary::TwoPolyMixture),
    ] {
        let truth = random_truth(d, seed);
        let model = NoiseModel::new(sigma, 0.1, adversary).with_params(AdversaryParams {
            oscillation: Some(cfg.m()),
            ..Default::default()
        });
        let inst = make_instance(&truth, 60 * cfg.m(), Measure::Chebyshev, &model, seed).unwrap();
        assert!(goodness(&part, &inst.samples, cfg.alpha).unwrap().is_good);
        let rep = approx(&inst.samples.without_flags(), &cfg).unwrap();
        let est: Vec<f64> = rep
            .rounds
            .iter()
            .map(|r| r.residual_linf_estimate)
            .collect();
        for t in 1..est.len() - 1 {
            assert!(
                est[t + 1] <= (2.0 + eps) * sigma + (eps + 0.05) * est[t],
                "{adversary:?} round {t}: {est:?}"
            );
        }
        let err = norm_inf_grid(&rep.final_poly.sub(&truth), &GridSpec::default_inf(d));
        assert!(err <= (2.0 + eps) * sigma + 1e-6, "{adversary:?}: {err}");
    }
}

#[test]
fn approx_is_deterministic() {
    let truth = random_truth(5, 9);
    let model = NoiseModel::new(0.1, 0.2, Adversary::SignFlip);
    let inst = make_instance(&truth, 5000, Measure::Chebyshev, &model, 9).unwrap();
    let cfg = FitConfig::new(5, 0.3);
    let a = approx(&inst.samples.without_flags(), &cfg).unwrap();
    let b = approx(&inst.samples.without_flags(), &cfg).unwrap();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    let bits = |p: &ChebPoly| p.coeffs().iter().map(|c| c.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.final_poly), bits(&b.final_poly));
}

#[test]
fn sandwich_tail_stays_below_alpha() {
    let grid = GridSpec::chebyshev(8192);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for d in [20usize, 40] {
        for alpha in [1.0 / 3.0, 1.0 / 12.0] {
            let spec = FamilySpec::new(d, alpha).unwrap();
            for _ in 0..5 {
                let subset = spec.random_subset(&mut rng);
                let rep = check_sandwich(&spec, &subset, &grid).unwrap();
                assert!(
                    rep.holds,
                    "d={d} alpha={alpha} {subset:?}: tail {} excess {}",
                    rep.tail_max, rep.lower_excess
                );
            }
        }
    }
}

#[test]
fn center_radius_grows_under_refinement() {
    let polys = quad_triple().to_vec();
    let mut prev = 0.0;
    for m in [64usize, 128, 256, 512, 1024] {
        let (_, r) = minimax_center(&polys, 2, &GridSpec::chebyshev(m)).unwrap();
        assert!(r >= prev - 1e-9, "m={m}: {r} < {prev}");
        prev = r;
    }
}

#[test]
fn uniform_draws_avoid_the_gap_often() {
    let (d, n) = (30usize, 100usize);
    let gap = uniform_lb_instance(d, 1.5).unwrap();
    let rate = safe_region_rate(&gap, n, 20_000, 4);
    let floor = (-(n as f64) * gap.alpha / (d * d) as f64).exp() * (1.0 - 1e-3);
    assert!(rate >= floor, "rate {rate} floor {floor}");
}
