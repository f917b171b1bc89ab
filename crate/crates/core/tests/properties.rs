use approx::assert_abs_diff_eq;
use infoprice::information_measures::{info_of_xi, kl_gaussian, xi_of_info, Branch};
use infoprice::market_models::{grid_posterior, normal_pdf, GridSpec};
use infoprice::oracles::enumerate_expected_utility_binary;
use infoprice::prelude::*;
use infoprice::pricing::{grossman_stiglitz_gap, price_posterior_indifference_numeric};
use infoprice::quadrature::GaussHermite;
use infoprice::utility_optimizer::{
    expected_utility_binary, expected_utility_gaussian, optimal_allocation_binary, optimal_allocation_gaussian,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fig2() -> GaussianModel {
    GaussianModel::new(
        GaussianMarket::new(1.1, 0.2, 1.0, 0.95).unwrap(),
        GaussianSignal::new(0.0, 0.2).unwrap(),
    )
}

fn alpha(a: f64) -> UtilityParams {
    UtilityParams::new(a).unwrap()
}

proptest! {
    #[test]
    fn binary_posterior_is_a_martingale(p in 0.0..=1.0f64, q in 0.0..=1.0f64) {
        let model = BinaryModel::new(BinaryMarket::new(p, 0.5, 0.95).unwrap(), BinarySignal::new(q).unwrap());
        let mean: f64 = model
            .signal_atoms()
            .iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|&(xi, w)| w * model.posterior(xi).unwrap().pi)
            .sum();
        prop_assert!((mean - p).abs() <= 1e-15);
    }

    #[test]
    fn gaussian_posterior_mean_is_a_martingale(
        mu in -2.0..2.0f64,
        sigma2 in 0.01..2.0f64,
        mu_eps in -1.0..1.0f64,
        sigma2_eps in 0.01..2.0f64,
    ) {
        let model = GaussianModel::new(
            GaussianMarket::new(mu, sigma2, 1.0, 0.95).unwrap(),
            GaussianSignal::new(mu_eps, sigma2_eps).unwrap(),
        );
        let gh = GaussHermite::new(64);
        let mean = gh.expect_normal(mu + mu_eps, sigma2 + sigma2_eps, |xi| model.posterior(xi).mean);
        prop_assert!((mean - mu).abs() < 1e-8);
        let v = model.posterior_var();
        prop_assert!(v < sigma2);
        prop_assert_eq!(model.posterior(mu + 3.0).var, v);
        prop_assert_eq!(model.posterior(mu - 7.0).var, v);
    }

    #[test]
    fn enumeration_matches_binary_expected_utility(
        p in 0.0..=1.0f64,
        s0 in 0.1..0.99f64,
        delta in 0.8..1.0f64,
        a in 0.01..1.0f64,
        phi in -20.0..20.0f64,
        budget in 0.0..20.0f64,
    ) {
        let m = BinaryMarket::new(p, s0, delta).unwrap();
        let u = alpha(a);
        let alloc = Allocation::from_stock(phi, budget, s0);
        let direct = enumerate_expected_utility_binary(&alloc, p, &m, &u);
        let formula = expected_utility_binary(phi, p, &m, &u, budget);
        prop_assert!((direct - formula).abs() <= 1e-14 * direct.abs().max(1.0), "{direct} vs {formula}");
    }

    #[test]
    fn optimum_does_not_depend_on_wealth(
        mean in 0.5..1.5f64,
        var in 0.01..1.0f64,
        a in 0.01..1.0f64,
        budget in 0.1..50.0f64,
    ) {
        let m = GaussianMarket::new(1.0, 0.2, 1.0, 0.95).unwrap();
        let free = ConstraintSet::unconstrained();
        let one = optimal_allocation_gaussian(mean, var, &m, &alpha(a), budget, &free).unwrap();
        let two = optimal_allocation_gaussian(mean, var, &m, &alpha(a), 2.0 * budget, &free).unwrap();
        prop_assert!((one.phi - two.phi).abs() <= 1e-12);

        let bm = BinaryMarket::new(mean / 2.0, 0.5, 0.95).unwrap();
        let b1 = optimal_allocation_binary(bm.p, &bm, &alpha(a), budget, &free).unwrap();
        let b2 = optimal_allocation_binary(bm.p, &bm, &alpha(a), 2.0 * budget, &free).unwrap();
        prop_assert!((b1.phi - b2.phi).abs() <= 1e-12);
    }

    #[test]
    fn gaussian_kl_is_nonnegative_and_zero_only_at_prior(
        mu in -2.0..2.0f64,
        sigma2 in 0.01..2.0f64,
        mean in -3.0..3.0f64,
        ratio in 0.01..3.0f64,
    ) {
        let m = GaussianMarket::new(mu, sigma2, 1.0, 0.95).unwrap();
        let post = infoprice::market_models::GaussianPosterior { mean, var: ratio * sigma2 };
        let kl = kl_gaussian(&post, &m);
        prop_assert!(kl >= 0.0);
        let at_prior = infoprice::market_models::GaussianPosterior { mean: mu, var: sigma2 };
        prop_assert!(kl_gaussian(&at_prior, &m).abs() <= 1e-12);
        if (mean - mu).abs() > 1e-3 || (ratio - 1.0).abs() > 1e-3 {
            prop_assert!(kl > 1e-12);
        }
    }

    #[test]
    fn information_inversion_roundtrip(
        offset in 0.0..5.0f64,
        mu_eps in -0.5..0.5f64,
        sigma2_eps in 0.05..1.0f64,
    ) {
        let model = GaussianModel::new(
            GaussianMarket::new(1.1, 0.2, 1.0, 0.95).unwrap(),
            GaussianSignal::new(mu_eps, sigma2_eps).unwrap(),
        );
        let dagger = critical_signal(&model);
        for (branch, xi) in [(Branch::Up, dagger + offset), (Branch::Down, dagger - offset)] {
            let bits = info_of_xi(&model, xi);
            let back = xi_of_info(&model, bits, branch).unwrap();
            prop_assert!((back - xi).abs() <= 1e-12 * xi.abs().max(1.0) + 1e-12 * offset.max(1.0), "{xi} -> {bits} -> {back}");
            let info = xi_of_info(&model, bits + 0.3, branch).unwrap();
            prop_assert!((info_of_xi(&model, info) - bits - 0.3).abs() <= 1e-12);
        }
        // Even about the critical signal and increasing away from it.
        prop_assert!((info_of_xi(&model, dagger + offset) - info_of_xi(&model, dagger - offset)).abs() <= 1e-12);
        prop_assert!(info_of_xi(&model, dagger + offset + 0.01) > info_of_xi(&model, dagger + offset));
        prop_assert!(info_of_xi(&model, dagger - offset - 0.01) > info_of_xi(&model, dagger - offset));
    }
}

#[test]
fn grid_posterior_agrees_with_conjugate_update() {
    let model = fig2();
    let (m, s) = (model.market, model.signal);
    let (grid, prior) = GridSpec::default().tabulate_prior(&m, &s);
    for xi in [0.2, 0.9, 1.1, 1.5, 2.4] {
        let post = grid_posterior(&grid, &prior, |e| normal_pdf(e, s.mu_eps, s.sigma2_eps), xi).unwrap();
        let exact = model.posterior(xi);
        assert_abs_diff_eq!(post.mean(), exact.mean, epsilon = 1e-6);
        assert_abs_diff_eq!(post.variance(), exact.var, epsilon = 1e-6);
    }
}

fn random_constraints(rng: &mut ChaCha8Rng, w0: f64) -> ConstraintSet {
    match rng.random_range(0..4) {
        0 => ConstraintSet::unconstrained(),
        1 => ConstraintSet::no_short_selling(),
        2 => ConstraintSet::capped_borrowing(rng.random_range(0.0..3.0) * w0).unwrap(),
        _ => ConstraintSet::new(true, rng.random_range(0.0..3.0) * w0).unwrap(),
    }
}

#[test]
fn clamped_optimum_beats_random_feasible_positions() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let a = rng.random_range(0.02..1.0);
        let u = alpha(a);
        let w0 = rng.random_range(0.5..20.0);
        let s0 = rng.random_range(0.2..0.8);
        let delta = rng.random_range(0.85..1.0);
        let cons = random_constraints(&mut rng, w0);
        let (lo, hi) = cons.bounds(w0, s0);
        let (lo, hi) = (lo.max(-60.0), hi.min(60.0));

        if rng.random_bool(0.5) {
            let m = BinaryMarket::new(rng.random_range(0.05..0.95), s0, delta).unwrap();
            let best = optimal_allocation_binary(m.p, &m, &u, w0, &cons).unwrap();
            assert_abs_diff_eq!(best.theta + best.phi * s0, w0, epsilon = 1e-12 * w0.max(1.0));
            let top = expected_utility_binary(best.phi, m.p, &m, &u, w0);
            for _ in 0..100 {
                let phi = rng.random_range(lo..=hi);
                let eu = expected_utility_binary(phi, m.p, &m, &u, w0);
                assert!(top >= eu - 1e-12 * top.abs().max(1.0), "{top} < {eu} at {phi}, best {}", best.phi);
            }
        } else {
            let m = GaussianMarket::new(rng.random_range(0.5..1.5), rng.random_range(0.05..1.0), s0, delta).unwrap();
            let best = optimal_allocation_gaussian(m.mu, m.sigma2, &m, &u, w0, &cons).unwrap();
            assert_abs_diff_eq!(best.theta + best.phi * s0, w0, epsilon = 1e-12 * w0.max(1.0));
            let top = expected_utility_gaussian(best.phi, m.mu, m.sigma2, &m, &u, w0);
            for _ in 0..100 {
                let phi = rng.random_range(lo..=hi);
                let eu = expected_utility_gaussian(phi, m.mu, m.sigma2, &m, &u, w0);
                assert!(top >= eu - 1e-12 * top.abs().max(1.0), "{top} < {eu} at {phi}, best {}", best.phi);
            }
        }
    }
}

#[test]
fn interior_first_order_condition() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let free = ConstraintSet::unconstrained();
    let h = 1e-5;
    for _ in 0..500 {
        let u = alpha(rng.random_range(0.05..0.5));
        let w0 = rng.random_range(1.0..10.0);
        let bm = BinaryMarket::new(rng.random_range(0.1..0.9), rng.random_range(0.2..0.9), 0.95).unwrap();
        let phi = optimal_allocation_binary(bm.p, &bm, &u, w0, &free).unwrap().phi;
        let d = (expected_utility_binary(phi + h, bm.p, &bm, &u, w0) - expected_utility_binary(phi - h, bm.p, &bm, &u, w0))
            / (2.0 * h);
        assert!(d.abs() < 1e-8, "binary derivative {d}");

        let gm = GaussianMarket::new(rng.random_range(0.8..1.4), rng.random_range(0.1..0.5), 1.0, 0.95).unwrap();
        let phi = optimal_allocation_gaussian(gm.mu, gm.sigma2, &gm, &u, w0, &free).unwrap().phi;
        let f = |x: f64| expected_utility_gaussian(x, gm.mu, gm.sigma2, &gm, &u, w0);
        let d = (f(phi + h) - f(phi - h)) / (2.0 * h);
        assert!(d.abs() < 1e-8, "gaussian derivative {d}");
    }
}

#[test]
fn closed_forms_match_bisection_on_signal_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let free = ConstraintSet::unconstrained();
    for _ in 0..20 {
        let u = alpha(rng.random_range(0.05..0.3));
        let w0 = rng.random_range(1.0..10.0);
        let model = GaussianModel::new(
            GaussianMarket::new(
                rng.random_range(0.9..1.3),
                rng.random_range(0.1..0.5),
                rng.random_range(0.9..1.1),
                rng.random_range(0.9..1.0),
            )
            .unwrap(),
            GaussianSignal::new(rng.random_range(-0.2..0.2), rng.random_range(0.1..0.5)).unwrap(),
        );
        let centre = model.market.mu + model.signal.mu_eps;
        let sd = (model.market.sigma2 + model.signal.sigma2_eps).sqrt();
        for k in 0..100 {
            let xi = centre + sd * (-3.0 + 6.0 * k as f64 / 99.0);
            let closed = price_posterior_indifference(&model, xi, &u, w0, &free).unwrap().cost;
            let numeric = price_posterior_indifference_numeric(&model, xi, &u, w0, &free).unwrap().cost;
            assert!((closed - numeric).abs() <= 1e-9 * closed.max(1.0), "xi={xi}: {closed} vs {numeric}");
        }

        let bm = BinaryModel::new(
            BinaryMarket::new(rng.random_range(0.1..0.9), rng.random_range(0.2..0.9), rng.random_range(0.9..1.0)).unwrap(),
            BinarySignal::new(rng.random_range(0.05..0.95)).unwrap(),
        );
        let closed = price_posterior_indifference(&bm, 1, &u, w0, &free).unwrap().cost;
        let numeric = price_posterior_indifference_numeric(&bm, 1, &u, w0, &free).unwrap().cost;
        assert!((closed - numeric).abs() <= 1e-9 * closed.max(1.0), "{closed} vs {numeric}");
    }
}

#[test]
fn posterior_costs_are_nonnegative_and_bounded_under_full_constraints() {
    let model = fig2();
    let u = alpha(0.1);
    let full = ConstraintSet::no_short_selling();
    for cons in [ConstraintSet::unconstrained(), full, ConstraintSet::capped_borrowing(20.0).unwrap()] {
        for k in 0..=60 {
            let xi = -1.0 + 0.05 * k as f64;
            let q = price_posterior_indifference(&model, xi, &u, 10.0, &cons).unwrap();
            assert!(q.cost >= 0.0);
            if cons == full {
                assert!(q.cost <= 10.0, "xi={xi}: {}", q.cost);
            }
        }
    }
    let binary = BinaryModel::new(BinaryMarket::new(0.4, 0.5, 0.95).unwrap(), BinarySignal::new(0.7).unwrap());
    for xi in 0..=2 {
        let q = price_posterior_indifference(&binary, xi, &u, 5.0, &full).unwrap();
        assert!((0.0..=5.0).contains(&q.cost));
    }
}

#[test]
fn coincident_strategies_cost_nothing() {
    let u = alpha(0.1);
    for (mu, s0, mu_eps) in [(1.1, 1.0, 0.0), (0.9, 1.2, 0.3), (1.3, 0.8, -0.1)] {
        let model = GaussianModel::new(
            GaussianMarket::new(mu, 0.2, s0, 0.95).unwrap(),
            GaussianSignal::new(mu_eps, 0.2).unwrap(),
        );
        let xi = s0 / 0.95 + mu_eps;
        let q = price_posterior_indifference(&model, xi, &u, 10.0, &ConstraintSet::unconstrained()).unwrap();
        assert!(q.cost.abs() < 1e-12, "{}", q.cost);
    }
}

#[test]
fn prior_average_of_posterior_gap_vanishes_at_grossman_stiglitz_cost() {
    // Under the joint prior law, the averaged indifference identity at the
    // Grossman-Stiglitz cost is exactly the Grossman-Stiglitz equation.
    let model = fig2();
    let u = alpha(0.1);
    let free = ConstraintSet::unconstrained();
    let c = price_grossman_stiglitz(&model, &u, 10.0, &free).unwrap().cost;
    assert!(grossman_stiglitz_gap(&model, &u, 10.0, &free, c).unwrap().abs() < 1e-10);
}

#[test]
fn constrained_information_curve_stays_within_wealth() {
    let model = fig2();
    let grid = default_info_grid(&model, 6.0, 80);
    let curve = cost_information_curve(&model, &alpha(0.1), 10.0, &ConstraintSet::no_short_selling(), &grid).unwrap();
    for branch in [Branch::Down, Branch::Up] {
        for (_, c) in curve.branch(branch) {
            assert!((0.0..=10.0).contains(&c));
        }
    }
}
