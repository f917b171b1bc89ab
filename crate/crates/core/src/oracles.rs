//! Brute-force counterparts of the closed forms: outcome enumeration,
//! quadrature, grid search and sign-change root scanning.
//!
//! Nothing here calls the closed-form cost or flat-rate formulas it is used
//! to check. The verification table compares the two sides.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::information_measures;
use crate::market_models::{BinaryMarket, BinaryModel, GaussianMarket, GaussianModel, GaussianPosterior};
use crate::pricing;
use crate::quadrature::{GaussHermite, SIGNAL_NODES};
use crate::utility_optimizer::{
    self, optimal_allocation_binary, optimal_allocation_gaussian, Allocation, ConstraintSet, UtilityParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    Enumeration,
    Quadrature,
    GridSearch,
    RootScan,
    MonteCarlo,
}

impl fmt::Display for OracleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleMethod::Enumeration => "enumeration",
            OracleMethod::Quadrature => "quadrature",
            OracleMethod::GridSearch => "grid_search",
            OracleMethod::RootScan => "root_scan",
            OracleMethod::MonteCarlo => "mc",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub quantity_name: String,
    pub closed_form: f64,
    pub oracle_value: f64,
    pub abs_err: f64,
    pub method: OracleMethod,
    pub tolerance: f64,
}

impl OracleReport {
    pub fn new(name: impl Into<String>, closed_form: f64, oracle_value: f64, method: OracleMethod, tolerance: f64) -> Self {
        OracleReport {
            quantity_name: name.into(),
            closed_form,
            oracle_value,
            abs_err: (closed_form - oracle_value).abs(),
            method,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.abs_err <= self.tolerance
    }
}

/// Expected utility of the lottery `θ/δ + φ s1`, `s1 ∈ {0, 1}`, by direct
/// enumeration of the two outcomes.
pub fn enumerate_expected_utility_binary(alloc: &Allocation, prob0: f64, m: &BinaryMarket, u: &UtilityParams) -> f64 {
    let cash = alloc.theta / m.spot.delta;
    let outcomes = [(prob0, 0.0), (1.0 - prob0, 1.0)];
    outcomes
        .iter()
        .filter(|(w, _)| *w > 0.0)
        .map(|&(w, s1)| w * u.utility(cash + alloc.phi * s1))
        .sum()
}

/// `E[U(θ/δ + φ s1)]` for `s1 ~ Normal(mean, var)` by Gauss–Hermite quadrature.
pub fn quadrature_expected_utility_gaussian(
    alloc: &Allocation,
    mean: f64,
    var: f64,
    m: &GaussianMarket,
    u: &UtilityParams,
    nodes: usize,
) -> f64 {
    let cash = alloc.theta / m.spot.delta;
    if var == 0.0 {
        return u.utility(cash + alloc.phi * mean);
    }
    GaussHermite::new(nodes.max(32)).expect_normal(mean, var, |s1| u.utility(cash + alloc.phi * s1))
}

/// Maximiser of `objective` over `[lo, hi]`: best point of a uniform grid of
/// `steps` intervals, then golden-section search on its neighbourhood down
/// to width `1e-10`.
pub fn grid_search_allocation<F: Fn(f64) -> f64>(objective: F, lo: f64, hi: f64, steps: usize) -> f64 {
    let steps = steps.max(1);
    let h = (hi - lo) / steps as f64;
    let best = (0..=steps)
        .map(|k| lo + h * k as f64)
        .map(|x| (x, objective(x)))
        .fold((lo, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    let (mut a, mut b) = ((best.0 - h).max(lo), (best.0 + h).min(hi));
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (objective(x1), objective(x2));
    while b - a > 1e-10 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1);
        }
    }
    // Boundary maxima: the golden section never evaluates the end points.
    let mid = 0.5 * (a + b);
    [lo, hi, mid]
        .into_iter()
        .map(|x| (x, objective(x)))
        .fold((mid, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc })
        .0
}

/// Root of `gap` on `[c_lo, c_hi]`: scan `steps` intervals for the first
/// sign change, then bisect it to `1e-12`.
pub fn scan_indifference_root<F: Fn(f64) -> f64>(gap: F, c_lo: f64, c_hi: f64, steps: usize) -> Result<f64> {
    let steps = steps.max(1);
    let h = (c_hi - c_lo) / steps as f64;
    let mut prev_x = c_lo;
    let mut prev_g = gap(c_lo);
    if prev_g == 0.0 {
        return Ok(c_lo);
    }
    for k in 1..=steps {
        let x = if k == steps { c_hi } else { c_lo + h * k as f64 };
        let g = gap(x);
        if g == 0.0 {
            return Ok(x);
        }
        if (g > 0.0) != (prev_g > 0.0) {
            let (mut a, mut b) = (prev_x, x);
            let positive_left = prev_g > 0.0;
            while b - a > 1e-12 {
                let mid = 0.5 * (a + b);
                if (gap(mid) > 0.0) == positive_left {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Ok(0.5 * (a + b));
        }
        prev_x = x;
        prev_g = g;
    }
    Err(Error::NoRoot { lo: c_lo, hi: c_hi })
}

/// Posterior-indifference cost in the binary market by root scanning of the
/// enumerated utility gap on `[0, c_hi]`.
pub fn binary_posterior_cost_by_scan(
    model: &BinaryModel,
    xi: i64,
    u: &UtilityParams,
    w0: f64,
    cons: &ConstraintSet,
    c_hi: f64,
) -> Result<f64> {
    let m = &model.market;
    let pi = model.posterior(xi)?.pi;
    let uninformed = optimal_allocation_binary(m.p, m, u, w0, cons)?;
    let reference = enumerate_expected_utility_binary(&uninformed, pi, m, u);
    let gap = |c: f64| match optimal_allocation_binary(pi, m, u, w0 - c, cons) {
        Ok(alloc) => enumerate_expected_utility_binary(&alloc, pi, m, u) - reference,
        Err(_) => f64::NAN,
    };
    scan_indifference_root(gap, 0.0, c_hi, 2000)
}

/// Posterior-indifference cost in the Gaussian market by root scanning of
/// the expected-utility gap on `[0, c_hi]`.
pub fn gaussian_posterior_cost_by_scan(
    model: &GaussianModel,
    xi: f64,
    u: &UtilityParams,
    w0: f64,
    cons: &ConstraintSet,
    c_hi: f64,
) -> Result<f64> {
    let m = &model.market;
    let post = model.posterior(xi);
    let uninformed = optimal_allocation_gaussian(m.mu, m.sigma2, m, u, w0, cons)?;
    let reference = utility_optimizer::expected_utility_gaussian(uninformed.phi, post.mean, post.var, m, u, w0);
    let gap = |c: f64| match optimal_allocation_gaussian(post.mean, post.var, m, u, w0 - c, cons) {
        Ok(alloc) => {
            utility_optimizer::expected_utility_gaussian(alloc.phi, post.mean, post.var, m, u, w0 - c) - reference
        }
        Err(_) => f64::NAN,
    };
    scan_indifference_root(gap, 0.0, c_hi, 2000)
}

/// Grossman–Stiglitz cost in the binary market by enumerating the four
/// joint outcomes of `(s1, ε)`. Unbounded informed positions on a sure
/// outcome contribute utility one.
pub fn binary_grossman_stiglitz_by_enumeration(
    model: &BinaryModel,
    u: &UtilityParams,
    w0: f64,
    cons: &ConstraintSet,
    c_hi: f64,
) -> Result<f64> {
    let m = &model.market;
    let (p, q) = (m.p, model.signal.q);
    let uninformed = optimal_allocation_binary(p, m, u, w0, cons)?;
    let joint = [
        (p * q, 0.0, 0_i64),
        (p * (1.0 - q), 0.0, 1),
        ((1.0 - p) * q, 1.0, 1),
        ((1.0 - p) * (1.0 - q), 1.0, 2),
    ];
    let wealth = |alloc: &Allocation, s1: f64| alloc.theta / m.spot.delta + alloc.phi * s1;
    let reference: f64 = joint
        .iter()
        .map(|&(w, s1, _)| w * u.utility(wealth(&uninformed, s1)))
        .sum();
    let gap = |c: f64| -> f64 {
        let mut total = 0.0;
        for &(w, s1, xi) in &joint {
            if w == 0.0 {
                continue;
            }
            let pi = match model.posterior(xi) {
                Ok(post) => post.pi,
                Err(_) => return f64::NAN,
            };
            total += w * match optimal_allocation_binary(pi, m, u, w0 - c, cons) {
                Ok(alloc) => u.utility(wealth(&alloc, s1)),
                Err(Error::Unbounded(_)) => 1.0,
                Err(_) => return f64::NAN,
            };
        }
        total - reference
    };
    scan_indifference_root(gap, 0.0, c_hi, 2000)
}

/// Seeded Monte Carlo estimate of the signal-average of the unconstrained
/// Gaussian posterior-indifference cost. Returns `(mean, standard error)`.
pub fn monte_carlo_flat_rate(model: &GaussianModel, u: &UtilityParams, draws: usize, seed: u64) -> (f64, f64) {
    let m = &model.market;
    let spot = m.spot;
    let free = ConstraintSet::unconstrained();
    let prior_phi = optimal_allocation_gaussian(m.mu, m.sigma2, m, u, 1.0, &free)
        .expect("unconstrained gaussian optimum")
        .phi;
    let mean = m.mu + model.signal.mu_eps;
    let sd = (m.sigma2 + model.signal.sigma2_eps).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..draws {
        let z: f64 = StandardNormal.sample(&mut rng);
        let post = model.posterior(mean + sd * z);
        let informed = optimal_allocation_gaussian(post.mean, post.var, m, u, 1.0, &free)
            .expect("unconstrained gaussian optimum")
            .phi;
        let d = prior_phi - informed;
        let cost = 0.5 * u.alpha * spot.delta * post.var * d * d;
        sum += cost;
        sum_sq += cost * cost;
    }
    let n = draws as f64;
    let avg = sum / n;
    let var = (sum_sq / n - avg * avg).max(0.0) * n / (n - 1.0);
    (avg, (var / n).sqrt())
}

/// `∫ π ln(π/p)` by composite Simpson on `±half_width_sd` posterior standard
/// deviations around the posterior mean.
pub fn kl_by_quadrature(post: &GaussianPosterior, m: &GaussianMarket, half_width_sd: f64, intervals: usize) -> f64 {
    let log_pdf = |x: f64, mean: f64, var: f64| {
        -0.5 * (x - mean) * (x - mean) / var - 0.5 * (2.0 * std::f64::consts::PI * var).ln()
    };
    let n = intervals + intervals % 2;
    let sd = post.var.sqrt();
    let (a, b) = (post.mean - half_width_sd * sd, post.mean + half_width_sd * sd);
    let h = (b - a) / n as f64;
    let integrand = |x: f64| {
        let lp = log_pdf(x, post.mean, post.var);
        lp.exp() * (lp - log_pdf(x, m.mu, m.sigma2))
    };
    let mut total = integrand(a) + integrand(b);
    for k in 1..n {
        let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
        total += weight * integrand(a + h * k as f64);
    }
    total * h / 3.0
}

/// Closed forms under verification. Replace a field to check a variant.
#[derive(Clone, Copy)]
pub struct ClosedForms {
    pub binary_optimum: fn(f64, &BinaryMarket, &UtilityParams) -> f64,
    pub gaussian_optimum: fn(f64, f64, &GaussianMarket, &UtilityParams) -> f64,
    pub binary_expected_utility: fn(f64, f64, &BinaryMarket, &UtilityParams, f64) -> f64,
    pub gaussian_expected_utility: fn(f64, f64, f64, &GaussianMarket, &UtilityParams, f64) -> f64,
    pub binary_cost: fn(&BinaryModel, i64, &UtilityParams) -> f64,
    pub gaussian_cost: fn(&GaussianModel, f64, &UtilityParams) -> f64,
    pub grossman_stiglitz: fn(&BinaryModel, &UtilityParams) -> f64,
    pub gaussian_flat_rate: fn(&GaussianModel, &UtilityParams) -> f64,
    pub kl_gaussian: fn(&GaussianPosterior, &GaussianMarket) -> f64,
}

fn lib_binary_optimum(prob0: f64, m: &BinaryMarket, u: &UtilityParams) -> f64 {
    optimal_allocation_binary(prob0, m, u, 0.0, &ConstraintSet::unconstrained()).map_or(f64::NAN, |a| a.phi)
}

fn lib_gaussian_optimum(mean: f64, var: f64, m: &GaussianMarket, u: &UtilityParams) -> f64 {
    optimal_allocation_gaussian(mean, var, m, u, 0.0, &ConstraintSet::unconstrained()).map_or(f64::NAN, |a| a.phi)
}

fn lib_binary_cost(model: &BinaryModel, xi: i64, u: &UtilityParams) -> f64 {
    pricing::InformationModel::unconstrained_cost(model, xi, u).map_or(f64::NAN, |q| q.cost)
}

fn lib_gaussian_cost(model: &GaussianModel, xi: f64, u: &UtilityParams) -> f64 {
    pricing::InformationModel::unconstrained_cost(model, xi, u).map_or(f64::NAN, |q| q.cost)
}

fn lib_grossman_stiglitz(model: &BinaryModel, u: &UtilityParams) -> f64 {
    pricing::grossman_stiglitz_binary(model.signal.q, &model.market.spot, u)
}

impl Default for ClosedForms {
    fn default() -> Self {
        ClosedForms {
            binary_optimum: lib_binary_optimum,
            gaussian_optimum: lib_gaussian_optimum,
            binary_expected_utility: utility_optimizer::expected_utility_binary,
            gaussian_expected_utility: utility_optimizer::expected_utility_gaussian,
            binary_cost: lib_binary_cost,
            gaussian_cost: lib_gaussian_cost,
            grossman_stiglitz: lib_grossman_stiglitz,
            gaussian_flat_rate: pricing::gaussian_flat_rate,
            kl_gaussian: information_measures::kl_gaussian,
        }
    }
}

/// Parameters the verification table is run on.
#[derive(Debug, Clone, Copy)]
pub struct VerifySetup {
    pub binary: BinaryModel,
    pub binary_utility: UtilityParams,
    pub binary_w0: f64,
    pub gaussian: GaussianModel,
    pub gaussian_utility: UtilityParams,
    pub gaussian_w0: f64,
    pub mc_draws: usize,
    pub mc_seed: u64,
}

impl Default for VerifySetup {
    fn default() -> Self {
        use crate::market_models::{BinarySignal, GaussianSignal};
        VerifySetup {
            binary: BinaryModel::new(
                BinaryMarket::new(0.4, 0.5, 0.95).expect("valid"),
                BinarySignal::new(0.7).expect("valid"),
            ),
            binary_utility: UtilityParams { alpha: 0.1 },
            binary_w0: 5.0,
            gaussian: GaussianModel::new(
                GaussianMarket::new(1.1, 0.2, 1.0, 0.95).expect("valid"),
                GaussianSignal::new(0.0, 0.2).expect("valid"),
            ),
            gaussian_utility: UtilityParams { alpha: 0.1 },
            gaussian_w0: 10.0,
            mc_draws: 1_000_000,
            mc_seed: 20_240_917,
        }
    }
}

pub const ROOT_TOLERANCE: f64 = 1e-9;
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;
pub const GRID_SEARCH_TOLERANCE: f64 = 1e-6;
pub const ENUMERATION_TOLERANCE: f64 = 1e-12;
pub const KL_QUADRATURE_TOLERANCE: f64 = 1e-6;

/// Run every closed-form check on `setup`. Each row carries its tolerance.
pub fn run_verification(setup: &VerifySetup, forms: &ClosedForms) -> Vec<OracleReport> {
    let mut rows = Vec::new();
    let free = ConstraintSet::unconstrained();

    // Binary market.
    let bm = &setup.binary.market;
    let bu = &setup.binary_utility;
    let w0 = setup.binary_w0;
    let fwd = bm.forward();
    let p = bm.p;
    let excess_binary = |phi: f64| -phi * fwd - (p + (1.0 - p) * (-bu.alpha * phi).exp()).ln() / bu.alpha;
    let phi_closed = (forms.binary_optimum)(p, bm, bu);
    let phi_search = grid_search_allocation(excess_binary, -100.0, 100.0, 100_000);
    rows.push(OracleReport::new("binary_optimal_phi", phi_closed, phi_search, OracleMethod::GridSearch, GRID_SEARCH_TOLERANCE));

    for phi in [0.0, phi_search, -2.0, 7.5] {
        let alloc = Allocation::from_stock(phi, w0, bm.spot.s0);
        rows.push(OracleReport::new(
            format!("binary_expected_utility[phi={phi:.4}]"),
            (forms.binary_expected_utility)(phi, p, bm, bu, w0),
            enumerate_expected_utility_binary(&alloc, p, bm, bu),
            OracleMethod::Enumeration,
            ENUMERATION_TOLERANCE,
        ));
    }

    let c_hi = 20.0 * w0;
    let scan = binary_posterior_cost_by_scan(&setup.binary, 1, bu, w0, &free, c_hi).unwrap_or(f64::NAN);
    rows.push(OracleReport::new(
        "binary_posterior_cost[xi=1]",
        (forms.binary_cost)(&setup.binary, 1, bu),
        scan,
        OracleMethod::RootScan,
        ROOT_TOLERANCE,
    ));

    let gs = binary_grossman_stiglitz_by_enumeration(&setup.binary, bu, w0, &free, c_hi).unwrap_or(f64::NAN);
    rows.push(OracleReport::new(
        "binary_grossman_stiglitz",
        (forms.grossman_stiglitz)(&setup.binary, bu),
        gs,
        OracleMethod::Enumeration,
        ROOT_TOLERANCE,
    ));

    // Gaussian market.
    let g = &setup.gaussian;
    let gm = &g.market;
    let gu = &setup.gaussian_utility;
    let gw0 = setup.gaussian_w0;
    let gfwd = gm.forward();
    let excess_gaussian = |phi: f64| phi * (gm.mu - gfwd) - 0.5 * gu.alpha * phi * phi * gm.sigma2;
    let gphi_closed = (forms.gaussian_optimum)(gm.mu, gm.sigma2, gm, gu);
    let gphi_search = grid_search_allocation(excess_gaussian, -100.0, 100.0, 100_000);
    rows.push(OracleReport::new("gaussian_optimal_phi", gphi_closed, gphi_search, OracleMethod::GridSearch, GRID_SEARCH_TOLERANCE));

    for phi in [0.0, gphi_search, -3.0, 8.0] {
        let alloc = Allocation::from_stock(phi, gw0, gm.spot.s0);
        rows.push(OracleReport::new(
            format!("gaussian_expected_utility[phi={phi:.4}]"),
            (forms.gaussian_expected_utility)(phi, gm.mu, gm.sigma2, gm, gu, gw0),
            quadrature_expected_utility_gaussian(&alloc, gm.mu, gm.sigma2, gm, gu, 512),
            OracleMethod::Quadrature,
            QUADRATURE_TOLERANCE,
        ));
    }

    let sd = (gm.sigma2 + g.signal.sigma2_eps).sqrt();
    let centre = gm.mu + g.signal.mu_eps;
    for k in [-1.5, -0.5, 0.0, 0.9, 2.0] {
        let xi = centre + k * sd;
        let closed = (forms.gaussian_cost)(g, xi, gu);
        let hi = 4.0 * closed.max(gw0);
        let scan = gaussian_posterior_cost_by_scan(g, xi, gu, gw0, &free, hi);
        let scan = match scan {
            Ok(c) => c,
            // A zero cost has no sign change to scan for.
            Err(Error::NoRoot { .. }) if closed == 0.0 => 0.0,
            Err(_) => f64::NAN,
        };
        rows.push(OracleReport::new(
            format!("gaussian_posterior_cost[xi={xi:.4}]"),
            closed,
            scan,
            OracleMethod::RootScan,
            ROOT_TOLERANCE,
        ));
    }

    let flat_closed = (forms.gaussian_flat_rate)(g, gu);
    let gh = GaussHermite::new(SIGNAL_NODES);
    let law_mean = gm.mu + g.signal.mu_eps;
    let flat_quad = gh.expect_normal(law_mean, sd * sd, |xi| (forms.gaussian_cost)(g, xi, gu));
    // The quadrature side reuses the per-observation formula, so this row checks the averaging.
    let flat_quad_independent = gh.expect_normal(law_mean, sd * sd, |xi| {
        let post = g.posterior(xi);
        let informed = optimal_allocation_gaussian(post.mean, post.var, gm, gu, gw0, &free).map_or(f64::NAN, |a| a.phi);
        let d = gphi_closed - informed;
        0.5 * gu.alpha * gm.spot.delta * post.var * d * d
    });
    rows.push(OracleReport::new("gaussian_flat_rate", flat_closed, flat_quad_independent, OracleMethod::Quadrature, QUADRATURE_TOLERANCE));
    rows.push(OracleReport::new("gaussian_flat_rate_of_cost_formula", flat_closed, flat_quad, OracleMethod::Quadrature, QUADRATURE_TOLERANCE));

    if setup.mc_draws > 1 {
        let (mc, se) = monte_carlo_flat_rate(g, gu, setup.mc_draws, setup.mc_seed);
        rows.push(OracleReport::new("gaussian_flat_rate_mc", flat_closed, mc, OracleMethod::MonteCarlo, 3.0 * se));
    }

    for k in [0.0, 1.0, -2.0] {
        let post = g.posterior(centre + k * sd);
        rows.push(OracleReport::new(
            format!("kl_gaussian[xi={:.4}]", centre + k * sd),
            (forms.kl_gaussian)(&post, gm),
            kl_by_quadrature(&post, gm, 10.0, 20_000),
            OracleMethod::Quadrature,
            KL_QUADRATURE_TOLERANCE,
        ));
    }

    rows
}
