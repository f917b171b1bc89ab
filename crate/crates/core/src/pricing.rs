//! Cost of information under three utility-indifference rules.
//!
//! Every rule compares two terminal-wealth lotteries: the one produced by
//! the strategy chosen under the prior (the uninformed investor, budget
//! `W0`) and the one produced by the strategy chosen under the posterior
//! after paying `c` for the observation (budget `W0 - c`). The rules differ
//! in which law is used to evaluate them:
//!
//! * posterior indifference: both lotteries under the posterior `π_ξ`;
//! * Grossman–Stiglitz: both under the joint prior law of `(s1, ξ)`;
//! * naive: each under the law its own investor believes.
//!
//! With unconstrained positions the first two have closed forms. Otherwise
//! the informed optimum is recomputed for each trial cost (its feasible set
//! shrinks with the budget) and the root is found by bisection.

use crate::error::{Error, Result};
use crate::market_models::{BinaryModel, GaussianModel, SignalLaw, Spot};
use crate::quadrature::{GaussHermite, SIGNAL_NODES};
use crate::utility_optimizer::{Belief, ConstraintSet, UtilityParams};

/// Absolute tolerance on the cost for every bisection.
pub const COST_TOLERANCE: f64 = 1e-10;
pub const MAX_BISECTIONS: usize = 200;
const MAX_BRACKET_DOUBLINGS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PricingRule {
    Naive,
    GrossmanStiglitz,
    PosteriorIndifference,
}

impl PricingRule {
    pub fn name(&self) -> &'static str {
        match self {
            PricingRule::Naive => "naive",
            PricingRule::GrossmanStiglitz => "grossman_stiglitz",
            PricingRule::PosteriorIndifference => "posterior_indifference",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuoteStatus {
    Priced,
    /// The observation cannot improve the outcome; the cost is zero.
    NoValue,
    /// The informed investor gains without bound; the cost is `+∞`.
    Unbounded,
}

impl QuoteStatus {
    pub fn name(&self) -> &'static str {
        match self {
            QuoteStatus::Priced => "priced",
            QuoteStatus::NoValue => "no_value",
            QuoteStatus::Unbounded => "unbounded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quote {
    pub cost: f64,
    pub status: QuoteStatus,
}

impl Quote {
    pub fn priced(cost: f64) -> Self {
        Quote {
            cost,
            status: QuoteStatus::Priced,
        }
    }

    pub fn no_value() -> Self {
        Quote {
            cost: 0.0,
            status: QuoteStatus::NoValue,
        }
    }

    pub fn unbounded() -> Self {
        Quote {
            cost: f64::INFINITY,
            status: QuoteStatus::Unbounded,
        }
    }
}

/// Per-observation costs under one rule plus their flat rate.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceQuote<S> {
    pub rule: PricingRule,
    pub per_xi: Vec<(S, Quote)>,
    pub flat_rate: f64,
}

/// A market whose prior can be updated by an observation of type `Signal`.
pub trait InformationModel {
    type Signal: Copy + std::fmt::Debug;

    fn spot(&self) -> Spot;
    fn prior(&self) -> Belief;
    fn posterior(&self, xi: Self::Signal) -> Result<Belief>;

    /// Discrete approximation `(ξ, weight)` of the signal law. Exact for the
    /// binary model, Gauss–Hermite nodes for the Gaussian one.
    fn signal_atoms(&self) -> Vec<(Self::Signal, f64)>;

    /// Posterior-indifference cost without position limits.
    fn unconstrained_cost(&self, xi: Self::Signal, u: &UtilityParams) -> Result<Quote>;

    /// Grossman–Stiglitz cost without position limits, where a closed form exists.
    fn unconstrained_grossman_stiglitz(&self, _u: &UtilityParams) -> Option<f64> {
        None
    }

    /// Flat rate of posterior-indifference costs without position limits,
    /// where a closed form exists.
    fn unconstrained_flat_rate(&self, _u: &UtilityParams) -> Option<f64> {
        None
    }
}

impl InformationModel for BinaryModel {
    type Signal = i64;

    fn spot(&self) -> Spot {
        self.market.spot
    }

    fn prior(&self) -> Belief {
        Belief::Binary { prob0: self.market.p }
    }

    fn posterior(&self, xi: i64) -> Result<Belief> {
        Ok(BinaryModel::posterior(self, xi)?.into())
    }

    fn signal_atoms(&self) -> Vec<(i64, f64)> {
        BinaryModel::signal_atoms(self).to_vec()
    }

    fn unconstrained_cost(&self, xi: i64, u: &UtilityParams) -> Result<Quote> {
        let spot = self.spot();
        let free = ConstraintSet::unconstrained();
        let pi = BinaryModel::posterior(self, xi)?.pi;
        let prior_phi = self.prior().optimal_phi(0.0, &spot, u, &free)?;
        let informed_phi = match (Belief::Binary { prob0: pi }).optimal_phi(0.0, &spot, u, &free) {
            Ok(phi) => phi,
            Err(Error::Unbounded(_)) => return Ok(Quote::unbounded()),
            Err(e) => return Err(e),
        };
        if informed_phi == prior_phi {
            return Ok(Quote::no_value());
        }
        Ok(Quote::priced(binary_indifference_cost(pi, prior_phi, informed_phi, &spot, u)))
    }

    fn unconstrained_grossman_stiglitz(&self, u: &UtilityParams) -> Option<f64> {
        let p = self.market.p;
        if p <= 0.0 || p >= 1.0 || self.market.forward() >= 1.0 {
            return None;
        }
        Some(grossman_stiglitz_binary(self.signal.q, &self.spot(), u))
    }
}

impl InformationModel for GaussianModel {
    type Signal = f64;

    fn spot(&self) -> Spot {
        self.market.spot
    }

    fn prior(&self) -> Belief {
        Belief::Gaussian {
            mean: self.market.mu,
            var: self.market.sigma2,
        }
    }

    fn posterior(&self, xi: f64) -> Result<Belief> {
        Ok(GaussianModel::posterior(self, xi).into())
    }

    fn signal_atoms(&self) -> Vec<(f64, f64)> {
        let SignalLaw::Normal { mean, var } = self.signal_law() else {
            unreachable!()
        };
        GaussHermite::new(SIGNAL_NODES).normal_atoms(mean, var).collect()
    }

    fn unconstrained_cost(&self, xi: f64, u: &UtilityParams) -> Result<Quote> {
        let spot = self.spot();
        let post = GaussianModel::posterior(self, xi);
        let prior_phi = self.prior().interior_optimum(&spot, u).expect("gaussian optimum");
        let informed_phi = Belief::from(post).interior_optimum(&spot, u).expect("gaussian optimum");
        if informed_phi == prior_phi {
            return Ok(Quote::no_value());
        }
        Ok(Quote::priced(gaussian_indifference_cost(post.var, prior_phi, informed_phi, &spot, u)))
    }

    fn unconstrained_flat_rate(&self, u: &UtilityParams) -> Option<f64> {
        Some(gaussian_flat_rate(self, u))
    }
}

/// Posterior-indifference cost in the binary market for given uninformed
/// (`prior_phi`) and informed (`informed_phi`) stock positions:
///
/// `c = (δ/α) ln[(π e^{α s̄0 φ} + (1-π) e^{α φ (s̄0-1)}) / (π e^{α s̄0 ϕ} + (1-π) e^{α ϕ (s̄0-1)})]`.
pub fn binary_indifference_cost(pi: f64, prior_phi: f64, informed_phi: f64, spot: &Spot, u: &UtilityParams) -> f64 {
    let a = u.alpha;
    let fwd = spot.forward();
    let log_term = |phi: f64| {
        log_sum_exp(&[
            (pi, a * fwd * phi),
            (1.0 - pi, a * phi * (fwd - 1.0)),
        ])
    };
    spot.delta / a * (log_term(prior_phi) - log_term(informed_phi))
}

/// Posterior-indifference cost in the Gaussian market, `½ α δ σ_ξ² (φ - ϕ)²`.
pub fn gaussian_indifference_cost(
    posterior_var: f64,
    prior_phi: f64,
    informed_phi: f64,
    spot: &Spot,
    u: &UtilityParams,
) -> f64 {
    let d = prior_phi - informed_phi;
    0.5 * u.alpha * spot.delta * posterior_var * d * d
}

/// Grossman–Stiglitz cost in the unconstrained binary market,
/// `(δ/α) ln[1 / (q^{s̄0} (1-q)^{1-s̄0})]`. Independent of the prior `p`.
pub fn grossman_stiglitz_binary(q: f64, spot: &Spot, u: &UtilityParams) -> f64 {
    let fwd = spot.forward();
    let log_likelihood = xlny(fwd, q) + xlny(1.0 - fwd, 1.0 - q);
    -spot.delta / u.alpha * log_likelihood
}

/// Signal average of the unconstrained Gaussian posterior-indifference cost:
/// `(δ σ_ξ² / 2α) [(μ - s̄0)² (σ⁻² - σ_ξ⁻²)² + σ² / (σ_ξ² σ_ε²)]`.
pub fn gaussian_flat_rate(model: &GaussianModel, u: &UtilityParams) -> f64 {
    let m = &model.market;
    let var_eps = model.signal.sigma2_eps;
    if var_eps.is_infinite() {
        return 0.0;
    }
    let var_post = model.posterior_var();
    let premium = m.mu - m.forward();
    let precision_gap = 1.0 / m.sigma2 - 1.0 / var_post;
    m.spot.delta * var_post / (2.0 * u.alpha)
        * (premium * premium * precision_gap * precision_gap + m.sigma2 / (var_post * var_eps))
}

/// `x ln y` with `0 ln 0 = 0`.
fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// `ln Σ w_i exp(x_i)` over terms with positive weight.
fn log_sum_exp(terms: &[(f64, f64)]) -> f64 {
    let top = terms
        .iter()
        .filter(|t| t.0 > 0.0)
        .map(|t| t.1)
        .fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return top;
    }
    let sum: f64 = terms
        .iter()
        .filter(|t| t.0 > 0.0)
        .map(|&(w, x)| w * (x - top).exp())
        .sum();
    top + sum.ln()
}

/// Certainty equivalent of the optimal position under `belief` with the
/// given budget; `+∞` when the optimal position is unbounded.
fn optimal_value(belief: &Belief, budget: f64, spot: &Spot, u: &UtilityParams, cons: &ConstraintSet) -> Result<f64> {
    match belief.optimal_phi(budget, spot, u, cons) {
        Ok(phi) => Ok(belief.certainty_equivalent(phi, budget, spot, u)),
        Err(Error::Unbounded(_)) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Bisection for a root of a decreasing function on `[lo, hi]` with
/// `f(lo) > 0 >= f(hi)`.
fn bisect_decreasing<F>(mut f: F, mut lo: f64, mut hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= COST_TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Shared root search for the posterior-indifference and Grossman–Stiglitz
/// gaps, which are decreasing in the cost and nonnegative at zero.
fn solve_cost<F>(mut gap: F, w0: f64, cons: &ConstraintSet) -> Result<Quote>
where
    F: FnMut(f64) -> Result<f64>,
{
    let at_zero = gap(0.0)?;
    if at_zero == f64::INFINITY {
        return Ok(Quote::unbounded());
    }
    if !(at_zero > 0.0) {
        return Ok(Quote::no_value());
    }
    let hi = if cons.is_bounded() {
        // At W0 + L the informed investor can only hold the borrowed cash.
        w0 + cons.borrow_cap
    } else {
        let mut hi = w0.max(1.0);
        let mut doublings = 0;
        while gap(hi)? > 0.0 {
            hi *= 2.0;
            doublings += 1;
            if doublings > MAX_BRACKET_DOUBLINGS {
                return Ok(Quote::unbounded());
            }
        }
        hi
    };
    if gap(hi)? > 0.0 {
        return Ok(Quote::unbounded());
    }
    Ok(Quote::priced(bisect_decreasing(gap, 0.0, hi)?))
}

/// Gap in certainty equivalents between the informed investor (optimal
/// under the posterior after paying `cost`) and the uninformed strategy,
/// both evaluated under the posterior. Same sign as the utility gap.
pub fn posterior_indifference_gap<M: InformationModel>(
    model: &M,
    xi: M::Signal,
    u: &UtilityParams,
    w0: f64,
    cons: &ConstraintSet,
    cost: f64,
) -> Result<f64> {
    let spot = model.spot();
    let post = model.posterior(xi)?;
    let prior_phi = model.prior().optimal_phi(w0, &spot, u, cons)?;
    let reference = post.certainty_equivalent(prior_phi, w0, &spot, u);
    Ok(optimal_value(&post, w0 - cost, &spot, u, cons)? - reference)
}

/// Expected utilities under the posterior of the uninformed strategy and
/// of the informed strategy after paying `cost`.
pub fn posterior_utilities<M: InformationModel>(
    model: &M,
    xi: M::Signal,
    u: &UtilityParams,
    w0: f64,
    cons: &ConstraintSet,
    cost: f64,
) -> Result<(f64, f64)> {
    let spot = model.spot();
    let post = model.posterior(xi)?;
    let prior_phi = model.prior().optimal_phi(w0, &spot, u, cons)?;
    let uninformed = post.expected_utility(prior_phi, w0, &spot, u);
    let informed = u.utility(optimal_value(&post, w0 - cost, &spot, u, cons)?);
    Ok((uninformed, informed))
}

/// Posterior-indifference cost found by bisection, whatever the constraints.
pub fn price_posterior_indifference_numeric<M: InformationModel>(
    model: &M,
    xi: M::Signal,
    u: &UtilityParams,
    w0: f64,
    cons: &ConstraintSet,
) -> Result<Quote> {
    check_wealth(w0)?;
    let spot = model.spot();
    let post = model.posterior(xi)?;
    let prior_phi = model.prior().optimal_phi(w0, &spot, u, cons)?;
    let reference = post.certainty_equivalent(prior_phi, w0, &spot, u);
    solve_cost(
        |c| Ok(optimal_value(&post, w0 - c, &spot, u, cons)? - reference),
        w0,
        cons,
    )
}

/// Cost `c*(ξ)` at which the informed and uninformed strategies have equal
/// expected utility under the posterior.
pub fn price_posterior_indifference<M: InformationModel>(
    model: &M,
    xi: M::Signal,
    u: &UtilityParams,
    w0: f64,
    cons: &ConstraintSet,
) -> Result<Quote> {
    check_wealth(w0)?;
    if cons.is_unconstrained() {
        model.unconstrained_cost(xi, u)
    } else {
        price_posterior_indifference_numeric(model, xi, u, w0, cons)
    }
}

/// Cost equating the prior-optimal expected utility with the
/// posterior-optimal expected utility after the cost. May be negative.
pub fn price_naive<M: InformationModel>(
    model: &M,
    xi: M::Signal,
    u: &UtilityParams,
    w0: f64,
    cons: &ConstraintSet,
) -> Result<Quote> {
    check_wealth(w0)?;
    let spot = model.spot();
    let post = model.posterior(xi)?;
    let reference = optimal_value(&model.prior(), w0, &spot, u, cons)?;
    let gap = |c: f64| -> Result<f64> { Ok(optimal_value(&post, w0 - c, &spot, u, cons)? - reference) };
    let (lo, hi) = (-w0, w0);
    let (g_lo, g_hi) = (gap(lo)?, gap(hi)?);
    if g_lo == 0.0 {
        return Ok(Quote::priced(lo));
    }
    if !(g_lo > 0.0 && g_hi <= 0.0) || g_lo.is_infinite() {
        return Err(Error::NoRoot { lo, hi });
    }
    Ok(Quote::priced(bisect_decreasing(gap, lo, hi)?))
}

/// Log of the normalised informed disutility `E[exp(-α(W - W0/δ))]` averaged
/// over the signal law, after paying `cost`.
fn informed_log_disutility<M: InformationModel>(
    model: &M,
    atoms: &[(M::Signal, f64)],
    u: &UtilityParams,
    w0: f64,
    cons: &ConstraintSet,
    cost: f64,
) -> Result<f64> {
    let spot = model.spot();
    let base = w0 / spot.delta;
    let mut terms = Vec::with_capacity(atoms.len());
    for &(xi, weight) in atoms {
        if weight <= 0.0 {
            continue;
        }
        let post = model.posterior(xi)?;
        let value = optimal_value(&post, w0 - cost, &spot, u, cons)?;
        terms.push((weight, -u.alpha * (value - base)));
    }
    Ok(log_sum_exp(&terms))
}

/// Gap for the Grossman–Stiglitz rule in log-disutility units: positive
/// while the informed investor is better off on average under the prior.
pub fn grossman_stiglitz_gap<M: InformationModel>(
    model: &M,
    u: &UtilityParams,
    w0: f64,
    cons: &ConstraintSet,
    cost: f64,
) -> Result<f64> {
    let atoms = model.signal_atoms();
    gs_gap_with_atoms(model, &atoms, u, w0, cons, cost)
}

fn gs_gap_with_atoms<M: InformationModel>(
    model: &M,
    atoms: &[(M::Signal, f64)],
    u: &UtilityParams,
    w0: f64,
    cons: &ConstraintSet,
    cost: f64,
) -> Result<f64> {
    let spot = model.spot();
    let prior = model.prior();
    let prior_phi = prior.optimal_phi(w0, &spot, u, cons)?;
    let reference = -u.alpha * (prior.certainty_equivalent(prior_phi, w0, &spot, u) - w0 / spot.delta);
    Ok(reference - informed_log_disutility(model, atoms, u, w0, cons, cost)?)
}

/// Grossman–Stiglitz cost by bisection, whatever the constraints.
pub fn price_grossman_stiglitz_numeric<M: InformationModel>(
    model: &M,
    u: &UtilityParams,
    w0: f64,
    cons: &ConstraintSet,
) -> Result<Quote> {
    check_wealth(w0)?;
    let atoms = model.signal_atoms();
    solve_cost(|c| gs_gap_with_atoms(model, &atoms, u, w0, cons, c), w0, cons)
}

/// Single cost equating expected utilities of the two strategies under the
/// joint prior law of the price and the signal.
pub fn price_grossman_stiglitz<M: InformationModel>(
    model: &M,
    u: &UtilityParams,
    w0: f64,
    cons: &ConstraintSet,
) -> Result<Quote> {
    check_wealth(w0)?;
    if cons.is_unconstrained() {
        if let Some(c) = model.unconstrained_grossman_stiglitz(u) {
            return Ok(if c.is_infinite() { Quote::unbounded() } else { Quote::priced(c) });
        }
    }
    price_grossman_stiglitz_numeric(model, u, w0, cons)
}

/// Signal-law average of the posterior-indifference costs. `+∞` if any
/// observation of positive weight has an infinite cost.
pub fn flat_rate<M: InformationModel>(model: &M, u: &UtilityParams, w0: f64, cons: &ConstraintSet) -> Result<f64> {
    check_wealth(w0)?;
    if cons.is_unconstrained() {
        if let Some(c) = model.unconstrained_flat_rate(u) {
            return Ok(c);
        }
    }
    let mut total = 0.0;
    for (xi, weight) in model.signal_atoms() {
        if weight <= 0.0 {
            continue;
        }
        let quote = price_posterior_indifference(model, xi, u, w0, cons)?;
        if quote.cost.is_infinite() {
            return Ok(f64::INFINITY);
        }
        total += weight * quote.cost;
    }
    Ok(total)
}

/// Signal-law average of the naive costs.
fn naive_flat_rate<M: InformationModel>(model: &M, u: &UtilityParams, w0: f64, cons: &ConstraintSet) -> Result<f64> {
    let mut total = 0.0;
    for (xi, weight) in model.signal_atoms() {
        if weight > 0.0 {
            total += weight * price_naive(model, xi, u, w0, cons)?.cost;
        }
    }
    Ok(total)
}

/// Quote `rule` at each observation in `xis` together with its flat rate.
pub fn price_quote<M: InformationModel>(
    model: &M,
    rule: PricingRule,
    xis: &[M::Signal],
    u: &UtilityParams,
    w0: f64,
    cons: &ConstraintSet,
) -> Result<PriceQuote<M::Signal>> {
    let (per_xi, flat) = match rule {
        PricingRule::PosteriorIndifference => {
            let per_xi = xis
                .iter()
                .map(|&xi| Ok((xi, price_posterior_indifference(model, xi, u, w0, cons)?)))
                .collect::<Result<Vec<_>>>()?;
            (per_xi, flat_rate(model, u, w0, cons)?)
        }
        PricingRule::Naive => {
            let per_xi = xis
                .iter()
                .map(|&xi| Ok((xi, price_naive(model, xi, u, w0, cons)?)))
                .collect::<Result<Vec<_>>>()?;
            (per_xi, naive_flat_rate(model, u, w0, cons)?)
        }
        PricingRule::GrossmanStiglitz => {
            let quote = price_grossman_stiglitz(model, u, w0, cons)?;
            (xis.iter().map(|&xi| (xi, quote)).collect(), quote.cost)
        }
    };
    Ok(PriceQuote {
        rule,
        per_xi,
        flat_rate: flat,
    })
}

fn check_wealth(w0: f64) -> Result<()> {
    if w0 > 0.0 && w0.is_finite() {
        Ok(())
    } else {
        Err(crate::error::invalid("W0", format!("initial wealth must be positive, got {w0}")))
    }
}
