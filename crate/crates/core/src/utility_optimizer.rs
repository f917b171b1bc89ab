//! Exponential (CARA) utility and the optimal one-period split between
//! cash and stock, with optional short-sale and borrowing limits.
//!
//! Terminal wealth is written as `W1 = budget/δ + φ (s1 - s̄0)`, which is
//! `θ/δ + φ s1` with the cash position eliminated through the budget
//! identity `θ = budget - φ s0`. This form keeps infinite positions
//! meaningful: a short position of `-∞` in a stock that surely pays zero
//! yields `+∞` wealth rather than `∞ - ∞`.

use crate::error::{invalid, Direction, Error, Result};
use crate::market_models::{BinaryMarket, BinaryPosterior, GaussianMarket, GaussianPosterior, Spot};

/// `U(x) = 1 - exp(-αx)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityParams {
    pub alpha: f64,
}

impl UtilityParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid("alpha", format!("risk aversion must be positive, got {alpha}")));
        }
        Ok(UtilityParams { alpha })
    }

    pub fn utility(&self, wealth: f64) -> f64 {
        1.0 - (-self.alpha * wealth).exp()
    }
}

/// Position limits. Cash may go down to `-borrow_cap`; the stock position
/// may go negative only when `allow_stock_short` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSet {
    pub allow_stock_short: bool,
    pub borrow_cap: f64,
}

impl ConstraintSet {
    pub fn new(allow_stock_short: bool, borrow_cap: f64) -> Result<Self> {
        if !(borrow_cap >= 0.0) {
            return Err(invalid(
                "borrow_cap",
                format!("borrowing cap must be nonnegative or infinite, got {borrow_cap}"),
            ));
        }
        Ok(ConstraintSet {
            allow_stock_short,
            borrow_cap,
        })
    }

    pub fn unconstrained() -> Self {
        ConstraintSet {
            allow_stock_short: true,
            borrow_cap: f64::INFINITY,
        }
    }

    /// No stock shorting and no cash borrowing.
    pub fn no_short_selling() -> Self {
        ConstraintSet {
            allow_stock_short: false,
            borrow_cap: 0.0,
        }
    }

    /// No stock shorting, cash borrowing up to `cap`.
    pub fn capped_borrowing(cap: f64) -> Result<Self> {
        Self::new(false, cap)
    }

    pub fn is_unconstrained(&self) -> bool {
        self.allow_stock_short && self.borrow_cap == f64::INFINITY
    }

    /// True when every budget induces a compact interval of stock positions.
    pub fn is_bounded(&self) -> bool {
        !self.allow_stock_short && self.borrow_cap.is_finite()
    }

    /// Feasible interval `[φ_lo, φ_hi]` of stock units for a given budget.
    pub fn bounds(&self, budget: f64, s0: f64) -> (f64, f64) {
        let lo = if self.allow_stock_short { f64::NEG_INFINITY } else { 0.0 };
        let hi = (budget + self.borrow_cap) / s0;
        (lo, hi)
    }
}

impl Default for ConstraintSet {
    fn default() -> Self {
        Self::unconstrained()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocation {
    /// Cash held in the money market account.
    pub theta: f64,
    /// Units of stock.
    pub phi: f64,
}

impl Allocation {
    pub fn from_stock(phi: f64, budget: f64, s0: f64) -> Self {
        Allocation {
            theta: budget - phi * s0,
            phi,
        }
    }
}

/// Law of `s1` used by an investor when choosing a position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Belief {
    /// `s1 ∈ {0, 1}` with `P(s1 = 0) = prob0`.
    Binary { prob0: f64 },
    /// `s1 ~ Normal(mean, var)`.
    Gaussian { mean: f64, var: f64 },
}

impl From<BinaryPosterior> for Belief {
    fn from(p: BinaryPosterior) -> Self {
        Belief::Binary { prob0: p.pi }
    }
}

impl From<GaussianPosterior> for Belief {
    fn from(p: GaussianPosterior) -> Self {
        Belief::Gaussian {
            mean: p.mean,
            var: p.var,
        }
    }
}

impl Belief {
    /// Certainty equivalent `-(1/α) ln E[exp(-α W1)]` of holding `phi` units.
    ///
    /// `E[U(W1)] = U(ce)` exactly for exponential utility, so comparisons of
    /// certainty equivalents and of expected utilities agree.
    pub fn certainty_equivalent(&self, phi: f64, budget: f64, spot: &Spot, u: &UtilityParams) -> f64 {
        let cash = budget / spot.delta;
        let fwd = spot.forward();
        match *self {
            Belief::Gaussian { mean, var } => {
                if phi == 0.0 {
                    return cash;
                }
                cash + phi * (mean - fwd) - 0.5 * u.alpha * phi * phi * var
            }
            Belief::Binary { prob0 } => {
                let outcomes = [(prob0, -fwd), (1.0 - prob0, 1.0 - fwd)];
                let mut terms = [(0.0, 0.0); 2];
                let mut n = 0;
                for (weight, excess) in outcomes {
                    if weight > 0.0 {
                        let w = if phi == 0.0 { cash } else { cash + phi * excess };
                        terms[n] = (weight, w);
                        n += 1;
                    }
                }
                let terms = &terms[..n];
                let worst = terms.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
                if !worst.is_finite() {
                    return worst;
                }
                let sum: f64 = terms
                    .iter()
                    .map(|&(weight, w)| weight * (-u.alpha * (w - worst)).exp())
                    .sum();
                worst - sum.ln() / u.alpha
            }
        }
    }

    pub fn expected_utility(&self, phi: f64, budget: f64, spot: &Spot, u: &UtilityParams) -> f64 {
        u.utility(self.certainty_equivalent(phi, budget, spot, u))
    }

    /// Unconstrained maximiser of the expected utility, when it is finite.
    pub fn interior_optimum(&self, spot: &Spot, u: &UtilityParams) -> Option<f64> {
        let fwd = spot.forward();
        match *self {
            Belief::Gaussian { mean, var } => Some((mean - fwd) / (u.alpha * var)),
            Belief::Binary { prob0 } => {
                if prob0 <= 0.0 || prob0 >= 1.0 || fwd >= 1.0 {
                    return None;
                }
                Some(((1.0 - prob0) * (1.0 - fwd) / (prob0 * fwd)).ln() / u.alpha)
            }
        }
    }

    /// Optimal stock units within the constraint set.
    pub fn optimal_phi(&self, budget: f64, spot: &Spot, u: &UtilityParams, cons: &ConstraintSet) -> Result<f64> {
        let (lo, hi) = cons.bounds(budget, spot.s0);
        if hi < lo {
            return Err(invalid(
                "budget",
                format!("budget {budget} leaves no feasible position under the constraints"),
            ));
        }
        let target = match self.interior_optimum(spot, u) {
            Some(phi) => phi,
            None => {
                let Belief::Binary { prob0 } = *self else {
                    unreachable!("gaussian optimum always exists")
                };
                let fwd = spot.forward();
                // Expected utility is monotone in φ; pick the favoured end.
                let slope = if prob0 >= 1.0 {
                    -1.0
                } else if prob0 <= 0.0 {
                    1.0 - fwd
                } else {
                    if lo == f64::NEG_INFINITY {
                        return Err(Error::DegenerateMarket { forward: fwd });
                    }
                    -1.0
                };
                if slope > 0.0 {
                    f64::INFINITY
                } else if slope < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    0.0
                }
            }
        };
        let phi = target.clamp(lo, hi);
        if phi == f64::INFINITY {
            Err(Error::Unbounded(Direction::Long))
        } else if phi == f64::NEG_INFINITY {
            Err(Error::Unbounded(Direction::Short))
        } else {
            Ok(phi)
        }
    }
}

/// Expected utility of holding `phi` units in the binary market,
/// `1 - exp(-α(budget - φ s0)/δ) (prob0 + (1 - prob0) exp(-αφ))`.
pub fn expected_utility_binary(phi: f64, prob0: f64, m: &BinaryMarket, u: &UtilityParams, budget: f64) -> f64 {
    let a = u.alpha;
    1.0 - (-a * (budget - phi * m.spot.s0) / m.spot.delta).exp() * (prob0 + (1.0 - prob0) * (-a * phi).exp())
}

/// Expected utility of holding `phi` units when `s1 ~ Normal(mean, var)`.
pub fn expected_utility_gaussian(
    phi: f64,
    mean: f64,
    var: f64,
    m: &GaussianMarket,
    u: &UtilityParams,
    budget: f64,
) -> f64 {
    let a = u.alpha;
    let exponent = (budget - phi * m.spot.s0) / m.spot.delta + phi * mean - 0.5 * a * phi * phi * var;
    1.0 - (-a * exponent).exp()
}

pub fn optimal_allocation_binary(
    prob0: f64,
    m: &BinaryMarket,
    u: &UtilityParams,
    budget: f64,
    cons: &ConstraintSet,
) -> Result<Allocation> {
    let phi = Belief::Binary { prob0 }.optimal_phi(budget, &m.spot, u, cons)?;
    Ok(Allocation::from_stock(phi, budget, m.spot.s0))
}

pub fn optimal_allocation_gaussian(
    mean: f64,
    var: f64,
    m: &GaussianMarket,
    u: &UtilityParams,
    budget: f64,
    cons: &ConstraintSet,
) -> Result<Allocation> {
    if !(var > 0.0) {
        return Err(invalid("var", format!("variance must be positive, got {var}")));
    }
    let phi = Belief::Gaussian { mean, var }.optimal_phi(budget, &m.spot, u, cons)?;
    Ok(Allocation::from_stock(phi, budget, m.spot.s0))
}
