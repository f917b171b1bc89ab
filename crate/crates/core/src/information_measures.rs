//! Relative entropy of the posterior with respect to the prior, and the
//! cost of information quoted per quantity of information.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::market_models::{BinaryMarket, BinaryPosterior, GaussianMarket, GaussianModel, GaussianPosterior};
use crate::pricing::{price_posterior_indifference, Quote};
use crate::utility_optimizer::{ConstraintSet, UtilityParams};

/// Which side of the critical observation `ξ†` a signal falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `ξ < ξ†`: news of a lower price.
    Down,
    /// `ξ > ξ†`: news of a higher price.
    Up,
}

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / LN_2
}

pub fn bits_to_nats(bits: f64) -> f64 {
    bits * LN_2
}

/// `I(π_ξ | p)` in nats for a Gaussian prior and posterior.
pub fn kl_gaussian(post: &GaussianPosterior, m: &GaussianMarket) -> f64 {
    let ratio = post.var / m.sigma2;
    let shift = post.mean - m.mu;
    0.5 * (ratio - 1.0 - ratio.ln()) + 0.5 * shift * shift / m.sigma2
}

/// Discrete relative entropy of the posterior `{π, 1-π}` against the prior
/// `{p, 1-p}`, with `0 ln 0 = 0` and `+∞` when the posterior charges an
/// outcome the prior rules out.
pub fn kl_discrete(post: &BinaryPosterior, m: &BinaryMarket) -> f64 {
    fn term(x: f64, y: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else if y == 0.0 {
            f64::INFINITY
        } else {
            x * (x / y).ln()
        }
    }
    term(post.pi, m.p) + term(1.0 - post.pi, 1.0 - m.p)
}

/// Observation at which the posterior is least informative.
pub fn critical_signal(model: &GaussianModel) -> f64 {
    model.market.mu + model.signal.mu_eps
}

/// Information carried by the least informative observation, in bits.
pub fn min_information_bits(model: &GaussianModel) -> f64 {
    info_of_xi(model, critical_signal(model))
}

/// Information in bits carried by the observation `xi`.
pub fn info_of_xi(model: &GaussianModel, xi: f64) -> f64 {
    nats_to_bits(kl_gaussian(&model.posterior(xi), &model.market))
}

/// The observation on `branch` that carries `bits` of information.
pub fn xi_of_info(model: &GaussianModel, bits: f64, branch: Branch) -> Result<f64> {
    let min_bits = min_information_bits(model);
    let excess = bits_to_nats(bits) - bits_to_nats(min_bits);
    if excess < 0.0 {
        // Allow rounding noise at the minimum itself.
        if excess > -1e-14 {
            return Ok(critical_signal(model));
        }
        return Err(Error::BelowMinimumInformation { bits, min_bits });
    }
    let m = &model.market;
    let gain = (m.sigma2 + model.signal.sigma2_eps) / m.sigma2;
    let offset = gain * m.sigma2.sqrt() * (2.0 * excess).sqrt();
    Ok(match branch {
        Branch::Down => critical_signal(model) - offset,
        Branch::Up => critical_signal(model) + offset,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub info_bits: f64,
    pub xi_down: f64,
    pub xi_up: f64,
    pub cost_down: Result<Quote>,
    pub cost_up: Result<Quote>,
}

/// Cost of downside and upside information as a function of its quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoCurve {
    pub points: Vec<CurvePoint>,
    pub i_min: f64,
    pub xi_dagger: f64,
}

impl InfoCurve {
    /// `(I, cost)` pairs on one branch, skipping points that failed to price.
    pub fn branch(&self, branch: Branch) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| {
                let q = match branch {
                    Branch::Down => &p.cost_down,
                    Branch::Up => &p.cost_up,
                };
                q.as_ref().ok().map(|q| (p.info_bits, q.cost))
            })
            .collect()
    }
}

/// Default sampling of information levels: `points` values from `I_min` to
/// `max_bits`, spaced geometrically in `I - I_min` so the region close to
/// the minimum is resolved.
pub fn default_info_grid(model: &GaussianModel, max_bits: f64, points: usize) -> Vec<f64> {
    let i_min = min_information_bits(model);
    let span = max_bits - i_min;
    if !(span > 0.0) || points == 0 {
        return vec![i_min];
    }
    if points == 1 {
        return vec![max_bits];
    }
    let first = span * 1e-6;
    let ratio = (span / first).powf(1.0 / (points - 2).max(1) as f64);
    let mut grid = Vec::with_capacity(points);
    grid.push(i_min);
    let mut offset = first;
    for _ in 1..points {
        grid.push(i_min + offset.min(span));
        offset *= ratio;
    }
    grid
}

/// Price both branch observations for every information level in
/// `info_grid` under the posterior-indifference rule.
pub fn cost_information_curve(
    model: &GaussianModel,
    u: &UtilityParams,
    w0: f64,
    cons: &ConstraintSet,
    info_grid: &[f64],
) -> Result<InfoCurve> {
    let i_min = min_information_bits(model);
    if let Some(&bad) = info_grid.iter().find(|&&i| i < i_min - 1e-12) {
        return Err(Error::BelowMinimumInformation {
            bits: bad,
            min_bits: i_min,
        });
    }
    let points = info_grid
        .iter()
        .map(|&bits| {
            let bits = bits.max(i_min);
            let xi_down = xi_of_info(model, bits, Branch::Down)?;
            let xi_up = xi_of_info(model, bits, Branch::Up)?;
            Ok(CurvePoint {
                info_bits: bits,
                xi_down,
                xi_up,
                cost_down: price_posterior_indifference(model, xi_down, u, w0, cons),
                cost_up: price_posterior_indifference(model, xi_up, u, w0, cons),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InfoCurve {
        points,
        i_min,
        xi_dagger: critical_signal(model),
    })
}
