//! Browser bindings for the interactive demo page in `www/`.
//!
//! Curves are returned as flat `Float64Array`s of fixed-width records so the
//! page can plot them without any JSON round trip. Prices that could not be
//! computed are reported as `NaN`; invalid parameters are reported as a
//! thrown string.

use infoprice::prelude::*;
use wasm_bindgen::prelude::*;

fn msg(e: infoprice::Error) -> String {
    e.to_string()
}

fn cost_or_nan(q: infoprice::Result<Quote>) -> f64 {
    q.map_or(f64::NAN, |q| q.cost)
}

/// Gaussian market with its signal, investor and position limits.
#[wasm_bindgen]
pub struct GaussianDemo {
    model: GaussianModel,
    utility: UtilityParams,
    w0: f64,
    constraints: ConstraintSet,
}

#[wasm_bindgen]
impl GaussianDemo {
    /// Pass `Infinity` as `borrow_cap` for unlimited borrowing.
    #[wasm_bindgen(constructor)]
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mu: f64,
        sigma2: f64,
        s0: f64,
        delta: f64,
        mu_eps: f64,
        sigma2_eps: f64,
        alpha: f64,
        w0: f64,
        allow_stock_short: bool,
        borrow_cap: f64,
    ) -> Result<GaussianDemo, String> {
        let market = GaussianMarket::new(mu, sigma2, s0, delta).map_err(msg)?;
        let signal = GaussianSignal::new(mu_eps, sigma2_eps).map_err(msg)?;
        if !(w0 > 0.0 && w0.is_finite()) {
            return Err(format!("W0: initial wealth must be positive and finite, got {w0}"));
        }
        Ok(GaussianDemo {
            model: GaussianModel::new(market, signal),
            utility: UtilityParams::new(alpha).map_err(msg)?,
            w0,
            constraints: ConstraintSet::new(allow_stock_short, borrow_cap).map_err(msg)?,
        })
    }

    /// Signal at which the observation carries the least information.
    pub fn critical_signal(&self) -> f64 {
        critical_signal(&self.model)
    }

    /// Records `[xi, cost, bits]` for `points` signals evenly spaced on
    /// `[lo, hi]`.
    pub fn cost_vs_signal(&self, lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, String> {
        if !(lo < hi) || points < 2 {
            return Err(format!("need lo < hi and at least 2 points, got [{lo}, {hi}] with {points}"));
        }
        let mut out = Vec::with_capacity(3 * points);
        for k in 0..points {
            let xi = lo + (hi - lo) * k as f64 / (points - 1) as f64;
            let cost = cost_or_nan(price_posterior_indifference(
                &self.model,
                xi,
                &self.utility,
                self.w0,
                &self.constraints,
            ));
            out.extend([xi, cost, info_of_xi(&self.model, xi)]);
        }
        Ok(out)
    }

    /// Records `[bits, cost_down, cost_up]` from the minimum information
    /// level up to `max_bits`.
    pub fn cost_vs_information(&self, max_bits: f64, points: usize) -> Result<Vec<f64>, String> {
        let grid = default_info_grid(&self.model, max_bits, points);
        let curve = cost_information_curve(&self.model, &self.utility, self.w0, &self.constraints, &grid).map_err(msg)?;
        Ok(curve
            .points
            .iter()
            .flat_map(|p| {
                [
                    p.info_bits,
                    p.cost_down.as_ref().map_or(f64::NAN, |q| q.cost),
                    p.cost_up.as_ref().map_or(f64::NAN, |q| q.cost),
                ]
            })
            .collect())
    }

    /// Signal-averaged cost.
    pub fn flat_rate(&self) -> Result<f64, String> {
        flat_rate(&self.model, &self.utility, self.w0, &self.constraints).map_err(msg)
    }
}

/// Binary market costs `[c(0), c(1), c(2), flat_rate, grossman_stiglitz]`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn binary_costs(
    p: f64,
    s0: f64,
    delta: f64,
    q: f64,
    alpha: f64,
    w0: f64,
    allow_stock_short: bool,
    borrow_cap: f64,
) -> Result<Vec<f64>, String> {
    let model = BinaryModel::new(
        BinaryMarket::new(p, s0, delta).map_err(msg)?,
        BinarySignal::new(q).map_err(msg)?,
    );
    let u = UtilityParams::new(alpha).map_err(msg)?;
    let cons = ConstraintSet::new(allow_stock_short, borrow_cap).map_err(msg)?;
    let mut out: Vec<f64> = (0..3)
        .map(|xi| cost_or_nan(price_posterior_indifference(&model, xi, &u, w0, &cons)))
        .collect();
    out.push(flat_rate(&model, &u, w0, &cons).map_err(msg)?);
    out.push(cost_or_nan(price_grossman_stiglitz(&model, &u, w0, &cons)));
    Ok(out)
}
