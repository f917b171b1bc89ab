//! Single-period markets, signals `ξ = s1 + ε`, and the Bayesian updates
//! that turn a prior law of `s1` into a posterior given `ξ`.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Spot price and one-period discount factor shared by both market models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spot {
    pub s0: f64,
    pub delta: f64,
}

impl Spot {
    pub fn new(s0: f64, delta: f64) -> Result<Self> {
        if !(s0 > 0.0 && s0.is_finite()) {
            return Err(invalid("s0", format!("spot price must be positive, got {s0}")));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(invalid("delta", format!("discount factor must lie in (0, 1], got {delta}")));
        }
        Ok(Spot { s0, delta })
    }

    /// Spot grown at the risk-free rate, `s0 / δ`.
    pub fn forward(&self) -> f64 {
        self.s0 / self.delta
    }
}

fn check_probability(name: &'static str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(invalid(name, format!("probability must lie in [0, 1], got {x}")))
    }
}

/// `s1 ∈ {0, 1}` with `P(s1 = 0) = p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryMarket {
    pub p: f64,
    pub spot: Spot,
}

impl BinaryMarket {
    pub fn new(p: f64, s0: f64, delta: f64) -> Result<Self> {
        check_probability("p", p)?;
        Ok(BinaryMarket {
            p,
            spot: Spot::new(s0, delta)?,
        })
    }

    pub fn forward(&self) -> f64 {
        self.spot.forward()
    }
}

/// `ε ∈ {0, 1}` with `P(ε = 0) = q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinarySignal {
    pub q: f64,
}

impl BinarySignal {
    pub fn new(q: f64) -> Result<Self> {
        check_probability("q", q)?;
        Ok(BinarySignal { q })
    }
}

/// `s1 ~ Normal(mu, sigma2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMarket {
    pub mu: f64,
    pub sigma2: f64,
    pub spot: Spot,
}

impl GaussianMarket {
    pub fn new(mu: f64, sigma2: f64, s0: f64, delta: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(invalid("mu", "prior mean must be finite"));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(invalid("sigma2", format!("prior variance must be positive, got {sigma2}")));
        }
        Ok(GaussianMarket {
            mu,
            sigma2,
            spot: Spot::new(s0, delta)?,
        })
    }

    pub fn forward(&self) -> f64 {
        self.spot.forward()
    }
}

/// `ε ~ Normal(mu_eps, sigma2_eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSignal {
    pub mu_eps: f64,
    pub sigma2_eps: f64,
}

impl GaussianSignal {
    pub fn new(mu_eps: f64, sigma2_eps: f64) -> Result<Self> {
        if !mu_eps.is_finite() {
            return Err(invalid("mu_eps", "noise mean must be finite"));
        }
        // +inf is accepted: an infinitely noisy signal is a valid (uninformative) limit.
        if !(sigma2_eps > 0.0) || sigma2_eps.is_nan() {
            return Err(invalid(
                "sigma2_eps",
                format!("noise variance must be positive, got {sigma2_eps}"),
            ));
        }
        Ok(GaussianSignal { mu_eps, sigma2_eps })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryPosterior {
    /// Posterior probability that `s1 = 0`.
    pub pi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPosterior {
    pub mean: f64,
    pub var: f64,
}

/// Posterior density tabulated on an increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPosterior {
    grid: Vec<f64>,
    density: Vec<f64>,
}

impl GridPosterior {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn mass(&self) -> f64 {
        trapezoid(&self.grid, &self.density)
    }

    pub fn mean(&self) -> f64 {
        let weighted: Vec<f64> = self.grid.iter().zip(&self.density).map(|(x, d)| x * d).collect();
        trapezoid(&self.grid, &weighted)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let weighted: Vec<f64> = self
            .grid
            .iter()
            .zip(&self.density)
            .map(|(x, d)| (x - m) * (x - m) * d)
            .collect();
        trapezoid(&self.grid, &weighted)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Posterior {
    Binary(BinaryPosterior),
    Gaussian(GaussianPosterior),
    Grid(GridPosterior),
}

impl From<BinaryPosterior> for Posterior {
    fn from(p: BinaryPosterior) -> Self {
        Posterior::Binary(p)
    }
}

impl From<GaussianPosterior> for Posterior {
    fn from(p: GaussianPosterior) -> Self {
        Posterior::Gaussian(p)
    }
}

impl From<GridPosterior> for Posterior {
    fn from(p: GridPosterior) -> Self {
        Posterior::Grid(p)
    }
}

/// Marginal law of the observation `ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalLaw {
    /// `P(ξ = 0), P(ξ = 1), P(ξ = 2)`.
    ThreePoint([f64; 3]),
    Normal { mean: f64, var: f64 },
}

/// Binary market together with its binary noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryModel {
    pub market: BinaryMarket,
    pub signal: BinarySignal,
}

impl BinaryModel {
    pub fn new(market: BinaryMarket, signal: BinarySignal) -> Self {
        BinaryModel { market, signal }
    }

    pub fn posterior(&self, xi: i64) -> Result<BinaryPosterior> {
        binary_posterior(&self.market, &self.signal, xi)
    }

    pub fn signal_law(&self) -> SignalLaw {
        binary_signal_law(&self.market, &self.signal)
    }

    /// `(ξ, P(ξ))` for the three possible observations.
    pub fn signal_atoms(&self) -> [(i64, f64); 3] {
        let SignalLaw::ThreePoint(w) = self.signal_law() else {
            unreachable!()
        };
        [(0, w[0]), (1, w[1]), (2, w[2])]
    }
}

/// Gaussian market together with its Gaussian noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianModel {
    pub market: GaussianMarket,
    pub signal: GaussianSignal,
}

impl GaussianModel {
    pub fn new(market: GaussianMarket, signal: GaussianSignal) -> Self {
        GaussianModel { market, signal }
    }

    pub fn posterior(&self, xi: f64) -> GaussianPosterior {
        gaussian_posterior(&self.market, &self.signal, xi)
    }

    /// Posterior variance; the same for every observation.
    pub fn posterior_var(&self) -> f64 {
        self.posterior(self.market.mu + self.signal.mu_eps).var
    }

    pub fn signal_law(&self) -> SignalLaw {
        gaussian_signal_law(&self.market, &self.signal)
    }
}

/// Posterior probability that `s1 = 0` after observing `ξ ∈ {0, 1, 2}`.
///
/// When `ξ = 1` has zero probability under the model the prior is returned.
pub fn binary_posterior(m: &BinaryMarket, s: &BinarySignal, xi: i64) -> Result<BinaryPosterior> {
    let (p, q) = (m.p, s.q);
    let pi = match xi {
        0 => 1.0,
        2 => 0.0,
        1 => {
            let num = p * (1.0 - q);
            let den = num + q * (1.0 - p);
            if den > 0.0 {
                num / den
            } else {
                p
            }
        }
        other => return Err(Error::InvalidSignal(other)),
    };
    Ok(BinaryPosterior { pi })
}

/// Conjugate update of a normal prior by a normal-noise observation.
///
/// Nonzero noise mean is absorbed by shifting the observation to `ξ - μ_ε`.
pub fn gaussian_posterior(m: &GaussianMarket, s: &GaussianSignal, xi: f64) -> GaussianPosterior {
    let shifted = xi - s.mu_eps;
    if s.sigma2_eps.is_infinite() {
        return GaussianPosterior {
            mean: m.mu,
            var: m.sigma2,
        };
    }
    let total = m.sigma2 + s.sigma2_eps;
    GaussianPosterior {
        mean: (m.mu * s.sigma2_eps + shifted * m.sigma2) / total,
        var: m.sigma2 * s.sigma2_eps / total,
    }
}

pub fn binary_signal_law(m: &BinaryMarket, s: &BinarySignal) -> SignalLaw {
    let (p, q) = (m.p, s.q);
    SignalLaw::ThreePoint([p * q, p * (1.0 - q) + (1.0 - p) * q, (1.0 - p) * (1.0 - q)])
}

pub fn gaussian_signal_law(m: &GaussianMarket, s: &GaussianSignal) -> SignalLaw {
    SignalLaw::Normal {
        mean: m.mu + s.mu_eps,
        var: m.sigma2 + s.sigma2_eps,
    }
}

pub fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let z = x - mean;
    (-0.5 * z * z / var).exp() / (2.0 * PI * var).sqrt()
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Abscissae and prior density for the grid update: `±half_width_sd` total
/// standard deviations around the prior mean, `points` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub half_width_sd: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            half_width_sd: 8.0,
            points: 4096,
        }
    }
}

impl GridSpec {
    /// Uniform grid and normalised prior density for a Gaussian market.
    pub fn tabulate_prior(&self, m: &GaussianMarket, s: &GaussianSignal) -> (Vec<f64>, Vec<f64>) {
        let sd = (m.sigma2 + s.sigma2_eps).sqrt();
        let (lo, hi) = (m.mu - self.half_width_sd * sd, m.mu + self.half_width_sd * sd);
        let n = self.points.max(2);
        let step = (hi - lo) / (n - 1) as f64;
        let grid: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
        let mut density: Vec<f64> = grid.iter().map(|&x| normal_pdf(x, m.mu, m.sigma2)).collect();
        let mass = trapezoid(&grid, &density);
        density.iter_mut().for_each(|d| *d /= mass);
        (grid, density)
    }
}

/// Bayes update of a tabulated prior: `p(x) f(ξ - x)` renormalised.
pub fn grid_posterior<F>(grid: &[f64], prior_density: &[f64], noise_density: F, xi: f64) -> Result<GridPosterior>
where
    F: Fn(f64) -> f64,
{
    if grid.len() != prior_density.len() || grid.len() < 2 {
        return Err(invalid("grid", "grid and density must have equal length of at least 2"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("grid", "abscissae must be strictly increasing"));
    }
    let mut density: Vec<f64> = grid
        .iter()
        .zip(prior_density)
        .map(|(&x, &p)| p * noise_density(xi - x))
        .collect();
    let mass = trapezoid(grid, &density);
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::OutOfSupport { xi });
    }
    density.iter_mut().for_each(|d| *d /= mass);
    Ok(GridPosterior {
        grid: grid.to_vec(),
        density,
    })
}
