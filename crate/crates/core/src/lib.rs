//! Utility-indifference pricing of noisy information about a future asset
//! price.
//!
//! An investor with exponential utility chooses between cash and a stock
//! whose next-period price `s1` is uncertain. An information provider sells
//! the observation `ξ = s1 + ε`. The crate computes what the observation is
//! worth to the investor in two single-period markets, a binary one and a
//! Gaussian one:
//!
//! * [`market_models`]: priors, signals, Bayesian posteriors and the law of `ξ`;
//! * [`utility_optimizer`]: expected utility and constrained optimal positions;
//! * [`pricing`]: posterior-indifference, Grossman–Stiglitz and naive costs,
//!   per observation and as a flat rate;
//! * [`information_measures`]: relative entropy in bits and cost per
//!   quantity of information;
//! * [`oracles`]: brute-force checks of every closed form.
//!
//! ```
//! use infoprice::prelude::*;
//!
//! let market = GaussianMarket::new(1.1, 0.2, 1.0, 0.95)?;
//! let model = GaussianModel::new(market, GaussianSignal::new(0.0, 0.2)?);
//! let u = UtilityParams::new(0.1)?;
//! let quote = price_posterior_indifference(&model, 1.5, &u, 10.0, &ConstraintSet::unconstrained())?;
//! assert!((quote.cost - 2.3767).abs() < 1e-4);
//! # Ok::<(), infoprice::Error>(())
//! ```

pub mod error;
pub mod information_measures;
pub mod market_models;
pub mod oracles;
pub mod pricing;
pub mod quadrature;
pub mod utility_optimizer;

pub use error::{Direction, Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::information_measures::{
        cost_information_curve, critical_signal, default_info_grid, info_of_xi, kl_discrete, kl_gaussian,
        min_information_bits, xi_of_info, Branch, InfoCurve,
    };
    pub use crate::market_models::{
        BinaryMarket, BinaryModel, BinarySignal, GaussianMarket, GaussianModel, GaussianSignal, Posterior,
        SignalLaw, Spot,
    };
    pub use crate::pricing::{
        flat_rate, price_grossman_stiglitz, price_naive, price_posterior_indifference, price_quote,
        InformationModel, PriceQuote, PricingRule, Quote, QuoteStatus,
    };
    pub use crate::utility_optimizer::{Allocation, Belief, ConstraintSet, UtilityParams};
}
