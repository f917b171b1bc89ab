use anyhow::{bail, Context, Result};
use infoprice::information_measures::{info_of_xi, Branch, InfoCurve};
use infoprice::oracles::{run_verification, ClosedForms, OracleReport, VerifySetup};
use infoprice::prelude::*;
use infoprice::pricing::posterior_utilities;
use rayon::prelude::*;

use crate::config::{BinarySetup, GaussianSetup, ModelKind, RunConfig};
use crate::output::{Cell, Table};
use crate::svg::{self, Series, BLUE, GREY, RED};

/// One output table plus any plots rendered from it.
pub struct Artifact {
    pub name: String,
    pub table: Table,
    pub plots: Vec<(String, String)>,
}

impl Artifact {
    fn new(name: impl Into<String>, table: Table) -> Self {
        Artifact {
            name: name.into(),
            table,
            plots: Vec::new(),
        }
    }

    fn plot(mut self, name: impl Into<String>, svg: String) -> Self {
        self.plots.push((name.into(), svg));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Rule {
    /// Indifference under the posterior (default)
    Posterior,
    /// Indifference under the joint prior law
    GrossmanStiglitz,
    /// Prior optimum against posterior optimum
    Naive,
}

impl From<Rule> for PricingRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Posterior => PricingRule::PosteriorIndifference,
            Rule::GrossmanStiglitz => PricingRule::GrossmanStiglitz,
            Rule::Naive => PricingRule::Naive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    /// Cost against quantity of information in bits
    Info,
    /// Cost against the observed signal
    Xi,
}

fn status(q: &infoprice::Result<Quote>) -> Cell {
    match q {
        Ok(q) => q.status.name().into(),
        Err(Error::NoRoot { .. }) => "no_root".into(),
        Err(e) => format!("error: {e}").into(),
    }
}

fn cost(q: &infoprice::Result<Quote>) -> Cell {
    q.as_ref().map_or(f64::NAN, |q| q.cost).into()
}

fn quote<M: InformationModel>(rule: PricingRule, model: &M, xi: M::Signal, u: &UtilityParams, w0: f64, c: &ConstraintSet) -> infoprice::Result<Quote> {
    match rule {
        PricingRule::PosteriorIndifference => price_posterior_indifference(model, xi, u, w0, c),
        PricingRule::GrossmanStiglitz => price_grossman_stiglitz(model, u, w0, c),
        PricingRule::Naive => price_naive(model, xi, u, w0, c),
    }
}

fn keep_no_root(q: infoprice::Result<Quote>) -> Result<infoprice::Result<Quote>> {
    match q {
        Err(Error::NoRoot { .. }) => Ok(q),
        Err(e) => Err(e.into()),
        Ok(_) => Ok(q),
    }
}

fn binary_xi(xi: f64) -> Result<i64> {
    if xi.fract() == 0.0 && (0.0..=2.0).contains(&xi) {
        Ok(xi as i64)
    } else {
        bail!("binary observations are 0, 1 or 2, got {xi}")
    }
}

pub fn price(config: &RunConfig, xi: Option<f64>, rule: Rule) -> Result<Vec<Artifact>> {
    let rule = PricingRule::from(rule);
    let mut table = Table::new(&["model", "rule", "xi", "cost_wealth", "status"]);
    match config.kind {
        ModelKind::Binary => {
            let s = &config.binary;
            let xis = match xi {
                Some(x) => vec![binary_xi(x)?],
                None => vec![0, 1, 2],
            };
            for x in xis {
                let q = keep_no_root(quote(rule, &s.model, x, &s.utility, s.w0, &s.constraints))?;
                table.push(vec!["binary".into(), rule.name().into(), Cell::Int(x), cost(&q), status(&q)]);
            }
        }
        ModelKind::Gaussian => {
            let s = &config.gaussian;
            let x = match (xi, rule) {
                (Some(x), _) => x,
                (None, PricingRule::GrossmanStiglitz) => f64::NAN,
                (None, _) => bail!("--xi is required for the gaussian model"),
            };
            let q = keep_no_root(quote(rule, &s.model, x, &s.utility, s.w0, &s.constraints))?;
            table.push(vec!["gaussian".into(), rule.name().into(), x.into(), cost(&q), status(&q)]);
        }
    }
    Ok(vec![Artifact::new("price", table)])
}

pub fn flat_rate_cmd(config: &RunConfig, rule: Rule) -> Result<Vec<Artifact>> {
    let rule = PricingRule::from(rule);
    let value = match config.kind {
        ModelKind::Binary => {
            let s = &config.binary;
            price_quote(&s.model, rule, &[], &s.utility, s.w0, &s.constraints)?.flat_rate
        }
        ModelKind::Gaussian => {
            let s = &config.gaussian;
            price_quote(&s.model, rule, &[], &s.utility, s.w0, &s.constraints)?.flat_rate
        }
    };
    let model = match config.kind {
        ModelKind::Binary => "binary",
        ModelKind::Gaussian => "gaussian",
    };
    let mut table = Table::new(&["model", "rule", "flat_rate_wealth"]);
    table.push(vec![model.into(), rule.name().into(), value.into()]);
    Ok(vec![Artifact::new("flat_rate", table)])
}

fn binary_costs(s: &BinarySetup, name: &str, title: &str) -> Result<Artifact> {
    let mut table = Table::new(&["xi", "probability", "cost_wealth", "status"]);
    let mut bars = Vec::new();
    for (xi, prob) in s.model.signal_atoms() {
        let q = if prob > 0.0 {
            price_posterior_indifference(&s.model, xi, &s.utility, s.w0, &s.constraints)
        } else {
            Ok(Quote::no_value())
        };
        let q = keep_no_root(q)?;
        bars.push((xi.to_string(), q.as_ref().map_or(f64::NAN, |q| q.cost)));
        table.push(vec![xi.to_string().into(), prob.into(), cost(&q), status(&q)]);
    }
    let flat = flat_rate(&s.model, &s.utility, s.w0, &s.constraints)?;
    table.push(vec!["flat".into(), 1.0.into(), flat.into(), "priced".into()]);
    let svg = svg::bar_plot(title, "cost (wealth)", &bars, &[("flat rate".into(), flat)]);
    Ok(Artifact::new(name, table).plot(name, svg))
}

fn sorted_grid(lo: f64, hi: f64, points: usize, extra: &[f64]) -> Vec<f64> {
    let n = points.max(2);
    let mut xs: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
    xs.extend(extra.iter().copied().filter(|x| (lo..=hi).contains(x)));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn gaussian_by_xi(s: &GaussianSetup, name: &str, title: &str, xi_range: Option<(f64, f64)>, points: usize) -> Result<Artifact> {
    let m = &s.model;
    let dagger = critical_signal(m);
    let sd = (m.market.sigma2 + m.signal.sigma2_eps).sqrt();
    let (lo, hi) = xi_range.unwrap_or((dagger - 4.0 * sd, dagger + 4.0 * sd));
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        bail!("empty signal range [{lo}, {hi}]");
    }
    let coincidence = m.market.spot.forward() + m.signal.mu_eps;
    let xs = sorted_grid(lo, hi, points, &[dagger, coincidence]);
    let mut table = Table::new(&["xi", "cost_wealth", "I_bits", "branch", "status"]);
    let (mut down, mut up, mut info) = (Vec::new(), Vec::new(), Vec::new());
    let priced = xs
        .par_iter()
        .map(|&xi| Ok((xi, price_posterior_indifference(m, xi, &s.utility, s.w0, &s.constraints)?, info_of_xi(m, xi))))
        .collect::<infoprice::Result<Vec<_>>>()?;
    for (xi, q, bits) in priced {
        let branch = if xi < dagger { "down" } else { "up" };
        if xi < dagger {
            down.push((xi, q.cost));
        } else {
            up.push((xi, q.cost));
        }
        info.push((xi, bits));
        table.push(vec![xi.into(), q.cost.into(), bits.into(), branch.into(), q.status.name().into()]);
    }
    if let Some(&first) = up.first() {
        down.push(first);
    }
    let cost_svg = svg::line_plot(
        title,
        "signal xi",
        "cost (wealth)",
        &[Series::new("downside", RED, down), Series::new("upside", BLUE, up)],
    );
    let info_svg = svg::line_plot("Relative entropy of the posterior", "signal xi", "I (bits)", &[Series::new("I(xi)", GREY, info)]);
    Ok(Artifact::new(name, table)
        .plot(name, cost_svg)
        .plot(format!("{name}_information"), info_svg))
}

const SWEEP_CHUNK: usize = 8;

/// `cost_information_curve` with the grid priced in parallel chunks.
fn sweep_curve(s: &GaussianSetup, cons: &ConstraintSet, grid: &[f64]) -> Result<InfoCurve> {
    let parts = grid
        .par_chunks(SWEEP_CHUNK)
        .map(|chunk| cost_information_curve(&s.model, &s.utility, s.w0, cons, chunk))
        .collect::<infoprice::Result<Vec<_>>>()?;
    let mut parts = parts.into_iter();
    let mut curve = parts.next().context("empty information grid")?;
    for part in parts {
        curve.points.extend(part.points);
    }
    Ok(curve)
}

fn curve_rows(table: &mut Table, curve: &InfoCurve, tag: Option<String>) {
    for p in &curve.points {
        let mut row = vec![p.info_bits.into(), cost(&p.cost_down), cost(&p.cost_up)];
        match &tag {
            Some(t) => row.push(t.clone().into()),
            None => {
                row.insert(1, p.xi_down.into());
                row.insert(3, p.xi_up.into());
                row.push(status(&p.cost_down));
                row.push(status(&p.cost_up));
            }
        }
        table.push(row);
    }
}

fn curve_series(curve: &InfoCurve, label: &str, dashed: bool) -> [Series; 2] {
    let mk = |b: Branch, color| {
        let s = Series::new(format!("{label} {}", if b == Branch::Down { "down" } else { "up" }), color, curve.branch(b));
        if dashed {
            s.dashed()
        } else {
            s
        }
    };
    [mk(Branch::Down, RED), mk(Branch::Up, BLUE)]
}

pub fn curve(config: &RunConfig, axis: Axis, max_bits: f64, points: usize, xi_range: Option<(f64, f64)>) -> Result<Vec<Artifact>> {
    match config.kind {
        ModelKind::Binary => Ok(vec![binary_costs(&config.binary, "curve", "Cost of each observation")?]),
        ModelKind::Gaussian => {
            let s = &config.gaussian;
            match axis {
                Axis::Xi => Ok(vec![gaussian_by_xi(s, "curve", "Cost against the observed signal", xi_range, points)?]),
                Axis::Info => {
                    let grid = default_info_grid(&s.model, max_bits, points);
                    let curve = sweep_curve(s, &s.constraints, &grid)?;
                    let mut table =
                        Table::new(&["I_bits", "xi_down", "cost_down", "xi_up", "cost_up", "status_down", "status_up"]);
                    curve_rows(&mut table, &curve, None);
                    let svg = svg::line_plot("Cost against quantity of information", "I (bits)", "cost (wealth)", &curve_series(&curve, "", false));
                    Ok(vec![Artifact::new("curve", table).plot("curve", svg)])
                }
            }
        }
    }
}

const INFO_MAX_BITS: f64 = 4.0;
const INFO_POINTS: usize = 200;

fn variants(base: &GaussianSetup) -> Result<Vec<(String, GaussianSetup)>> {
    let m = base.model.market;
    let sig = base.model.signal;
    let with = |market: GaussianMarket, signal: GaussianSignal, alpha: f64| GaussianSetup {
        model: GaussianModel::new(market, signal),
        utility: UtilityParams { alpha },
        ..*base
    };
    Ok(vec![
        ("base".into(), *base),
        ("alpha=0.2".into(), with(m, sig, 0.2)),
        ("sigma2=0.4".into(), with(GaussianMarket::new(m.mu, 0.4, m.spot.s0, m.spot.delta)?, sig, base.utility.alpha)),
        ("sigma2_eps=0.4".into(), with(m, GaussianSignal::new(sig.mu_eps, 0.4)?, base.utility.alpha)),
        ("delta=0.92".into(), with(GaussianMarket::new(m.mu, m.sigma2, m.spot.s0, 0.92)?, sig, base.utility.alpha)),
    ])
}

fn variant_figure(base: &GaussianSetup, name: &str, title: &str) -> Result<Artifact> {
    let mut table = Table::new(&["I_bits", "cost_down", "cost_up", "variant"]);
    let mut curves = Vec::new();
    for (label, v) in variants(base)? {
        let grid = default_info_grid(&v.model, INFO_MAX_BITS, INFO_POINTS);
        let curve = sweep_curve(&v, &v.constraints, &grid)?;
        curve_rows(&mut table, &curve, Some(label.clone()));
        curves.push((label, curve));
    }
    let mut artifact = Artifact::new(name, table);
    let (base_label, base_curve) = &curves[0];
    for (label, curve) in &curves[1..] {
        let mut series = curve_series(base_curve, base_label, false).to_vec();
        series.extend(curve_series(curve, label, true));
        let svg = svg::line_plot(&format!("{title}: {label}"), "I (bits)", "cost (wealth)", &series);
        let stem = label.split('=').next().unwrap_or(label);
        artifact = artifact.plot(format!("{name}_{stem}"), svg);
    }
    Ok(artifact)
}

fn cap_label(cap: f64, w0: f64) -> String {
    if cap.is_infinite() {
        "inf".into()
    } else if cap == 0.0 {
        "0".into()
    } else {
        format!("{}W0", crate::output::fmt_g(cap / w0))
    }
}

fn borrowing_figure(base: &GaussianSetup) -> Result<Artifact> {
    let w0 = base.w0;
    let caps = [0.0, w0 / 2.0, w0, 2.0 * w0, 5.0 * w0, f64::INFINITY];
    let grid = default_info_grid(&base.model, INFO_MAX_BITS, INFO_POINTS);
    let mut table = Table::new(&["I_bits", "cost_down", "cost_up", "borrow_cap"]);
    let mut plots = Vec::new();
    for cap in caps {
        let cons = ConstraintSet::capped_borrowing(cap)?;
        let curve = sweep_curve(base, &cons, &grid)?;
        let label = cap_label(cap, w0);
        let before = table.rows.len();
        curve_rows(&mut table, &curve, Some(label.clone()));
        for row in &mut table.rows[before..] {
            *row.last_mut().expect("tag column") = Cell::Num(cap);
        }
        let svg = svg::line_plot(&format!("Borrowing cap {label}"), "I (bits)", "cost (wealth)", &curve_series(&curve, "", false));
        plots.push((format!("figure6_cap_{}", label.replace('.', "_")), svg));
    }
    let mut artifact = Artifact::new("figure6", table);
    artifact.plots = plots;
    Ok(artifact)
}

fn utilities_table(s: &BinarySetup) -> Result<Artifact> {
    let mut table = Table::new(&["cost_wealth", "xi", "eu_uninformed", "eu_informed"]);
    let mut series = Vec::new();
    let colors = [RED, GREY, BLUE];
    for (xi, prob) in s.model.signal_atoms() {
        if prob <= 0.0 {
            continue;
        }
        let mut informed = Vec::new();
        let mut flat = Vec::new();
        for k in 0..=100 {
            let c = s.w0 * k as f64 / 100.0;
            let (unin, inf) = posterior_utilities(&s.model, xi, &s.utility, s.w0, &s.constraints, c)?;
            table.push(vec![c.into(), Cell::Int(xi), unin.into(), inf.into()]);
            informed.push((c, inf));
            flat.push((c, unin));
        }
        let color = colors[xi as usize];
        series.push(Series::new(format!("informed, xi={xi}"), color, informed));
        series.push(Series::new(format!("uninformed, xi={xi}"), color, flat).dashed());
    }
    let svg = svg::line_plot("Expected utilities under the posterior", "cost (wealth)", "expected utility", &series);
    Ok(Artifact::new("figure1_utilities", table).plot("figure1_utilities", svg))
}

/// Data for figure `n`. Parameters come from the configuration when it names
/// the matching model, otherwise from the figure defaults; constraints are
/// fixed by the figure except for figure 1.
pub fn figure(config: &RunConfig, n: u8) -> Result<Vec<Artifact>> {
    let gaussian = match config.kind {
        ModelKind::Gaussian => config.gaussian,
        ModelKind::Binary => GaussianSetup::default(),
    };
    let free = GaussianSetup {
        constraints: ConstraintSet::unconstrained(),
        ..gaussian
    };
    let no_short = GaussianSetup {
        constraints: ConstraintSet::no_short_selling(),
        ..gaussian
    };
    match n {
        1 => {
            let binary = match config.kind {
                ModelKind::Binary => config.binary,
                ModelKind::Gaussian => BinarySetup::default(),
            };
            Ok(vec![
                binary_costs(&binary, "figure1", "Cost of each observation")?,
                utilities_table(&binary)?,
            ])
        }
        2 => Ok(vec![gaussian_by_xi(&free, "figure2", "Cost against the observed signal, no constraints", None, 401)?]),
        3 => Ok(vec![variant_figure(&free, "figure3", "Cost against information, no constraints")?]),
        4 => Ok(vec![gaussian_by_xi(&no_short, "figure4", "Cost against the observed signal, no short selling", None, 401)?]),
        5 => Ok(vec![variant_figure(&no_short, "figure5", "Cost against information, no short selling")?]),
        6 => Ok(vec![borrowing_figure(&gaussian)?]),
        _ => bail!("figure number must be between 1 and 6, got {n}"),
    }
}

pub struct VerifyOutcome {
    pub artifacts: Vec<Artifact>,
    pub failures: Vec<OracleReport>,
}

pub fn verify(config: &RunConfig, draws: usize, seed: u64) -> Result<VerifyOutcome> {
    let mut setup = VerifySetup {
        mc_draws: draws,
        mc_seed: seed,
        ..VerifySetup::default()
    };
    match config.kind {
        ModelKind::Binary => {
            setup.binary = config.binary.model;
            setup.binary_utility = config.binary.utility;
            setup.binary_w0 = config.binary.w0;
        }
        ModelKind::Gaussian => {
            setup.gaussian = config.gaussian.model;
            setup.gaussian_utility = config.gaussian.utility;
            setup.gaussian_w0 = config.gaussian.w0;
        }
    }
    let rows = run_verification(&setup, &ClosedForms::default());
    let mut table = Table::new(&["quantity", "method", "closed_form", "oracle", "abs_err", "tolerance", "pass"]);
    for r in &rows {
        table.push(vec![
            r.quantity_name.clone().into(),
            r.method.to_string().into(),
            r.closed_form.into(),
            r.oracle_value.into(),
            r.abs_err.into(),
            r.tolerance.into(),
            r.passed().to_string().into(),
        ]);
    }
    let failures = rows.into_iter().filter(|r| !r.passed()).collect();
    Ok(VerifyOutcome {
        artifacts: vec![Artifact::new("verify", table)],
        failures,
    })
}

/// Parse `lo:hi`.
pub fn parse_range(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s.split_once(':').context("expected a range of the form lo:hi")?;
    Ok((a.trim().parse().context("range start")?, b.trim().parse().context("range end")?))
}

