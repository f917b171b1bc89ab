//! Run configuration read from a TOML file.
//!
//! ```toml
//! W0 = 5.0
//!
//! [binary]            # or [gaussian] with mu, sigma2, s0, delta
//! p = 0.4
//! s0 = 0.5
//! delta = 0.95
//!
//! [signal]            # binary: q; gaussian: mu_eps, sigma2_eps
//! q = 0.7
//!
//! [utility]
//! alpha = 0.1
//!
//! [constraints]
//! allow_stock_short = false
//! borrow_cap = 0.0    # number or "inf"
//!
//! [output]
//! format = "csv"      # csv | json
//! plot = "none"       # none | svg
//! path = "out.csv"
//! ```

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use infoprice::prelude::*;
use toml::{Table, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plot {
    None,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Binary,
    Gaussian,
}

#[derive(Debug, Clone, Copy)]
pub struct BinarySetup {
    pub model: BinaryModel,
    pub utility: UtilityParams,
    pub w0: f64,
    pub constraints: ConstraintSet,
}

#[derive(Debug, Clone, Copy)]
pub struct GaussianSetup {
    pub model: GaussianModel,
    pub utility: UtilityParams,
    pub w0: f64,
    pub constraints: ConstraintSet,
}

impl Default for BinarySetup {
    fn default() -> Self {
        BinarySetup {
            model: BinaryModel::new(
                BinaryMarket::new(0.4, 0.5, 0.95).expect("valid defaults"),
                BinarySignal::new(0.7).expect("valid defaults"),
            ),
            utility: UtilityParams { alpha: 0.1 },
            w0: 5.0,
            constraints: ConstraintSet::no_short_selling(),
        }
    }
}

impl Default for GaussianSetup {
    fn default() -> Self {
        GaussianSetup {
            model: GaussianModel::new(
                GaussianMarket::new(1.1, 0.2, 1.0, 0.95).expect("valid defaults"),
                GaussianSignal::new(0.0, 0.2).expect("valid defaults"),
            ),
            utility: UtilityParams { alpha: 0.1 },
            w0: 10.0,
            constraints: ConstraintSet::unconstrained(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct OutputSection {
    pub format: Option<Format>,
    pub plot: Option<Plot>,
    pub path: Option<PathBuf>,
}

/// A validated configuration. The model named in the file is resolved
/// against its defaults; the other model keeps its defaults untouched.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kind: ModelKind,
    pub binary: BinarySetup,
    pub gaussian: GaussianSetup,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kind: ModelKind::Binary,
            binary: BinarySetup::default(),
            gaussian: GaussianSetup::default(),
            output: OutputSection::default(),
        }
    }
}

const SECTIONS: [(&str, &[&str]); 6] = [
    ("binary", &["p", "s0", "delta"]),
    ("gaussian", &["mu", "sigma2", "s0", "delta"]),
    ("signal", &["q", "mu_eps", "sigma2_eps"]),
    ("utility", &["alpha"]),
    ("constraints", &["allow_stock_short", "borrow_cap"]),
    ("output", &["format", "plot", "path"]),
];

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parse `text`; `origin` names the source in error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| {
            let line = e.span().map_or(1, |s| line_at(text, s.start));
            anyhow!("{origin}:{line}: {}", e.message())
        })?;
        Parser { text, origin, table: &table }.run()
    }
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

struct Parser<'a> {
    text: &'a str,
    origin: &'a str,
    table: &'a Table,
}

impl Parser<'_> {
    /// Line of `key` inside `[section]` (or at top level), falling back to
    /// the section header, then to line 1.
    fn line(&self, section: Option<&str>, key: Option<&str>) -> usize {
        let mut current: Option<String> = None;
        let mut header = None;
        for (i, raw) in self.text.lines().enumerate() {
            let line = raw.trim();
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.split(']').next().unwrap_or("").trim().to_string();
                if section == Some(name.as_str()) {
                    header = Some(i + 1);
                }
                current = Some(name);
                continue;
            }
            if current.as_deref() != section {
                continue;
            }
            if let Some(key) = key {
                if let Some(rest) = line.strip_prefix(key) {
                    if rest.trim_start().starts_with('=') {
                        return i + 1;
                    }
                }
            }
        }
        header.unwrap_or(1)
    }

    fn fail(&self, section: Option<&str>, key: Option<&str>, msg: impl std::fmt::Display) -> anyhow::Error {
        let line = self.line(section, key);
        let name = match (section, key) {
            (Some(s), Some(k)) => format!("{s}.{k}: "),
            (None, Some(k)) => format!("{k}: "),
            (Some(s), None) => format!("[{s}]: "),
            (None, None) => String::new(),
        };
        anyhow!("{}:{line}: {name}{msg}", self.origin)
    }

    fn section(&self, name: &str) -> Result<Option<&Table>> {
        match self.table.get(name) {
            None => Ok(None),
            Some(Value::Table(t)) => Ok(Some(t)),
            Some(_) => Err(self.fail(None, Some(name), "expected a table section")),
        }
    }

    fn number(&self, section: Option<&str>, table: &Table, key: &str, allow_inf: bool) -> Result<Option<f64>> {
        let value = match table.get(key) {
            None => return Ok(None),
            Some(v) => v,
        };
        let x = match value {
            Value::Float(x) => *x,
            Value::Integer(i) => *i as f64,
            Value::String(s) if allow_inf && matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity") => f64::INFINITY,
            _ if allow_inf => return Err(self.fail(section, Some(key), "expected a number or \"inf\"")),
            _ => return Err(self.fail(section, Some(key), "expected a number")),
        };
        if x.is_nan() || (x.is_infinite() && !allow_inf) {
            return Err(self.fail(section, Some(key), format!("expected a finite number, got {x}")));
        }
        Ok(Some(x))
    }

    fn string<'t>(&self, section: &str, table: &'t Table, key: &str) -> Result<Option<&'t str>> {
        match table.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(self.fail(Some(section), Some(key), "expected a string")),
        }
    }

    /// Attach the line of the offending key to a core validation error.
    fn core<T>(&self, section: &str, r: infoprice::Result<T>) -> Result<T> {
        r.map_err(|e| match &e {
            Error::InvalidParameter { name, reason } => {
                let owner = match *name {
                    "W0" => None,
                    "q" | "mu_eps" | "sigma2_eps" => Some("signal"),
                    "alpha" => Some("utility"),
                    "borrow_cap" => Some("constraints"),
                    _ => Some(section),
                };
                self.fail(owner, Some(name), reason)
            }
            _ => self.fail(Some(section), None, e),
        })
    }

    fn check_keys(&self) -> Result<()> {
        for (key, value) in self.table {
            if key == "W0" {
                continue;
            }
            let Some((_, allowed)) = SECTIONS.iter().find(|(s, _)| s == key) else {
                return Err(self.fail(None, Some(key), "unknown key or section"));
            };
            let Value::Table(t) = value else {
                return Err(self.fail(None, Some(key), "expected a table section"));
            };
            if let Some(bad) = t.keys().find(|k| !allowed.contains(&k.as_str())) {
                return Err(self.fail(Some(key), Some(bad), format!("unknown key; expected one of {}", allowed.join(", "))));
            }
        }
        Ok(())
    }

    fn run(&self) -> Result<RunConfig> {
        self.check_keys()?;
        let empty = Table::new();
        let binary_t = self.section("binary")?;
        let gaussian_t = self.section("gaussian")?;
        let signal = self.section("signal")?.unwrap_or(&empty);

        let kind = match (binary_t, gaussian_t) {
            (Some(_), Some(_)) => {
                return Err(self.fail(Some("gaussian"), None, "only one of [binary] and [gaussian] may be given"))
            }
            (Some(_), None) => ModelKind::Binary,
            (None, Some(_)) => ModelKind::Gaussian,
            (None, None) if signal.contains_key("mu_eps") || signal.contains_key("sigma2_eps") => ModelKind::Gaussian,
            (None, None) => ModelKind::Binary,
        };
        let (wrong, wrong_for) = match kind {
            ModelKind::Binary => (&["mu_eps", "sigma2_eps"][..], "binary"),
            ModelKind::Gaussian => (&["q"][..], "gaussian"),
        };
        if let Some(k) = wrong.iter().find(|k| signal.contains_key(**k)) {
            return Err(self.fail(Some("signal"), Some(k), format!("not a parameter of the {wrong_for} model")));
        }

        let mut config = RunConfig {
            kind,
            ..RunConfig::default()
        };
        let w0 = self.number(None, self.table, "W0", false)?;
        let alpha = match self.section("utility")? {
            Some(t) => self.number(Some("utility"), t, "alpha", false)?,
            None => None,
        };

        match kind {
            ModelKind::Binary => {
                let d = BinarySetup::default();
                let t = binary_t.unwrap_or(&empty);
                let sec = Some("binary");
                let market = self.core(
                    "binary",
                    BinaryMarket::new(
                        self.number(sec, t, "p", false)?.unwrap_or(d.model.market.p),
                        self.number(sec, t, "s0", false)?.unwrap_or(d.model.market.spot.s0),
                        self.number(sec, t, "delta", false)?.unwrap_or(d.model.market.spot.delta),
                    ),
                )?;
                let q = self.number(Some("signal"), signal, "q", false)?.unwrap_or(d.model.signal.q);
                let sig = self.core("signal", BinarySignal::new(q))?;
                config.binary = BinarySetup {
                    model: BinaryModel::new(market, sig),
                    utility: self.core("utility", UtilityParams::new(alpha.unwrap_or(d.utility.alpha)))?,
                    w0: self.wealth(w0.unwrap_or(d.w0))?,
                    constraints: self.constraints(d.constraints)?,
                };
            }
            ModelKind::Gaussian => {
                let d = GaussianSetup::default();
                let t = gaussian_t.unwrap_or(&empty);
                let sec = Some("gaussian");
                let dm = d.model.market;
                let market = self.core(
                    "gaussian",
                    GaussianMarket::new(
                        self.number(sec, t, "mu", false)?.unwrap_or(dm.mu),
                        self.number(sec, t, "sigma2", false)?.unwrap_or(dm.sigma2),
                        self.number(sec, t, "s0", false)?.unwrap_or(dm.spot.s0),
                        self.number(sec, t, "delta", false)?.unwrap_or(dm.spot.delta),
                    ),
                )?;
                let sig = self.core(
                    "signal",
                    GaussianSignal::new(
                        self.number(Some("signal"), signal, "mu_eps", false)?.unwrap_or(d.model.signal.mu_eps),
                        self.number(Some("signal"), signal, "sigma2_eps", true)?.unwrap_or(d.model.signal.sigma2_eps),
                    ),
                )?;
                config.gaussian = GaussianSetup {
                    model: GaussianModel::new(market, sig),
                    utility: self.core("utility", UtilityParams::new(alpha.unwrap_or(d.utility.alpha)))?,
                    w0: self.wealth(w0.unwrap_or(d.w0))?,
                    constraints: self.constraints(d.constraints)?,
                };
            }
        }
        config.output = self.output()?;
        Ok(config)
    }

    fn wealth(&self, w0: f64) -> Result<f64> {
        if w0 > 0.0 {
            Ok(w0)
        } else {
            Err(self.fail(None, Some("W0"), format!("initial wealth must be positive, got {w0}")))
        }
    }

    fn constraints(&self, default: ConstraintSet) -> Result<ConstraintSet> {
        let Some(t) = self.section("constraints")? else {
            return Ok(default);
        };
        let short = match t.get("allow_stock_short") {
            None => default.allow_stock_short,
            Some(Value::Boolean(b)) => *b,
            Some(_) => return Err(self.fail(Some("constraints"), Some("allow_stock_short"), "expected true or false")),
        };
        let cap = self.number(Some("constraints"), t, "borrow_cap", true)?.unwrap_or(default.borrow_cap);
        self.core("constraints", ConstraintSet::new(short, cap))
    }

    fn output(&self) -> Result<OutputSection> {
        let Some(t) = self.section("output")? else {
            return Ok(OutputSection::default());
        };
        let format = match self.string("output", t, "format")? {
            None => None,
            Some("csv") => Some(Format::Csv),
            Some("json") => Some(Format::Json),
            Some(other) => return Err(self.fail(Some("output"), Some("format"), format!("expected \"csv\" or \"json\", got {other:?}"))),
        };
        let plot = match self.string("output", t, "plot")? {
            None => None,
            Some("none") => Some(Plot::None),
            Some("svg") => Some(Plot::Svg),
            Some(other) => return Err(self.fail(Some("output"), Some("plot"), format!("expected \"none\" or \"svg\", got {other:?}"))),
        };
        let path = self.string("output", t, "path")?.map(PathBuf::from);
        Ok(OutputSection { format, plot, path })
    }
}
