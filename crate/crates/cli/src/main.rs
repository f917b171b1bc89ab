mod commands;
mod config;
mod output;
mod svg;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use commands::{Artifact, Axis, Rule};
use config::{Format, Plot, RunConfig};

const AFTER_HELP: &str = "\
Defaults (used for every key the config file leaves out):
  binary model    p=0.4 s0=0.5 delta=0.95, signal q=0.7, W0=5, alpha=0.1,
                  no short selling and no borrowing
  gaussian model  mu=1.1 sigma2=0.2 s0=1 delta=0.95, signal mu_eps=0
                  sigma2_eps=0.2, W0=10, alpha=0.1, no position limits
  The binary model is used unless the config has a [gaussian] section or
  gaussian signal keys.

Config file (TOML):
  W0 = 5.0
  [binary]       p, s0, delta          (or [gaussian]: mu, sigma2, s0, delta)
  [signal]       q                     (gaussian: mu_eps, sigma2_eps; \"inf\" allowed)
  [utility]      alpha
  [constraints]  allow_stock_short (bool), borrow_cap (number or \"inf\")
  [output]       format (csv|json), plot (none|svg), path

Output: tables go to stdout unless --out is given. For `figure`, --out names
a directory (default: current directory) receiving figureN.csv and, with
--plot svg, figureN*.svg. Floats are written with %.12g.";

#[derive(Debug, Parser)]
#[command(name = "infoprice", version, about = "Utility-indifference prices of noisy information", after_help = AFTER_HELP)]
struct Cli {
    /// TOML configuration file
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output file (a directory for `figure`) [default: stdout]
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Table format [default: csv]
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Also render plots
    #[arg(long, global = true, value_enum)]
    plot: Option<PlotArg>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PlotArg {
    Svg,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Price one observation (all three for the binary model when --xi is omitted)
    Price {
        /// Observed signal
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<f64>,
        #[arg(long, value_enum, default_value_t = Rule::Posterior)]
        rule: Rule,
    },
    /// Sweep the cost over information levels or signal values
    Curve {
        #[arg(long, value_enum, default_value_t = Axis::Info)]
        axis: Axis,
        /// Largest information level in bits
        #[arg(long, default_value_t = 4.0)]
        max_bits: f64,
        /// Number of sample points
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Signal range lo:hi for --axis xi [default: 4 standard deviations around the critical signal]
        #[arg(long, allow_hyphen_values = true)]
        xi_range: Option<String>,
    },
    /// Write the data behind figure N (1-6)
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=6))]
        n: u8,
    },
    /// Signal-averaged cost
    FlatRate {
        #[arg(long, value_enum, default_value_t = Rule::Posterior)]
        rule: Rule,
    },
    /// Check every closed form against its brute-force oracle
    Verify {
        /// Monte Carlo draws for the flat-rate check
        #[arg(long, default_value_t = 1_000_000)]
        draws: usize,
        /// Monte Carlo seed
        #[arg(long, default_value_t = 20_240_917)]
        seed: u64,
    },
}

struct Sink {
    format: Format,
    plot: Plot,
    out: Option<PathBuf>,
}

impl Sink {
    fn extension(&self) -> &'static str {
        match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    fn write_file(path: &Path, contents: &str) -> Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
        }
        std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
    }

    /// Tables to stdout or a single file; plots beside the file, or in the
    /// current directory when writing to stdout.
    fn emit(&self, artifacts: &[Artifact]) -> Result<()> {
        let mut stdout = std::io::stdout().lock();
        for a in artifacts {
            let text = a.table.render(self.format);
            let plot_dir = match &self.out {
                Some(path) => {
                    Self::write_file(path, &text)?;
                    path.parent().map(Path::to_path_buf).unwrap_or_default()
                }
                None => {
                    stdout.write_all(text.as_bytes())?;
                    PathBuf::new()
                }
            };
            if self.plot == Plot::Svg {
                for (name, svg) in &a.plots {
                    Self::write_file(&plot_dir.join(format!("{name}.svg")), svg)?;
                }
            }
        }
        Ok(())
    }

    fn emit_dir(&self, artifacts: &[Artifact]) -> Result<()> {
        let dir = self.out.clone().unwrap_or_else(|| PathBuf::from("."));
        for a in artifacts {
            let path = dir.join(format!("{}.{}", a.name, self.extension()));
            Self::write_file(&path, &a.table.render(self.format))?;
            eprintln!("wrote {}", path.display());
            if self.plot == Plot::Svg {
                for (name, svg) in &a.plots {
                    let path = dir.join(format!("{name}.svg"));
                    Self::write_file(&path, svg)?;
                    eprintln!("wrote {}", path.display());
                }
            }
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let sink = Sink {
        format: match cli.format {
            Some(FormatArg::Csv) => Format::Csv,
            Some(FormatArg::Json) => Format::Json,
            None => config.output.format.unwrap_or(Format::Csv),
        },
        plot: match cli.plot {
            Some(PlotArg::Svg) => Plot::Svg,
            None => config.output.plot.unwrap_or(Plot::None),
        },
        out: cli.out.clone().or_else(|| config.output.path.clone()),
    };

    match cli.command {
        Command::Price { xi, rule } => sink.emit(&commands::price(&config, xi, rule)?)?,
        Command::Curve {
            axis,
            max_bits,
            points,
            xi_range,
        } => {
            let range = xi_range.as_deref().map(commands::parse_range).transpose()?;
            sink.emit(&commands::curve(&config, axis, max_bits, points, range)?)?
        }
        Command::Figure { n } => sink.emit_dir(&commands::figure(&config, n)?)?,
        Command::FlatRate { rule } => sink.emit(&commands::flat_rate_cmd(&config, rule)?)?,
        Command::Verify { draws, seed } => {
            let outcome = commands::verify(&config, draws, seed)?;
            sink.emit(&outcome.artifacts)?;
            if !outcome.failures.is_empty() {
                for r in &outcome.failures {
                    eprintln!(
                        "FAILED {}: closed form {} vs oracle {} (abs err {:e} > {:e})",
                        r.quantity_name, r.closed_form, r.oracle_value, r.abs_err, r.tolerance
                    );
                }
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
