//! Command-line front end: argument parsing, shape descriptions and report
//! rendering. `main.rs` only parses and prints.

pub mod commands;
pub mod output;
pub mod spec;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gwl4::euler_lagrange::SearchOptions;
use gwl4::GwError;

use crate::commands::Coefficient;
use crate::output::{Format, Report};
use crate::spec::{parse_param, parse_profile, ShapeKind, ShapeSpec, SpecDoc};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or an impossible request; exit code 2.
    Usage(String),
    /// The computation itself failed; exit code 3.
    Numeric(GwError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Numeric(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<GwError> for CliError {
    fn from(e: GwError) -> CliError {
        match e {
            GwError::InvalidInput(m) | GwError::Dimension(m) => CliError::Usage(m),
            other => CliError::Numeric(other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gwl4", version, about = "Conformal invariants of closed 4-submanifolds")]
pub struct Cli {
    /// Print one JSON document.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Print CSV rows.
    #[arg(long, global = true)]
    pub csv: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the invariant over a closed submanifold.
    Invariant {
        #[command(flatten)]
        shape: ShapeArgs,
        /// Nodes per parameter axis; 16 by default, 8 in a conformally
        /// flat ambient where no axis can be collapsed.
        #[arg(long)]
        grid: Option<usize>,
        /// Explicit node count per parameter axis, e.g. `16,1,1,1`.
        #[arg(long, conflicts_with = "grid")]
        counts: Option<String>,
        /// Integrate products numerically instead of using the closed form.
        #[arg(long)]
        quadrature: bool,
    },
    /// Find the critical products of spheres with a given dimension profile.
    Search {
        /// Sphere dimensions summing to 4, e.g. `3,1`.
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
        log_min: f64,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        log_max: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
    /// Evaluate a pointwise coefficient at a parameter point.
    Expand {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long, value_enum)]
        coefficient: Coefficient,
        /// Parameter point, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Fit the small-cutoff expansion of a hemisphere's hyperbolic volume.
    Renvol {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 1e-3)]
        eps_min: f64,
        #[arg(long, default_value_t = 1e-1)]
        eps_max: f64,
        #[arg(long, default_value_t = 40)]
        samples: usize,
    },
    /// Evaluate the Euler-Lagrange residual.
    Residual {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
}

/// The three ways to name a shape: flags, a one-line spec, or a JSON file.
#[derive(Debug, Args, Default)]
pub struct ShapeArgs {
    /// `product` or `builtin-chart`.
    #[arg(long)]
    pub shape: Option<String>,
    /// Product profile `k:r,k:r,...`.
    #[arg(long)]
    pub profile: Option<String>,
    /// Built-in chart family.
    #[arg(long)]
    pub family: Option<String>,
    /// Chart parameter `key=v[,v...]`, repeatable.
    #[arg(long = "param")]
    pub params: Vec<String>,
    /// `flat`, `round-sphere:D`, `hyperbolic:D` or `conformal-flat:ID`.
    #[arg(long)]
    pub ambient: Option<String>,
    /// One-line form, e.g. `product[3:1,1:0.5]@flat`.
    #[arg(long = "spec", conflicts_with_all = ["shape", "config"])]
    pub spec_string: Option<String>,
    /// JSON file with the same fields as the flags.
    #[arg(long, conflicts_with = "shape")]
    pub config: Option<PathBuf>,
}

impl ShapeArgs {
    pub fn resolve(&self) -> Result<ShapeSpec, CliError> {
        if let Some(s) = &self.spec_string {
            return s.parse();
        }
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let doc: SpecDoc =
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?;
            return doc.into_spec();
        }
        let kind = self.shape.as_deref().ok_or_else(|| CliError::Usage("give --shape, --spec or --config".into()))?;
        let ambient = self.ambient.as_deref().unwrap_or("flat").parse()?;
        let shape = match kind {
            "product" => {
                let p = self.profile.as_deref().ok_or_else(|| CliError::Usage("--shape product needs --profile".into()))?;
                ShapeKind::Product(parse_profile(p)?)
            }
            "builtin-chart" => {
                let family = self.family.clone().ok_or_else(|| CliError::Usage("--shape builtin-chart needs --family".into()))?;
                let params: BTreeMap<_, _> = self.params.iter().map(|p| parse_param(p)).collect::<Result<_, _>>()?;
                ShapeKind::Chart { family, params }
            }
            other => return Err(CliError::Usage(format!("unknown shape {other:?}; use product or builtin-chart"))),
        };
        ShapeSpec::new(shape, ambient)
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| CliError::Usage(format!("bad {what} entry {x:?}"))))
        .collect()
}

impl Cli {
    pub fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            Format::Table
        }
    }
}

pub fn run(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Invariant { shape, grid, counts, quadrature } => {
            let counts = counts.as_deref().map(|c| parse_list::<usize>(c, "counts")).transpose()?;
            commands::invariant(&shape.resolve()?, *grid, counts.as_deref(), *quadrature)
        }
        Command::Search { profile, log_min, log_max, step } => {
            let dims: Vec<usize> = parse_list(profile, "profile")?;
            let opt = SearchOptions { log_min: *log_min, log_max: *log_max, step: *step, ..Default::default() };
            commands::search(&dims, &opt)
        }
        Command::Expand { shape, coefficient, point } => {
            let x = point.as_deref().map(|p| parse_list::<f64>(p, "point")).transpose()?;
            commands::expand(&shape.resolve()?, *coefficient, x.as_deref())
        }
        Command::Renvol { n, radius, eps_min, eps_max, samples } => {
            commands::renvol(*n, *radius, (*eps_min, *eps_max), *samples)
        }
        Command::Residual { shape, point } => {
            let x = point.as_deref().map(|p| parse_list::<f64>(p, "point")).transpose()?;
            commands::residual(&shape.resolve()?, x.as_deref())
        }
    }
}
