use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use grunsky::families::Family;
use grunsky::{Error, Result, C64};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "grunsky", version, about = "Grunsky norms, abelian suprema and their verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Grunsky coefficients alpha_mn of a map.
    Coefficients,
    /// Truncated Grunsky norms kappa_N.
    Norm,
    /// Abelian supremum alpha_N of a family's Beltrami coefficient.
    Alpha,
    /// Sandwich and Golusin checks along the family's Teichmueller disk.
    Verify,
    /// Lower estimates of the metric lambda_kappa(r).
    Metric,
    /// artanh kappa(r_max) against the integrated metric.
    Lemma4,
    /// Fredholm eigenvalue 1 / kappa_N.
    Fredholm,
}

#[derive(Debug, Args)]
pub struct Opts {
    /// Catalog family: `joukowski` or `power:m` with odd `m >= 3`.
    #[arg(long, global = true, conflicts_with = "coeffs")]
    pub family: Option<String>,
    /// JSON coefficient file {"b0": [re, im], "tail": [[re, im], ...]}.
    #[arg(long, global = true, value_name = "FILE")]
    pub coeffs: Option<PathBuf>,
    /// Family parameter "re,im"; a "-normalized" suffix scales mu to sup norm |t|.
    #[arg(long, global = true, value_name = "RE,IM", allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Same as the "-normalized" suffix on --t.
    #[arg(long, global = true)]
    pub normalized: bool,
    /// Comma-separated disk parameters.
    #[arg(long = "t-grid", global = true, value_name = "CSV")]
    pub t_grid: Option<String>,
    /// Comma-separated truncation ladder.
    #[arg(long = "N", global = true, value_name = "CSV")]
    pub n: Option<String>,
    /// Report file; stdout when absent.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Optional CSV table for plotting.
    #[arg(long, global = true, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random vectors per optimization or sweep.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Simpson intervals for lemma4.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Upper end of the lemma4 integral.
    #[arg(long = "r-max", global = true)]
    pub r_max: Option<f64>,
}

/// Validated run configuration, echoed into the report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<C64>,
    pub normalized: bool,
    pub t_grid: Vec<f64>,
    pub ladder: Vec<usize>,
    pub seed: u64,
    pub budget: usize,
    pub grid: usize,
    pub r_max: f64,
}

pub const DEFAULT_BUDGET: usize = 256;
pub const DEFAULT_GOLUSIN_VECTORS: usize = 100;
pub const DEFAULT_LEMMA4_GRID: usize = 32;
pub const DEFAULT_R_MAX: f64 = 0.5;

pub fn parse_complex(s: &str) -> Result<(C64, bool)> {
    let (body, normalized) = match s.trim().strip_suffix("-normalized") {
        Some(b) => (b, true),
        None => (s.trim(), false),
    };
    let bad = || Error::Parse(format!("t: expected \"re,im\", got {s:?}"));
    let (re, im) = body.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok((C64::new(re, im), normalized))
}

fn parse_csv<T: std::str::FromStr>(field: &str, s: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{field}: cannot parse {p:?}")))
        })
        .collect()
}

impl Cli {
    pub fn config(&self) -> Result<RunConfig> {
        let o = &self.opts;
        let family = o.family.as_deref().map(str::parse::<Family>).transpose()?;
        let (t, suffix) = match &o.t {
            Some(s) => {
                let (t, n) = parse_complex(s)?;
                (Some(t), n)
            }
            None => (None, false),
        };
        let ladder = match &o.n {
            Some(s) => parse_csv::<usize>("N", s)?,
            None => grunsky::DEFAULT_LADDER.to_vec(),
        };
        if ladder.is_empty() || ladder.contains(&0) {
            return Err(Error::Parse("N: ladder entries must be positive".into()));
        }
        let t_grid = match &o.t_grid {
            Some(s) => parse_csv::<f64>("t-grid", s)?,
            None => grunsky::DEFAULT_RADII.to_vec(),
        };
        let cfg = RunConfig {
            command: self.command,
            family,
            coeffs: o.coeffs.as_ref().map(|p| p.display().to_string()),
            t,
            normalized: o.normalized || suffix,
            t_grid,
            ladder,
            seed: o.seed,
            budget: o.budget.unwrap_or(match self.command {
                Command::Verify => DEFAULT_GOLUSIN_VECTORS,
                _ => DEFAULT_BUDGET,
            }),
            grid: o.grid.unwrap_or(DEFAULT_LEMMA4_GRID),
            r_max: o.r_max.unwrap_or(DEFAULT_R_MAX),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        match (&self.family, &self.coeffs) {
            (Some(_), Some(_)) => return Err(Error::Parse("family: give --family or --coeffs, not both".into())),
            (None, None) => return Err(Error::Parse("family: one of --family or --coeffs is required".into())),
            _ => {}
        }
        let needs_family = matches!(
            self.command,
            Command::Alpha | Command::Verify | Command::Metric | Command::Lemma4
        );
        if needs_family && self.family.is_none() {
            return Err(Error::Parse("family: this command needs --family".into()));
        }
        let needs_t = matches!(
            self.command,
            Command::Coefficients | Command::Norm | Command::Alpha | Command::Fredholm
        );
        if needs_t && self.family.is_some() && self.t.is_none() {
            return Err(Error::Parse("t: --family needs --t RE,IM".into()));
        }
        if self.normalized && self.command != Command::Alpha {
            return Err(Error::Parse("t: normalization only applies to alpha".into()));
        }
        Ok(())
    }

    pub fn max_n(&self) -> usize {
        self.ladder.iter().copied().max().unwrap_or(1)
    }
}
