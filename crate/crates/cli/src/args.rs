use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Parser, Debug)]
#[command(name = "gls", version, about = "Sharp Hardy-Rellich and weighted Sobolev constants and Grand Lebesgue Space norms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// K_HR, K_S and their envelopes at one (n, p)
    Constants,
    /// L_p norm of a catalog profile
    Lpnorm,
    /// GLS norm of a catalog profile
    Glsnorm,
    /// Check the GLS Hardy-Rellich inequality
    VerifyHr,
    /// Check the GLS weighted Sobolev inequality
    VerifySobolev,
    /// Ratios along the truncated extremal family
    Sharpness,
    /// Tabulate constants or envelopes over a p grid
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Lpnorm => "lpnorm",
            Command::Glsnorm => "glsnorm",
            Command::VerifyHr => "verify-hr",
            Command::VerifySobolev => "verify-sobolev",
            Command::Sharpness => "sharpness",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum GivenArg {
    F,
    G,
}

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    /// K(p) (p - 1)(p_max - p)
    Envelope,
    /// K_S(n, 2, p) against K_HR(n, p)
    KsVsKhr,
    /// the constant itself
    Constant,
}

/// Flags shared by every subcommand. A `--config` JSON file uses the same
/// keys; flags given on the command line win.
#[derive(Args, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Flags {
    /// Dimension
    #[arg(long, global = true)]
    pub n: Option<usize>,

    /// Order of the fractional Laplacian
    #[arg(long, global = true)]
    pub beta: Option<f64>,

    /// Lebesgue exponent (sharpness: the target exponent p*)
    #[arg(long, global = true)]
    pub p: Option<f64>,

    /// Lower end of the exponent interval
    #[arg(long, global = true)]
    pub a: Option<f64>,

    /// Upper end of the exponent interval
    #[arg(long, global = true)]
    pub b: Option<f64>,

    /// natural | unit | power(beta, gamma) | power_infinite(beta, gamma) | degenerate(r) | path to a JSON psi record
    #[arg(long, global = true)]
    pub psi: Option<String>,

    /// Catalog profile such as gaussian(0.5), or a JSON spec (inline or file)
    #[arg(long, global = true)]
    pub f: Option<String>,

    /// Allowed excess of a ratio over 1
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Omit the timestamp so reruns are byte-identical
    #[arg(long, global = true)]
    #[serde(default)]
    pub no_timestamp: bool,

    /// JSON file with default values for these flags
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Grid size (sweep rows, or the supremum grid of GLS commands)
    #[arg(long, global = true)]
    pub points: Option<usize>,

    /// Decreasing truncation radii for `sharpness`, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,

    /// Width of the smoothing zones of truncated profiles
    #[arg(long, global = true)]
    pub smoothing: Option<f64>,

    /// Whether verify-sobolev receives f or g = (-Delta)^{beta/2} f
    #[arg(long, global = true, value_enum)]
    pub given: Option<GivenArg>,

    /// What `sweep` tabulates
    #[arg(long, global = true, value_enum)]
    pub kind: Option<SweepKind>,

    /// Relative tolerance of every adaptive integral
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
}

impl Flags {
    /// Fills unset flags from `file`.
    pub fn merged_over(self, file: Flags) -> Flags {
        Flags {
            n: self.n.or(file.n),
            beta: self.beta.or(file.beta),
            p: self.p.or(file.p),
            a: self.a.or(file.a),
            b: self.b.or(file.b),
            psi: self.psi.or(file.psi),
            f: self.f.or(file.f),
            tol: self.tol.or(file.tol),
            format: self.format.or(file.format),
            out: self.out.or(file.out),
            no_timestamp: self.no_timestamp || file.no_timestamp,
            config: self.config,
            points: self.points.or(file.points),
            eps: self.eps.or(file.eps),
            smoothing: self.smoothing.or(file.smoothing),
            given: self.given.or(file.given),
            kind: self.kind.or(file.kind),
            rel_tol: self.rel_tol.or(file.rel_tol),
        }
    }
}

pub fn read_config(path: &Path) -> Result<Flags, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
}
