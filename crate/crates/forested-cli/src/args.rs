use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use forested_core::exact::ExactRational;
use serde::{Serialize, Serializer};

#[derive(Parser, Debug, Clone)]
#[command(name = "forested", version, about = "Generating functions of planar maps with spanning forests")]
pub struct Cli {
    /// Working precision in decimal digits for numeric commands.
    #[arg(long, global = true, env = "FORESTED_PRECISION", default_value_t = 50,
          value_parser = clap::value_parser!(u32).range(16..=5000))]
    pub precision: u32,
    /// Output format; JSON by default, a text table for `repro`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the artifact to a file instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Series coefficients (F, F', G, H, R, S, S̃) with u symbolic or fixed.
    Coeffs(CoeffsArgs),
    /// Enumerate maps by brute force and compare with the series.
    Oracle(OracleArgs),
    /// Check the algebraic identities and differential equations.
    Verify(VerifyArgs),
    /// Radius of convergence and singular profile.
    Radius(RadiusArgs),
    /// Coefficient ratio tables, the logarithmic probe and the cubic β fit.
    Asymptotics(AsymptoticsArgs),
    /// Statistics of large random 4-valent forested maps.
    Random(RandomArgs),
    /// Series re-expanded in μ = u + 1, with nonnegativity flags.
    MuExpand(MuExpandArgs),
    /// Run the acceptance checks and print a pass/fail table.
    Repro(ReproArgs),
}

/// `u` as given on the command line.
#[derive(Clone, Debug, PartialEq)]
pub enum USpec {
    Symbolic,
    Value(ExactRational),
}

impl Serialize for USpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            USpec::Symbolic => s.serialize_str("symbolic"),
            USpec::Value(r) => s.serialize_str(&r.to_string()),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<ExactRational, String> {
    let t = s.trim().replace('−', "-");
    t.parse::<ExactRational>().map_err(|e| format!("expected a rational such as -1/2 or 0.05: {e}"))
}

pub fn parse_u(s: &str) -> Result<USpec, String> {
    if s.trim().eq_ignore_ascii_case("symbolic") {
        Ok(USpec::Symbolic)
    } else {
        parse_rational(s).map(USpec::Value)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesName {
    F,
    Fprime,
    G,
    H,
    R,
    S,
    STilde,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CoeffsArgs {
    #[arg(long, default_value_t = 3)]
    pub p: usize,
    /// Highest power of z.
    #[arg(long, default_value_t = 6)]
    pub order: usize,
    /// `symbolic` or a rational value.
    #[arg(long, default_value = "symbolic", value_parser = parse_u, allow_hyphen_values = true)]
    pub u: USpec,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "f")]
    pub series: Vec<SeriesName>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    AllForests,
    TreeRootedActivity,
    RootEdgeOutside,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OracleArgs {
    #[arg(long)]
    pub p: usize,
    /// Number of faces, the exponent of z.
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "all-forests")]
    pub variant: VariantArg,
    /// Also write the enumerated maps as JSON.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// Refuse when the estimated number of candidates exceeds this.
    #[arg(long)]
    pub limit: Option<u128>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    /// Every identity and every differential equation.
    #[arg(long)]
    pub all: bool,
    /// Every identity.
    #[arg(long)]
    pub identities: bool,
    /// Every differential equation.
    #[arg(long)]
    pub des: bool,
    /// One identity by name, repeatable.
    #[arg(long = "identity")]
    pub identity: Vec<String>,
    /// One differential equation by name, repeatable.
    #[arg(long = "de")]
    pub de: Vec<String>,
    #[arg(long, default_value_t = 12)]
    pub order: usize,
    /// `u` for the differential equations.
    #[arg(long, default_value = "symbolic", value_parser = parse_u, allow_hyphen_values = true)]
    pub u: USpec,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RadiusArgs {
    #[arg(long)]
    pub p: usize,
    /// One or more values, comma separated.
    #[arg(long, value_parser = parse_rational, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub u: Vec<ExactRational>,
    /// For p = 3, also the radius of S̃.
    #[arg(long)]
    pub s_tilde: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AsymptoticsArgs {
    #[arg(long, default_value_t = 4)]
    pub p: usize,
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub u: ExactRational,
    /// Sizes for the ratio table.
    #[arg(long, value_delimiter = ',', default_value = "50,100,200,400")]
    pub n: Vec<usize>,
    /// Logarithmic probe of F'' near ρ (p = 4, u < 0).
    #[arg(long, conflicts_with = "beta")]
    pub log_probe: bool,
    /// Probe and fit of the coefficient β of the singular expansion (p = 3).
    #[arg(long)]
    pub beta: bool,
    /// Points z/ρ for the probes.
    #[arg(long, value_delimiter = ',', default_value = "0.9,0.99,0.999")]
    pub z: Vec<f64>,
    /// Largest allowed truncation tail bound.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 40000)]
    pub max_terms: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RandomArgs {
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub u: ExactRational,
    /// Largest root-component size in the law of S_n.
    #[arg(long, default_value_t = 5)]
    pub k_max: usize,
    /// Finite sizes.
    #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
    pub n: Vec<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MuExpandArgs {
    #[arg(long, default_value_t = 3)]
    pub p: usize,
    #[arg(long, default_value_t = 12)]
    pub order: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ReproArgs {
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<usize>,
}
