use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eprb_core::{ModelKind, Sign};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "eprb", version, about = "EPRB hidden-variable model simulator")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalArgs {
    /// Seed for all random streams.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Monte Carlo trials per correlation or per setting.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub trials: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Output path, `-` for stdout.
    #[arg(long, global = true, default_value = "-")]
    pub out: String,

    /// Where to write the run manifest for CSV output. Defaults to
    /// `<out>.manifest.json`, or stderr when writing to stdout.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Qm,
    BellNaive,
    Matzkin,
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> ModelKind {
        match m {
            Model::Qm => ModelKind::QuantumReference,
            Model::BellNaive => ModelKind::BellNaive,
            Model::Matzkin => ModelKind::MatzkinConditioned,
        }
    }
}

/// A raw `x,y,z` triple, validated into a unit vector later so that a
/// non-unit input maps to its own exit code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Triple(pub [f64; 3]);

impl std::str::FromStr for Triple {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected `x,y,z`, got `{s}`"));
        }
        let mut out = [0.0; 3];
        for (slot, p) in out.iter_mut().zip(&parts) {
            *slot = p
                .parse::<f64>()
                .map_err(|e| format!("bad component `{p}` in `{s}`: {e}"))?;
            if !slot.is_finite() {
                return Err(format!("non-finite component in `{s}`"));
            }
        }
        Ok(Triple(out))
    }
}

/// A `;`-separated list of triples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleList(pub Vec<Triple>);

impl std::str::FromStr for TripleList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(';')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Triple>, String>>()
            .map(TripleList)
    }
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    s.parse()
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Estimate one pair correlation E(a, b).
    Correlate(CorrelateArgs),
    /// Correlation against analyzer angle, with closed forms alongside.
    Sweep(SweepArgs),
    /// CHSH combination of four correlations. Exits 10 when violated.
    Chsh(ChshArgs),
    /// Locality, no-signaling and ring-consistency audits. Exits 11 when
    /// remote dependence is detected.
    Audit(AuditArgs),
    /// Re-run the command recorded in a manifest and verify its checksums.
    Replay(ReplayArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CorrelateArgs {
    #[arg(long, value_enum)]
    pub model: Model,

    /// Angle between the analyzers in degrees (a on +z, b in the x–z plane).
    #[arg(long, conflicts_with_all = ["a", "b"])]
    pub angle_deg: Option<f64>,

    #[arg(long, requires = "b")]
    pub a: Option<Triple>,

    #[arg(long, requires = "a")]
    pub b: Option<Triple>,

    /// Also integrate over λ on a square grid with about this many nodes.
    #[arg(long)]
    pub quadrature_nodes: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub model: Model,

    #[arg(long, default_value_t = 0.0)]
    pub theta_start: f64,

    #[arg(long, default_value_t = 180.0)]
    pub theta_end: f64,

    #[arg(long, default_value_t = 13)]
    pub theta_steps: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ChshArgs {
    #[arg(long, value_enum)]
    pub model: Model,

    /// Use a = 0°, a′ = 90°, b = 45°, b′ = 135° in the x–z plane.
    #[arg(long, conflicts_with_all = ["a", "a_prime", "b", "b_prime"])]
    pub optimal_planar: bool,

    #[arg(long, requires_all = ["a_prime", "b", "b_prime"])]
    pub a: Option<Triple>,

    #[arg(long)]
    pub a_prime: Option<Triple>,

    #[arg(long)]
    pub b: Option<Triple>,

    #[arg(long)]
    pub b_prime: Option<Triple>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Locality,
    NoSignaling,
    Ring,
}

#[derive(Debug, Args, Serialize)]
pub struct AuditArgs {
    #[arg(long, value_enum)]
    pub check: Check,

    /// Engine to audit (locality and no-signaling checks).
    #[arg(long, value_enum)]
    pub model: Option<Model>,

    /// Fixed hidden variable of particle 1 for the locality check.
    #[arg(long, default_value = "0,0,1")]
    pub probe: Triple,

    /// Remote settings for particle 1, `x,y,z;x,y,z;...`.
    #[arg(long, default_value = "0,0,1;1,0,0")]
    pub settings: TripleList,

    /// Particle 2's analyzer axis.
    #[arg(long, conflicts_with = "b_angle_deg")]
    pub b: Option<Triple>,

    /// Particle 2's analyzer as an angle from +z in the x–z plane.
    #[arg(long)]
    pub b_angle_deg: Option<f64>,

    /// Fail with exit code 4 instead of applying the tie convention when the
    /// probe is orthogonal to a setting.
    #[arg(long)]
    pub reject_ties: bool,

    /// Eigenstate axis for the ring check.
    #[arg(long, default_value = "0,0,1")]
    pub state_axis: Triple,

    #[arg(long, default_value = "+1", value_parser = parse_sign, allow_hyphen_values = true)]
    pub state_sign: Sign,

    #[arg(long, conflicts_with = "meas_angle_deg")]
    pub meas_axis: Option<Triple>,

    /// Measurement axis as an angle from the state axis.
    #[arg(long)]
    pub meas_angle_deg: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest_path: PathBuf,
}
