//! Flag, environment and config-file resolution.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

pub const SEED_ENV: &str = "MOMENTUM_LAB_SEED";
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "momentum-lab", version, about = "Numerical checks of momentum-map convexity results")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equivalence suite for linear involutions of symplectic spaces.
    Lemma212(Common),
    /// Cone biduality and fullness suite.
    ConeSuite(Common),
    /// Local normal-form suite: critical-point classification and inner-point probe.
    LocalmodelSuite(Common),
    /// Kostant convexity check for `log ã(K exp Y)`.
    Kostant(Common),
    /// Residual checks on a symplectic leaf of a complexified group.
    LeafCheck(Common),
    /// The explicit SO(1,4) computation showing the involution is not anti-symplectic.
    ExampleSo14(Common),
    /// Runs the full acceptance battery.
    All(Common),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Lemma212(_) => "lemma212",
            Command::ConeSuite(_) => "cone-suite",
            Command::LocalmodelSuite(_) => "localmodel-suite",
            Command::Kostant(_) => "kostant",
            Command::LeafCheck(_) => "leaf-check",
            Command::ExampleSo14(_) => "example-so14",
            Command::All(_) => "all",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Lemma212(c)
            | Command::ConeSuite(c)
            | Command::LocalmodelSuite(c)
            | Command::Kostant(c)
            | Command::LeafCheck(c)
            | Command::ExampleSo14(c)
            | Command::All(c) => c,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Group family: sl2r, sl3r, sl4r, so12, so13, so14, sl2c, sl3c, so5c.
    #[arg(long)]
    pub family: Option<String>,
    /// Y as comma-separated diagonal entries (SL) or 𝔞-coordinates.
    #[arg(long = "Y", allow_hyphen_values = true, value_delimiter = ',')]
    pub y: Option<Vec<f64>>,
    /// log a as comma-separated diagonal entries (SL) or 𝔞-coordinates.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub a: Option<Vec<f64>>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Overrides MOMENTUM_LAB_SEED and the config file.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol_in: Option<f64>,
    #[arg(long)]
    pub tol_v: Option<f64>,
    #[arg(long)]
    pub gap_max: Option<f64>,
    /// Number of random instances (per dimension for cone-suite).
    #[arg(long)]
    pub trials: Option<u64>,
    /// Largest even dimension for lemma212.
    #[arg(long)]
    pub dim_max: Option<usize>,
    /// Planted full-cone models for localmodel-suite.
    #[arg(long)]
    pub planted: Option<usize>,
    /// Probe scale for localmodel-suite.
    #[arg(long)]
    pub s0: Option<f64>,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the sampled momentum images as CSV.
    #[arg(long)]
    pub points_csv: Option<PathBuf>,
    /// Print the JSON report on stdout instead of the text summary.
    #[arg(long)]
    pub json: bool,
    /// TOML file with defaults for any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Replaces n by n·exp(eps·N_1) in example-so14 (negative control).
    #[arg(long, hide = true)]
    pub perturb_n: Option<f64>,
}

/// Keys accepted in the config file; names match the long flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub family: Option<String>,
    #[serde(rename = "Y")]
    pub y: Option<Vec<f64>>,
    pub a: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol_in: Option<f64>,
    pub tol_v: Option<f64>,
    pub gap_max: Option<f64>,
    pub trials: Option<u64>,
    pub dim_max: Option<usize>,
    pub planted: Option<usize>,
    pub s0: Option<f64>,
    pub out: Option<PathBuf>,
    pub points_csv: Option<PathBuf>,
}

/// Fully resolved settings; the defaults that depend on the command are
/// filled in by the command itself.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub family: Option<String>,
    #[serde(rename = "Y")]
    pub y: Option<Vec<f64>>,
    pub a: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub tol_in: Option<f64>,
    pub tol_v: Option<f64>,
    pub gap_max: Option<f64>,
    pub trials: Option<u64>,
    pub dim_max: Option<usize>,
    pub planted: Option<usize>,
    pub s0: Option<f64>,
    pub out: Option<PathBuf>,
    pub points_csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturb_n: Option<f64>,
}

pub fn load_file(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
}

/// Flags win over the file; the seed comes from the flag, then the
/// environment, then the file, then `DEFAULT_SEED`.
pub fn resolve(flags: &Common, env_seed: Option<&str>) -> Result<RunConfig, String> {
    let file = match &flags.config {
        Some(p) => load_file(p)?,
        None => FileConfig::default(),
    };
    let env_seed = match env_seed {
        Some(s) => Some(s.trim().parse::<u64>().map_err(|e| format!("{SEED_ENV}={s:?}: {e}"))?),
        None => None,
    };
    let seed = flags.seed.or(env_seed).or(file.seed).unwrap_or(DEFAULT_SEED);
    Ok(RunConfig {
        family: flags.family.clone().or(file.family),
        y: flags.y.clone().or(file.y),
        a: flags.a.clone().or(file.a),
        samples: flags.samples.or(file.samples),
        seed,
        tol_in: flags.tol_in.or(file.tol_in),
        tol_v: flags.tol_v.or(file.tol_v),
        gap_max: flags.gap_max.or(file.gap_max),
        trials: flags.trials.or(file.trials),
        dim_max: flags.dim_max.or(file.dim_max),
        planted: flags.planted.or(file.planted),
        s0: flags.s0.or(file.s0),
        out: flags.out.clone().or(file.out),
        points_csv: flags.points_csv.clone().or(file.points_csv),
        perturb_n: flags.perturb_n,
    })
}
