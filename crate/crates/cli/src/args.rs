use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "visrobust", version, about = "Visual robustness benchmarking for VQA models")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write corrupted copies of every input image plus a manifest.
    Generate(GenerateArgs),
    /// Score prediction files against annotations into a grid file.
    Evaluate(EvaluateArgs),
    /// Compute accuracy tables, sub-metrics and VRE from a grid file.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// Directory of input images (png or jpeg).
    #[arg(long)]
    pub images: PathBuf,
    /// Output root; images land in <out>/<corruption>/<level>/<image_id>.png.
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated corruption ids, `benchmark` (the 14) or `all`.
    #[arg(long, default_value = "benchmark")]
    pub corruptions: String,
    /// Levels as `1..5`, `2..=4` or `1,3,5`.
    #[arg(long, default_value = "1..5")]
    pub levels: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// TOML severity table; defaults to the built-in v1 table.
    #[arg(long)]
    pub severity_table: Option<PathBuf>,
    /// Worker threads; 0 uses every logical CPU.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Dataset name recorded in the manifest (defaults to the image directory name).
    #[arg(long)]
    pub dataset: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    /// VQAv2 questions file.
    #[arg(long)]
    pub questions: PathBuf,
    /// VQAv2 annotations file.
    #[arg(long)]
    pub annotations: PathBuf,
    /// Prediction tree laid out as <model>/<corruption>/<level>.json, clean run at <model>/clean/0.json.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Explicit prediction file `MODEL,CORRUPTION,LEVEL,PATH`; overrides the tree. Repeatable.
    #[arg(long = "prediction", value_name = "MODEL,CORRUPTION,LEVEL,PATH")]
    pub prediction: Vec<String>,
    /// Model order in the grid (comma-separated); default is sorted by name.
    #[arg(long)]
    pub models: Option<String>,
    /// Compare answers byte-for-byte instead of normalizing them.
    #[arg(long)]
    pub exact_match: bool,
    /// Output grid file (CSV).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Grid file written by `evaluate`.
    #[arg(long)]
    pub grid: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Five weights for F,R,rho,mu,delta summing to 1, comma-separated.
    #[arg(long, conflicts_with = "prefer")]
    pub weights: Option<String>,
    /// Preference score `name=score` (names: F, R, rho, mu, delta); unset scores are 0. Repeatable.
    #[arg(long, value_name = "NAME=SCORE")]
    pub prefer: Vec<String>,
}
