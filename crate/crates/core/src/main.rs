use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use alestats::bootstrap::BootMode;
use alestats::cli::{run_analysis, AnalysisConfig, ModelSpec};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Boot {
    None,
    Data,
    Model,
}

/// Accumulated local effects with bootstrap intervals, effect-size
/// statistics and confidence regions.
///
/// Set RAYON_NUM_THREADS to control the worker count.
#[derive(Debug, Parser)]
#[command(name = "alestats", version)]
struct Args {
    /// Input CSV with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Name of the numeric outcome column.
    #[arg(long)]
    outcome: String,
    /// ols, tree:<max_depth>,<min_leaf> or exec:<shell command>.
    #[arg(long, default_value = "ols")]
    model: ModelSpec,
    /// Bootstrap mode.
    #[arg(long, value_enum, default_value = "data")]
    boot: Boot,
    /// Bootstrap iterations.
    #[arg(long, default_value_t = 100)]
    n_it: usize,
    /// Confidence level of the bootstrap intervals.
    #[arg(long, default_value_t = 0.95)]
    ci_level: f64,
    /// Random variables used for p-values and the ALER band (0 disables).
    #[arg(long, default_value_t = 0)]
    rand_it: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated variables to analyse (default: every predictor).
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
    /// Also write one SVG per variable under <out>/plots.
    #[arg(long)]
    plots: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let cfg = AnalysisConfig {
        data: args.data,
        outcome: args.outcome,
        model: args.model,
        boot: match args.boot {
            Boot::None => BootMode::None,
            Boot::Data => BootMode::DataOnly,
            Boot::Model => BootMode::Model,
        },
        n_it: args.n_it,
        ci_level: args.ci_level,
        rand_it: args.rand_it,
        seed: args.seed,
        out_dir: args.out,
        variables: args.vars,
        plots: args.plots,
    };
    match run_analysis(&cfg) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
