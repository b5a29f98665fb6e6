use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use neuralbandit::committee::{ModelGrid, DEFAULT_HIDDEN_SIZES, DEFAULT_LAMBDAS};
use neuralbandit::config::{ExperimentConfig, Overrides};
use neuralbandit::datastream::{
    data_dir, fetch_covertype, COVERTYPE_ARMS, COVERTYPE_URL, DATA_DIR_ENV,
};
use neuralbandit::evaluation::Experiment;
use neuralbandit::selftest::{self, SelfTestOptions};
use neuralbandit::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_MISSING_DATA: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

/// Neural contextual bandits: experiments, dataset fetching and self-checks.
#[derive(Parser)]
#[command(name = "neuralbandit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write `<out>/<name>.csv` and its manifest.
    Run(RunArgs),
    /// Download the covertype file into the data directory.
    FetchData {
        /// Target directory (default: $NEURALBANDIT_DATA_DIR or ./data).
        #[arg(long)]
        dir: Option<PathBuf>,
        #[arg(long, default_value = COVERTYPE_URL)]
        url: String,
    },
    /// List the committee model grid with derived seeds.
    Grid {
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_HIDDEN_SIZES)]
        hidden: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LAMBDAS)]
        lambdas: Vec<f64>,
        #[arg(long, default_value_t = 0.005)]
        gamma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the fast invariant suite.
    Selftest {
        #[arg(long, hide = true)]
        corrupt_gradient_sign: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    gamma_model: Option<f64>,
    /// Drift period in rounds; 0 disables drift.
    #[arg(long)]
    drift_period: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: number of runs).
    #[arg(long)]
    parallel: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::FetchData { dir, url } => {
            let dir = dir.unwrap_or_else(data_dir);
            match fetch_covertype(&dir, &url) {
                Ok(path) => {
                    println!("saved {}", path.display());
                    ExitCode::SUCCESS
                }
                Err(e) => report(e),
            }
        }
        Command::Grid {
            hidden,
            lambdas,
            gamma,
            seed,
        } => cmd_grid(&hidden, &lambdas, gamma, seed),
        Command::Selftest {
            corrupt_gradient_sign,
        } => {
            let outcomes = selftest::run(SelfTestOptions {
                corrupt_gradient_sign,
            });
            let mut ok = true;
            for o in &outcomes {
                let tag = if o.passed { "ok" } else { "FAILED" };
                println!("{tag:>6}  {}: {}", o.name, o.detail);
                ok &= o.passed;
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                for o in outcomes.iter().filter(|o| !o.passed) {
                    eprintln!("selftest failed: {}", o.name);
                }
                ExitCode::from(EXIT_RUNTIME)
            }
        }
    }
}

fn cmd_run(args: RunArgs) -> ExitCode {
    let mut config = match ExperimentConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => return report(e),
    };
    let overrides = Overrides {
        horizon: args.horizon,
        runs: args.runs,
        seed: args.seed,
        gamma: args.gamma,
        gamma_model: args.gamma_model,
        drift_period: args.drift_period,
        output: args.out,
    };
    if let Err(e) = config.apply(&overrides) {
        return report(e);
    }
    for w in config.warnings() {
        eprintln!("warning: {w}");
    }
    let parallel = args.parallel.unwrap_or(config.runs);
    let experiment = match Experiment::prepare(config) {
        Ok(e) => e,
        Err(e) => return report(e),
    };
    let result = match experiment.run(parallel) {
        Ok(r) => r,
        Err(e) => return report(e),
    };
    match result.write(&experiment.config().output) {
        Ok((csv, manifest)) => {
            for c in &result.curves {
                println!(
                    "{:<20} final regret {:>14.1}  trailing rate {:.4}",
                    c.policy,
                    c.final_regret(),
                    c.final_rate()
                );
            }
            println!("wrote {} and {}", csv.display(), manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => report(e),
    }
}

fn cmd_grid(hidden: &[usize], lambdas: &[f64], gamma: f64, seed: u64) -> ExitCode {
    // Dimensions only matter for validation here.
    let grid = match ModelGrid::cartesian(hidden, lambdas, gamma, seed, COVERTYPE_ARMS, 94) {
        Ok(g) => g,
        Err(e) => return report(e),
    };
    println!(
        "{:>5} {:>8} {:>8} {:>20}",
        "index", "hidden", "lambda", "seed"
    );
    for (i, s) in grid.specs().iter().enumerate() {
        println!(
            "{i:>5} {:>8} {:>8} {:>20}",
            s.hidden_units, s.lambda, s.seed
        );
    }
    println!("{} models", grid.len());
    ExitCode::SUCCESS
}

fn report(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    let code = match e {
        Error::Config { .. } | Error::InvalidInput(_) => EXIT_CONFIG,
        Error::Io { ref path, .. } if path.extension().is_some_and(|x| x == "toml") => EXIT_CONFIG,
        Error::MissingData { .. } => {
            eprintln!(
                "hint: run `neuralbandit fetch-data` or point {DATA_DIR_ENV} at a directory holding covtype.data.gz"
            );
            EXIT_MISSING_DATA
        }
        _ => EXIT_RUNTIME,
    };
    ExitCode::from(code)
}
