//! A full experiment from a TOML string: averaged regret curves for several
//! policies, written as CSV plus a JSON manifest.
//!
//!     cargo run --release --example regret_benchmark -- [output-dir]

use neuralbandit::config::ExperimentConfig;
use neuralbandit::evaluation::Experiment;

const CONFIG: &str = r#"
name = "linear-benchmark"
seed = 3
runs = 4
horizon = 30000
record_every = 3000
gamma = 0.05

[stream]
kind = "linear"
input_bits = 12
arms = 4

[[policies]]
kind = "random"

[[policies]]
kind = "banditron"

[[policies]]
kind = "neural_bandit1"
hidden = 10
lambda = 0.1

[[policies]]
kind = "neural_bandit2"
hidden = [5, 10]
lambdas = [0.1, 1.0]
"#;

fn main() -> neuralbandit::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "results".into());
    let experiment = Experiment::prepare(ExperimentConfig::from_toml(CONFIG)?)?;
    let result = experiment.run(4)?;
    println!(
        "{:<16} {:>12} {:>12} {:>10}",
        "policy", "regret", "std", "rate"
    );
    for c in &result.curves {
        println!(
            "{:<16} {:>12.1} {:>12.1} {:>10.3}",
            c.policy,
            c.final_regret(),
            c.std_regret.last().copied().unwrap_or(0.0),
            c.final_rate()
        );
    }
    let (csv, manifest) = result.write(out.as_ref())?;
    println!("wrote {} and {}", csv.display(), manifest.display());
    Ok(())
}
