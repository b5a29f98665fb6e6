//! Recovery after the arms are swapped half way through an XOR stream.
//!
//!     cargo run --release --example drift_recovery

use neuralbandit::evaluation::run_once;
use neuralbandit::{DriftSchedule, NeuralBandit1, OracleSpec, PolicyConfig, XorStream};

fn main() -> neuralbandit::Result<()> {
    let period = 50_000;
    let mut policy = NeuralBandit1::new(
        PolicyConfig::new(2, 3, 5)
            .with_gamma(0.05)
            .with_lambda(0.1)
            .with_seed(0),
    )?;
    let mut stream = XorStream::new(100, 0).with_drift(DriftSchedule::new(period)?);
    let record = run_once(
        "nb1",
        &mut policy,
        &mut stream,
        &OracleSpec::Perfect,
        2 * period,
        0,
    )?;

    let rate = |end: usize, window: usize| {
        record.rewards[end - window..end].iter().sum::<f64>() / window as f64
    };
    println!("{:>8}  {:>10}  {:>10}", "round", "last 5000", "last 1000");
    for end in [
        45_000, 50_000, 50_500, 51_000, 52_000, 55_000, 60_000, 70_000, 80_000, 100_000,
    ] {
        println!(
            "{end:>8}  {:>10.3}  {:>10.3}",
            rate(end, 5_000),
            rate(end, 1_000)
        );
    }
    Ok(())
}
