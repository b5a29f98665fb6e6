//! NeuralBandit1 against the linear Banditron on the XOR stream.
//!
//! No linear scorer gets more than 3 of the 4 XOR patterns right, so the
//! Banditron cannot pass 75%. A 5-unit network learns the rule and plays the
//! right arm on all but the exploration rounds.
//!
//!     cargo run --release --example xor_nonlinearity

use neuralbandit::evaluation::run_once;
use neuralbandit::{Banditron, NeuralBandit1, OracleSpec, PolicyConfig, XorStream};

fn main() -> neuralbandit::Result<()> {
    let horizon = 100_000;
    let gamma = 0.05;

    let mut nb1 = NeuralBandit1::new(
        PolicyConfig::new(2, 3, 5)
            .with_gamma(gamma)
            .with_lambda(0.1)
            .with_seed(0),
    )?;
    let neural = run_once(
        "nb1",
        &mut nb1,
        &mut XorStream::new(7, 0),
        &OracleSpec::Perfect,
        horizon,
        0,
    )?;

    let mut banditron = Banditron::new(2, 3, gamma, 0)?;
    let linear = run_once(
        "banditron",
        &mut banditron,
        &mut XorStream::new(7, 0),
        &OracleSpec::Perfect,
        horizon,
        0,
    )?;

    println!(
        "{:>8}  {:>14}  {:>14}",
        "round", "NeuralBandit1", "Banditron"
    );
    for t in (10_000..=horizon as usize).step_by(10_000) {
        let rate =
            |r: &neuralbandit::RunRecord| r.rewards[t - 10_000..t].iter().sum::<f64>() / 10_000.0;
        println!("{t:>8}  {:>14.3}  {:>14.3}", rate(&neural), rate(&linear));
    }
    println!(
        "exploitation ceiling 1 - gamma/2 = {:.3}; linear ceiling 0.750",
        1.0 - gamma / 2.0
    );
    Ok(())
}
