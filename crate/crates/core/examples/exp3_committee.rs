//! Model selection with EXP3: NeuralBandit2 picks one network per round,
//! NeuralBandit3 picks one per arm.
//!
//!     cargo run --release --example exp3_committee

use neuralbandit::datastream::EventSource;
use neuralbandit::{ModelGrid, NeuralBandit2, NeuralBandit3, Policy, XorStream};

fn main() -> neuralbandit::Result<()> {
    let gamma = 0.05;
    // A 1-unit network cannot represent XOR; the 5-unit ones can.
    let grid = ModelGrid::cartesian(&[1, 5], &[0.01, 0.1, 1.0], gamma, 42, 2, 3)?;
    let mut nb2 = NeuralBandit2::new(grid.clone(), 0.1)?;
    let mut nb3 = NeuralBandit3::new(grid.clone(), gamma, 0.1)?;

    let mut stream = XorStream::new(3, 0);
    let mut hits = [0u32; 2];
    let horizon = 60_000;
    for t in 0..horizon {
        let (x, rewards) = stream.next_event().into_parts();
        for (i, policy) in [&mut nb2 as &mut dyn Policy, &mut nb3]
            .into_iter()
            .enumerate()
        {
            let d = policy.decide(&x)?;
            let r = rewards.reveal(d.played_arm);
            if t >= horizon - 10_000 {
                hits[i] += r as u32;
            }
            policy.learn(&x, &d, r)?;
        }
    }

    println!("model  hidden  lambda  NB2 prob  NB3 prob (arm 0, arm 1)");
    let p2 = nb2.exp3().probabilities();
    let p3: Vec<Vec<f64>> = nb3.bank().iter().map(|e| e.probabilities()).collect();
    for (m, spec) in grid.specs().iter().enumerate() {
        println!(
            "{m:>5}  {:>6}  {:>6}  {:>8.3}  {:>8.3} {:>8.3}",
            spec.hidden_units, spec.lambda, p2[m], p3[0][m], p3[1][m]
        );
    }
    println!(
        "last 10000 rounds: NB2 {:.3}, NB3 {:.3}",
        f64::from(hits[0]) / 1e4,
        f64::from(hits[1]) / 1e4
    );
    Ok(())
}
