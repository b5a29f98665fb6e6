//! The importance-weighted update is unbiased: averaged over the arm that
//! gets played, it equals the update a learner would make if it saw every
//! arm's reward.
//!
//!     cargo run --release --example unbiased_update

use neuralbandit::mlp::{backward, forward};
use neuralbandit::{Context, NeuralBandit1, Policy, PolicyConfig};

fn main() -> neuralbandit::Result<()> {
    let (k, lambda) = (3, 0.5);
    let config = PolicyConfig::new(k, 4, 3)
        .with_gamma(0.3)
        .with_lambda(lambda)
        .with_seed(3);
    let base = NeuralBandit1::new(config.clone())?;
    let x = Context::new(vec![1.0, 0.0, 1.0, 1.0])?;
    let rewards = [0.0, 1.0, 0.0];
    println!("play probabilities {:?}", base.distribution(&x)?.probs());

    let samples = 100_000;
    let width = base.networks()[0].values().len();
    let mut mean = vec![vec![0.0; width]; k];
    for i in 0..samples {
        let mut p =
            NeuralBandit1::with_networks(config.clone().with_seed(i), base.networks().to_vec())?;
        let d = p.decide(&x)?;
        p.learn(&x, &d, rewards[d.played_arm])?;
        for (arm, acc) in mean.iter_mut().enumerate() {
            let new = p.networks()[arm].values();
            let old = base.networks()[arm].values();
            for (m, (a, b)) in acc.iter_mut().zip(new.iter().zip(old)) {
                *m += (a - b) / samples as f64;
            }
        }
    }

    for arm in 0..k {
        let w = &base.networks()[arm];
        let g = backward(w, &forward(w, &x)?, &x, rewards[arm])?;
        let full: Vec<f64> = g.values().iter().map(|v| -lambda * v).collect();
        let worst = full
            .iter()
            .zip(&mean[arm])
            .filter(|(f, _)| f.abs() >= 1e-8)
            .map(|(f, m)| ((m - f) / f).abs())
            .fold(0.0, f64::max);
        println!("arm {arm}: worst relative gap between sampled mean and full update {worst:.4}");
    }
    Ok(())
}
