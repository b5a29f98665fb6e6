//! Fast invariant suite behind `neuralbandit selftest`.

use rand::Rng;

use crate::committee::{Exp3, ModelGrid, NeuralBandit2, NeuralBandit3};
use crate::datastream::{EventSource, XorStream};
use crate::evaluation::{run_once, OracleSpec};
use crate::mlp::{backward, forward, loss, NetworkShape, NetworkWeights};
use crate::policy::{Banditron, NeuralBandit1, Policy, PolicyConfig};
use crate::seeding;
use crate::{Context, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct SelfTestOptions {
    /// Flips the sign of every analytic gradient before it is checked, to
    /// confirm the suite can fail.
    pub corrupt_gradient_sign: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(SelfTestOptions) -> Result<String, String>;

pub fn run(options: SelfTestOptions) -> Vec<CheckOutcome> {
    let checks: [(&'static str, Check); 5] = [
        ("gradient check", gradient_check),
        ("unbiased update", unbiased_update),
        ("exp3 distribution", exp3_distribution),
        ("degenerate committee", degenerate_committee),
        ("xor separation", xor_separation),
    ];
    checks
        .iter()
        .map(|(name, check)| {
            let (passed, detail) = match check(options) {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckOutcome {
                name,
                passed,
                detail,
            }
        })
        .collect()
}

fn fail(e: crate::Error) -> String {
    e.to_string()
}

fn random_binary_context<R: Rng>(rng: &mut R, d: usize) -> Context {
    let v: Vec<f64> = (0..d)
        .map(|_| f64::from(u8::from(rng.random::<bool>())))
        .collect();
    Context::new(v).expect("binary")
}

fn gradient_check(options: SelfTestOptions) -> Result<String, String> {
    let mut rng = seeding::rng(1, seeding::SYNTHETIC_STREAM);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for _ in 0..25 {
        let d = rng.random_range(1..=5);
        let c = rng.random_range(1..=3);
        let shape = NetworkShape::new(d, c).map_err(fail)?;
        let values: Vec<f64> = (0..shape.connection_count())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let w = NetworkWeights::from_values(shape, values.clone()).map_err(fail)?;
        let x = random_binary_context(&mut rng, d);
        let target = f64::from(u8::from(rng.random::<bool>()));
        let trace = forward(&w, &x).map_err(fail)?;
        let g = backward(&w, &trace, &x, target).map_err(fail)?;
        let sign = if options.corrupt_gradient_sign {
            -1.0
        } else {
            1.0
        };
        for (i, &analytic) in g.values().iter().enumerate() {
            let bump = |delta: f64| -> Result<f64, String> {
                let mut v = values.clone();
                v[i] += delta;
                let w = NetworkWeights::from_values(shape, v).map_err(fail)?;
                loss(&w, &x, target).map_err(fail)
            };
            let numeric = (bump(h)? - bump(-h)?) / (2.0 * h);
            let err = (sign * analytic - numeric).abs();
            let scale = numeric.abs().max(1e-3);
            worst = worst.max(err / scale);
            if err > 1e-6 * scale {
                return Err(format!(
                    "component {i}: analytic {} vs finite difference {numeric}",
                    sign * analytic
                ));
            }
        }
    }
    Ok(format!("25 networks, worst relative error {worst:.1e}"))
}

/// The mean applied update over sampled plays must match the full-information
/// update. Reduced sample count; tolerance is five standard errors.
fn unbiased_update(_: SelfTestOptions) -> Result<String, String> {
    let (k, d, c, gamma, lambda) = (3, 4, 3, 0.3, 0.5);
    let config = PolicyConfig::new(k, d, c)
        .with_gamma(gamma)
        .with_lambda(lambda)
        .with_seed(3);
    let base = NeuralBandit1::new(config.clone()).map_err(fail)?;
    let x = Context::new(vec![1.0, 0.0, 1.0, 1.0]).map_err(fail)?;
    let rewards = [0.0, 1.0, 0.0];
    let n = 20_000usize;

    let full: Vec<Vec<f64>> = (0..k)
        .map(|arm| {
            let w = &base.networks()[arm];
            let trace = forward(w, &x).map_err(fail)?;
            let g = backward(w, &trace, &x, rewards[arm]).map_err(fail)?;
            Ok(g.values().iter().map(|v| -lambda * v).collect())
        })
        .collect::<Result<_, String>>()?;

    let m = base.networks()[0].values().len();
    let mut sum = vec![vec![0.0; m]; k];
    let mut sum_sq = vec![vec![0.0; m]; k];
    for i in 0..n {
        let mut p = NeuralBandit1::with_networks(
            config.clone().with_seed(1_000 + i as u64),
            base.networks().to_vec(),
        )
        .map_err(fail)?;
        let decision = p.decide(&x).map_err(fail)?;
        p.learn(&x, &decision, rewards[decision.played_arm])
            .map_err(fail)?;
        for arm in 0..k {
            for (j, (new, old)) in p.networks()[arm]
                .values()
                .iter()
                .zip(base.networks()[arm].values())
                .enumerate()
            {
                let delta = new - old;
                sum[arm][j] += delta;
                sum_sq[arm][j] += delta * delta;
            }
        }
    }
    let nf = n as f64;
    for arm in 0..k {
        for j in 0..m {
            let mean = sum[arm][j] / nf;
            let var = (sum_sq[arm][j] / nf - mean * mean).max(0.0);
            let bound = 5.0 * (var / nf).sqrt() + 1e-12;
            if (mean - full[arm][j]).abs() > bound {
                return Err(format!(
                    "arm {arm} weight {j}: mean update {mean} vs full-information {}",
                    full[arm][j]
                ));
            }
        }
    }
    Ok(format!("{n} sampled plays within 5 standard errors"))
}

fn exp3_distribution(_: SelfTestOptions) -> Result<String, String> {
    let mut rng = seeding::rng(2, seeding::SYNTHETIC_STREAM);
    for _ in 0..200 {
        let m = rng.random_range(1..=15);
        let gamma: f64 = rng.random_range(0.0..0.5);
        let weights: Vec<f64> = (0..m).map(|_| rng.random_range(1e-3..1e3)).collect();
        let e = Exp3::from_weights(weights, gamma).map_err(fail)?;
        let p = e.probabilities();
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(format!("probabilities sum to {total}"));
        }
        let floor = gamma / m as f64;
        if p.iter().any(|v| *v < floor - 1e-15) {
            return Err(format!("probability below the floor {floor}"));
        }
    }
    let mut e = Exp3::new(2, 0.1).map_err(fail)?;
    let p = e.probabilities();
    e.update(0, 1.0, &p).map_err(fail)?;
    if (e.weights()[0] - 0.1f64.exp()).abs() > 1e-12 || e.weights()[1] != 1.0 {
        return Err(format!("hand update gave {:?}", e.weights()));
    }
    let before = e.clone();
    let p = e.probabilities();
    e.update(1, 0.0, &p).map_err(fail)?;
    if e != before {
        return Err("zero reward changed the weights".into());
    }
    Ok("200 random distributions, hand update, zero-reward no-op".into())
}

fn degenerate_committee(_: SelfTestOptions) -> Result<String, String> {
    let (k, d) = (3, 6);
    let config = PolicyConfig::new(k, d, 4)
        .with_gamma(0.1)
        .with_lambda(0.3)
        .with_seed(21);
    let grid = ModelGrid::from_specs(21, vec![config.clone()]).map_err(fail)?;
    let mut nb1 = NeuralBandit1::new(config.clone()).map_err(fail)?;
    let mut nb2 = NeuralBandit2::new(grid.clone(), 0.1).map_err(fail)?;
    let mut nb3 = NeuralBandit3::new(grid, 0.1, 0.1).map_err(fail)?;
    let mut rng = seeding::rng(5, seeding::SYNTHETIC_STREAM);
    let rounds = 1_000;
    for t in 0..rounds {
        let x = random_binary_context(&mut rng, d);
        let correct = rng.random_range(0..k);
        let a = nb1.decide(&x).map_err(fail)?;
        let b = nb2.decide(&x).map_err(fail)?;
        let c = nb3.decide(&x).map_err(fail)?;
        if a.played_arm != b.played_arm
            || a.played_arm != c.played_arm
            || a.scores != b.scores
            || a.scores != c.scores
        {
            return Err(format!("decisions diverged at round {t}"));
        }
        let r = f64::from(u8::from(a.played_arm == correct));
        nb1.learn(&x, &a, r).map_err(fail)?;
        nb2.learn(&x, &b, r).map_err(fail)?;
        nb3.learn(&x, &c, r).map_err(fail)?;
    }
    Ok(format!("{rounds} identical rounds"))
}

fn xor_separation(_: SelfTestOptions) -> Result<String, String> {
    let horizon = 60_000;
    let window = 5_000;
    let mut nb1 = NeuralBandit1::new(
        PolicyConfig::new(2, 3, 5)
            .with_gamma(0.05)
            .with_lambda(0.1)
            .with_seed(0),
    )
    .map_err(fail)?;
    let mut stream = XorStream::new(100, 0);
    let dim = stream.dim();
    let a = run_once(
        "nb1",
        &mut nb1,
        &mut stream,
        &OracleSpec::Perfect,
        horizon,
        0,
    )
    .map_err(fail)?;
    let mut banditron = Banditron::new(2, dim, 0.05, 0).map_err(fail)?;
    let mut stream = XorStream::new(100, 0);
    let b = run_once(
        "banditron",
        &mut banditron,
        &mut stream,
        &OracleSpec::Perfect,
        horizon,
        0,
    )
    .map_err(fail)?;
    let ra = a.classification_rate(window).map_err(fail)?;
    let rb = b.classification_rate(window).map_err(fail)?;
    if ra < 0.9 || rb > 0.8 {
        return Err(format!(
            "NeuralBandit1 {ra:.3} (need >= 0.9), Banditron {rb:.3} (need <= 0.8)"
        ));
    }
    Ok(format!("NeuralBandit1 {ra:.3}, Banditron {rb:.3}"))
}
