use super::{
    check_arms, check_context, check_decision, check_gamma, check_reward, greedy_arm,
    ArmDistribution, Decision, ModelChoice, Policy,
};
use crate::seeding::{self, SeededRng};
use crate::{Context, Error, Result};

/// Linear baseline: one perceptron per arm.
///
/// Scores are `w_k . x`, the played arm is drawn with the same gamma-smoothed
/// greedy distribution as [`NeuralBandit1`](super::NeuralBandit1), and the
/// played arm's perceptron takes the importance-weighted step
/// `w += (reward - predicted) * x / P(played)` where `predicted` is 1 when the
/// score is non-negative and 0 otherwise.
#[derive(Debug, Clone)]
pub struct Banditron {
    gamma: f64,
    input_dim: usize,
    weights: Vec<Vec<f64>>,
    rng: SeededRng,
}

impl Banditron {
    pub fn new(arm_count: usize, input_dim: usize, gamma: f64, seed: u64) -> Result<Self> {
        check_gamma("gamma", gamma)?;
        check_arms(arm_count)?;
        if input_dim == 0 {
            return Err(Error::config("input_dim", "must be positive"));
        }
        Ok(Banditron {
            gamma,
            input_dim,
            weights: vec![vec![0.0; input_dim]; arm_count],
            rng: seeding::rng(seed, seeding::ACTION_STREAM),
        })
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn set_weights(&mut self, weights: Vec<Vec<f64>>) -> Result<()> {
        if weights.len() != self.weights.len() || weights.iter().any(|w| w.len() != self.input_dim)
        {
            return Err(Error::invalid("weight matrix has the wrong shape"));
        }
        self.weights = weights;
        Ok(())
    }

    fn score(w: &[f64], x: &Context) -> f64 {
        let xs = x.as_slice();
        x.nonzero().iter().map(|&i| w[i] * xs[i]).sum()
    }
}

impl Policy for Banditron {
    fn arm_count(&self) -> usize {
        self.weights.len()
    }

    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn decide(&mut self, x: &Context) -> Result<Decision> {
        check_context(self.input_dim, x)?;
        let scores: Vec<f64> = self.weights.iter().map(|w| Self::score(w, x)).collect();
        let greedy = greedy_arm(&scores);
        let distribution = ArmDistribution::exploration(greedy, scores.len(), self.gamma);
        let played = seeding::sample_index(&mut self.rng, distribution.probs());
        Ok(Decision {
            greedy_arm: greedy,
            played_arm: played,
            distribution,
            scores,
            models: ModelChoice::None,
        })
    }

    fn learn(&mut self, x: &Context, decision: &Decision, reward: f64) -> Result<()> {
        check_context(self.input_dim, x)?;
        check_reward(reward)?;
        check_decision(self.weights.len(), decision)?;
        let arm = decision.played_arm;
        let prob = decision.played_prob();
        if prob <= 0.0 {
            return Ok(());
        }
        let predicted = if decision.scores[arm] >= 0.0 {
            1.0
        } else {
            0.0
        };
        let error = reward - predicted;
        if error == 0.0 {
            return Ok(());
        }
        let step = error / prob;
        let xs = x.as_slice();
        let w = &mut self.weights[arm];
        for &i in x.nonzero() {
            w[i] += step * xs[i];
        }
        Ok(())
    }
}
