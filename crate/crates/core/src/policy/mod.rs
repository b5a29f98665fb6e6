//! Contextual bandit policies sharing one decide/learn interface.
//!
//! A round is always `decide(context)` followed by `learn(context, decision,
//! reward)`, where `reward` is the payoff of `decision.played_arm` and nothing
//! else. Policies own their random generators, seeded from their config, so a
//! policy's decisions depend only on its seed and the contexts and rewards it
//! has seen.

mod banditron;
mod neural;
mod random;

pub use banditron::Banditron;
pub use neural::NeuralBandit1;
pub use random::RandomPolicy;

use serde::{Deserialize, Serialize};

use crate::{Context, Error, Result};

/// Hyperparameters of one NeuralBandit1 learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    /// Exploration rate, in `[0, 0.5]`.
    pub gamma: f64,
    /// Learning step, in `(0, 1]`.
    pub lambda: f64,
    pub hidden_units: usize,
    pub seed: u64,
    pub arm_count: usize,
    pub input_dim: usize,
}

impl PolicyConfig {
    pub fn new(arm_count: usize, input_dim: usize, hidden_units: usize) -> Self {
        PolicyConfig {
            gamma: 0.005,
            lambda: 0.1,
            hidden_units,
            seed: 0,
            arm_count,
            input_dim,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_gamma("gamma", self.gamma)?;
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::config(
                "lambda",
                format!("{} is outside (0, 1]", self.lambda),
            ));
        }
        if self.hidden_units == 0 {
            return Err(Error::config("hidden_units", "must be positive"));
        }
        check_arms(self.arm_count)?;
        if self.input_dim == 0 {
            return Err(Error::config("input_dim", "must be positive"));
        }
        Ok(())
    }
}

pub(crate) fn check_gamma(field: &str, gamma: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&gamma) {
        return Err(Error::config(field, format!("{gamma} is outside [0, 0.5]")));
    }
    Ok(())
}

pub(crate) fn check_arms(arm_count: usize) -> Result<()> {
    if arm_count == 0 {
        return Err(Error::config("arm_count", "must be positive"));
    }
    Ok(())
}

pub(crate) fn check_reward(reward: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&reward) {
        return Err(Error::invalid(format!("reward {reward} outside [0, 1]")));
    }
    Ok(())
}

/// Probability of playing each arm this round.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmDistribution {
    probs: Vec<f64>,
}

impl ArmDistribution {
    /// `(1 - gamma) * [k == greedy] + gamma / K`.
    pub fn exploration(greedy: usize, arm_count: usize, gamma: f64) -> Self {
        let floor = gamma / arm_count as f64;
        let mut probs = vec![floor; arm_count];
        probs[greedy] += 1.0 - gamma;
        ArmDistribution { probs }
    }

    pub fn uniform(arm_count: usize) -> Self {
        ArmDistribution {
            probs: vec![1.0 / arm_count as f64; arm_count],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, arm: usize) -> f64 {
        self.probs[arm]
    }
}

/// Which committee member(s) produced a decision.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ModelChoice {
    /// Not a committee decision.
    #[default]
    None,
    /// One model chose the whole action (NeuralBandit2).
    Single(usize),
    /// `models[k]` scored arm `k` (NeuralBandit3).
    PerArm(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub greedy_arm: usize,
    pub played_arm: usize,
    pub distribution: ArmDistribution,
    pub scores: Vec<f64>,
    pub models: ModelChoice,
}

impl Decision {
    /// Probability with which the played arm was drawn.
    pub fn played_prob(&self) -> f64 {
        self.distribution.prob(self.played_arm)
    }
}

/// Index of the largest score; the lowest index wins ties.
pub fn greedy_arm(scores: &[f64]) -> usize {
    let mut best = 0;
    for (k, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = k;
        }
    }
    best
}

pub trait Policy: Send {
    fn arm_count(&self) -> usize;

    fn input_dim(&self) -> usize;

    fn decide(&mut self, x: &Context) -> Result<Decision>;

    /// Learns from the reward of `decision.played_arm`.
    fn learn(&mut self, x: &Context, decision: &Decision, reward: f64) -> Result<()>;
}

impl<P: Policy + ?Sized> Policy for Box<P> {
    fn arm_count(&self) -> usize {
        (**self).arm_count()
    }

    fn input_dim(&self) -> usize {
        (**self).input_dim()
    }

    fn decide(&mut self, x: &Context) -> Result<Decision> {
        (**self).decide(x)
    }

    fn learn(&mut self, x: &Context, decision: &Decision, reward: f64) -> Result<()> {
        (**self).learn(x, decision, reward)
    }
}

pub(crate) fn check_context(expected: usize, x: &Context) -> Result<()> {
    if x.dim() != expected {
        return Err(Error::invalid(format!(
            "context has dimension {}, policy expects {expected}",
            x.dim()
        )));
    }
    Ok(())
}

pub(crate) fn check_decision(arm_count: usize, decision: &Decision) -> Result<()> {
    if decision.played_arm >= arm_count || decision.distribution.probs().len() != arm_count {
        return Err(Error::invalid("decision does not belong to this policy"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn reference_exploration_values() {
        let d = ArmDistribution::exploration(2, 7, 0.005);
        assert_abs_diff_eq!(d.prob(2), 0.995 + 0.005 / 7.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.prob(2), 0.995_714_285_714_285_7, epsilon = 1e-12);
        assert_abs_diff_eq!(d.prob(0), 0.000_714_285_714_285_714_3, epsilon = 1e-15);
    }

    #[test]
    fn half_exploration_two_arms() {
        let d = ArmDistribution::exploration(0, 2, 0.5);
        assert_eq!(d.probs(), &[0.75, 0.25]);
        let d = ArmDistribution::exploration(1, 5, 0.5);
        for k in [0, 2, 3, 4] {
            assert_abs_diff_eq!(d.prob(k), 0.1, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_exploration_is_point_mass() {
        let d = ArmDistribution::exploration(3, 6, 0.0);
        for k in 0..6 {
            assert_eq!(d.prob(k), if k == 3 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn greedy_breaks_ties_low() {
        assert_eq!(greedy_arm(&[0.0, 0.0, 0.0]), 0);
        assert_eq!(greedy_arm(&[0.1, 0.3, 0.3]), 1);
    }

    #[test]
    fn config_ranges() {
        let base = PolicyConfig::new(3, 4, 2);
        assert!(base.clone().validate().is_ok());
        assert!(base.clone().with_gamma(0.6).validate().is_err());
        assert!(base.clone().with_gamma(-0.1).validate().is_err());
        assert!(base.clone().with_lambda(0.0).validate().is_err());
        assert!(base.clone().with_lambda(1.0).validate().is_ok());
        assert!(base.with_lambda(1.5).validate().is_err());
    }

    proptest! {
        #[test]
        fn exploration_distribution_is_valid(k in 1usize..20, greedy_seed in 0usize..1000, gamma in 0.0f64..=0.5) {
            let greedy = greedy_seed % k;
            let d = ArmDistribution::exploration(greedy, k, gamma);
            let sum: f64 = d.probs().iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-12);
            let floor = gamma / k as f64;
            prop_assert!(d.probs().iter().all(|p| *p >= floor));
            prop_assert!((d.prob(greedy) - (1.0 - gamma + floor)).abs() <= 1e-15);
        }

        #[test]
        fn greedy_invariant_under_shift(scores in prop::collection::vec(0.0f64..1.0, 1..10), c in -10.0f64..10.0) {
            let shifted: Vec<f64> = scores.iter().map(|s| s + c).collect();
            // Shifting can merge near-ties through rounding; only compare when the gap survives.
            let g = greedy_arm(&scores);
            let gs = greedy_arm(&shifted);
            if g != gs {
                prop_assert!((scores[g] - scores[gs]).abs() < 1e-12);
            }
        }
    }
}
