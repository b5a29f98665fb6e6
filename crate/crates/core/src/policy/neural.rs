use super::{
    check_context, check_decision, check_reward, greedy_arm, ArmDistribution, Decision,
    ModelChoice, Policy, PolicyConfig,
};
use crate::mlp::{self, NetworkShape, NetworkWeights};
use crate::seeding::{self, SeededRng};
use crate::{Context, Error, Result};

/// One sigmoid network per arm, trained online with importance-weighted
/// backpropagation.
///
/// Each round the greedy arm is the one whose network predicts the highest
/// reward. The played arm is drawn from `(1 - gamma) * [k == greedy] + gamma / K`
/// and only its network learns, with step `lambda / P(played)`. Dividing by
/// the play probability makes the expected update over the draw equal to the
/// update every network would get under full information.
#[derive(Debug, Clone)]
pub struct NeuralBandit1 {
    config: PolicyConfig,
    networks: Vec<NetworkWeights>,
    rng: SeededRng,
    round: u64,
}

impl NeuralBandit1 {
    pub fn new(config: PolicyConfig) -> Result<Self> {
        config.validate()?;
        let shape = NetworkShape::new(config.input_dim, config.hidden_units)?;
        let networks = (0..config.arm_count)
            .map(|k| mlp::init_weights_seeded(shape, config.seed, seeding::weights_stream(k)))
            .collect();
        Ok(NeuralBandit1 {
            rng: seeding::rng(config.seed, seeding::ACTION_STREAM),
            config,
            networks,
            round: 0,
        })
    }

    /// Replaces the initial networks, e.g. with hand-set weights.
    pub fn with_networks(config: PolicyConfig, networks: Vec<NetworkWeights>) -> Result<Self> {
        let mut policy = NeuralBandit1::new(config)?;
        if networks.len() != policy.config.arm_count {
            return Err(Error::invalid(format!(
                "expected {} networks, got {}",
                policy.config.arm_count,
                networks.len()
            )));
        }
        let shape = policy.networks[0].shape();
        if networks.iter().any(|n| n.shape() != shape) {
            return Err(Error::invalid(
                "all networks must have the configured shape",
            ));
        }
        policy.networks = networks;
        Ok(policy)
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    pub fn networks(&self) -> &[NetworkWeights] {
        &self.networks
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    /// Predicted reward of every arm.
    pub fn scores(&self, x: &Context) -> Result<Vec<f64>> {
        check_context(self.config.input_dim, x)?;
        Ok(self
            .networks
            .iter()
            .map(|n| mlp::forward_unchecked(n, x).output)
            .collect())
    }

    /// Exploration distribution this learner would use on `x`, without drawing.
    pub fn distribution(&self, x: &Context) -> Result<ArmDistribution> {
        let scores = self.scores(x)?;
        Ok(ArmDistribution::exploration(
            greedy_arm(&scores),
            self.config.arm_count,
            self.config.gamma,
        ))
    }

    /// Importance-weighted update of `arm`'s network, which was played with
    /// probability `prob` and paid `reward`.
    ///
    /// A zero `prob` means this learner could not have played the arm
    /// (possible only with `gamma == 0`); the update is skipped because its
    /// importance weight is undefined.
    pub(crate) fn learn_played(&mut self, x: &Context, arm: usize, prob: f64, reward: f64) {
        if prob > 0.0 {
            let net = &mut self.networks[arm];
            let trace = mlp::forward_unchecked(net, x);
            net.descend(x, &trace, reward, self.config.lambda / prob);
        }
        self.round += 1;
    }
}

impl Policy for NeuralBandit1 {
    fn arm_count(&self) -> usize {
        self.config.arm_count
    }

    fn input_dim(&self) -> usize {
        self.config.input_dim
    }

    fn decide(&mut self, x: &Context) -> Result<Decision> {
        let scores = self.scores(x)?;
        let greedy = greedy_arm(&scores);
        let distribution =
            ArmDistribution::exploration(greedy, self.config.arm_count, self.config.gamma);
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
        check_context(self.config.input_dim, x)?;
        check_reward(reward)?;
        check_decision(self.config.arm_count, decision)?;
        self.learn_played(x, decision.played_arm, decision.played_prob(), reward);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlp::{apply_update, backward, forward};

    fn config() -> PolicyConfig {
        PolicyConfig::new(3, 4, 2)
            .with_gamma(0.3)
            .with_lambda(0.5)
            .with_seed(17)
    }

    fn ctx() -> Context {
        Context::new(vec![1.0, 0.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn decision_follows_greedy_and_distribution() {
        let mut p = NeuralBandit1::new(config()).unwrap();
        let x = ctx();
        let scores = p.scores(&x).unwrap();
        let d = p.decide(&x).unwrap();
        assert_eq!(d.scores, scores);
        assert_eq!(d.greedy_arm, greedy_arm(&scores));
        assert_eq!(
            d.distribution,
            ArmDistribution::exploration(d.greedy_arm, 3, 0.3)
        );
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let mut p = NeuralBandit1::new(config()).unwrap();
        let bad = Context::new(vec![1.0]).unwrap();
        assert!(matches!(p.decide(&bad), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn reward_out_of_range_is_rejected() {
        let mut p = NeuralBandit1::new(config()).unwrap();
        let x = ctx();
        let d = p.decide(&x).unwrap();
        assert!(p.learn(&x, &d, 1.2).is_err());
        assert!(p.learn(&x, &d, -0.5).is_err());
    }

    #[test]
    fn zero_loss_leaves_networks_unchanged() {
        let mut p = NeuralBandit1::new(config()).unwrap();
        let x = ctx();
        let d = p.decide(&x).unwrap();
        let before = p.networks().to_vec();
        let reward = d.scores[d.played_arm];
        p.learn(&x, &d, reward).unwrap();
        assert_eq!(p.networks(), &before[..]);
        assert_eq!(p.round(), 1);
    }

    #[test]
    fn only_played_arm_learns_with_importance_step() {
        let mut p = NeuralBandit1::new(config()).unwrap();
        let x = ctx();
        let d = p.decide(&x).unwrap();
        let before = p.networks().to_vec();
        p.learn(&x, &d, 1.0).unwrap();
        for (k, w) in before.iter().enumerate() {
            if k == d.played_arm {
                let g = backward(w, &forward(w, &x).unwrap(), &x, 1.0).unwrap();
                let expected = apply_update(w, &g, -0.5 / d.played_prob()).unwrap();
                assert_eq!(p.networks()[k], expected);
            } else {
                assert_eq!(&p.networks()[k], w);
            }
        }
    }

    #[test]
    fn no_exploration_gives_plain_backprop_step() {
        let cfg = config().with_gamma(0.0);
        let mut p = NeuralBandit1::new(cfg).unwrap();
        let x = ctx();
        let d = p.decide(&x).unwrap();
        assert_eq!(d.played_arm, d.greedy_arm);
        assert_eq!(d.played_prob(), 1.0);
        let w = p.networks()[d.played_arm].clone();
        p.learn(&x, &d, 0.0).unwrap();
        let g = backward(&w, &forward(&w, &x).unwrap(), &x, 0.0).unwrap();
        assert_eq!(
            p.networks()[d.played_arm],
            apply_update(&w, &g, -0.5).unwrap()
        );
    }

    #[test]
    fn identical_seeds_reproduce_decisions() {
        let run = || {
            let mut p = NeuralBandit1::new(config()).unwrap();
            let x = ctx();
            (0..200)
                .map(|t| {
                    let d = p.decide(&x).unwrap();
                    let r = if (t + d.played_arm).is_multiple_of(3) {
                        1.0
                    } else {
                        0.0
                    };
                    p.learn(&x, &d, r).unwrap();
                    d.played_arm
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
