use super::{Exp3, ModelGrid};
use crate::mlp::{self, NetworkShape, NetworkWeights};
use crate::policy::{
    check_context, check_decision, check_gamma, check_reward, greedy_arm, ArmDistribution,
    Decision, ModelChoice, Policy,
};
use crate::seeding::{self, SeededRng};
use crate::{Context, Error, Result};

/// A committee with one EXP3 per arm.
///
/// Every model keeps one network per arm. Each round, arm `k`'s EXP3 picks
/// which model's network scores `k`; the greedy arm over those scores gets
/// the usual gamma-smoothed play distribution. After the play, all models'
/// networks for the played arm learn (importance-weighted by the arm's play
/// probability, each with its own lambda) and only the played arm's EXP3 is
/// credited, since no other arm's reward was observed.
#[derive(Debug, Clone)]
pub struct NeuralBandit3 {
    gamma: f64,
    lambdas: Vec<f64>,
    /// `networks[m][k]`: model `m`'s network for arm `k`.
    networks: Vec<Vec<NetworkWeights>>,
    bank: Vec<Exp3>,
    action_rng: SeededRng,
    model_rng: SeededRng,
    round: u64,
}

impl NeuralBandit3 {
    /// Action-level exploration is `gamma`; the per-model gammas in `models`
    /// are ignored. Model `m`'s networks are initialized exactly as a
    /// [`NeuralBandit1`](crate::NeuralBandit1) with `models.specs()[m]`.
    pub fn new(models: ModelGrid, gamma: f64, gamma_model: f64) -> Result<Self> {
        check_gamma("gamma", gamma)?;
        check_gamma("gamma_model", gamma_model)?;
        let arms = models.arm_count();
        let networks = models
            .specs()
            .iter()
            .map(|spec| {
                let shape = NetworkShape::new(spec.input_dim, spec.hidden_units)?;
                Ok((0..arms)
                    .map(|k| mlp::init_weights_seeded(shape, spec.seed, seeding::weights_stream(k)))
                    .collect())
            })
            .collect::<Result<Vec<Vec<_>>>>()?;
        let bank = (0..arms)
            .map(|_| Exp3::new(models.len(), gamma_model))
            .collect::<Result<Vec<_>>>()?;
        let base = models.base_seed();
        Ok(NeuralBandit3 {
            gamma,
            lambdas: models.specs().iter().map(|s| s.lambda).collect(),
            networks,
            bank,
            action_rng: seeding::rng(base, seeding::ACTION_STREAM),
            model_rng: seeding::rng(base, seeding::MODEL_STREAM),
            round: 0,
        })
    }

    pub fn model_count(&self) -> usize {
        self.networks.len()
    }

    /// EXP3 state of every arm.
    pub fn bank(&self) -> &[Exp3] {
        &self.bank
    }

    pub fn networks(&self, model: usize) -> &[NetworkWeights] {
        &self.networks[model]
    }

    pub fn round(&self) -> u64 {
        self.round
    }
}

impl Policy for NeuralBandit3 {
    fn arm_count(&self) -> usize {
        self.bank.len()
    }

    fn input_dim(&self) -> usize {
        self.networks[0][0].shape().input_dim()
    }

    fn decide(&mut self, x: &Context) -> Result<Decision> {
        check_context(self.input_dim(), x)?;
        let arms = self.arm_count();
        let mut models = Vec::with_capacity(arms);
        let mut scores = Vec::with_capacity(arms);
        for k in 0..arms {
            let (m, _) = self.bank[k].sample(&mut self.model_rng);
            models.push(m);
            scores.push(mlp::forward_unchecked(&self.networks[m][k], x).output);
        }
        let greedy = greedy_arm(&scores);
        let distribution = ArmDistribution::exploration(greedy, arms, self.gamma);
        let played = seeding::sample_index(&mut self.action_rng, distribution.probs());
        Ok(Decision {
            greedy_arm: greedy,
            played_arm: played,
            distribution,
            scores,
            models: ModelChoice::PerArm(models),
        })
    }

    fn learn(&mut self, x: &Context, decision: &Decision, reward: f64) -> Result<()> {
        check_context(self.input_dim(), x)?;
        check_reward(reward)?;
        check_decision(self.arm_count(), decision)?;
        let arm = decision.played_arm;
        let credited = match &decision.models {
            ModelChoice::PerArm(ms)
                if ms.len() == self.arm_count() && ms[arm] < self.model_count() =>
            {
                ms[arm]
            }
            _ => return Err(Error::invalid("decision was not made by this committee")),
        };
        let prob = decision.played_prob();
        if prob > 0.0 {
            for (nets, &lambda) in self.networks.iter_mut().zip(&self.lambdas) {
                let net = &mut nets[arm];
                let trace = mlp::forward_unchecked(net, x);
                net.descend(x, &trace, reward, lambda / prob);
            }
        }
        let exp3 = &mut self.bank[arm];
        let probs = exp3.probabilities();
        exp3.update(credited, reward, &probs)?;
        self.round += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlp::{apply_update, backward, forward};
    use crate::policy::{NeuralBandit1, PolicyConfig};
    use approx::assert_abs_diff_eq;

    fn ctx(t: usize) -> Context {
        Context::from_active(3, &[t % 3, 2]).unwrap()
    }

    #[test]
    fn single_model_matches_neural_bandit1() {
        let g = ModelGrid::cartesian(&[4], &[0.3], 0.1, 12, 4, 3).unwrap();
        let mut bank = NeuralBandit3::new(g.clone(), 0.1, 0.1).unwrap();
        let mut solo = NeuralBandit1::new(g.specs()[0].clone()).unwrap();
        for t in 0..500 {
            let x = ctx(t);
            let a = bank.decide(&x).unwrap();
            let b = solo.decide(&x).unwrap();
            assert_eq!(
                (a.played_arm, a.greedy_arm, &a.scores),
                (b.played_arm, b.greedy_arm, &b.scores)
            );
            let r = if a.played_arm == t % 4 { 1.0 } else { 0.0 };
            bank.learn(&x, &a, r).unwrap();
            solo.learn(&x, &b, r).unwrap();
        }
    }

    #[test]
    fn bank_starts_uniform() {
        let g = ModelGrid::cartesian(&[1, 2], &[0.1, 1.0], 0.1, 0, 7, 3).unwrap();
        let c = NeuralBandit3::new(g, 0.005, 0.1).unwrap();
        assert_eq!(c.bank().len(), 7);
        for e in c.bank() {
            assert!(e.probabilities().iter().all(|p| (p - 0.25).abs() < 1e-15));
        }
    }

    #[test]
    fn reference_parameters_give_exploration_form() {
        let g = ModelGrid::cartesian(&[2], &[0.1], 0.005, 0, 7, 3).unwrap();
        let mut c = NeuralBandit3::new(g, 0.005, 0.1).unwrap();
        let d = c.decide(&ctx(0)).unwrap();
        assert_eq!(
            d.distribution,
            ArmDistribution::exploration(d.greedy_arm, 7, 0.005)
        );
    }

    #[test]
    fn zero_reward_leaves_every_exp3() {
        let g = ModelGrid::cartesian(&[1, 2], &[0.1], 0.1, 0, 3, 3).unwrap();
        let mut c = NeuralBandit3::new(g, 0.1, 0.1).unwrap();
        let before = c.bank().to_vec();
        let x = ctx(1);
        let d = c.decide(&x).unwrap();
        c.learn(&x, &d, 0.0).unwrap();
        assert_eq!(c.bank(), &before[..]);
    }

    #[test]
    fn only_played_arm_credited_model_changes() {
        let g = ModelGrid::cartesian(&[1, 2, 3], &[0.1], 0.1, 0, 3, 3).unwrap();
        let mut c = NeuralBandit3::new(g, 0.1, 0.1).unwrap();
        let x = ctx(2);
        let d = c.decide(&x).unwrap();
        let ModelChoice::PerArm(ms) = d.models.clone() else {
            panic!()
        };
        c.learn(&x, &d, 1.0).unwrap();
        for (k, e) in c.bank().iter().enumerate() {
            for (m, w) in e.weights().iter().enumerate() {
                let changed = k == d.played_arm && m == ms[k];
                assert_eq!(*w != 1.0, changed, "arm {k} model {m}");
            }
        }
    }

    #[test]
    fn hand_computed_round() {
        // K = 2 arms, M = 2 models (hidden 1 with lambda 0.5, hidden 2 with lambda 1).
        let g = ModelGrid::from_specs(
            3,
            vec![
                PolicyConfig::new(2, 3, 1)
                    .with_gamma(0.2)
                    .with_lambda(0.5)
                    .with_seed(3),
                PolicyConfig::new(2, 3, 2)
                    .with_gamma(0.2)
                    .with_lambda(1.0)
                    .with_seed(4),
            ],
        )
        .unwrap();
        let mut c = NeuralBandit3::new(g, 0.2, 0.3).unwrap();
        let x = Context::new(vec![1.0, 0.0, 1.0]).unwrap();
        let before: Vec<Vec<NetworkWeights>> = (0..2).map(|m| c.networks(m).to_vec()).collect();
        let d = c.decide(&x).unwrap();
        let ModelChoice::PerArm(ms) = d.models.clone() else {
            panic!()
        };

        // Scores come from the sampled model for each arm.
        for k in 0..2 {
            assert_eq!(d.scores[k], forward(&before[ms[k]][k], &x).unwrap().output);
        }
        let greedy = if d.scores[1] > d.scores[0] { 1 } else { 0 };
        assert_eq!(d.greedy_arm, greedy);
        let p_played = if d.played_arm == greedy { 0.9 } else { 0.1 };
        assert_abs_diff_eq!(d.played_prob(), p_played, epsilon = 1e-15);

        c.learn(&x, &d, 1.0).unwrap();
        let a = d.played_arm;
        for (m, lambda) in [(0usize, 0.5), (1, 1.0)] {
            let w = &before[m][a];
            let g = backward(w, &forward(w, &x).unwrap(), &x, 1.0).unwrap();
            let expected = apply_update(w, &g, -lambda / p_played).unwrap();
            assert_eq!(c.networks(m)[a], expected);
            assert_eq!(c.networks(m)[1 - a], before[m][1 - a]);
        }
        // Played arm's EXP3: uniform P = 0.5, w = exp(0.3 / (0.5 * 2)).
        let e = &c.bank()[a];
        assert_abs_diff_eq!(e.weights()[ms[a]], 0.3f64.exp(), epsilon = 1e-12);
        assert_eq!(e.weights()[1 - ms[a]], 1.0);
        assert_eq!(c.bank()[1 - a].weights(), &[1.0, 1.0]);
    }
}
