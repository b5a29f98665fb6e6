use super::{Exp3, ModelGrid};
use crate::policy::{
    check_context, check_decision, check_gamma, check_reward, Decision, ModelChoice, NeuralBandit1,
    Policy,
};
use crate::seeding::{self, SeededRng};
use crate::{Context, Error, Result};

/// A committee of [`NeuralBandit1`] learners, one EXP3 choosing which of them
/// acts each round.
///
/// Every learner trains every round: each one updates its network for the
/// played arm, importance-weighted by the probability that learner itself
/// would have played that arm. EXP3 is credited with the observed reward for
/// the learner that acted.
#[derive(Debug, Clone)]
pub struct NeuralBandit2 {
    exp3: Exp3,
    instances: Vec<NeuralBandit1>,
    rng: SeededRng,
}

impl NeuralBandit2 {
    pub fn new(models: ModelGrid, gamma_model: f64) -> Result<Self> {
        check_gamma("gamma_model", gamma_model)?;
        let instances = models
            .specs()
            .iter()
            .cloned()
            .map(NeuralBandit1::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(NeuralBandit2 {
            exp3: Exp3::new(instances.len(), gamma_model)?,
            instances,
            rng: seeding::rng(models.base_seed(), seeding::MODEL_STREAM),
        })
    }

    pub fn exp3(&self) -> &Exp3 {
        &self.exp3
    }

    pub fn instances(&self) -> &[NeuralBandit1] {
        &self.instances
    }

    /// Overrides the EXP3 state, for example to start from skewed weights.
    pub fn set_exp3(&mut self, exp3: Exp3) -> Result<()> {
        if exp3.arm_count() != self.instances.len() {
            return Err(Error::invalid("EXP3 size does not match the committee"));
        }
        self.exp3 = exp3;
        Ok(())
    }
}

impl Policy for NeuralBandit2 {
    fn arm_count(&self) -> usize {
        self.instances[0].arm_count()
    }

    fn input_dim(&self) -> usize {
        self.instances[0].input_dim()
    }

    fn decide(&mut self, x: &Context) -> Result<Decision> {
        check_context(self.input_dim(), x)?;
        let (model, _) = self.exp3.sample(&mut self.rng);
        let mut decision = self.instances[model].decide(x)?;
        decision.models = ModelChoice::Single(model);
        Ok(decision)
    }

    fn learn(&mut self, x: &Context, decision: &Decision, reward: f64) -> Result<()> {
        check_context(self.input_dim(), x)?;
        check_reward(reward)?;
        check_decision(self.arm_count(), decision)?;
        let chosen = match decision.models {
            ModelChoice::Single(m) if m < self.instances.len() => m,
            _ => return Err(Error::invalid("decision was not made by this committee")),
        };
        let arm = decision.played_arm;
        for (m, instance) in self.instances.iter_mut().enumerate() {
            let prob = if m == chosen {
                decision.played_prob()
            } else {
                instance.distribution(x)?.prob(arm)
            };
            instance.learn_played(x, arm, prob, reward);
        }
        let probs = self.exp3.probabilities();
        self.exp3.update(chosen, reward, &probs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::PolicyConfig;
    use approx::assert_abs_diff_eq;

    fn grid(hidden: &[usize], lambdas: &[f64]) -> ModelGrid {
        ModelGrid::cartesian(hidden, lambdas, 0.1, 40, 3, 4).unwrap()
    }

    fn ctx(t: usize) -> Context {
        Context::from_active(4, &[t % 4, 3]).unwrap()
    }

    #[test]
    fn single_model_matches_neural_bandit1() {
        let g = grid(&[3], &[0.5]);
        let mut committee = NeuralBandit2::new(g.clone(), 0.1).unwrap();
        let mut solo = NeuralBandit1::new(g.specs()[0].clone()).unwrap();
        for t in 0..500 {
            let x = ctx(t);
            let a = committee.decide(&x).unwrap();
            let b = solo.decide(&x).unwrap();
            assert_eq!(a.models, ModelChoice::Single(0));
            assert_eq!(
                (a.played_arm, a.greedy_arm, &a.scores),
                (b.played_arm, b.greedy_arm, &b.scores)
            );
            let r = if a.played_arm == t % 3 { 1.0 } else { 0.0 };
            committee.learn(&x, &a, r).unwrap();
            solo.learn(&x, &b, r).unwrap();
        }
    }

    #[test]
    fn zero_reward_keeps_exp3_but_trains_networks() {
        let mut c = NeuralBandit2::new(grid(&[2, 3], &[0.1]), 0.1).unwrap();
        let x = ctx(1);
        let before_nets: Vec<_> = c
            .instances()
            .iter()
            .map(|i| i.networks().to_vec())
            .collect();
        let d = c.decide(&x).unwrap();
        c.learn(&x, &d, 0.0).unwrap();
        assert_eq!(c.exp3().weights(), &[1.0, 1.0]);
        for (i, inst) in c.instances().iter().enumerate() {
            assert_ne!(inst.networks()[d.played_arm], before_nets[i][d.played_arm]);
        }
    }

    #[test]
    fn identical_instances_stay_identical() {
        let spec = PolicyConfig::new(3, 4, 2).with_gamma(0.2).with_seed(9);
        let g = ModelGrid::from_specs(9, vec![spec.clone(), spec]).unwrap();
        let mut c = NeuralBandit2::new(g, 0.1).unwrap();
        for t in 0..300 {
            let x = ctx(t);
            let d = c.decide(&x).unwrap();
            let r = if d.played_arm == 1 { 1.0 } else { 0.0 };
            c.learn(&x, &d, r).unwrap();
            assert_eq!(c.instances()[0].networks(), c.instances()[1].networks());
        }
    }

    #[test]
    fn hand_computed_exp3_round() {
        let mut c = NeuralBandit2::new(grid(&[2, 3], &[0.1]), 0.2).unwrap();
        c.set_exp3(Exp3::from_weights(vec![2.0, 1.0], 0.2).unwrap())
            .unwrap();
        let x = ctx(2);
        let d = c.decide(&x).unwrap();
        let ModelChoice::Single(m) = d.models else {
            panic!("expected a single model")
        };
        c.learn(&x, &d, 1.0).unwrap();
        // P = 0.8 * (2/3, 1/3) + 0.1 = (19/30, 11/30); w_m *= exp(0.2 / (P_m * 2)).
        let p = [19.0 / 30.0, 11.0 / 30.0];
        let mut expected = [2.0, 1.0];
        expected[m] *= (0.2f64 / (p[m] * 2.0)).exp();
        assert_abs_diff_eq!(c.exp3().weights()[0], expected[0], epsilon = 1e-12);
        assert_abs_diff_eq!(c.exp3().weights()[1], expected[1], epsilon = 1e-12);
    }

    #[test]
    fn model_frequencies_follow_exp3() {
        let mut c = NeuralBandit2::new(grid(&[1, 2, 3], &[0.1]), 0.1).unwrap();
        let exp3 = Exp3::from_weights(vec![5.0, 1.0, 2.0], 0.1).unwrap();
        let target = exp3.probabilities();
        c.set_exp3(exp3).unwrap();
        let x = ctx(0);
        let n = 100_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            if let ModelChoice::Single(m) = c.decide(&x).unwrap().models {
                counts[m] += 1;
            }
        }
        for (c, p) in counts.iter().zip(target) {
            assert!((*c as f64 / n as f64 - p).abs() < 0.01);
        }
    }

    #[test]
    fn rejects_foreign_decision() {
        let mut c = NeuralBandit2::new(grid(&[2], &[0.1]), 0.1).unwrap();
        let mut solo = NeuralBandit1::new(PolicyConfig::new(3, 4, 2)).unwrap();
        let x = ctx(0);
        let d = solo.decide(&x).unwrap();
        assert!(c.learn(&x, &d, 1.0).is_err());
    }
}
