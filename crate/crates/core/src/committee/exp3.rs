use crate::policy::check_reward;
use crate::seeding;
use crate::{Error, Result};
use rand::Rng;

/// Weights above this trigger a rescale by the maximum weight.
const RESCALE_THRESHOLD: f64 = 1e100;

/// Exponential-weights adversarial bandit over `M` candidates.
///
/// Probabilities are `(1 - gamma) * w_m / sum(w) + gamma / M`. After model `m`
/// earns `reward`, its weight is multiplied by
/// `exp(gamma * reward / (P(m) * M))`; other weights are untouched.
///
/// Weights are divided by their maximum whenever it exceeds 1e100, which
/// leaves the probabilities unchanged, and floored at the smallest normal
/// `f64` so they stay strictly positive on arbitrarily long streams.
#[derive(Debug, Clone, PartialEq)]
pub struct Exp3 {
    weights: Vec<f64>,
    gamma: f64,
}

impl Exp3 {
    pub fn new(arm_count: usize, gamma: f64) -> Result<Self> {
        Exp3::from_weights(vec![1.0; arm_count], gamma)
    }

    pub fn from_weights(weights: Vec<f64>, gamma: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::config("models", "EXP3 needs at least one candidate"));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::config(
                "gamma_model",
                format!("{gamma} is outside [0, 1]"),
            ));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::invalid("EXP3 weights must be positive and finite"));
        }
        Ok(Exp3 { weights, gamma })
    }

    pub fn arm_count(&self) -> usize {
        self.weights.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let m = self.weights.len() as f64;
        let total: f64 = self.weights.iter().sum();
        self.weights
            .iter()
            .map(|w| (1.0 - self.gamma) * (w / total) + self.gamma / m)
            .collect()
    }

    /// Draws a candidate, returning it with the distribution it came from.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, Vec<f64>) {
        let probs = self.probabilities();
        (seeding::sample_index(rng, &probs), probs)
    }

    /// Credits `chosen` with `reward`; `probs` must be this round's
    /// [`probabilities`](Self::probabilities).
    pub fn update(&mut self, chosen: usize, reward: f64, probs: &[f64]) -> Result<()> {
        check_reward(reward)?;
        if chosen >= self.weights.len() || probs.len() != self.weights.len() {
            return Err(Error::invalid(format!(
                "model {chosen} / distribution of length {} do not match {} candidates",
                probs.len(),
                self.weights.len()
            )));
        }
        if reward == 0.0 || self.gamma == 0.0 {
            return Ok(());
        }
        let m = self.weights.len() as f64;
        let exponent = self.gamma * reward / (probs[chosen] * m);
        self.weights[chosen] *= exponent.exp();
        let max = self.weights.iter().cloned().fold(f64::MIN, f64::max);
        if max > RESCALE_THRESHOLD {
            for w in &mut self.weights {
                *w = (*w / max).max(f64::MIN_POSITIVE);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn uniform_weights_give_uniform_probabilities() {
        let e = Exp3::new(2, 0.1).unwrap();
        assert_eq!(e.probabilities(), vec![0.5, 0.5]);
        let e = Exp3::new(15, 0.1).unwrap();
        for p in e.probabilities() {
            assert_abs_diff_eq!(p, 1.0 / 15.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn skewed_weights() {
        let e = Exp3::from_weights(vec![3.0, 1.0], 0.1).unwrap();
        let p = e.probabilities();
        assert_abs_diff_eq!(p[0], 0.725, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.275, epsilon = 1e-15);
    }

    #[test]
    fn hand_update() {
        let mut e = Exp3::new(2, 0.1).unwrap();
        let p = e.probabilities();
        e.update(0, 1.0, &p).unwrap();
        assert_abs_diff_eq!(e.weights()[0], 0.1f64.exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(e.weights()[0], 1.105_170_918_075_647_6, epsilon = 1e-12);
        assert_eq!(e.weights()[1], 1.0);
    }

    #[test]
    fn zero_reward_is_noop() {
        let mut e = Exp3::from_weights(vec![2.0, 0.5, 1.0], 0.3).unwrap();
        let before = e.clone();
        let p = e.probabilities();
        e.update(1, 0.0, &p).unwrap();
        assert_eq!(e, before);
    }

    #[test]
    fn rejects_bad_reward_and_index() {
        let mut e = Exp3::new(2, 0.1).unwrap();
        let p = e.probabilities();
        assert!(e.update(0, 1.5, &p).is_err());
        assert!(e.update(2, 1.0, &p).is_err());
    }

    #[test]
    fn repeated_reward_converges_to_max_probability() {
        let mut e = Exp3::new(4, 0.1).unwrap();
        for _ in 0..10_000 {
            let p = e.probabilities();
            e.update(2, 1.0, &p).unwrap();
        }
        let limit = 0.9 + 0.1 / 4.0;
        assert!((e.probabilities()[2] - limit).abs() < 1e-3);
    }

    #[test]
    fn weights_stay_positive_over_long_streams() {
        let mut e = Exp3::new(3, 0.5).unwrap();
        let mut rng = seeding::rng(5, 0);
        for _ in 0..1_000_000 {
            let (m, p) = e.sample(&mut rng);
            // Adversary pays only model 0, maximally.
            let r = if m == 0 { 1.0 } else { 0.0 };
            e.update(m, r, &p).unwrap();
        }
        assert!(e.weights().iter().all(|w| w.is_finite() && *w > 0.0));
        let s: f64 = e.probabilities().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn probabilities_sum_to_one_with_floor(
            weights in prop::collection::vec(1e-6f64..1e6, 1..20),
            gamma in 0.0f64..=0.5,
            scale in 1e-3f64..1e3,
        ) {
            let e = Exp3::from_weights(weights.clone(), gamma).unwrap();
            let p = e.probabilities();
            let m = weights.len() as f64;
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(p.iter().all(|q| *q >= gamma / m - 1e-15));
            let scaled = Exp3::from_weights(weights.iter().map(|w| w * scale).collect(), gamma).unwrap();
            for (a, b) in p.iter().zip(scaled.probabilities()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn reward_one_raises_chosen_probability(
            weights in prop::collection::vec(1e-3f64..1e3, 2..10),
            gamma in 0.01f64..=0.5,
            pick in 0usize..100,
        ) {
            let mut e = Exp3::from_weights(weights, gamma).unwrap();
            let m = pick % e.arm_count();
            let p = e.probabilities();
            e.update(m, 1.0, &p).unwrap();
            prop_assert!(e.probabilities()[m] > p[m]);
        }
    }
}
