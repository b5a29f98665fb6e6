use super::{check_arms, check_context, ArmDistribution, Decision, ModelChoice, Policy};
use crate::seeding::{self, SeededRng};
use crate::{Context, Error, Result};

/// Plays uniformly at random and never learns. Experimental control.
#[derive(Debug, Clone)]
pub struct RandomPolicy {
    arm_count: usize,
    input_dim: usize,
    rng: SeededRng,
}

impl RandomPolicy {
    pub fn new(arm_count: usize, input_dim: usize, seed: u64) -> Result<Self> {
        check_arms(arm_count)?;
        if input_dim == 0 {
            return Err(Error::config("input_dim", "must be positive"));
        }
        Ok(RandomPolicy {
            arm_count,
            input_dim,
            rng: seeding::rng(seed, seeding::ACTION_STREAM),
        })
    }
}

impl Policy for RandomPolicy {
    fn arm_count(&self) -> usize {
        self.arm_count
    }

    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn decide(&mut self, x: &Context) -> Result<Decision> {
        check_context(self.input_dim, x)?;
        let distribution = ArmDistribution::uniform(self.arm_count);
        let played = seeding::sample_index(&mut self.rng, distribution.probs());
        Ok(Decision {
            greedy_arm: played,
            played_arm: played,
            distribution,
            scores: vec![0.0; self.arm_count],
            models: ModelChoice::None,
        })
    }

    fn learn(&mut self, _x: &Context, _decision: &Decision, _reward: f64) -> Result<()> {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn draws(seed: u64, n: usize) -> Vec<usize> {
        let mut p = RandomPolicy::new(7, 1, seed).unwrap();
        let x = Context::new(vec![1.0]).unwrap();
        (0..n).map(|_| p.decide(&x).unwrap().played_arm).collect()
    }

    #[test]
    fn uniform_probabilities() {
        let mut p = RandomPolicy::new(7, 1, 0).unwrap();
        let d = p.decide(&Context::new(vec![0.0]).unwrap()).unwrap();
        assert!(d
            .distribution
            .probs()
            .iter()
            .all(|q| (q - 1.0 / 7.0).abs() < 1e-15));
    }

    #[test]
    fn reproducible_sequence() {
        assert_eq!(draws(3, 50), draws(3, 50));
        assert_ne!(draws(3, 50), draws(4, 50));
    }

    #[test]
    fn empirical_frequencies_near_uniform() {
        let n = 100_000;
        let mut counts = [0usize; 7];
        for a in draws(12, n) {
            counts[a] += 1;
        }
        for c in counts {
            let freq = c as f64 / n as f64;
            assert!((freq - 1.0 / 7.0).abs() < 0.01, "frequency {freq}");
        }
        // Chi-square with 6 degrees of freedom; 22.46 is the 0.999 quantile.
        let expected = n as f64 / 7.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 22.46, "chi-square {chi2}");
    }
}
