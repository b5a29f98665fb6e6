use serde::{Deserialize, Serialize};

use crate::policy::PolicyConfig;
use crate::{Error, Result};

/// Hidden-layer sizes of the default committee.
pub const DEFAULT_HIDDEN_SIZES: [usize; 5] = [1, 5, 25, 50, 100];
/// Learning steps of the default committee.
pub const DEFAULT_LAMBDAS: [f64; 3] = [0.01, 0.1, 1.0];

/// Candidate models of a committee. Model `i` is seeded with `base_seed + i`
/// so that repeated hyperparameters still start from different weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelGrid {
    base_seed: u64,
    specs: Vec<PolicyConfig>,
}

impl ModelGrid {
    /// Every (hidden size, lambda) combination, sorted by hidden size then
    /// lambda, duplicates removed.
    pub fn cartesian(
        hidden_sizes: &[usize],
        lambdas: &[f64],
        gamma: f64,
        base_seed: u64,
        arm_count: usize,
        input_dim: usize,
    ) -> Result<Self> {
        let mut hidden = hidden_sizes.to_vec();
        hidden.sort_unstable();
        hidden.dedup();
        let mut steps = lambdas.to_vec();
        if steps.iter().any(|l| l.is_nan()) {
            return Err(Error::config("lambdas", "NaN learning step"));
        }
        steps.sort_by(f64::total_cmp);
        steps.dedup();
        let mut specs = Vec::with_capacity(hidden.len() * steps.len());
        for &h in &hidden {
            for &lambda in &steps {
                let seed = base_seed.wrapping_add(specs.len() as u64);
                specs.push(
                    PolicyConfig::new(arm_count, input_dim, h)
                        .with_gamma(gamma)
                        .with_lambda(lambda)
                        .with_seed(seed),
                );
            }
        }
        ModelGrid::from_specs(base_seed, specs)
    }

    /// The 5 x 3 grid: hidden sizes {1, 5, 25, 50, 100} x lambda {0.01, 0.1, 1}.
    pub fn default_grid(
        gamma: f64,
        base_seed: u64,
        arm_count: usize,
        input_dim: usize,
    ) -> Result<Self> {
        ModelGrid::cartesian(
            &DEFAULT_HIDDEN_SIZES,
            &DEFAULT_LAMBDAS,
            gamma,
            base_seed,
            arm_count,
            input_dim,
        )
    }

    pub fn from_specs(base_seed: u64, specs: Vec<PolicyConfig>) -> Result<Self> {
        let first = specs
            .first()
            .ok_or_else(|| Error::config("models", "a committee needs at least one model"))?;
        for (i, spec) in specs.iter().enumerate() {
            spec.validate().map_err(|e| match e {
                Error::Config { field, message } => {
                    Error::config(format!("models[{i}].{field}"), message)
                }
                other => other,
            })?;
            if spec.arm_count != first.arm_count || spec.input_dim != first.input_dim {
                return Err(Error::config(
                    format!("models[{i}]"),
                    "all models must share arm count and input dimension",
                ));
            }
        }
        Ok(ModelGrid { base_seed, specs })
    }

    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    pub fn specs(&self) -> &[PolicyConfig] {
        &self.specs
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn arm_count(&self) -> usize {
        self.specs[0].arm_count
    }

    pub fn input_dim(&self) -> usize {
        self.specs[0].input_dim
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_fifteen_sorted_models() {
        let g = ModelGrid::default_grid(0.005, 100, 7, 94).unwrap();
        assert_eq!(g.len(), 15);
        let keys: Vec<(usize, f64)> = g
            .specs()
            .iter()
            .map(|s| (s.hidden_units, s.lambda))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        assert_eq!(keys, sorted);
        assert_eq!(keys[0], (1, 0.01));
        assert_eq!(keys[14], (100, 1.0));
        let seeds: Vec<u64> = g.specs().iter().map(|s| s.seed).collect();
        assert_eq!(seeds, (100..115).collect::<Vec<_>>());
    }

    #[test]
    fn single_entry_grid() {
        let g = ModelGrid::cartesian(&[1], &[1.0], 0.01, 0, 2, 3).unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn rejects_empty_and_invalid() {
        assert!(ModelGrid::cartesian(&[], &[0.1], 0.01, 0, 2, 3).is_err());
        assert!(ModelGrid::cartesian(&[0], &[0.1], 0.01, 0, 2, 3).is_err());
        let err = ModelGrid::cartesian(&[2], &[2.0], 0.01, 0, 2, 3).unwrap_err();
        assert!(err.to_string().contains("models[0].lambda"), "{err}");
    }
}
