use crate::{Error, Result};

/// Feature vector revealed to a policy before it picks an arm.
///
/// Contexts in this crate are mostly sparse binary vectors (94 indicators with
/// a dozen ones for covertype), so the indices of the non-zero entries are
/// kept alongside the dense values.
#[derive(Debug, Clone, PartialEq)]
pub struct Context {
    values: Vec<f64>,
    nonzero: Vec<usize>,
}

impl Context {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "context entry {i} is not finite ({})",
                values[i]
            )));
        }
        let nonzero = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect();
        Ok(Context { values, nonzero })
    }

    /// Builds a binary context from the positions of its ones.
    pub fn from_active(dim: usize, active: &[usize]) -> Result<Self> {
        let mut values = vec![0.0; dim];
        for &i in active {
            if i >= dim {
                return Err(Error::invalid(format!(
                    "active index {i} out of range for dimension {dim}"
                )));
            }
            values[i] = 1.0;
        }
        Context::new(values)
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Indices of non-zero entries, ascending.
    pub fn nonzero(&self) -> &[usize] {
        &self.nonzero
    }
}

impl TryFrom<Vec<f64>> for Context {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Context::new(values)
    }
}
