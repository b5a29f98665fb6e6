//! Single-hidden-layer sigmoid networks.
//!
//! One network scores one arm. The architecture is biasless:
//! `input_dim * hidden_units` input-to-hidden weights followed by
//! `hidden_units` hidden-to-output weights, so a network has exactly
//! `input_dim * hidden_units + hidden_units` connections. A constant-1 input
//! feature plays the role of a bias when one is needed.
//!
//! Weights are stored in one flat vector, hidden-unit major:
//! `values[j * input_dim + i]` connects input `i` to hidden unit `j`, and
//! `values[input_dim * hidden_units + j]` connects hidden unit `j` to the
//! output.
//!
//! The loss is `0.5 * (output - target)^2`. [`backward`] returns the raw
//! gradient of that loss (not the descent direction); callers descend by
//! passing a negative `scale` to [`apply_update`].

use rand::Rng;

use crate::seeding::{self, SeededRng};
use crate::{Context, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct NetworkShape {
    input_dim: usize,
    hidden_units: usize,
}

impl NetworkShape {
    pub fn new(input_dim: usize, hidden_units: usize) -> Result<Self> {
        if input_dim == 0 || hidden_units == 0 {
            return Err(Error::invalid(format!(
                "network shape needs positive sizes, got input_dim={input_dim} hidden_units={hidden_units}"
            )));
        }
        Ok(NetworkShape {
            input_dim,
            hidden_units,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_units(&self) -> usize {
        self.hidden_units
    }

    /// Number of connections, `input_dim * hidden_units + hidden_units`.
    pub fn connection_count(&self) -> usize {
        self.input_dim * self.hidden_units + self.hidden_units
    }

    fn output_offset(&self) -> usize {
        self.input_dim * self.hidden_units
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkWeights {
    shape: NetworkShape,
    values: Vec<f64>,
}

/// Raw loss gradient with the same layout as [`NetworkWeights`].
#[derive(Debug, Clone, PartialEq)]
pub struct GradientVector {
    shape: NetworkShape,
    values: Vec<f64>,
}

/// Activations cached by [`forward`] for use by [`backward`].
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    pub hidden: Vec<f64>,
    pub output: f64,
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl NetworkWeights {
    pub fn from_values(shape: NetworkShape, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.connection_count() {
            return Err(Error::invalid(format!(
                "expected {} weights for shape {:?}, got {}",
                shape.connection_count(),
                shape,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("network weights must be finite"));
        }
        Ok(NetworkWeights { shape, values })
    }

    pub fn zeros(shape: NetworkShape) -> Self {
        NetworkWeights {
            shape,
            values: vec![0.0; shape.connection_count()],
        }
    }

    pub fn shape(&self) -> NetworkShape {
        self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Hidden-to-output weights.
    pub fn output_weights(&self) -> &[f64] {
        &self.values[self.shape.output_offset()..]
    }

    /// In-place `self -= step * grad(loss)` for one example.
    ///
    /// Produces bit-identical weights to
    /// `apply_update(self, backward(self, trace, x, target), -step)` but only
    /// touches the input weights of non-zero features.
    pub(crate) fn descend(&mut self, x: &Context, trace: &ForwardTrace, target: f64, step: f64) {
        let d = self.shape.input_dim;
        let off = self.shape.output_offset();
        let scale = -step;
        let out = trace.output;
        let delta_out = (out - target) * out * (1.0 - out);
        let xs = x.as_slice();
        for (j, &h) in trace.hidden.iter().enumerate() {
            let delta_hidden = delta_out * self.values[off + j] * h * (1.0 - h);
            let row = &mut self.values[j * d..(j + 1) * d];
            for &i in x.nonzero() {
                row[i] += scale * (delta_hidden * xs[i]);
            }
        }
        for (j, &h) in trace.hidden.iter().enumerate() {
            self.values[off + j] += scale * (delta_out * h);
        }
    }
}

impl GradientVector {
    pub fn shape(&self) -> NetworkShape {
        self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn from_values(shape: NetworkShape, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.connection_count() {
            return Err(Error::invalid(format!(
                "expected {} gradient entries, got {}",
                shape.connection_count(),
                values.len()
            )));
        }
        Ok(GradientVector { shape, values })
    }
}

/// Draws every connection i.i.d. uniform on the open interval (-0.5, 0.5).
pub fn init_weights(shape: NetworkShape, rng: &mut SeededRng) -> NetworkWeights {
    let values = (0..shape.connection_count())
        .map(|_| loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break u - 0.5;
            }
        })
        .collect();
    NetworkWeights { shape, values }
}

/// Convenience for [`init_weights`] with a fresh generator.
pub fn init_weights_seeded(shape: NetworkShape, seed: u64, stream: u64) -> NetworkWeights {
    init_weights(shape, &mut seeding::rng(seed, stream))
}

pub fn forward(w: &NetworkWeights, x: &Context) -> Result<ForwardTrace> {
    check_dim(w.shape, x)?;
    Ok(forward_unchecked(w, x))
}

pub(crate) fn forward_unchecked(w: &NetworkWeights, x: &Context) -> ForwardTrace {
    let shape = w.shape;
    let d = shape.input_dim;
    let xs = x.as_slice();
    let hidden: Vec<f64> = (0..shape.hidden_units)
        .map(|j| {
            let row = &w.values[j * d..(j + 1) * d];
            let z: f64 = x.nonzero().iter().map(|&i| row[i] * xs[i]).sum();
            sigmoid(z)
        })
        .collect();
    let z_out: f64 = hidden
        .iter()
        .zip(w.output_weights())
        .map(|(h, v)| h * v)
        .sum();
    ForwardTrace {
        hidden,
        output: sigmoid(z_out),
    }
}

/// Gradient of `0.5 * (output - target)^2` with respect to every connection.
pub fn backward(
    w: &NetworkWeights,
    trace: &ForwardTrace,
    x: &Context,
    target: f64,
) -> Result<GradientVector> {
    check_dim(w.shape, x)?;
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::invalid(format!("target {target} outside [0, 1]")));
    }
    if trace.hidden.len() != w.shape.hidden_units {
        return Err(Error::invalid("trace does not match network shape"));
    }
    let d = w.shape.input_dim;
    let off = w.shape.output_offset();
    let out = trace.output;
    let delta_out = (out - target) * out * (1.0 - out);
    let mut values = vec![0.0; w.shape.connection_count()];
    for (j, &h) in trace.hidden.iter().enumerate() {
        let delta_hidden = delta_out * w.values[off + j] * h * (1.0 - h);
        for (i, &xi) in x.as_slice().iter().enumerate() {
            values[j * d + i] = delta_hidden * xi;
        }
        values[off + j] = delta_out * h;
    }
    Ok(GradientVector {
        shape: w.shape,
        values,
    })
}

/// Returns `w + scale * g`.
pub fn apply_update(w: &NetworkWeights, g: &GradientVector, scale: f64) -> Result<NetworkWeights> {
    if w.shape != g.shape {
        return Err(Error::invalid(format!(
            "gradient shape {:?} does not match weights {:?}",
            g.shape, w.shape
        )));
    }
    let values: Vec<f64> = w
        .values
        .iter()
        .zip(&g.values)
        .map(|(wi, gi)| wi + scale * gi)
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("update produced non-finite weights"));
    }
    Ok(NetworkWeights {
        shape: w.shape,
        values,
    })
}

/// Half squared error of the network on one example.
pub fn loss(w: &NetworkWeights, x: &Context, target: f64) -> Result<f64> {
    let out = forward(w, x)?.output;
    Ok(0.5 * (out - target) * (out - target))
}

fn check_dim(shape: NetworkShape, x: &Context) -> Result<()> {
    if x.dim() != shape.input_dim {
        return Err(Error::invalid(format!(
            "context has dimension {}, network expects {}",
            x.dim(),
            shape.input_dim
        )));
    }
    Ok(())
}
