//! Synthetic streams with known structure.

use rand::Rng;

use super::{labeled_event, DriftSchedule, EventSource, StreamEvent};
use crate::seeding::{self, SeededRng};
use crate::Context;

/// Two random bits `(a, b)` plus a constant 1 and optional noise bits.
/// Arm 0 pays when `a XOR b`, arm 1 otherwise.
///
/// No linear scorer can be right on more than three of the four `(a, b)`
/// patterns, so linear policies top out at 75% expected accuracy.
#[derive(Debug, Clone)]
pub struct XorStream {
    rng: SeededRng,
    noise_bits: usize,
    round: u64,
    drift: Option<DriftSchedule>,
}

impl XorStream {
    pub fn new(seed: u64, noise_bits: usize) -> Self {
        XorStream {
            rng: seeding::rng(seed, seeding::SYNTHETIC_STREAM),
            noise_bits,
            round: 0,
            drift: None,
        }
    }

    pub fn with_drift(mut self, drift: DriftSchedule) -> Self {
        self.drift = Some(drift);
        self
    }

    /// Arm paid for the bit pair `(a, b)`, before drift.
    pub fn label(a: bool, b: bool) -> usize {
        if a ^ b {
            0
        } else {
            1
        }
    }

    pub fn context(a: bool, b: bool, noise: &[bool]) -> Context {
        let mut v = vec![f64::from(u8::from(a)), f64::from(u8::from(b)), 1.0];
        v.extend(noise.iter().map(|n| f64::from(u8::from(*n))));
        Context::new(v).expect("binary context is finite")
    }
}

impl EventSource for XorStream {
    fn arm_count(&self) -> usize {
        2
    }

    fn dim(&self) -> usize {
        3 + self.noise_bits
    }

    fn next_event(&mut self) -> StreamEvent {
        let a: bool = self.rng.random();
        let b: bool = self.rng.random();
        let noise: Vec<bool> = (0..self.noise_bits).map(|_| self.rng.random()).collect();
        let event = labeled_event(
            self.round,
            Self::context(a, b, &noise),
            Self::label(a, b),
            2,
            self.drift.as_ref(),
        );
        self.round += 1;
        event
    }
}

/// Random bits plus a constant 1, labeled by a hidden linear teacher.
///
/// Arm `k` pays when it maximizes `W_k . x + k / (K + 1)`, where `W` has
/// integer entries in `[-3, 3]`. The fractional offsets rule out ties, so for
/// two arms the classes are linearly separable with margin at least 1/3.
#[derive(Debug, Clone)]
pub struct LinearStream {
    rng: SeededRng,
    input_bits: usize,
    teacher: Vec<Vec<f64>>,
    round: u64,
    drift: Option<DriftSchedule>,
}

impl LinearStream {
    pub fn new(input_bits: usize, arm_count: usize, seed: u64) -> Self {
        let mut rng = seeding::rng(seed, seeding::SYNTHETIC_STREAM);
        let teacher = (0..arm_count.max(1))
            .map(|_| {
                (0..=input_bits)
                    .map(|_| f64::from(rng.random_range(-3i32..=3)))
                    .collect()
            })
            .collect();
        LinearStream {
            rng,
            input_bits,
            teacher,
            round: 0,
            drift: None,
        }
    }

    pub fn with_drift(mut self, drift: DriftSchedule) -> Self {
        self.drift = Some(drift);
        self
    }

    /// Draws inputs from a generator seeded independently of the teacher, so
    /// several runs can share one teacher.
    pub fn with_input_seed(mut self, seed: u64) -> Self {
        self.rng = seeding::rng(seeding::derive(seed, 0), seeding::SYNTHETIC_STREAM);
        self
    }

    pub fn teacher(&self) -> &[Vec<f64>] {
        &self.teacher
    }

    pub fn label_of(&self, x: &Context) -> usize {
        let k = self.teacher.len();
        let scores: Vec<f64> = self
            .teacher
            .iter()
            .enumerate()
            .map(|(arm, w)| {
                let dot: f64 = w.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum();
                dot + arm as f64 / (k + 1) as f64
            })
            .collect();
        crate::policy::greedy_arm(&scores)
    }
}

impl EventSource for LinearStream {
    fn arm_count(&self) -> usize {
        self.teacher.len()
    }

    fn dim(&self) -> usize {
        self.input_bits + 1
    }

    fn next_event(&mut self) -> StreamEvent {
        let mut v: Vec<f64> = (0..self.input_bits)
            .map(|_| f64::from(u8::from(self.rng.random::<bool>())))
            .collect();
        v.push(1.0);
        let x = Context::new(v).expect("binary context is finite");
        let label = self.label_of(&x);
        let event = labeled_event(
            self.round,
            x,
            label,
            self.teacher.len(),
            self.drift.as_ref(),
        );
        self.round += 1;
        event
    }
}
