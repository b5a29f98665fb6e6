//! Neural contextual bandits.
//!
//! Each arm owns a single-hidden-layer sigmoid network that estimates the
//! probability of reward given the context. Networks are trained online with
//! importance-weighted backpropagation so that the expected update under the
//! exploration distribution equals the full-information update. Two committee
//! policies run several such learners side by side and let EXP3 pick between
//! them, either one model for all arms ([`NeuralBandit2`]) or one EXP3 per arm
//! ([`NeuralBandit3`]).
//!
//! The crate also carries the harness used to benchmark these policies:
//! covertype ingestion with equal-frequency binarization, looping streams with
//! circular label drift, synthetic XOR and linear streams, cumulated-regret
//! accounting and CSV/JSON export.
//!
//! ```no_run
//! use neuralbandit::{NeuralBandit1, Policy, PolicyConfig, XorStream, EventSource};
//!
//! let config = PolicyConfig::new(2, 3, 5).with_gamma(0.05).with_lambda(0.1).with_seed(7);
//! let mut policy = NeuralBandit1::new(config).unwrap();
//! let mut stream = XorStream::new(11, 0);
//! for _ in 0..1_000 {
//!     let (context, rewards) = stream.next_event().into_parts();
//!     let decision = policy.decide(&context).unwrap();
//!     let reward = rewards.reveal(decision.played_arm);
//!     policy.learn(&context, &decision, reward).unwrap();
//! }
//! ```
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod committee;
pub mod config;
mod context;
pub mod datastream;
mod error;
pub mod evaluation;
pub mod mlp;
pub mod policy;
pub mod seeding;
pub mod selftest;

pub use committee::{Exp3, ModelChoice, ModelGrid, NeuralBandit2, NeuralBandit3};
pub use context::Context;
pub use datastream::{
    Binarizer, CovertypeDataset, DriftSchedule, EventSource, HiddenRewards, LinearStream,
    ReplayStream, StreamEvent, XorStream,
};
pub use error::{Error, Result};
pub use evaluation::{OracleSpec, RunRecord};
pub use mlp::{ForwardTrace, GradientVector, NetworkShape, NetworkWeights};
pub use policy::{
    ArmDistribution, Banditron, Decision, NeuralBandit1, Policy, PolicyConfig, RandomPolicy,
};
