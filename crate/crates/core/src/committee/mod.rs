//! Model selection with EXP3.
//!
//! A *model* is one NeuralBandit1 configuration (hidden size, learning step,
//! seed). [`NeuralBandit2`] lets a single EXP3 choose which model acts each
//! round; [`NeuralBandit3`] keeps one EXP3 per arm so different arms can be
//! scored by different models.

mod exp3;
mod grid;
mod nb2;
mod nb3;

pub use exp3::Exp3;
pub use grid::{ModelGrid, DEFAULT_HIDDEN_SIZES, DEFAULT_LAMBDAS};
pub use nb2::NeuralBandit2;
pub use nb3::NeuralBandit3;

pub use crate::policy::ModelChoice;
