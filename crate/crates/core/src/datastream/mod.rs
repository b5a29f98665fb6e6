//! Streams of (context, hidden reward vector) events.
//!
//! Every stream yields [`StreamEvent`]s whose reward vector is one-hot on the
//! correct arm. [`StreamEvent::into_parts`] splits an event into the context,
//! which a policy may see, and [`HiddenRewards`], which only the evaluator
//! holds and from which it reveals the played arm's reward.

mod binarize;
mod covertype;
mod replay;
mod synthetic;

pub use binarize::{Binarizer, ColumnEncoding, ColumnKind, BINS};
pub use covertype::{
    data_dir, fetch_covertype, locate_covertype, CovertypeDataset, COVERTYPE_ARMS,
    COVERTYPE_COLUMNS, COVERTYPE_CONTINUOUS, COVERTYPE_URL, DATA_DIR_ENV,
};
pub use replay::{EncodedDataset, ReplayStream};
pub use synthetic::{LinearStream, XorStream};

use serde::{Deserialize, Serialize};

use crate::{Context, Error, Result};

/// Rewards of every arm for one round. Only the evaluator holds these.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenRewards {
    values: Vec<f64>,
}

impl HiddenRewards {
    pub fn one_hot(arm_count: usize, correct: usize) -> Self {
        let mut values = vec![0.0; arm_count];
        values[correct] = 1.0;
        HiddenRewards { values }
    }

    /// Reward of the played arm.
    pub fn reveal(&self, arm: usize) -> f64 {
        self.values[arm]
    }

    /// Reward of the best arm this round.
    pub fn best(&self) -> f64 {
        self.values.iter().cloned().fold(f64::MIN, f64::max)
    }

    pub fn correct_arm(&self) -> Option<usize> {
        self.values.iter().position(|v| *v == 1.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamEvent {
    pub round: u64,
    pub context: Context,
    rewards: HiddenRewards,
}

impl StreamEvent {
    pub fn new(round: u64, context: Context, rewards: HiddenRewards) -> Self {
        StreamEvent {
            round,
            context,
            rewards,
        }
    }

    pub fn rewards(&self) -> &HiddenRewards {
        &self.rewards
    }

    pub fn into_parts(self) -> (Context, HiddenRewards) {
        (self.context, self.rewards)
    }
}

/// An unbounded, deterministic source of events.
pub trait EventSource: Send {
    fn arm_count(&self) -> usize;

    fn dim(&self) -> usize;

    fn next_event(&mut self) -> StreamEvent;
}

impl<S: EventSource + ?Sized> EventSource for Box<S> {
    fn arm_count(&self) -> usize {
        (**self).arm_count()
    }

    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn next_event(&mut self) -> StreamEvent {
        (**self).next_event()
    }
}

/// Circular relabeling of the arms every `period` rounds.
///
/// After `n` drifts, label `k` becomes `(k + n * step) mod K`; with the
/// default step of 1 that is the cycle 1 -> 2 -> ... -> K -> 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftSchedule {
    pub period: u64,
    #[serde(default = "default_step")]
    pub step: usize,
}

fn default_step() -> usize {
    1
}

impl DriftSchedule {
    pub fn new(period: u64) -> Result<Self> {
        let d = DriftSchedule { period, step: 1 };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.period == 0 {
            return Err(Error::config("drift.period", "must be positive"));
        }
        Ok(())
    }

    pub fn drifts_elapsed(&self, round: u64) -> u64 {
        round / self.period
    }

    /// Label in effect at `round` for an original (0-based) label.
    pub fn effective_label(&self, label: usize, round: u64, arm_count: usize) -> usize {
        let k = arm_count as u64;
        let shift = (self.drifts_elapsed(round) % k) * (self.step as u64 % k) % k;
        ((label as u64 + shift) % k) as usize
    }
}

pub(crate) fn labeled_event(
    round: u64,
    context: Context,
    label: usize,
    arm_count: usize,
    drift: Option<&DriftSchedule>,
) -> StreamEvent {
    let label = drift.map_or(label, |d| d.effective_label(label, round, arm_count));
    StreamEvent::new(round, context, HiddenRewards::one_hot(arm_count, label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_drift_shifts_class_by_one() {
        let d = DriftSchedule::new(500_000).unwrap();
        // 1-based class 3 is label 2; after one drift it is class 4.
        assert_eq!(d.effective_label(2, 500_001, 7), 3);
        assert_eq!(d.effective_label(2, 499_999, 7), 2);
        assert_eq!(d.effective_label(6, 500_000, 7), 0);
    }

    #[test]
    fn seven_drifts_restore_labels() {
        let d = DriftSchedule::new(500_000).unwrap();
        assert_eq!(d.drifts_elapsed(3_500_001), 7);
        for k in 0..7 {
            assert_eq!(d.effective_label(k, 3_500_001, 7), k);
        }
    }

    #[test]
    fn zero_period_rejected() {
        assert!(DriftSchedule::new(0).is_err());
    }

    #[test]
    fn hidden_rewards_accessors() {
        let r = HiddenRewards::one_hot(4, 2);
        assert_eq!(r.reveal(2), 1.0);
        assert_eq!(r.reveal(0), 0.0);
        assert_eq!(r.best(), 1.0);
        assert_eq!(r.correct_arm(), Some(2));
    }

    proptest! {
        #[test]
        fn drift_is_a_bijection(k in 1usize..12, step in 1usize..12, period in 1u64..100, round in 0u64..10_000) {
            let d = DriftSchedule { period, step };
            let mut seen: Vec<usize> = (0..k).map(|l| d.effective_label(l, round, k)).collect();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..k).collect::<Vec<_>>());
            // K further drifts bring every label back.
            for l in 0..k {
                prop_assert_eq!(
                    d.effective_label(l, round + period * k as u64, k),
                    d.effective_label(l, round, k)
                );
            }
        }
    }
}
