//! Playing policies against streams and accounting regret.
//!
//! Each round the policy sees the context, picks an arm, and learns from that
//! arm's reward. The oracle reward is what a reference player would have
//! earned that round; the cumulated regret is the running sum of
//! `oracle - reward`.

mod experiment;
mod export;

pub use experiment::{Curve, Experiment, ExperimentResult};
pub use export::{
    curve_points, parse_csv, write_csv, CurvePoint, DatasetInfo, Manifest, PolicySeed, RunManifest,
    CSV_HEADER,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::datastream::{EventSource, HiddenRewards};
use crate::policy::Policy;
use crate::seeding::{self, SeededRng};
use crate::{Error, Result};

/// Reference player against which regret is measured.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleSpec {
    /// Always earns the best arm's reward.
    #[default]
    Perfect,
    /// Right with probability `p`, drawn independently each round.
    FixedAccuracy { p: f64 },
    /// Earns `p` every round: the mean of `FixedAccuracy`.
    ExpectedAccuracy { p: f64 },
}

impl OracleSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            OracleSpec::Perfect => Ok(()),
            OracleSpec::FixedAccuracy { p } | OracleSpec::ExpectedAccuracy { p } => {
                if (0.0..=1.0).contains(p) {
                    Ok(())
                } else {
                    Err(Error::config("oracle.p", format!("{p} is outside [0, 1]")))
                }
            }
        }
    }

    pub(crate) fn start(&self, seed: u64) -> Oracle {
        Oracle {
            spec: *self,
            rng: seeding::rng(seed, seeding::ORACLE_STREAM),
        }
    }
}

pub(crate) struct Oracle {
    spec: OracleSpec,
    rng: SeededRng,
}

impl Oracle {
    fn reward(&mut self, rewards: &HiddenRewards) -> f64 {
        match self.spec {
            OracleSpec::Perfect => rewards.best(),
            OracleSpec::FixedAccuracy { p } => {
                let u: f64 = self.rng.random();
                if u < p {
                    rewards.best()
                } else {
                    0.0
                }
            }
            OracleSpec::ExpectedAccuracy { p } => p * rewards.best(),
        }
    }
}

/// Outcome of one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    /// 0-based round index.
    pub round: u64,
    pub played: usize,
    pub reward: f64,
    pub oracle: f64,
}

/// Plays `horizon` rounds, reporting each round to `observe`.
pub(crate) fn play(
    policy: &mut dyn Policy,
    stream: &mut dyn EventSource,
    oracle: &OracleSpec,
    horizon: u64,
    seed: u64,
    mut observe: impl FnMut(Step),
) -> Result<()> {
    if policy.arm_count() != stream.arm_count() {
        return Err(Error::config(
            "policies",
            format!(
                "policy has {} arms but the stream has {}",
                policy.arm_count(),
                stream.arm_count()
            ),
        ));
    }
    if policy.input_dim() != stream.dim() {
        return Err(Error::config(
            "policies",
            format!(
                "policy expects {} inputs but the stream yields {}",
                policy.input_dim(),
                stream.dim()
            ),
        ));
    }
    let mut oracle = oracle.start(seed);
    for round in 0..horizon {
        let (context, rewards) = stream.next_event().into_parts();
        let decision = policy.decide(&context)?;
        let reward = rewards.reveal(decision.played_arm);
        policy.learn(&context, &decision, reward)?;
        observe(Step {
            round,
            played: decision.played_arm,
            reward,
            oracle: oracle.reward(&rewards),
        });
    }
    Ok(())
}

/// Full per-round history of one policy on one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub policy_id: String,
    pub seed: u64,
    pub start_offset: Option<usize>,
    pub played: Vec<usize>,
    pub rewards: Vec<f64>,
    pub oracle: Vec<f64>,
    pub cum_regret: Vec<f64>,
}

impl RunRecord {
    pub fn horizon(&self) -> usize {
        self.played.len()
    }

    pub fn final_regret(&self) -> f64 {
        self.cum_regret.last().copied().unwrap_or(0.0)
    }

    pub fn total_reward(&self) -> f64 {
        self.rewards.iter().sum()
    }

    pub fn total_oracle(&self) -> f64 {
        self.oracle.iter().sum()
    }

    pub fn classification_rate(&self, window: usize) -> Result<f64> {
        classification_rate(self, window)
    }
}

/// Plays one policy on one stream and keeps every round.
pub fn run_once(
    policy_id: &str,
    policy: &mut dyn Policy,
    stream: &mut dyn EventSource,
    oracle: &OracleSpec,
    horizon: u64,
    seed: u64,
) -> Result<RunRecord> {
    let n = horizon as usize;
    let mut record = RunRecord {
        policy_id: policy_id.to_string(),
        seed,
        start_offset: None,
        played: Vec::with_capacity(n),
        rewards: Vec::with_capacity(n),
        oracle: Vec::with_capacity(n),
        cum_regret: Vec::with_capacity(n),
    };
    let mut regret = 0.0;
    play(policy, stream, oracle, horizon, seed, |s| {
        regret += s.oracle - s.reward;
        record.played.push(s.played);
        record.rewards.push(s.reward);
        record.oracle.push(s.oracle);
        record.cum_regret.push(regret);
    })?;
    Ok(record)
}

/// Fraction of the last `window` rounds in which the played arm paid 1.
pub fn classification_rate(record: &RunRecord, window: usize) -> Result<f64> {
    if window == 0 {
        return Err(Error::invalid("window must be positive"));
    }
    if window > record.horizon() {
        return Err(Error::invalid(format!(
            "window {window} exceeds the {} recorded rounds",
            record.horizon()
        )));
    }
    let tail = &record.rewards[record.horizon() - window..];
    Ok(tail.iter().filter(|r| **r == 1.0).count() as f64 / window as f64)
}

/// Running trailing-window accuracy.
#[derive(Debug, Clone)]
pub(crate) struct TrailingRate {
    hits: Vec<bool>,
    next: usize,
    filled: usize,
    count: usize,
}

impl TrailingRate {
    pub(crate) fn new(window: usize) -> Self {
        TrailingRate {
            hits: vec![false; window.max(1)],
            next: 0,
            filled: 0,
            count: 0,
        }
    }

    pub(crate) fn push(&mut self, hit: bool) {
        if self.filled == self.hits.len() {
            self.count -= usize::from(self.hits[self.next]);
        } else {
            self.filled += 1;
        }
        self.hits[self.next] = hit;
        self.count += usize::from(hit);
        self.next = (self.next + 1) % self.hits.len();
    }

    /// Rate over the last `min(window, rounds seen)` rounds.
    pub(crate) fn rate(&self) -> f64 {
        if self.filled == 0 {
            0.0
        } else {
            self.count as f64 / self.filled as f64
        }
    }
}
