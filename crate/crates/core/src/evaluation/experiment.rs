use std::path::PathBuf;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use super::export::{DatasetInfo, Manifest, PolicySeed, RunManifest};
use super::{play, run_once, RunRecord, TrailingRate};
use crate::committee::{ModelGrid, NeuralBandit2, NeuralBandit3};
use crate::config::{ExperimentConfig, PolicySpec, StreamSpec};
use crate::datastream::{
    data_dir, locate_covertype, CovertypeDataset, EncodedDataset, EventSource, LinearStream,
    ReplayStream, XorStream,
};
use crate::policy::{Banditron, NeuralBandit1, Policy, PolicyConfig, RandomPolicy};
use crate::seeding;
use crate::{Error, Result};

/// A validated config with its dataset loaded and encoded.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    data: Option<Arc<EncodedDataset>>,
    dataset: Option<DatasetInfo>,
}

/// Averaged curves of one policy, sampled every `record_every` rounds and at
/// the last round.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub policy: String,
    /// 1-based round numbers.
    pub rounds: Vec<u64>,
    pub mean_regret: Vec<f64>,
    /// Sample standard deviation across runs; 0 for a single run.
    pub std_regret: Vec<f64>,
    pub mean_classification_rate: Vec<f64>,
}

impl Curve {
    pub fn final_rate(&self) -> f64 {
        self.mean_classification_rate.last().copied().unwrap_or(0.0)
    }

    pub fn final_regret(&self) -> f64 {
        self.mean_regret.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub curves: Vec<Curve>,
    pub manifest: Manifest,
}

impl ExperimentResult {
    pub fn curve(&self, policy: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.policy == policy)
    }
}

/// Curve of a single run before averaging.
struct RunCurve {
    regret: Vec<f64>,
    rate: Vec<f64>,
}

impl Experiment {
    /// Validates the config and, for covertype streams, loads, shuffles,
    /// truncates and binarizes the dataset.
    pub fn prepare(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        match &config.stream {
            StreamSpec::Covertype {
                path,
                rows,
                shuffle_seed,
                ..
            } => {
                let file = match path {
                    Some(p) if p.exists() => p.clone(),
                    Some(p) => return Err(Error::MissingData { path: p.clone() }),
                    None => locate_covertype(&data_dir())?,
                };
                let mut raw = CovertypeDataset::load(&file)?;
                let shuffle_seed = shuffle_seed.unwrap_or(config.seed);
                raw.shuffle(shuffle_seed);
                if let Some(n) = rows {
                    raw.truncate(*n);
                }
                let scheme = raw.fit_binarizer()?;
                let encoded = EncodedDataset::encode(&raw, &scheme)?;
                let info = DatasetInfo {
                    source: file.display().to_string(),
                    rows: encoded.len(),
                    width: encoded.width(),
                    shuffle_seed,
                };
                Self::with_data(config, Arc::new(encoded), Some(info))
            }
            _ => Ok(Experiment {
                config,
                data: None,
                dataset: None,
            }),
        }
    }

    /// Uses an already encoded dataset for a covertype stream.
    pub fn with_data(
        config: ExperimentConfig,
        data: Arc<EncodedDataset>,
        dataset: Option<DatasetInfo>,
    ) -> Result<Self> {
        config.validate()?;
        if !matches!(config.stream, StreamSpec::Covertype { .. }) {
            return Err(Error::config(
                "stream.kind",
                "a dataset was given for a synthetic stream",
            ));
        }
        if data.is_empty() {
            return Err(Error::config("stream", "the dataset has no rows"));
        }
        Ok(Experiment {
            config,
            data: Some(data),
            dataset,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn dataset(&self) -> Option<&Arc<EncodedDataset>> {
        self.data.as_ref()
    }

    /// Where `run` starts in the dataset, drawn from the run seed.
    pub fn start_offset(&self, run: usize) -> Option<usize> {
        self.data.as_ref().map(|d| {
            seeding::rng(self.config.run_seed(run), seeding::RUN_STREAM).random_range(0..d.len())
        })
    }

    /// Seed of policy `index` in `run`.
    pub fn policy_seed(&self, run: usize, index: usize) -> u64 {
        seeding::derive(self.config.run_seed(run), index as u64)
    }

    pub fn stream(&self, run: usize) -> Result<Box<dyn EventSource>> {
        let seed = self.config.run_seed(run);
        let drift = self.config.stream.drift().copied();
        Ok(match &self.config.stream {
            StreamSpec::Covertype { .. } => {
                let data = self.data.clone().expect("covertype experiments hold data");
                let offset = self.start_offset(run).unwrap_or(0);
                Box::new(ReplayStream::new(data, offset, drift)?)
            }
            StreamSpec::Xor { noise_bits, .. } => {
                let s = XorStream::new(seed, *noise_bits);
                Box::new(match drift {
                    Some(d) => s.with_drift(d),
                    None => s,
                })
            }
            StreamSpec::Linear {
                input_bits, arms, ..
            } => {
                // The teacher is shared by every run; only the inputs vary.
                let s =
                    LinearStream::new(*input_bits, *arms, self.config.seed).with_input_seed(seed);
                Box::new(match drift {
                    Some(d) => s.with_drift(d),
                    None => s,
                })
            }
        })
    }

    pub fn policy(&self, run: usize, index: usize) -> Result<Box<dyn Policy>> {
        let spec = self
            .config
            .policies
            .get(index)
            .ok_or_else(|| Error::invalid(format!("no policy at index {index}")))?;
        let probe = self.stream(run)?;
        let (arms, dim) = (probe.arm_count(), probe.dim());
        let seed = self.policy_seed(run, index);
        let gamma = spec.gamma(self.config.gamma).unwrap_or(0.0);
        let gamma_model = spec.gamma_model(self.config.gamma_model).unwrap_or(0.0);
        Ok(match spec {
            PolicySpec::Random { .. } => Box::new(RandomPolicy::new(arms, dim, seed)?),
            PolicySpec::Banditron { .. } => Box::new(Banditron::new(arms, dim, gamma, seed)?),
            PolicySpec::NeuralBandit1 { lambda, hidden, .. } => Box::new(NeuralBandit1::new(
                PolicyConfig::new(arms, dim, *hidden)
                    .with_gamma(gamma)
                    .with_lambda(*lambda)
                    .with_seed(seed),
            )?),
            PolicySpec::NeuralBandit2 {
                hidden, lambdas, ..
            } => {
                let grid = ModelGrid::cartesian(hidden, lambdas, gamma, seed, arms, dim)?;
                Box::new(NeuralBandit2::new(grid, gamma_model)?)
            }
            PolicySpec::NeuralBandit3 {
                hidden, lambdas, ..
            } => {
                let grid = ModelGrid::cartesian(hidden, lambdas, gamma, seed, arms, dim)?;
                Box::new(NeuralBandit3::new(grid, gamma, gamma_model)?)
            }
        })
    }

    /// Full per-round record of one policy on one run.
    pub fn run_once(&self, run: usize, index: usize) -> Result<RunRecord> {
        let mut policy = self.policy(run, index)?;
        let mut stream = self.stream(run)?;
        let id = self.config.policies[index].id();
        let mut record = run_once(
            &id,
            &mut policy,
            &mut stream,
            &self.config.oracle,
            self.config.horizon,
            self.config.run_seed(run),
        )?;
        record.start_offset = self.start_offset(run);
        Ok(record)
    }

    /// Rounds at which curves are sampled.
    pub fn record_rounds(&self) -> Vec<u64> {
        let every = self.config.effective_record_every();
        let horizon = self.config.horizon;
        let mut rounds: Vec<u64> = (1..=horizon / every).map(|i| i * every).collect();
        if rounds.last() != Some(&horizon) {
            rounds.push(horizon);
        }
        rounds
    }

    fn run_curve(&self, run: usize, index: usize, rounds: &[u64]) -> Result<RunCurve> {
        let mut policy = self.policy(run, index)?;
        let mut stream = self.stream(run)?;
        let mut trailing = TrailingRate::new(self.config.effective_window() as usize);
        let mut curve = RunCurve {
            regret: Vec::with_capacity(rounds.len()),
            rate: Vec::with_capacity(rounds.len()),
        };
        let mut regret = 0.0;
        let mut next = 0;
        play(
            &mut policy,
            &mut stream,
            &self.config.oracle,
            self.config.horizon,
            self.config.run_seed(run),
            |s| {
                regret += s.oracle - s.reward;
                trailing.push(s.reward == 1.0);
                if next < rounds.len() && s.round + 1 == rounds[next] {
                    curve.regret.push(regret);
                    curve.rate.push(trailing.rate());
                    next += 1;
                }
            },
        )?;
        Ok(curve)
    }

    /// Runs every (run, policy) pair on `parallel` threads and averages
    /// across runs. Results do not depend on `parallel`.
    pub fn run(&self, parallel: usize) -> Result<ExperimentResult> {
        let rounds = self.record_rounds();
        let n_policies = self.config.policies.len();
        let jobs: Vec<(usize, usize)> = (0..self.config.runs)
            .flat_map(|r| (0..n_policies).map(move |p| (r, p)))
            .collect();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallel.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
        let curves: Vec<RunCurve> = pool.install(|| {
            jobs.par_iter()
                .map(|&(r, p)| self.run_curve(r, p, &rounds))
                .collect::<Result<Vec<_>>>()
        })?;

        let runs = self.config.runs;
        let mut out = Vec::with_capacity(n_policies);
        for (p, spec) in self.config.policies.iter().enumerate() {
            let per_run: Vec<&RunCurve> = (0..runs).map(|r| &curves[r * n_policies + p]).collect();
            let mut mean_regret = Vec::with_capacity(rounds.len());
            let mut std_regret = Vec::with_capacity(rounds.len());
            let mut mean_rate = Vec::with_capacity(rounds.len());
            for i in 0..rounds.len() {
                let regrets: Vec<f64> = per_run.iter().map(|c| c.regret[i]).collect();
                let (m, s) = mean_std(&regrets);
                mean_regret.push(m);
                std_regret.push(s);
                let rates: Vec<f64> = per_run.iter().map(|c| c.rate[i]).collect();
                mean_rate.push(mean_std(&rates).0);
            }
            out.push(Curve {
                policy: spec.id(),
                rounds: rounds.clone(),
                mean_regret,
                std_regret,
                mean_classification_rate: mean_rate,
            });
        }
        Ok(ExperimentResult {
            curves: out,
            manifest: self.manifest(),
        })
    }

    /// Everything needed to reproduce the run, without timestamps.
    pub fn manifest(&self) -> Manifest {
        let runs = (0..self.config.runs)
            .map(|r| RunManifest {
                run: r,
                seed: self.config.run_seed(r),
                start_offset: self.start_offset(r),
                policies: self
                    .config
                    .policies
                    .iter()
                    .enumerate()
                    .map(|(i, p)| PolicySeed {
                        id: p.id(),
                        seed: self.policy_seed(r, i),
                    })
                    .collect(),
            })
            .collect();
        Manifest {
            name: self.config.name.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: self.config.clone(),
            window: self.config.effective_window(),
            record_every: self.config.effective_record_every(),
            dataset: self.dataset.clone(),
            runs,
            warnings: self.config.warnings(),
        }
    }

    /// `<output>/<name>.csv` and `<output>/<name>.manifest.json`.
    pub fn output_paths(&self) -> (PathBuf, PathBuf) {
        let dir = &self.config.output;
        (
            dir.join(format!("{}.csv", self.config.name)),
            dir.join(format!("{}.manifest.json", self.config.name)),
        )
    }
}

/// Mean and sample standard deviation, summed in index order.
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
