use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::experiment::{Curve, ExperimentResult};
use crate::config::ExperimentConfig;
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 5] = [
    "round",
    "policy",
    "mean_regret",
    "std_regret",
    "mean_classification_rate",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub source: String,
    pub rows: usize,
    pub width: usize,
    pub shuffle_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicySeed {
    pub id: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start_offset: Option<usize>,
    pub policies: Vec<PolicySeed>,
}

/// Resolved configuration and every seed of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub window: u64,
    pub record_every: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<DatasetInfo>,
    pub runs: Vec<RunManifest>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Manifest {
    /// Every seed that influenced the results.
    pub fn seeds(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self.dataset.iter().map(|d| d.shuffle_seed).collect();
        for r in &self.runs {
            out.push(r.seed);
            out.extend(r.policies.iter().map(|p| p.seed));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub round: u64,
    pub policy: String,
    pub mean_regret: f64,
    pub std_regret: f64,
    pub mean_classification_rate: f64,
}

fn fmt(v: f64) -> String {
    // 17 significant digits: enough to round-trip any f64.
    format!("{v:.16e}")
}

/// Writes curves policy by policy, rounds ascending.
pub fn write_csv<W: Write>(curves: &[Curve], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_err = |e: csv::Error| Error::invalid(format!("CSV write failed: {e}"));
    w.write_record(CSV_HEADER).map_err(to_err)?;
    for c in curves {
        for i in 0..c.rounds.len() {
            w.write_record([
                c.rounds[i].to_string(),
                c.policy.clone(),
                fmt(c.mean_regret[i]),
                fmt(c.std_regret[i]),
                fmt(c.mean_classification_rate[i]),
            ])
            .map_err(to_err)?;
        }
    }
    w.flush()
        .map_err(|e| Error::invalid(format!("CSV write failed: {e}")))
}

pub fn parse_csv<R: Read>(input: R) -> Result<Vec<CurvePoint>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r
        .headers()
        .map_err(|e| Error::Data {
            location: "line 1".into(),
            message: e.to_string(),
        })?
        .clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Data {
            location: "line 1".into(),
            message: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let location = format!("line {}", i + 2);
        let rec = rec.map_err(|e| Error::Data {
            location: location.clone(),
            message: e.to_string(),
        })?;
        let bad = |what: &str| Error::Data {
            location: location.clone(),
            message: format!("bad {what}"),
        };
        let float = |j: usize, what: &str| rec[j].parse::<f64>().map_err(|_| bad(what));
        out.push(CurvePoint {
            round: rec[0].parse().map_err(|_| bad("round"))?,
            policy: rec[1].to_string(),
            mean_regret: float(2, "mean_regret")?,
            std_regret: float(3, "std_regret")?,
            mean_classification_rate: float(4, "mean_classification_rate")?,
        });
    }
    Ok(out)
}

/// Flattens curves into CSV rows in file order.
pub fn curve_points(curves: &[Curve]) -> Vec<CurvePoint> {
    curves
        .iter()
        .flat_map(|c| {
            (0..c.rounds.len()).map(move |i| CurvePoint {
                round: c.rounds[i],
                policy: c.policy.clone(),
                mean_regret: c.mean_regret[i],
                std_regret: c.std_regret[i],
                mean_classification_rate: c.mean_classification_rate[i],
            })
        })
        .collect()
}

impl ExperimentResult {
    pub fn csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        write_csv(&self.curves, &mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV is ASCII"))
    }

    /// Writes `<dir>/<name>.csv` and `<dir>/<name>.manifest.json`.
    pub fn write(&self, dir: &Path) -> Result<(std::path::PathBuf, std::path::PathBuf)> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let csv_path = dir.join(format!("{}.csv", self.manifest.name));
        let json_path = dir.join(format!("{}.manifest.json", self.manifest.name));
        fs::write(&csv_path, self.csv_string()?).map_err(|e| Error::io(&csv_path, e))?;
        fs::write(&json_path, self.manifest.to_json()?).map_err(|e| Error::io(&json_path, e))?;
        Ok((csv_path, json_path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve() -> Curve {
        Curve {
            policy: "nb".into(),
            rounds: vec![10, 20],
            mean_regret: vec![1.0 / 3.0, 2.5],
            std_regret: vec![0.0, 0.1 + 0.2],
            mean_classification_rate: vec![0.7, 1e-300],
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let curves = vec![curve()];
        let mut buf = Vec::new();
        write_csv(&curves, &mut buf).unwrap();
        let parsed = parse_csv(buf.as_slice()).unwrap();
        assert_eq!(parsed, curve_points(&curves));
    }

    #[test]
    fn csv_layout_is_fixed() {
        let mut buf = Vec::new();
        write_csv(&[curve()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("round,policy,mean_regret,std_regret,mean_classification_rate")
        );
        assert_eq!(
            lines.next(),
            Some("10,nb,3.3333333333333331e-1,0.0000000000000000e0,6.9999999999999996e-1")
        );
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(parse_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
