//! UCI Forest Cover Type data.
//!
//! The file has 581,012 rows of 55 comma-separated integers: 10 continuous
//! measurements, 4 wilderness-area indicators, 40 soil-type indicators and
//! the cover type label 1-7. Binarizing the continuous columns into five
//! equal-frequency bins and passing the 44 indicators through gives 94
//! binary context features.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;

use super::binarize::{Binarizer, ColumnKind};
use crate::seeding;
use crate::{Error, Result};

/// Feature columns per row (the label is a 55th column).
pub const COVERTYPE_COLUMNS: usize = 54;
/// Leading continuous columns; the rest are 0/1 indicators.
pub const COVERTYPE_CONTINUOUS: usize = 10;
pub const COVERTYPE_ARMS: usize = 7;
pub const COVERTYPE_URL: &str =
    "https://archive.ics.uci.edu/ml/machine-learning-databases/covtype/covtype.data.gz";
/// Environment variable naming the directory that holds `covtype.data[.gz]`.
pub const DATA_DIR_ENV: &str = "NEURALBANDIT_DATA_DIR";

const FILE_NAMES: [&str; 2] = ["covtype.data.gz", "covtype.data"];

const WILDERNESS: usize = 4;
const SOIL: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct CovertypeDataset {
    rows: Vec<Vec<f64>>,
    /// 0-based: cover type 1 is label 0.
    labels: Vec<usize>,
    shuffle_seed: Option<u64>,
}

/// `$NEURALBANDIT_DATA_DIR`, or `./data` when unset.
pub fn data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data"))
}

/// Finds `covtype.data.gz` or `covtype.data` in `dir`.
pub fn locate_covertype(dir: &Path) -> Result<PathBuf> {
    FILE_NAMES
        .iter()
        .map(|name| dir.join(name))
        .find(|p| p.is_file())
        .ok_or_else(|| Error::MissingData {
            path: dir.join(FILE_NAMES[0]),
        })
}

/// Downloads the compressed dataset into `dir` and checks that it parses.
/// Returns the path of the downloaded file.
pub fn fetch_covertype(dir: &Path, url: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let target = dir.join(FILE_NAMES[0]);
    let partial = dir.join("covtype.data.gz.part");
    let mut body = ureq::get(url)
        .call()
        .map_err(|e| Error::Download(format!("{url}: {e}")))?
        .into_body()
        .into_reader();
    let mut out = File::create(&partial).map_err(|e| Error::io(&partial, e))?;
    std::io::copy(&mut body, &mut out).map_err(|e| Error::io(&partial, e))?;
    out.flush().map_err(|e| Error::io(&partial, e))?;
    drop(out);
    let data = CovertypeDataset::load(&partial)?;
    if data.is_empty() {
        return Err(Error::Download("downloaded file has no rows".into()));
    }
    std::fs::rename(&partial, &target).map_err(|e| Error::io(&target, e))?;
    Ok(target)
}

impl CovertypeDataset {
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::invalid("row and label counts differ"));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != COVERTYPE_COLUMNS) {
            return Err(Error::invalid(format!(
                "row {i} has {} features, expected {COVERTYPE_COLUMNS}",
                rows[i].len()
            )));
        }
        if let Some(l) = labels.iter().find(|l| **l >= COVERTYPE_ARMS) {
            return Err(Error::invalid(format!(
                "label {l} outside 0..{COVERTYPE_ARMS}"
            )));
        }
        Ok(CovertypeDataset {
            rows,
            labels,
            shuffle_seed: None,
        })
    }

    /// Reads the UCI CSV layout, gzip-compressed when the name ends in `.gz`.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::MissingData {
                    path: path.to_path_buf(),
                }
            } else {
                Error::io(path, e)
            }
        })?;
        let reader: Box<dyn Read> = if path.extension().is_some_and(|e| e == "gz") {
            Box::new(flate2::read::GzDecoder::new(BufReader::new(file)))
        } else {
            Box::new(BufReader::new(file))
        };
        Self::read_csv(reader, &path.display().to_string())
    }

    pub fn read_csv<R: Read>(reader: R, source: &str) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (i, record) in csv.records().enumerate() {
            let location = || format!("{source}:{}", i + 1);
            let record = record.map_err(|e| Error::Data {
                location: location(),
                message: e.to_string(),
            })?;
            if record.len() != COVERTYPE_COLUMNS + 1 {
                return Err(Error::Data {
                    location: location(),
                    message: format!(
                        "expected {} fields, found {}",
                        COVERTYPE_COLUMNS + 1,
                        record.len()
                    ),
                });
            }
            let mut row = Vec::with_capacity(COVERTYPE_COLUMNS);
            for field in record.iter().take(COVERTYPE_COLUMNS) {
                let v: f64 = field.parse().map_err(|_| Error::Data {
                    location: location(),
                    message: format!("`{field}` is not a number"),
                })?;
                row.push(v);
            }
            let label: usize = record[COVERTYPE_COLUMNS].parse().map_err(|_| Error::Data {
                location: location(),
                message: format!("label `{}` is not an integer", &record[COVERTYPE_COLUMNS]),
            })?;
            if !(1..=COVERTYPE_ARMS).contains(&label) {
                return Err(Error::Data {
                    location: location(),
                    message: format!("label {label} outside 1..={COVERTYPE_ARMS}"),
                });
            }
            rows.push(row);
            labels.push(label - 1);
        }
        Ok(CovertypeDataset {
            rows,
            labels,
            shuffle_seed: None,
        })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_path(path)
            .map_err(|e| Error::io(path, e.into()))?;
        for (row, label) in self.rows.iter().zip(&self.labels) {
            let mut fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            fields.push((label + 1).to_string());
            w.write_record(&fields)
                .map_err(|e| Error::io(path, e.into()))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Column kinds of the UCI layout.
    pub fn column_kinds() -> Vec<ColumnKind> {
        let mut kinds = vec![ColumnKind::Continuous; COVERTYPE_CONTINUOUS];
        kinds.resize(COVERTYPE_COLUMNS, ColumnKind::Binary);
        kinds
    }

    pub fn fit_binarizer(&self) -> Result<Binarizer> {
        Binarizer::fit(&self.rows, &Self::column_kinds())
    }

    /// Permutes the rows once, recording the seed.
    pub fn shuffle(&mut self, seed: u64) {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.shuffle(&mut seeding::rng(seed, seeding::SHUFFLE_STREAM));
        let rows = std::mem::take(&mut self.rows);
        let labels = std::mem::take(&mut self.labels);
        let mut slots: Vec<Option<Vec<f64>>> = rows.into_iter().map(Some).collect();
        self.rows = order
            .iter()
            .map(|&i| slots[i].take().expect("permutation"))
            .collect();
        self.labels = order.iter().map(|&i| labels[i]).collect();
        self.shuffle_seed = Some(seed);
    }

    /// Keeps the first `n` rows.
    pub fn truncate(&mut self, n: usize) {
        self.rows.truncate(n);
        self.labels.truncate(n);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn shuffle_seed(&self) -> Option<u64> {
        self.shuffle_seed
    }

    /// Synthetic rows in the UCI layout, for tests and demos when the real
    /// file is not available. This is *not* covertype data.
    ///
    /// Continuous columns are real-valued (no ties). Each row has exactly one
    /// wilderness and one soil indicator set. The label depends on an
    /// elevation band, the wilderness area and a few soil types, with 10%
    /// uniform label noise, so it is learnable but not linearly separable.
    pub fn synthetic(n: usize, seed: u64) -> Self {
        let mut rng = seeding::rng(seed, seeding::SYNTHETIC_STREAM);
        let shift = [0usize, 2, 3, 5];
        let mut rows = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let elevation: f64 = rng.random_range(1850.0..3860.0);
            let aspect: f64 = rng.random_range(0.0..360.0);
            let slope: f64 = rng.random_range(0.0..66.0);
            let hydro_h: f64 = rng.random_range(0.0..1400.0);
            let hydro_v: f64 = hydro_h * 0.2 + rng.random_range(-170.0..200.0);
            let roads: f64 = rng.random_range(0.0..7120.0);
            let shade_9: f64 = rng.random_range(0.0..255.0);
            let shade_noon: f64 = 255.0 - 0.5 * slope - rng.random_range(0.0..60.0);
            let shade_3: f64 = (shade_noon - shade_9 * 0.3).max(0.0) + rng.random_range(0.0..1.0);
            let fire: f64 = rng.random_range(0.0..7175.0);
            let wilderness = rng.random_range(0..WILDERNESS);
            let soil = rng.random_range(0..SOIL);

            let band = (((elevation - 1850.0) / (3860.0 - 1850.0)) * 7.0) as usize;
            let mut label = (band.min(6) + shift[wilderness]) % COVERTYPE_ARMS;
            if soil < 4 && slope > 33.0 {
                label = 6 - soil;
            } else if roads < 700.0 && fire < 1500.0 {
                label = (label + 3) % COVERTYPE_ARMS;
            }
            if rng.random::<f64>() < 0.1 {
                label = rng.random_range(0..COVERTYPE_ARMS);
            }

            let mut row = vec![
                elevation, aspect, slope, hydro_h, hydro_v, roads, shade_9, shade_noon, shade_3,
                fire,
            ];
            row.resize(COVERTYPE_COLUMNS, 0.0);
            row[COVERTYPE_CONTINUOUS + wilderness] = 1.0;
            row[COVERTYPE_CONTINUOUS + WILDERNESS + soil] = 1.0;
            rows.push(row);
            labels.push(label);
        }
        CovertypeDataset {
            rows,
            labels,
            shuffle_seed: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(values: &[i64], label: i64) -> String {
        let mut fields: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        fields.push(label.to_string());
        fields.join(",")
    }

    fn uci_row(i: i64) -> Vec<i64> {
        let mut v = vec![2596 + i, 51, 3, 258, 0, 510, 221, 232, 148, 6279];
        v.resize(COVERTYPE_COLUMNS, 0);
        v[10 + (i as usize % 4)] = 1;
        v[14 + (i as usize % 40)] = 1;
        v
    }

    #[test]
    fn parses_uci_layout() {
        let text = (0..6)
            .map(|i| line(&uci_row(i), 1 + i % 7))
            .collect::<Vec<_>>()
            .join("\n");
        let d = CovertypeDataset::read_csv(text.as_bytes(), "mem").unwrap();
        assert_eq!(d.len(), 6);
        assert_eq!(d.labels(), &[0, 1, 2, 3, 4, 5]);
        assert_eq!(d.rows()[0][0], 2596.0);
    }

    #[test]
    fn reports_bad_lines() {
        let bad_label = line(&uci_row(0), 8);
        let err = CovertypeDataset::read_csv(bad_label.as_bytes(), "mem").unwrap_err();
        assert!(err.to_string().contains("mem:1"), "{err}");
        let short = "1,2,3";
        assert!(CovertypeDataset::read_csv(short.as_bytes(), "mem").is_err());
        let text = format!(
            "{}\n{}",
            line(&uci_row(0), 1),
            line(&uci_row(1), 1).replace("51", "x")
        );
        let err = CovertypeDataset::read_csv(text.as_bytes(), "mem").unwrap_err();
        assert!(err.to_string().contains("mem:2"), "{err}");
    }

    #[test]
    fn reads_gzip_and_plain_files() {
        let dir = tempfile::tempdir().unwrap();
        let synthetic = CovertypeDataset::synthetic(50, 1);
        let plain = dir.path().join("covtype.data");
        synthetic.write_csv(&plain).unwrap();
        let gz = dir.path().join("covtype.data.gz");
        let mut enc =
            flate2::write::GzEncoder::new(File::create(&gz).unwrap(), flate2::Compression::fast());
        enc.write_all(&std::fs::read(&plain).unwrap()).unwrap();
        enc.finish().unwrap();
        let a = CovertypeDataset::load(&plain).unwrap();
        let b = CovertypeDataset::load(&gz).unwrap();
        assert_eq!(a, synthetic);
        assert_eq!(a, b);
        assert_eq!(locate_covertype(dir.path()).unwrap(), gz);
    }

    #[test]
    fn missing_file_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            locate_covertype(dir.path()),
            Err(Error::MissingData { .. })
        ));
        assert!(matches!(
            CovertypeDataset::load(&dir.path().join("nope.data")),
            Err(Error::MissingData { .. })
        ));
    }

    #[test]
    fn uci_layout_binarizes_to_94_features() {
        let d = CovertypeDataset::synthetic(500, 3);
        let b = d.fit_binarizer().unwrap();
        assert_eq!(b.width(), 94);
        for row in d.rows().iter().take(50) {
            let active = b.encode_active(row).unwrap();
            assert_eq!(active.len(), 12);
            assert_eq!(active.iter().filter(|&&i| i < 50).count(), 10);
        }
    }

    #[test]
    fn shuffle_is_a_recorded_permutation() {
        let mut d = CovertypeDataset::synthetic(100, 4);
        let original = d.clone();
        d.shuffle(9);
        assert_eq!(d.shuffle_seed(), Some(9));
        assert_ne!(d.rows(), original.rows());
        let mut a: Vec<_> = d
            .rows()
            .iter()
            .zip(d.labels())
            .map(|(r, l)| (r[0].to_bits(), *l))
            .collect();
        let mut b: Vec<_> = original
            .rows()
            .iter()
            .zip(original.labels())
            .map(|(r, l)| (r[0].to_bits(), *l))
            .collect();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
        let mut again = original.clone();
        again.shuffle(9);
        assert_eq!(again, d);
    }
}
