//! Equal-frequency binarization of tabular rows.
//!
//! Continuous columns are cut at their empirical 20/40/60/80 percentiles and
//! expanded to five indicators. The cut for quantile `q` is the value at
//! 1-based rank `ceil(q * n)` of the sorted column. Bins are left-closed, so a
//! value equal to a cut lands in the upper bin; the last bin is closed.
//!
//! When ties make cuts coincide, duplicates are merged, and a cut equal to
//! the column minimum is dropped (its lower bin would be empty). The bin of a
//! value is then the number of remaining cuts not above it, so a constant
//! column always lands in bin 0. Each continuous column keeps exactly five
//! output slots regardless; merged bins are simply never hot.

use serde::{Deserialize, Serialize};

use crate::{Context, Error, Result};

/// Indicators per continuous column.
pub const BINS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnKind {
    /// Cut into [`BINS`] equal-frequency bins.
    Continuous,
    /// Already a 0/1 indicator; passed through as one slot.
    Binary,
    /// Discrete values, one slot per category seen while fitting.
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ColumnEncoding {
    Quantile {
        /// The four percentile cuts, nondecreasing, before merging.
        cuts: [f64; BINS - 1],
        /// Distinct cuts above the column minimum, ascending.
        effective: Vec<f64>,
    },
    Binary,
    OneHot {
        categories: Vec<f64>,
    },
}

impl ColumnEncoding {
    fn width(&self) -> usize {
        match self {
            ColumnEncoding::Quantile { .. } => BINS,
            ColumnEncoding::Binary => 1,
            ColumnEncoding::OneHot { categories } => categories.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Binarizer {
    columns: Vec<ColumnEncoding>,
    offsets: Vec<usize>,
    width: usize,
    warnings: Vec<String>,
}

impl Binarizer {
    /// Fits a scheme on `rows`, where `kinds[c]` describes column `c`.
    pub fn fit<R: AsRef<[f64]>>(rows: &[R], kinds: &[ColumnKind]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("cannot fit a binarization on zero rows"));
        }
        if let Some(i) = rows.iter().position(|r| r.as_ref().len() != kinds.len()) {
            return Err(Error::invalid(format!(
                "row {i} has {} values, expected {}",
                rows[i].as_ref().len(),
                kinds.len()
            )));
        }
        let mut warnings = Vec::new();
        let mut columns = Vec::with_capacity(kinds.len());
        let mut column: Vec<f64> = Vec::with_capacity(rows.len());
        for (c, kind) in kinds.iter().enumerate() {
            column.clear();
            column.extend(rows.iter().map(|r| r.as_ref()[c]));
            if column.iter().any(|v| v.is_nan()) {
                return Err(Error::invalid(format!("column {c} contains NaN")));
            }
            let encoding = match kind {
                ColumnKind::Continuous => {
                    column.sort_by(f64::total_cmp);
                    let n = column.len();
                    let mut cuts = [0.0; BINS - 1];
                    for (j, cut) in cuts.iter_mut().enumerate() {
                        // 1-based rank ceil((j + 1) * n / 5), in integer arithmetic.
                        let rank = ((j + 1) * n).div_ceil(BINS).max(1);
                        *cut = column[rank - 1];
                    }
                    let min = column[0];
                    let mut effective: Vec<f64> =
                        cuts.iter().cloned().filter(|c| *c > min).collect();
                    effective.dedup();
                    if effective.len() < BINS - 1 {
                        let mut distinct = column.clone();
                        distinct.dedup();
                        warnings.push(format!(
                            "column {c}: {} distinct values give {} usable bins instead of {BINS}",
                            distinct.len(),
                            effective.len() + 1
                        ));
                    }
                    ColumnEncoding::Quantile { cuts, effective }
                }
                ColumnKind::Binary => {
                    if let Some(v) = column.iter().find(|v| **v != 0.0 && **v != 1.0) {
                        return Err(Error::invalid(format!(
                            "binary column {c} contains value {v}"
                        )));
                    }
                    ColumnEncoding::Binary
                }
                ColumnKind::Categorical => {
                    column.sort_by(f64::total_cmp);
                    column.dedup();
                    ColumnEncoding::OneHot {
                        categories: column.clone(),
                    }
                }
            };
            columns.push(encoding);
        }
        let mut offsets = Vec::with_capacity(columns.len());
        let mut width = 0;
        for col in &columns {
            offsets.push(width);
            width += col.width();
        }
        Ok(Binarizer {
            columns,
            offsets,
            width,
            warnings,
        })
    }

    /// Output dimension.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn columns(&self) -> &[ColumnEncoding] {
        &self.columns
    }

    /// Notes about degenerate columns found while fitting.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Bin index of `value` in a continuous column.
    pub fn bin(effective: &[f64], value: f64) -> usize {
        effective.partition_point(|cut| *cut <= value)
    }

    /// Positions of the ones in the encoded row, ascending.
    pub fn encode_active(&self, row: &[f64]) -> Result<Vec<usize>> {
        if row.len() != self.columns.len() {
            return Err(Error::invalid(format!(
                "row has {} values, scheme expects {}",
                row.len(),
                self.columns.len()
            )));
        }
        let mut active = Vec::with_capacity(self.columns.len());
        for (c, (col, &v)) in self.columns.iter().zip(row).enumerate() {
            if v.is_nan() {
                return Err(Error::invalid(format!("column {c} is NaN")));
            }
            let base = self.offsets[c];
            match col {
                ColumnEncoding::Quantile { effective, .. } => {
                    active.push(base + Self::bin(effective, v));
                }
                ColumnEncoding::Binary => {
                    if v == 1.0 {
                        active.push(base);
                    } else if v != 0.0 {
                        return Err(Error::invalid(format!("binary column {c} has value {v}")));
                    }
                }
                ColumnEncoding::OneHot { categories } => {
                    let idx = categories
                        .binary_search_by(|x| x.total_cmp(&v))
                        .map_err(|_| Error::invalid(format!("column {c}: unknown category {v}")))?;
                    active.push(base + idx);
                }
            }
        }
        Ok(active)
    }

    pub fn encode(&self, row: &[f64]) -> Result<Context> {
        Context::from_active(self.width, &self.encode_active(row)?)
    }

    /// Rows per bin of continuous column `c` over `rows`.
    pub fn bin_counts<R: AsRef<[f64]>>(&self, rows: &[R], c: usize) -> Option<[usize; BINS]> {
        let ColumnEncoding::Quantile { effective, .. } = self.columns.get(c)? else {
            return None;
        };
        let mut counts = [0; BINS];
        for r in rows {
            counts[Self::bin(effective, r.as_ref()[c])] += 1;
        }
        Some(counts)
    }
}
