use std::sync::Arc;

use super::{labeled_event, Binarizer, CovertypeDataset, DriftSchedule, EventSource, StreamEvent};
use crate::{Context, Error, Result};

/// Binarized rows stored as the positions of their ones.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedDataset {
    width: usize,
    arm_count: usize,
    offsets: Vec<usize>,
    active: Vec<u32>,
    labels: Vec<usize>,
}

impl EncodedDataset {
    pub fn encode(data: &CovertypeDataset, scheme: &Binarizer) -> Result<Self> {
        Self::from_rows(data.rows(), data.labels(), super::COVERTYPE_ARMS, scheme)
    }

    pub fn from_rows<R: AsRef<[f64]>>(
        rows: &[R],
        labels: &[usize],
        arm_count: usize,
        scheme: &Binarizer,
    ) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::invalid("row and label counts differ"));
        }
        if let Some(l) = labels.iter().find(|l| **l >= arm_count) {
            return Err(Error::invalid(format!("label {l} outside 0..{arm_count}")));
        }
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let mut active = Vec::new();
        offsets.push(0);
        for row in rows {
            active.extend(
                scheme
                    .encode_active(row.as_ref())?
                    .into_iter()
                    .map(|i| i as u32),
            );
            offsets.push(active.len());
        }
        Ok(EncodedDataset {
            width: scheme.width(),
            arm_count,
            offsets,
            active,
            labels: labels.to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn arm_count(&self) -> usize {
        self.arm_count
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn context(&self, i: usize) -> Context {
        let mut values = vec![0.0; self.width];
        for &a in &self.active[self.offsets[i]..self.offsets[i + 1]] {
            values[a as usize] = 1.0;
        }
        Context::new(values).expect("binary context is finite")
    }
}

/// Plays a dataset in a loop starting at `start_offset`, optionally with
/// label drift.
#[derive(Debug, Clone)]
pub struct ReplayStream {
    data: Arc<EncodedDataset>,
    start_offset: usize,
    round: u64,
    drift: Option<DriftSchedule>,
}

impl ReplayStream {
    pub fn new(
        data: Arc<EncodedDataset>,
        start_offset: usize,
        drift: Option<DriftSchedule>,
    ) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::invalid("cannot stream an empty dataset"));
        }
        if let Some(d) = &drift {
            d.validate()?;
        }
        Ok(ReplayStream {
            start_offset: start_offset % data.len(),
            data,
            round: 0,
            drift,
        })
    }

    pub fn start_offset(&self) -> usize {
        self.start_offset
    }

    /// Row index played at `round`.
    pub fn row_at(&self, round: u64) -> usize {
        ((self.start_offset as u64 + round) % self.data.len() as u64) as usize
    }
}

impl EventSource for ReplayStream {
    fn arm_count(&self) -> usize {
        self.data.arm_count
    }

    fn dim(&self) -> usize {
        self.data.width
    }

    fn next_event(&mut self) -> StreamEvent {
        let row = self.row_at(self.round);
        let event = labeled_event(
            self.round,
            self.data.context(row),
            self.data.label(row),
            self.data.arm_count,
            self.drift.as_ref(),
        );
        self.round += 1;
        event
    }
}
