//! Sliding-window assembly of `(features, window, entities)` sample tensors
//! and chronological train/validation/test splitting.

use mgtn_core::DenseTensor;

use crate::error::{DataError, Result};
use crate::table::NumericTable;

/// Aligned inputs and targets with layout metadata. `timestamps[i]` is the
/// target time of sample `i`, so chronological order is sample order.
#[derive(Debug, Clone, Default)]
pub struct SampleSet {
    pub inputs: Vec<DenseTensor>,
    pub targets: Vec<DenseTensor>,
    pub timestamps: Vec<i64>,
    pub feature_names: Vec<String>,
    pub entity_names: Vec<String>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs.len() != self.targets.len() || self.inputs.len() != self.timestamps.len() {
            return Err(DataError::Invariant(format!(
                "lengths differ: {} inputs, {} targets, {} timestamps",
                self.inputs.len(),
                self.targets.len(),
                self.timestamps.len()
            )));
        }
        if let Some(first) = self.inputs.first() {
            for (i, x) in self.inputs.iter().enumerate() {
                if x.shape() != first.shape() {
                    return Err(DataError::Invariant(format!(
                        "sample {i} shape {:?} differs from {:?}",
                        x.shape(),
                        first.shape()
                    )));
                }
                if !x.is_finite() {
                    return Err(DataError::Invariant(format!("sample {i} has non-finite entries")));
                }
            }
            for (i, y) in self.targets.iter().enumerate() {
                if !y.is_finite() {
                    return Err(DataError::Invariant(format!("target {i} has non-finite entries")));
                }
            }
        }
        Ok(())
    }

    fn slice(&self, range: std::ops::Range<usize>) -> SampleSet {
        SampleSet {
            inputs: self.inputs[range.clone()].to_vec(),
            targets: self.targets[range.clone()].to_vec(),
            timestamps: self.timestamps[range].to_vec(),
            feature_names: self.feature_names.clone(),
            entity_names: self.entity_names.clone(),
        }
    }
}

/// What the target vector of a window is.
#[derive(Debug, Clone)]
pub enum TargetSpec {
    /// Value of one feature at the horizon step, one entry per entity.
    NextValues { feature: usize },
    /// Per-entity labels read at the last window step;
    /// `labels[t * entities + e]`.
    EntityLabels { labels: Vec<f64> },
}

/// Slides a window of `window` steps with stride one over the table; the
/// target sits `horizon` steps past the window end.
pub fn window_tensorize(
    table: &NumericTable,
    window: usize,
    horizon: usize,
    target: &TargetSpec,
) -> Result<SampleSet> {
    let t_len = table.time_len();
    let (f_len, e_len) = (table.feature_count(), table.entity_count());
    if window == 0 || window + horizon > t_len {
        return Err(DataError::WindowTooLarge {
            window,
            horizon,
            len: t_len,
        });
    }
    let count = t_len - window - horizon + 1;
    let mut inputs = Vec::with_capacity(count);
    let mut targets = Vec::with_capacity(count);
    let mut timestamps = Vec::with_capacity(count);
    for s in 0..count {
        let mut x = DenseTensor::zeros(&[f_len, window, e_len]);
        for f in 0..f_len {
            for (w, t) in (s..s + window).enumerate() {
                for e in 0..e_len {
                    x.set(&[f, w, e], table.value(f, t, e));
                }
            }
        }
        inputs.push(x);
        let target_time = s + window + horizon - 1;
        let y = match target {
            TargetSpec::NextValues { feature } => {
                let mut y = DenseTensor::zeros(&[e_len]);
                for e in 0..e_len {
                    y.data_mut()[e] = table.value(*feature, target_time, e);
                }
                y
            }
            TargetSpec::EntityLabels { labels } => {
                let label_time = s + window - 1;
                let mut y = DenseTensor::zeros(&[e_len]);
                for e in 0..e_len {
                    y.data_mut()[e] = labels[label_time * e_len + e];
                }
                y
            }
        };
        targets.push(y);
        timestamps.push(table.timestamps[target_time]);
    }
    let set = SampleSet {
        inputs,
        targets,
        timestamps,
        feature_names: table.feature_names.clone(),
        entity_names: table.entities.clone(),
    };
    set.validate()?;
    Ok(set)
}

#[derive(Debug, Clone, Copy)]
pub enum SplitScheme {
    /// Leading `train_frac` of samples for training (of which the trailing
    /// `val_frac` validates), the rest for testing.
    Fraction { train_frac: f64, val_frac: f64 },
    /// Train strictly before the boundary timestamp, test from it onward.
    AtTimestamp { boundary: i64, val_frac: f64 },
}

/// Contiguous chronological split; timestamps never interleave.
pub fn split(samples: &SampleSet, scheme: SplitScheme) -> Result<(SampleSet, SampleSet, SampleSet)> {
    let n = samples.len();
    let (train_end, val_frac) = match scheme {
        SplitScheme::Fraction {
            train_frac,
            val_frac,
        } => ((n as f64 * train_frac).floor() as usize, val_frac),
        SplitScheme::AtTimestamp { boundary, val_frac } => {
            let idx = samples
                .timestamps
                .iter()
                .position(|&t| t >= boundary)
                .unwrap_or(n);
            (idx, val_frac)
        }
    };
    let val_len = (train_end as f64 * val_frac).floor() as usize;
    let fit_end = train_end - val_len.min(train_end);
    if fit_end == 0 {
        return Err(DataError::EmptySplit("train"));
    }
    if train_end >= n {
        return Err(DataError::EmptySplit("test"));
    }
    Ok((
        samples.slice(0..fit_end),
        samples.slice(fit_end..train_end),
        samples.slice(train_end..n),
    ))
}
