//! Feature encoding: one-hot expansion of categorical columns, sinusoidal
//! month encoding, and train-fitted standardization.

use std::f64::consts::TAU;

use mgtn_core::DenseTensor;

use crate::error::{DataError, Result};
use crate::table::{ColumnData, NumericTable, RawTable};
use crate::window::SampleSet;

/// Categorical-to-indicator mapping fixed at fit time; values never seen
/// during fitting encode as all zeros and bump the warning counter.
#[derive(Debug, Clone)]
pub struct OneHotEncoder {
    pub column: String,
    pub categories: Vec<String>,
    pub unseen_warnings: usize,
}

impl OneHotEncoder {
    pub fn fit(column: &str, values: impl IntoIterator<Item = String>) -> Self {
        let mut categories = Vec::new();
        for v in values {
            if !v.is_empty() && !categories.contains(&v) {
                categories.push(v);
            }
        }
        Self {
            column: column.to_string(),
            categories,
            unseen_warnings: 0,
        }
    }

    pub fn width(&self) -> usize {
        self.categories.len()
    }

    pub fn transform(&mut self, value: &str) -> Vec<f64> {
        let mut out = vec![0.0; self.categories.len()];
        match self.categories.iter().position(|c| c == value) {
            Some(i) => out[i] = 1.0,
            None => self.unseen_warnings += 1,
        }
        out
    }
}

/// Sinusoidal encoding of a calendar month with period 12.
pub fn month_sin(month: u32) -> f64 {
    (TAU * month as f64 / 12.0).sin()
}

pub fn month_cos(month: u32) -> f64 {
    (TAU * month as f64 / 12.0).cos()
}

#[derive(Debug, Clone, Default)]
pub struct EncodeOptions {
    /// Columns to expand into indicators.
    pub one_hot: Vec<String>,
    /// Append `sin(2 pi month / 12)` as an extra feature; needs months.
    pub append_month_sin: bool,
    /// Append the cosine companion as well.
    pub append_month_cos: bool,
}

/// Expands a raw table into a purely numeric one. Returns the table and the
/// fitted encoders (carrying any unseen-category warnings).
pub fn encode_features(
    table: &RawTable,
    options: &EncodeOptions,
) -> Result<(NumericTable, Vec<OneHotEncoder>)> {
    table.validate()?;
    let (t_len, e_len) = (table.time_len(), table.entity_count());
    let mut feature_names = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut encoders = Vec::new();

    for col in &table.columns {
        match &col.data {
            ColumnData::Numeric(data) => {
                feature_names.push(col.name.clone());
                values.extend_from_slice(data);
            }
            ColumnData::Categorical(data) => {
                if !options.one_hot.contains(&col.name) {
                    return Err(DataError::Inconsistent(format!(
                        "categorical column {:?} has no one-hot rule",
                        col.name
                    )));
                }
                let mut encoder = OneHotEncoder::fit(&col.name, data.iter().cloned());
                let width = encoder.width();
                let mut expanded = vec![0.0; width * t_len * e_len];
                for t in 0..t_len {
                    for e in 0..e_len {
                        let one = encoder.transform(&data[t * e_len + e]);
                        for (k, &v) in one.iter().enumerate() {
                            expanded[(k * t_len + t) * e_len + e] = v;
                        }
                    }
                }
                for k in 0..width {
                    feature_names.push(format!("{}={}", col.name, encoder.categories[k]));
                }
                values.extend(expanded);
                encoders.push(encoder);
            }
        }
    }

    if options.append_month_sin || options.append_month_cos {
        let months = table.months.as_ref().ok_or_else(|| {
            DataError::Inconsistent("month encoding requested but table has no months".into())
        })?;
        if options.append_month_sin {
            feature_names.push("month_sin".into());
            for t in 0..t_len {
                let v = month_sin(months[t]);
                for _ in 0..e_len {
                    values.push(v);
                }
            }
        }
        if options.append_month_cos {
            feature_names.push("month_cos".into());
            for t in 0..t_len {
                let v = month_cos(months[t]);
                for _ in 0..e_len {
                    values.push(v);
                }
            }
        }
    }

    Ok((
        NumericTable::new(
            feature_names,
            table.timestamps.clone(),
            table.entities.clone(),
            values,
        )?,
        encoders,
    ))
}

/// Per-channel affine statistics fitted on training data only.
#[derive(Debug, Clone)]
pub struct Scaler {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Scaler {
    /// Fits one mean/std per leading-mode channel of the sample tensors
    /// (for inputs that is the feature mode).
    pub fn fit_channels(samples: &[DenseTensor]) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| DataError::Invariant("cannot fit a scaler on no samples".into()))?;
        let channels = first.shape().first().copied().unwrap_or(1);
        let per: usize = first.len() / channels;
        let mut means = vec![0.0; channels];
        let mut count = 0usize;
        for s in samples {
            for c in 0..channels {
                for r in 0..per {
                    // channel is the fastest-varying mode: index c + channels*r
                    means[c] += s.data()[c + channels * r];
                }
            }
            count += per;
        }
        for m in &mut means {
            *m /= count as f64;
        }
        let mut vars = vec![0.0; channels];
        for s in samples {
            for c in 0..channels {
                for r in 0..per {
                    let d = s.data()[c + channels * r] - means[c];
                    vars[c] += d * d;
                }
            }
        }
        let stds = vars
            .iter()
            .map(|v| {
                let sd = (v / count as f64).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Self { means, stds })
    }

    /// Fits one mean/std per flat entry position (used for target vectors).
    pub fn fit_flat(samples: &[DenseTensor]) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| DataError::Invariant("cannot fit a scaler on no samples".into()))?;
        let width = first.len();
        let mut means = vec![0.0; width];
        for s in samples {
            for (i, &v) in s.data().iter().enumerate() {
                means[i] += v;
            }
        }
        for m in &mut means {
            *m /= samples.len() as f64;
        }
        let mut vars = vec![0.0; width];
        for s in samples {
            for (i, &v) in s.data().iter().enumerate() {
                let d = v - means[i];
                vars[i] += d * d;
            }
        }
        let stds = vars
            .iter()
            .map(|v| {
                let sd = (v / samples.len() as f64).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Self { means, stds })
    }

    pub fn transform_channels(&self, t: &DenseTensor) -> DenseTensor {
        let channels = self.means.len();
        let mut out = t.clone();
        let per = t.len() / channels;
        for c in 0..channels {
            for r in 0..per {
                let idx = c + channels * r;
                out.data_mut()[idx] = (out.data_mut()[idx] - self.means[c]) / self.stds[c];
            }
        }
        out
    }

    pub fn transform_flat(&self, t: &DenseTensor) -> DenseTensor {
        let mut out = t.clone();
        for (i, v) in out.data_mut().iter_mut().enumerate() {
            *v = (*v - self.means[i]) / self.stds[i];
        }
        out
    }
}

/// Standardizes a split in place: input channels and flat targets are both
/// scaled by statistics fitted on the training partition only.
pub fn standardize_splits(
    train: &mut SampleSet,
    val: &mut SampleSet,
    test: &mut SampleSet,
) -> Result<(Scaler, Scaler)> {
    let input_scaler = Scaler::fit_channels(&train.inputs)?;
    let target_scaler = Scaler::fit_flat(&train.targets)?;
    for set in [train, val, test] {
        for x in &mut set.inputs {
            *x = input_scaler.transform_channels(x);
        }
        for y in &mut set.targets {
            *y = target_scaler.transform_flat(y);
        }
    }
    Ok((input_scaler, target_scaler))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn month_twelve_equals_month_zero() {
        assert!((month_sin(12) - month_sin(0)).abs() < 1e-12);
        assert!((month_cos(12) - month_cos(0)).abs() < 1e-12);
        // Quarter phase: month 3 peaks the sine, zeroes the cosine.
        assert!((month_sin(3) - 1.0).abs() < 1e-12);
        assert!(month_cos(3).abs() < 1e-12);
    }

    #[test]
    fn one_hot_rows_sum_to_one_for_seen_categories() {
        let mut enc = OneHotEncoder::fit(
            "c",
            ["a", "b", "c"].into_iter().map(String::from),
        );
        assert_eq!(enc.width(), 3);
        for v in ["a", "b", "c"] {
            let row = enc.transform(v);
            assert_eq!(row.iter().sum::<f64>(), 1.0);
        }
        assert_eq!(enc.unseen_warnings, 0);
    }

    #[test]
    fn unseen_category_encodes_to_zeros_with_warning() {
        let mut enc = OneHotEncoder::fit("c", ["a".to_string(), "b".to_string()]);
        let row = enc.transform("zz");
        assert!(row.iter().all(|&v| v == 0.0));
        assert_eq!(enc.unseen_warnings, 1);
    }

    #[test]
    fn scaler_normalizes_training_channels() {
        let samples: Vec<DenseTensor> = (0..10)
            .map(|i| {
                DenseTensor::new(
                    vec![2, 3],
                    (0..6).map(|k| (i * 7 + k * 3) as f64 * 0.25 + 1.0).collect(),
                )
                .unwrap()
            })
            .collect();
        let scaler = Scaler::fit_channels(&samples).unwrap();
        let transformed: Vec<DenseTensor> = samples
            .iter()
            .map(|s| scaler.transform_channels(s))
            .collect();
        let refit = Scaler::fit_channels(&transformed).unwrap();
        for c in 0..2 {
            assert!(refit.means[c].abs() < 1e-10);
            assert!((refit.stds[c] - 1.0).abs() < 1e-10);
        }
    }
}
