//! Raw and numeric tables. A raw table holds typed columns indexed by
//! `(time, entity)`; missing numeric cells are NaN until forward fill.

use crate::error::{DataError, Result};

#[derive(Debug, Clone)]
pub enum ColumnData {
    /// `values[t * entities + e]`, NaN marks a missing cell.
    Numeric(Vec<f64>),
    /// Empty string marks a missing cell.
    Categorical(Vec<String>),
}

#[derive(Debug, Clone)]
pub struct RawColumn {
    pub name: String,
    pub data: ColumnData,
}

/// Typed observations over a shared time axis and a fixed entity list.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub timestamps: Vec<i64>,
    /// Calendar month (1..=12) per time step, when the source has one.
    pub months: Option<Vec<u32>>,
    pub entities: Vec<String>,
    pub columns: Vec<RawColumn>,
}

impl RawTable {
    pub fn time_len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn validate(&self) -> Result<()> {
        let cells = self.time_len() * self.entity_count();
        for col in &self.columns {
            let len = match &col.data {
                ColumnData::Numeric(v) => v.len(),
                ColumnData::Categorical(v) => v.len(),
            };
            if len != cells {
                return Err(DataError::Inconsistent(format!(
                    "column {:?} has {len} cells, expected {cells}",
                    col.name
                )));
            }
        }
        if let Some(months) = &self.months {
            if months.len() != self.time_len() {
                return Err(DataError::Inconsistent(
                    "months length differs from timestamps".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn column(&self, name: &str) -> Result<&RawColumn> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| DataError::MissingColumn(name.to_string()))
    }

    /// Forward-fills missing cells per entity, then drops leading rows that
    /// are still incomplete anywhere.
    pub fn forward_fill(&self) -> Result<RawTable> {
        self.validate()?;
        let (t_len, e_len) = (self.time_len(), self.entity_count());
        let mut columns = self.columns.clone();
        let mut first_complete = 0usize;

        for col in &mut columns {
            match &mut col.data {
                ColumnData::Numeric(values) => {
                    for e in 0..e_len {
                        let mut last = f64::NAN;
                        for t in 0..t_len {
                            let idx = t * e_len + e;
                            if values[idx].is_nan() {
                                if last.is_nan() {
                                    first_complete = first_complete.max(t + 1);
                                } else {
                                    values[idx] = last;
                                }
                            } else {
                                last = values[idx];
                            }
                        }
                    }
                }
                ColumnData::Categorical(values) => {
                    for e in 0..e_len {
                        let mut last = String::new();
                        for t in 0..t_len {
                            let idx = t * e_len + e;
                            if values[idx].is_empty() {
                                if last.is_empty() {
                                    first_complete = first_complete.max(t + 1);
                                } else {
                                    values[idx] = last.clone();
                                }
                            } else {
                                last = values[idx].clone();
                            }
                        }
                    }
                }
            }
        }
        if first_complete >= t_len {
            return Err(DataError::NoCompleteRows);
        }

        // Trim everything before the first fully observed row.
        let keep = |v: &[i64]| v[first_complete..].to_vec();
        let trimmed_columns = columns
            .into_iter()
            .map(|col| {
                let data = match col.data {
                    ColumnData::Numeric(v) => {
                        ColumnData::Numeric(v[first_complete * e_len..].to_vec())
                    }
                    ColumnData::Categorical(v) => {
                        ColumnData::Categorical(v[first_complete * e_len..].to_vec())
                    }
                };
                RawColumn {
                    name: col.name,
                    data,
                }
            })
            .collect();
        Ok(RawTable {
            timestamps: keep(&self.timestamps),
            months: self
                .months
                .as_ref()
                .map(|m| m[first_complete..].to_vec()),
            entities: self.entities.clone(),
            columns: trimmed_columns,
        })
    }
}

/// Fully numeric feature table: `values[(f * time + t) * entities + e]`.
#[derive(Debug, Clone)]
pub struct NumericTable {
    pub feature_names: Vec<String>,
    pub timestamps: Vec<i64>,
    pub entities: Vec<String>,
    values: Vec<f64>,
}

impl NumericTable {
    pub fn new(
        feature_names: Vec<String>,
        timestamps: Vec<i64>,
        entities: Vec<String>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let expected = feature_names.len() * timestamps.len() * entities.len();
        if values.len() != expected {
            return Err(DataError::Inconsistent(format!(
                "numeric table has {} values, expected {expected}",
                values.len()
            )));
        }
        Ok(Self {
            feature_names,
            timestamps,
            entities,
            values,
        })
    }

    pub fn feature_count(&self) -> usize {
        self.feature_names.len()
    }

    pub fn time_len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn value(&self, feature: usize, t: usize, e: usize) -> f64 {
        self.values[(feature * self.time_len() + t) * self.entity_count() + e]
    }

    pub fn set_value(&mut self, feature: usize, t: usize, e: usize, v: f64) {
        let idx = (feature * self.time_len() + t) * self.entity_count() + e;
        self.values[idx] = v;
    }

    pub fn feature_index(&self, name: &str) -> Result<usize> {
        self.feature_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| DataError::MissingColumn(name.to_string()))
    }

    /// Per-entity series of one feature.
    pub fn series(&self, feature: usize, entity: usize) -> Vec<f64> {
        (0..self.time_len())
            .map(|t| self.value(feature, t, entity))
            .collect()
    }
}
