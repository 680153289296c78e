//! Dataset ingestion and preparation: raw tables, feature encoding, sliding
//! window tensorization, chronological splits, and synthetic generators for
//! the experiment feeds.

// Tables are indexed by (feature, time, entity) triples throughout.
#![allow(clippy::needless_range_loop)]

pub mod encode;
pub mod error;
pub mod features;
pub mod io;
pub mod synth;
pub mod table;
pub mod window;

pub use encode::{encode_features, standardize_splits, EncodeOptions, OneHotEncoder, Scaler};
pub use error::{DataError, Result};
pub use features::log_returns;
pub use table::{ColumnData, NumericTable, RawColumn, RawTable};
pub use window::{split, window_tensorize, SampleSet, SplitScheme, TargetSpec};
