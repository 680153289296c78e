//! Experiment configuration: a JSON tree with per-experiment defaults,
//! overridable from the command line by dotted key paths.

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Trade,
    Eeg,
    Temperature,
    Airquality,
}

impl ExperimentKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "trade" | "fx" => Ok(Self::Trade),
            "eeg" => Ok(Self::Eeg),
            "temperature" => Ok(Self::Temperature),
            "airquality" => Ok(Self::Airquality),
            other => Err(CliError::Config(format!(
                "unknown experiment {other:?} (expected trade|eeg|temperature|airquality)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Trade => "trade",
            Self::Eeg => "eeg",
            Self::Temperature => "temperature",
            Self::Airquality => "airquality",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Synth,
    Csv,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataConfig {
    pub source: DataSource,
    /// CSV locations, keyed per experiment (documented in the repository
    /// readme); unused for synthetic data.
    #[serde(default)]
    pub paths: std::collections::BTreeMap<String, String>,
    /// Synthetic generator knobs.
    #[serde(default)]
    pub synth: SynthConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Time steps (minutes, rows, months, hours depending on experiment).
    pub steps: usize,
    /// Entities (currencies, students, cities, sites).
    pub entities: usize,
    pub noise: f64,
    /// Planted carry spread for the price generator.
    pub carry_spread: f64,
    pub drift_per_carry: f64,
    /// Class signal strength for the brain-wave generator.
    pub signal: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            steps: 400,
            entities: 9,
            noise: 0.5,
            carry_spread: 0.01,
            drift_per_carry: 0.02,
            signal: 2.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayoutConfig {
    pub window: usize,
    pub horizon: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimeGraphConfig {
    pub bidirectional: bool,
    pub decay: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EntityGraphConfig {
    /// Gaussian kernel over per-entity feature vectors (coordinates when
    /// the dataset has them, per-entity signal means otherwise).
    Kernel { sigma: Option<f64> },
    /// Non-negative correlation of one feature's series across entities.
    Correlation { feature: usize },
    /// Carry graph from pairwise spot/forward rates (price data only).
    Carry { absolute: bool },
    /// Square adjacency matrix from a CSV file with a node-name header.
    CsvFile { path: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphsConfig {
    pub time: TimeGraphConfig,
    pub entity: EntityGraphConfig,
    /// Symmetrically normalize adjacencies before filtering.
    pub normalize: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LayerConfig {
    Fmgtn {
        units: usize,
        activation: String,
        #[serde(default = "default_beta")]
        beta_init: f64,
        #[serde(default = "default_true")]
        train_beta: bool,
    },
    Gmgtn {
        units: usize,
        activation: String,
        #[serde(default = "default_beta")]
        beta_init: f64,
        #[serde(default = "default_true")]
        train_beta: bool,
    },
    TtDense {
        units: usize,
        activation: String,
        ranks: Vec<usize>,
        #[serde(default)]
        output_modes: Option<Vec<usize>>,
    },
    Dense {
        units: usize,
        activation: String,
    },
    Gcn {
        units: usize,
        activation: String,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormConfig {
    Natural,
    /// Unfold samples along this 1-based sample mode before the first layer.
    MatricizeMode(usize),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelConfig {
    pub input_form: InputFormConfig,
    pub layers: Vec<LayerConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub kind: String,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitConfig {
    pub train_frac: f64,
    pub val_frac: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TradeConfig {
    pub episodes: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub epsilon_decay_fraction: f64,
    pub target_sync_interval: Option<usize>,
    pub replay_capacity: usize,
    pub transaction_cost: f64,
    /// Currency indices traded and averaged in the report.
    pub currencies: Vec<usize>,
}

impl Default for TradeConfig {
    fn default() -> Self {
        Self {
            episodes: 15,
            batch_size: 64,
            learning_rate: 2e-4,
            gamma: 0.99,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_decay_fraction: 0.5,
            target_sync_interval: Some(100),
            replay_capacity: 10_000,
            transaction_cost: 0.0,
            currencies: vec![0, 1, 2, 3, 4],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub out_dir: String,
    pub data: DataConfig,
    pub layout: LayoutConfig,
    pub graphs: GraphsConfig,
    pub model: ModelConfig,
    pub optimizer: OptimizerConfig,
    pub split: SplitConfig,
    #[serde(default)]
    pub trade: Option<TradeConfig>,
}

fn default_beta() -> f64 {
    0.5
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    /// Built-in defaults reproducing the documented per-experiment stacks.
    pub fn default_for(kind: ExperimentKind) -> Self {
        let (layers, window): (Vec<LayerConfig>, usize) = match kind {
            ExperimentKind::Trade => (
                vec![
                    LayerConfig::Fmgtn {
                        units: 16,
                        activation: "relu".into(),
                        beta_init: 0.5,
                        train_beta: true,
                    },
                    LayerConfig::TtDense {
                        units: 27,
                        activation: "relu".into(),
                        ranks: vec![1, 2, 2, 1],
                        output_modes: None,
                    },
                    LayerConfig::Dense {
                        units: 2,
                        activation: "linear".into(),
                    },
                ],
                30,
            ),
            ExperimentKind::Eeg => (
                vec![
                    LayerConfig::Fmgtn {
                        units: 8,
                        activation: "tanh".into(),
                        beta_init: 0.5,
                        train_beta: true,
                    },
                    LayerConfig::TtDense {
                        units: 27,
                        activation: "tanh".into(),
                        ranks: vec![1, 2, 2, 1],
                        output_modes: None,
                    },
                    LayerConfig::Dense {
                        units: 9,
                        activation: "linear".into(),
                    },
                ],
                10,
            ),
            ExperimentKind::Temperature => (
                vec![
                    LayerConfig::Fmgtn {
                        units: 32,
                        activation: "tanh".into(),
                        beta_init: 0.5,
                        train_beta: true,
                    },
                    LayerConfig::TtDense {
                        units: 8,
                        activation: "tanh".into(),
                        ranks: vec![1, 2, 2, 1],
                        output_modes: None,
                    },
                    LayerConfig::Dense {
                        units: 92,
                        activation: "linear".into(),
                    },
                ],
                24,
            ),
            ExperimentKind::Airquality => (
                vec![
                    LayerConfig::Fmgtn {
                        units: 8,
                        activation: "tanh".into(),
                        beta_init: 0.5,
                        train_beta: true,
                    },
                    LayerConfig::TtDense {
                        units: 8,
                        activation: "tanh".into(),
                        ranks: vec![1, 2, 2, 1],
                        output_modes: None,
                    },
                    LayerConfig::Dense {
                        units: 12,
                        activation: "linear".into(),
                    },
                ],
                6,
            ),
        };

        let (entity_graph, synth, optimizer, time_graph) = match kind {
            ExperimentKind::Trade => (
                EntityGraphConfig::Carry { absolute: false },
                SynthConfig {
                    steps: 600,
                    entities: 9,
                    noise: 2e-4,
                    ..Default::default()
                },
                OptimizerConfig {
                    kind: "adam".into(),
                    learning_rate: 2e-4,
                    batch_size: 64,
                    epochs: 15,
                },
                TimeGraphConfig {
                    bidirectional: false,
                    decay: None,
                },
            ),
            ExperimentKind::Eeg => (
                EntityGraphConfig::Kernel { sigma: None },
                SynthConfig {
                    steps: 300,
                    entities: 9,
                    ..Default::default()
                },
                OptimizerConfig {
                    kind: "rmsprop".into(),
                    learning_rate: 1e-2,
                    batch_size: 32,
                    epochs: 100,
                },
                TimeGraphConfig {
                    bidirectional: true,
                    decay: None,
                },
            ),
            ExperimentKind::Temperature => (
                EntityGraphConfig::Kernel { sigma: None },
                SynthConfig {
                    steps: 180,
                    entities: 92,
                    noise: 0.8,
                    ..Default::default()
                },
                OptimizerConfig {
                    kind: "rmsprop".into(),
                    learning_rate: 1e-2,
                    batch_size: 32,
                    epochs: 30,
                },
                TimeGraphConfig {
                    bidirectional: false,
                    decay: None,
                },
            ),
            ExperimentKind::Airquality => (
                EntityGraphConfig::Correlation { feature: 0 },
                SynthConfig {
                    steps: 1500,
                    entities: 12,
                    ..Default::default()
                },
                OptimizerConfig {
                    kind: "rmsprop".into(),
                    learning_rate: 2e-3,
                    batch_size: 32,
                    epochs: 50,
                },
                TimeGraphConfig {
                    bidirectional: false,
                    decay: None,
                },
            ),
        };

        Self {
            experiment: kind,
            seed: 42,
            out_dir: format!("runs/{}", kind.name()),
            data: DataConfig {
                source: DataSource::Synth,
                paths: Default::default(),
                synth,
            },
            layout: LayoutConfig { window, horizon: 1 },
            graphs: GraphsConfig {
                time: time_graph,
                entity: entity_graph,
                normalize: false,
            },
            model: ModelConfig {
                input_form: InputFormConfig::Natural,
                layers,
            },
            optimizer,
            split: SplitConfig {
                train_frac: 0.7,
                val_frac: 0.2,
            },
            trade: if kind == ExperimentKind::Trade {
                Some(TradeConfig::default())
            } else {
                None
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config parse: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.layout.window < 2 {
            return Err(CliError::Config("layout.window must be at least 2".into()));
        }
        if self.layout.horizon == 0 {
            return Err(CliError::Config("layout.horizon must be at least 1".into()));
        }
        if self.model.layers.is_empty() {
            return Err(CliError::Config("model.layers must not be empty".into()));
        }
        if self.optimizer.learning_rate <= 0.0 {
            return Err(CliError::Config(
                "optimizer.learning_rate must be positive".into(),
            ));
        }
        if !(self.split.train_frac > 0.0 && self.split.train_frac < 1.0) {
            return Err(CliError::Config("split.train_frac must lie in (0, 1)".into()));
        }
        if self.experiment == ExperimentKind::Trade && self.trade.is_none() {
            return Err(CliError::Config(
                "trade experiment needs a trade section".into(),
            ));
        }
        Ok(())
    }
}

/// Applies `key=value` overrides where `key` is a dotted path into the JSON
/// tree and `value` parses as JSON (bare words fall back to strings).
pub fn apply_overrides(config: &ExperimentConfig, overrides: &[String]) -> Result<ExperimentConfig> {
    let mut tree = serde_json::to_value(config).map_err(|e| CliError::Config(e.to_string()))?;
    for entry in overrides {
        let (path, raw) = entry.split_once('=').ok_or_else(|| {
            CliError::Config(format!("override {entry:?} is not of the form key=value"))
        })?;
        let value: serde_json::Value = serde_json::from_str(raw)
            .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
        let mut node = &mut tree;
        let parts: Vec<&str> = path.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            if i + 1 == parts.len() {
                match node {
                    serde_json::Value::Object(map) => {
                        map.insert((*part).to_string(), value.clone());
                    }
                    serde_json::Value::Array(items) => {
                        let idx: usize = part.parse().map_err(|_| {
                            CliError::Config(format!("override {path:?}: {part:?} is not an index"))
                        })?;
                        if idx >= items.len() {
                            return Err(CliError::Config(format!(
                                "override {path:?}: index {idx} out of range"
                            )));
                        }
                        items[idx] = value.clone();
                    }
                    _ => {
                        return Err(CliError::Config(format!(
                            "override {path:?}: {part:?} is not reachable"
                        )))
                    }
                }
            } else {
                node = match node {
                    serde_json::Value::Object(map) => map.get_mut(*part).ok_or_else(|| {
                        CliError::Config(format!("override {path:?}: unknown key {part:?}"))
                    })?,
                    serde_json::Value::Array(items) => {
                        let idx: usize = part.parse().map_err(|_| {
                            CliError::Config(format!("override {path:?}: {part:?} is not an index"))
                        })?;
                        items.get_mut(idx).ok_or_else(|| {
                            CliError::Config(format!("override {path:?}: index {idx} out of range"))
                        })?
                    }
                    _ => {
                        return Err(CliError::Config(format!(
                            "override {path:?}: {part:?} is not reachable"
                        )))
                    }
                };
            }
        }
    }
    serde_json::from_value(tree).map_err(|e| CliError::Config(format!("after overrides: {e}")))
}
