//! Builds datasets, graphs, and models from an experiment configuration.

use mgtn_core::graph::{
    carry_graph, correlation_graph, kernel_graph, time_graph, AdjacencyMatrix, CarryMode,
};
use mgtn_core::nn::{
    Activation, DenseLayer, FmgtnLayer, GcnLayer, GmgtnLayer, InputAdapter, Layer, LossKind,
    MetricKind, Model, TtDenseLayer,
};
use mgtn_core::rng::named_stream;
use mgtn_core::DenseTensor;
use mgtn_data::encode::{encode_features, EncodeOptions, Scaler};
use mgtn_data::synth::{
    synth_airquality, synth_eeg, synth_fx, synth_temperature, AirQualityConfig, EegConfig,
    FxConfig, TemperatureConfig,
};
use mgtn_data::table::NumericTable;
use mgtn_data::window::{split, window_tensorize, SampleSet, SplitScheme, TargetSpec};
use mgtn_data::{io as data_io, log_returns};

use crate::config::{
    DataSource, EntityGraphConfig, ExperimentConfig, ExperimentKind, InputFormConfig, LayerConfig,
};
use crate::error::{CliError, Result};

/// Everything a runner needs: chronological splits, the two graphs, and
/// which evaluation metric applies.
pub struct Prepared {
    pub train: SampleSet,
    pub val: SampleSet,
    pub test: SampleSet,
    pub time_graph: AdjacencyMatrix,
    pub entity_graph: AdjacencyMatrix,
    pub metric: MetricKind,
    /// Standardization applied to targets (regression experiments).
    pub target_scaler: Option<Scaler>,
}

struct Loaded {
    table: NumericTable,
    labels: Option<Vec<f64>>,
    coords: Option<Vec<(f64, f64)>>,
    rates: Option<(DenseTensor, DenseTensor)>,
}

fn parse_activation(name: &str) -> Result<Activation> {
    match name {
        "relu" => Ok(Activation::Relu),
        "tanh" => Ok(Activation::Tanh),
        "linear" => Ok(Activation::Linear),
        other => Err(CliError::Config(format!(
            "unknown activation {other:?} (expected relu|tanh|linear)"
        ))),
    }
}

fn path_of<'c>(config: &'c ExperimentConfig, key: &str) -> Result<&'c str> {
    config
        .data
        .paths
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| CliError::Config(format!("data.paths.{key} is required for csv sources")))
}

fn load(config: &ExperimentConfig) -> Result<Loaded> {
    let synth = &config.data.synth;
    match (&config.data.source, config.experiment) {
        (DataSource::Synth, ExperimentKind::Trade) => {
            let fx = synth_fx(config.seed, &FxConfig {
                minutes: synth.steps,
                currencies: synth.entities,
                noise: synth.noise.min(0.05),
                carry_spread: synth.carry_spread,
                drift_per_carry: synth.drift_per_carry,
            });
            Ok(Loaded {
                table: fx.table,
                labels: None,
                coords: None,
                rates: Some((fx.spot, fx.forward)),
            })
        }
        (DataSource::Synth, ExperimentKind::Eeg) => {
            let steps_per_video = config.layout.window.max(10) * 3;
            let videos = (synth.steps / steps_per_video).max(2);
            let (table, labels, _) = synth_eeg(config.seed, &EegConfig {
                videos,
                steps_per_video,
                students: synth.entities,
                signal: synth.signal,
                noise: synth.noise,
            });
            Ok(Loaded {
                table,
                labels: Some(labels),
                coords: None,
                rates: None,
            })
        }
        (DataSource::Synth, ExperimentKind::Temperature) => {
            let (raw, coords) = synth_temperature(config.seed, &TemperatureConfig {
                months: synth.steps,
                cities: synth.entities,
                noise: synth.noise,
            });
            let (table, _) = encode_features(&raw, &EncodeOptions {
                one_hot: vec![],
                append_month_sin: true,
                append_month_cos: false,
            })?;
            Ok(Loaded {
                table,
                labels: None,
                coords: Some(coords),
                rates: None,
            })
        }
        (DataSource::Synth, ExperimentKind::Airquality) => {
            let raw = synth_airquality(config.seed, &AirQualityConfig {
                hours: synth.steps,
                sites: synth.entities,
                noise: synth.noise,
                ..Default::default()
            });
            let (table, _) = encode_features(&raw.forward_fill()?, &EncodeOptions {
                one_hot: vec!["wd".into()],
                append_month_sin: false,
                append_month_cos: false,
            })?;
            Ok(Loaded {
                table,
                labels: None,
                coords: None,
                rates: None,
            })
        }
        (DataSource::Csv, ExperimentKind::Trade) => {
            let dir = std::path::Path::new(path_of(config, "fx_dir")?);
            let mut sources = Vec::new();
            let mut entries: Vec<_> = std::fs::read_dir(dir)?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| {
                    p.extension().is_some_and(|x| x == "csv")
                        && p.file_stem().is_some_and(|s| s != "rates")
                })
                .collect();
            entries.sort();
            for path in entries {
                sources.push(data_io::read_named(&path)?);
            }
            let table = data_io::load_fx_csvs(&sources)?;
            let rates_path = path_of(config, "rates")?;
            let rates_file = std::fs::File::open(rates_path)?;
            let rates = data_io::load_rates_csv(rates_file, &table.entities)?;
            Ok(Loaded {
                table,
                labels: None,
                coords: None,
                rates: Some(rates),
            })
        }
        (DataSource::Csv, ExperimentKind::Eeg) => {
            let file = std::fs::File::open(path_of(config, "eeg")?)?;
            let (table, labels, _) = data_io::load_eeg_csv(file)?;
            Ok(Loaded {
                table,
                labels: Some(labels),
                coords: None,
                rates: None,
            })
        }
        (DataSource::Csv, ExperimentKind::Temperature) => {
            let file = std::fs::File::open(path_of(config, "temperature")?)?;
            let (raw, coords) = data_io::load_temperature_csv(file, config.data.synth.entities)?;
            let filled = raw.forward_fill()?;
            let (table, _) = encode_features(&filled, &EncodeOptions {
                one_hot: vec![],
                append_month_sin: true,
                append_month_cos: false,
            })?;
            Ok(Loaded {
                table,
                labels: None,
                coords: Some(coords),
                rates: None,
            })
        }
        (DataSource::Csv, ExperimentKind::Airquality) => {
            let dir = std::path::Path::new(path_of(config, "airquality_dir")?);
            let mut entries: Vec<_> = std::fs::read_dir(dir)?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|x| x == "csv"))
                .collect();
            entries.sort();
            let sources = entries
                .iter()
                .map(|p| data_io::read_named(p))
                .collect::<mgtn_data::Result<Vec<_>>>()?;
            let raw = data_io::load_airquality_csvs(&sources)?;
            let (table, _) = encode_features(&raw.forward_fill()?, &EncodeOptions {
                one_hot: vec!["wd".into()],
                append_month_sin: false,
                append_month_cos: false,
            })?;
            Ok(Loaded {
                table,
                labels: None,
                coords: None,
                rates: None,
            })
        }
    }
}

/// Converts a price table to a log-return table (one step shorter).
fn returns_table(prices: &NumericTable) -> Result<NumericTable> {
    let t_len = prices.time_len() - 1;
    let (f_len, e_len) = (prices.feature_count(), prices.entity_count());
    let mut values = vec![0.0; f_len * t_len * e_len];
    for f in 0..f_len {
        for e in 0..e_len {
            let series = prices.series(f, e);
            let rets = log_returns(&series)?;
            for (t, r) in rets.into_iter().enumerate() {
                values[(f * t_len + t) * e_len + e] = r;
            }
        }
    }
    Ok(NumericTable::new(
        prices.feature_names.clone(),
        prices.timestamps[1..].to_vec(),
        prices.entities.clone(),
        values,
    )?)
}

fn build_entity_graph(
    config: &ExperimentConfig,
    table: &NumericTable,
    loaded: &Loaded,
    train_rows: usize,
) -> Result<AdjacencyMatrix> {
    let graph = match &config.graphs.entity {
        EntityGraphConfig::Kernel { sigma } => {
            let features: Vec<Vec<f64>> = match &loaded.coords {
                Some(coords) => coords.iter().map(|&(a, b)| vec![a, b]).collect(),
                None => {
                    // Per-entity mean of every feature over the train rows.
                    (0..table.entity_count())
                        .map(|e| {
                            (0..table.feature_count())
                                .map(|f| {
                                    let s = table.series(f, e);
                                    s[..train_rows.min(s.len())].iter().sum::<f64>()
                                        / train_rows.min(s.len()).max(1) as f64
                                })
                                .collect()
                        })
                        .collect()
                }
            };
            kernel_graph(&features, *sigma)?
        }
        EntityGraphConfig::Correlation { feature } => {
            let rows = train_rows.min(table.time_len());
            let series: Vec<Vec<f64>> = (0..table.entity_count())
                .map(|e| table.series(*feature, e)[..rows].to_vec())
                .collect();
            correlation_graph(&series)?
        }
        EntityGraphConfig::Carry { absolute } => {
            let (spot, forward) = loaded
                .rates
                .as_ref()
                .ok_or_else(|| CliError::Config("carry graph needs rate data".into()))?;
            let mode = if *absolute {
                CarryMode::AbsNormalize
            } else {
                CarryMode::ReluNormalize
            };
            carry_graph(spot, forward, mode)?
        }
        EntityGraphConfig::CsvFile { path } => {
            let text = std::fs::read_to_string(path)?;
            let (graph, _) = AdjacencyMatrix::from_csv(&text, false)?;
            graph
        }
    };
    if config.graphs.normalize {
        Ok(graph.normalized()?)
    } else {
        Ok(graph)
    }
}

/// Loads (or generates) data, windows it, splits chronologically, applies
/// standardization where the experiment calls for it, and builds graphs.
pub fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    let loaded = load(config)?;
    let (table, metric, target): (NumericTable, MetricKind, TargetSpec) = match config.experiment
    {
        ExperimentKind::Trade => {
            let rets = returns_table(&loaded.table)?;
            let close = rets.feature_index("close")?;
            (rets, MetricKind::Mse, TargetSpec::NextValues { feature: close })
        }
        ExperimentKind::Eeg => {
            let labels = loaded.labels.clone().ok_or_else(|| {
                CliError::Config("classification data carries no labels".into())
            })?;
            (
                loaded.table.clone(),
                MetricKind::BinaryAccuracy,
                TargetSpec::EntityLabels { labels },
            )
        }
        ExperimentKind::Temperature => {
            let idx = loaded.table.feature_index("AverageTemperature")?;
            (loaded.table.clone(), MetricKind::Mse, TargetSpec::NextValues { feature: idx })
        }
        ExperimentKind::Airquality => {
            let idx = loaded.table.feature_index("PM2.5")?;
            (loaded.table.clone(), MetricKind::Mse, TargetSpec::NextValues { feature: idx })
        }
    };

    let samples = window_tensorize(&table, config.layout.window, config.layout.horizon, &target)?;
    let (mut train, mut val, mut test) = split(
        &samples,
        SplitScheme::Fraction {
            train_frac: config.split.train_frac,
            val_frac: config.split.val_frac,
        },
    )
    .map_err(|e| match e {
        mgtn_data::DataError::EmptySplit(which) => CliError::Config(format!(
            "split leaves no {which} samples; lower layout.window or add data"
        )),
        other => CliError::Data(other),
    })?;

    // Standardization policy: regression scales features and targets
    // (errors are reported on standardized targets); classification scales
    // features only; returns are used raw.
    let mut target_scaler = None;
    match config.experiment {
        ExperimentKind::Temperature | ExperimentKind::Airquality => {
            let input_scaler = Scaler::fit_channels(&train.inputs)?;
            let t_scaler = Scaler::fit_flat(&train.targets)?;
            for set in [&mut train, &mut val, &mut test] {
                for x in &mut set.inputs {
                    *x = input_scaler.transform_channels(x);
                }
                for y in &mut set.targets {
                    *y = t_scaler.transform_flat(y);
                }
            }
            target_scaler = Some(t_scaler);
        }
        ExperimentKind::Eeg => {
            let input_scaler = Scaler::fit_channels(&train.inputs)?;
            for set in [&mut train, &mut val, &mut test] {
                for x in &mut set.inputs {
                    *x = input_scaler.transform_channels(x);
                }
            }
        }
        ExperimentKind::Trade => {}
    }

    let time = {
        let g = time_graph(
            config.layout.window,
            config.graphs.time.bidirectional,
            config.graphs.time.decay,
        )?;
        if config.graphs.normalize {
            g.normalized()?
        } else {
            g
        }
    };
    let train_rows = (table.time_len() as f64 * config.split.train_frac) as usize;
    let entity = build_entity_graph(config, &table, &loaded, train_rows.max(2))?;

    Ok(Prepared {
        train,
        val,
        test,
        time_graph: time,
        entity_graph: entity,
        metric,
        target_scaler,
    })
}

/// Builds the configured layer stack for samples shaped
/// `(features, window, entities)`.
pub fn build_model(config: &ExperimentConfig, prepared: &Prepared) -> Result<Model> {
    let sample_shape = prepared
        .train
        .inputs
        .first()
        .map(|t| t.shape().to_vec())
        .ok_or_else(|| CliError::Config("no training samples".into()))?;
    let mut rng = named_stream(config.seed, "init");

    let adapter = match config.model.input_form {
        InputFormConfig::Natural => InputAdapter::Natural,
        InputFormConfig::MatricizeMode(k) => {
            if k == 0 || k > sample_shape.len() {
                return Err(CliError::Config(format!(
                    "input_form matricize mode {k} out of range for order-{} samples",
                    sample_shape.len()
                )));
            }
            InputAdapter::MatricizeMode(k)
        }
    };

    // The shape a single sample has when it reaches each layer.
    let mut shape: Vec<usize> = match adapter {
        InputAdapter::Natural => sample_shape.clone(),
        InputAdapter::MatricizeMode(k) => {
            let nodes = sample_shape[k - 1];
            let rest: usize = sample_shape
                .iter()
                .enumerate()
                .filter(|&(i, _)| i + 1 != k)
                .map(|(_, &s)| s)
                .product();
            vec![nodes, rest]
        }
    };

    let mut layers = Vec::with_capacity(config.model.layers.len());
    for (i, layer) in config.model.layers.iter().enumerate() {
        let prefix = format!("layer{i}");
        match layer {
            LayerConfig::Fmgtn {
                units,
                activation,
                beta_init,
                train_beta,
            } => {
                if shape.len() != 3 {
                    return Err(CliError::Config(format!(
                        "layer {i}: multi-graph layers need (features, window, entities) input, got {shape:?}"
                    )));
                }
                let graphs = vec![prepared.time_graph.clone(), prepared.entity_graph.clone()];
                let built = FmgtnLayer::init(
                    &prefix,
                    shape[0],
                    *units,
                    graphs,
                    parse_activation(activation)?,
                    *beta_init,
                    *train_beta,
                    &mut rng,
                )?;
                layers.push(Layer::Fmgtn(built));
                shape[0] = *units;
            }
            LayerConfig::Gmgtn {
                units,
                activation,
                beta_init,
                train_beta,
            } => {
                if shape.len() != 3 {
                    return Err(CliError::Config(format!(
                        "layer {i}: multi-graph layers need (features, window, entities) input, got {shape:?}"
                    )));
                }
                let graphs = vec![prepared.time_graph.clone(), prepared.entity_graph.clone()];
                let chain = vec![shape[0], *units, *units];
                let built = GmgtnLayer::init(
                    &prefix,
                    &chain,
                    graphs,
                    parse_activation(activation)?,
                    *beta_init,
                    *train_beta,
                    &mut rng,
                )?;
                layers.push(Layer::Gmgtn(built));
                shape[0] = *units;
            }
            LayerConfig::TtDense {
                units,
                activation,
                ranks,
                output_modes,
            } => {
                let built = TtDenseLayer::init(
                    &prefix,
                    &shape,
                    *units,
                    ranks,
                    output_modes.clone(),
                    parse_activation(activation)?,
                    &mut rng,
                )?;
                layers.push(Layer::TtDense(built));
                shape = vec![*units];
            }
            LayerConfig::Dense { units, activation } => {
                let in_features = shape.iter().product();
                let built = DenseLayer::init(
                    &prefix,
                    in_features,
                    *units,
                    parse_activation(activation)?,
                    &mut rng,
                )?;
                layers.push(Layer::Dense(built));
                shape = vec![*units];
            }
            LayerConfig::Gcn { units, activation } => {
                if shape.len() != 2 {
                    return Err(CliError::Config(format!(
                        "layer {i}: graph convolution needs matricized (nodes, features) input, got {shape:?}; set model.input_form"
                    )));
                }
                // Pick the graph whose node count matches the node mode.
                let graph = if prepared.time_graph.node_count() == shape[0] {
                    prepared.time_graph.clone()
                } else if prepared.entity_graph.node_count() == shape[0] {
                    prepared.entity_graph.clone()
                } else {
                    return Err(CliError::Config(format!(
                        "layer {i}: no graph with {} nodes", shape[0]
                    )));
                };
                let built = GcnLayer::init(
                    &prefix,
                    graph.normalized()?,
                    shape[1],
                    *units,
                    parse_activation(activation)?,
                    &mut rng,
                )?;
                layers.push(Layer::Gcn(built));
                shape = vec![shape[0], *units];
            }
        }
    }

    Ok(Model::new(layers, LossKind::Mse, adapter)?)
}
