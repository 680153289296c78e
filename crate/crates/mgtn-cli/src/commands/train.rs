//! Supervised experiment runner: split, train, evaluate, report.

use serde::Serialize;

use mgtn_core::nn::{evaluate, fit, FitOptions, MetricKind, Optimizer};
use mgtn_core::rng::named_stream;

use crate::build::{build_model, prepare};
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{CliError, Result};
use crate::report::{fmt_f64, CsvBuilder, RunDir};

#[derive(Debug, Serialize)]
pub struct TrainReport {
    pub experiment: &'static str,
    pub seed: u64,
    pub epochs_run: usize,
    pub trainable_parameters: usize,
    pub per_layer_parameters: Vec<(String, usize)>,
    pub metric: &'static str,
    /// For regression this is error on standardized targets; for
    /// classification it is accuracy in percent.
    pub train_metric: f64,
    pub val_metric: Option<f64>,
    pub test_metric: f64,
    pub train_samples: usize,
    pub val_samples: usize,
    pub test_samples: usize,
}

pub fn make_optimizer(kind: &str, learning_rate: f64) -> Result<Optimizer> {
    match kind {
        "adam" => Ok(Optimizer::adam(learning_rate)?),
        "rmsprop" => Ok(Optimizer::rmsprop(learning_rate)?),
        other => Err(CliError::Config(format!(
            "unknown optimizer {other:?} (expected adam|rmsprop)"
        ))),
    }
}

pub fn run_train(config: &ExperimentConfig, out: &RunDir) -> Result<TrainReport> {
    config.validate()?;
    if config.experiment == ExperimentKind::Trade {
        return Err(CliError::Config(
            "the trade experiment runs under the `trade` command".into(),
        ));
    }
    out.write_preamble("train", config)?;

    let prepared = prepare(config)?;
    let mut model = build_model(config, &prepared)?;
    let mut optimizer = make_optimizer(&config.optimizer.kind, config.optimizer.learning_rate)?;
    let mut shuffle = named_stream(config.seed, "shuffle");

    let history = fit(
        &mut model,
        &mut optimizer,
        &prepared.train.inputs,
        &prepared.train.targets,
        Some((&prepared.val.inputs, &prepared.val.targets)),
        &FitOptions {
            epochs: config.optimizer.epochs,
            batch_size: config.optimizer.batch_size,
            metric: prepared.metric,
            early_stop: None,
        },
        &mut shuffle,
    )?;

    let mut curves = CsvBuilder::new(&["epoch", "train_loss", "train_metric", "val_metric"]);
    for row in &history {
        curves.row(&[
            row.epoch.to_string(),
            fmt_f64(row.train_loss),
            fmt_f64(row.train_metric),
            row.val_metric.map(fmt_f64).unwrap_or_default(),
        ]);
    }
    out.write_text("curves.csv", &curves.finish())?;

    let train_metric = evaluate(&model, &prepared.train.inputs, &prepared.train.targets, prepared.metric)?;
    let val_metric = if prepared.val.is_empty() {
        None
    } else {
        Some(evaluate(&model, &prepared.val.inputs, &prepared.val.targets, prepared.metric)?)
    };
    let test_metric = evaluate(&model, &prepared.test.inputs, &prepared.test.targets, prepared.metric)?;

    let (metric_name, scale) = match prepared.metric {
        MetricKind::Mse => ("mse_standardized", 1.0),
        MetricKind::BinaryAccuracy => ("accuracy_pct", 100.0),
    };
    let report = TrainReport {
        experiment: config.experiment.name(),
        seed: config.seed,
        epochs_run: history.len(),
        trainable_parameters: model.param_count(),
        per_layer_parameters: model
            .layer_param_counts()
            .into_iter()
            .map(|(k, n)| (k.to_string(), n))
            .collect(),
        metric: metric_name,
        train_metric: train_metric * scale,
        val_metric: val_metric.map(|m| m * scale),
        test_metric: test_metric * scale,
        train_samples: prepared.train.len(),
        val_samples: prepared.val.len(),
        test_samples: prepared.test.len(),
    };
    out.write_json("metrics.json", &report)?;

    let mut text = String::new();
    text.push_str(&format!(
        "experiment: {}\nseed: {}\nsamples: {} train / {} val / {} test\n",
        report.experiment, report.seed, report.train_samples, report.val_samples, report.test_samples
    ));
    text.push_str(&format!("trainable parameters: {}\n", report.trainable_parameters));
    for (kind, count) in &report.per_layer_parameters {
        text.push_str(&format!("  {kind}: {count}\n"));
    }
    text.push_str(&format!(
        "{}: train {:.6} / test {:.6}\n",
        report.metric, report.train_metric, report.test_metric
    ));
    if let Some(v) = report.val_metric {
        text.push_str(&format!("validation: {v:.6}\n"));
    }
    out.write_text("report.txt", &text)?;

    // Model checkpoint for later inspection or reuse.
    let file = std::fs::File::create(out.path().join("model.json"))?;
    mgtn_core::nn::checkpoint::save_model(file, &model)?;

    Ok(report)
}
