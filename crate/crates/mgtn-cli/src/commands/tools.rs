//! Utility commands: tensor-train decomposition of a tensor file,
//! parameter-count reports, and synthetic dataset emission.

use std::path::Path;

use serde::Serialize;

use mgtn_core::nn::{fmgtn_closed_form, gmgtn_closed_form, matricized_dense_count, Layer};
use mgtn_core::tensor::{read_tensor, write_tensor};
use mgtn_core::tt::{tt_svd, Truncation};
use mgtn_data::synth::{
    synth_airquality, synth_eeg, synth_fx, synth_temperature, AirQualityConfig, EegConfig,
    FxConfig, TemperatureConfig,
};
use mgtn_data::io as data_io;

use crate::build::{build_model, prepare};
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{CliError, Result};
use crate::report::{fmt_f64, RunDir};

#[derive(Debug, Serialize)]
pub struct DecomposeReport {
    pub shape: Vec<usize>,
    pub achieved_ranks: Vec<usize>,
    pub relative_error: f64,
    pub core_parameters: usize,
    pub dense_parameters: usize,
}

pub fn run_decompose(
    input: &Path,
    ranks: Option<Vec<usize>>,
    tolerance: Option<f64>,
    out: &RunDir,
) -> Result<DecomposeReport> {
    let file = std::fs::File::open(input)?;
    let tensor = read_tensor(file)?;
    let truncation = match (ranks, tolerance) {
        (Some(r), None) => {
            if r.len() != tensor.order() + 1 || r.first() != Some(&1) || r.last() != Some(&1) {
                return Err(CliError::Config(format!(
                    "ranks must have {} entries with boundary 1s for an order-{} tensor",
                    tensor.order() + 1,
                    tensor.order()
                )));
            }
            Truncation::Ranks(r)
        }
        (None, Some(t)) => {
            if !(t > 0.0 && t < 1.0) {
                return Err(CliError::Config(format!(
                    "tolerance {t} must lie strictly between 0 and 1"
                )));
            }
            Truncation::Tolerance(t)
        }
        _ => {
            return Err(CliError::Config(
                "pass exactly one of --ranks or --tolerance".into(),
            ))
        }
    };

    let tt = tt_svd(&tensor, &truncation)?;
    let back = tt.reconstruct()?;
    let denom = tensor.frobenius_norm();
    let relative_error = if denom > 0.0 {
        back.sub(&tensor)?.frobenius_norm() / denom
    } else {
        back.frobenius_norm()
    };

    for (n, core) in tt.cores().iter().enumerate() {
        let file = std::fs::File::create(out.path().join(format!("core{n}.txt")))?;
        write_tensor(file, core)?;
    }

    let report = DecomposeReport {
        shape: tensor.shape().to_vec(),
        achieved_ranks: tt.ranks().to_vec(),
        relative_error,
        core_parameters: tt.param_count(),
        dense_parameters: tensor.len(),
    };
    out.write_json("metrics.json", &report)?;
    let text = format!(
        "shape: {:?}\nachieved ranks: {:?}\nrelative reconstruction error: {}\ncore parameters: {} (dense: {})\ncores written to core0.txt..core{}.txt\n",
        report.shape,
        report.achieved_ranks,
        fmt_f64(report.relative_error),
        report.core_parameters,
        report.dense_parameters,
        tt.cores().len() - 1
    );
    out.write_text("report.txt", &text)?;
    Ok(report)
}

#[derive(Debug, Serialize)]
pub struct LayerCount {
    pub kind: String,
    pub trainable: usize,
    pub closed_form: Option<usize>,
    pub matricized_dense_equivalent: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct ParamCountReport {
    pub experiment: &'static str,
    pub total: usize,
    pub layers: Vec<LayerCount>,
}

pub fn run_paramcount(config: &ExperimentConfig, out: &RunDir) -> Result<ParamCountReport> {
    config.validate()?;
    out.write_preamble("paramcount", config)?;
    let prepared = prepare(config)?;
    let model = build_model(config, &prepared)?;
    let sample_shape = prepared.train.inputs[0].shape().to_vec();

    let mut layers = Vec::new();
    for layer in model.layers() {
        let trainable: usize = layer
            .params()
            .iter()
            .filter(|p| p.trainable())
            .map(|p| p.len())
            .sum();
        let (closed_form, matricized) = match layer {
            Layer::Fmgtn(l) => {
                let in_features = l.params()[0].value().shape()[1];
                let closed = fmgtn_closed_form(in_features, l.units(), l.graphs().len());
                let dense = matricized_dense_count(
                    in_features,
                    l.units(),
                    &sample_shape[1..],
                    1,
                );
                (Some(closed), Some(dense))
            }
            Layer::Gmgtn(l) => {
                // Rebuild the feature chain (J_0, J_1, ..., J_M) from the
                // per-mode transform shapes.
                let mut chain = vec![l.params()[0].value().shape()[1]];
                for p in l.params() {
                    if p.name().contains("weight") {
                        chain.push(p.value().shape()[0]);
                    }
                }
                (Some(gmgtn_closed_form(&chain)), None)
            }
            _ => (None, None),
        };
        layers.push(LayerCount {
            kind: layer.kind_name().to_string(),
            trainable,
            closed_form,
            matricized_dense_equivalent: matricized,
        });
    }
    let report = ParamCountReport {
        experiment: config.experiment.name(),
        total: model.param_count(),
        layers,
    };
    out.write_json("metrics.json", &report)?;

    let mut text = format!("experiment: {}\ntotal trainable: {}\n", report.experiment, report.total);
    for l in &report.layers {
        text.push_str(&format!("  {}: {}", l.kind, l.trainable));
        if let Some(cf) = l.closed_form {
            text.push_str(&format!(" (closed form {cf})"));
        }
        if let Some(md) = l.matricized_dense_equivalent {
            text.push_str(&format!(" (matricized dense equivalent {md})"));
        }
        text.push('\n');
    }
    out.write_text("report.txt", &text)?;
    Ok(report)
}

/// Writes synthetic datasets in the documented CSV schemas.
pub fn run_synth(config: &ExperimentConfig, out: &RunDir) -> Result<()> {
    let synth = &config.data.synth;
    match config.experiment {
        ExperimentKind::Trade => {
            let fx = synth_fx(config.seed, &FxConfig {
                minutes: synth.steps,
                currencies: synth.entities,
                noise: synth.noise.min(0.05),
                carry_spread: synth.carry_spread,
                drift_per_carry: synth.drift_per_carry,
            });
            let dir = out.path().join("fx");
            std::fs::create_dir_all(&dir)?;
            for e in 0..fx.table.entity_count() {
                let file = std::fs::File::create(dir.join(format!("{}.csv", fx.table.entities[e])))?;
                data_io::write_fx_csv(file, &fx.table, e)?;
            }
            let rates = std::fs::File::create(dir.join("rates.csv"))?;
            data_io::write_rates_csv(rates, &fx.table.entities, &fx.spot, &fx.forward)?;
        }
        ExperimentKind::Eeg => {
            let steps_per_video = config.layout.window.max(10) * 3;
            let videos = (synth.steps / steps_per_video).max(2);
            let (table, labels, video_index) = synth_eeg(config.seed, &EegConfig {
                videos,
                steps_per_video,
                students: synth.entities,
                signal: synth.signal,
                noise: synth.noise,
            });
            let file = std::fs::File::create(out.path().join("eeg.csv"))?;
            data_io::write_eeg_csv(file, &table, &labels, &video_index)?;
        }
        ExperimentKind::Temperature => {
            let (raw, coords) = synth_temperature(config.seed, &TemperatureConfig {
                months: synth.steps,
                cities: synth.entities,
                noise: synth.noise,
            });
            let file = std::fs::File::create(out.path().join("temperature.csv"))?;
            data_io::write_temperature_csv(file, &raw, &coords)?;
        }
        ExperimentKind::Airquality => {
            let raw = synth_airquality(config.seed, &AirQualityConfig {
                hours: synth.steps,
                sites: synth.entities,
                noise: synth.noise,
                ..Default::default()
            });
            let dir = out.path().join("airquality");
            std::fs::create_dir_all(&dir)?;
            for e in 0..raw.entity_count() {
                let file = std::fs::File::create(dir.join(format!("{}.csv", raw.entities[e])))?;
                data_io::write_airquality_csv(file, &raw, e)?;
            }
        }
    }
    out.write_preamble("synth", config)?;
    Ok(())
}
