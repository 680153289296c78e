//! Supervised training loop, evaluation metrics, and the finite-difference
//! gradient checker used to audit the backward pass.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::tensor::{stack, unstack, DenseTensor};

use super::model::Model;
use super::optim::Optimizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// Mean squared error over all output entries.
    Mse,
    /// Fraction of entries on the right side of 0.5 against binary targets.
    BinaryAccuracy,
}

#[derive(Debug, Clone)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_metric: f64,
    pub val_metric: Option<f64>,
}

pub struct FitOptions {
    pub epochs: usize,
    pub batch_size: usize,
    pub metric: MetricKind,
    /// Stop as soon as the train metric crosses this value (accuracy up,
    /// error down).
    pub early_stop: Option<f64>,
}

/// Minibatch training over per-sample tensors; shuffling, batch slicing and
/// evaluation all run under the caller's generator.
pub fn fit(
    model: &mut Model,
    optimizer: &mut Optimizer,
    train_inputs: &[DenseTensor],
    train_targets: &[DenseTensor],
    val: Option<(&[DenseTensor], &[DenseTensor])>,
    options: &FitOptions,
    rng: &mut impl Rng,
) -> Result<Vec<EpochStats>> {
    let n = train_inputs.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut history = Vec::with_capacity(options.epochs);
    let mut batch_counter = 0usize;

    for epoch in 0..options.epochs {
        order.shuffle(rng);
        let mut loss_sum = 0.0;
        let mut seen = 0usize;
        for chunk in order.chunks(options.batch_size.max(1)) {
            let xs: Vec<DenseTensor> = chunk.iter().map(|&i| train_inputs[i].clone()).collect();
            let ys: Vec<DenseTensor> = chunk.iter().map(|&i| train_targets[i].clone()).collect();
            let x = stack(&xs)?;
            let y = stack(&ys)?;
            let loss = model.train_step(&x, &y, batch_counter)?;
            optimizer.step(model)?;
            loss_sum += loss * chunk.len() as f64;
            seen += chunk.len();
            batch_counter += 1;
        }
        let train_metric = evaluate(model, train_inputs, train_targets, options.metric)?;
        let val_metric = match val {
            Some((vx, vy)) if !vx.is_empty() => {
                Some(evaluate(model, vx, vy, options.metric)?)
            }
            _ => None,
        };
        history.push(EpochStats {
            epoch,
            train_loss: loss_sum / seen.max(1) as f64,
            train_metric,
            val_metric,
        });
        if let Some(threshold) = options.early_stop {
            let reached = match options.metric {
                MetricKind::BinaryAccuracy => train_metric >= threshold,
                MetricKind::Mse => train_metric <= threshold,
            };
            if reached {
                break;
            }
        }
    }
    Ok(history)
}

/// Batched prediction over individual samples.
pub fn predict_each(
    model: &Model,
    inputs: &[DenseTensor],
    chunk_size: usize,
) -> Result<Vec<DenseTensor>> {
    let mut out = Vec::with_capacity(inputs.len());
    for chunk in inputs.chunks(chunk_size.max(1)) {
        let x = stack(chunk)?;
        let y = model.predict_batch(&x)?;
        out.extend(unstack(&y)?);
    }
    Ok(out)
}

pub fn evaluate(
    model: &Model,
    inputs: &[DenseTensor],
    targets: &[DenseTensor],
    metric: MetricKind,
) -> Result<f64> {
    let preds = predict_each(model, inputs, 64)?;
    Ok(match metric {
        MetricKind::Mse => mse_metric(&preds, targets),
        MetricKind::BinaryAccuracy => binary_accuracy(&preds, targets),
    })
}

pub fn mse_metric(preds: &[DenseTensor], targets: &[DenseTensor]) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for (p, t) in preds.iter().zip(targets) {
        for (a, b) in p.data().iter().zip(t.data()) {
            sum += (a - b) * (a - b);
            count += 1;
        }
    }
    sum / count.max(1) as f64
}

/// Entry-wise thresholding at 0.5 against 0/1 targets.
pub fn binary_accuracy(preds: &[DenseTensor], targets: &[DenseTensor]) -> f64 {
    let mut correct = 0usize;
    let mut count = 0usize;
    for (p, t) in preds.iter().zip(targets) {
        for (a, b) in p.data().iter().zip(t.data()) {
            let predicted = if *a >= 0.5 { 1.0 } else { 0.0 };
            if predicted == *b {
                correct += 1;
            }
            count += 1;
        }
    }
    correct as f64 / count.max(1) as f64
}

/// One failed entry from [`gradient_check`].
#[derive(Debug, Clone)]
pub struct GradCheckFailure {
    pub parameter: String,
    pub entry: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub relative_error: f64,
}

/// Compares every trainable parameter entry against central finite
/// differences of the model loss. Returns the worst relative error and any
/// entries beyond `tolerance`.
pub fn gradient_check(
    model: &mut Model,
    x_batch: &DenseTensor,
    y_batch: &DenseTensor,
    step: f64,
    tolerance: f64,
) -> Result<(f64, Vec<GradCheckFailure>)> {
    model.train_step(x_batch, y_batch, 0)?;
    let analytic: Vec<(String, DenseTensor)> = model
        .params()
        .iter()
        .map(|p| (p.name().to_string(), p.grad()))
        .collect();

    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let param_count = analytic.len();
    for pi in 0..param_count {
        let trainable = model.params()[pi].trainable();
        if !trainable {
            continue;
        }
        let entries = model.params()[pi].len();
        for e in 0..entries {
            let original = model.params()[pi].value().data()[e];
            model.params_mut()[pi].value_mut().data_mut()[e] = original + step;
            let plus = model.loss_value(x_batch, y_batch)?;
            model.params_mut()[pi].value_mut().data_mut()[e] = original - step;
            let minus = model.loss_value(x_batch, y_batch)?;
            model.params_mut()[pi].value_mut().data_mut()[e] = original;

            let numeric = (plus - minus) / (2.0 * step);
            let bp = analytic[pi].1.data()[e];
            let denom = numeric.abs().max(bp.abs()).max(1e-6);
            let rel = (numeric - bp).abs() / denom;
            worst = worst.max(rel);
            if rel >= tolerance {
                failures.push(GradCheckFailure {
                    parameter: analytic[pi].0.clone(),
                    entry: e,
                    analytic: bp,
                    numeric,
                    relative_error: rel,
                });
            }
        }
    }
    Ok((worst, failures))
}
