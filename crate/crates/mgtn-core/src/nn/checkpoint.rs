//! Versioned model checkpoints: the full layer stack (specs and graphs)
//! plus every parameter by name.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::tensor::DenseTensor;

use super::model::Model;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct NamedTensor {
    name: String,
    shape: Vec<usize>,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    model: Model,
    parameters: Vec<NamedTensor>,
}

pub fn save_model<W: Write>(w: W, model: &Model) -> Result<()> {
    let parameters = model
        .params()
        .iter()
        .map(|p| NamedTensor {
            name: p.name().to_string(),
            shape: p.value().shape().to_vec(),
            data: p.value().data().to_vec(),
        })
        .collect();
    let checkpoint = Checkpoint {
        version: CHECKPOINT_VERSION,
        model: model.clone(),
        parameters,
    };
    serde_json::to_writer(w, &checkpoint)?;
    Ok(())
}

pub fn load_model<R: Read>(r: R) -> Result<Model> {
    let checkpoint: Checkpoint = serde_json::from_reader(r)?;
    if checkpoint.version != CHECKPOINT_VERSION {
        return Err(CoreError::CheckpointVersion {
            got: checkpoint.version,
            supported: CHECKPOINT_VERSION,
        });
    }
    load_validated(checkpoint)
}

fn load_validated(checkpoint: Checkpoint) -> Result<Model> {
    let mut model = checkpoint.model;
    // The layer stack already carries values; re-apply the explicit list so
    // the named entries stay authoritative.
    for param in model.params_mut() {
        if let Some(saved) = checkpoint
            .parameters
            .iter()
            .find(|t| t.name == param.name())
        {
            *param.value_mut() = DenseTensor::new(saved.shape.clone(), saved.data.clone())?;
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, DenseLayer, InputAdapter, Layer, LossKind};
    use crate::rng::named_stream;

    #[test]
    fn unsupported_version_is_rejected() {
        let mut rng = named_stream(1, "init");
        let layer = DenseLayer::init("d", 2, 2, Activation::Linear, &mut rng).unwrap();
        let model =
            Model::new(vec![Layer::Dense(layer)], LossKind::Mse, InputAdapter::Natural).unwrap();
        let mut buf = Vec::new();
        save_model(&mut buf, &model).unwrap();
        let text = String::from_utf8(buf).unwrap().replacen(
            &format!("\"version\":{CHECKPOINT_VERSION}"),
            "\"version\":999",
            1,
        );
        let err = load_model(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("999"), "{err}");
    }
}
