//! Layer stacks with named parameters, batched forward evaluation on a
//! tape, and gradient extraction for the optimizers.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{CoreError, Result};
use crate::tensor::DenseTensor;

use super::layers::{DenseLayer, FmgtnLayer, GcnLayer, GmgtnLayer, TtDenseLayer};
use super::tape::{NodeId, Tape};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Layer {
    Fmgtn(FmgtnLayer),
    Gmgtn(GmgtnLayer),
    TtDense(TtDenseLayer),
    Dense(DenseLayer),
    Gcn(GcnLayer),
}

impl Layer {
    pub fn params(&self) -> Vec<&super::layers::Parameter> {
        match self {
            Layer::Fmgtn(l) => l.params(),
            Layer::Gmgtn(l) => l.params(),
            Layer::TtDense(l) => l.params(),
            Layer::Dense(l) => l.params(),
            Layer::Gcn(l) => l.params(),
        }
    }

    pub fn params_mut(&mut self) -> Vec<&mut super::layers::Parameter> {
        match self {
            Layer::Fmgtn(l) => l.params_mut(),
            Layer::Gmgtn(l) => l.params_mut(),
            Layer::TtDense(l) => l.params_mut(),
            Layer::Dense(l) => l.params_mut(),
            Layer::Gcn(l) => l.params_mut(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Layer::Fmgtn(_) => "fmgtn",
            Layer::Gmgtn(_) => "gmgtn",
            Layer::TtDense(_) => "tt_dense",
            Layer::Dense(_) => "dense",
            Layer::Gcn(_) => "gcn",
        }
    }

    fn forward(&self, tape: &mut Tape, bound: &mut Vec<NodeId>, x: NodeId) -> Result<NodeId> {
        match self {
            Layer::Fmgtn(l) => l.forward(tape, bound, x),
            Layer::Gmgtn(l) => l.forward(tape, bound, x),
            Layer::TtDense(l) => l.forward(tape, bound, x),
            Layer::Dense(l) => l.forward(tape, bound, x),
            Layer::Gcn(l) => l.forward(tape, bound, x),
        }
    }
}

/// How a batched sample tensor is presented to the first layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputAdapter {
    /// Keep the natural `(B, J_0, I_1, ..., I_M)` layout.
    Natural,
    /// Unfold each sample along 1-based sample mode `k`, giving
    /// `(B, I_k, everything else)`.
    MatricizeMode(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// Mean squared error; also used for classification against one-hot or
    /// binary targets.
    Mse,
}

/// Ordered layer stack with a loss. Parameter names are unique across the
/// whole model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Model {
    layers: Vec<Layer>,
    loss: LossKind,
    adapter: InputAdapter,
}

/// A finished forward pass: the tape, the output node, and the tape nodes
/// of every parameter in model order.
pub struct ForwardPass {
    pub tape: Tape,
    pub output: NodeId,
    pub param_nodes: Vec<NodeId>,
}

impl Model {
    pub fn new(layers: Vec<Layer>, loss: LossKind, adapter: InputAdapter) -> Result<Self> {
        let mut seen = HashSet::new();
        for layer in &layers {
            for p in layer.params() {
                if !seen.insert(p.name().to_string()) {
                    return Err(CoreError::DuplicateParameter(p.name().to_string()));
                }
            }
        }
        Ok(Self {
            layers,
            loss,
            adapter,
        })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn loss_kind(&self) -> LossKind {
        self.loss
    }

    pub fn params(&self) -> Vec<&super::layers::Parameter> {
        self.layers.iter().flat_map(|l| l.params()).collect()
    }

    pub fn params_mut(&mut self) -> Vec<&mut super::layers::Parameter> {
        self.layers.iter_mut().flat_map(|l| l.params_mut()).collect()
    }

    /// Total trainable entries.
    pub fn param_count(&self) -> usize {
        self.params()
            .iter()
            .filter(|p| p.trainable())
            .map(|p| p.len())
            .sum()
    }

    /// Per-layer `(kind, trainable entries)` in stack order.
    pub fn layer_param_counts(&self) -> Vec<(&'static str, usize)> {
        self.layers
            .iter()
            .map(|l| {
                (
                    l.kind_name(),
                    l.params()
                        .iter()
                        .filter(|p| p.trainable())
                        .map(|p| p.len())
                        .sum(),
                )
            })
            .collect()
    }

    /// Runs the batched forward pass, recording every op on a fresh tape.
    pub fn forward_batch(&self, x_batch: &DenseTensor) -> Result<ForwardPass> {
        let mut tape = Tape::new();
        let mut bound = Vec::new();
        let mut node = tape.leaf(x_batch.clone());
        node = match self.adapter {
            InputAdapter::Natural => node,
            InputAdapter::MatricizeMode(k) => {
                let shape = x_batch.shape().to_vec();
                if k == 0 || k >= shape.len() {
                    return Err(CoreError::ModeOutOfRange {
                        mode: k,
                        order: shape.len().saturating_sub(1),
                    });
                }
                let mut perm = vec![0, k];
                perm.extend((1..shape.len()).filter(|&p| p != k));
                let moved = tape.permute(node, perm)?;
                let rest: usize = shape[1..]
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i + 1 != k)
                    .map(|(_, &s)| s)
                    .product();
                tape.reshape(moved, &[shape[0], shape[k], rest])?
            }
        };
        for layer in &self.layers {
            node = layer.forward(&mut tape, &mut bound, node)?;
        }
        debug_assert_eq!(
            bound.len(),
            self.params().len(),
            "every parameter must be bound exactly once per forward pass"
        );
        Ok(ForwardPass {
            tape,
            output: node,
            param_nodes: bound,
        })
    }

    /// Forward-only batched prediction.
    pub fn predict_batch(&self, x_batch: &DenseTensor) -> Result<DenseTensor> {
        let pass = self.forward_batch(x_batch)?;
        Ok(pass.tape.value(pass.output).clone())
    }

    /// Loss of a batch without touching gradients.
    pub fn loss_value(&self, x_batch: &DenseTensor, y_batch: &DenseTensor) -> Result<f64> {
        let mut pass = self.forward_batch(x_batch)?;
        let target = pass.tape.leaf(y_batch.clone());
        let loss = match self.loss {
            LossKind::Mse => pass.tape.mse_loss(pass.output, target)?,
        };
        Ok(pass.tape.value(loss).data()[0])
    }

    /// Forward + loss + backward over one batch; gradients land in the
    /// parameters, replacing previous ones. Returns the scalar loss.
    pub fn train_step(
        &mut self,
        x_batch: &DenseTensor,
        y_batch: &DenseTensor,
        batch_index: usize,
    ) -> Result<f64> {
        let mut pass = self.forward_batch(x_batch)?;
        let target = pass.tape.leaf(y_batch.clone());
        let loss = match self.loss {
            LossKind::Mse => pass.tape.mse_loss(pass.output, target)?,
        };
        self.backward_from(pass, loss, batch_index)
    }

    /// Backward sweep from an arbitrary scalar node built on top of a
    /// forward pass (the hook used by the reinforcement-learning loop).
    pub fn backward_from(
        &mut self,
        pass: ForwardPass,
        loss: NodeId,
        batch_index: usize,
    ) -> Result<f64> {
        let loss_value = pass.tape.value(loss).data()[0];
        if !loss_value.is_finite() {
            return Err(CoreError::NonFiniteLoss { batch_index });
        }
        let grads = pass.tape.backward(loss)?;
        let nodes = pass.param_nodes;
        for (param, node) in self.params_mut().into_iter().zip(nodes) {
            let shape = param.value().shape().to_vec();
            param.set_grad(grads.get(node, &shape));
        }
        Ok(loss_value)
    }

    /// Copies parameter values from another model with identical structure.
    pub fn copy_parameters_from(&mut self, other: &Self) -> Result<()> {
        let source = other.params();
        let mut dest = self.params_mut();
        if source.len() != dest.len() {
            return Err(CoreError::ShapeMismatch {
                expected: vec![source.len()],
                got: vec![dest.len()],
                context: "parameter count".into(),
            });
        }
        for (d, s) in dest.iter_mut().zip(source) {
            *d.value_mut() = s.value().clone();
        }
        Ok(())
    }
}

/// Closed-form trainable count of the shared-weight multi-graph layer.
pub fn fmgtn_closed_form(in_features: usize, units: usize, graph_count: usize) -> usize {
    units * in_features + graph_count
}

/// Closed-form trainable count over the feature chain `(J_0, ..., J_M)`.
pub fn gmgtn_closed_form(feature_dims: &[usize]) -> usize {
    feature_dims
        .windows(2)
        .map(|w| w[1] * w[0] + w[1] * w[1] + 1)
        .sum()
}

/// Weight cost of treating one physical mode with a dense layer on the
/// matricized input: both the flattened input and output feature sizes
/// carry every other mode, so the count is `J0 * J1 * (prod_{k != m} I_k)^2`.
pub fn matricized_dense_count(
    in_features: usize,
    units: usize,
    mode_sizes: &[usize],
    kept_mode: usize,
) -> usize {
    let rest: usize = mode_sizes
        .iter()
        .enumerate()
        .filter(|&(k, _)| k + 1 != kept_mode)
        .map(|(_, &s)| s)
        .product();
    in_features * units * rest * rest
}
