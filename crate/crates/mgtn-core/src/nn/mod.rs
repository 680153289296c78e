//! Differentiable multi-graph tensor network layers, tape-based gradients,
//! optimizers, and the supervised training loop.

pub mod checkpoint;
pub mod layers;
pub mod model;
pub mod optim;
pub mod tape;
pub mod train;

pub use layers::{
    Activation, DenseLayer, FmgtnLayer, GcnLayer, GmgtnLayer, Parameter, TtDenseLayer,
};
pub use model::{
    fmgtn_closed_form, gmgtn_closed_form, matricized_dense_count, ForwardPass, InputAdapter,
    Layer, LossKind, Model,
};
pub use optim::{Optimizer, OptimizerKind};
pub use tape::{Gradients, NodeId, Tape};
pub use train::{
    binary_accuracy, evaluate, fit, gradient_check, mse_metric, predict_each, EpochStats,
    FitOptions, MetricKind,
};
