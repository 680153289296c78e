//! Network layers. Each layer owns named parameters and records its forward
//! pass on a [`Tape`]; inputs carry a leading batch mode.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::graph::AdjacencyMatrix;
use crate::rng::uniform_in;
use crate::tensor::{DenseTensor, ModeSpec};
use crate::tt::{near_equal_factors, TtMatrix};

use super::tape::{NodeId, Tape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Tanh,
    Linear,
}

impl Activation {
    pub fn apply(&self, v: f64) -> f64 {
        match self {
            Activation::Relu => v.max(0.0),
            Activation::Tanh => v.tanh(),
            Activation::Linear => v,
        }
    }
}

/// Named trainable (or frozen) tensor with an accumulated gradient.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Parameter {
    name: String,
    value: DenseTensor,
    #[serde(skip)]
    grad: Option<DenseTensor>,
    trainable: bool,
}

impl Parameter {
    pub fn new(name: impl Into<String>, value: DenseTensor, trainable: bool) -> Result<Self> {
        let name = name.into();
        if !value.is_finite() {
            return Err(CoreError::NonFiniteParameter(name));
        }
        Ok(Self {
            name,
            value,
            grad: None,
            trainable,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self) -> &DenseTensor {
        &self.value
    }

    pub fn value_mut(&mut self) -> &mut DenseTensor {
        &mut self.value
    }

    pub fn grad(&self) -> DenseTensor {
        self.grad
            .clone()
            .unwrap_or_else(|| DenseTensor::zeros(self.value.shape()))
    }

    pub fn set_grad(&mut self, g: DenseTensor) {
        debug_assert_eq!(g.shape(), self.value.shape());
        self.grad = Some(g);
    }

    pub fn clear_grad(&mut self) {
        self.grad = None;
    }

    pub fn trainable(&self) -> bool {
        self.trainable
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }
}

fn glorot(shape: &[usize], fan_in: usize, fan_out: usize, rng: &mut impl Rng) -> DenseTensor {
    let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let mut t = DenseTensor::zeros(shape);
    for v in t.data_mut() {
        *v = uniform_in(rng, bound);
    }
    t
}

fn check_graphs_against_input(graphs: &[AdjacencyMatrix], x_shape: &[usize]) -> Result<()> {
    // x is (B, J, I_1, ..., I_M).
    for (m0, g) in graphs.iter().enumerate() {
        let mode_size = *x_shape.get(m0 + 2).ok_or(CoreError::GraphModeMismatch {
            mode: m0 + 1,
            graph_nodes: g.node_count(),
            mode_size: 0,
        })?;
        if g.node_count() != mode_size {
            return Err(CoreError::GraphModeMismatch {
                mode: m0 + 1,
                graph_nodes: g.node_count(),
                mode_size,
            });
        }
    }
    if x_shape.len() != graphs.len() + 2 {
        return Err(CoreError::ShapeMismatch {
            expected: vec![graphs.len() + 2],
            got: x_shape.to_vec(),
            context: "batched input order vs graph count".into(),
        });
    }
    Ok(())
}

/// Shared-weight multi-graph layer: one feature transform followed by a
/// first-order shift filter `I + beta_m * A_m` on every physical mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FmgtnLayer {
    graphs: Vec<AdjacencyMatrix>,
    betas: Vec<Parameter>,
    weight: Parameter,
    activation: Activation,
}

impl FmgtnLayer {
    #[allow(clippy::too_many_arguments)]
    pub fn init(
        prefix: &str,
        in_features: usize,
        units: usize,
        graphs: Vec<AdjacencyMatrix>,
        activation: Activation,
        beta_init: f64,
        train_beta: bool,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let weight = Parameter::new(
            format!("{prefix}.weight"),
            glorot(&[units, in_features], in_features, units, rng),
            true,
        )?;
        let betas = (0..graphs.len())
            .map(|m| {
                Parameter::new(
                    format!("{prefix}.beta{m}"),
                    DenseTensor::scalar(beta_init),
                    train_beta,
                )
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            graphs,
            betas,
            weight,
            activation,
        })
    }

    pub fn units(&self) -> usize {
        self.weight.value().shape()[0]
    }

    pub fn graphs(&self) -> &[AdjacencyMatrix] {
        &self.graphs
    }

    pub fn params(&self) -> Vec<&Parameter> {
        let mut out = vec![&self.weight];
        out.extend(self.betas.iter());
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        let mut out = vec![&mut self.weight];
        out.extend(self.betas.iter_mut());
        out
    }

    /// Trainable-count closed form: `J1 * J0 + M`.
    pub fn param_count(&self) -> usize {
        self.weight.len() + self.betas.len()
    }

    pub fn forward(
        &self,
        tape: &mut Tape,
        bound: &mut Vec<NodeId>,
        x: NodeId,
    ) -> Result<NodeId> {
        check_graphs_against_input(&self.graphs, tape.value(x).shape())?;
        let w = tape.leaf(self.weight.value().clone());
        bound.push(w);
        let mut y = tape.mode_apply(w, x, 2)?;
        for (m0, graph) in self.graphs.iter().enumerate() {
            let beta = tape.leaf(self.betas[m0].value().clone());
            bound.push(beta);
            let adj = tape.leaf(graph.weights().clone());
            let scaled = tape.scale(adj, beta)?;
            let eye = tape.leaf(DenseTensor::identity(graph.node_count()));
            let filter = tape.add(eye, scaled)?;
            y = tape.mode_apply(filter, y, m0 + 3)?;
        }
        Ok(tape.activation(y, self.activation))
    }
}

/// Full multi-graph layer: per-mode feature transform, learned propagation
/// matrix and filter coefficient, folded into an order-4 filter per mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GmgtnLayer {
    graphs: Vec<AdjacencyMatrix>,
    weights: Vec<Parameter>,
    propagations: Vec<Parameter>,
    betas: Vec<Parameter>,
    activation: Activation,
}

impl GmgtnLayer {
    /// `feature_dims` is the chain `(J_0, J_1, ..., J_M)`.
    pub fn init(
        prefix: &str,
        feature_dims: &[usize],
        graphs: Vec<AdjacencyMatrix>,
        activation: Activation,
        beta_init: f64,
        train_beta: bool,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let m_count = graphs.len();
        if feature_dims.len() != m_count + 1 {
            return Err(CoreError::ShapeMismatch {
                expected: vec![m_count + 1],
                got: vec![feature_dims.len()],
                context: "feature chain length vs graph count".into(),
            });
        }
        let mut weights = Vec::with_capacity(m_count);
        let mut propagations = Vec::with_capacity(m_count);
        let mut betas = Vec::with_capacity(m_count);
        for m in 0..m_count {
            let (j_prev, j) = (feature_dims[m], feature_dims[m + 1]);
            weights.push(Parameter::new(
                format!("{prefix}.weight{m}"),
                glorot(&[j, j_prev], j_prev, j, rng),
                true,
            )?);
            // Propagation starts near the identity so early training behaves
            // like the shared-weight fast variant.
            let mut p = DenseTensor::identity(j);
            for v in p.data_mut() {
                *v += uniform_in(rng, 0.01);
            }
            propagations.push(Parameter::new(format!("{prefix}.prop{m}"), p, true)?);
            betas.push(Parameter::new(
                format!("{prefix}.beta{m}"),
                DenseTensor::scalar(beta_init),
                train_beta,
            )?);
        }
        Ok(Self {
            graphs,
            weights,
            propagations,
            betas,
            activation,
        })
    }

    pub fn params(&self) -> Vec<&Parameter> {
        let mut out = Vec::new();
        for m in 0..self.graphs.len() {
            out.push(&self.weights[m]);
            out.push(&self.propagations[m]);
            out.push(&self.betas[m]);
        }
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        let mut out: Vec<&mut Parameter> = Vec::new();
        for ((w, p), b) in self
            .weights
            .iter_mut()
            .zip(self.propagations.iter_mut())
            .zip(self.betas.iter_mut())
        {
            out.push(w);
            out.push(p);
            out.push(b);
        }
        out
    }

    /// Trainable-count closed form: `sum_m (J_m J_{m-1} + J_m^2 + 1)`.
    pub fn param_count(&self) -> usize {
        self.params().iter().map(|p| p.len()).sum()
    }

    pub fn units(&self) -> usize {
        self.weights
            .last()
            .map(|w| w.value().shape()[0])
            .unwrap_or(0)
    }

    pub fn forward(
        &self,
        tape: &mut Tape,
        bound: &mut Vec<NodeId>,
        x: NodeId,
    ) -> Result<NodeId> {
        check_graphs_against_input(&self.graphs, tape.value(x).shape())?;
        let m_count = self.graphs.len();
        let mut y = x;
        for m0 in 0..m_count {
            let w = tape.leaf(self.weights[m0].value().clone());
            bound.push(w);
            let p = tape.leaf(self.propagations[m0].value().clone());
            bound.push(p);
            let beta = tape.leaf(self.betas[m0].value().clone());
            bound.push(beta);

            y = tape.mode_apply(w, y, 2)?;

            let nodes = self.graphs[m0].node_count();
            let j = self.propagations[m0].value().shape()[0];
            let adj = tape.leaf(self.graphs[m0].weights().clone());
            let coupled = tape.kron(adj, p)?;
            let scaled = tape.scale(coupled, beta)?;
            let eye = tape.leaf(DenseTensor::identity(nodes * j));
            let flat = tape.add(eye, scaled)?;
            let filter = tape.reshape(flat, &[j, nodes, j, nodes])?;

            // Contract the filter's input legs with the feature mode and
            // this physical mode, then restore (B, J, I_1..I_M) ordering.
            let spec = ModeSpec::new(vec![(3, 2), (4, m0 + 3)])?;
            let mixed = tape.contract(filter, y, spec)?;
            let order = tape.value(mixed).order();
            let total_modes = order - 3; // physical modes beyond J, I_m, B
            let mut perm = Vec::with_capacity(order);
            perm.push(2); // batch
            perm.push(0); // J_m
            for k in 1..=total_modes + 1 {
                if k < m0 + 1 {
                    perm.push(2 + k);
                } else if k == m0 + 1 {
                    perm.push(1);
                } else {
                    perm.push(2 + (k - 1));
                }
            }
            y = tape.permute(mixed, perm)?;
        }
        Ok(tape.activation(y, self.activation))
    }
}

/// Dense layer whose weight matrix lives in tensor-train form over the
/// natural modes of the incoming feature map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TtDenseLayer {
    cores: Vec<Parameter>,
    bias: Parameter,
    input_modes: Vec<usize>,
    output_modes: Vec<usize>,
    activation: Activation,
}

impl TtDenseLayer {
    pub fn init(
        prefix: &str,
        input_modes: &[usize],
        units: usize,
        ranks: &[usize],
        output_modes_override: Option<Vec<usize>>,
        activation: Activation,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let output_modes = match output_modes_override {
            Some(modes) => {
                if modes.iter().product::<usize>() != units || modes.len() != input_modes.len() {
                    return Err(CoreError::ShapeMismatch {
                        expected: vec![units],
                        got: modes,
                        context: "output mode factorization".into(),
                    });
                }
                modes
            }
            None => near_equal_factors(units, input_modes.len()),
        };
        let template = TtMatrix::random(input_modes, &output_modes, ranks, rng)?;
        let cores = template
            .cores()
            .iter()
            .enumerate()
            .map(|(n, c)| Parameter::new(format!("{prefix}.core{n}"), c.clone(), true))
            .collect::<Result<_>>()?;
        let bias = Parameter::new(format!("{prefix}.bias"), DenseTensor::zeros(&[units]), true)?;
        Ok(Self {
            cores,
            bias,
            input_modes: input_modes.to_vec(),
            output_modes,
            activation,
        })
    }

    pub fn units(&self) -> usize {
        self.output_modes.iter().product()
    }

    pub fn input_modes(&self) -> &[usize] {
        &self.input_modes
    }

    pub fn output_modes(&self) -> &[usize] {
        &self.output_modes
    }

    /// The represented map, rebuilt as a [`TtMatrix`] over current values.
    pub fn as_tt_matrix(&self) -> Result<TtMatrix> {
        TtMatrix::new(self.cores.iter().map(|c| c.value().clone()).collect())
    }

    pub fn params(&self) -> Vec<&Parameter> {
        let mut out: Vec<&Parameter> = self.cores.iter().collect();
        out.push(&self.bias);
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        let mut out: Vec<&mut Parameter> = self.cores.iter_mut().collect();
        out.push(&mut self.bias);
        out
    }

    pub fn param_count(&self) -> usize {
        self.params().iter().map(|p| p.len()).sum()
    }

    pub fn forward(
        &self,
        tape: &mut Tape,
        bound: &mut Vec<NodeId>,
        x: NodeId,
    ) -> Result<NodeId> {
        let x_shape = tape.value(x).shape().to_vec();
        if x_shape[1..] != self.input_modes {
            return Err(CoreError::ShapeMismatch {
                expected: self.input_modes.clone(),
                got: x_shape[1..].to_vec(),
                context: "tensor-train layer input factorization".into(),
            });
        }
        let batch = x_shape[0];
        let mut z_shape = vec![batch, 1];
        z_shape.extend(&self.input_modes);
        let mut z = tape.reshape(x, &z_shape)?;
        for (n0, core) in self.cores.iter().enumerate() {
            let c = tape.leaf(core.value().clone());
            bound.push(c);
            let spec = ModeSpec::new(vec![(1, 2), (2, n0 + 3)])?;
            let mixed = tape.contract(c, z, spec)?;
            // (J_n, R_n, B, J_1..J_{n-1}, I rest) -> (B, R_n, J_1..J_n, I rest)
            let order = tape.value(mixed).order();
            let mut perm = vec![2, 1];
            perm.extend(3..3 + n0);
            perm.push(0);
            perm.extend(3 + n0..order);
            z = tape.permute(mixed, perm)?;
        }
        let flat = tape.reshape(z, &[batch, self.units()])?;
        let b = tape.leaf(self.bias.value().clone());
        bound.push(b);
        let biased = tape.bias_add(flat, b)?;
        Ok(tape.activation(biased, self.activation))
    }
}

/// Fully connected layer; flattens any higher-order input to `(B, D)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenseLayer {
    weight: Parameter,
    bias: Parameter,
    activation: Activation,
}

impl DenseLayer {
    pub fn init(
        prefix: &str,
        in_features: usize,
        units: usize,
        activation: Activation,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        Ok(Self {
            weight: Parameter::new(
                format!("{prefix}.weight"),
                glorot(&[units, in_features], in_features, units, rng),
                true,
            )?,
            bias: Parameter::new(format!("{prefix}.bias"), DenseTensor::zeros(&[units]), true)?,
            activation,
        })
    }

    pub fn units(&self) -> usize {
        self.weight.value().shape()[0]
    }

    pub fn in_features(&self) -> usize {
        self.weight.value().shape()[1]
    }

    pub fn params(&self) -> Vec<&Parameter> {
        vec![&self.weight, &self.bias]
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        vec![&mut self.weight, &mut self.bias]
    }

    pub fn param_count(&self) -> usize {
        self.weight.len() + self.bias.len()
    }

    pub fn forward(
        &self,
        tape: &mut Tape,
        bound: &mut Vec<NodeId>,
        x: NodeId,
    ) -> Result<NodeId> {
        let shape = tape.value(x).shape().to_vec();
        let batch = shape[0];
        let features: usize = shape[1..].iter().product();
        let flat = if shape.len() == 2 {
            x
        } else {
            tape.reshape(x, &[batch, features])?
        };
        let w = tape.leaf(self.weight.value().clone());
        bound.push(w);
        let b = tape.leaf(self.bias.value().clone());
        bound.push(b);
        let y = tape.linear(flat, w, b)?;
        Ok(tape.activation(y, self.activation))
    }
}

/// One-graph convolution baseline on matricized input: `act(A_hat X W)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GcnLayer {
    graph: AdjacencyMatrix,
    weight: Parameter,
    activation: Activation,
}

impl GcnLayer {
    pub fn init(
        prefix: &str,
        graph: AdjacencyMatrix,
        in_features: usize,
        units: usize,
        activation: Activation,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        Ok(Self {
            graph,
            weight: Parameter::new(
                format!("{prefix}.weight"),
                glorot(&[units, in_features], in_features, units, rng),
                true,
            )?,
            activation,
        })
    }

    pub fn units(&self) -> usize {
        self.weight.value().shape()[0]
    }

    pub fn params(&self) -> Vec<&Parameter> {
        vec![&self.weight]
    }

    pub fn params_mut(&mut self) -> Vec<&mut Parameter> {
        vec![&mut self.weight]
    }

    pub fn param_count(&self) -> usize {
        self.weight.len()
    }

    pub fn forward(
        &self,
        tape: &mut Tape,
        bound: &mut Vec<NodeId>,
        x: NodeId,
    ) -> Result<NodeId> {
        let shape = tape.value(x).shape();
        if shape.len() != 3 || shape[1] != self.graph.node_count() {
            return Err(CoreError::ShapeMismatch {
                expected: vec![0, self.graph.node_count(), 0],
                got: shape.to_vec(),
                context: "graph convolution input (batch, nodes, features)".into(),
            });
        }
        let adj = tape.leaf(self.graph.weights().clone());
        let mixed = tape.mode_apply(adj, x, 2)?;
        let w = tape.leaf(self.weight.value().clone());
        bound.push(w);
        let y = tape.mode_apply(w, mixed, 3)?;
        Ok(tape.activation(y, self.activation))
    }
}
