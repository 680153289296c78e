//! First-order optimizers with per-parameter moment state, updated in
//! model parameter order so runs are reproducible.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

use super::model::Model;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Adam,
    RmsProp,
}

#[derive(Debug, Clone, Default)]
struct Moments {
    first: Vec<f64>,
    second: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Optimizer {
    kind: OptimizerKind,
    learning_rate: f64,
    beta1: f64,
    beta2: f64,
    rho: f64,
    epsilon: f64,
    step_count: u64,
    state: Vec<Moments>,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, learning_rate: f64) -> Result<Self> {
        if learning_rate <= 0.0 {
            return Err(CoreError::NonPositiveLearningRate(learning_rate));
        }
        Ok(Self {
            kind,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            rho: 0.9,
            epsilon: 1e-8,
            step_count: 0,
            state: Vec::new(),
        })
    }

    pub fn adam(learning_rate: f64) -> Result<Self> {
        Self::new(OptimizerKind::Adam, learning_rate)
    }

    pub fn rmsprop(learning_rate: f64) -> Result<Self> {
        Self::new(OptimizerKind::RmsProp, learning_rate)
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    /// Applies one update from the gradients currently stored in the model's
    /// trainable parameters.
    pub fn step(&mut self, model: &mut Model) -> Result<()> {
        self.step_count += 1;
        let t = self.step_count;
        let mut params = model.params_mut();
        if self.state.len() != params.len() {
            self.state = params
                .iter()
                .map(|p| Moments {
                    first: vec![0.0; p.len()],
                    second: vec![0.0; p.len()],
                })
                .collect();
        }
        for (param, moments) in params.iter_mut().zip(self.state.iter_mut()) {
            if !param.trainable() {
                continue;
            }
            let grad = param.grad();
            let values = param.value_mut().data_mut();
            match self.kind {
                OptimizerKind::Adam => {
                    let bc1 = 1.0 - self.beta1.powi(t as i32);
                    let bc2 = 1.0 - self.beta2.powi(t as i32);
                    for (i, v) in values.iter_mut().enumerate() {
                        let g = grad.data()[i];
                        moments.first[i] = self.beta1 * moments.first[i] + (1.0 - self.beta1) * g;
                        moments.second[i] =
                            self.beta2 * moments.second[i] + (1.0 - self.beta2) * g * g;
                        let m_hat = moments.first[i] / bc1;
                        let v_hat = moments.second[i] / bc2;
                        *v -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
                    }
                }
                OptimizerKind::RmsProp => {
                    for (i, v) in values.iter_mut().enumerate() {
                        let g = grad.data()[i];
                        moments.second[i] =
                            self.rho * moments.second[i] + (1.0 - self.rho) * g * g;
                        *v -= self.learning_rate * g / (moments.second[i].sqrt() + self.epsilon);
                    }
                }
            }
        }
        Ok(())
    }
}
