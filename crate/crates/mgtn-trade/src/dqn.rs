//! Value-based training loop: epsilon-greedy exploration with linear decay,
//! uniform replay, one-step bootstrapped targets, and an optional
//! periodically synchronized target network.

use mgtn_core::nn::{Model, Optimizer};
use mgtn_core::rng::named_stream;
use mgtn_core::tensor::stack;
use mgtn_core::DenseTensor;
use rand::Rng;
use serde::Serialize;

use crate::env::Environment;
use crate::error::Result;
use crate::metrics::{financial_metrics, FinancialMetrics};
use crate::replay::{ReplayBuffer, Transition};

#[derive(Debug, Clone)]
pub struct DqnConfig {
    pub episodes: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Fraction of all planned steps over which epsilon decays linearly.
    pub epsilon_decay_fraction: f64,
    /// Updates between target-network synchronizations; `None` bootstraps
    /// from the online network directly.
    pub target_sync_interval: Option<usize>,
    pub replay_capacity: usize,
    pub seed: u64,
}

impl Default for DqnConfig {
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
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EpisodeLog {
    pub episode: usize,
    pub steps: usize,
    pub final_epsilon: f64,
    pub mean_loss: f64,
    pub metrics: FinancialMetrics,
}

pub struct DqnOutcome {
    pub model: Model,
    pub log: Vec<EpisodeLog>,
}

fn greedy_action(model: &Model, state: &DenseTensor) -> Result<usize> {
    let x = stack(std::slice::from_ref(state))?;
    let q = model.predict_batch(&x)?;
    let actions = q.shape()[1];
    let mut best = 0;
    let mut best_q = f64::NEG_INFINITY;
    for a in 0..actions {
        let v = q.get(&[0, a]);
        if v > best_q {
            best_q = v;
            best = a;
        }
    }
    Ok(best)
}

/// One-step bootstrapped value targets `r + gamma * max_a Q(s', a)`.
fn td_targets(bootstrap: &Model, batch: &[Transition], gamma: f64) -> Result<Vec<f64>> {
    let nexts: Vec<DenseTensor> = batch.iter().map(|t| t.next_state.clone()).collect();
    let q_next = bootstrap.predict_batch(&stack(&nexts)?)?;
    let actions = q_next.shape()[1];
    Ok(batch
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if t.done || gamma == 0.0 {
                t.reward
            } else {
                let mut best = f64::NEG_INFINITY;
                for a in 0..actions {
                    best = best.max(q_next.get(&[i, a]));
                }
                t.reward + gamma * best
            }
        })
        .collect())
}

fn apply_update(
    model: &mut Model,
    batch: &[Transition],
    targets: Vec<f64>,
    batch_index: usize,
) -> Result<f64> {
    let states: Vec<DenseTensor> = batch.iter().map(|t| t.state.clone()).collect();
    let x = stack(&states)?;
    let mut pass = model.forward_batch(&x)?;
    let chosen: Vec<usize> = batch.iter().map(|t| t.action).collect();
    let selected = pass.tape.select_per_row(pass.output, chosen)?;
    let target_node = pass.tape.leaf(DenseTensor::new(vec![batch.len()], targets)?);
    let loss = pass.tape.mse_loss(selected, target_node)?;
    Ok(model.backward_from(pass, loss, batch_index)?)
}

/// Trains the model in place over the environment; deterministic for a
/// fixed seed, model initialization, and environment.
pub fn dqn_train(
    mut model: Model,
    env: &mut dyn Environment,
    config: &DqnConfig,
) -> Result<DqnOutcome> {
    let mut optimizer = Optimizer::adam(config.learning_rate)?;
    let mut target = model.clone();
    let mut buffer = ReplayBuffer::new(config.replay_capacity);
    let mut explore = named_stream(config.seed, "exploration");
    let mut replay_rng = named_stream(config.seed, "replay");

    let planned = (config.episodes * env.episode_length()).max(1);
    let decay_steps = (planned as f64 * config.epsilon_decay_fraction).max(1.0);
    let mut global_step = 0usize;
    let mut update_count = 0usize;
    let mut log = Vec::with_capacity(config.episodes);

    for episode in 0..config.episodes {
        let mut state = env.reset();
        let mut rewards = Vec::new();
        let mut loss_sum = 0.0;
        let mut loss_count = 0usize;
        let mut epsilon;
        loop {
            let progress = (global_step as f64 / decay_steps).min(1.0);
            epsilon = config.epsilon_start
                + (config.epsilon_end - config.epsilon_start) * progress;
            let action = if explore.random::<f64>() < epsilon {
                explore.random_range(0..env.action_count())
            } else {
                greedy_action(&model, &state)?
            };
            let step = env.step(action)?;
            buffer.push(Transition {
                state,
                action,
                reward: step.reward,
                next_state: step.next_state.clone(),
                done: step.done,
            });
            rewards.push(step.reward);
            state = step.next_state;
            global_step += 1;

            if buffer.len() >= config.batch_size {
                let batch: Vec<Transition> = buffer
                    .sample(config.batch_size, &mut replay_rng)?
                    .into_iter()
                    .cloned()
                    .collect();
                let targets = {
                    let bootstrap = if config.target_sync_interval.is_some() {
                        &target
                    } else {
                        &model
                    };
                    td_targets(bootstrap, &batch, config.gamma)?
                };
                let loss = apply_update(&mut model, &batch, targets, update_count)?;
                optimizer.step(&mut model)?;
                loss_sum += loss;
                loss_count += 1;
                update_count += 1;
                if let Some(interval) = config.target_sync_interval {
                    if update_count.is_multiple_of(interval.max(1)) {
                        target.copy_parameters_from(&model)?;
                    }
                }
            }
            if step.done {
                break;
            }
        }
        log.push(EpisodeLog {
            episode,
            steps: rewards.len(),
            final_epsilon: epsilon,
            mean_loss: if loss_count > 0 {
                loss_sum / loss_count as f64
            } else {
                0.0
            },
            metrics: financial_metrics(&rewards)?,
        });
    }
    Ok(DqnOutcome { model, log })
}

/// Runs one full episode greedily (no exploration); returns the per-step
/// rewards and the actions taken.
pub fn evaluate_greedy(
    model: &Model,
    env: &mut dyn Environment,
) -> Result<(Vec<f64>, Vec<usize>)> {
    let mut state = env.reset();
    let mut rewards = Vec::new();
    let mut actions = Vec::new();
    loop {
        let action = greedy_action(model, &state)?;
        let step = env.step(action)?;
        rewards.push(step.reward);
        actions.push(action);
        state = step.next_state;
        if step.done {
            break;
        }
    }
    Ok((rewards, actions))
}
