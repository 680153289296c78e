//! Trading environments. The market environment walks a window-tensor
//! sample stream; a two-state toy environment exists for value-learning
//! sanity checks.

use mgtn_core::DenseTensor;
use mgtn_data::SampleSet;

use crate::error::{Result, TradeError};

pub const ACTION_BUY: usize = 0;
pub const ACTION_SELL: usize = 1;

pub struct Step {
    pub next_state: DenseTensor,
    pub reward: f64,
    pub done: bool,
}

pub trait Environment {
    fn reset(&mut self) -> DenseTensor;
    fn step(&mut self, action: usize) -> Result<Step>;
    fn action_count(&self) -> usize;
    /// Steps per episode, used to plan exploration decay.
    fn episode_length(&self) -> usize;
}

/// Walks the chronological sample stream; the agent is always in the
/// market, long after a buy and short after a sell, and the reward is the
/// signed next-step log-return of the traded currency minus costs.
pub struct MarketEnv {
    states: Vec<DenseTensor>,
    next_returns: Vec<f64>,
    cursor: usize,
    done: bool,
    transaction_cost: f64,
}

impl MarketEnv {
    /// `samples` must carry next-step log-return vectors as targets;
    /// `currency` picks the traded column.
    pub fn from_samples(
        samples: &SampleSet,
        currency: usize,
        transaction_cost: f64,
    ) -> Result<Self> {
        if samples.len() < 2 {
            return Err(TradeError::TooFewSamples(samples.len()));
        }
        let width = samples.targets[0].len();
        if currency >= width {
            return Err(TradeError::BadCurrency {
                index: currency,
                count: width,
            });
        }
        Ok(Self {
            states: samples.inputs.clone(),
            next_returns: samples
                .targets
                .iter()
                .map(|t| t.data()[currency])
                .collect(),
            cursor: 0,
            done: false,
            transaction_cost,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// The underlying next-step returns (needed by accounting cross-checks).
    pub fn returns(&self) -> &[f64] {
        &self.next_returns
    }
}

impl Environment for MarketEnv {
    fn reset(&mut self) -> DenseTensor {
        self.cursor = 0;
        self.done = false;
        self.states[0].clone()
    }

    fn step(&mut self, action: usize) -> Result<Step> {
        if self.done {
            return Err(TradeError::EpisodeDone);
        }
        if action >= 2 {
            return Err(TradeError::BadAction { action, count: 2 });
        }
        let position = if action == ACTION_BUY { 1.0 } else { -1.0 };
        let reward = position * self.next_returns[self.cursor] - self.transaction_cost;
        self.cursor += 1;
        self.done = self.cursor + 1 >= self.states.len();
        Ok(Step {
            next_state: self.states[self.cursor].clone(),
            reward,
            done: self.done,
        })
    }

    fn action_count(&self) -> usize {
        2
    }

    fn episode_length(&self) -> usize {
        self.states.len() - 1
    }
}

/// Two alternating states with a fixed reward per (state, action); the
/// classic check that value learning recovers immediate rewards when the
/// discount is zero.
pub struct ToyEnv {
    pub rewards: [[f64; 2]; 2],
    state: usize,
    steps_taken: usize,
    pub horizon: usize,
}

impl ToyEnv {
    pub fn new(rewards: [[f64; 2]; 2], horizon: usize) -> Self {
        Self {
            rewards,
            state: 0,
            steps_taken: 0,
            horizon,
        }
    }

    pub fn state_tensor(state: usize) -> DenseTensor {
        let mut t = DenseTensor::zeros(&[2]);
        t.data_mut()[state] = 1.0;
        t
    }
}

impl Environment for ToyEnv {
    fn reset(&mut self) -> DenseTensor {
        self.state = 0;
        self.steps_taken = 0;
        Self::state_tensor(0)
    }

    fn step(&mut self, action: usize) -> Result<Step> {
        if self.steps_taken >= self.horizon {
            return Err(TradeError::EpisodeDone);
        }
        if action >= 2 {
            return Err(TradeError::BadAction { action, count: 2 });
        }
        let reward = self.rewards[self.state][action];
        self.state = 1 - self.state;
        self.steps_taken += 1;
        Ok(Step {
            next_state: Self::state_tensor(self.state),
            reward,
            done: self.steps_taken >= self.horizon,
        })
    }

    fn action_count(&self) -> usize {
        2
    }

    fn episode_length(&self) -> usize {
        self.horizon
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mgtn_core::DenseTensor;

    fn tiny_samples(returns: &[f64]) -> SampleSet {
        let n = returns.len();
        SampleSet {
            inputs: (0..n)
                .map(|i| DenseTensor::filled(&[2, 3], i as f64))
                .collect(),
            targets: returns
                .iter()
                .map(|&r| DenseTensor::new(vec![1], vec![r]).unwrap())
                .collect(),
            timestamps: (0..n as i64).collect(),
            feature_names: vec!["a".into(), "b".into()],
            entity_names: vec!["x".into()],
        }
    }

    #[test]
    fn reward_signs_follow_the_position() {
        let mut env = MarketEnv::from_samples(&tiny_samples(&[0.001, -0.002, 0.0]), 0, 0.0)
            .unwrap();
        env.reset();
        let s = env.step(ACTION_BUY).unwrap();
        assert_eq!(s.reward, 0.001);
        let s = env.step(ACTION_SELL).unwrap();
        assert_eq!(s.reward, 0.002);
        assert!(s.done);
        assert!(env.step(ACTION_BUY).is_err());
    }

    #[test]
    fn zero_return_gives_zero_reward_for_both_actions() {
        for action in [ACTION_BUY, ACTION_SELL] {
            let mut env =
                MarketEnv::from_samples(&tiny_samples(&[0.0, 0.0]), 0, 0.0).unwrap();
            env.reset();
            assert_eq!(env.step(action).unwrap().reward, 0.0);
        }
    }

    #[test]
    fn cumulative_reward_matches_equity_accounting_oracle() {
        let returns = [0.002, -0.001, 0.0035, -0.0005, 0.001];
        let actions = [0usize, 1, 1, 0, 1];
        let mut env = MarketEnv::from_samples(&tiny_samples(&returns), 0, 0.0).unwrap();
        env.reset();
        let mut reward_sum = 0.0;
        for &a in &actions[..4] {
            reward_sum += env.step(a).unwrap().reward;
        }
        // Independent accounting: grow an equity curve by the signed return
        // of the held position each step and compare log growth.
        let mut equity = 1000.0;
        for (i, &a) in actions[..4].iter().enumerate() {
            let position = if a == ACTION_BUY { 1.0 } else { -1.0 };
            equity *= (position * returns[i]).exp();
        }
        assert!(((equity / 1000.0).ln() - reward_sum).abs() < 1e-12);
    }

    #[test]
    fn swapping_every_action_negates_every_reward() {
        let returns = [0.002, -0.001, 0.0035, -0.0005];
        let mut env_a = MarketEnv::from_samples(&tiny_samples(&returns), 0, 0.0).unwrap();
        let mut env_b = MarketEnv::from_samples(&tiny_samples(&returns), 0, 0.0).unwrap();
        env_a.reset();
        env_b.reset();
        for a in [0usize, 1, 0] {
            let ra = env_a.step(a).unwrap().reward;
            let rb = env_b.step(1 - a).unwrap().reward;
            assert!((ra + rb).abs() < 1e-15);
        }
    }

    #[test]
    fn toy_env_alternates_states() {
        let mut env = ToyEnv::new([[1.0, -1.0], [0.5, 2.0]], 4);
        let s0 = env.reset();
        assert_eq!(s0.data(), &[1.0, 0.0]);
        let s = env.step(0).unwrap();
        assert_eq!(s.reward, 1.0);
        assert_eq!(s.next_state.data(), &[0.0, 1.0]);
        let s = env.step(1).unwrap();
        assert_eq!(s.reward, 2.0);
    }
}
