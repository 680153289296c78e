//! Uniform-sampling experience replay with a fixed-capacity ring.

use mgtn_core::DenseTensor;
use rand::Rng;

use crate::error::{Result, TradeError};

#[derive(Debug, Clone)]
pub struct Transition {
    pub state: DenseTensor,
    pub action: usize,
    pub reward: f64,
    pub next_state: DenseTensor,
    pub done: bool,
}

pub struct ReplayBuffer {
    items: Vec<Transition>,
    capacity: usize,
    write: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        Self {
            items: Vec::with_capacity(capacity.min(4096)),
            capacity: capacity.max(1),
            write: 0,
        }
    }

    pub fn push(&mut self, transition: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(transition);
        } else {
            self.items[self.write] = transition;
        }
        self.write = (self.write + 1) % self.capacity;
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Uniform sample with replacement; requires at least `batch` stored.
    pub fn sample(&self, batch: usize, rng: &mut impl Rng) -> Result<Vec<&Transition>> {
        if self.items.len() < batch {
            return Err(TradeError::BufferTooSmall {
                len: self.items.len(),
                need: batch,
            });
        }
        Ok((0..batch)
            .map(|_| &self.items[rng.random_range(0..self.items.len())])
            .collect())
    }
}
