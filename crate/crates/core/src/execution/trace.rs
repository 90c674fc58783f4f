use thiserror::Error;

use super::step::{apply_step, ChainStep, StepError};
use crate::environment::ChainState;

/// A sequence of steps starting from the empty state.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChainTrace {
    pub steps: Vec<ChainStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {index} is invalid: {source}")]
pub struct ReplayError {
    pub index: usize,
    #[source]
    pub source: StepError,
}

impl ChainTrace {
    pub fn new(steps: Vec<ChainStep>) -> Self {
        ChainTrace { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Replays the trace, calling `visit` with each step and the state it
    /// produced.
    pub fn replay_each<F>(&self, mut visit: F) -> Result<ChainState, ReplayError>
    where
        F: FnMut(usize, &ChainStep, &ChainState),
    {
        let mut state = ChainState::empty();
        for (index, step) in self.steps.iter().enumerate() {
            state = apply_step(state, step).map_err(|source| ReplayError { index, source })?;
            visit(index, step, &state);
        }
        Ok(state)
    }
}

/// Folds every step over the empty state. Success certifies that the final
/// state is reachable.
pub fn replay_trace(trace: &ChainTrace) -> Result<ChainState, ReplayError> {
    trace.replay_each(|_, _, _| {})
}
