use thiserror::Error;

use super::evaluate::{evaluate_action, EvalError};
use super::step::{apply_block, BlockError, ChainStep};
use super::trace::ChainTrace;
use crate::environment::{ChainState, Environment};
use crate::types::{Action, ActionBody, Address, BlockHeader};

/// Evaluations allowed per block unless configured otherwise.
pub const DEFAULT_STEP_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ExecutionOrder {
    /// New actions go to the front of the queue (stack discipline).
    #[default]
    DepthFirst,
    /// New actions are rotated to the back of the queue by a recorded
    /// permute step.
    BreadthFirst,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AddBlockError {
    #[error("invalid block: {0}")]
    Block(#[from] BlockError),
    #[error("execution failed at evaluation {evaluation}, action from {}: {source}", .action.act_from)]
    ExecutionFailed {
        evaluation: usize,
        action: Box<Action>,
        #[source]
        source: EvalError,
    },
    #[error("block exceeded the limit of {0} evaluations")]
    StepLimitExceeded(usize),
    #[error("contract address space exhausted")]
    AddressSpaceExhausted,
}

impl AddBlockError {
    /// Whether the block was well-formed but some action could not run.
    pub fn is_execution_failure(&self) -> bool {
        !matches!(self, AddBlockError::Block(_))
    }
}

/// An executable chain: adds blocks and drains their actions in the chosen
/// order, recording every step so the result can be replayed.
#[derive(Debug, Clone)]
pub struct ChainBuilder {
    state: ChainState,
    trace: ChainTrace,
    order: ExecutionOrder,
    next_contract_ordinal: u64,
    step_limit: usize,
}

impl ChainBuilder {
    pub fn new(order: ExecutionOrder) -> Self {
        ChainBuilder {
            state: ChainState::empty(),
            trace: ChainTrace::default(),
            order,
            next_contract_ordinal: 0,
            step_limit: DEFAULT_STEP_LIMIT,
        }
    }

    pub fn with_step_limit(mut self, step_limit: usize) -> Self {
        self.step_limit = step_limit;
        self
    }

    pub fn env(&self) -> &Environment {
        &self.state.env
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn trace(&self) -> &ChainTrace {
        &self.trace
    }

    pub fn order(&self) -> ExecutionOrder {
        self.order
    }

    pub fn step_limit(&self) -> usize {
        self.step_limit
    }

    /// Address the next deployment will receive.
    pub fn next_contract_address(&self) -> Option<Address> {
        Address::contract(self.next_contract_ordinal)
    }

    /// Adds a block and evaluates its actions until the queue is empty.
    ///
    /// Either the whole block executes or nothing happens: on error `self`
    /// is untouched.
    pub fn add_block(
        &self,
        header: BlockHeader,
        actions: Vec<Action>,
    ) -> Result<ChainBuilder, AddBlockError> {
        let mut state = apply_block(self.state.clone(), &header, &actions)?;
        let mut steps = vec![ChainStep::Block { header, actions }];
        let mut ordinal = self.next_contract_ordinal;
        let mut evaluations = 0;

        while let Some(head) = state.queue.first() {
            if evaluations == self.step_limit {
                return Err(AddBlockError::StepLimitExceeded(self.step_limit));
            }
            let fresh = Address::contract(ordinal).ok_or(AddBlockError::AddressSpaceExhausted)?;
            let (env, evaluation) = evaluate_action(&state.env, head, fresh).map_err(|source| {
                AddBlockError::ExecutionFailed {
                    evaluation: evaluations,
                    action: Box::new(head.clone()),
                    source,
                }
            })?;
            evaluations += 1;
            if matches!(head.act_body, ActionBody::Deploy { .. }) {
                ordinal += 1;
            }
            let action = state.queue.remove(0);
            let spawned = evaluation.new_actions.len();
            let rest = state.queue.len();
            state
                .queue
                .splice(0..0, evaluation.new_actions.iter().cloned());
            state.env = env;
            steps.push(ChainStep::Evaluate { action, evaluation });

            if self.order == ExecutionOrder::BreadthFirst && spawned > 0 {
                let permutation: Vec<usize> = (spawned..spawned + rest).chain(0..spawned).collect();
                state.queue.rotate_left(spawned);
                steps.push(ChainStep::Permute { permutation });
            }
        }

        let mut trace = self.trace.clone();
        trace.steps.extend(steps);
        Ok(ChainBuilder {
            state,
            trace,
            order: self.order,
            next_contract_ordinal: ordinal,
            step_limit: self.step_limit,
        })
    }
}
