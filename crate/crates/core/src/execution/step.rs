use thiserror::Error;

use super::evaluate::{evaluate_action, ActionEvaluation, EvalError};
use crate::environment::{ChainState, Environment};
use crate::types::{is_contract_address, Action, ActionBody, Address, BlockHeader};

/// One transition of the chain state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainStep {
    /// Adds a block; its actions become the queue.
    Block {
        header: BlockHeader,
        actions: Vec<Action>,
    },
    /// Evaluates the head of the queue and prepends the resulting actions.
    Evaluate {
        action: Action,
        evaluation: ActionEvaluation,
    },
    /// Reorders the queue: position `i` of the new queue holds the action at
    /// position `permutation[i]` of the old one.
    Permute { permutation: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error("queue must be empty before adding a block ({0} actions pending)")]
    QueueNotEmpty(usize),
    #[error("block height {got}, expected {expected}")]
    Height { expected: u64, got: u64 },
    #[error("slot {got} does not follow current slot {current}")]
    Slot { current: u64, got: u64 },
    #[error("finalized height {got} must lie in [{min}, {block_height})")]
    Finalized {
        min: u64,
        got: u64,
        block_height: u64,
    },
    #[error("negative block reward")]
    Reward,
    #[error("block creator {0} is a contract address")]
    Creator(Address),
    #[error("action {index} originates from contract address {from}")]
    ContractOrigin { index: usize, from: Address },
    #[error("creator balance overflow")]
    RewardOverflow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("evaluate step on an empty queue")]
    EmptyQueue,
    #[error("recorded action does not match the head of the queue")]
    ActionMismatch,
    #[error("recorded evaluation does not match the actual evaluation")]
    EvaluationMismatch,
    #[error("permutation {0:?} is not a bijection on the queue")]
    InvalidPermutation(Vec<usize>),
}

/// Well-formedness of `header` as the next block after `env`.
pub fn validate_header(env: &Environment, header: &BlockHeader) -> Result<(), BlockError> {
    let chain = &env.chain;
    let expected = chain.chain_height + 1;
    if header.block_height != expected {
        return Err(BlockError::Height {
            expected,
            got: header.block_height,
        });
    }
    if header.slot <= chain.current_slot {
        return Err(BlockError::Slot {
            current: chain.current_slot,
            got: header.slot,
        });
    }
    if header.finalized_height < chain.finalized_height
        || header.finalized_height >= header.block_height
    {
        return Err(BlockError::Finalized {
            min: chain.finalized_height,
            got: header.finalized_height,
            block_height: header.block_height,
        });
    }
    if header.reward.is_negative() {
        return Err(BlockError::Reward);
    }
    if is_contract_address(header.creator) {
        return Err(BlockError::Creator(header.creator));
    }
    Ok(())
}

pub(crate) fn check_user_origin(actions: &[Action]) -> Result<(), BlockError> {
    match actions
        .iter()
        .enumerate()
        .find(|(_, a)| is_contract_address(a.act_from))
    {
        Some((index, a)) => Err(BlockError::ContractOrigin {
            index,
            from: a.act_from,
        }),
        None => Ok(()),
    }
}

pub(crate) fn apply_block(
    state: ChainState,
    header: &BlockHeader,
    actions: &[Action],
) -> Result<ChainState, BlockError> {
    if !state.queue.is_empty() {
        return Err(BlockError::QueueNotEmpty(state.queue.len()));
    }
    validate_header(&state.env, header)?;
    check_user_origin(actions)?;
    let mut env = state
        .env
        .add_balance(header.creator, header.reward)
        .map_err(|_| BlockError::RewardOverflow)?;
    env.chain.chain_height = header.block_height;
    env.chain.current_slot = header.slot;
    env.chain.finalized_height = header.finalized_height;
    Ok(ChainState {
        env,
        queue: actions.to_vec(),
    })
}

pub(crate) fn is_bijection(permutation: &[usize], len: usize) -> bool {
    if permutation.len() != len {
        return false;
    }
    let mut seen = vec![false; len];
    permutation
        .iter()
        .all(|&i| i < len && !std::mem::replace(&mut seen[i], true))
}

pub(crate) fn apply_permutation(
    queue: Vec<Action>,
    permutation: &[usize],
) -> Result<Vec<Action>, StepError> {
    if !is_bijection(permutation, queue.len()) {
        return Err(StepError::InvalidPermutation(permutation.to_vec()));
    }
    let mut slots: Vec<Option<Action>> = queue.into_iter().map(Some).collect();
    Ok(permutation
        .iter()
        .map(|&i| slots[i].take().expect("bijection"))
        .collect())
}

/// Applies one step, validating all of its premises.
///
/// For an evaluate step the recorded action must be the head of the queue
/// and re-evaluating it (at the recorded deployed address, if any) must
/// reproduce the recorded evaluation exactly.
pub fn apply_step(state: ChainState, step: &ChainStep) -> Result<ChainState, StepError> {
    match step {
        ChainStep::Block { header, actions } => Ok(apply_block(state, header, actions)?),
        ChainStep::Evaluate { action, evaluation } => {
            let ChainState { env, mut queue } = state;
            let head = queue.first().ok_or(StepError::EmptyQueue)?;
            if head != action {
                return Err(StepError::ActionMismatch);
            }
            let fresh = match (&action.act_body, evaluation.deployed_address) {
                (ActionBody::Deploy { .. }, Some(addr)) => addr,
                (ActionBody::Deploy { .. }, None) => return Err(StepError::EvaluationMismatch),
                // unused outside deployments
                (_, _) => Address(0),
            };
            let (env, actual) = evaluate_action(&env, action, fresh)?;
            if &actual != evaluation {
                return Err(StepError::EvaluationMismatch);
            }
            queue.splice(0..1, actual.new_actions);
            Ok(ChainState { env, queue })
        }
        ChainStep::Permute { permutation } => {
            let ChainState { env, queue } = state;
            let queue = apply_permutation(queue, permutation)?;
            Ok(ChainState { env, queue })
        }
    }
}
