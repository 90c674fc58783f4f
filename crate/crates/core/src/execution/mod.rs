//! The execution layer: action evaluation, the step relation, traces and
//! chain builders.
//!
//! A chain state is a pair of an environment and a queue of pending actions.
//! It changes by three kinds of step:
//!
//! * a block step, allowed only on an empty queue, validates the header,
//!   requires every action to come from a user address and makes those
//!   actions the new queue;
//! * an evaluate step takes the head of the queue and puts the actions it
//!   produced in front of the remaining queue;
//! * a permute step reorders the queue arbitrarily.
//!
//! Evaluating new actions first yields depth-first execution. Following each
//! evaluation by a rotation that moves new actions to the back yields
//! breadth-first execution. [`ChainBuilder`] implements both and records the
//! steps it takes, so [`replay_trace`] can re-check them from the empty state.

mod builder;
mod evaluate;
mod step;
mod trace;

pub use builder::{AddBlockError, ChainBuilder, ExecutionOrder, DEFAULT_STEP_LIMIT};
pub use evaluate::{evaluate_action, ActionEvaluation, EvalError, EvalKind};
pub use step::{apply_step, validate_header, BlockError, ChainStep, StepError};
pub use trace::{replay_trace, ChainTrace, ReplayError};
