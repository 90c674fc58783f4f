//! Smart-contract execution-layer semantics.
//!
//! Contracts are pure functions from their state and an incoming message to
//! a new state and a list of actions they want performed. The execution
//! layer owns the queue of pending actions and decides the order they run
//! in; [`execution::ChainBuilder`] offers depth-first and breadth-first
//! orders and records a replayable trace of every step it takes.
//!
//! The [`contracts`] module ships a Congress (a small DAO), a variant with a
//! reentrancy bug, and an attacker that exploits it. [`analysis`] checks the
//! Congress's transaction-counting invariant on traces.

pub mod analysis;
pub mod contract;
pub mod contracts;
pub mod environment;
pub mod execution;
pub mod json;
pub mod scenario;
pub mod types;
pub mod value;

pub use contract::{wrap_typed_contract, DynamicContract, TypedContract, WeakContract};
pub use environment::{environments_equivalent, ChainState, Environment};
pub use execution::{ChainBuilder, ChainStep, ChainTrace, ExecutionOrder};
pub use types::{
    is_contract_address, Action, ActionBody, Address, Amount, BlockHeader, Chain,
    ContractCallContext,
};
pub use value::{deserialize, serialize, Serializable, SerializedValue};
