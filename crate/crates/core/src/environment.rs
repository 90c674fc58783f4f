//! Full ledger state: the chain view plus deployed code and contract states.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::contract::DynamicContract;
use crate::types::{is_contract_address, Action, Address, Amount, Chain};
use crate::value::SerializedValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("balance arithmetic overflow")]
pub struct BalanceOverflow;

/// The chain together with deployed contracts and their states.
///
/// Updates consume the environment and return the new one; clone first to
/// keep the old value around.
#[derive(Debug, Clone, Default)]
pub struct Environment {
    pub chain: Chain,
    contracts: BTreeMap<Address, DynamicContract>,
    contract_states: BTreeMap<Address, SerializedValue>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn account_balance(&self, addr: Address) -> Amount {
        self.chain.account_balance(addr)
    }

    pub fn contract(&self, addr: Address) -> Option<&DynamicContract> {
        self.contracts.get(&addr)
    }

    pub fn contract_state(&self, addr: Address) -> Option<&SerializedValue> {
        self.contract_states.get(&addr)
    }

    pub fn contracts(&self) -> impl Iterator<Item = (Address, &DynamicContract)> + '_ {
        self.contracts.iter().map(|(a, c)| (*a, c))
    }

    pub fn contract_count(&self) -> usize {
        self.contracts.len()
    }

    /// Moves `amount` from `from` to `to`. Balance sufficiency is the
    /// caller's concern.
    pub fn transfer_balance(
        mut self,
        from: Address,
        to: Address,
        amount: Amount,
    ) -> Result<Self, BalanceOverflow> {
        debug_assert!(!amount.is_negative());
        if from == to || amount == Amount::ZERO {
            return Ok(self);
        }
        let from_balance = self
            .chain
            .account_balance(from)
            .checked_sub(amount)
            .ok_or(BalanceOverflow)?;
        let to_balance = self
            .chain
            .account_balance(to)
            .checked_add(amount)
            .ok_or(BalanceOverflow)?;
        self.chain.set_balance(from, from_balance);
        self.chain.set_balance(to, to_balance);
        Ok(self)
    }

    pub fn add_balance(mut self, addr: Address, amount: Amount) -> Result<Self, BalanceOverflow> {
        let balance = self
            .chain
            .account_balance(addr)
            .checked_add(amount)
            .ok_or(BalanceOverflow)?;
        self.chain.set_balance(addr, balance);
        Ok(self)
    }

    /// # Panics
    ///
    /// If `addr` is not a contract address or is already occupied.
    pub fn register_contract(
        mut self,
        addr: Address,
        contract: DynamicContract,
        state: SerializedValue,
    ) -> Self {
        assert!(
            is_contract_address(addr),
            "{addr} is not a contract address"
        );
        assert!(
            !self.contracts.contains_key(&addr),
            "contract address {addr} already in use"
        );
        self.contracts.insert(addr, contract);
        self.contract_states.insert(addr, state);
        self
    }

    /// # Panics
    ///
    /// If no contract is deployed at `addr`.
    pub fn set_contract_state(mut self, addr: Address, state: SerializedValue) -> Self {
        assert!(
            self.contracts.contains_key(&addr),
            "no contract deployed at {addr}"
        );
        self.contract_states.insert(addr, state);
        self
    }

    /// Extensional equality: chain fields, balances over the union of tracked
    /// addresses (absent reads as 0), contract code by name, and states.
    pub fn equivalent(&self, other: &Environment) -> bool {
        environments_equivalent(self, other)
    }
}

pub fn environments_equivalent(e1: &Environment, e2: &Environment) -> bool {
    let (c1, c2) = (&e1.chain, &e2.chain);
    c1.chain_height == c2.chain_height
        && c1.current_slot == c2.current_slot
        && c1.finalized_height == c2.finalized_height
        && c1
            .tracked_addresses()
            .chain(c2.tracked_addresses())
            .all(|a| c1.account_balance(a) == c2.account_balance(a))
        && e1.contracts == e2.contracts
        && e1.contract_states == e2.contract_states
}

/// An environment plus the queue of actions still to evaluate.
#[derive(Debug, Clone, Default)]
pub struct ChainState {
    pub env: Environment,
    pub queue: Vec<Action>,
}

impl ChainState {
    /// The empty state every trace starts from.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn equivalent(&self, other: &ChainState) -> bool {
        self.env.equivalent(&other.env) && self.queue == other.queue
    }
}
