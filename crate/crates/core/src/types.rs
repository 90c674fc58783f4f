//! Chain-facing data types shared by the engine and all contracts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::contract::DynamicContract;
use crate::value::SerializedValue;

/// First address of the contract address space. Everything below it belongs
/// to users.
pub const CONTRACT_ADDRESS_START: u64 = 1 << 31;

/// An account or contract address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Address(pub u64);

impl Address {
    pub const fn new(value: u64) -> Self {
        Address(value)
    }

    pub const fn value(self) -> u64 {
        self.0
    }

    /// The `ordinal`-th contract address.
    pub fn contract(ordinal: u64) -> Option<Self> {
        CONTRACT_ADDRESS_START.checked_add(ordinal).map(Address)
    }

    pub const fn is_contract(self) -> bool {
        is_contract_address(self)
    }
}

/// Addresses at or above [`CONTRACT_ADDRESS_START`] are contract addresses.
pub const fn is_contract_address(a: Address) -> bool {
    a.0 >= CONTRACT_ADDRESS_START
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Address {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(Address)
    }
}

impl From<u64> for Address {
    fn from(value: u64) -> Self {
        Address(value)
    }
}

/// A quantity of currency. Arithmetic is checked; overflow is reported,
/// never wrapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Amount(pub i128);

impl Amount {
    pub const ZERO: Amount = Amount(0);

    pub const fn new(value: i128) -> Self {
        Amount(value)
    }

    pub const fn value(self) -> i128 {
        self.0
    }

    pub const fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn checked_add(self, other: Amount) -> Option<Amount> {
        self.0.checked_add(other.0).map(Amount)
    }

    pub fn checked_sub(self, other: Amount) -> Option<Amount> {
        self.0.checked_sub(other.0).map(Amount)
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Amount {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(Amount)
    }
}

impl From<i128> for Amount {
    fn from(value: i128) -> Self {
        Amount(value)
    }
}

/// The contract's view of the blockchain.
///
/// Balances are stored sparsely: an address without an entry has balance 0.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Chain {
    pub chain_height: u64,
    pub current_slot: u64,
    pub finalized_height: u64,
    balances: BTreeMap<Address, Amount>,
}

impl Chain {
    pub fn account_balance(&self, addr: Address) -> Amount {
        self.balances.get(&addr).copied().unwrap_or(Amount::ZERO)
    }

    pub(crate) fn set_balance(&mut self, addr: Address, amount: Amount) {
        self.balances.insert(addr, amount);
    }

    /// Addresses that have an explicit balance entry.
    pub fn tracked_addresses(&self) -> impl Iterator<Item = Address> + '_ {
        self.balances.keys().copied()
    }

    /// Sum of every tracked balance, or `None` on overflow.
    pub fn total_balance(&self) -> Option<Amount> {
        self.balances
            .values()
            .try_fold(Amount::ZERO, |acc, b| acc.checked_add(*b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockHeader {
    pub block_height: u64,
    pub slot: u64,
    pub finalized_height: u64,
    pub creator: Address,
    pub reward: Amount,
}

/// Information about the action that triggered a contract invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContractCallContext {
    pub ctx_from: Address,
    pub ctx_contract_address: Address,
    pub ctx_amount: Amount,
}

/// An operation requested of the chain. The source address is implicit when
/// a contract returns bodies; [`Action`] pairs a body with its origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionBody {
    Transfer {
        to: Address,
        amount: Amount,
    },
    Call {
        to: Address,
        amount: Amount,
        msg: SerializedValue,
    },
    Deploy {
        amount: Amount,
        contract: DynamicContract,
        setup: SerializedValue,
    },
}

impl ActionBody {
    pub fn amount(&self) -> Amount {
        match self {
            ActionBody::Transfer { amount, .. }
            | ActionBody::Call { amount, .. }
            | ActionBody::Deploy { amount, .. } => *amount,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub act_from: Address,
    pub act_body: ActionBody,
}

impl Action {
    pub fn new(act_from: Address, act_body: ActionBody) -> Self {
        Action { act_from, act_body }
    }

    pub fn transfer(from: Address, to: Address, amount: i128) -> Self {
        Action::new(
            from,
            ActionBody::Transfer {
                to,
                amount: Amount(amount),
            },
        )
    }

    pub fn call(from: Address, to: Address, amount: i128, msg: SerializedValue) -> Self {
        Action::new(
            from,
            ActionBody::Call {
                to,
                amount: Amount(amount),
                msg,
            },
        )
    }

    pub fn deploy(
        from: Address,
        amount: i128,
        contract: DynamicContract,
        setup: SerializedValue,
    ) -> Self {
        Action::new(
            from,
            ActionBody::Deploy {
                amount: Amount(amount),
                contract,
                setup,
            },
        )
    }
}
