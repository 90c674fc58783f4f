//! Built-in contracts and the name registry used by scenario and trace files.

use std::collections::BTreeMap;

use crate::contract::{wrap_typed_contract, DynamicContract};

pub mod attacker;
pub mod congress;
pub mod counter;

pub const CONGRESS: &str = "congress";
pub const BUGGY_CONGRESS: &str = "buggy_congress";
pub const ATTACKER: &str = "attacker";
pub const COUNTER: &str = "counter";

pub const BUILTIN_NAMES: [&str; 4] = [CONGRESS, BUGGY_CONGRESS, ATTACKER, COUNTER];

pub fn builtin_contract(name: &str) -> Option<DynamicContract> {
    Some(match name {
        CONGRESS => wrap_typed_contract(CONGRESS, congress::Congress),
        BUGGY_CONGRESS => wrap_typed_contract(BUGGY_CONGRESS, congress::BuggyCongress),
        ATTACKER => wrap_typed_contract(ATTACKER, attacker::Attacker),
        COUNTER => wrap_typed_contract(COUNTER, counter::Counter),
        _ => return None,
    })
}

/// Whether code registered under `name` is one of the Congress variants.
pub fn is_congress(name: &str) -> bool {
    name == CONGRESS || name == BUGGY_CONGRESS
}

/// Resolves contract names found in files to code.
#[derive(Debug, Clone)]
pub struct Registry {
    contracts: BTreeMap<String, DynamicContract>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            contracts: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut registry = Self::empty();
        for name in BUILTIN_NAMES {
            registry.register(builtin_contract(name).expect("builtin"));
        }
        registry
    }

    pub fn register(&mut self, contract: DynamicContract) {
        self.contracts.insert(contract.name().to_owned(), contract);
    }

    pub fn get(&self, name: &str) -> Option<&DynamicContract> {
        self.contracts.get(name)
    }
}

impl Default for Registry {
    fn default() -> Self {
        Self::builtin()
    }
}
