//! Scenario files: scripted sequences of blocks run against a chain builder.
//!
//! ```json
//! {
//!   "blocks": [
//!     {
//!       "header": {"creator": "1", "reward": "100"},
//!       "actions": [
//!         {"from": "1", "body": {"type": "transfer", "to": "2", "amount": "5"}},
//!         {"from": "1", "body": {"type": "deploy", "amount": "0", "contract": "counter",
//!                                "setup": {"tag": "int", "value": "0"}}}
//!       ]
//!     }
//!   ]
//! }
//! ```
//!
//! Header fields may be omitted: `block_height` defaults to the previous
//! height plus one, `slot` to the previous slot plus one, `finalized_height`
//! to the previous finalized height, `reward` to 0 and `creator` to 0.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contracts::attacker::AttackerState;
use crate::contracts::congress::{CongressAction, Msg, Rules};
use crate::contracts::{builtin_contract, Registry, ATTACKER};
use crate::execution::{AddBlockError, ChainBuilder, ExecutionOrder};
use crate::json::{decimal, ActionRepr, BuiltinName, HeaderRepr};
use crate::types::{Action, Address, Amount, BlockHeader};
use crate::value::Serializable;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioBlock {
    pub header: BlockHeader,
    pub actions: Vec<Action>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Scenario {
    pub blocks: Vec<ScenarioBlock>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
#[error("block {block_index} failed: {source}")]
pub struct ScenarioError {
    pub block_index: usize,
    #[source]
    pub source: AddBlockError,
    /// The builder after the last block that succeeded.
    pub committed: Box<ChainBuilder>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeaderOverrides {
    #[serde(default, with = "decimal::option")]
    block_height: Option<u64>,
    #[serde(default, with = "decimal::option")]
    slot: Option<u64>,
    #[serde(default, with = "decimal::option")]
    finalized_height: Option<u64>,
    #[serde(default, with = "decimal::option")]
    creator: Option<Address>,
    #[serde(default, with = "decimal::option")]
    reward: Option<Amount>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockIn {
    #[serde(default)]
    header: HeaderOverrides,
    #[serde(default)]
    actions: Vec<ActionRepr<BuiltinName>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioIn {
    blocks: Vec<BlockIn>,
}

#[derive(Serialize)]
struct BlockOut {
    header: HeaderRepr,
    actions: Vec<ActionRepr<BuiltinName>>,
}

#[derive(Serialize)]
struct ScenarioOut {
    blocks: Vec<BlockOut>,
}

/// Parses a scenario, filling in omitted header fields. Unknown fields and
/// contract names outside the built-in registry are errors.
pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let parsed: ScenarioIn = serde_json::from_str(text).map_err(|e| ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let registry = Registry::builtin();
    let mut prev = BlockHeader {
        block_height: 0,
        slot: 0,
        finalized_height: 0,
        creator: Address(0),
        reward: Amount::ZERO,
    };
    let mut blocks = Vec::with_capacity(parsed.blocks.len());
    for block in parsed.blocks {
        let h = block.header;
        let header = BlockHeader {
            block_height: h
                .block_height
                .unwrap_or(prev.block_height.saturating_add(1)),
            slot: h.slot.unwrap_or(prev.slot.saturating_add(1)),
            finalized_height: h.finalized_height.unwrap_or(prev.finalized_height),
            creator: h.creator.unwrap_or(Address(0)),
            reward: h.reward.unwrap_or(Amount::ZERO),
        };
        let actions = block
            .actions
            .into_iter()
            .map(|a| a.into_action(&registry).expect("built-in names resolve"))
            .collect();
        prev = header.clone();
        blocks.push(ScenarioBlock { header, actions });
    }
    Ok(Scenario { blocks })
}

/// Renders a scenario with every header field explicit.
pub fn scenario_to_json(scenario: &Scenario) -> String {
    let out = ScenarioOut {
        blocks: scenario
            .blocks
            .iter()
            .map(|b| BlockOut {
                header: (&b.header).into(),
                actions: b.actions.iter().map(ActionRepr::from_action).collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&out).expect("scenario renders")
}

/// Adds every block in order, stopping at the first failure.
pub fn run_scenario(
    scenario: &Scenario,
    order: ExecutionOrder,
) -> Result<ChainBuilder, ScenarioError> {
    let mut builder = ChainBuilder::new(order);
    for (block_index, block) in scenario.blocks.iter().enumerate() {
        builder = builder
            .add_block(block.header.clone(), block.actions.clone())
            .map_err(|source| ScenarioError {
                block_index,
                source,
                committed: Box::new(builder.clone()),
            })?;
    }
    Ok(builder)
}

/// The operator of the exploit scenario: owner, sole member and proposer.
pub const EXPLOIT_USER: Address = Address(1);

/// Address the Congress receives in [`exploit_scenario`].
pub fn exploit_congress_address() -> Address {
    Address::contract(0).expect("first contract address")
}

pub fn exploit_attacker_address() -> Address {
    Address::contract(1).expect("second contract address")
}

/// Two blocks. The first deploys `congress` (a Congress variant) and an
/// attacker with the given reentry budget, funds the Congress with 50,
/// and creates and votes for one proposal paying 10 to the attacker. The
/// second finishes that proposal; every payment triggers the attacker to
/// finish it again.
pub fn exploit_scenario(congress: &str, reentries: u64) -> Scenario {
    let user = EXPLOIT_USER;
    let congress_addr = exploit_congress_address();
    let attacker_addr = exploit_attacker_address();
    let congress_code = builtin_contract(congress).expect("congress variant");
    let attacker_code = builtin_contract(ATTACKER).expect("attacker");
    let call = |msg: Msg| Action::call(user, congress_addr, 0, msg.to_serialized());

    let setup_block = ScenarioBlock {
        header: BlockHeader {
            block_height: 1,
            slot: 1,
            finalized_height: 0,
            creator: user,
            reward: Amount(100),
        },
        actions: vec![
            Action::deploy(
                user,
                0,
                congress_code,
                Rules::new(500, 501, 1).to_serialized(),
            ),
            Action::deploy(
                user,
                0,
                attacker_code,
                AttackerState {
                    remaining_reentries: reentries,
                    target: congress_addr,
                    proposal: 1,
                }
                .to_serialized(),
            ),
            call(Msg::AddMember(user)),
            Action::transfer(user, congress_addr, 50),
            call(Msg::CreateProposal(vec![CongressAction::Transfer {
                to: attacker_addr,
                amount: Amount(10),
            }])),
            call(Msg::VoteForProposal(1)),
        ],
    };
    let finish_block = ScenarioBlock {
        header: BlockHeader {
            block_height: 2,
            slot: 2,
            finalized_height: 0,
            creator: user,
            reward: Amount::ZERO,
        },
        actions: vec![call(Msg::FinishProposal(1))],
    };
    Scenario {
        blocks: vec![setup_block, finish_block],
    }
}
