//! A contract that re-enters a Congress every time it is paid, by asking it
//! to finish the same proposal again, until its reentry budget runs out.

use crate::contract::TypedContract;
use crate::contracts::congress::{Msg, ProposalId};
use crate::types::{ActionBody, Address, Amount, Chain, ContractCallContext};
use crate::value::{DecodeError, Serializable, SerializedValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttackerState {
    pub remaining_reentries: u64,
    pub target: Address,
    pub proposal: ProposalId,
}

impl Serializable for AttackerState {
    fn to_serialized(&self) -> SerializedValue {
        (self.remaining_reentries, self.target, self.proposal).to_serialized()
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        let (remaining_reentries, target, proposal) = Serializable::from_serialized(value)?;
        Ok(AttackerState {
            remaining_reentries,
            target,
            proposal,
        })
    }
}

pub fn attacker_receive(
    _chain: &Chain,
    _ctx: &ContractCallContext,
    state: AttackerState,
    msg: Option<()>,
) -> Option<(AttackerState, Vec<ActionBody>)> {
    if msg.is_some() {
        return None;
    }
    if state.remaining_reentries == 0 {
        return Some((state, Vec::new()));
    }
    let next = AttackerState {
        remaining_reentries: state.remaining_reentries - 1,
        ..state
    };
    let reenter = ActionBody::Call {
        to: state.target,
        amount: Amount::ZERO,
        msg: Msg::FinishProposal(state.proposal).to_serialized(),
    };
    Some((next, vec![reenter]))
}

/// Setup is the initial state. Only accepts plain transfers.
#[derive(Debug, Clone, Copy, Default)]
pub struct Attacker;

impl TypedContract for Attacker {
    type Setup = AttackerState;
    type State = AttackerState;
    type Msg = ();

    fn init(
        &self,
        _chain: &Chain,
        _ctx: &ContractCallContext,
        setup: AttackerState,
    ) -> Option<AttackerState> {
        Some(setup)
    }

    fn receive(
        &self,
        chain: &Chain,
        ctx: &ContractCallContext,
        state: AttackerState,
        msg: Option<()>,
    ) -> Option<(AttackerState, Vec<ActionBody>)> {
        attacker_receive(chain, ctx, state, msg)
    }
}
