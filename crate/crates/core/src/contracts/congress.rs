//! The Congress: a governance contract in which members vote on proposals.
//!
//! A proposal carries a list of transfers and calls. Once its debating period
//! has elapsed anyone may finish it; the Congress then deletes the proposal
//! and, if it passed, sends out its actions. Deleting before sending is what
//! keeps reentrant `FinishProposal` calls from replaying the same actions.
//! [`BuggyCongress`] skips the deletion and can be drained that way.
//!
//! Messages are encoded as a chain of sums in declaration order:
//!
//! | index | message               | payload                      |
//! |-------|-----------------------|------------------------------|
//! | 0     | `TransferOwnership`   | address                      |
//! | 1     | `ChangeRules`         | rules                        |
//! | 2     | `AddMember`           | address                      |
//! | 3     | `RemoveMember`        | address                      |
//! | 4     | `CreateProposal`      | list of congress actions     |
//! | 5     | `VoteForProposal`     | proposal id                  |
//! | 6     | `VoteAgainstProposal` | proposal id                  |
//! | 7     | `RetractVote`         | proposal id                  |
//! | 8     | `FinishProposal`      | proposal id                  |
//!
//! Index `i < 8` is `Right^i(Left(payload))`, index 8 is `Right^8(payload)`.
//! Rules are `(min_vote_count_permille, (margin_needed_permille,
//! debating_period_in_blocks))`. A congress action is variant 0
//! `(to, amount)` for transfers and variant 1 `(to, (amount, msg))` for
//! calls.

use std::collections::{BTreeMap, BTreeSet};

use crate::contract::TypedContract;
use crate::types::{ActionBody, Address, Amount, Chain, ContractCallContext};
use crate::value::{
    decode_variant, encode_variant, expect_unit, DecodeError, Serializable, SerializedValue,
};

pub type ProposalId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rules {
    /// Required participation, in thousandths of the member count.
    pub min_vote_count_permille: u32,
    /// Required share of votes in favour, in thousandths of the votes cast.
    pub margin_needed_permille: u32,
    /// Slots that must pass between creation and finishing.
    pub debating_period_in_blocks: u64,
}

impl Rules {
    pub fn new(
        min_vote_count_permille: u32,
        margin_needed_permille: u32,
        debating_period_in_blocks: u64,
    ) -> Self {
        Rules {
            min_vote_count_permille,
            margin_needed_permille,
            debating_period_in_blocks,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.min_vote_count_permille <= 1000 && self.margin_needed_permille <= 1000
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CongressAction {
    Transfer {
        to: Address,
        amount: Amount,
    },
    Call {
        to: Address,
        amount: Amount,
        msg: SerializedValue,
    },
}

impl CongressAction {
    pub fn amount(&self) -> Amount {
        match self {
            CongressAction::Transfer { amount, .. } | CongressAction::Call { amount, .. } => {
                *amount
            }
        }
    }

    pub fn to_action_body(&self) -> ActionBody {
        match self {
            CongressAction::Transfer { to, amount } => ActionBody::Transfer {
                to: *to,
                amount: *amount,
            },
            CongressAction::Call { to, amount, msg } => ActionBody::Call {
                to: *to,
                amount: *amount,
                msg: msg.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vote {
    For,
    Against,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proposal {
    pub actions: Vec<CongressAction>,
    pub votes: BTreeMap<Address, Vote>,
    pub proposed_in_slot: u64,
}

impl Proposal {
    pub fn votes_for(&self) -> usize {
        self.votes.values().filter(|v| **v == Vote::For).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongressState {
    pub owner: Address,
    pub rules: Rules,
    pub members: BTreeSet<Address>,
    pub proposals: BTreeMap<ProposalId, Proposal>,
    pub next_proposal_id: ProposalId,
}

impl CongressState {
    /// Number of actions held in live proposals.
    pub fn stored_action_count(&self) -> usize {
        self.proposals.values().map(|p| p.actions.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Msg {
    TransferOwnership(Address),
    ChangeRules(Rules),
    AddMember(Address),
    RemoveMember(Address),
    CreateProposal(Vec<CongressAction>),
    VoteForProposal(ProposalId),
    VoteAgainstProposal(ProposalId),
    RetractVote(ProposalId),
    FinishProposal(ProposalId),
}

const MSG_VARIANTS: usize = 9;

impl Serializable for Rules {
    fn to_serialized(&self) -> SerializedValue {
        (
            self.min_vote_count_permille,
            self.margin_needed_permille,
            self.debating_period_in_blocks,
        )
            .to_serialized()
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        let (min, margin, period) = <(u32, u32, u64)>::from_serialized(value)?;
        Ok(Rules::new(min, margin, period))
    }
}

impl Serializable for CongressAction {
    fn to_serialized(&self) -> SerializedValue {
        match self {
            CongressAction::Transfer { to, amount } => {
                encode_variant(0, 2, (*to, *amount).to_serialized())
            }
            CongressAction::Call { to, amount, msg } => {
                encode_variant(1, 2, (*to, *amount, msg.clone()).to_serialized())
            }
        }
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        match decode_variant(value, 2)? {
            (0, payload) => {
                let (to, amount) = <(Address, Amount)>::from_serialized(payload)?;
                Ok(CongressAction::Transfer { to, amount })
            }
            (_, payload) => {
                let (to, amount, msg) =
                    <(Address, Amount, SerializedValue)>::from_serialized(payload)?;
                Ok(CongressAction::Call { to, amount, msg })
            }
        }
    }
}

impl Serializable for Vote {
    fn to_serialized(&self) -> SerializedValue {
        let index = match self {
            Vote::For => 0,
            Vote::Against => 1,
        };
        encode_variant(index, 2, SerializedValue::Unit)
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        let (index, payload) = decode_variant(value, 2)?;
        expect_unit(payload)?;
        Ok(if index == 0 { Vote::For } else { Vote::Against })
    }
}

impl Serializable for Proposal {
    fn to_serialized(&self) -> SerializedValue {
        (
            self.actions.clone(),
            self.votes.clone(),
            self.proposed_in_slot,
        )
            .to_serialized()
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        let (actions, votes, proposed_in_slot) = Serializable::from_serialized(value)?;
        Ok(Proposal {
            actions,
            votes,
            proposed_in_slot,
        })
    }
}

impl Serializable for CongressState {
    fn to_serialized(&self) -> SerializedValue {
        (
            self.owner,
            self.rules,
            self.members.clone(),
            (self.proposals.clone(), self.next_proposal_id),
        )
            .to_serialized()
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        let (owner, rules, members, (proposals, next_proposal_id)) =
            Serializable::from_serialized(value)?;
        Ok(CongressState {
            owner,
            rules,
            members,
            proposals,
            next_proposal_id,
        })
    }
}

impl Serializable for Msg {
    fn to_serialized(&self) -> SerializedValue {
        let (index, payload) = match self {
            Msg::TransferOwnership(a) => (0, a.to_serialized()),
            Msg::ChangeRules(r) => (1, r.to_serialized()),
            Msg::AddMember(a) => (2, a.to_serialized()),
            Msg::RemoveMember(a) => (3, a.to_serialized()),
            Msg::CreateProposal(acts) => (4, acts.to_serialized()),
            Msg::VoteForProposal(p) => (5, p.to_serialized()),
            Msg::VoteAgainstProposal(p) => (6, p.to_serialized()),
            Msg::RetractVote(p) => (7, p.to_serialized()),
            Msg::FinishProposal(p) => (8, p.to_serialized()),
        };
        encode_variant(index, MSG_VARIANTS, payload)
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        let (index, p) = decode_variant(value, MSG_VARIANTS)?;
        Ok(match index {
            0 => Msg::TransferOwnership(Serializable::from_serialized(p)?),
            1 => Msg::ChangeRules(Serializable::from_serialized(p)?),
            2 => Msg::AddMember(Serializable::from_serialized(p)?),
            3 => Msg::RemoveMember(Serializable::from_serialized(p)?),
            4 => Msg::CreateProposal(Serializable::from_serialized(p)?),
            5 => Msg::VoteForProposal(Serializable::from_serialized(p)?),
            6 => Msg::VoteAgainstProposal(Serializable::from_serialized(p)?),
            7 => Msg::RetractVote(Serializable::from_serialized(p)?),
            _ => Msg::FinishProposal(Serializable::from_serialized(p)?),
        })
    }
}

/// Quorum: votes cast reach `min_vote_count_permille` of the members.
/// Margin: votes in favour reach `margin_needed_permille` of the votes cast.
/// Both comparisons are inclusive.
pub fn proposal_passed(proposal: &Proposal, rules: &Rules, member_count: usize) -> bool {
    let total = proposal.votes.len() as u128;
    let votes_for = proposal.votes_for() as u128;
    total * 1000 >= u128::from(rules.min_vote_count_permille) * member_count as u128
        && votes_for * 1000 >= u128::from(rules.margin_needed_permille) * total
}

pub fn congress_init(
    _chain: &Chain,
    ctx: &ContractCallContext,
    setup: Rules,
) -> Option<CongressState> {
    setup.is_valid().then(|| CongressState {
        owner: ctx.ctx_from,
        rules: setup,
        members: BTreeSet::new(),
        proposals: BTreeMap::new(),
        next_proposal_id: 1,
    })
}

pub fn congress_receive(
    chain: &Chain,
    ctx: &ContractCallContext,
    state: CongressState,
    msg: Option<Msg>,
) -> Option<(CongressState, Vec<ActionBody>)> {
    receive(FinishMode::RemoveFirst, chain, ctx, state, msg)
}

/// Identical to [`congress_receive`] except that a finished proposal stays
/// in the returned state.
pub fn buggy_congress_receive(
    chain: &Chain,
    ctx: &ContractCallContext,
    state: CongressState,
    msg: Option<Msg>,
) -> Option<(CongressState, Vec<ActionBody>)> {
    receive(FinishMode::KeepProposal, chain, ctx, state, msg)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum FinishMode {
    RemoveFirst,
    KeepProposal,
}

fn receive(
    mode: FinishMode,
    chain: &Chain,
    ctx: &ContractCallContext,
    mut state: CongressState,
    msg: Option<Msg>,
) -> Option<(CongressState, Vec<ActionBody>)> {
    let sender = ctx.ctx_from;
    let is_owner = sender == state.owner;
    let msg = match msg {
        None => return Some((state, Vec::new())),
        Some(msg) => msg,
    };
    match msg {
        Msg::TransferOwnership(new_owner) => {
            if !is_owner {
                return None;
            }
            state.owner = new_owner;
        }
        Msg::ChangeRules(rules) => {
            if !is_owner || !rules.is_valid() {
                return None;
            }
            state.rules = rules;
        }
        Msg::AddMember(member) => {
            if !is_owner || !state.members.insert(member) {
                return None;
            }
        }
        Msg::RemoveMember(member) => {
            if !is_owner || !state.members.remove(&member) {
                return None;
            }
            for proposal in state.proposals.values_mut() {
                proposal.votes.remove(&member);
            }
        }
        Msg::CreateProposal(actions) => {
            if actions.iter().any(|a| a.amount().is_negative()) {
                return None;
            }
            let id = state.next_proposal_id;
            state.next_proposal_id = id.checked_add(1)?;
            state.proposals.insert(
                id,
                Proposal {
                    actions,
                    votes: BTreeMap::new(),
                    proposed_in_slot: chain.current_slot,
                },
            );
        }
        Msg::VoteForProposal(id) | Msg::VoteAgainstProposal(id) => {
            let vote = if matches!(msg, Msg::VoteForProposal(_)) {
                Vote::For
            } else {
                Vote::Against
            };
            if !state.members.contains(&sender) {
                return None;
            }
            state.proposals.get_mut(&id)?.votes.insert(sender, vote);
        }
        Msg::RetractVote(id) => {
            if !state.members.contains(&sender) {
                return None;
            }
            state.proposals.get_mut(&id)?.votes.remove(&sender)?;
        }
        Msg::FinishProposal(id) => {
            let proposal = state.proposals.get(&id)?;
            let debate_ends = proposal
                .proposed_in_slot
                .checked_add(state.rules.debating_period_in_blocks)?;
            if chain.current_slot < debate_ends {
                return None;
            }
            let proposal = match mode {
                FinishMode::RemoveFirst => state.proposals.remove(&id)?,
                FinishMode::KeepProposal => proposal.clone(),
            };
            let actions = if proposal_passed(&proposal, &state.rules, state.members.len()) {
                proposal
                    .actions
                    .iter()
                    .map(CongressAction::to_action_body)
                    .collect()
            } else {
                Vec::new()
            };
            return Some((state, actions));
        }
    }
    Some((state, Vec::new()))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Congress;

impl TypedContract for Congress {
    type Setup = Rules;
    type State = CongressState;
    type Msg = Msg;

    fn init(
        &self,
        chain: &Chain,
        ctx: &ContractCallContext,
        setup: Rules,
    ) -> Option<CongressState> {
        congress_init(chain, ctx, setup)
    }

    fn receive(
        &self,
        chain: &Chain,
        ctx: &ContractCallContext,
        state: CongressState,
        msg: Option<Msg>,
    ) -> Option<(CongressState, Vec<ActionBody>)> {
        congress_receive(chain, ctx, state, msg)
    }
}

/// The Congress with proposal clearing skipped on finish.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuggyCongress;

impl TypedContract for BuggyCongress {
    type Setup = Rules;
    type State = CongressState;
    type Msg = Msg;

    fn init(
        &self,
        chain: &Chain,
        ctx: &ContractCallContext,
        setup: Rules,
    ) -> Option<CongressState> {
        congress_init(chain, ctx, setup)
    }

    fn receive(
        &self,
        chain: &Chain,
        ctx: &ContractCallContext,
        state: CongressState,
        msg: Option<Msg>,
    ) -> Option<(CongressState, Vec<ActionBody>)> {
        buggy_congress_receive(chain, ctx, state, msg)
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::contract::wrap_typed_contract;
    use crate::value::{deserialize, serialize};
    use proptest::prelude::*;

    const OWNER: Address = Address(1);
    const M1: Address = Address(2);
    const M2: Address = Address(3);
    const M3: Address = Address(4);
    const SELF: Address = Address(1 << 31);

    fn ctx(from: Address) -> ContractCallContext {
        ContractCallContext {
            ctx_from: from,
            ctx_contract_address: SELF,
            ctx_amount: Amount::ZERO,
        }
    }

    fn chain_at(slot: u64) -> Chain {
        let mut chain = Chain::default();
        chain.current_slot = slot;
        chain
    }

    fn fresh(rules: Rules) -> CongressState {
        congress_init(&Chain::default(), &ctx(OWNER), rules).unwrap()
    }

    fn send(
        state: CongressState,
        from: Address,
        slot: u64,
        msg: Msg,
    ) -> Option<(CongressState, Vec<ActionBody>)> {
        congress_receive(&chain_at(slot), &ctx(from), state, Some(msg))
    }

    fn ok(state: CongressState, from: Address, msg: Msg) -> CongressState {
        let (s, acts) = send(state, from, 0, msg).expect("accepted");
        assert!(acts.is_empty());
        s
    }

    fn with_members(rules: Rules, members: &[Address]) -> CongressState {
        members
            .iter()
            .fold(fresh(rules), |s, m| ok(s, OWNER, Msg::AddMember(*m)))
    }

    fn two_transfers() -> Vec<CongressAction> {
        vec![
            CongressAction::Transfer {
                to: M1,
                amount: Amount(5),
            },
            CongressAction::Call {
                to: Address((1 << 31) + 1),
                amount: Amount(1),
                msg: SerializedValue::Unit,
            },
        ]
    }

    /// Enumerates all vote assignments of up to three members (each member
    /// abstains, votes for or votes against) and counts by hand.
    fn tally_oracle(assignment: &[Option<bool>], min: u32, margin: u32) -> bool {
        let members = assignment.len() as f64;
        let cast: Vec<bool> = assignment.iter().flatten().copied().collect();
        let total = cast.len() as f64;
        let yes = cast.iter().filter(|v| **v).count() as f64;
        let quorum = total >= min as f64 / 1000.0 * members - 1e-9;
        let margin_ok = yes >= margin as f64 / 1000.0 * total - 1e-9;
        quorum && margin_ok
    }

    #[test]
    fn init_sets_owner() {
        let s = fresh(Rules::new(500, 501, 2));
        assert_eq!(s.owner, OWNER);
        assert!(s.members.is_empty());
        assert!(s.proposals.is_empty());
        assert_eq!(s.next_proposal_id, 1);
        assert!(congress_init(&Chain::default(), &ctx(OWNER), Rules::new(500, 1001, 2)).is_none());
        assert!(congress_init(&Chain::default(), &ctx(OWNER), Rules::new(0, 0, 0)).is_some());
    }

    #[test]
    fn owner_manages_members() {
        let s = ok(fresh(Rules::new(0, 0, 0)), OWNER, Msg::AddMember(M1));
        assert!(s.members.contains(&M1));
        assert!(send(s.clone(), OWNER, 0, Msg::AddMember(M1)).is_none());
        assert!(send(s.clone(), OWNER, 0, Msg::RemoveMember(M2)).is_none());
        assert!(send(s.clone(), M1, 0, Msg::AddMember(M2)).is_none());
        assert!(send(s.clone(), M1, 0, Msg::ChangeRules(Rules::new(1, 1, 1))).is_none());
        assert!(send(
            s.clone(),
            OWNER,
            0,
            Msg::ChangeRules(Rules::new(1001, 1, 1))
        )
        .is_none());
        let s = ok(s, OWNER, Msg::ChangeRules(Rules::new(1, 2, 3)));
        assert_eq!(s.rules, Rules::new(1, 2, 3));
        let s = ok(s, OWNER, Msg::TransferOwnership(SELF));
        assert_eq!(s.owner, SELF);
        assert!(send(s, OWNER, 0, Msg::AddMember(M2)).is_none());
    }

    #[test]
    fn votes_overwrite_and_retract() {
        let s = with_members(Rules::new(0, 0, 0), &[M1, M2]);
        let s = ok(s, M3, Msg::CreateProposal(two_transfers()));
        let s = ok(s, M1, Msg::VoteForProposal(1));
        let s = ok(s, M1, Msg::VoteForProposal(1));
        assert_eq!(s.proposals[&1].votes.len(), 1);
        let s = ok(s, M1, Msg::VoteAgainstProposal(1));
        assert_eq!(s.proposals[&1].votes[&M1], Vote::Against);
        assert!(send(s.clone(), M3, 0, Msg::VoteForProposal(1)).is_none());
        assert!(send(s.clone(), M1, 0, Msg::VoteForProposal(9)).is_none());
        assert!(send(s.clone(), M2, 0, Msg::RetractVote(1)).is_none());
        let s = ok(s, M1, Msg::RetractVote(1));
        assert!(s.proposals[&1].votes.is_empty());
    }

    #[test]
    fn removing_member_drops_votes() {
        let s = with_members(Rules::new(0, 0, 0), &[M1, M2]);
        let s = ok(s, M1, Msg::CreateProposal(vec![]));
        let s = ok(s, M1, Msg::VoteForProposal(1));
        let s = ok(s, M2, Msg::VoteForProposal(1));
        let s = ok(s, OWNER, Msg::RemoveMember(M1));
        assert_eq!(s.proposals[&1].votes.keys().collect::<Vec<_>>(), vec![&M2]);
    }

    #[test]
    fn finish_respects_debating_period() {
        let s = with_members(Rules::new(0, 0, 3), &[M1]);
        let (s, _) = send(s, M1, 10, Msg::CreateProposal(two_transfers())).unwrap();
        assert_eq!(s.proposals[&1].proposed_in_slot, 10);
        assert!(send(s.clone(), M2, 12, Msg::FinishProposal(1)).is_none());
        assert!(send(s, M2, 13, Msg::FinishProposal(1)).is_some());
    }

    #[test]
    fn finish_passed_proposal_clears_then_emits() {
        let s = with_members(Rules::new(500, 501, 0), &[M1, M2, M3]);
        let s = ok(s, M1, Msg::CreateProposal(two_transfers()));
        let s = ok(s, M1, Msg::VoteForProposal(1));
        let s = ok(s, M2, Msg::VoteForProposal(1));
        let (s, acts) = send(s, OWNER, 0, Msg::FinishProposal(1)).unwrap();
        assert!(!s.proposals.contains_key(&1));
        let expected: Vec<ActionBody> = two_transfers()
            .iter()
            .map(CongressAction::to_action_body)
            .collect();
        assert_eq!(acts, expected);
        assert!(send(s, OWNER, 0, Msg::FinishProposal(1)).is_none());
    }

    #[test]
    fn finish_failed_proposal_emits_nothing() {
        let s = with_members(Rules::new(1000, 501, 0), &[M1, M2, M3]);
        let s = ok(s, M1, Msg::CreateProposal(two_transfers()));
        let s = ok(s, M1, Msg::VoteForProposal(1));
        let s = ok(s, M2, Msg::VoteForProposal(1));
        let (s, acts) = send(s, OWNER, 0, Msg::FinishProposal(1)).unwrap();
        assert!(!s.proposals.contains_key(&1));
        assert!(acts.is_empty());
    }

    #[test]
    fn buggy_finish_keeps_proposal() {
        let s = with_members(Rules::new(0, 0, 0), &[M1]);
        let s = ok(s, M1, Msg::CreateProposal(two_transfers()));
        let (s, acts) =
            buggy_congress_receive(&chain_at(0), &ctx(M2), s, Some(Msg::FinishProposal(1)))
                .unwrap();
        assert!(s.proposals.contains_key(&1));
        assert_eq!(acts.len(), 2);
        let (_, again) =
            buggy_congress_receive(&chain_at(0), &ctx(M2), s, Some(Msg::FinishProposal(1)))
                .unwrap();
        assert_eq!(again.len(), 2);
    }

    #[test]
    fn plain_transfer_accepted() {
        let s = fresh(Rules::new(0, 0, 0));
        let (after, acts) = congress_receive(&Chain::default(), &ctx(M1), s.clone(), None).unwrap();
        assert_eq!(after, s);
        assert!(acts.is_empty());
    }

    #[test]
    fn negative_amount_proposals_rejected() {
        let s = fresh(Rules::new(0, 0, 0));
        let bad = vec![CongressAction::Transfer {
            to: M1,
            amount: Amount(-1),
        }];
        assert!(send(s, M1, 0, Msg::CreateProposal(bad)).is_none());
    }

    #[test]
    fn passing_formula_examples() {
        let mut p = Proposal {
            actions: vec![],
            votes: BTreeMap::new(),
            proposed_in_slot: 0,
        };
        assert!(proposal_passed(&p, &Rules::new(0, 0, 0), 3));
        p.votes.insert(M1, Vote::For);
        p.votes.insert(M2, Vote::For);
        assert!(proposal_passed(&p, &Rules::new(500, 501, 0), 3));
        assert!(!proposal_passed(&p, &Rules::new(1000, 0, 0), 3));
    }

    #[test]
    fn passing_formula_matches_exhaustive_tally() {
        let thresholds = [0u32, 1, 333, 334, 500, 501, 666, 667, 999, 1000];
        for members in 0..=3usize {
            // each member: 0 abstain, 1 for, 2 against
            for code in 0..3usize.pow(members as u32) {
                let mut c = code;
                let assignment: Vec<Option<bool>> = (0..members)
                    .map(|_| {
                        let v = c % 3;
                        c /= 3;
                        match v {
                            0 => None,
                            1 => Some(true),
                            _ => Some(false),
                        }
                    })
                    .collect();
                let votes = assignment
                    .iter()
                    .enumerate()
                    .filter_map(|(i, v)| {
                        v.map(|b| {
                            (
                                Address(10 + i as u64),
                                if b { Vote::For } else { Vote::Against },
                            )
                        })
                    })
                    .collect();
                let p = Proposal {
                    actions: vec![],
                    votes,
                    proposed_in_slot: 0,
                };
                for &min in &thresholds {
                    for &margin in &thresholds {
                        assert_eq!(
                            proposal_passed(&p, &Rules::new(min, margin, 0), members),
                            tally_oracle(&assignment, min, margin),
                            "members {members} votes {assignment:?} rules {min}/{margin}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn wrapped_congress_round_trips_state() {
        let c = wrap_typed_contract("congress", Congress);
        let state = c
            .init(
                &Chain::default(),
                &ctx(OWNER),
                &serialize(&Rules::new(1, 2, 3)),
            )
            .unwrap();
        let (state, acts) = c
            .receive(
                &Chain::default(),
                &ctx(OWNER),
                &state,
                Some(&serialize(&Msg::AddMember(M1))),
            )
            .unwrap();
        assert!(acts.is_empty());
        let decoded: CongressState = deserialize(&state).unwrap();
        assert!(decoded.members.contains(&M1));
    }

    proptest! {
        #[test]
        fn msg_roundtrip(m in strategy::msg()) {
            prop_assert_eq!(deserialize::<Msg>(&serialize(&m)).unwrap(), m);
        }

        #[test]
        fn state_roundtrip(s in strategy::congress_state()) {
            prop_assert_eq!(deserialize::<CongressState>(&serialize(&s)).unwrap(), s);
        }

        #[test]
        fn handlers_respect_contract_invariants(
            s in strategy::congress_state(),
            from in strategy::address(),
            slot in 0u64..120,
            m in strategy::msg(),
        ) {
            let before = s.clone();
            let out = send(s.clone(), from, slot, m.clone());
            if let Some((after, acts)) = out {
                match &m {
                    Msg::FinishProposal(id) => {
                        prop_assert!(!after.proposals.contains_key(id));
                        let p = &before.proposals[id];
                        if acts.is_empty() {
                            prop_assert!(p.actions.is_empty() || !proposal_passed(p, &before.rules, before.members.len()));
                        } else {
                            let expected: Vec<ActionBody> = p.actions.iter().map(CongressAction::to_action_body).collect();
                            prop_assert_eq!(&acts, &expected);
                        }
                        let no_deploys = acts.iter().all(|a| !matches!(a, ActionBody::Deploy { .. }));
                        prop_assert!(no_deploys);
                        prop_assert_eq!(&after.members, &before.members);
                        prop_assert_eq!(after.rules, before.rules);
                    }
                    _ => prop_assert!(acts.is_empty()),
                }
                match &m {
                    Msg::AddMember(_) | Msg::TransferOwnership(_) | Msg::ChangeRules(_) => {
                        prop_assert_eq!(&after.proposals, &before.proposals);
                    }
                    Msg::VoteForProposal(_) | Msg::VoteAgainstProposal(_) | Msg::RetractVote(_) | Msg::CreateProposal(_) => {
                        prop_assert_eq!(&after.members, &before.members);
                        prop_assert_eq!(after.owner, before.owner);
                        prop_assert_eq!(after.rules, before.rules);
                    }
                    _ => {}
                }
            }
        }

        #[test]
        fn buggy_differs_only_on_finish(
            s in strategy::congress_state(),
            from in strategy::address(),
            slot in 0u64..120,
            m in strategy::msg(),
        ) {
            let correct = congress_receive(&chain_at(slot), &ctx(from), s.clone(), Some(m.clone()));
            let buggy = buggy_congress_receive(&chain_at(slot), &ctx(from), s.clone(), Some(m.clone()));
            match m {
                Msg::FinishProposal(id) => {
                    prop_assert_eq!(correct.is_some(), buggy.is_some());
                    if let (Some((c, ca)), Some((b, ba))) = (correct, buggy) {
                        prop_assert_eq!(ca, ba);
                        prop_assert!(b.proposals.contains_key(&id));
                        let mut b = b;
                        b.proposals.remove(&id);
                        prop_assert_eq!(c, b);
                    }
                }
                _ => prop_assert_eq!(
                    correct.map(|(st, a)| (serialize(&st), a)),
                    buggy.map(|(st, a)| (serialize(&st), a))
                ),
            }
        }

        #[test]
        fn vote_count_bounded_by_members(msgs in prop::collection::vec((strategy::address(), strategy::msg()), 0..40)) {
            let mut s = fresh(Rules::new(0, 0, 0));
            for (slot, (from, m)) in msgs.into_iter().enumerate() {
                if let Some((next, _)) = send(s.clone(), from, slot as u64, m) {
                    s = next;
                }
                for p in s.proposals.values() {
                    prop_assert!(p.votes.len() <= s.members.len());
                    prop_assert!(p.votes.keys().all(|v| s.members.contains(v)));
                }
            }
        }
    }
}
