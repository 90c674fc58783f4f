//! Seeded random Congress scenarios shared by the integration tests.
//!
//! Blocks are generated against a depth-first guide chain. Actions are drawn
//! one at a time from the state left by the previous ones (voters are
//! usually members, finished proposals are usually past their debate) and
//! kept only if the block still runs; a few rejected draws are retried.
#![allow(dead_code)]

use chainexec::contracts::attacker::AttackerState;
use chainexec::contracts::congress::{CongressAction, CongressState, Msg, Rules};
use chainexec::contracts::counter::CounterMsg;
use chainexec::contracts::{builtin_contract, ATTACKER, CONGRESS, COUNTER};
use std::io::Write;

use chainexec::execution::ChainStep;
use chainexec::scenario::{Scenario, ScenarioBlock};
use chainexec::{
    deserialize, serialize, Action, Address, Amount, BlockHeader, ChainBuilder, ChainTrace,
    ExecutionOrder,
};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const USERS: [Address; 5] = [Address(1), Address(2), Address(3), Address(4), Address(5)];
pub const ORDERS: [ExecutionOrder; 2] = [ExecutionOrder::DepthFirst, ExecutionOrder::BreadthFirst];

const ACTION_ATTEMPTS: usize = 3;

pub fn order_name(order: ExecutionOrder) -> &'static str {
    match order {
        ExecutionOrder::DepthFirst => "dfs",
        ExecutionOrder::BreadthFirst => "bfs",
    }
}

#[derive(Default)]
struct Known {
    congresses: Vec<Address>,
    counters: Vec<Address>,
    attackers: Vec<Address>,
}

impl Known {
    fn of(guide: &ChainBuilder) -> Self {
        let mut known = Known::default();
        for (addr, code) in guide.env().contracts() {
            match code.name() {
                CONGRESS => known.congresses.push(addr),
                COUNTER => known.counters.push(addr),
                ATTACKER => known.attackers.push(addr),
                _ => {}
            }
        }
        known
    }

    fn contracts(&self) -> Vec<Address> {
        let mut all = self.congresses.clone();
        all.extend(&self.counters);
        all.extend(&self.attackers);
        all
    }
}

fn congress_state(guide: &ChainBuilder, addr: Address) -> CongressState {
    deserialize(
        guide
            .env()
            .contract_state(addr)
            .expect("congress has state"),
    )
    .expect("congress state decodes")
}

fn user(rng: &mut ChaCha8Rng) -> Address {
    *USERS.choose(rng).expect("users")
}

/// Mostly lenient rules, so that a good share of proposals pass.
fn random_rules(rng: &mut ChaCha8Rng) -> Rules {
    let ceiling = if rng.random_bool(0.7) { 600 } else { 1000 };
    Rules::new(
        rng.random_range(0..=ceiling),
        rng.random_range(0..=ceiling),
        rng.random_range(0..=2),
    )
}

fn random_counter_msg(rng: &mut ChaCha8Rng) -> CounterMsg {
    if rng.random_bool(0.5) {
        CounterMsg::Increment
    } else {
        CounterMsg::Add(rng.random_range(-5..=5))
    }
}

/// A message `sender` may put in a proposal for the Congress `target`
/// (possibly itself). Mostly messages the target will accept.
fn nested_msg(rng: &mut ChaCha8Rng, sender: Address, target: &CongressState) -> Msg {
    let pid = rng.random_range(1..=target.next_proposal_id.max(1));
    match rng.random_range(0..10) {
        0..=2 if target.owner == sender => Msg::AddMember(user(rng)),
        3 => Msg::FinishProposal(pid),
        4 => Msg::RetractVote(pid),
        _ => Msg::CreateProposal(vec![CongressAction::Transfer {
            to: user(rng),
            amount: Amount(rng.random_range(0..=3)),
        }]),
    }
}

fn random_congress_action(
    rng: &mut ChaCha8Rng,
    guide: &ChainBuilder,
    known: &Known,
    sender: Address,
) -> CongressAction {
    match rng.random_range(0..10) {
        0..=5 => {
            let to = if rng.random_bool(0.8) || known.contracts().is_empty() {
                user(rng)
            } else {
                *known.contracts().choose(rng).expect("contracts")
            };
            CongressAction::Transfer {
                to,
                amount: Amount(rng.random_range(0..=20)),
            }
        }
        6 | 7 if !known.counters.is_empty() => CongressAction::Call {
            to: *known.counters.choose(rng).expect("counter"),
            amount: Amount(rng.random_range(0..=5)),
            msg: serialize(&random_counter_msg(rng)),
        },
        _ => {
            let to = *known.congresses.choose(rng).expect("congress");
            let target = congress_state(guide, to);
            CongressAction::Call {
                to,
                amount: Amount(rng.random_range(0..=2)),
                msg: serialize(&nested_msg(rng, sender, &target)),
            }
        }
    }
}

fn call(from: Address, to: Address, amount: i128, msg: &Msg) -> Action {
    Action::call(from, to, amount, serialize(msg))
}

fn random_action(rng: &mut ChaCha8Rng, guide: &ChainBuilder, known: &Known, slot: u64) -> Action {
    let env = guide.env();
    let congress = *known.congresses.choose(rng).expect("congress");
    let state = congress_state(guide, congress);
    let members: Vec<Address> = state.members.iter().copied().collect();
    let pids: Vec<u64> = state.proposals.keys().copied().collect();
    let member_or_user = |rng: &mut ChaCha8Rng| {
        if !members.is_empty() && rng.random_bool(0.9) {
            *members.choose(rng).expect("member")
        } else {
            user(rng)
        }
    };
    let pid_or_any = |rng: &mut ChaCha8Rng| {
        if !pids.is_empty() && rng.random_bool(0.9) {
            *pids.choose(rng).expect("pid")
        } else {
            rng.random_range(1..=state.next_proposal_id.max(1))
        }
    };
    let owner_is_user = USERS.contains(&state.owner);

    match rng.random_range(0..100) {
        0..=9 => {
            let from = user(rng);
            let to = if rng.random_bool(0.7) {
                user(rng)
            } else {
                *known.contracts().choose(rng).expect("contracts")
            };
            let cap = env.account_balance(from).value().max(0) / 2;
            Action::transfer(from, to, rng.random_range(0..=cap))
        }
        10..=17 => {
            let from = user(rng);
            let cap = env.account_balance(from).value().max(0) / 2;
            Action::transfer(from, congress, rng.random_range(0..=cap))
        }
        18..=37 => {
            let count = rng.random_range(0..=5);
            let actions = (0..count)
                .map(|_| random_congress_action(rng, guide, known, congress))
                .collect();
            call(user(rng), congress, 0, &Msg::CreateProposal(actions))
        }
        38..=57 => {
            let voter = member_or_user(rng);
            let pid = pid_or_any(rng);
            let msg = if rng.random_bool(0.75) {
                Msg::VoteForProposal(pid)
            } else {
                Msg::VoteAgainstProposal(pid)
            };
            call(voter, congress, 0, &msg)
        }
        58..=61 => {
            let voted: Vec<(u64, Address)> = state
                .proposals
                .iter()
                .flat_map(|(id, p)| p.votes.keys().map(move |v| (*id, *v)))
                .collect();
            let (pid, voter) = voted
                .choose(rng)
                .copied()
                .unwrap_or_else(|| (pid_or_any(rng), member_or_user(rng)));
            call(voter, congress, 0, &Msg::RetractVote(pid))
        }
        62..=79 => {
            let ready: Vec<(u64, bool)> = state
                .proposals
                .iter()
                .filter(|(_, p)| p.proposed_in_slot + state.rules.debating_period_in_blocks <= slot)
                .map(|(id, p)| (*id, p.votes_for() > 0))
                .collect();
            let supported: Vec<u64> = ready.iter().filter(|r| r.1).map(|r| r.0).collect();
            let pid = if !supported.is_empty() && rng.random_bool(0.8) {
                *supported.choose(rng).expect("supported")
            } else {
                match ready.choose(rng) {
                    Some((id, _)) if rng.random_bool(0.9) => *id,
                    _ => pid_or_any(rng),
                }
            };
            call(user(rng), congress, 0, &Msg::FinishProposal(pid))
        }
        80..=89 if owner_is_user => {
            let msg = match rng.random_range(0..10) {
                0..=5 => Msg::AddMember(user(rng)),
                6 | 7 => Msg::RemoveMember(member_or_user(rng)),
                8 => Msg::ChangeRules(random_rules(rng)),
                _ => Msg::TransferOwnership(if rng.random_bool(0.5) {
                    congress
                } else {
                    user(rng)
                }),
            };
            call(state.owner, congress, 0, &msg)
        }
        90..=94 if !known.counters.is_empty() => {
            let to = *known.counters.choose(rng).expect("counter");
            let msg = serialize(&random_counter_msg(rng));
            Action::call(user(rng), to, rng.random_range(0..=2), msg)
        }
        95..=97 => {
            let target = *known.congresses.choose(rng).expect("congress");
            let setup = AttackerState {
                remaining_reentries: rng.random_range(0..=3),
                target,
                proposal: pid_or_any(rng),
            };
            Action::deploy(
                user(rng),
                0,
                builtin_contract(ATTACKER).expect("attacker"),
                serialize(&setup),
            )
        }
        98 => {
            let code = builtin_contract(CONGRESS).expect("congress");
            Action::deploy(user(rng), 0, code, serialize(&random_rules(rng)))
        }
        _ => {
            let code = builtin_contract(COUNTER).expect("counter");
            Action::deploy(
                user(rng),
                0,
                code,
                serialize(&rng.random_range(-10i128..=10)),
            )
        }
    }
}

fn next_header(rng: &mut ChaCha8Rng, guide: &ChainBuilder) -> BlockHeader {
    let chain = &guide.env().chain;
    BlockHeader {
        block_height: chain.chain_height + 1,
        slot: chain.current_slot + rng.random_range(1..=3),
        finalized_height: rng.random_range(chain.finalized_height..=chain.chain_height),
        creator: user(rng),
        reward: Amount(rng.random_range(0..=60)),
    }
}

fn genesis(rng: &mut ChaCha8Rng) -> ScenarioBlock {
    let owner = user(rng);
    let congress = Address::contract(0).expect("address");
    let mut actions = vec![
        Action::deploy(
            owner,
            0,
            builtin_contract(CONGRESS).expect("congress"),
            serialize(&random_rules(rng)),
        ),
        Action::deploy(
            user(rng),
            0,
            builtin_contract(COUNTER).expect("counter"),
            serialize(&0i128),
        ),
    ];
    let mut members: Vec<Address> = USERS
        .iter()
        .copied()
        .filter(|_| rng.random_bool(0.6))
        .collect();
    if members.is_empty() {
        members.push(owner);
    }
    for m in members {
        actions.push(call(owner, congress, 0, &Msg::AddMember(m)));
    }
    actions.push(Action::transfer(
        owner,
        congress,
        rng.random_range(50..=250),
    ));
    ScenarioBlock {
        header: BlockHeader {
            block_height: 1,
            slot: 1,
            finalized_height: 0,
            creator: owner,
            reward: Amount(300),
        },
        actions,
    }
}

/// A random scenario; identical seeds give identical scenarios. Every block
/// is valid under depth-first execution.
pub fn generate(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut guide = ChainBuilder::new(ExecutionOrder::DepthFirst);
    let mut blocks = Vec::new();

    let first = genesis(&mut rng);
    guide = guide
        .add_block(first.header.clone(), first.actions.clone())
        .expect("genesis block runs");
    blocks.push(first);

    let block_count = rng.random_range(4..=16);
    for _ in 0..block_count {
        let header = next_header(&mut rng, &guide);
        let mut actions: Vec<Action> = Vec::new();
        let mut view = guide
            .add_block(header.clone(), Vec::new())
            .expect("empty block is valid");
        for _ in 0..rng.random_range(1..=6) {
            for _ in 0..ACTION_ATTEMPTS {
                let known = Known::of(&view);
                let mut candidate = actions.clone();
                candidate.push(random_action(&mut rng, &view, &known, header.slot));
                if let Ok(next) = guide.add_block(header.clone(), candidate.clone()) {
                    actions = candidate;
                    view = next;
                    break;
                }
            }
        }
        guide = view;
        blocks.push(ScenarioBlock { header, actions });
    }
    Scenario { blocks }
}

pub struct RunOutcome {
    pub builder: ChainBuilder,
    pub applied: usize,
    pub skipped: usize,
}

/// Adds the scenario's blocks under `order`, skipping blocks that fail.
/// Heights and finalized heights are renumbered to follow the blocks that
/// were actually added. `visit` sees the builder after every added block.
pub fn run_blocks(
    scenario: &Scenario,
    order: ExecutionOrder,
    mut visit: impl FnMut(&ChainBuilder),
) -> RunOutcome {
    let mut builder = ChainBuilder::new(order);
    let mut applied = 0;
    let mut skipped = 0;
    for block in &scenario.blocks {
        let chain = &builder.env().chain;
        let header = BlockHeader {
            block_height: chain.chain_height + 1,
            finalized_height: block
                .header
                .finalized_height
                .min(chain.chain_height)
                .max(chain.finalized_height),
            ..block.header.clone()
        };
        match builder.add_block(header, block.actions.clone()) {
            Ok(next) => {
                builder = next;
                applied += 1;
                visit(&builder);
            }
            Err(_) => skipped += 1,
        }
    }
    RunOutcome {
        builder,
        applied,
        skipped,
    }
}

pub fn total_rewards(trace: &ChainTrace) -> i128 {
    trace
        .steps
        .iter()
        .map(|s| match s {
            ChainStep::Block { header, .. } => header.reward.value(),
            _ => 0,
        })
        .sum()
}

pub fn correct_congresses(builder: &ChainBuilder) -> Vec<Address> {
    builder
        .env()
        .contracts()
        .filter(|(_, c)| c.name() == CONGRESS)
        .map(|(a, _)| a)
        .collect()
}

/// Prints one acceptance line and fails the test if the check did not pass.
/// Writes to stdout directly so the line shows even when output is captured.
pub fn report(id: &str, description: &str, passed: bool, detail: &str) {
    let status = if passed { "PASS" } else { "FAIL" };
    let line = format!("[{status}] {id} {description}: {detail}\n");
    let _ = std::io::stdout().write_all(line.as_bytes());
    assert!(passed, "{id} failed: {detail}");
}
