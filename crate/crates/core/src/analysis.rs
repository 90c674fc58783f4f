//! Transaction histories extracted from traces, and the Congress counting
//! invariant: a Congress never sends out more transactions than the number
//! of actions it was asked to hold in proposals.

use serde::Serialize;
use thiserror::Error;

use crate::contracts::congress::{CongressState, Msg};
use crate::contracts::is_congress;
use crate::environment::ChainState;
use crate::execution::{replay_trace, ChainStep, ChainTrace, EvalKind, ReplayError};
use crate::types::{Address, Amount};
use crate::value::{deserialize, DecodeError, SerializedValue};

/// One evaluated action, as observed on the chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tx {
    pub from: Address,
    /// Recipient, or the deployed address for deployments.
    pub to: Address,
    pub amount: Amount,
    pub message: Option<SerializedValue>,
    pub kind: EvalKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("invalid trace: {0}")]
    Replay(#[from] ReplayError),
    #[error("trace ends with {0} queued actions")]
    PendingActions(usize),
    #[error("no Congress deployed at {0}")]
    NotCongress(Address),
    #[error("Congress state at {addr} does not decode after step {step}: {source}")]
    UndecodableState {
        addr: Address,
        step: usize,
        #[source]
        source: DecodeError,
    },
    #[error("given state is not the result of replaying the trace")]
    StateMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub outgoing: usize,
    pub created: usize,
    pub failing_step: Option<usize>,
}

impl Verdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdict renders")
    }
}

fn tx_of_step(step: &ChainStep) -> Option<Tx> {
    match step {
        ChainStep::Evaluate { evaluation: e, .. } => Some(Tx {
            from: e.from,
            to: e.to,
            amount: e.amount,
            message: e.message.clone(),
            kind: e.kind,
        }),
        _ => None,
    }
}

/// Every transaction in the trace, in order. Does not validate the trace.
pub fn transactions(trace: &ChainTrace) -> Vec<Tx> {
    trace.steps.iter().filter_map(tx_of_step).collect()
}

pub fn outgoing_txs(trace: &ChainTrace, addr: Address) -> Result<Vec<Tx>, ReplayError> {
    replay_trace(trace)?;
    Ok(transactions(trace)
        .into_iter()
        .filter(|t| t.from == addr)
        .collect())
}

/// Transactions whose recipient is `addr`; a deployment counts as incoming
/// to the address it deployed to.
pub fn incoming_txs(trace: &ChainTrace, addr: Address) -> Result<Vec<Tx>, ReplayError> {
    replay_trace(trace)?;
    Ok(transactions(trace)
        .into_iter()
        .filter(|t| t.to == addr)
        .collect())
}

fn created_in(tx: &Tx) -> usize {
    match tx.message.as_ref().map(deserialize::<Msg>) {
        Some(Ok(Msg::CreateProposal(actions))) => actions.len(),
        _ => 0,
    }
}

/// Total number of actions in `CreateProposal` messages among `txs`.
/// Messages that are not Congress messages count as zero.
pub fn num_acts_created_in_proposals(txs: &[Tx]) -> usize {
    txs.iter().map(created_in).sum()
}

/// Checks `|outgoing_txs| <= num_acts_created_in_proposals(incoming_txs)`
/// for the Congress at `addr` on a trace ending with an empty queue.
pub fn check_congress_invariant(
    trace: &ChainTrace,
    addr: Address,
) -> Result<Verdict, AnalysisError> {
    let state = replay_trace(trace)?;
    if !state.queue.is_empty() {
        return Err(AnalysisError::PendingActions(state.queue.len()));
    }
    let txs = transactions(trace);
    let outgoing = txs.iter().filter(|t| t.from == addr).count();
    let incoming: Vec<Tx> = txs.into_iter().filter(|t| t.to == addr).collect();
    let created = num_acts_created_in_proposals(&incoming);
    Ok(Verdict {
        holds: outgoing <= created,
        outgoing,
        created,
        failing_step: None,
    })
}

/// Components of the strengthened inequality at one point of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Accounting {
    pub outgoing: usize,
    /// Actions held in the Congress's live proposals.
    pub stored: usize,
    /// Queued actions originating from the Congress.
    pub queued: usize,
    pub created: usize,
}

impl Accounting {
    pub fn holds(&self) -> bool {
        self.outgoing + self.stored + self.queued <= self.created
    }
}

/// Replays `trace`, computing the strengthened accounting for `addr` after
/// every step.
pub fn strengthened_accounting(
    trace: &ChainTrace,
    addr: Address,
) -> Result<(ChainState, Vec<Accounting>), AnalysisError> {
    let mut outgoing = 0;
    let mut created = 0;
    let mut rows = Vec::with_capacity(trace.len());
    let mut failure = None;
    let state = trace.replay_each(|index, step, state| {
        if failure.is_some() {
            return;
        }
        if let Some(tx) = tx_of_step(step) {
            if tx.from == addr {
                outgoing += 1;
            }
            if tx.to == addr {
                created += created_in(&tx);
            }
        }
        let stored = match (state.env.contract(addr), state.env.contract_state(addr)) {
            (Some(code), Some(raw)) if is_congress(code.name()) => {
                match deserialize::<CongressState>(raw) {
                    Ok(s) => s.stored_action_count(),
                    Err(source) => {
                        failure = Some(AnalysisError::UndecodableState {
                            addr,
                            step: index,
                            source,
                        });
                        return;
                    }
                }
            }
            (Some(_), _) => {
                failure = Some(AnalysisError::NotCongress(addr));
                return;
            }
            _ => 0,
        };
        let queued = state.queue.iter().filter(|a| a.act_from == addr).count();
        rows.push(Accounting {
            outgoing,
            stored,
            queued,
            created,
        });
    })?;
    if let Some(err) = failure {
        return Err(err);
    }
    match state.env.contract(addr) {
        Some(code) if is_congress(code.name()) => Ok((state, rows)),
        _ => Err(AnalysisError::NotCongress(addr)),
    }
}

/// Checks `outgoing + stored + queued <= created` after every step of
/// `trace`, where `state` must be the result of replaying it. Reports the
/// first failing step.
pub fn check_strengthened_invariant(
    state: &ChainState,
    trace: &ChainTrace,
    addr: Address,
) -> Result<Verdict, AnalysisError> {
    let (replayed, rows) = strengthened_accounting(trace, addr)?;
    if !replayed.equivalent(state) {
        return Err(AnalysisError::StateMismatch);
    }
    let failing = rows.iter().position(|r| !r.holds());
    let at = failing.map(|i| rows[i]).or(rows.last().copied());
    let (outgoing, created) = at.map(|r| (r.outgoing, r.created)).unwrap_or((0, 0));
    Ok(Verdict {
        holds: failing.is_none(),
        outgoing,
        created,
        failing_step: failing,
    })
}

/// Addresses in `state` hosting either Congress variant.
pub fn congress_addresses(state: &ChainState) -> Vec<Address> {
    state
        .env
        .contracts()
        .filter(|(_, c)| is_congress(c.name()))
        .map(|(a, _)| a)
        .collect()
}
