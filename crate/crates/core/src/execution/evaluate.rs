use thiserror::Error;

use crate::environment::{BalanceOverflow, Environment};
use crate::types::{is_contract_address, Action, ActionBody, Address, Amount, ContractCallContext};
use crate::value::SerializedValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalKind {
    Transfer,
    Deploy,
    Call,
}

/// The record of how one action was evaluated, including the choices the
/// implementation made (the deployed address).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionEvaluation {
    pub kind: EvalKind,
    pub from: Address,
    /// Recipient, or the new contract's address for deployments.
    pub to: Address,
    pub amount: Amount,
    pub message: Option<SerializedValue>,
    pub deployed_address: Option<Address>,
    pub new_actions: Vec<Action>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("negative amount {0}")]
    NegativeAmount(Amount),
    #[error("{from} has balance {balance}, cannot send {amount}")]
    InsufficientBalance {
        from: Address,
        balance: Amount,
        amount: Amount,
    },
    #[error("no contract at address {0}")]
    NoContractAtAddress(Address),
    #[error("contract at {0} rejected the action")]
    ContractRejected(Address),
    #[error("{0} is not a free contract address")]
    InvalidDeployAddress(Address),
    #[error(transparent)]
    Overflow(#[from] BalanceOverflow),
}

/// Evaluates `action` in `env`.
///
/// `fresh_addr` is where a deployment places its contract; it is ignored for
/// transfers and calls. Transfers to contract addresses run the recipient's
/// `receive` without a message.
pub fn evaluate_action(
    env: &Environment,
    action: &Action,
    fresh_addr: Address,
) -> Result<(Environment, ActionEvaluation), EvalError> {
    let from = action.act_from;
    let amount = action.act_body.amount();
    if amount.is_negative() {
        return Err(EvalError::NegativeAmount(amount));
    }
    let balance = env.account_balance(from);
    if amount > balance {
        return Err(EvalError::InsufficientBalance {
            from,
            balance,
            amount,
        });
    }

    match &action.act_body {
        ActionBody::Transfer { to, .. } if !is_contract_address(*to) => {
            let new_env = env.clone().transfer_balance(from, *to, amount)?;
            let eval = ActionEvaluation {
                kind: EvalKind::Transfer,
                from,
                to: *to,
                amount,
                message: None,
                deployed_address: None,
                new_actions: Vec::new(),
            };
            Ok((new_env, eval))
        }
        ActionBody::Transfer { to, .. } => evaluate_call(env, from, *to, amount, None),
        ActionBody::Call { to, msg, .. } => evaluate_call(env, from, *to, amount, Some(msg)),
        ActionBody::Deploy {
            contract, setup, ..
        } => {
            if !is_contract_address(fresh_addr) || env.contract(fresh_addr).is_some() {
                return Err(EvalError::InvalidDeployAddress(fresh_addr));
            }
            let funded = env.clone().transfer_balance(from, fresh_addr, amount)?;
            let ctx = ContractCallContext {
                ctx_from: from,
                ctx_contract_address: fresh_addr,
                ctx_amount: amount,
            };
            let state = contract
                .init(&funded.chain, &ctx, setup)
                .ok_or(EvalError::ContractRejected(fresh_addr))?;
            let new_env = funded.register_contract(fresh_addr, contract.clone(), state);
            let eval = ActionEvaluation {
                kind: EvalKind::Deploy,
                from,
                to: fresh_addr,
                amount,
                message: None,
                deployed_address: Some(fresh_addr),
                new_actions: Vec::new(),
            };
            Ok((new_env, eval))
        }
    }
}

fn evaluate_call(
    env: &Environment,
    from: Address,
    to: Address,
    amount: Amount,
    msg: Option<&SerializedValue>,
) -> Result<(Environment, ActionEvaluation), EvalError> {
    let (contract, state) = match (env.contract(to), env.contract_state(to)) {
        (Some(c), Some(s)) => (c.clone(), s.clone()),
        _ => return Err(EvalError::NoContractAtAddress(to)),
    };
    let funded = env.clone().transfer_balance(from, to, amount)?;
    let ctx = ContractCallContext {
        ctx_from: from,
        ctx_contract_address: to,
        ctx_amount: amount,
    };
    let (new_state, bodies) = contract
        .receive(&funded.chain, &ctx, &state, msg)
        .ok_or(EvalError::ContractRejected(to))?;
    let new_env = funded.set_contract_state(to, new_state);
    let new_actions = bodies
        .into_iter()
        .map(|body| Action::new(to, body))
        .collect();
    let eval = ActionEvaluation {
        kind: EvalKind::Call,
        from,
        to,
        amount,
        message: msg.cloned(),
        deployed_address: None,
        new_actions,
    };
    Ok((new_env, eval))
}
