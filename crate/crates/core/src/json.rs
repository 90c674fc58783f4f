//! JSON encodings of headers, actions, evaluations and traces.
//!
//! A trace file is an array of step records:
//!
//! ```json
//! [
//!   {"type": "block", "header": {...}, "actions": [...]},
//!   {"type": "evaluate", "action": {...}, "evaluation": {...}},
//!   {"type": "permute", "permutation": [1, 0]}
//! ]
//! ```
//!
//! Addresses, amounts, heights and slots are decimal strings. Integers are
//! also accepted on input. Deployed contracts are referenced by registry
//! name.

use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, DeserializeOwned, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::contract::DynamicContract;
use crate::contracts::{Registry, BUILTIN_NAMES};
use crate::execution::{ActionEvaluation, ChainStep, ChainTrace, EvalKind};
use crate::types::{Action, ActionBody, Address, Amount, BlockHeader};
use crate::value::SerializedValue;

/// Numbers as decimal strings; strings or JSON integers on input.
pub mod decimal {
    use super::*;

    pub fn serialize<T: fmt::Display, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(value)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: std::str::FromStr,
        T::Err: fmt::Display,
        D: Deserializer<'de>,
    {
        d.deserialize_any(DecimalVisitor(PhantomData))
    }

    struct DecimalVisitor<T>(PhantomData<T>);

    impl<T> DecimalVisitor<T>
    where
        T: std::str::FromStr,
        T::Err: fmt::Display,
    {
        fn parse<E: de::Error>(s: &str) -> Result<T, E> {
            if s.is_empty() || s.starts_with('+') || s.trim() != s {
                return Err(E::custom(format!("invalid decimal integer `{s}`")));
            }
            s.parse()
                .map_err(|e| E::custom(format!("invalid decimal integer `{s}`: {e}")))
        }
    }

    impl<T> Visitor<'_> for DecimalVisitor<T>
    where
        T: std::str::FromStr,
        T::Err: fmt::Display,
    {
        type Value = T;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("a decimal integer string or an integer")
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<T, E> {
            Self::parse(v)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<T, E> {
            Self::parse(&v.to_string())
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<T, E> {
            Self::parse(&v.to_string())
        }

        fn visit_u128<E: de::Error>(self, v: u128) -> Result<T, E> {
            Self::parse(&v.to_string())
        }

        fn visit_i128<E: de::Error>(self, v: i128) -> Result<T, E> {
            Self::parse(&v.to_string())
        }
    }

    /// Optional variant: `null` or absent means `None`.
    pub mod option {
        use super::*;

        pub fn serialize<T: fmt::Display, S: Serializer>(
            value: &Option<T>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            match value {
                Some(v) => s.collect_str(v),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, T, D>(d: D) -> Result<Option<T>, D::Error>
        where
            T: std::str::FromStr,
            T::Err: fmt::Display,
            D: Deserializer<'de>,
        {
            #[derive(Deserialize)]
            struct Wrap<T: std::str::FromStr>(#[serde(with = "super")] T)
            where
                T::Err: fmt::Display;
            Option::<Wrap<T>>::deserialize(d).map(|o| o.map(|Wrap(v)| v))
        }
    }
}

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown contract `{0}`")]
    UnknownContract(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct HeaderRepr {
    #[serde(with = "decimal")]
    pub block_height: u64,
    #[serde(with = "decimal")]
    pub slot: u64,
    #[serde(with = "decimal")]
    pub finalized_height: u64,
    #[serde(with = "decimal")]
    pub creator: Address,
    #[serde(with = "decimal")]
    pub reward: Amount,
}

impl From<&BlockHeader> for HeaderRepr {
    fn from(h: &BlockHeader) -> Self {
        HeaderRepr {
            block_height: h.block_height,
            slot: h.slot,
            finalized_height: h.finalized_height,
            creator: h.creator,
            reward: h.reward,
        }
    }
}

impl From<HeaderRepr> for BlockHeader {
    fn from(h: HeaderRepr) -> Self {
        BlockHeader {
            block_height: h.block_height,
            slot: h.slot,
            finalized_height: h.finalized_height,
            creator: h.creator,
            reward: h.reward,
        }
    }
}

/// A contract name restricted to the built-in registry, validated while
/// parsing so errors carry a position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BuiltinName(pub String);

impl Serialize for BuiltinName {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for BuiltinName {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        if BUILTIN_NAMES.contains(&name.as_str()) {
            Ok(BuiltinName(name))
        } else {
            Err(de::Error::custom(format!(
                "unknown contract `{name}`, expected one of {BUILTIN_NAMES:?}"
            )))
        }
    }
}

pub(crate) trait ContractName: Serialize + DeserializeOwned {
    fn from_name(name: &str) -> Self;
    fn as_str(&self) -> &str;
}

impl ContractName for String {
    fn from_name(name: &str) -> Self {
        name.to_owned()
    }

    fn as_str(&self) -> &str {
        self
    }
}

impl ContractName for BuiltinName {
    fn from_name(name: &str) -> Self {
        BuiltinName(name.to_owned())
    }

    fn as_str(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
#[serde(bound = "N: ContractName")]
pub(crate) enum BodyRepr<N> {
    Transfer {
        #[serde(with = "decimal")]
        to: Address,
        #[serde(with = "decimal")]
        amount: Amount,
    },
    Call {
        #[serde(with = "decimal")]
        to: Address,
        #[serde(with = "decimal")]
        amount: Amount,
        msg: SerializedValue,
    },
    Deploy {
        #[serde(with = "decimal")]
        amount: Amount,
        contract: N,
        setup: SerializedValue,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "N: ContractName")]
pub(crate) struct ActionRepr<N> {
    #[serde(with = "decimal")]
    pub from: Address,
    pub body: BodyRepr<N>,
}

impl<N: ContractName> ActionRepr<N> {
    pub fn from_action(a: &Action) -> Self {
        let body = match &a.act_body {
            ActionBody::Transfer { to, amount } => BodyRepr::Transfer {
                to: *to,
                amount: *amount,
            },
            ActionBody::Call { to, amount, msg } => BodyRepr::Call {
                to: *to,
                amount: *amount,
                msg: msg.clone(),
            },
            ActionBody::Deploy {
                amount,
                contract,
                setup,
            } => BodyRepr::Deploy {
                amount: *amount,
                contract: N::from_name(contract.name()),
                setup: setup.clone(),
            },
        };
        ActionRepr {
            from: a.act_from,
            body,
        }
    }

    pub fn into_action(self, registry: &Registry) -> Result<Action, FileError> {
        let body = match self.body {
            BodyRepr::Transfer { to, amount } => ActionBody::Transfer { to, amount },
            BodyRepr::Call { to, amount, msg } => ActionBody::Call { to, amount, msg },
            BodyRepr::Deploy {
                amount,
                contract,
                setup,
            } => ActionBody::Deploy {
                amount,
                contract: resolve(registry, contract.as_str())?,
                setup,
            },
        };
        Ok(Action::new(self.from, body))
    }
}

fn resolve(registry: &Registry, name: &str) -> Result<DynamicContract, FileError> {
    registry
        .get(name)
        .cloned()
        .ok_or_else(|| FileError::UnknownContract(name.to_owned()))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindRepr {
    Transfer,
    Deploy,
    Call,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvaluationRepr {
    kind: KindRepr,
    #[serde(with = "decimal")]
    from: Address,
    #[serde(with = "decimal")]
    to: Address,
    #[serde(with = "decimal")]
    amount: Amount,
    message: Option<SerializedValue>,
    #[serde(with = "decimal::option")]
    deployed_address: Option<Address>,
    new_actions: Vec<ActionRepr<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum StepRepr {
    Block {
        header: HeaderRepr,
        actions: Vec<ActionRepr<String>>,
    },
    Evaluate {
        action: ActionRepr<String>,
        evaluation: EvaluationRepr,
    },
    Permute {
        permutation: Vec<usize>,
    },
}

fn actions_repr(actions: &[Action]) -> Vec<ActionRepr<String>> {
    actions.iter().map(ActionRepr::from_action).collect()
}

fn actions_from(
    reprs: Vec<ActionRepr<String>>,
    registry: &Registry,
) -> Result<Vec<Action>, FileError> {
    reprs.into_iter().map(|a| a.into_action(registry)).collect()
}

impl StepRepr {
    fn from_step(step: &ChainStep) -> Self {
        match step {
            ChainStep::Block { header, actions } => StepRepr::Block {
                header: header.into(),
                actions: actions_repr(actions),
            },
            ChainStep::Evaluate {
                action,
                evaluation: e,
            } => StepRepr::Evaluate {
                action: ActionRepr::from_action(action),
                evaluation: EvaluationRepr {
                    kind: match e.kind {
                        EvalKind::Transfer => KindRepr::Transfer,
                        EvalKind::Deploy => KindRepr::Deploy,
                        EvalKind::Call => KindRepr::Call,
                    },
                    from: e.from,
                    to: e.to,
                    amount: e.amount,
                    message: e.message.clone(),
                    deployed_address: e.deployed_address,
                    new_actions: actions_repr(&e.new_actions),
                },
            },
            ChainStep::Permute { permutation } => StepRepr::Permute {
                permutation: permutation.clone(),
            },
        }
    }

    fn into_step(self, registry: &Registry) -> Result<ChainStep, FileError> {
        Ok(match self {
            StepRepr::Block { header, actions } => ChainStep::Block {
                header: header.into(),
                actions: actions_from(actions, registry)?,
            },
            StepRepr::Evaluate {
                action,
                evaluation: e,
            } => ChainStep::Evaluate {
                action: action.into_action(registry)?,
                evaluation: ActionEvaluation {
                    kind: match e.kind {
                        KindRepr::Transfer => EvalKind::Transfer,
                        KindRepr::Deploy => EvalKind::Deploy,
                        KindRepr::Call => EvalKind::Call,
                    },
                    from: e.from,
                    to: e.to,
                    amount: e.amount,
                    message: e.message,
                    deployed_address: e.deployed_address,
                    new_actions: actions_from(e.new_actions, registry)?,
                },
            },
            StepRepr::Permute { permutation } => ChainStep::Permute { permutation },
        })
    }
}

/// Renders a trace as a pretty-printed JSON array. Output is deterministic.
pub fn trace_to_json(trace: &ChainTrace) -> String {
    let steps: Vec<StepRepr> = trace.steps.iter().map(StepRepr::from_step).collect();
    serde_json::to_string_pretty(&steps).expect("trace renders")
}

/// Parses a trace file, resolving deployed contracts through `registry`.
/// The result is not validated; see [`crate::execution::replay_trace`].
pub fn trace_from_json(text: &str, registry: &Registry) -> Result<ChainTrace, FileError> {
    let steps: Vec<StepRepr> = serde_json::from_str(text)?;
    let steps = steps
        .into_iter()
        .map(|s| s.into_step(registry))
        .collect::<Result<_, _>>()?;
    Ok(ChainTrace::new(steps))
}
