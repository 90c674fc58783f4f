//! A minimal counter, used in tests and examples.

use crate::contract::TypedContract;
use crate::types::{ActionBody, Chain, ContractCallContext};
use crate::value::{
    decode_variant, encode_variant, expect_unit, DecodeError, Serializable, SerializedValue,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterMsg {
    Increment,
    Add(i128),
}

impl Serializable for CounterMsg {
    fn to_serialized(&self) -> SerializedValue {
        match self {
            CounterMsg::Increment => encode_variant(0, 2, SerializedValue::Unit),
            CounterMsg::Add(n) => encode_variant(1, 2, n.to_serialized()),
        }
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        match decode_variant(value, 2)? {
            (0, payload) => expect_unit(payload).map(|_| CounterMsg::Increment),
            (_, payload) => i128::from_serialized(payload).map(CounterMsg::Add),
        }
    }
}

/// Setup is the initial count. Plain transfers are accepted and leave the
/// count unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct Counter;

impl TypedContract for Counter {
    type Setup = i128;
    type State = i128;
    type Msg = CounterMsg;

    fn init(&self, _chain: &Chain, _ctx: &ContractCallContext, setup: i128) -> Option<i128> {
        Some(setup)
    }

    fn receive(
        &self,
        _chain: &Chain,
        _ctx: &ContractCallContext,
        state: i128,
        msg: Option<CounterMsg>,
    ) -> Option<(i128, Vec<ActionBody>)> {
        let next = match msg {
            None => state,
            Some(CounterMsg::Increment) => state.checked_add(1)?,
            Some(CounterMsg::Add(n)) => state.checked_add(n)?,
        };
        Some((next, Vec::new()))
    }
}
