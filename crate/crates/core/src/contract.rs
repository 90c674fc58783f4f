//! Contract representations.
//!
//! The engine only sees [`DynamicContract`]s, whose functions take and return
//! [`SerializedValue`]s. Contract authors implement [`TypedContract`] over
//! their own setup, state and message types and wrap it with
//! [`wrap_typed_contract`].

use std::fmt;
use std::sync::Arc;

use crate::types::{ActionBody, Chain, ContractCallContext};
use crate::value::{Serializable, SerializedValue};

/// Dynamically typed contract code. Both functions must be pure.
pub trait WeakContract: Send + Sync {
    fn init(
        &self,
        chain: &Chain,
        ctx: &ContractCallContext,
        setup: &SerializedValue,
    ) -> Option<SerializedValue>;

    fn receive(
        &self,
        chain: &Chain,
        ctx: &ContractCallContext,
        state: &SerializedValue,
        msg: Option<&SerializedValue>,
    ) -> Option<(SerializedValue, Vec<ActionBody>)>;
}

/// Contract code together with the registry name identifying it.
///
/// Code cannot be compared extensionally, so two contracts are equal iff
/// their names are equal.
#[derive(Clone)]
pub struct DynamicContract {
    name: Arc<str>,
    code: Arc<dyn WeakContract>,
}

impl DynamicContract {
    pub fn new(name: impl Into<Arc<str>>, code: impl WeakContract + 'static) -> Self {
        DynamicContract {
            name: name.into(),
            code: Arc::new(code),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn init(
        &self,
        chain: &Chain,
        ctx: &ContractCallContext,
        setup: &SerializedValue,
    ) -> Option<SerializedValue> {
        self.code.init(chain, ctx, setup)
    }

    pub fn receive(
        &self,
        chain: &Chain,
        ctx: &ContractCallContext,
        state: &SerializedValue,
        msg: Option<&SerializedValue>,
    ) -> Option<(SerializedValue, Vec<ActionBody>)> {
        self.code.receive(chain, ctx, state, msg)
    }
}

impl PartialEq for DynamicContract {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Eq for DynamicContract {}

impl fmt::Debug for DynamicContract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DynamicContract({})", self.name)
    }
}

/// A contract over concrete setup, state and message types.
pub trait TypedContract: Send + Sync {
    type Setup: Serializable;
    type State: Serializable;
    type Msg: Serializable;

    fn init(
        &self,
        chain: &Chain,
        ctx: &ContractCallContext,
        setup: Self::Setup,
    ) -> Option<Self::State>;

    fn receive(
        &self,
        chain: &Chain,
        ctx: &ContractCallContext,
        state: Self::State,
        msg: Option<Self::Msg>,
    ) -> Option<(Self::State, Vec<ActionBody>)>;
}

struct Wrapped<C>(C);

impl<C: TypedContract> WeakContract for Wrapped<C> {
    fn init(
        &self,
        chain: &Chain,
        ctx: &ContractCallContext,
        setup: &SerializedValue,
    ) -> Option<SerializedValue> {
        let setup = C::Setup::from_serialized(setup).ok()?;
        self.0.init(chain, ctx, setup).map(|s| s.to_serialized())
    }

    fn receive(
        &self,
        chain: &Chain,
        ctx: &ContractCallContext,
        state: &SerializedValue,
        msg: Option<&SerializedValue>,
    ) -> Option<(SerializedValue, Vec<ActionBody>)> {
        let state = C::State::from_serialized(state).ok()?;
        let msg = match msg {
            None => None,
            Some(m) => Some(C::Msg::from_serialized(m).ok()?),
        };
        self.0
            .receive(chain, ctx, state, msg)
            .map(|(s, acts)| (s.to_serialized(), acts))
    }
}

/// Bridges a typed contract to the engine. Any setup, state or message that
/// fails to decode makes the wrapped function return `None`, i.e. the call is
/// rejected.
pub fn wrap_typed_contract<C>(name: impl Into<Arc<str>>, contract: C) -> DynamicContract
where
    C: TypedContract + 'static,
{
    DynamicContract::new(name, Wrapped(contract))
}
