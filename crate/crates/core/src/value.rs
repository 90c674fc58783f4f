//! Tagged dynamic values.
//!
//! Contracts have heterogeneous setup, state and message types, while the
//! engine handles all of them uniformly through [`SerializedValue`]. Typed
//! values cross that boundary through the [`Serializable`] trait.
//!
//! Composite user types are built from the closed tag set:
//!
//! * records are right-nested pairs: `(a, b, c)` is `Pair(a, Pair(b, c))`;
//! * an enumeration with `n` variants is a chain of sums, see
//!   [`encode_variant`]: variant `i < n - 1` is `Right^i(Left(payload))` and
//!   the last variant is `Right^(n-1)(payload)`;
//! * `Option<T>` is `Left(Unit)` for `None` and `Right(v)` for `Some(v)`;
//! * `Vec`, `BTreeSet` and `BTreeMap` (as pairs) are lists.
//!
//! The JSON text form is `{"tag": ..., ...}`. Integers and addresses are
//! rendered as decimal strings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::types::{Address, Amount};

/// Branch of a binary sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn index(self) -> u8 {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }

    pub fn from_index(index: u8) -> Option<Side> {
        match index {
            0 => Some(Side::Left),
            1 => Some(Side::Right),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SerializedValue {
    Unit,
    Bool(bool),
    Int(i128),
    Address(Address),
    Pair(Box<SerializedValue>, Box<SerializedValue>),
    Sum(Side, Box<SerializedValue>),
    List(Vec<SerializedValue>),
}

impl SerializedValue {
    pub fn pair(fst: SerializedValue, snd: SerializedValue) -> Self {
        SerializedValue::Pair(Box::new(fst), Box::new(snd))
    }

    pub fn left(v: SerializedValue) -> Self {
        SerializedValue::Sum(Side::Left, Box::new(v))
    }

    pub fn right(v: SerializedValue) -> Self {
        SerializedValue::Sum(Side::Right, Box::new(v))
    }

    pub fn tag_name(&self) -> &'static str {
        match self {
            SerializedValue::Unit => "unit",
            SerializedValue::Bool(_) => "bool",
            SerializedValue::Int(_) => "int",
            SerializedValue::Address(_) => "address",
            SerializedValue::Pair(..) => "pair",
            SerializedValue::Sum(..) => "sum",
            SerializedValue::List(_) => "list",
        }
    }

    /// Nesting depth; atoms have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            SerializedValue::Pair(a, b) => 1 + a.depth().max(b.depth()),
            SerializedValue::Sum(_, v) => 1 + v.depth(),
            SerializedValue::List(items) => 1 + items.iter().map(|v| v.depth()).max().unwrap_or(0),
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serialized values always render")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

impl fmt::Display for SerializedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SerializedValue::Unit => write!(f, "()"),
            SerializedValue::Bool(b) => write!(f, "{b}"),
            SerializedValue::Int(i) => write!(f, "{i}"),
            SerializedValue::Address(a) => write!(f, "@{a}"),
            SerializedValue::Pair(a, b) => write!(f, "({a}, {b})"),
            SerializedValue::Sum(Side::Left, v) => write!(f, "inl {v}"),
            SerializedValue::Sum(Side::Right, v) => write!(f, "inr {v}"),
            SerializedValue::List(items) => {
                write!(f, "[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("expected {expected}, found {found}")]
    Shape {
        expected: &'static str,
        found: &'static str,
    },
    #[error("integer {value} out of range for {target}")]
    OutOfRange { value: i128, target: &'static str },
    #[error("duplicate key in map or set")]
    DuplicateKey,
}

impl DecodeError {
    fn shape(expected: &'static str, found: &SerializedValue) -> Self {
        DecodeError::Shape {
            expected,
            found: found.tag_name(),
        }
    }
}

/// A type with a codec to and from [`SerializedValue`].
///
/// Implementations must satisfy `from_serialized(&v.to_serialized()) == Ok(v)`.
pub trait Serializable: Sized {
    fn to_serialized(&self) -> SerializedValue;
    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError>;
}

pub fn serialize<T: Serializable>(value: &T) -> SerializedValue {
    value.to_serialized()
}

pub fn deserialize<T: Serializable>(value: &SerializedValue) -> Result<T, DecodeError> {
    T::from_serialized(value)
}

/// Encodes variant `index` of an enumeration with `count` variants.
pub fn encode_variant(index: usize, count: usize, payload: SerializedValue) -> SerializedValue {
    assert!(index < count, "variant {index} out of {count}");
    if count == 1 {
        payload
    } else if index == 0 {
        SerializedValue::left(payload)
    } else {
        SerializedValue::right(encode_variant(index - 1, count - 1, payload))
    }
}

/// Inverse of [`encode_variant`]: returns the variant index and its payload.
pub fn decode_variant(
    value: &SerializedValue,
    count: usize,
) -> Result<(usize, &SerializedValue), DecodeError> {
    let mut current = value;
    let mut index = 0;
    let mut remaining = count;
    loop {
        if remaining <= 1 {
            return Ok((index, current));
        }
        match current {
            SerializedValue::Sum(Side::Left, payload) => return Ok((index, payload)),
            SerializedValue::Sum(Side::Right, rest) => {
                index += 1;
                remaining -= 1;
                current = rest;
            }
            other => return Err(DecodeError::shape("sum", other)),
        }
    }
}

pub fn expect_unit(value: &SerializedValue) -> Result<(), DecodeError> {
    <()>::from_serialized(value)
}

impl Serializable for SerializedValue {
    fn to_serialized(&self) -> SerializedValue {
        self.clone()
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        Ok(value.clone())
    }
}

impl Serializable for () {
    fn to_serialized(&self) -> SerializedValue {
        SerializedValue::Unit
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        match value {
            SerializedValue::Unit => Ok(()),
            other => Err(DecodeError::shape("unit", other)),
        }
    }
}

impl Serializable for bool {
    fn to_serialized(&self) -> SerializedValue {
        SerializedValue::Bool(*self)
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        match value {
            SerializedValue::Bool(b) => Ok(*b),
            other => Err(DecodeError::shape("bool", other)),
        }
    }
}

fn int_of(value: &SerializedValue) -> Result<i128, DecodeError> {
    match value {
        SerializedValue::Int(i) => Ok(*i),
        other => Err(DecodeError::shape("int", other)),
    }
}

macro_rules! int_codec {
    ($($ty:ty),*) => {
        $(
            impl Serializable for $ty {
                fn to_serialized(&self) -> SerializedValue {
                    SerializedValue::Int(i128::from(*self))
                }

                fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
                    let i = int_of(value)?;
                    <$ty>::try_from(i).map_err(|_| DecodeError::OutOfRange {
                        value: i,
                        target: stringify!($ty),
                    })
                }
            }
        )*
    };
}

int_codec!(i128, i64, i32, u64, u32, u16, u8);

impl Serializable for Amount {
    fn to_serialized(&self) -> SerializedValue {
        SerializedValue::Int(self.0)
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        int_of(value).map(Amount)
    }
}

impl Serializable for Address {
    fn to_serialized(&self) -> SerializedValue {
        SerializedValue::Address(*self)
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        match value {
            SerializedValue::Address(a) => Ok(*a),
            other => Err(DecodeError::shape("address", other)),
        }
    }
}

impl<A: Serializable, B: Serializable> Serializable for (A, B) {
    fn to_serialized(&self) -> SerializedValue {
        SerializedValue::pair(self.0.to_serialized(), self.1.to_serialized())
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        match value {
            SerializedValue::Pair(a, b) => Ok((A::from_serialized(a)?, B::from_serialized(b)?)),
            other => Err(DecodeError::shape("pair", other)),
        }
    }
}

impl<A: Serializable, B: Serializable, C: Serializable> Serializable for (A, B, C) {
    fn to_serialized(&self) -> SerializedValue {
        SerializedValue::pair(
            self.0.to_serialized(),
            SerializedValue::pair(self.1.to_serialized(), self.2.to_serialized()),
        )
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        let (a, (b, c)) = <(A, (B, C))>::from_serialized(value)?;
        Ok((a, b, c))
    }
}

impl<A: Serializable, B: Serializable, C: Serializable, D: Serializable> Serializable
    for (A, B, C, D)
{
    fn to_serialized(&self) -> SerializedValue {
        SerializedValue::pair(
            self.0.to_serialized(),
            SerializedValue::pair(
                self.1.to_serialized(),
                SerializedValue::pair(self.2.to_serialized(), self.3.to_serialized()),
            ),
        )
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        let (a, (b, (c, d))) = <(A, (B, (C, D)))>::from_serialized(value)?;
        Ok((a, b, c, d))
    }
}

impl<T: Serializable> Serializable for Option<T> {
    fn to_serialized(&self) -> SerializedValue {
        match self {
            None => SerializedValue::left(SerializedValue::Unit),
            Some(v) => SerializedValue::right(v.to_serialized()),
        }
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        match value {
            SerializedValue::Sum(Side::Left, inner) => expect_unit(inner).map(|_| None),
            SerializedValue::Sum(Side::Right, inner) => T::from_serialized(inner).map(Some),
            other => Err(DecodeError::shape("sum", other)),
        }
    }
}

impl<L: Serializable, R: Serializable> Serializable for Result<L, R> {
    fn to_serialized(&self) -> SerializedValue {
        match self {
            Ok(v) => SerializedValue::left(v.to_serialized()),
            Err(v) => SerializedValue::right(v.to_serialized()),
        }
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        match value {
            SerializedValue::Sum(Side::Left, inner) => L::from_serialized(inner).map(Ok),
            SerializedValue::Sum(Side::Right, inner) => R::from_serialized(inner).map(Err),
            other => Err(DecodeError::shape("sum", other)),
        }
    }
}

fn list_of(value: &SerializedValue) -> Result<&[SerializedValue], DecodeError> {
    match value {
        SerializedValue::List(items) => Ok(items),
        other => Err(DecodeError::shape("list", other)),
    }
}

impl<T: Serializable> Serializable for Vec<T> {
    fn to_serialized(&self) -> SerializedValue {
        SerializedValue::List(self.iter().map(Serializable::to_serialized).collect())
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        list_of(value)?.iter().map(T::from_serialized).collect()
    }
}

impl<T: Serializable + Ord> Serializable for BTreeSet<T> {
    fn to_serialized(&self) -> SerializedValue {
        SerializedValue::List(self.iter().map(Serializable::to_serialized).collect())
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        let mut set = BTreeSet::new();
        for item in list_of(value)? {
            if !set.insert(T::from_serialized(item)?) {
                return Err(DecodeError::DuplicateKey);
            }
        }
        Ok(set)
    }
}

impl<K: Serializable + Ord, V: Serializable> Serializable for BTreeMap<K, V> {
    fn to_serialized(&self) -> SerializedValue {
        SerializedValue::List(
            self.iter()
                .map(|(k, v)| SerializedValue::pair(k.to_serialized(), v.to_serialized()))
                .collect(),
        )
    }

    fn from_serialized(value: &SerializedValue) -> Result<Self, DecodeError> {
        let mut map = BTreeMap::new();
        for item in list_of(value)? {
            let (k, v) = <(K, V)>::from_serialized(item)?;
            if map.insert(k, v).is_some() {
                return Err(DecodeError::DuplicateKey);
            }
        }
        Ok(map)
    }
}

// JSON text form.

#[derive(Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "lowercase", deny_unknown_fields)]
enum Repr {
    Unit {},
    Bool {
        value: bool,
    },
    Int {
        #[serde(with = "crate::json::decimal")]
        value: i128,
    },
    Address {
        #[serde(with = "crate::json::decimal")]
        value: u64,
    },
    Pair {
        fst: Box<SerializedValue>,
        snd: Box<SerializedValue>,
    },
    Sum {
        branch: u8,
        value: Box<SerializedValue>,
    },
    List {
        items: Vec<SerializedValue>,
    },
}

impl Serialize for SerializedValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            SerializedValue::Unit => Repr::Unit {},
            SerializedValue::Bool(value) => Repr::Bool { value: *value },
            SerializedValue::Int(value) => Repr::Int { value: *value },
            SerializedValue::Address(a) => Repr::Address { value: a.0 },
            SerializedValue::Pair(fst, snd) => Repr::Pair {
                fst: fst.clone(),
                snd: snd.clone(),
            },
            SerializedValue::Sum(side, value) => Repr::Sum {
                branch: side.index(),
                value: value.clone(),
            },
            SerializedValue::List(items) => Repr::List {
                items: items.clone(),
            },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SerializedValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(match Repr::deserialize(deserializer)? {
            Repr::Unit {} => SerializedValue::Unit,
            Repr::Bool { value } => SerializedValue::Bool(value),
            Repr::Int { value } => SerializedValue::Int(value),
            Repr::Address { value } => SerializedValue::Address(Address(value)),
            Repr::Pair { fst, snd } => SerializedValue::Pair(fst, snd),
            Repr::Sum { branch, value } => {
                let side = Side::from_index(branch).ok_or_else(|| {
                    serde::de::Error::custom(format!("sum branch must be 0 or 1, got {branch}"))
                })?;
                SerializedValue::Sum(side, value)
            }
            Repr::List { items } => SerializedValue::List(items),
        })
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn primitive_embeddings() {
        assert_eq!(serialize(&42i128), SerializedValue::Int(42));
        assert_eq!(serialize(&()), SerializedValue::Unit);
        assert_eq!(
            serialize(&(true, vec![1i128, 2])),
            SerializedValue::pair(
                SerializedValue::Bool(true),
                SerializedValue::List(vec![SerializedValue::Int(1), SerializedValue::Int(2)])
            )
        );
    }

    #[test]
    fn decoding_checks_shape() {
        assert_eq!(deserialize::<i128>(&SerializedValue::Int(42)), Ok(42));
        assert!(matches!(
            deserialize::<i128>(&SerializedValue::Bool(true)),
            Err(DecodeError::Shape {
                expected: "int",
                found: "bool"
            })
        ));
        let pair = SerializedValue::pair(SerializedValue::Int(1), SerializedValue::Int(2));
        assert_eq!(deserialize::<(i128, i128)>(&pair), Ok((1, 2)));
    }

    #[test]
    fn narrow_integers_are_range_checked() {
        assert_eq!(
            deserialize::<u8>(&SerializedValue::Int(256)),
            Err(DecodeError::OutOfRange {
                value: 256,
                target: "u8"
            })
        );
        assert!(deserialize::<u64>(&SerializedValue::Int(-1)).is_err());
    }

    #[test]
    fn duplicate_map_keys_are_rejected() {
        let dup = SerializedValue::List(vec![serialize(&(1u64, true)), serialize(&(1u64, false))]);
        assert_eq!(
            deserialize::<BTreeMap<u64, bool>>(&dup),
            Err(DecodeError::DuplicateKey)
        );
    }

    #[test]
    fn variant_chain_layout() {
        let p = SerializedValue::Unit;
        assert_eq!(
            encode_variant(0, 3, p.clone()),
            SerializedValue::left(p.clone())
        );
        assert_eq!(
            encode_variant(1, 3, p.clone()),
            SerializedValue::right(SerializedValue::left(p.clone()))
        );
        assert_eq!(
            encode_variant(2, 3, p.clone()),
            SerializedValue::right(SerializedValue::right(p.clone()))
        );
        for i in 0..9 {
            let enc = encode_variant(i, 9, SerializedValue::Int(i as i128));
            let (j, payload) = decode_variant(&enc, 9).unwrap();
            assert_eq!(j, i);
            assert_eq!(payload, &SerializedValue::Int(i as i128));
        }
        assert!(decode_variant(&SerializedValue::Unit, 2).is_err());
    }

    #[test]
    fn json_shapes() {
        let v = SerializedValue::right(SerializedValue::pair(
            SerializedValue::Int(-7),
            SerializedValue::Address(Address(1 << 31)),
        ));
        assert_eq!(
            v.to_json(),
            r#"{"tag":"sum","branch":1,"value":{"tag":"pair","fst":{"tag":"int","value":"-7"},"snd":{"tag":"address","value":"2147483648"}}}"#
        );
        assert_eq!(SerializedValue::from_json(&v.to_json()).unwrap(), v);
        assert_eq!(
            SerializedValue::from_json(
                r#"{"tag":"int","value":"170141183460469231731687303715884105727"}"#
            )
            .unwrap(),
            SerializedValue::Int(i128::MAX)
        );
    }

    #[test]
    fn json_rejects_malformed_values() {
        assert!(
            SerializedValue::from_json(r#"{"tag":"sum","branch":2,"value":{"tag":"unit"}}"#)
                .is_err()
        );
        assert!(SerializedValue::from_json(r#"{"tag":"unit","extra":1}"#).is_err());
        assert!(SerializedValue::from_json(r#"{"tag":"float","value":"1"}"#).is_err());
        assert!(SerializedValue::from_json(r#"{"tag":"int","value":"12x"}"#).is_err());
    }

    proptest! {
        #[test]
        fn json_roundtrip(v in strategy::serialized_value(6)) {
            prop_assert!(v.depth() <= 6);
            prop_assert_eq!(SerializedValue::from_json(&v.to_json()).unwrap(), v);
        }

        #[test]
        fn typed_roundtrip(v in any::<Vec<(i64, Option<bool>)>>(), m in any::<BTreeMap<u32, (u64, i128)>>()) {
            prop_assert_eq!(deserialize::<Vec<(i64, Option<bool>)>>(&serialize(&v)).unwrap(), v);
            prop_assert_eq!(deserialize::<BTreeMap<u32, (u64, i128)>>(&serialize(&m)).unwrap(), m);
        }

        #[test]
        fn serialization_is_injective(a in any::<(u8, Vec<i32>)>(), b in any::<(u8, Vec<i32>)>()) {
            prop_assert_eq!(a == b, serialize(&a) == serialize(&b));
        }
    }
}
