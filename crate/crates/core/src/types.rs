//! Static types and runtime values shared by every layer of the engine.

use std::fmt;

/// The type of a field, parameter, local, literal or method result.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeId {
    Int,
    Bool,
    /// Only valid as a method return type.
    Void,
    /// A registered enumeration, by name.
    Enum(String),
}

impl TypeId {
    pub fn enumeration(name: impl Into<String>) -> Self {
        TypeId::Enum(name.into())
    }

    pub fn is_void(&self) -> bool {
        matches!(self, TypeId::Void)
    }
}

impl fmt::Display for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeId::Int => f.write_str("int"),
            TypeId::Bool => f.write_str("bool"),
            TypeId::Void => f.write_str("void"),
            TypeId::Enum(name) => f.write_str(name),
        }
    }
}

/// A dynamic value. Literal bounds in the registry are also stored as values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Enum { ty: String, variant: String },
    /// The sole value produced by void calls.
    Unit,
}

impl Value {
    pub fn enum_variant(ty: impl Into<String>, variant: impl Into<String>) -> Self {
        Value::Enum {
            ty: ty.into(),
            variant: variant.into(),
        }
    }

    pub fn type_id(&self) -> TypeId {
        match self {
            Value::Int(_) => TypeId::Int,
            Value::Bool(_) => TypeId::Bool,
            Value::Enum { ty, .. } => TypeId::Enum(ty.clone()),
            Value::Unit => TypeId::Void,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Enum { ty, variant } => write!(f, "{ty}.{variant}"),
            Value::Unit => f.write_str("()"),
        }
    }
}
