//! The reflected design space: enumerations, fields and methods that generated
//! code may reference, each scoped by a `usable` flag, plus integer parameter
//! bounds attached to methods.
//!
//! A [`RegistryBuilder`] is mutable and single-threaded. [`RegistryBuilder::seal`]
//! validates it and produces an immutable [`Registry`] that can be shared freely.

use std::fmt::{self, Write as _};

use indexmap::IndexMap;
use thiserror::Error;

use crate::scope::Scope;
use crate::types::{TypeId, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumDef {
    pub name: String,
    pub variants: Vec<String>,
}

impl EnumDef {
    pub fn new<I, S>(name: impl Into<String>, variants: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        EnumDef {
            name: name.into(),
            variants: variants.into_iter().map(Into::into).collect(),
        }
    }

    pub fn has_variant(&self, variant: &str) -> bool {
        self.variants.iter().any(|v| v == variant)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDescriptor {
    pub name: String,
    pub ty: TypeId,
    pub usable: bool,
    pub writable: bool,
}

impl FieldDescriptor {
    /// A usable, read-only field.
    pub fn new(name: impl Into<String>, ty: TypeId) -> Self {
        FieldDescriptor {
            name: name.into(),
            ty,
            usable: true,
            writable: false,
        }
    }

    pub fn writable(mut self) -> Self {
        self.writable = true;
        self
    }

    pub fn hidden(mut self) -> Self {
        self.usable = false;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    Min,
    Max,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintKind::Min => "min",
            ConstraintKind::Max => "max",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamConstraint {
    pub param: String,
    pub kind: ConstraintKind,
    pub bound: Value,
}

impl ParamConstraint {
    pub fn min(param: impl Into<String>, bound: i64) -> Self {
        ParamConstraint {
            param: param.into(),
            kind: ConstraintKind::Min,
            bound: Value::Int(bound),
        }
    }

    pub fn max(param: impl Into<String>, bound: i64) -> Self {
        ParamConstraint {
            param: param.into(),
            kind: ConstraintKind::Max,
            bound: Value::Int(bound),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Param {
    pub name: String,
    pub ty: TypeId,
}

impl Param {
    pub fn new(name: impl Into<String>, ty: TypeId) -> Self {
        Param {
            name: name.into(),
            ty,
        }
    }
}

/// Operators exposed to generated code as ordinary methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Add,
    Sub,
    Less,
    Equal,
    DoNothing,
}

/// Where a method's behavior lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HostImpl {
    Builtin(Builtin),
    /// Dispatched by name to the world the code runs against.
    World,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDescriptor {
    pub name: String,
    pub params: Vec<Param>,
    pub return_type: TypeId,
    pub usable: bool,
    pub constraints: Vec<ParamConstraint>,
    pub host: Option<HostImpl>,
}

impl MethodDescriptor {
    /// A usable method implemented by the world, without constraints.
    pub fn new(name: impl Into<String>, params: Vec<Param>, return_type: TypeId) -> Self {
        MethodDescriptor {
            name: name.into(),
            params,
            return_type,
            usable: true,
            constraints: Vec::new(),
            host: Some(HostImpl::World),
        }
    }

    pub fn builtin(builtin: Builtin) -> Self {
        let int = || TypeId::Int;
        let (name, params, ret) = match builtin {
            Builtin::Add => ("Add", vec![Param::new("a", int()), Param::new("b", int())], int()),
            Builtin::Sub => ("Sub", vec![Param::new("a", int()), Param::new("b", int())], int()),
            Builtin::Less => (
                "Less",
                vec![Param::new("a", int()), Param::new("b", int())],
                TypeId::Bool,
            ),
            Builtin::Equal => (
                "Equal",
                vec![Param::new("a", int()), Param::new("b", int())],
                TypeId::Bool,
            ),
            Builtin::DoNothing => ("DoNothing", Vec::new(), TypeId::Void),
        };
        let mut method = MethodDescriptor::new(name, params, ret);
        method.host = Some(HostImpl::Builtin(builtin));
        method
    }

    pub fn with_constraint(mut self, constraint: ParamConstraint) -> Self {
        self.constraints.push(constraint);
        self
    }

    pub fn with_host(mut self, host: Option<HostImpl>) -> Self {
        self.host = host;
        self
    }

    pub fn hidden(mut self) -> Self {
        self.usable = false;
        self
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }

    /// Integer bounds declared for the parameter at `index`, as `(min, max)`.
    pub fn int_bounds(&self, index: usize) -> (Option<i64>, Option<i64>) {
        let Some(param) = self.params.get(index) else {
            return (None, None);
        };
        let mut min = None;
        let mut max = None;
        for c in self.constraints.iter().filter(|c| c.param == param.name) {
            if let Value::Int(bound) = c.bound {
                match c.kind {
                    ConstraintKind::Min => min = Some(min.map_or(bound, |m: i64| m.max(bound))),
                    ConstraintKind::Max => max = Some(max.map_or(bound, |m: i64| m.min(bound))),
                }
            }
        }
        (min, max)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("enum `{0}` has no variants")]
    EmptyEnum(String),
    #[error("enum `{name}` repeats variant `{variant}`")]
    DuplicateVariant { name: String, variant: String },
    #[error("`{item}` refers to unregistered type `{ty}`")]
    UnresolvedType { item: String, ty: String },
    #[error("field `{0}` cannot have type void")]
    VoidField(String),
    #[error("parameter `{param}` of `{method}` cannot have type void")]
    VoidParam { method: String, param: String },
    #[error("method `{method}` repeats parameter `{param}`")]
    DuplicateParam { method: String, param: String },
    #[error("constraint on `{method}` names unknown parameter `{param}`")]
    UnknownConstraintParam { method: String, param: String },
    #[error("constraint on `{method}.{param}` has a {found} bound, parameter is {expected}")]
    ConstraintTypeMismatch {
        method: String,
        param: String,
        expected: TypeId,
        found: TypeId,
    },
    #[error("constraint on `{method}.{param}` has min {min} above max {max}")]
    InvertedBounds {
        method: String,
        param: String,
        min: i64,
        max: i64,
    },
    #[error("constraint on `{method}.{param}` is only supported for int parameters")]
    UnsupportedConstraintType { method: String, param: String },
    #[error("no {kind} named `{name}`")]
    UnknownItem { kind: &'static str, name: String },
}

/// One search-space entry able to produce a value of a requested type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Producer {
    Field(String),
    Local(String),
    Method(String),
    /// Stands for every literal of the requested type.
    Literal,
}

#[derive(Debug, Clone, Default)]
struct Items {
    enums: IndexMap<String, EnumDef>,
    fields: IndexMap<String, FieldDescriptor>,
    methods: IndexMap<String, MethodDescriptor>,
}

impl Items {
    fn resolves(&self, ty: &TypeId) -> bool {
        match ty {
            TypeId::Enum(name) => self.enums.contains_key(name),
            _ => true,
        }
    }

    fn check_enum(def: &EnumDef) -> Vec<RegistryError> {
        let mut errors = Vec::new();
        if def.variants.is_empty() {
            errors.push(RegistryError::EmptyEnum(def.name.clone()));
        }
        for (i, v) in def.variants.iter().enumerate() {
            if def.variants[..i].contains(v) {
                errors.push(RegistryError::DuplicateVariant {
                    name: def.name.clone(),
                    variant: v.clone(),
                });
            }
        }
        errors
    }

    fn check_field(&self, desc: &FieldDescriptor) -> Vec<RegistryError> {
        let mut errors = Vec::new();
        if desc.ty.is_void() {
            errors.push(RegistryError::VoidField(desc.name.clone()));
        } else if !self.resolves(&desc.ty) {
            errors.push(RegistryError::UnresolvedType {
                item: desc.name.clone(),
                ty: desc.ty.to_string(),
            });
        }
        errors
    }

    fn check_method(&self, desc: &MethodDescriptor) -> Vec<RegistryError> {
        let mut errors = Vec::new();
        let unresolved = |ty: &TypeId| RegistryError::UnresolvedType {
            item: desc.name.clone(),
            ty: ty.to_string(),
        };
        if !self.resolves(&desc.return_type) {
            errors.push(unresolved(&desc.return_type));
        }
        for (i, p) in desc.params.iter().enumerate() {
            if p.ty.is_void() {
                errors.push(RegistryError::VoidParam {
                    method: desc.name.clone(),
                    param: p.name.clone(),
                });
            } else if !self.resolves(&p.ty) {
                errors.push(unresolved(&p.ty));
            }
            if desc.params[..i].iter().any(|q| q.name == p.name) {
                errors.push(RegistryError::DuplicateParam {
                    method: desc.name.clone(),
                    param: p.name.clone(),
                });
            }
        }
        for c in &desc.constraints {
            let Some(index) = desc.param_index(&c.param) else {
                errors.push(RegistryError::UnknownConstraintParam {
                    method: desc.name.clone(),
                    param: c.param.clone(),
                });
                continue;
            };
            let expected = &desc.params[index].ty;
            let found = c.bound.type_id();
            if &found != expected {
                errors.push(RegistryError::ConstraintTypeMismatch {
                    method: desc.name.clone(),
                    param: c.param.clone(),
                    expected: expected.clone(),
                    found,
                });
            }
        }
        for (index, p) in desc.params.iter().enumerate() {
            if let (Some(min), Some(max)) = desc.int_bounds(index) {
                if min > max {
                    errors.push(RegistryError::InvertedBounds {
                        method: desc.name.clone(),
                        param: p.name.clone(),
                        min,
                        max,
                    });
                }
            }
        }
        errors
    }

    fn validate(&self) -> Vec<RegistryError> {
        let mut errors = Vec::new();
        for def in self.enums.values() {
            errors.extend(Self::check_enum(def));
        }
        for field in self.fields.values() {
            errors.extend(self.check_field(field));
        }
        for method in self.methods.values() {
            errors.extend(self.check_method(method));
            for c in &method.constraints {
                let constrained_non_int = method
                    .param_index(&c.param)
                    .map(|i| method.params[i].ty != TypeId::Int)
                    .unwrap_or(false);
                if constrained_non_int {
                    errors.push(RegistryError::UnsupportedConstraintType {
                        method: method.name.clone(),
                        param: c.param.clone(),
                    });
                }
            }
        }
        errors
    }
}

/// Mutable registry used during the build phase.
#[derive(Debug, Clone, Default)]
pub struct RegistryBuilder {
    items: Items,
}

impl RegistryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_enum(&mut self, def: EnumDef) -> Result<&mut Self, RegistryError> {
        if self.items.enums.contains_key(&def.name) {
            return Err(RegistryError::DuplicateName(def.name));
        }
        if let Some(err) = Items::check_enum(&def).into_iter().next() {
            return Err(err);
        }
        self.items.enums.insert(def.name.clone(), def);
        Ok(self)
    }

    pub fn register_field(&mut self, desc: FieldDescriptor) -> Result<&mut Self, RegistryError> {
        if self.items.fields.contains_key(&desc.name) {
            return Err(RegistryError::DuplicateName(desc.name));
        }
        if let Some(err) = self.items.check_field(&desc).into_iter().next() {
            return Err(err);
        }
        self.items.fields.insert(desc.name.clone(), desc);
        Ok(self)
    }

    pub fn register_method(&mut self, desc: MethodDescriptor) -> Result<&mut Self, RegistryError> {
        if self.items.methods.contains_key(&desc.name) {
            return Err(RegistryError::DuplicateName(desc.name));
        }
        if let Some(err) = self.items.check_method(&desc).into_iter().next() {
            return Err(err);
        }
        self.items.methods.insert(desc.name.clone(), desc);
        Ok(self)
    }

    /// Toggles the `usable` flag of a registered field or method (fields win on a name clash).
    pub fn set_usable(&mut self, name: &str, usable: bool) -> Result<&mut Self, RegistryError> {
        if let Some(field) = self.items.fields.get_mut(name) {
            field.usable = usable;
        } else if let Some(method) = self.items.methods.get_mut(name) {
            method.usable = usable;
        } else {
            return Err(RegistryError::UnknownItem {
                kind: "field or method",
                name: name.to_string(),
            });
        }
        Ok(self)
    }

    /// Every invariant violation, in registration order. Empty means valid.
    pub fn validate(&self) -> Vec<RegistryError> {
        self.items.validate()
    }

    pub fn seal(self) -> Result<Registry, Vec<RegistryError>> {
        let errors = self.validate();
        if errors.is_empty() {
            Ok(Registry { items: self.items })
        } else {
            Err(errors)
        }
    }
}

/// Sealed, immutable design space.
#[derive(Debug, Clone)]
pub struct Registry {
    items: Items,
}

impl Registry {
    pub fn to_builder(&self) -> RegistryBuilder {
        RegistryBuilder {
            items: self.items.clone(),
        }
    }

    pub fn enum_def(&self, name: &str) -> Option<&EnumDef> {
        self.items.enums.get(name)
    }

    pub fn field(&self, name: &str) -> Option<&FieldDescriptor> {
        self.items.fields.get(name)
    }

    pub fn method(&self, name: &str) -> Option<&MethodDescriptor> {
        self.items.methods.get(name)
    }

    pub fn enums(&self) -> impl Iterator<Item = &EnumDef> {
        self.items.enums.values()
    }

    pub fn fields(&self) -> impl Iterator<Item = &FieldDescriptor> {
        self.items.fields.values()
    }

    pub fn methods(&self) -> impl Iterator<Item = &MethodDescriptor> {
        self.items.methods.values()
    }

    pub fn resolves(&self, ty: &TypeId) -> bool {
        self.items.resolves(ty)
    }

    /// Whether the type has a literal form at all (enums need at least one variant).
    pub fn admits_literals(&self, ty: &TypeId) -> bool {
        match ty {
            TypeId::Int | TypeId::Bool => true,
            TypeId::Enum(name) => self.items.enums.contains_key(name),
            TypeId::Void => false,
        }
    }

    /// Non-void value types in a fixed order: int, bool, then enums by registration.
    pub fn value_types(&self) -> Vec<TypeId> {
        let mut types = vec![TypeId::Int, TypeId::Bool];
        types.extend(self.items.enums.keys().map(|n| TypeId::Enum(n.clone())));
        types
    }

    /// Everything that can produce a value of type `wanted` in `scope`.
    ///
    /// Order is fixed: usable fields, locals (outer frame first), usable
    /// methods, then the literal marker. With `grounded_only`, methods taking
    /// arguments are left out.
    pub fn candidates_for(&self, wanted: &TypeId, scope: &Scope, grounded_only: bool) -> Vec<Producer> {
        let mut out = Vec::new();
        for field in self.items.fields.values() {
            if field.usable && &field.ty == wanted {
                out.push(Producer::Field(field.name.clone()));
            }
        }
        for (name, ty) in scope.locals() {
            if ty == wanted {
                out.push(Producer::Local(name.to_string()));
            }
        }
        for method in self.items.methods.values() {
            if method.usable && &method.return_type == wanted && !(grounded_only && method.arity() > 0) {
                out.push(Producer::Method(method.name.clone()));
            }
        }
        if self.admits_literals(wanted) {
            out.push(Producer::Literal);
        }
        out
    }

    /// Listing of every item, sorted by kind then name.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut enums: Vec<_> = self.items.enums.values().collect();
        enums.sort_by(|a, b| a.name.cmp(&b.name));
        for e in enums {
            let _ = writeln!(out, "ENUM {} {{{}}}", e.name, e.variants.join(","));
        }
        let mut fields: Vec<_> = self.items.fields.values().collect();
        fields.sort_by(|a, b| a.name.cmp(&b.name));
        for f in fields {
            let _ = write!(out, "FIELD {} : {}", f.name, f.ty);
            if f.usable {
                out.push_str(" [usable]");
            }
            if f.writable {
                out.push_str(" [writable]");
            }
            out.push('\n');
        }
        let mut methods: Vec<_> = self.items.methods.values().collect();
        methods.sort_by(|a, b| a.name.cmp(&b.name));
        for m in methods {
            let params: Vec<String> = m.params.iter().map(|p| format!("{}:{}", p.name, p.ty)).collect();
            let _ = write!(out, "METHOD {}({}) : {}", m.name, params.join(","), m.return_type);
            if m.usable {
                out.push_str(" [usable]");
            }
            if !m.constraints.is_empty() {
                let cs: Vec<String> = m
                    .constraints
                    .iter()
                    .map(|c| format!("{} {} {}", c.param, c.kind, c.bound))
                    .collect();
                let _ = write!(out, " {{{}}}", cs.join(", "));
            }
            out.push('\n');
        }
        out
    }
}
