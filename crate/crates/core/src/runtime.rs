//! Interpreter for code blocks, delegates, and named hook slots.
//!
//! Every method call made by a block, and every host delegate invocation that
//! names a registered method, checks that method's parameter bounds first.

use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use crate::lang::{typecheck, Call, CodeBlock, Expr, LValue, Signature, Stmt, TypeError};
use crate::registry::{Builtin, ConstraintKind, HostImpl, MethodDescriptor, Registry};
use crate::types::{TypeId, Value};

/// Failure reported by host-side behavior.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct HostError(pub String);

/// The host object generated code runs against.
pub trait World {
    fn read_field(&self, name: &str) -> Result<Value, HostError>;
    fn write_field(&mut self, name: &str, value: Value) -> Result<(), HostError>;
    fn call_method(&mut self, name: &str, args: &[Value]) -> Result<Value, HostError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeError {
    #[error("{method}: {param} = {value} violates {kind} {bound}")]
    ConstraintViolation {
        method: String,
        param: String,
        value: i64,
        kind: ConstraintKind,
        bound: i64,
    },
    #[error("{method}: {detail}")]
    Host { method: String, detail: String },
    #[error("host call budget exhausted")]
    BudgetExceeded,
    #[error("{name} expects {expected} arguments, got {found}")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("{name}: argument {index} should be {expected}, got {found}")]
    ArgumentType {
        name: String,
        index: usize,
        expected: TypeId,
        found: TypeId,
    },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("expected {expected}, got {found}")]
    DynamicType { expected: TypeId, found: TypeId },
}

impl RuntimeError {
    pub fn kind(&self) -> &'static str {
        match self {
            RuntimeError::ConstraintViolation { .. } => "ConstraintViolation",
            RuntimeError::Host { .. } => "HostError",
            RuntimeError::BudgetExceeded => "BudgetExceeded",
            RuntimeError::ArityMismatch { .. } => "ArityMismatch",
            RuntimeError::ArgumentType { .. } => "ArgumentType",
            RuntimeError::UnknownName(_) => "UnknownName",
            RuntimeError::DynamicType { .. } => "DynamicType",
        }
    }

    fn method(&self) -> &str {
        match self {
            RuntimeError::ConstraintViolation { method, .. } | RuntimeError::Host { method, .. } => method,
            RuntimeError::ArityMismatch { name, .. } | RuntimeError::ArgumentType { name, .. } => name,
            RuntimeError::UnknownName(name) => name,
            RuntimeError::BudgetExceeded | RuntimeError::DynamicType { .. } => "-",
        }
    }

    /// One-line form used in evaluation reports.
    pub fn report_line(&self) -> String {
        format!("ERROR kind={} method={} detail={}", self.kind(), self.method(), self)
    }
}

/// Caps the number of method calls one invocation may make.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecBudget {
    pub remaining: u32,
}

impl ExecBudget {
    pub const DEFAULT_HOST_CALLS: u32 = 10_000;

    pub fn new(max_host_calls: u32) -> Self {
        ExecBudget {
            remaining: max_host_calls,
        }
    }

    fn consume(&mut self) -> Result<(), RuntimeError> {
        if self.remaining == 0 {
            return Err(RuntimeError::BudgetExceeded);
        }
        self.remaining -= 1;
        Ok(())
    }
}

impl Default for ExecBudget {
    fn default() -> Self {
        ExecBudget::new(Self::DEFAULT_HOST_CALLS)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DelegateBody {
    /// Host behavior dispatched by key: a registered method of that name, or
    /// else the world directly.
    Host(String),
    Generated(Arc<CodeBlock>),
}

/// A callable with a fixed signature; the unit of hot-swapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delegate {
    sig: Signature,
    body: DelegateBody,
}

impl Delegate {
    pub fn host(sig: Signature, key: impl Into<String>) -> Self {
        Delegate {
            sig,
            body: DelegateBody::Host(key.into()),
        }
    }

    /// Wraps a block after checking it against `sig`.
    pub fn generated(sig: Signature, block: CodeBlock, registry: &Registry) -> Result<Self, TypeError> {
        typecheck(&block, &sig, registry)?;
        Ok(Delegate {
            sig,
            body: DelegateBody::Generated(Arc::new(block)),
        })
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn body(&self) -> &DelegateBody {
        &self.body
    }

    pub fn invoke<W: World>(
        &self,
        args: &[Value],
        registry: &Registry,
        world: &mut W,
        budget: &mut ExecBudget,
    ) -> Result<Value, RuntimeError> {
        invoke(self, args, registry, world, budget)
    }
}

fn check_args(name: &str, sig_types: &[&TypeId], args: &[Value]) -> Result<(), RuntimeError> {
    if sig_types.len() != args.len() {
        return Err(RuntimeError::ArityMismatch {
            name: name.to_string(),
            expected: sig_types.len(),
            found: args.len(),
        });
    }
    for (index, (ty, arg)) in sig_types.iter().zip(args).enumerate() {
        let found = arg.type_id();
        if **ty != found {
            return Err(RuntimeError::ArgumentType {
                name: name.to_string(),
                index,
                expected: (*ty).clone(),
                found,
            });
        }
    }
    Ok(())
}

/// Runs a delegate with positional arguments.
pub fn invoke<W: World>(
    delegate: &Delegate,
    args: &[Value],
    registry: &Registry,
    world: &mut W,
    budget: &mut ExecBudget,
) -> Result<Value, RuntimeError> {
    let sig = &delegate.sig;
    let types: Vec<&TypeId> = sig.params.iter().map(|p| &p.ty).collect();
    check_args(&sig.name, &types, args)?;
    match &delegate.body {
        DelegateBody::Host(key) => match registry.method(key) {
            Some(method) => call_method(method, args.to_vec(), world, budget),
            None => {
                budget.consume()?;
                world.call_method(key, args).map_err(|e| RuntimeError::Host {
                    method: key.clone(),
                    detail: e.0,
                })
            }
        },
        DelegateBody::Generated(block) => {
            let mut interp = Interpreter {
                registry,
                world,
                budget,
                frames: vec![sig
                    .params
                    .iter()
                    .zip(args)
                    .map(|(p, v)| (p.name.clone(), v.clone()))
                    .collect()],
            };
            match interp.block(block)? {
                Some(v) => Ok(v),
                None => Ok(Value::Unit),
            }
        }
    }
}

fn check_constraints(method: &MethodDescriptor, args: &[Value]) -> Result<(), RuntimeError> {
    for c in &method.constraints {
        let (Some(index), Value::Int(bound)) = (method.param_index(&c.param), &c.bound) else {
            continue;
        };
        let Some(value) = args.get(index).and_then(Value::as_int) else {
            continue;
        };
        let violated = match c.kind {
            ConstraintKind::Min => value < *bound,
            ConstraintKind::Max => value > *bound,
        };
        if violated {
            return Err(RuntimeError::ConstraintViolation {
                method: method.name.clone(),
                param: c.param.clone(),
                value,
                kind: c.kind,
                bound: *bound,
            });
        }
    }
    Ok(())
}

fn call_method<W: World>(
    method: &MethodDescriptor,
    args: Vec<Value>,
    world: &mut W,
    budget: &mut ExecBudget,
) -> Result<Value, RuntimeError> {
    let types: Vec<&TypeId> = method.params.iter().map(|p| &p.ty).collect();
    check_args(&method.name, &types, &args)?;
    check_constraints(method, &args)?;
    budget.consume()?;
    let host_err = |detail: String| RuntimeError::Host {
        method: method.name.clone(),
        detail,
    };
    match method.host {
        Some(HostImpl::Builtin(builtin)) => Ok(run_builtin(builtin, &args)),
        Some(HostImpl::World) => world.call_method(&method.name, &args).map_err(|e| host_err(e.0)),
        None => Err(host_err("no host implementation".into())),
    }
}

/// Integer builtins wrap on overflow.
fn run_builtin(builtin: Builtin, args: &[Value]) -> Value {
    let int = |i: usize| args[i].as_int().expect("builtin arguments are checked");
    match builtin {
        Builtin::Add => Value::Int(int(0).wrapping_add(int(1))),
        Builtin::Sub => Value::Int(int(0).wrapping_sub(int(1))),
        Builtin::Less => Value::Bool(int(0) < int(1)),
        Builtin::Equal => Value::Bool(int(0) == int(1)),
        Builtin::DoNothing => Value::Unit,
    }
}

struct Interpreter<'a, W> {
    registry: &'a Registry,
    world: &'a mut W,
    budget: &'a mut ExecBudget,
    frames: Vec<Vec<(String, Value)>>,
}

impl<W: World> Interpreter<'_, W> {
    fn lookup_local(&mut self, name: &str) -> Option<&mut Value> {
        self.frames
            .iter_mut()
            .rev()
            .flat_map(|f| f.iter_mut().rev())
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
    }

    /// Returns `Some` when a `return` statement ran.
    fn block(&mut self, block: &CodeBlock) -> Result<Option<Value>, RuntimeError> {
        for stmt in &block.stmts {
            match stmt {
                Stmt::VarDecl { name, init, .. } => {
                    let value = self.expr(init)?;
                    self.frames
                        .last_mut()
                        .expect("interpreter has a frame")
                        .push((name.clone(), value));
                }
                Stmt::Assign { target, value } => {
                    let value = self.expr(value)?;
                    match target {
                        LValue::Local(name) => {
                            *self
                                .lookup_local(name)
                                .ok_or_else(|| RuntimeError::UnknownName(name.clone()))? = value;
                        }
                        LValue::Field(name) => {
                            let field = self
                                .registry
                                .field(name)
                                .filter(|f| f.writable)
                                .ok_or_else(|| RuntimeError::UnknownName(name.clone()))?;
                            self.world
                                .write_field(&field.name, value)
                                .map_err(|e| RuntimeError::Host {
                                    method: name.clone(),
                                    detail: e.0,
                                })?;
                        }
                    }
                }
                Stmt::Call(call) => {
                    self.call(call)?;
                }
                Stmt::If {
                    cond,
                    then_block,
                    else_block,
                } => {
                    let taken = match self.expr(cond)? {
                        Value::Bool(b) => b,
                        other => {
                            return Err(RuntimeError::DynamicType {
                                expected: TypeId::Bool,
                                found: other.type_id(),
                            })
                        }
                    };
                    let branch = if taken { Some(then_block) } else { else_block.as_ref() };
                    if let Some(branch) = branch {
                        self.frames.push(Vec::new());
                        let out = self.block(branch);
                        self.frames.pop();
                        if let Some(v) = out? {
                            return Ok(Some(v));
                        }
                    }
                }
                Stmt::Return(value) => {
                    let v = match value {
                        Some(e) => self.expr(e)?,
                        None => Value::Unit,
                    };
                    return Ok(Some(v));
                }
            }
        }
        Ok(None)
    }

    fn expr(&mut self, e: &Expr) -> Result<Value, RuntimeError> {
        match e {
            Expr::Int(v) => Ok(Value::Int(*v)),
            Expr::Bool(b) => Ok(Value::Bool(*b)),
            Expr::EnumLit { ty, variant } => Ok(Value::enum_variant(ty.clone(), variant.clone())),
            Expr::Local(name) => self
                .lookup_local(name)
                .map(|v| v.clone())
                .ok_or_else(|| RuntimeError::UnknownName(name.clone())),
            Expr::Field(name) => {
                if self.registry.field(name).is_none() {
                    return Err(RuntimeError::UnknownName(name.clone()));
                }
                self.world.read_field(name).map_err(|e| RuntimeError::Host {
                    method: name.clone(),
                    detail: e.0,
                })
            }
            Expr::Call(call) => self.call(call),
        }
    }

    fn call(&mut self, call: &Call) -> Result<Value, RuntimeError> {
        let method = self
            .registry
            .method(&call.method)
            .ok_or_else(|| RuntimeError::UnknownName(call.method.clone()))?;
        let args = call.args.iter().map(|a| self.expr(a)).collect::<Result<Vec<_>, _>>()?;
        call_method(method, args, self.world, self.budget)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HookError {
    #[error("unknown hook `{0}`")]
    UnknownHook(String),
    #[error("hook `{0}` already declared")]
    DuplicateHook(String),
    #[error("delegate `{found}` does not match hook signature `{expected}`")]
    SignatureMismatch { expected: String, found: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hook {
    sig: Signature,
    default: Delegate,
    current: Delegate,
}

impl Hook {
    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn default_delegate(&self) -> &Delegate {
        &self.default
    }

    pub fn current(&self) -> &Delegate {
        &self.current
    }

    pub fn is_default(&self) -> bool {
        self.current == self.default
    }
}

/// Named delegate slots, each with a default binding that is never absent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HookTable {
    hooks: IndexMap<String, Hook>,
}

impl HookTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a hook whose signature is the default delegate's.
    pub fn declare(&mut self, name: impl Into<String>, default: Delegate) -> Result<(), HookError> {
        let name = name.into();
        if self.hooks.contains_key(&name) {
            return Err(HookError::DuplicateHook(name));
        }
        let hook = Hook {
            sig: default.sig.clone(),
            current: default.clone(),
            default,
        };
        self.hooks.insert(name, hook);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Hook> {
        self.hooks.get(name)
    }

    pub fn bind(&mut self, name: &str, delegate: Delegate) -> Result<(), HookError> {
        let hook = self
            .hooks
            .get_mut(name)
            .ok_or_else(|| HookError::UnknownHook(name.to_string()))?;
        if !hook.sig.same_shape(&delegate.sig) {
            return Err(HookError::SignatureMismatch {
                expected: hook.sig.to_string(),
                found: delegate.sig.to_string(),
            });
        }
        hook.current = delegate;
        Ok(())
    }

    pub fn reset(&mut self, name: &str) -> Result<(), HookError> {
        let hook = self
            .hooks
            .get_mut(name)
            .ok_or_else(|| HookError::UnknownHook(name.to_string()))?;
        hook.current = hook.default.clone();
        Ok(())
    }

    /// Invokes the hook's current delegate.
    pub fn dispatch<W: World>(
        &self,
        name: &str,
        args: &[Value],
        registry: &Registry,
        world: &mut W,
        budget: &mut ExecBudget,
    ) -> Result<Value, RuntimeError> {
        let hook = self
            .hooks
            .get(name)
            .ok_or_else(|| RuntimeError::UnknownName(name.to_string()))?;
        hook.current.invoke(args, registry, world, budget)
    }
}

impl fmt::Display for DelegateBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DelegateBody::Host(key) => write!(f, "host:{key}"),
            DelegateBody::Generated(block) => write!(f, "generated:{} lines", block.len()),
        }
    }
}
