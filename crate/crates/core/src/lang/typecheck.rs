//! Static checker for code blocks against a signature and a sealed registry.
//!
//! This is written independently of the generator and is used to verify its
//! output, as well as to gate handcrafted mechanics before they run.

use std::fmt;

use thiserror::Error;

use super::ast::{Call, CodeBlock, Expr, LValue, Signature, Stmt};
use crate::registry::Registry;
use crate::scope::Scope;
use crate::types::TypeId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeErrorKind {
    Mismatch { expected: TypeId, found: TypeId },
    UnknownLocal(String),
    UnknownField(String),
    UnknownMethod(String),
    UnknownType(String),
    UnknownVariant { ty: String, variant: String },
    NotUsable(String),
    NotWritable(String),
    Arity { method: String, expected: usize, found: usize },
    DuplicateLocal(String),
    VoidLocal(String),
    MisplacedReturn,
    MissingReturn,
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeErrorKind::Mismatch { expected, found } => write!(f, "expected {expected}, found {found}"),
            TypeErrorKind::UnknownLocal(n) => write!(f, "unknown local `{n}`"),
            TypeErrorKind::UnknownField(n) => write!(f, "unknown field `{n}`"),
            TypeErrorKind::UnknownMethod(n) => write!(f, "unknown method `{n}`"),
            TypeErrorKind::UnknownType(n) => write!(f, "unknown type `{n}`"),
            TypeErrorKind::UnknownVariant { ty, variant } => write!(f, "`{ty}` has no variant `{variant}`"),
            TypeErrorKind::NotUsable(n) => write!(f, "`{n}` is not usable"),
            TypeErrorKind::NotWritable(n) => write!(f, "field `{n}` is not writable"),
            TypeErrorKind::Arity { method, expected, found } => {
                write!(f, "`{method}` takes {expected} arguments, given {found}")
            }
            TypeErrorKind::DuplicateLocal(n) => write!(f, "`{n}` is already declared"),
            TypeErrorKind::VoidLocal(n) => write!(f, "local `{n}` cannot have type void"),
            TypeErrorKind::MisplacedReturn => f.write_str("return must be the last top-level statement"),
            TypeErrorKind::MissingReturn => f.write_str("missing return"),
        }
    }
}

/// Where in the block a check failed.
///
/// `stmt` is a dotted path such as `2.then.0`; `expr` lists argument indices
/// from the statement's root expression down to the offending node.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("statement {stmt}{}: {kind}", fmt_expr_path(.expr))]
pub struct TypeError {
    pub stmt: String,
    pub expr: Vec<usize>,
    pub kind: TypeErrorKind,
}

fn fmt_expr_path(path: &[usize]) -> String {
    if path.is_empty() {
        String::new()
    } else {
        let parts: Vec<String> = path.iter().map(|i| format!("arg {i}")).collect();
        format!(" ({})", parts.join(" > "))
    }
}

struct Checker<'r> {
    registry: &'r Registry,
    sig: &'r Signature,
    scope: Scope,
}

type Located<T> = Result<T, (Vec<usize>, TypeErrorKind)>;

impl Checker<'_> {
    fn expr(&self, e: &Expr, path: &mut Vec<usize>) -> Located<TypeId> {
        let fail = |path: &Vec<usize>, kind| Err((path.clone(), kind));
        match e {
            Expr::Int(_) => Ok(TypeId::Int),
            Expr::Bool(_) => Ok(TypeId::Bool),
            Expr::EnumLit { ty, variant } => match self.registry.enum_def(ty) {
                None => fail(path, TypeErrorKind::UnknownType(ty.clone())),
                Some(def) if !def.has_variant(variant) => fail(
                    path,
                    TypeErrorKind::UnknownVariant {
                        ty: ty.clone(),
                        variant: variant.clone(),
                    },
                ),
                Some(_) => Ok(TypeId::Enum(ty.clone())),
            },
            Expr::Local(name) => match self.scope.lookup(name) {
                Some(ty) => Ok(ty.clone()),
                None => fail(path, TypeErrorKind::UnknownLocal(name.clone())),
            },
            Expr::Field(name) => match self.registry.field(name) {
                None => fail(path, TypeErrorKind::UnknownField(name.clone())),
                Some(f) if !f.usable => fail(path, TypeErrorKind::NotUsable(name.clone())),
                Some(f) => Ok(f.ty.clone()),
            },
            Expr::Call(call) => self.call(call, path),
        }
    }

    fn call(&self, call: &Call, path: &mut Vec<usize>) -> Located<TypeId> {
        let Some(method) = self.registry.method(&call.method) else {
            return Err((path.clone(), TypeErrorKind::UnknownMethod(call.method.clone())));
        };
        if !method.usable {
            return Err((path.clone(), TypeErrorKind::NotUsable(call.method.clone())));
        }
        if method.arity() != call.args.len() {
            return Err((
                path.clone(),
                TypeErrorKind::Arity {
                    method: call.method.clone(),
                    expected: method.arity(),
                    found: call.args.len(),
                },
            ));
        }
        for (i, (arg, param)) in call.args.iter().zip(&method.params).enumerate() {
            path.push(i);
            let found = self.expr(arg, path)?;
            if found != param.ty {
                return Err((
                    path.clone(),
                    TypeErrorKind::Mismatch {
                        expected: param.ty.clone(),
                        found,
                    },
                ));
            }
            path.pop();
        }
        Ok(method.return_type.clone())
    }

    fn expect_expr(&self, e: &Expr, expected: &TypeId) -> Located<()> {
        let mut path = Vec::new();
        let found = self.expr(e, &mut path)?;
        if &found != expected {
            return Err((
                path,
                TypeErrorKind::Mismatch {
                    expected: expected.clone(),
                    found,
                },
            ));
        }
        Ok(())
    }

    fn block(&mut self, block: &CodeBlock, prefix: &str, top_level: bool) -> Result<(), TypeError> {
        for (i, stmt) in block.stmts.iter().enumerate() {
            let here = if prefix.is_empty() {
                i.to_string()
            } else {
                format!("{prefix}.{i}")
            };
            let is_last_top = top_level && i + 1 == block.stmts.len();
            self.stmt(stmt, is_last_top).map_err(|(expr, kind)| TypeError {
                stmt: here.clone(),
                expr,
                kind,
            })?;
            if let Stmt::If {
                then_block,
                else_block,
                ..
            } = stmt
            {
                self.scope.push_frame();
                let res = self.block(then_block, &format!("{here}.then"), false);
                self.scope.pop_frame();
                res?;
                if let Some(else_block) = else_block {
                    self.scope.push_frame();
                    let res = self.block(else_block, &format!("{here}.else"), false);
                    self.scope.pop_frame();
                    res?;
                }
            }
        }
        Ok(())
    }

    fn stmt(&mut self, stmt: &Stmt, is_last_top: bool) -> Located<()> {
        match stmt {
            Stmt::VarDecl { ty, name, init } => {
                if ty.is_void() {
                    return Err((Vec::new(), TypeErrorKind::VoidLocal(name.clone())));
                }
                if !self.registry.resolves(ty) {
                    return Err((Vec::new(), TypeErrorKind::UnknownType(ty.to_string())));
                }
                if self.scope.contains(name) {
                    return Err((Vec::new(), TypeErrorKind::DuplicateLocal(name.clone())));
                }
                self.expect_expr(init, ty)?;
                self.scope.declare(name.clone(), ty.clone());
                Ok(())
            }
            Stmt::Assign { target, value } => {
                let target_ty = match target {
                    LValue::Local(name) => self
                        .scope
                        .lookup(name)
                        .cloned()
                        .ok_or_else(|| (Vec::new(), TypeErrorKind::UnknownLocal(name.clone())))?,
                    LValue::Field(name) => match self.registry.field(name) {
                        None => return Err((Vec::new(), TypeErrorKind::UnknownField(name.clone()))),
                        Some(f) if !f.usable => return Err((Vec::new(), TypeErrorKind::NotUsable(name.clone()))),
                        Some(f) if !f.writable => return Err((Vec::new(), TypeErrorKind::NotWritable(name.clone()))),
                        Some(f) => f.ty.clone(),
                    },
                };
                self.expect_expr(value, &target_ty)
            }
            Stmt::Call(call) => self.call(call, &mut Vec::new()).map(|_| ()),
            Stmt::If { cond, .. } => self.expect_expr(cond, &TypeId::Bool),
            Stmt::Return(value) => {
                if !is_last_top {
                    return Err((Vec::new(), TypeErrorKind::MisplacedReturn));
                }
                let expected = &self.sig.return_type;
                match value {
                    None if expected.is_void() => Ok(()),
                    None => Err((Vec::new(), TypeErrorKind::MissingReturn)),
                    Some(e) => self.expect_expr(e, expected),
                }
            }
        }
    }
}

/// Checks `block` as the body of `sig`.
pub fn typecheck(block: &CodeBlock, sig: &Signature, registry: &Registry) -> Result<(), TypeError> {
    let mut checker = Checker {
        registry,
        sig,
        scope: Scope::with_params(sig.params.iter().map(|p| (p.name.as_str(), &p.ty))),
    };
    for p in &sig.params {
        if p.ty.is_void() || !registry.resolves(&p.ty) {
            return Err(TypeError {
                stmt: "signature".into(),
                expr: Vec::new(),
                kind: TypeErrorKind::UnknownType(p.ty.to_string()),
            });
        }
    }
    checker.block(block, "", true)?;
    let returns = matches!(block.stmts.last(), Some(Stmt::Return(_)));
    if !sig.return_type.is_void() && !returns {
        return Err(TypeError {
            stmt: block.stmts.len().to_string(),
            expr: Vec::new(),
            kind: TypeErrorKind::MissingReturn,
        });
    }
    Ok(())
}
