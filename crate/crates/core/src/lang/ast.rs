use std::fmt;

use crate::registry::Param;
use crate::types::TypeId;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Call {
    pub method: String,
    pub args: Vec<Expr>,
}

impl Call {
    pub fn new(method: impl Into<String>, args: Vec<Expr>) -> Self {
        Call {
            method: method.into(),
            args,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    EnumLit { ty: String, variant: String },
    Local(String),
    /// Printed as `this.Name`.
    Field(String),
    Call(Call),
}

impl Expr {
    pub fn local(name: impl Into<String>) -> Self {
        Expr::Local(name.into())
    }

    pub fn field(name: impl Into<String>) -> Self {
        Expr::Field(name.into())
    }

    pub fn enum_lit(ty: impl Into<String>, variant: impl Into<String>) -> Self {
        Expr::EnumLit {
            ty: ty.into(),
            variant: variant.into(),
        }
    }

    pub fn call(method: impl Into<String>, args: Vec<Expr>) -> Self {
        Expr::Call(Call::new(method, args))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LValue {
    Local(String),
    Field(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    VarDecl { ty: TypeId, name: String, init: Expr },
    Assign { target: LValue, value: Expr },
    Call(Call),
    If {
        cond: Expr,
        then_block: CodeBlock,
        else_block: Option<CodeBlock>,
    },
    /// Only valid as the last statement of a top-level block.
    Return(Option<Expr>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CodeBlock {
    pub stmts: Vec<Stmt>,
}

impl CodeBlock {
    pub fn new(stmts: Vec<Stmt>) -> Self {
        CodeBlock { stmts }
    }

    pub fn len(&self) -> usize {
        self.stmts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stmts.is_empty()
    }
}

/// Name, parameters and return type of a method body or hook.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    pub name: String,
    pub params: Vec<Param>,
    pub return_type: TypeId,
}

impl Signature {
    pub fn new(name: impl Into<String>, params: Vec<Param>, return_type: TypeId) -> Self {
        Signature {
            name: name.into(),
            params,
            return_type,
        }
    }

    /// Same parameter types and return type; names may differ.
    pub fn same_shape(&self, other: &Signature) -> bool {
        self.return_type == other.return_type
            && self.params.len() == other.params.len()
            && self.params.iter().zip(&other.params).all(|(a, b)| a.ty == b.ty)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", p.name, p.ty)?;
        }
        write!(f, ") -> {}", self.return_type)
    }
}

/// A signature plus the block implementing it, as stored in `.mg` files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mechanic {
    pub signature: Signature,
    pub body: CodeBlock,
}
