//! The generated mini-language: AST, pretty-printer, parser and type checker.

pub mod ast;
pub mod parse;
pub mod pretty;
pub mod typecheck;

pub use ast::{Call, CodeBlock, Expr, LValue, Mechanic, Signature, Stmt};
pub use parse::{parse_block, parse_mechanic, parse_signature, ParseError};
pub use pretty::{pretty, render_mechanic, to_lines};
pub use typecheck::{typecheck, TypeError, TypeErrorKind};
