#![allow(dead_code)]

use mechgen_core::lang::{CodeBlock, Expr, Stmt};

/// A call site found by [`calls`].
#[derive(Debug, Clone)]
pub struct Site {
    pub method: String,
    pub arity: usize,
    /// Statement-level expressions sit at depth 0, arguments one deeper than their call.
    pub depth: usize,
    /// True for a call used as a statement.
    pub statement: bool,
}

pub fn calls(block: &CodeBlock) -> Vec<Site> {
    let mut out = Vec::new();
    visit_block(block, &mut |e, depth| {
        if let Expr::Call(call) = e {
            out.push(Site {
                method: call.method.clone(),
                arity: call.args.len(),
                depth,
                statement: false,
            });
        }
    });
    out.extend(statement_calls(block));
    out
}

fn statement_calls(block: &CodeBlock) -> Vec<Site> {
    let mut out = Vec::new();
    for stmt in &block.stmts {
        match stmt {
            Stmt::Call(call) => out.push(Site {
                method: call.method.clone(),
                arity: call.args.len(),
                depth: 0,
                statement: true,
            }),
            Stmt::If {
                then_block,
                else_block,
                ..
            } => {
                out.extend(statement_calls(then_block));
                if let Some(e) = else_block {
                    out.extend(statement_calls(e));
                }
            }
            _ => {}
        }
    }
    out
}

/// Visits every expression with its depth. Arguments of a statement call are at depth 1.
fn visit_block(block: &CodeBlock, f: &mut impl FnMut(&Expr, usize)) {
    for stmt in &block.stmts {
        match stmt {
            Stmt::VarDecl { init: e, .. } | Stmt::Assign { value: e, .. } | Stmt::Return(Some(e)) => visit_expr(e, 0, f),
            Stmt::Call(call) => {
                for a in &call.args {
                    visit_expr(a, 1, f);
                }
            }
            Stmt::If {
                cond,
                then_block,
                else_block,
            } => {
                visit_expr(cond, 0, f);
                visit_block(then_block, f);
                if let Some(e) = else_block {
                    visit_block(e, f);
                }
            }
            Stmt::Return(None) => {}
        }
    }
}

fn visit_expr(e: &Expr, depth: usize, f: &mut impl FnMut(&Expr, usize)) {
    f(e, depth);
    if let Expr::Call(call) = e {
        for a in &call.args {
            visit_expr(a, depth + 1, f);
        }
    }
}

/// Every integer literal passed directly as an argument, as `(method, index, value)`.
pub fn literal_args(block: &CodeBlock) -> Vec<(String, usize, i64)> {
    fn from_args(method: &str, args: &[Expr], out: &mut Vec<(String, usize, i64)>) {
        for (i, a) in args.iter().enumerate() {
            if let Expr::Int(v) = a {
                out.push((method.to_string(), i, *v));
            }
        }
    }
    let mut out = Vec::new();
    let mut exprs = Vec::new();
    visit_block(block, &mut |e, _| {
        if let Expr::Call(call) = e {
            exprs.push(call.clone());
        }
    });
    for call in exprs {
        from_args(&call.method, &call.args, &mut out);
    }
    for_each_statement_call(block, &mut |call| from_args(&call.method, &call.args, &mut out));
    out
}

fn for_each_statement_call(block: &CodeBlock, f: &mut impl FnMut(&mechgen_core::lang::Call)) {
    for stmt in &block.stmts {
        match stmt {
            Stmt::Call(call) => f(call),
            Stmt::If {
                then_block,
                else_block,
                ..
            } => {
                for_each_statement_call(then_block, f);
                if let Some(e) = else_block {
                    for_each_statement_call(e, f);
                }
            }
            _ => {}
        }
    }
}

/// Local names declared anywhere in the block, in order.
pub fn declared(block: &CodeBlock) -> Vec<String> {
    let mut out = Vec::new();
    for stmt in &block.stmts {
        match stmt {
            Stmt::VarDecl { name, .. } => out.push(name.clone()),
            Stmt::If {
                then_block,
                else_block,
                ..
            } => {
                out.extend(declared(then_block));
                if let Some(e) = else_block {
                    out.extend(declared(e));
                }
            }
            _ => {}
        }
    }
    out
}

/// Maximum `if` nesting, 0 for a flat block.
pub fn nesting(block: &CodeBlock) -> usize {
    block
        .stmts
        .iter()
        .map(|s| match s {
            Stmt::If {
                then_block,
                else_block,
                ..
            } => 1 + nesting(then_block).max(else_block.as_ref().map_or(0, nesting)),
            _ => 0,
        })
        .max()
        .unwrap_or(0)
}
