use std::fmt::Write as _;

use super::ast::{Call, CodeBlock, Expr, LValue, Mechanic, Stmt};

const INDENT: &str = "    ";

/// Surface text of a block: one statement header per line, newline terminated.
pub fn pretty(block: &CodeBlock) -> String {
    to_lines(block).into_iter().fold(String::new(), |mut out, line| {
        out.push_str(&line);
        out.push('\n');
        out
    })
}

/// The block as a list of lines, with indentation included.
pub fn to_lines(block: &CodeBlock) -> Vec<String> {
    let mut lines = Vec::new();
    block_lines(block, 0, &mut lines);
    lines
}

pub fn render_mechanic(mechanic: &Mechanic) -> String {
    format!("signature: {}\n{}", mechanic.signature, pretty(&mechanic.body))
}

fn block_lines(block: &CodeBlock, level: usize, lines: &mut Vec<String>) {
    for stmt in &block.stmts {
        stmt_lines(stmt, level, lines);
    }
}

fn stmt_lines(stmt: &Stmt, level: usize, lines: &mut Vec<String>) {
    let pad = INDENT.repeat(level);
    match stmt {
        Stmt::VarDecl { ty, name, init } => lines.push(format!("{pad}{ty} {name} = {};", expr(init))),
        Stmt::Assign { target, value } => {
            let target = match target {
                LValue::Local(name) => name.clone(),
                LValue::Field(name) => format!("this.{name}"),
            };
            lines.push(format!("{pad}{target} = {};", expr(value)));
        }
        Stmt::Call(call) => lines.push(format!("{pad}{};", call_text(call))),
        Stmt::If {
            cond,
            then_block,
            else_block,
        } => {
            lines.push(format!("{pad}if ({}) {{", expr(cond)));
            block_lines(then_block, level + 1, lines);
            if let Some(else_block) = else_block {
                lines.push(format!("{pad}}} else {{"));
                block_lines(else_block, level + 1, lines);
            }
            lines.push(format!("{pad}}}"));
        }
        Stmt::Return(None) => lines.push(format!("{pad}return;")),
        Stmt::Return(Some(value)) => lines.push(format!("{pad}return {};", expr(value))),
    }
}

pub fn expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, &mut out);
    out
}

fn call_text(call: &Call) -> String {
    let mut out = String::new();
    write_call(call, &mut out);
    out
}

fn write_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Expr::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Expr::EnumLit { ty, variant } => {
            let _ = write!(out, "{ty}.{variant}");
        }
        Expr::Local(name) => out.push_str(name),
        Expr::Field(name) => {
            let _ = write!(out, "this.{name}");
        }
        Expr::Call(call) => write_call(call, out),
    }
}

fn write_call(call: &Call, out: &mut String) {
    out.push_str(&call.method);
    out.push('(');
    for (i, arg) in call.args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(arg, out);
    }
    out.push(')');
}
