//! Recursive-descent parser for the surface syntax produced by [`super::pretty`].

use std::fmt;

use thiserror::Error;

use super::ast::{Call, CodeBlock, Expr, LValue, Mechanic, Signature, Stmt};
use crate::registry::Param;
use crate::types::TypeId;

const KEYWORDS: &[&str] = &["if", "else", "return", "true", "false", "this", "int", "bool", "void"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Dot,
    Eq,
    Colon,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(v) => write!(f, "`{v}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    start: Pos,
    end: Pos,
}

fn lex(text: &str, first_line: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = first_line;
    let mut column = 1;
    let mut last_end = Pos { line, column };

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let start = Pos { line, column };
        let begin = i;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[begin..i].iter().collect())
        } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[begin..i].iter().collect();
            match digits.parse::<i64>() {
                Ok(v) => Tok::Int(v),
                Err(_) => {
                    return Err(ParseError {
                        line: start.line,
                        column: start.column,
                        expected: vec!["a 64-bit signed integer".into()],
                        found: format!("`{digits}`"),
                    })
                }
            }
        } else {
            i += 1;
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                '.' => Tok::Dot,
                '=' => Tok::Eq,
                ':' => Tok::Colon,
                '-' if chars.get(i) == Some(&'>') => {
                    i += 1;
                    Tok::Arrow
                }
                other => {
                    return Err(ParseError {
                        line,
                        column,
                        expected: vec!["a token".into()],
                        found: format!("`{other}`"),
                    })
                }
            }
        };
        column += i - begin;
        last_end = Pos { line, column };
        tokens.push(Token { tok, start, end: last_end });
    }
    tokens.push(Token {
        tok: Tok::Eof,
        start: last_end,
        end: last_end,
    });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(text: &str, first_line: usize) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: lex(text, first_line)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.pos].tok.clone();
        if tok != Tok::Eof {
            self.pos += 1;
        }
        tok
    }

    /// Missing tokens are reported at the end of the previous token when the
    /// next one sits on a later line.
    fn error(&self, expected: &[&str]) -> ParseError {
        let next = &self.tokens[self.pos];
        let at = match self.pos.checked_sub(1).map(|i| self.tokens[i].end) {
            Some(prev_end) if next.start.line > prev_end.line || next.tok == Tok::Eof => prev_end,
            _ => next.start,
        };
        ParseError {
            line: at.line,
            column: at.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: next.tok.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&tok.to_string()]))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn ty(&mut self) -> Result<TypeId, ParseError> {
        let ty = match self.peek() {
            Tok::Ident(s) if s == "int" => TypeId::Int,
            Tok::Ident(s) if s == "bool" => TypeId::Bool,
            Tok::Ident(s) if s == "void" => TypeId::Void,
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => TypeId::Enum(s.clone()),
            _ => return Err(self.error(&["type"])),
        };
        self.bump();
        Ok(ty)
    }

    fn block_until(&mut self, end: &Tok) -> Result<CodeBlock, ParseError> {
        let mut stmts = Vec::new();
        while self.peek() != end {
            stmts.push(self.stmt()?);
        }
        Ok(CodeBlock::new(stmts))
    }

    fn braced_block(&mut self) -> Result<CodeBlock, ParseError> {
        self.expect(Tok::LBrace)?;
        let block = self.block_until(&Tok::RBrace)?;
        self.expect(Tok::RBrace)?;
        Ok(block)
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        if self.is_keyword("if") {
            self.bump();
            self.expect(Tok::LParen)?;
            let cond = self.expr()?;
            self.expect(Tok::RParen)?;
            let then_block = self.braced_block()?;
            let else_block = if self.is_keyword("else") {
                self.bump();
                Some(self.braced_block()?)
            } else {
                None
            };
            return Ok(Stmt::If {
                cond,
                then_block,
                else_block,
            });
        }
        if self.is_keyword("return") {
            self.bump();
            let value = if *self.peek() == Tok::Semi {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect(Tok::Semi)?;
            return Ok(Stmt::Return(value));
        }
        if self.is_keyword("this") {
            self.bump();
            self.expect(Tok::Dot)?;
            let name = self.ident()?;
            self.expect(Tok::Eq)?;
            let value = self.expr()?;
            self.expect(Tok::Semi)?;
            return Ok(Stmt::Assign {
                target: LValue::Field(name),
                value,
            });
        }
        let starts_decl = self.is_keyword("int")
            || self.is_keyword("bool")
            || self.is_keyword("void")
            || matches!(self.peek_at(1), Tok::Ident(_));
        if starts_decl {
            let ty = self.ty()?;
            let name = self.ident()?;
            self.expect(Tok::Eq)?;
            let init = self.expr()?;
            self.expect(Tok::Semi)?;
            return Ok(Stmt::VarDecl { ty, name, init });
        }
        let name = match self.peek() {
            Tok::Ident(_) => self.ident()?,
            _ => return Err(self.error(&["statement"])),
        };
        match self.peek() {
            Tok::LParen => {
                let call = self.call_args(name)?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Call(call))
            }
            Tok::Eq => {
                self.bump();
                let value = self.expr()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Assign {
                    target: LValue::Local(name),
                    value,
                })
            }
            _ => Err(self.error(&["`(`", "`=`", "identifier"])),
        }
    }

    fn call_args(&mut self, method: String) -> Result<Call, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.expr()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        if *self.peek() != Tok::RParen {
            return Err(self.error(&["`,`", "`)`"]));
        }
        self.bump();
        Ok(Call { method, args })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Expr::Bool(s == "true"))
            }
            Tok::Ident(s) if s == "this" => {
                self.bump();
                self.expect(Tok::Dot)?;
                Ok(Expr::Field(self.ident()?))
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                match self.peek() {
                    Tok::Dot => {
                        self.bump();
                        let variant = self.ident()?;
                        Ok(Expr::EnumLit { ty: name, variant })
                    }
                    Tok::LParen => Ok(Expr::Call(self.call_args(name)?)),
                    _ => Ok(Expr::Local(name)),
                }
            }
            _ => Err(self.error(&["expression"])),
        }
    }

    fn signature(&mut self) -> Result<Signature, ParseError> {
        let name = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let pname = self.ident()?;
                self.expect(Tok::Colon)?;
                params.push(Param::new(pname, self.ty()?));
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Arrow)?;
        let return_type = self.ty()?;
        Ok(Signature::new(name, params, return_type))
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }
}

pub fn parse_block(text: &str) -> Result<CodeBlock, ParseError> {
    let mut parser = Parser::new(text, 1)?;
    let block = parser.block_until(&Tok::Eof)?;
    parser.finish()?;
    Ok(block)
}

/// Parses `name(p1:t1, ...) -> ret`.
pub fn parse_signature(text: &str) -> Result<Signature, ParseError> {
    let mut parser = Parser::new(text, 1)?;
    let sig = parser.signature()?;
    parser.finish()?;
    Ok(sig)
}

/// Parses a mechanic file: a `signature:` header line followed by the body.
pub fn parse_mechanic(text: &str) -> Result<Mechanic, ParseError> {
    let (header, body) = text.split_once('\n').unwrap_or((text, ""));
    let Some(sig_text) = header.trim_end_matches('\r').strip_prefix("signature:") else {
        return Err(ParseError {
            line: 1,
            column: 1,
            expected: vec!["`signature:`".into()],
            found: format!("`{}`", header.split_whitespace().next().unwrap_or("")),
        });
    };
    let mut parser = Parser::new(sig_text, 1)?;
    let signature = parser.signature()?;
    parser.finish()?;
    let mut parser = Parser::new(body, 2)?;
    let body = parser.block_until(&Tok::Eof)?;
    parser.finish()?;
    Ok(Mechanic { signature, body })
}
