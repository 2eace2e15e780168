//! Random, type-directed generation of code blocks over a sealed registry.
//!
//! Blocks are produced first statement to last, so every local declared by an
//! earlier line is a candidate producer for later lines. Whenever an expression
//! of some type is needed, every usable field, visible local and usable method
//! of that type gets weight 1, and all literals together share a single option
//! of weight `literal_weight`. Past `max_recursion_depth` only grounded
//! producers (no calls taking arguments) are considered.

mod config;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use config::{ConfigError, GenerationConfig, StatementKind};

use crate::lang::{Call, CodeBlock, Expr, LValue, Signature, Stmt};
use crate::registry::{MethodDescriptor, Producer, Registry};
use crate::scope::Scope;
use crate::types::TypeId;

/// Hard cap on if/else nesting inside a generated block.
pub const MAX_NESTING: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenFailure {
    NoFeasibleKind,
    NoProducer(TypeId),
}

impl std::fmt::Display for GenFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GenFailure::NoFeasibleKind => f.write_str("no feasible statement kind"),
            GenFailure::NoProducer(ty) => write!(f, "no producer for {ty}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerationError {
    #[error("generation exhausted at line {line}: {}", describe(.failures))]
    Exhausted { line: usize, failures: Vec<GenFailure> },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

fn describe(failures: &[GenFailure]) -> String {
    let mut parts: Vec<String> = failures.iter().map(ToString::to_string).collect();
    parts.dedup();
    parts.join(", ")
}

/// Integer bounds of the argument slot currently being filled.
type SlotBounds = (Option<i64>, Option<i64>);

/// A seeded sampler. One instance per thread; the registry is only borrowed.
pub struct Generator<'r> {
    registry: &'r Registry,
    config: GenerationConfig,
    rng: ChaCha8Rng,
    next_local: usize,
    reserved: Vec<String>,
}

impl<'r> Generator<'r> {
    pub fn new(registry: &'r Registry, config: &GenerationConfig) -> Result<Self, GenerationError> {
        config.validate()?;
        Ok(Generator {
            registry,
            config: config.clone(),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            next_local: 0,
            reserved: Vec::new(),
        })
    }

    pub fn config(&self) -> &GenerationConfig {
        &self.config
    }

    pub fn generate_block(&mut self, sig: &Signature) -> Result<CodeBlock, GenerationError> {
        self.next_local = 0;
        self.reserved = sig.params.iter().map(|p| p.name.clone()).collect();
        let mut scope = Scope::with_params(sig.params.iter().map(|p| (p.name.as_str(), &p.ty)));
        let lines = self.rng.gen_range(self.config.min_lines..=self.config.max_lines);
        let mut stmts = Vec::with_capacity(lines + 1);

        for line in 0..lines {
            let mut failures = Vec::new();
            let mut generated = None;
            for _ in 0..self.config.max_retries_per_line {
                let (saved_scope, saved_next) = (scope.clone(), self.next_local);
                match self.generate_statement(&mut scope) {
                    Ok(stmt) => {
                        generated = Some(stmt);
                        break;
                    }
                    Err(failure) => {
                        failures.push(failure);
                        scope = saved_scope;
                        self.next_local = saved_next;
                    }
                }
            }
            match generated {
                Some(stmt) => stmts.push(stmt),
                None => return Err(GenerationError::Exhausted { line, failures }),
            }
        }

        if !sig.return_type.is_void() {
            let mut failures = Vec::new();
            let mut value = None;
            for _ in 0..self.config.max_retries_per_line {
                match self.generate_expression(&sig.return_type, &scope, 0) {
                    Ok(e) => {
                        value = Some(e);
                        break;
                    }
                    Err(f) => failures.push(f),
                }
            }
            match value {
                Some(e) => stmts.push(Stmt::Return(Some(e))),
                None => return Err(GenerationError::Exhausted { line: lines, failures }),
            }
        }
        Ok(CodeBlock::new(stmts))
    }

    /// Generates one statement, picking uniformly among the enabled kinds that
    /// are currently feasible. The nesting level is the scope's frame depth.
    pub fn generate_statement(&mut self, scope: &mut Scope) -> Result<Stmt, GenFailure> {
        let kinds = self.feasible_kinds(scope);
        let &kind = kinds.choose(&mut self.rng).ok_or(GenFailure::NoFeasibleKind)?;
        match kind {
            StatementKind::VarDecl => {
                let types: Vec<TypeId> = self
                    .registry
                    .value_types()
                    .into_iter()
                    .filter(|t| self.producible(t, 0, scope))
                    .collect();
                let ty = types.choose(&mut self.rng).cloned().ok_or(GenFailure::NoFeasibleKind)?;
                let init = self.generate_expression(&ty, scope, 0)?;
                let name = self.fresh_name();
                scope.declare(name.clone(), ty.clone());
                Ok(Stmt::VarDecl { ty, name, init })
            }
            StatementKind::Assign => {
                let targets = self.assign_targets(scope);
                let (target, ty) = targets.choose(&mut self.rng).cloned().ok_or(GenFailure::NoFeasibleKind)?;
                let value = self.generate_expression(&ty, scope, 0)?;
                Ok(Stmt::Assign { target, value })
            }
            StatementKind::ExprStmt => {
                let methods = self.effect_methods(scope);
                let method = *methods.choose(&mut self.rng).ok_or(GenFailure::NoFeasibleKind)?;
                let args = self.generate_args(method, scope, 1)?;
                Ok(Stmt::Call(Call::new(method.name.clone(), args)))
            }
            StatementKind::IfElse => {
                let cond = self.generate_expression(&TypeId::Bool, scope, 0)?;
                let then_block = self.nested_block(scope)?;
                let else_block = if self.rng.gen_bool(self.config.else_probability) {
                    Some(self.nested_block(scope)?)
                } else {
                    None
                };
                Ok(Stmt::If {
                    cond,
                    then_block,
                    else_block,
                })
            }
        }
    }

    /// Generates an expression of type `wanted` at the given depth.
    pub fn generate_expression(&mut self, wanted: &TypeId, scope: &Scope, depth: usize) -> Result<Expr, GenFailure> {
        self.expression(wanted, scope, depth, (None, None))
    }

    fn expression(&mut self, wanted: &TypeId, scope: &Scope, depth: usize, bounds: SlotBounds) -> Result<Expr, GenFailure> {
        let grounded = depth >= self.config.max_recursion_depth;
        let mut options = Vec::new();
        let mut literal = false;
        for producer in self.registry.candidates_for(wanted, scope, grounded) {
            match producer {
                Producer::Literal => literal = self.config.literal_weight > 0.0,
                Producer::Method(ref name) => {
                    let method = self.registry.method(name).expect("candidate names a registered method");
                    if self.args_producible(method, depth + 1, scope) {
                        options.push(producer);
                    }
                }
                other => options.push(other),
            }
        }
        if options.is_empty() && !literal {
            return Err(GenFailure::NoProducer(wanted.clone()));
        }
        let take_literal = literal && {
            let w = self.config.literal_weight;
            options.is_empty() || self.rng.gen_bool(w / (options.len() as f64 + w))
        };
        if take_literal {
            return Ok(self.literal(wanted, bounds));
        }
        let producer = options.swap_remove(self.rng.gen_range(0..options.len()));
        Ok(match producer {
            Producer::Field(name) => Expr::Field(name),
            Producer::Local(name) => Expr::Local(name),
            Producer::Method(name) => {
                let method = self.registry.method(&name).expect("candidate names a registered method");
                let args = self.generate_args(method, scope, depth + 1)?;
                Expr::Call(Call::new(name, args))
            }
            Producer::Literal => unreachable!("literal handled above"),
        })
    }

    fn generate_args(&mut self, method: &MethodDescriptor, scope: &Scope, depth: usize) -> Result<Vec<Expr>, GenFailure> {
        method
            .params
            .iter()
            .enumerate()
            .map(|(i, p)| self.expression(&p.ty, scope, depth, method.int_bounds(i)))
            .collect()
    }

    fn literal(&mut self, ty: &TypeId, bounds: SlotBounds) -> Expr {
        match ty {
            TypeId::Int => {
                let (lo, hi) = literal_range(self.config.int_literal_min, self.config.int_literal_max, bounds);
                Expr::Int(self.rng.gen_range(lo..=hi))
            }
            TypeId::Bool => Expr::Bool(self.rng.gen_bool(0.5)),
            TypeId::Enum(name) => {
                let def = self.registry.enum_def(name).expect("literal enum is registered");
                let variant = def.variants.choose(&mut self.rng).expect("enums are non-empty");
                Expr::enum_lit(name.clone(), variant.clone())
            }
            TypeId::Void => unreachable!("void has no literals"),
        }
    }

    fn nested_block(&mut self, scope: &mut Scope) -> Result<CodeBlock, GenFailure> {
        let lines = self.rng.gen_range(1..=self.config.max_lines);
        scope.push_frame();
        let mut stmts = Vec::with_capacity(lines);
        let mut result = Ok(());
        for _ in 0..lines {
            match self.generate_statement(scope) {
                Ok(s) => stmts.push(s),
                Err(f) => {
                    result = Err(f);
                    break;
                }
            }
        }
        scope.pop_frame();
        result.map(|()| CodeBlock::new(stmts))
    }

    fn feasible_kinds(&self, scope: &Scope) -> Vec<StatementKind> {
        StatementKind::ALL
            .into_iter()
            .filter(|k| self.config.statement_kinds.contains(k))
            .filter(|k| match k {
                StatementKind::VarDecl => self
                    .registry
                    .value_types()
                    .iter()
                    .any(|t| self.producible(t, 0, scope)),
                StatementKind::Assign => !self.assign_targets(scope).is_empty(),
                StatementKind::ExprStmt => !self.effect_methods(scope).is_empty(),
                StatementKind::IfElse => scope.depth() < MAX_NESTING && self.producible(&TypeId::Bool, 0, scope),
            })
            .collect()
    }

    /// Writable usable fields, then visible locals, whose type can be produced.
    fn assign_targets(&self, scope: &Scope) -> Vec<(LValue, TypeId)> {
        let fields = self
            .registry
            .fields()
            .filter(|f| f.usable && f.writable)
            .map(|f| (LValue::Field(f.name.clone()), f.ty.clone()));
        let locals = scope.locals().map(|(n, t)| (LValue::Local(n.to_string()), t.clone()));
        fields
            .chain(locals)
            .filter(|(_, ty)| self.producible(ty, 0, scope))
            .collect()
    }

    /// Usable methods of any return type whose arguments can be produced.
    fn effect_methods(&self, scope: &Scope) -> Vec<&'r MethodDescriptor> {
        let registry = self.registry;
        registry
            .methods()
            .filter(|m| m.usable && self.args_producible(m, 1, scope))
            .collect()
    }

    fn producible(&self, ty: &TypeId, depth: usize, scope: &Scope) -> bool {
        let grounded = depth >= self.config.max_recursion_depth;
        self.registry
            .candidates_for(ty, scope, grounded)
            .iter()
            .any(|p| match p {
                Producer::Literal => self.config.literal_weight > 0.0,
                Producer::Method(name) => self
                    .registry
                    .method(name)
                    .is_some_and(|m| self.args_producible(m, depth + 1, scope)),
                Producer::Field(_) | Producer::Local(_) => true,
            })
    }

    fn args_producible(&self, method: &MethodDescriptor, depth: usize, scope: &Scope) -> bool {
        method.params.iter().all(|p| self.producible(&p.ty, depth, scope))
    }

    fn fresh_name(&mut self) -> String {
        loop {
            let name = format!("v{}", self.next_local);
            self.next_local += 1;
            if !self.reserved.contains(&name) {
                return name;
            }
        }
    }
}

/// The configured literal range narrowed by a slot's declared bounds. When the
/// two do not overlap the declared bounds win, since they are the callee's contract.
pub fn literal_range(lo: i64, hi: i64, (min, max): SlotBounds) -> (i64, i64) {
    let narrowed = (min.map_or(lo, |m| m.max(lo)), max.map_or(hi, |m| m.min(hi)));
    if narrowed.0 <= narrowed.1 {
        return narrowed;
    }
    match (min, max) {
        (Some(a), Some(b)) => (a, b),
        (Some(a), None) => (a, a),
        (None, Some(b)) => (b, b),
        (None, None) => (lo, hi),
    }
}

/// Generates one block with a fresh generator seeded from `config.seed`.
pub fn generate_block(sig: &Signature, registry: &Registry, config: &GenerationConfig) -> Result<CodeBlock, GenerationError> {
    Generator::new(registry, config)?.generate_block(sig)
}
