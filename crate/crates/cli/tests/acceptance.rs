//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.
//!
//! Set `MECHGEN_BLESS=1` to (re)write the CLI golden files instead of comparing.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use mechgen_core::evaluate::{evaluate_candidate, parse_challenge, search_mechanics, solve, Challenge, EvalStatus, Goal};
use mechgen_core::game::{
    build_game_registry, build_scoped_game_registry, hook_table, on_tile_tapped_signature, Board, Colour, GameState,
    ON_TILE_TAPPED,
};
use mechgen_core::lang::{
    parse_block, parse_mechanic, pretty, render_mechanic, typecheck, Call, CodeBlock, Expr, LValue, Signature, Stmt,
};
use mechgen_core::registry::{FieldDescriptor, MethodDescriptor, Param, ParamConstraint};
use mechgen_core::runtime::{invoke, Delegate, ExecBudget, HostError, HookTable, World};
use mechgen_core::synthesis::{generate_block, GenerationConfig, Generator};
use mechgen_core::{Registry, RegistryBuilder, Scope, TypeId, Value};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

const BLOCKS: u64 = 10_000;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> PathBuf {
    root().join("fixtures").join(name)
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_challenge(name: &str) -> Result<Challenge, String> {
    parse_challenge(&read(&fixture(name))?).map_err(|e| format!("{name}: {e}"))
}

fn seeded(seed: u64) -> GenerationConfig {
    GenerationConfig {
        seed,
        ..GenerationConfig::default()
    }
}

fn game_blocks(count: u64, cfg: impl Fn(u64) -> GenerationConfig) -> Result<Vec<CodeBlock>, String> {
    let registry = build_game_registry(3, 3);
    let sig = on_tile_tapped_signature();
    (0..count)
        .map(|seed| generate_block(&sig, &registry, &cfg(seed)).map_err(|e| format!("seed {seed}: {e}")))
        .collect()
}

/// Visits every expression with its depth: statement-level expressions are at
/// 0, arguments one deeper than their call, statement-call arguments at 1.
fn visit(block: &CodeBlock, f: &mut dyn FnMut(&Expr, usize)) {
    fn expr(e: &Expr, depth: usize, f: &mut dyn FnMut(&Expr, usize)) {
        f(e, depth);
        if let Expr::Call(c) = e {
            c.args.iter().for_each(|a| expr(a, depth + 1, f));
        }
    }
    for s in &block.stmts {
        match s {
            Stmt::VarDecl { init: e, .. } | Stmt::Assign { value: e, .. } | Stmt::Return(Some(e)) => expr(e, 0, f),
            Stmt::Call(c) => c.args.iter().for_each(|a| expr(a, 1, f)),
            Stmt::If {
                cond,
                then_block,
                else_block,
            } => {
                expr(cond, 0, f);
                visit(then_block, f);
                if let Some(b) = else_block {
                    visit(b, f);
                }
            }
            Stmt::Return(None) => {}
        }
    }
}

fn statement_calls<'a>(block: &'a CodeBlock, out: &mut Vec<&'a Call>) {
    for s in &block.stmts {
        match s {
            Stmt::Call(c) => out.push(c),
            Stmt::If {
                then_block,
                else_block,
                ..
            } => {
                statement_calls(then_block, out);
                if let Some(b) = else_block {
                    statement_calls(b, out);
                }
            }
            _ => {}
        }
    }
}

fn all_calls(block: &CodeBlock) -> Vec<Call> {
    let mut calls = Vec::new();
    visit(block, &mut |e, _| {
        if let Expr::Call(c) = e {
            calls.push(c.clone());
        }
    });
    let mut stmts = Vec::new();
    statement_calls(block, &mut stmts);
    calls.extend(stmts.into_iter().cloned());
    calls
}

// ---------------------------------------------------------------------------

fn c1_well_typed() -> Outcome {
    let started = Instant::now();
    let registry = build_game_registry(3, 3);
    let sig = on_tile_tapped_signature();
    let mut failures = 0;
    for seed in 0..BLOCKS {
        let block = generate_block(&sig, &registry, &seeded(seed)).map_err(|e| format!("seed {seed}: {e}"))?;
        if typecheck(&block, &sig, &registry).is_err() {
            failures += 1;
        }
    }
    let elapsed = started.elapsed();
    ensure!(failures == 0, "{failures} of {BLOCKS} blocks failed the type checker");
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{BLOCKS} blocks, 0 type errors, {:.1}s", elapsed.as_secs_f64()))
}

fn c2_determinism() -> Outcome {
    let registry = build_game_registry(3, 3);
    let sig = on_tile_tapped_signature();
    for i in 0..100u64 {
        let seed = i.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let a = pretty(&generate_block(&sig, &registry, &seeded(seed)).map_err(|e| e.to_string())?);
        let b = pretty(&generate_block(&sig, &registry, &seeded(seed)).map_err(|e| e.to_string())?);
        ensure!(a == b, "seed {seed} produced different text");
    }
    Ok("100 seeds byte-identical".into())
}

fn c3_literal_weight() -> Outcome {
    let mut b = RegistryBuilder::new();
    for name in ["A", "B", "C", "D"] {
        b.register_field(FieldDescriptor::new(name, TypeId::Int)).map_err(|e| e.to_string())?;
    }
    let registry = b.seal().map_err(|e| format!("{e:?}"))?;
    let scope = Scope::new();
    ensure!(
        registry.candidates_for(&TypeId::Int, &scope, false).len() == 5,
        "expected 4 producers plus the literal option"
    );
    let cfg = GenerationConfig {
        literal_weight: 1.0,
        ..GenerationConfig::default()
    };
    let mut generator = Generator::new(&registry, &cfg).map_err(|e| e.to_string())?;
    let draws = 10_000;
    let mut literals = 0;
    for _ in 0..draws {
        let e = generator.generate_expression(&TypeId::Int, &scope, 0).map_err(|e| e.to_string())?;
        literals += usize::from(matches!(e, Expr::Int(_)));
    }
    let share = literals as f64 / draws as f64;
    ensure!((share - 0.2).abs() <= 0.02, "literal share {share:.4}, expected 0.2 +- 0.02");
    Ok(format!("literal share {share:.4} over {draws} draws"))
}

/// A host offering `Move(newx)` and `AddOne(x)`.
#[derive(Default)]
struct Mover {
    moves: Vec<i64>,
}

impl World for Mover {
    fn read_field(&self, name: &str) -> Result<Value, HostError> {
        Err(HostError(format!("no field {name}")))
    }

    fn write_field(&mut self, name: &str, _: Value) -> Result<(), HostError> {
        Err(HostError(format!("no field {name}")))
    }

    fn call_method(&mut self, name: &str, args: &[Value]) -> Result<Value, HostError> {
        match (name, args) {
            ("Move", [Value::Int(v)]) => {
                self.moves.push(*v);
                Ok(Value::Unit)
            }
            ("AddOne", [Value::Int(v)]) => Ok(Value::Int(v + 1)),
            _ => Err(HostError(format!("no method {name}"))),
        }
    }
}

fn c4_constraints() -> Outcome {
    let registry = build_game_registry(3, 3);
    let blocks = game_blocks(BLOCKS, seeded)?;
    let mut checked = 0usize;
    for (seed, block) in blocks.iter().enumerate() {
        for call in all_calls(block) {
            let method = registry.method(&call.method).ok_or(format!("unknown {}", call.method))?;
            for (i, arg) in call.args.iter().enumerate() {
                if let Expr::Int(v) = arg {
                    let (min, max) = method.int_bounds(i);
                    if min.is_some() || max.is_some() {
                        checked += 1;
                    }
                    ensure!(
                        min.is_none_or(|m| *v >= m) && max.is_none_or(|m| *v <= m),
                        "seed {seed}: {}({i}) = {v} outside [{min:?}, {max:?}]",
                        call.method
                    );
                }
            }
        }
    }

    let mut b = RegistryBuilder::new();
    b.register_method(
        MethodDescriptor::new("Move", vec![Param::new("newx", TypeId::Int)], TypeId::Void)
            .with_constraint(ParamConstraint::min("newx", -1))
            .with_constraint(ParamConstraint::max("newx", 1)),
    )
    .map_err(|e| e.to_string())?;
    let movers = b.seal().map_err(|e| format!("{e:?}"))?;
    let sig = Signature::new("step", vec![], TypeId::Void);
    let run = |src: &str, world: &mut Mover| -> Result<Value, String> {
        let d = Delegate::generated(sig.clone(), parse_block(src).map_err(|e| e.to_string())?, &movers)
            .map_err(|e| e.to_string())?;
        invoke(&d, &[], &movers, world, &mut ExecBudget::default()).map_err(|e| e.report_line())
    };
    let mut world = Mover::default();
    run("Move(1);", &mut world)?;
    let err = match run("Move(5);", &mut world) {
        Ok(_) => return Err("Move(5) against max 1 did not fail".into()),
        Err(line) => line,
    };
    ensure!(err.contains("kind=ConstraintViolation"), "wrong error: {err}");
    ensure!(world.moves == vec![1], "violating call reached the host: {:?}", world.moves);
    Ok(format!("{checked} constrained literals in range; Move(5) -> {err}"))
}

fn c5_grounding() -> Outcome {
    let mut totals = Vec::new();
    for d in 0..=2usize {
        let blocks = game_blocks(BLOCKS, |seed| GenerationConfig {
            max_recursion_depth: d,
            ..seeded(seed)
        })?;
        let mut calls = 0usize;
        for (seed, block) in blocks.iter().enumerate() {
            let mut bad = None;
            visit(block, &mut |e, depth| {
                if let Expr::Call(c) = e {
                    calls += 1;
                    let nested = depth >= 1 && !c.args.is_empty();
                    if (depth > d && !c.args.is_empty()) || (d == 0 && nested) {
                        bad = Some(format!("{}(..) at depth {depth}", c.method));
                    }
                }
            });
            if let Some(b) = bad {
                return Err(format!("d={d} seed {seed}: {b}\n{}", pretty(block)));
            }
        }
        totals.push(format!("d={d}: {calls} expression calls"));
    }
    Ok(totals.join(", "))
}

fn c6_round_trip() -> Outcome {
    for (seed, block) in game_blocks(BLOCKS, seeded)?.into_iter().enumerate() {
        let text = pretty(&block);
        let back = parse_block(&text).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(back == block, "seed {seed} did not round-trip:\n{text}");
    }
    let mut fixtures = 0;
    for entry in fs::read_dir(root().join("fixtures")).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().is_some_and(|e| e == "mg") {
            let m = parse_mechanic(&read(&path)?).map_err(|e| format!("{}: {e}", path.display()))?;
            let back = parse_mechanic(&render_mechanic(&m)).map_err(|e| e.to_string())?;
            ensure!(back == m, "{} did not round-trip", path.display());
            ensure!(parse_block(&pretty(&m.body)).ok() == Some(m.body), "{}", path.display());
            fixtures += 1;
        }
    }
    Ok(format!("{BLOCKS} generated blocks and {fixtures} fixture mechanics"))
}

fn tap_script(hooks: &HookTable, registry: &Registry, board: &Board, taps: &[(i64, i64)]) -> Vec<(Board, usize, bool)> {
    let mut state = GameState::new(board.clone());
    taps.iter()
        .map(|&(x, y)| {
            let ok = state.tap(x, y, hooks, registry).is_ok();
            (state.board.clone(), state.taps_used, ok)
        })
        .collect()
}

fn c7_delegates() -> Outcome {
    let mut b = RegistryBuilder::new();
    b.register_method(MethodDescriptor::new("AddOne", vec![Param::new("x", TypeId::Int)], TypeId::Int))
        .map_err(|e| e.to_string())?;
    let registry = b.seal().map_err(|e| format!("{e:?}"))?;
    let sig = Signature::new("NumberOp", vec![Param::new("x", TypeId::Int)], TypeId::Int);
    let num_delegate = Delegate::host(sig, "AddOne");
    let got = num_delegate
        .invoke(&[Value::Int(1)], &registry, &mut Mover::default(), &mut ExecBudget::default())
        .map_err(|e| e.to_string())?;
    ensure!(got == Value::Int(2), "AddOne(1) returned {got}");

    let challenge = load_challenge("unsolvable.ch")?;
    let board = challenge.initial;
    let registry = build_game_registry(board.width(), board.height());
    let taps = [(0, 0), (1, 0), (2, 2), (0, 1), (5, 0), (0, 0), (2, 0), (1, 1), (-1, 2), (0, 0)];
    let baseline = tap_script(&hook_table(), &registry, &board, &taps);

    let mechanic = parse_mechanic(&read(&fixture("set_yellow.mg"))?).map_err(|e| e.to_string())?;
    let mut hooks = hook_table();
    let d = Delegate::generated(mechanic.signature, mechanic.body, &registry).map_err(|e| e.to_string())?;
    hooks.bind(ON_TILE_TAPPED, d).map_err(|e| e.to_string())?;
    let swapped = tap_script(&hooks, &registry, &board, &taps);
    ensure!(swapped != baseline, "bound mechanic did not change behavior");
    hooks.reset(ON_TILE_TAPPED).map_err(|e| e.to_string())?;
    let restored = tap_script(&hooks, &registry, &board, &taps);
    ensure!(restored == baseline, "reset did not restore baseline transitions");
    Ok("AddOne(1) = 2; bind/reset reproduces 10 baseline taps".into())
}

/// Every tap sequence of each length in order, without sharing states.
fn naive(challenge: &Challenge, hooks: &HookTable, registry: &Registry) -> Option<Vec<(usize, usize)>> {
    let (w, h) = (challenge.initial.width(), challenge.initial.height());
    let cells: Vec<(usize, usize)> = (0..h).flat_map(|y| (0..w).map(move |x| (x, y))).collect();
    for len in 1..=challenge.max_taps {
        let total = cells.len().pow(len as u32);
        for n in 0..total {
            let mut seq = Vec::with_capacity(len);
            let mut rest = n;
            for _ in 0..len {
                seq.push(cells[rest % cells.len()]);
                rest /= cells.len();
            }
            seq.reverse();
            let mut state = GameState::new(challenge.initial.clone());
            if seq.iter().all(|&(x, y)| state.tap(x as i64, y as i64, hooks, registry).is_ok())
                && challenge.goal.is_satisfied(&state.board)
            {
                return Some(seq);
            }
        }
    }
    None
}

fn small_boards(w: usize, h: usize) -> Vec<Board> {
    let letters = ['.', 'R', 'G', 'B', 'Y'];
    let cells = w * h;
    let mut out = Vec::new();
    for n in 0..letters.len().pow(cells as u32) {
        let mut rest = n;
        let mut b = Board::empty(w, h);
        for i in 0..cells {
            b.set(i % w, i / w, Colour::from_letter(letters[rest % letters.len()]));
            rest /= letters.len();
        }
        if b.is_gravity_normal() {
            out.push(b);
        }
    }
    out
}

fn c8_gameplay() -> Outcome {
    let challenge = load_challenge("unsolvable.ch")?;
    ensure!(
        challenge.goal == Goal::ColourPresent(Colour::Y) && challenge.max_taps == 4,
        "fixture changed"
    );
    let registry = build_game_registry(3, 3);
    let started = Instant::now();
    let baseline = solve(&challenge, &hook_table(), &registry);
    let elapsed = started.elapsed();
    ensure!(baseline.status == EvalStatus::Unsolvable, "baseline: {baseline}");
    ensure!(elapsed < Duration::from_secs(10), "baseline solve took {elapsed:?}");

    let m = parse_mechanic(&read(&fixture("set_yellow.mg"))?).map_err(|e| e.to_string())?;
    let with = evaluate_candidate(&m.body, &m.signature, &registry, &challenge);
    ensure!(with.min_taps() == Some(1), "SetTile mechanic: {with}");

    let mut compared = 0;
    for (w, h) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        let registry = build_game_registry(w, h);
        let mut tables = vec![hook_table()];
        for name in ["set_yellow.mg", "destroy.mg", "recolour_or_clear.mg"] {
            let m = parse_mechanic(&read(&fixture(name))?).map_err(|e| e.to_string())?;
            let d = Delegate::generated(m.signature, m.body, &registry).map_err(|e| format!("{name}: {e}"))?;
            let mut t = hook_table();
            t.bind(ON_TILE_TAPPED, d).map_err(|e| e.to_string())?;
            tables.push(t);
        }
        for board in small_boards(w, h) {
            for goal in [
                Goal::Cleared,
                Goal::ColourCleared(Colour::R),
                Goal::ColourPresent(Colour::Y),
                Goal::ColourPresent(Colour::G),
            ] {
                for max_taps in 1..=3 {
                    let Ok(c) = Challenge::new(board.clone(), goal, max_taps) else {
                        continue;
                    };
                    for hooks in &tables {
                        let bfs = solve(&c, hooks, &registry);
                        let agree = match (&bfs.status, naive(&c, hooks, &registry)) {
                            (EvalStatus::Unsolvable, None) => true,
                            (EvalStatus::Solved { min_taps, witness }, Some(seq)) => {
                                *min_taps == seq.len() && *witness == seq
                            }
                            _ => false,
                        };
                        ensure!(agree, "mismatch on {board:?} {goal} max_taps={max_taps}: {bfs}");
                        compared += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "baseline UNSOLVABLE in {:.2}s, SetTile mechanic SOLVED in 1; {compared} small challenges match the naive enumerator",
        elapsed.as_secs_f64()
    ))
}

/// Probability-weighted one-line programs for the scoped SetTile/DoNothing design space,
/// derived from the sampling rules by hand.
struct OneLine {
    lits: Vec<i64>,
    coord_lits: Vec<i64>,
}

type Dist<T> = Vec<(T, f64)>;

impl OneLine {
    fn uniform<T: Clone>(items: &[T]) -> Dist<T> {
        items.iter().map(|t| (t.clone(), 1.0 / items.len() as f64)).collect()
    }

    /// Int expression: params `x`, `y` weight 1 each, the literal option weight 1.
    fn int(&self, lits: &[i64]) -> Dist<Expr> {
        let mut out = vec![(Expr::local("x"), 1.0 / 3.0), (Expr::local("y"), 1.0 / 3.0)];
        out.extend(lits.iter().map(|&v| (Expr::Int(v), 1.0 / 3.0 / lits.len() as f64)));
        out
    }

    fn bool(&self) -> Dist<Expr> {
        Self::uniform(&[Expr::Bool(true), Expr::Bool(false)])
    }

    fn colour(&self) -> Dist<Expr> {
        Self::uniform(&["R", "G", "B", "Y"].map(|v| Expr::enum_lit("Colour", v)))
    }

    fn statements(&self, nesting: usize) -> Dist<Stmt> {
        let mut kinds: Vec<Dist<Stmt>> = Vec::new();

        let mut decls = Vec::new();
        for (ty, dist) in [
            (TypeId::Int, self.int(&self.lits)),
            (TypeId::Bool, self.bool()),
            (TypeId::enumeration("Colour"), self.colour()),
        ] {
            for (e, p) in dist {
                let stmt = Stmt::VarDecl {
                    ty: ty.clone(),
                    name: "v0".into(),
                    init: e,
                };
                decls.push((stmt, p / 3.0));
            }
        }
        kinds.push(decls);

        let mut assigns = Vec::new();
        for target in ["x", "y"] {
            for (e, p) in self.int(&self.lits) {
                let stmt = Stmt::Assign {
                    target: LValue::Local(target.into()),
                    value: e,
                };
                assigns.push((stmt, p / 2.0));
            }
        }
        kinds.push(assigns);

        let mut calls = vec![(Stmt::Call(Call::new("DoNothing", vec![])), 0.5)];
        for (a, pa) in self.int(&self.coord_lits) {
            for (b, pb) in self.int(&self.coord_lits) {
                for (c, pc) in self.colour() {
                    let stmt = Stmt::Call(Call::new("SetTile", vec![a.clone(), b.clone(), c]));
                    calls.push((stmt, 0.5 * pa * pb * pc));
                }
            }
        }
        kinds.push(calls);

        if nesting < 3 {
            let mut ifs = Vec::new();
            for (cond, pc) in self.bool() {
                for (inner, pi) in self.statements(nesting + 1) {
                    let stmt = Stmt::If {
                        cond: cond.clone(),
                        then_block: CodeBlock::new(vec![inner]),
                        else_block: None,
                    };
                    ifs.push((stmt, pc * pi));
                }
            }
            kinds.push(ifs);
        }

        let k = kinds.len() as f64;
        kinds.into_iter().flatten().map(|(s, p)| (s, p / k)).collect()
    }
}

fn c9_discovery() -> Outcome {
    let started = Instant::now();
    let challenge = load_challenge("unsolvable.ch")?;
    let cfg = GenerationConfig::parse(&read(&fixture("one_line.cfg"))?).map_err(|e| e.to_string())?;
    ensure!(
        cfg.min_lines == 1 && cfg.max_lines == 1 && cfg.else_probability == 0.0 && cfg.max_recursion_depth == 1,
        "one_line.cfg changed"
    );
    let (w, h) = (challenge.initial.width(), challenge.initial.height());
    let registry = build_scoped_game_registry(w, h, &["SetTile", "DoNothing"]);
    let sig = on_tile_tapped_signature();

    let lits: Vec<i64> = (cfg.int_literal_min..=cfg.int_literal_max).collect();
    let oracle = OneLine {
        coord_lits: lits.iter().copied().filter(|v| (0..w.min(h) as i64).contains(v)).collect(),
        lits,
    };
    ensure!(w == h, "oracle assumes a square board");
    let programs = oracle.statements(0);
    let total: f64 = programs.iter().map(|(_, p)| p).sum();
    ensure!((total - 1.0).abs() < 1e-9, "oracle probabilities sum to {total}");
    let mut by_text: BTreeMap<String, f64> = BTreeMap::new();
    let mut p_success = 0.0;
    for (stmt, p) in &programs {
        let block = CodeBlock::new(vec![stmt.clone()]);
        *by_text.entry(pretty(&block)).or_default() += p;
        if evaluate_candidate(&block, &sig, &registry, &challenge).is_solved() {
            p_success += p;
        }
    }
    let budget = 10_000usize;
    let expected = p_success * budget as f64;
    ensure!(expected >= 10.0, "expected successes {expected:.1} < 10 (p = {p_success:.5})");

    let report = search_mechanics(&sig, &registry, &challenge, &cfg, budget).map_err(|e| e.to_string())?;
    let solved = report.solved();
    ensure!(solved >= 1, "no solving mechanic in {budget} candidates");
    for c in &report.candidates {
        let text = c.text.as_deref().ok_or("generation failed")?;
        ensure!(by_text.contains_key(text), "sample outside the enumerated space:\n{text}");
    }
    // the sampled rate should agree with the oracle
    let sigma = (p_success * (1.0 - p_success) / budget as f64).sqrt();
    let rate = solved as f64 / budget as f64;
    ensure!(
        (rate - p_success).abs() <= 5.0 * sigma,
        "sampled rate {rate:.4} far from oracle {p_success:.4}"
    );
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    Ok(format!(
        "p = {p_success:.4} over {} programs, expected {expected:.0}, found {solved} ({} distinct) in {:.1}s",
        by_text.len(),
        report.distinct.len(),
        elapsed.as_secs_f64()
    ))
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn mechgen(args: &[&str], dir: &Path) -> Result<Run, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_mechgen"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    Ok(Run {
        code: out.status.code().ok_or("killed by signal")?,
        stdout: String::from_utf8(out.stdout).map_err(|e| e.to_string())?,
        stderr: String::from_utf8(out.stderr).map_err(|e| e.to_string())?,
    })
}

fn golden(name: &str, actual: &str) -> Result<(), String> {
    let path = root().join("fixtures/golden").join(name);
    if std::env::var_os("MECHGEN_BLESS").is_some() {
        fs::create_dir_all(path.parent().unwrap()).map_err(|e| e.to_string())?;
        return fs::write(&path, actual).map_err(|e| e.to_string());
    }
    let expected = read(&path)?;
    ensure!(expected == actual, "{name} differs from golden output:\n{actual}");
    Ok(())
}

fn c10_cli() -> Outcome {
    let root = root();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut checks = 0;
    let mut check = |args: &[&str], code: i32, golden_name: Option<&str>| -> Result<Run, String> {
        let first = mechgen(args, &root)?;
        let second = mechgen(args, &root)?;
        ensure!(
            first.code == code,
            "`mechgen {}` exited {} (want {code}): {}",
            args.join(" "),
            first.code,
            first.stderr
        );
        ensure!(
            first.stdout == second.stdout && first.code == second.code,
            "`mechgen {}` is not stable",
            args.join(" ")
        );
        if let Some(name) = golden_name {
            golden(name, &first.stdout)?;
        }
        checks += 1;
        Ok(first)
    };

    check(&["registry"], 0, Some("registry.txt"))?;
    check(&["solve", "--challenge", "fixtures/unsolvable.ch"], 0, Some("solve_unsolvable.txt"))?;
    check(&["solve", "--challenge", "fixtures/cleared.ch"], 0, Some("solve_cleared.txt"))?;
    for m in ["set_yellow", "destroy", "recolour_or_clear"] {
        let mechanic = format!("fixtures/{m}.mg");
        check(
            &["evaluate", "--mechanic", &mechanic, "--challenge", "fixtures/unsolvable.ch"],
            0,
            Some(&format!("evaluate_{m}.txt")),
        )?;
    }
    let rejected = check(
        &["evaluate", "--mechanic", "fixtures/ill_typed.mg", "--challenge", "fixtures/unsolvable.ch"],
        1,
        None,
    )?;
    ensure!(rejected.stderr.contains("REJECTED"), "ill-typed mechanic: {}", rejected.stderr);

    let out = tmp.path().join("gen");
    fs::create_dir(&out).map_err(|e| e.to_string())?;
    let out_arg = out.to_str().ok_or("non-UTF-8 temp path")?;
    let gen = [
        "generate",
        "--config",
        "fixtures/default.cfg",
        "--signature",
        "onTileTapped",
        "--count",
        "5",
        "--out",
        out_arg,
    ];
    check(&gen, 0, None)?;
    for seed in 0..5 {
        let name = format!("mech_{seed}.mg");
        let text = read(&out.join(&name))?;
        golden(&format!("generate/{name}"), &text)?;
        ensure!(parse_mechanic(&text).is_ok(), "{name} does not parse");
    }
    let report = tmp.path().join("report.txt");
    let report_arg = report.to_str().ok_or("non-UTF-8 temp path")?;
    let search = [
        "search",
        "--config",
        "fixtures/default.cfg",
        "--challenge",
        "fixtures/unsolvable.ch",
        "--report",
        report_arg,
    ];
    let first = check(&search, 0, Some("search_stdout.txt"))?;
    golden("search_report.txt", &read(&report)?)?;
    ensure!(first.stdout.starts_with("budget="), "search summary: {}", first.stdout);

    // rejected input and usage errors
    check(&[], 1, None)?;
    check(&["frobnicate"], 1, None)?;
    check(&["solve"], 1, None)?;
    check(&["solve", "--challenge", "fixtures/missing.ch"], 1, None)?;
    check(&["solve", "--challenge", "fixtures/destroy.mg"], 1, None)?;
    check(&["generate", "--config", "fixtures/default.cfg", "--signature", "onSwipe", "--count", "1", "--out", out_arg], 1, None)?;
    check(&["generate", "--config", "fixtures/default.cfg", "--signature", "onTileTapped", "--count", "0", "--out", out_arg], 1, None)?;
    // internal error: the report cannot be written
    let unwritable = tmp.path().join("no/such/dir/report.txt");
    let unwritable = unwritable.to_str().ok_or("non-UTF-8 temp path")?;
    check(
        &["search", "--config", "fixtures/one_line.cfg", "--challenge", "fixtures/unsolvable.ch", "--report", unwritable],
        2,
        None,
    )?;
    Ok(format!("{checks} invocations stable, goldens and exit codes match"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "well-typedness", c1_well_typed),
        (2, "determinism", c2_determinism),
        (3, "literal weighting", c3_literal_weight),
        (4, "constraint compliance", c4_constraints),
        (5, "grounding", c5_grounding),
        (6, "parser round-trip", c6_round_trip),
        (7, "delegate semantics", c7_delegates),
        (8, "gameplay unit test oracle", c8_gameplay),
        (9, "mechanic discovery", c9_discovery),
        (10, "CLI golden tests", c10_cli),
    ];
    let only: Option<u32> = std::env::args().nth(1).and_then(|a| a.parse().ok());
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, name, run) in criteria {
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("[PASS] criterion {n} ({name}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {n} ({name}): {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
