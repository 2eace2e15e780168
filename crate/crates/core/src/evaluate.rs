//! Gameplay unit tests for mechanics.
//!
//! A [`Challenge`] is a small level with a goal and a tap budget. [`solve`]
//! runs an exhaustive breadth-first search over tap sequences with whatever
//! mechanic is bound to the tap hook, which gives a binary solvable/unsolvable
//! answer. [`search_mechanics`] samples candidate mechanics and keeps those
//! that make the level solvable.

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::game::{self, Board, BoardError, Colour, GameState, ON_TILE_TAPPED};
use crate::lang::{pretty, CodeBlock, Signature, TypeError};
use crate::registry::Registry;
use crate::runtime::{Delegate, HookError, HookTable};
use crate::synthesis::{GenerationConfig, GenerationError, Generator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Goal {
    Cleared,
    ColourCleared(Colour),
    ColourPresent(Colour),
}

impl Goal {
    pub fn is_satisfied(&self, board: &Board) -> bool {
        match self {
            Goal::Cleared => board.tile_count() == 0,
            Goal::ColourCleared(c) => board.count(*c) == 0,
            Goal::ColourPresent(c) => board.count(*c) > 0,
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::Cleared => f.write_str("CLEARED"),
            Goal::ColourCleared(c) => write!(f, "COLOUR_CLEARED {c}"),
            Goal::ColourPresent(c) => write!(f, "COLOUR_PRESENT {c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChallengeError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("goal is already satisfied by the initial board")]
    AlreadySolved,
    #[error("initial board has floating tiles")]
    NotGravityNormal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Challenge {
    pub initial: Board,
    pub goal: Goal,
    pub max_taps: usize,
}

impl Challenge {
    pub fn new(initial: Board, goal: Goal, max_taps: usize) -> Result<Self, ChallengeError> {
        if max_taps < 1 {
            return Err(ChallengeError::Parse {
                line: 0,
                reason: "max_taps must be at least 1".into(),
            });
        }
        if !initial.is_gravity_normal() {
            return Err(ChallengeError::NotGravityNormal);
        }
        if goal.is_satisfied(&initial) {
            return Err(ChallengeError::AlreadySolved);
        }
        Ok(Challenge {
            initial,
            goal,
            max_taps,
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for row in self.initial.to_rows() {
            out.push_str(&row);
            out.push('\n');
        }
        let _ = write!(out, "goal: {}\nmax_taps: {}\n", self.goal, self.max_taps);
        out
    }
}

fn parse_colour(text: &str, line: usize) -> Result<Colour, ChallengeError> {
    let mut chars = text.chars();
    match (chars.next().and_then(Colour::from_letter), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(ChallengeError::Parse {
            line,
            reason: format!("unknown colour `{text}`"),
        }),
    }
}

fn parse_goal(text: &str, line: usize) -> Result<Goal, ChallengeError> {
    let words: Vec<&str> = text.split_whitespace().collect();
    match words.as_slice() {
        ["CLEARED"] => Ok(Goal::Cleared),
        ["COLOUR_CLEARED", c] => Ok(Goal::ColourCleared(parse_colour(c, line)?)),
        ["COLOUR_PRESENT", c] => Ok(Goal::ColourPresent(parse_colour(c, line)?)),
        _ => Err(ChallengeError::Parse {
            line,
            reason: format!("unknown goal `{text}`"),
        }),
    }
}

/// Reads the board/challenge text format: `#` comments, board rows top first,
/// then `goal: ...` and `max_taps: <n>`.
pub fn parse_challenge(text: &str) -> Result<Challenge, ChallengeError> {
    let mut rows: Vec<(usize, &str)> = Vec::new();
    let mut goal = None;
    let mut max_taps = None;
    let err = |line: usize, reason: &str| ChallengeError::Parse {
        line,
        reason: reason.to_string(),
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("goal:") {
            if goal.is_some() {
                return Err(err(line_no, "duplicate goal"));
            }
            goal = Some(parse_goal(rest.trim(), line_no)?);
        } else if let Some(rest) = line.strip_prefix("max_taps:") {
            if max_taps.is_some() {
                return Err(err(line_no, "duplicate max_taps"));
            }
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| err(line_no, "max_taps must be a non-negative integer"))?;
            if n < 1 {
                return Err(err(line_no, "max_taps must be at least 1"));
            }
            max_taps = Some(n);
        } else {
            if goal.is_some() || max_taps.is_some() {
                return Err(err(line_no, "board rows must come before goal and max_taps"));
            }
            rows.push((line_no, line));
        }
    }

    let last = text.lines().count().max(1);
    let goal = goal.ok_or_else(|| err(last, "missing goal"))?;
    let max_taps = max_taps.ok_or_else(|| err(last, "missing max_taps"))?;
    let texts: Vec<&str> = rows.iter().map(|(_, r)| *r).collect();
    let board = Board::from_rows(&texts).map_err(|e| {
        let line = match &e {
            BoardError::Empty => last,
            BoardError::RaggedRow { row, .. } | BoardError::BadCell { row, .. } => rows[*row].0,
        };
        ChallengeError::Parse {
            line,
            reason: e.to_string(),
        }
    })?;
    Challenge::new(board, goal, max_taps)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Rejection {
    #[error("type error: {0}")]
    Type(#[from] TypeError),
    #[error("generation failed: {0}")]
    Generation(#[from] GenerationError),
    #[error("cannot bind: {0}")]
    Hook(#[from] HookError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalStatus {
    /// `witness` lists taps as `(x, y)`.
    Solved { min_taps: usize, witness: Vec<(usize, usize)> },
    Unsolvable,
    Rejected(Rejection),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub status: EvalStatus,
    /// Tap attempts that raised a runtime error.
    pub error_count: usize,
    /// States whose taps were expanded.
    pub states_explored: usize,
}

impl EvalResult {
    pub fn is_solved(&self) -> bool {
        matches!(self.status, EvalStatus::Solved { .. })
    }

    pub fn min_taps(&self) -> Option<usize> {
        match self.status {
            EvalStatus::Solved { min_taps, .. } => Some(min_taps),
            _ => None,
        }
    }

    fn rejected(reason: Rejection) -> Self {
        EvalResult {
            status: EvalStatus::Rejected(reason),
            error_count: 0,
            states_explored: 0,
        }
    }
}

impl fmt::Display for EvalResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.status {
            EvalStatus::Solved { min_taps, witness } => {
                let taps: Vec<String> = witness.iter().map(|(x, y)| format!("({x},{y})")).collect();
                write!(f, "SOLVED min_taps={min_taps} witness={}", taps.join(" "))?;
            }
            EvalStatus::Unsolvable => f.write_str("UNSOLVABLE")?,
            EvalStatus::Rejected(reason) => return write!(f, "REJECTED {reason}"),
        }
        write!(
            f,
            " states_explored={} error_count={}",
            self.states_explored, self.error_count
        )
    }
}

struct Node {
    board: Board,
    parent: Option<usize>,
    tap: (usize, usize),
}

fn witness(nodes: &[Node], mut at: usize) -> Vec<(usize, usize)> {
    let mut taps = Vec::new();
    while let Some(parent) = nodes[at].parent {
        taps.push(nodes[at].tap);
        at = parent;
    }
    taps.reverse();
    taps
}

/// Breadth-first search over tap sequences of length at most `max_taps`.
///
/// Taps are tried in `(y, x)` order and each board is expanded at most once,
/// so the first goal state found carries the lexicographically smallest
/// witness among the shortest ones. Taps that raise a runtime error are
/// counted and pruned.
pub fn solve(challenge: &Challenge, hooks: &HookTable, registry: &Registry) -> EvalResult {
    let board = &challenge.initial;
    let mut result = EvalResult {
        status: EvalStatus::Unsolvable,
        error_count: 0,
        states_explored: 0,
    };
    if challenge.goal.is_satisfied(board) {
        result.status = EvalStatus::Solved {
            min_taps: 0,
            witness: Vec::new(),
        };
        return result;
    }

    let mut nodes = vec![Node {
        board: board.clone(),
        parent: None,
        tap: (0, 0),
    }];
    let mut seen: HashSet<Board> = HashSet::from([board.clone()]);
    let mut frontier = vec![0usize];

    for depth in 0..challenge.max_taps {
        let mut next = Vec::new();
        for &index in &frontier {
            result.states_explored += 1;
            for y in 0..board.height() {
                for x in 0..board.width() {
                    let mut state = GameState {
                        board: nodes[index].board.clone(),
                        taps_used: depth,
                    };
                    if state.tap(x as i64, y as i64, hooks, registry).is_err() {
                        result.error_count += 1;
                        continue;
                    }
                    if !seen.insert(state.board.clone()) {
                        continue;
                    }
                    let solved = challenge.goal.is_satisfied(&state.board);
                    nodes.push(Node {
                        board: state.board,
                        parent: Some(index),
                        tap: (x, y),
                    });
                    let child = nodes.len() - 1;
                    if solved {
                        result.status = EvalStatus::Solved {
                            min_taps: depth + 1,
                            witness: witness(&nodes, child),
                        };
                        return result;
                    }
                    next.push(child);
                }
            }
        }
        frontier = next;
    }
    result
}

/// Type-checks `block`, binds it as the tap hook on a fresh table, and solves.
pub fn evaluate_candidate(block: &CodeBlock, sig: &Signature, registry: &Registry, challenge: &Challenge) -> EvalResult {
    let delegate = match Delegate::generated(sig.clone(), block.clone(), registry) {
        Ok(d) => d,
        Err(e) => return EvalResult::rejected(Rejection::Type(e)),
    };
    let mut hooks = game::hook_table();
    if let Err(e) = hooks.bind(ON_TILE_TAPPED, delegate) {
        return EvalResult::rejected(Rejection::Hook(e));
    }
    let result = solve(challenge, &hooks, registry);
    hooks.reset(ON_TILE_TAPPED).expect("hook was declared");
    result
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateOutcome {
    pub seed: u64,
    pub text: Option<String>,
    pub result: EvalResult,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoundMechanic {
    pub seed: u64,
    pub text: String,
    pub min_taps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub budget: usize,
    pub candidates: Vec<CandidateOutcome>,
    /// Solving mechanics, deduplicated by printed text, in discovery order.
    pub distinct: Vec<FoundMechanic>,
    pub wall_time: Duration,
}

impl SearchReport {
    pub fn solved(&self) -> usize {
        self.candidates.iter().filter(|c| c.result.is_solved()).count()
    }

    /// Report file text. Wall time is left out so the file is reproducible.
    pub fn render(&self, challenge_label: &str) -> String {
        let mut out = format!(
            "challenge: {challenge_label}\nbudget: {}\nsolved: {}\ndistinct: {}\n",
            self.budget,
            self.solved(),
            self.distinct.len()
        );
        for (i, m) in self.distinct.iter().enumerate() {
            let _ = writeln!(out, "--- mechanic {} (min_taps={})", i + 1, m.min_taps);
            out.push_str(&m.text);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("search budget must be at least 1")]
    ZeroBudget,
}

/// Generates and evaluates `budget` candidates with seeds `config.seed`,
/// `config.seed + 1`, ...
pub fn search_mechanics(
    sig: &Signature,
    registry: &Registry,
    challenge: &Challenge,
    config: &GenerationConfig,
    budget: usize,
) -> Result<SearchReport, SearchError> {
    if budget == 0 {
        return Err(SearchError::ZeroBudget);
    }
    let started = Instant::now();
    let mut candidates = Vec::with_capacity(budget);
    let mut distinct: Vec<FoundMechanic> = Vec::new();
    let mut seen_text = HashSet::new();

    for i in 0..budget as u64 {
        let seed = config.seed.wrapping_add(i);
        let candidate_config = GenerationConfig {
            seed,
            ..config.clone()
        };
        let generated = Generator::new(registry, &candidate_config).and_then(|mut g| g.generate_block(sig));
        let outcome = match generated {
            Err(e) => CandidateOutcome {
                seed,
                text: None,
                result: EvalResult::rejected(Rejection::Generation(e)),
            },
            Ok(block) => {
                let text = pretty(&block);
                let result = evaluate_candidate(&block, sig, registry, challenge);
                if let Some(min_taps) = result.min_taps() {
                    if seen_text.insert(text.clone()) {
                        distinct.push(FoundMechanic {
                            seed,
                            text: text.clone(),
                            min_taps,
                        });
                    }
                }
                CandidateOutcome {
                    seed,
                    text: Some(text),
                    result,
                }
            }
        };
        candidates.push(outcome);
    }

    Ok(SearchReport {
        budget,
        candidates,
        distinct,
        wall_time: started.elapsed(),
    })
}
