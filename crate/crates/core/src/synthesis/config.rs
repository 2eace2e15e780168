use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StatementKind {
    VarDecl,
    Assign,
    ExprStmt,
    IfElse,
}

impl StatementKind {
    pub const ALL: [StatementKind; 4] = [
        StatementKind::VarDecl,
        StatementKind::Assign,
        StatementKind::ExprStmt,
        StatementKind::IfElse,
    ];

    fn name(self) -> &'static str {
        match self {
            StatementKind::VarDecl => "VarDecl",
            StatementKind::Assign => "Assign",
            StatementKind::ExprStmt => "ExprStmt",
            StatementKind::IfElse => "IfElse",
        }
    }
}

impl fmt::Display for StatementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StatementKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StatementKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ConfigError::BadValue {
                key: "statement_kinds".into(),
                value: s.into(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given twice")]
    DuplicateKey(String),
    #[error("bad value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("invalid configuration: {0}")]
    Invalid(&'static str),
}

/// Knobs of the block sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationConfig {
    pub seed: u64,
    pub min_lines: usize,
    pub max_lines: usize,
    /// Expressions at this depth or deeper are grounded.
    pub max_recursion_depth: usize,
    /// Weight of the single literal option against weight 1 for every other producer.
    pub literal_weight: f64,
    pub int_literal_min: i64,
    pub int_literal_max: i64,
    pub else_probability: f64,
    pub max_retries_per_line: usize,
    pub statement_kinds: Vec<StatementKind>,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            seed: 0,
            min_lines: 1,
            max_lines: 4,
            max_recursion_depth: 2,
            literal_weight: 1.0,
            int_literal_min: -100,
            int_literal_max: 100,
            else_probability: 0.5,
            max_retries_per_line: 8,
            statement_kinds: StatementKind::ALL.to_vec(),
        }
    }
}

const KEYS: [&str; 10] = [
    "seed",
    "min_lines",
    "max_lines",
    "max_recursion_depth",
    "literal_weight",
    "int_literal_min",
    "int_literal_max",
    "else_probability",
    "max_retries_per_line",
    "statement_kinds",
];

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.into(),
        value: value.into(),
    })
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.min_lines < 1 || self.min_lines > self.max_lines {
            return Err(ConfigError::Invalid("need 1 <= min_lines <= max_lines"));
        }
        if self.int_literal_min > self.int_literal_max {
            return Err(ConfigError::Invalid("int_literal_min exceeds int_literal_max"));
        }
        if !(self.literal_weight.is_finite() && self.literal_weight >= 0.0) {
            return Err(ConfigError::Invalid("literal_weight must be a non-negative number"));
        }
        if !(0.0..=1.0).contains(&self.else_probability) {
            return Err(ConfigError::Invalid("else_probability must lie in [0, 1]"));
        }
        if self.max_retries_per_line < 1 {
            return Err(ConfigError::Invalid("max_retries_per_line must be at least 1"));
        }
        if self.statement_kinds.is_empty() {
            return Err(ConfigError::Invalid("statement_kinds must not be empty"));
        }
        Ok(())
    }

    /// Reads `key = value` lines. Blank lines and `#` comments are skipped;
    /// keys not given keep their defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = GenerationConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let (key, value) = (key.trim(), value.trim());
            let Some(&known) = KEYS.iter().find(|k| **k == key) else {
                return Err(ConfigError::UnknownKey(key.into()));
            };
            if seen.contains(&known) {
                return Err(ConfigError::DuplicateKey(key.into()));
            }
            seen.push(known);
            match known {
                "seed" => config.seed = parse_value(key, value)?,
                "min_lines" => config.min_lines = parse_value(key, value)?,
                "max_lines" => config.max_lines = parse_value(key, value)?,
                "max_recursion_depth" => config.max_recursion_depth = parse_value(key, value)?,
                "literal_weight" => config.literal_weight = parse_value(key, value)?,
                "int_literal_min" => config.int_literal_min = parse_value(key, value)?,
                "int_literal_max" => config.int_literal_max = parse_value(key, value)?,
                "else_probability" => config.else_probability = parse_value(key, value)?,
                "max_retries_per_line" => config.max_retries_per_line = parse_value(key, value)?,
                "statement_kinds" => {
                    let mut kinds = Vec::new();
                    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                        let kind: StatementKind = part.parse()?;
                        if !kinds.contains(&kind) {
                            kinds.push(kind);
                        }
                    }
                    config.statement_kinds = kinds;
                }
                _ => unreachable!("key list and match arms agree"),
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn render(&self) -> String {
        let kinds: Vec<String> = self.statement_kinds.iter().map(ToString::to_string).collect();
        format!(
            "seed = {}\nmin_lines = {}\nmax_lines = {}\nmax_recursion_depth = {}\nliteral_weight = {}\n\
             int_literal_min = {}\nint_literal_max = {}\nelse_probability = {}\nmax_retries_per_line = {}\n\
             statement_kinds = {}\n",
            self.seed,
            self.min_lines,
            self.max_lines,
            self.max_recursion_depth,
            self.literal_weight,
            self.int_literal_min,
            self.int_literal_max,
            self.else_probability,
            self.max_retries_per_line,
            kinds.join(", ")
        )
    }
}
