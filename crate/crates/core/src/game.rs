//! A coloured-tile grid puzzle whose tap handler is a swappable hook.
//!
//! Tapping a cell dispatches the `onTileTapped` hook and then lets tiles fall.
//! The baseline handler destroys the tapped tile.

use std::fmt;

use thiserror::Error;

use crate::lang::Signature;
use crate::registry::{
    Builtin, EnumDef, FieldDescriptor, MethodDescriptor, Param, ParamConstraint, Registry, RegistryBuilder,
};
use crate::runtime::{Delegate, ExecBudget, HookTable, HostError, RuntimeError, World};
use crate::types::{TypeId, Value};

/// Name of the tap hook in the game's hook table.
pub const ON_TILE_TAPPED: &str = "onTileTapped";
/// Host key of the baseline tap behavior.
pub const BASELINE_TAP: &str = "OnTileTapped";
pub const COLOUR_ENUM: &str = "Colour";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Colour {
    R,
    G,
    B,
    Y,
}

impl Colour {
    pub const ALL: [Colour; 4] = [Colour::R, Colour::G, Colour::B, Colour::Y];

    pub fn letter(self) -> char {
        match self {
            Colour::R => 'R',
            Colour::G => 'G',
            Colour::B => 'B',
            Colour::Y => 'Y',
        }
    }

    pub fn from_letter(c: char) -> Option<Colour> {
        Colour::ALL.into_iter().find(|k| k.letter() == c)
    }

    pub fn to_value(self) -> Value {
        Value::enum_variant(COLOUR_ENUM, self.letter().to_string())
    }

    pub fn from_value(value: &Value) -> Option<Colour> {
        match value {
            Value::Enum { ty, variant } if ty == COLOUR_ENUM => {
                let mut chars = variant.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Colour::from_letter(c),
                    _ => None,
                }
            }
            _ => None,
        }
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoardError {
    #[error("board needs at least one row and one column")]
    Empty,
    #[error("row {row} has length {found}, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("row {row} has illegal cell `{found}`")]
    BadCell { row: usize, found: char },
}

/// Grid of optional tiles. `y = 0` is the bottom row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Board {
    width: usize,
    height: usize,
    cells: Vec<Option<Colour>>,
}

impl Board {
    pub fn empty(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1, "board dimensions must be positive");
        Board {
            width,
            height,
            cells: vec![None; width * height],
        }
    }

    /// Builds a board from rows listed top row first, using `R G B Y .`.
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self, BoardError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().chars().count());
        if height == 0 || width == 0 {
            return Err(BoardError::Empty);
        }
        let mut board = Board::empty(width, height);
        for (row, text) in rows.iter().enumerate() {
            let text = text.as_ref();
            let found = text.chars().count();
            if found != width {
                return Err(BoardError::RaggedRow {
                    row,
                    expected: width,
                    found,
                });
            }
            let y = height - 1 - row;
            for (x, c) in text.chars().enumerate() {
                let cell = match c {
                    '.' => None,
                    other => Some(Colour::from_letter(other).ok_or(BoardError::BadCell { row, found: other })?),
                };
                board.set(x, y, cell);
            }
        }
        Ok(board)
    }

    /// Rows top first, as accepted by [`Board::from_rows`].
    pub fn to_rows(&self) -> Vec<String> {
        (0..self.height)
            .rev()
            .map(|y| {
                (0..self.width)
                    .map(|x| self.get(x, y).map_or('.', Colour::letter))
                    .collect()
            })
            .collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn in_bounds(&self, x: i64, y: i64) -> bool {
        (0..self.width as i64).contains(&x) && (0..self.height as i64).contains(&y)
    }

    pub fn get(&self, x: usize, y: usize) -> Option<Colour> {
        self.cells[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, cell: Option<Colour>) {
        self.cells[y * self.width + x] = cell;
    }

    pub fn count(&self, colour: Colour) -> usize {
        self.cells.iter().filter(|c| **c == Some(colour)).count()
    }

    pub fn tile_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// Column `x`, bottom to top.
    pub fn column(&self, x: usize) -> Vec<Option<Colour>> {
        (0..self.height).map(|y| self.get(x, y)).collect()
    }

    /// No empty cell lies below an occupied one in any column.
    pub fn is_gravity_normal(&self) -> bool {
        (0..self.width).all(|x| {
            let col = self.column(x);
            col.windows(2).all(|w| !(w[0].is_none() && w[1].is_some()))
        })
    }

    /// Compacts every column downward, keeping vertical order.
    pub fn apply_gravity(&mut self) {
        for x in 0..self.width {
            let mut write = 0;
            for y in 0..self.height {
                if let Some(tile) = self.get(x, y) {
                    if write != y {
                        self.set(x, write, Some(tile));
                        self.set(x, y, None);
                    }
                    write += 1;
                }
            }
        }
    }

    pub fn with_gravity(mut self) -> Self {
        self.apply_gravity();
        self
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_rows() {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TapError {
    #[error("tap ({x}, {y}) is outside the board")]
    OutOfBounds { x: i64, y: i64 },
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    pub board: Board,
    pub taps_used: usize,
}

impl GameState {
    pub fn new(board: Board) -> Self {
        GameState { board, taps_used: 0 }
    }

    /// Runs the tap hook on `(x, y)`, then lets tiles fall.
    ///
    /// On a hook error the board is left as the hook left it and `taps_used`
    /// is not advanced.
    pub fn tap(&mut self, x: i64, y: i64, hooks: &HookTable, registry: &Registry) -> Result<(), TapError> {
        if !self.board.in_bounds(x, y) {
            return Err(TapError::OutOfBounds { x, y });
        }
        let mut budget = ExecBudget::default();
        hooks.dispatch(ON_TILE_TAPPED, &[Value::Int(x), Value::Int(y)], registry, self, &mut budget)?;
        self.board.apply_gravity();
        self.taps_used += 1;
        Ok(())
    }

    fn cell_arg(&self, args: &[Value], first: usize) -> Result<(usize, usize), HostError> {
        let (x, y) = match (args.get(first), args.get(first + 1)) {
            (Some(Value::Int(x)), Some(Value::Int(y))) => (*x, *y),
            _ => return Err(HostError("expected integer coordinates".into())),
        };
        if !self.board.in_bounds(x, y) {
            return Err(HostError(format!("({x}, {y}) is outside the board")));
        }
        Ok((x as usize, y as usize))
    }

    fn colour_arg(args: &[Value], index: usize) -> Result<Colour, HostError> {
        args.get(index)
            .and_then(Colour::from_value)
            .ok_or_else(|| HostError("expected a Colour".into()))
    }
}

/// The baseline tap handler: clears the cell. Destroying nothing is a no-op.
pub fn baseline_on_tile_tapped(state: &mut GameState, x: usize, y: usize) {
    state.board.set(x, y, None);
}

impl World for GameState {
    fn read_field(&self, name: &str) -> Result<Value, HostError> {
        match name {
            "Width" => Ok(Value::Int(self.board.width as i64)),
            "Height" => Ok(Value::Int(self.board.height as i64)),
            _ => Err(HostError(format!("no field `{name}`"))),
        }
    }

    fn write_field(&mut self, name: &str, _value: Value) -> Result<(), HostError> {
        Err(HostError(format!("field `{name}` is read-only")))
    }

    fn call_method(&mut self, name: &str, args: &[Value]) -> Result<Value, HostError> {
        match name {
            BASELINE_TAP => {
                let (x, y) = self.cell_arg(args, 0)?;
                baseline_on_tile_tapped(self, x, y);
                Ok(Value::Unit)
            }
            "DestroyTile" => {
                let (x, y) = self.cell_arg(args, 0)?;
                self.board.set(x, y, None);
                Ok(Value::Unit)
            }
            "SetTile" => {
                let (x, y) = self.cell_arg(args, 0)?;
                let colour = Self::colour_arg(args, 2)?;
                self.board.set(x, y, Some(colour));
                Ok(Value::Unit)
            }
            "SwapTiles" => {
                let (x1, y1) = self.cell_arg(args, 0)?;
                let (x2, y2) = self.cell_arg(args, 2)?;
                let a = self.board.get(x1, y1);
                let b = self.board.get(x2, y2);
                self.board.set(x1, y1, b);
                self.board.set(x2, y2, a);
                Ok(Value::Unit)
            }
            "CountColour" => {
                let colour = Self::colour_arg(args, 0)?;
                Ok(Value::Int(self.board.count(colour) as i64))
            }
            "IsOccupied" => {
                let (x, y) = self.cell_arg(args, 0)?;
                Ok(Value::Bool(self.board.get(x, y).is_some()))
            }
            _ => Err(HostError(format!("no method `{name}`"))),
        }
    }
}

pub fn on_tile_tapped_signature() -> Signature {
    Signature::new(
        ON_TILE_TAPPED,
        vec![Param::new("x", TypeId::Int), Param::new("y", TypeId::Int)],
        TypeId::Void,
    )
}

/// Hook table with `onTileTapped` bound to the baseline behavior.
pub fn hook_table() -> HookTable {
    let mut table = HookTable::new();
    table
        .declare(ON_TILE_TAPPED, Delegate::host(on_tile_tapped_signature(), BASELINE_TAP))
        .expect("fresh table");
    table
}

fn coord_method(name: &str, coords: &[(&str, &str)], extra: Vec<Param>, width: usize, height: usize) -> MethodDescriptor {
    let mut params = Vec::new();
    for (x, y) in coords {
        params.push(Param::new(*x, TypeId::Int));
        params.push(Param::new(*y, TypeId::Int));
    }
    params.extend(extra);
    let mut method = MethodDescriptor::new(name, params, TypeId::Void);
    for (x, y) in coords {
        method = method
            .with_constraint(ParamConstraint::min(*x, 0))
            .with_constraint(ParamConstraint::max(*x, width as i64 - 1))
            .with_constraint(ParamConstraint::min(*y, 0))
            .with_constraint(ParamConstraint::max(*y, height as i64 - 1));
    }
    method
}

/// The game's design space for a `width` x `height` board.
pub fn build_game_registry(width: usize, height: usize) -> Registry {
    let colour = || TypeId::enumeration(COLOUR_ENUM);
    let mut b = RegistryBuilder::new();
    let build = |b: &mut RegistryBuilder| -> Result<(), crate::registry::RegistryError> {
        b.register_enum(EnumDef::new(COLOUR_ENUM, ["R", "G", "B", "Y"]))?;
        b.register_field(FieldDescriptor::new("Width", TypeId::Int))?;
        b.register_field(FieldDescriptor::new("Height", TypeId::Int))?;
        b.register_method(coord_method("DestroyTile", &[("x", "y")], vec![], width, height))?;
        b.register_method(coord_method(
            "SetTile",
            &[("x", "y")],
            vec![Param::new("c", colour())],
            width,
            height,
        ))?;
        b.register_method(coord_method("SwapTiles", &[("x1", "y1"), ("x2", "y2")], vec![], width, height))?;
        b.register_method(MethodDescriptor::new("CountColour", vec![Param::new("c", colour())], TypeId::Int))?;
        let mut is_occupied = coord_method("IsOccupied", &[("x", "y")], vec![], width, height);
        is_occupied.return_type = TypeId::Bool;
        b.register_method(is_occupied)?;
        for builtin in [Builtin::Add, Builtin::Sub, Builtin::Less, Builtin::Equal, Builtin::DoNothing] {
            b.register_method(MethodDescriptor::builtin(builtin))?;
        }
        Ok(())
    };
    build(&mut b).expect("game registry is well formed");
    b.seal().expect("game registry validates")
}

/// The game registry with only the named fields and methods left usable.
pub fn build_scoped_game_registry(width: usize, height: usize, usable: &[&str]) -> Registry {
    let full = build_game_registry(width, height);
    let mut b = full.to_builder();
    let names: Vec<String> = full
        .fields()
        .map(|f| f.name.clone())
        .chain(full.methods().map(|m| m.name.clone()))
        .collect();
    for name in names {
        b.set_usable(&name, usable.contains(&name.as_str()))
            .expect("name comes from the registry");
    }
    b.seal().expect("scoping keeps the registry valid")
}
