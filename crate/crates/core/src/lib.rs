//! Synthesis, checking, execution and evaluation of small imperative code
//! blocks used as replacement game mechanics.
//!
//! The pieces fit together as follows: a [`registry::Registry`] describes which
//! fields and methods generated code may touch; [`synthesis`] samples
//! well-typed blocks over it; [`runtime`] runs blocks as delegates bound into
//! hook slots; [`game`] is a small tile puzzle exposing one such hook; and
//! [`evaluate`] decides whether a mechanic makes a challenge level solvable.

pub mod evaluate;
pub mod game;
pub mod lang;
pub mod registry;
pub mod runtime;
pub mod scope;
pub mod synthesis;
pub mod types;

pub use registry::{Registry, RegistryBuilder};
pub use scope::Scope;
pub use types::{TypeId, Value};
