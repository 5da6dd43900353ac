//! Mustache queries over answer set programming interpretations.

pub mod asp;
pub mod emit;
pub mod eval;
pub mod json;
pub mod recipe;
pub mod solver;
pub mod template;
