//! The ASP fragment: terms, programs, parsing, and interpretations.

mod ast;
mod interpretation;
mod lexer;
mod parser;
mod safety;
mod symbol;

pub use ast::{
    Aggregate, AggregateElement, AggregateFunction, Atom, BinaryOp, Choice, ChoiceElement, CmpOp,
    Head, Literal, LiteralKind, Program, Rule, RuleKind, Term, WeakTuple,
};
pub use interpretation::{parse_facts, GroundAtom, Interpretation, BASE64_PREDICATE};
pub use parser::{parse_program, parse_symbol, term_to_symbol, SHOW_PREDICATE};
pub use symbol::{compare_terms, format_decimal, parse_decimal, quote_string, render_term, Symbol};

pub(crate) use safety::assignment_variable;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Lexical { line: usize, column: usize, message: String },
    #[error("{line}:{column}: syntax error, expected {} but found {found}", .expected.join(" or "))]
    Syntax { line: usize, column: usize, expected: Vec<String>, found: String },
    #[error("{line}:{column}: {construct} is not supported")]
    Unsupported { line: usize, column: usize, construct: String },
    #[error("{line}:{column}: `real(\"{text}\")` does not hold a decimal number")]
    InvalidReal { line: usize, column: usize, text: String },
    #[error("line {line}: unsafe variable `{variable}` in rule `{rule}`")]
    Unsafe { variable: String, rule: String, line: usize },
    #[error("line {line}: `{rule}` is not a ground fact")]
    NotAFact { line: usize, rule: String },
}

impl ParseError {
    /// Line the error refers to.
    pub fn line(&self) -> usize {
        match self {
            ParseError::Lexical { line, .. }
            | ParseError::Syntax { line, .. }
            | ParseError::Unsupported { line, .. }
            | ParseError::InvalidReal { line, .. }
            | ParseError::Unsafe { line, .. }
            | ParseError::NotAFact { line, .. } => *line,
        }
    }
}
