//! Text and JSON formats for grammars, automata, charts and structures.

mod fsa;
mod json;
mod text;

use thiserror::Error;

use crate::chart::FsaError;
use crate::grammar::Violation;

pub use fsa::{fsa_to_text, parse_fsa_file};
pub use json::{chart_to_json, grammar_to_json, structure_to_json, structures_to_json};
pub use text::{
    chart_to_text,
    constraint_set_to_text, grammar_to_text, parse_constraint_set, parse_grammar_file, parse_grammar_unchecked,
    parse_rule, rule_to_text,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("no rules")]
    NoRules,
    #[error("invalid reference grammar:\n{}", .0.iter().map(|v| format!("  {}", v)).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
    #[error("{line}: {source}")]
    Fsa { line: usize, source: FsaError },
}
