//! Chart parsing for unification grammars, with a transformation to
//! interaction-free form so that solutions enumerate without backtracking.
//!
//! ```
//! use ifgram::{chart, enumerate, examples, transform};
//!
//! let g = examples::john_read_here_grammar();
//! let fsa = chart::string_to_fsa(&["john", "read", "here"]);
//! let spec = chart::specialize(&g, &fsa).unwrap();
//! let (ifg, _) = transform::to_interaction_free(&spec).unwrap();
//! let all: Vec<_> = enumerate::enumerate_solutions(&ifg).unwrap().collect::<Result<_, _>>().unwrap();
//! assert_eq!(all.len(), 1);
//! ```

pub mod chart;
pub mod cli;
pub mod enumerate;
pub mod examples;
pub mod format;
pub mod grammar;
pub mod standardize;
pub mod term;
pub mod transform;

pub use chart::{build_backbone_chart, specialize, string_to_fsa, Chart, InputFsa};
pub use enumerate::{enumerate_solutions, iso_equal, oracle_enumerate, FeatureStructure};
pub use grammar::{Grammar, GrammarKind, Rule};
pub use standardize::standardize;
pub use term::{Constraint, ConstraintSet, Term, Var};
pub use transform::to_interaction_free;
