//! Small grammars used by tests, docs and the CLI smoke run.

use crate::format::parse_grammar_file;
use crate::grammar::Grammar;

/// Number agreement between subject and verb, with an adverb.
pub const JOHN_READ_HERE: &str = "\
s(S) -> np(NP) vp(VP) { [[S],(l,NP),(r,VP)], [[NP],(n,X)], [[VP],(n,X)] }.
vp(VP) -> v(V) a(A) { [[VP],(l,V),(r,A),(n,Y)], [[V],(n,Y)] }.
v(V) -> [read] { [[V],(lex,read),(n,sg)] }.
v(V) -> [read] { [[V],(lex,read),(n,pl)] }.
np(NP) -> [john] { [[NP],(lex,john),(n,sg)] }.
a(A) -> [here] { [[A],(lex,here)] }.
";

/// `x -> x x | [t]`
pub const BINARY_TREES: &str = "\
x(X) -> x(L) x(R) { [[X],(l,L),(r,R)] }.
x(X) -> [t] { [[X],(lex,t)] }.
";

pub fn john_read_here_grammar() -> Grammar {
    parse_grammar_file(JOHN_READ_HERE).expect("built-in grammar parses")
}

pub fn binary_trees_grammar() -> Grammar {
    parse_grammar_file(BINARY_TREES).expect("built-in grammar parses")
}
