//! Automaton text format, one declaration per line (or `;`-separated):
//!
//! ```text
//! state q0 q1 q2 q3
//! start q0
//! final q3
//! arc q0 john q1
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use super::FormatError;
use crate::chart::{FsaError, InputFsa, Transition};
use crate::grammar::Terminal;

fn syntax(line: usize, col: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        col,
        message: message.into(),
    }
}

pub fn parse_fsa_file(text: &str) -> Result<InputFsa, FormatError> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut start: Option<usize> = None;
    let mut finals = BTreeSet::new();
    let mut transitions = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('%').next().unwrap_or("");
        let mut offset = 0;
        for decl in content.split(';') {
            let col = offset + decl.len() - decl.trim_start().len() + 1;
            offset += decl.len() + 1;
            let words: Vec<&str> = decl.split_whitespace().collect();
            let Some((&keyword, args)) = words.split_first() else {
                continue;
            };
            let lookup = |name: &str| {
                index
                    .get(name)
                    .copied()
                    .ok_or_else(|| syntax(line, col, format!("undeclared state `{}`", name)))
            };
            match keyword {
                "state" => {
                    if args.is_empty() {
                        return Err(syntax(line, col, "`state` needs at least one name"));
                    }
                    for &name in args {
                        if !index.contains_key(name) {
                            index.insert(name.to_string(), names.len());
                            names.push(name.to_string());
                        }
                    }
                }
                "start" => {
                    let [name] = args else {
                        return Err(syntax(line, col, "`start` needs exactly one state"));
                    };
                    if start.is_some() {
                        return Err(syntax(line, col, "duplicate `start`"));
                    }
                    start = Some(lookup(name)?);
                }
                "final" => {
                    if args.is_empty() {
                        return Err(syntax(line, col, "`final` needs at least one state"));
                    }
                    for &name in args {
                        finals.insert(lookup(name)?);
                    }
                }
                "arc" => {
                    let [from, label, to] = args else {
                        return Err(syntax(line, col, "`arc` needs: from label to"));
                    };
                    transitions.push(Transition {
                        from: lookup(from)?,
                        label: Terminal::new(label),
                        to: lookup(to)?,
                    });
                }
                other => return Err(syntax(line, col, format!("unknown declaration `{}`", other))),
            }
        }
    }
    let last_line = text.lines().count().max(1);
    let start = start.ok_or_else(|| syntax(last_line, 1, "missing `start` declaration"))?;
    if finals.is_empty() {
        return Err(FormatError::Fsa {
            line: last_line,
            source: FsaError::NoFinal,
        });
    }
    InputFsa::new(names, transitions, start, finals).map_err(|source| FormatError::Fsa { line: last_line, source })
}

pub fn fsa_to_text(fsa: &InputFsa) -> String {
    let mut out = String::new();
    let names: Vec<&str> = (0..fsa.num_states()).map(|q| fsa.state_name(q)).collect();
    let _ = writeln!(out, "state {}", names.join(" "));
    let _ = writeln!(out, "start {}", names[fsa.start()]);
    let finals: Vec<&str> = fsa.finals().iter().map(|&f| names[f]).collect();
    let _ = writeln!(out, "final {}", finals.join(" "));
    for t in fsa.transitions() {
        let _ = writeln!(out, "arc {} {} {}", names[t.from], t.label, names[t.to]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::string_to_fsa;

    #[test]
    fn linear_lattice_matches_string() {
        let fsa = parse_fsa_file(
            "state 0 1 2 3\nstart 0\nfinal 3\narc 0 john 1\narc 1 read 2\narc 2 here 3\n",
        )
        .unwrap();
        assert_eq!(fsa, string_to_fsa(&["john", "read", "here"]));
        assert_eq!(parse_fsa_file(&fsa_to_text(&fsa)).unwrap(), fsa);
    }

    #[test]
    fn parallel_arcs() {
        let fsa = parse_fsa_file(
            "state q0 q1 q2 ; start q0 ; final q2\narc q0 john q1 ; arc q0 they q1\narc q1 sleep q2 % tail\n",
        )
        .unwrap();
        assert_eq!(fsa.accepting_path_count(), Some(2));
    }

    #[test]
    fn errors() {
        match parse_fsa_file("state q0\nstart q0\nfinal q0\narc q0 x q9\n") {
            Err(FormatError::Syntax { line, message, .. }) => {
                assert_eq!(line, 4);
                assert!(message.contains("q9"));
            }
            other => panic!("{:?}", other),
        }
        assert!(matches!(parse_fsa_file("state q0\nfinal q0\n"), Err(FormatError::Syntax { .. })));
        assert!(matches!(parse_fsa_file("state q0\nstart q0\n"), Err(FormatError::Fsa { .. })));
        assert!(parse_fsa_file("state q0\nstart q0\nfinal q0\nedge q0 q0\n").is_err());
    }
}
