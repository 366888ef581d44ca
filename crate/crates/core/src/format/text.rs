//! Line-oriented grammar text format.
//!
//! ```text
//! % comment
//! %start s
//! s(S) -> np(NP) vp(VP) { [[S],(l,NP),(r,VP)], [[NP],(n,X)], [[VP],(n,X)] }.
//! v(V) -> [read] { [[V],(lex,read),(n,sg)] }.
//! ```
//!
//! Uppercase-initial identifiers are variables; everything else in term
//! position is a constant. Constants and labels that would not lex as a
//! lowercase identifier are written in single quotes.

use std::fmt::Write as _;

use super::FormatError;
use crate::chart::{Chart, Derivation, EdgeId};
use crate::grammar::{validate_reference_grammar, Grammar, GrammarKind, Nonterminal, Provenance, Rule, RuleId, Symbol, Terminal};
use crate::term::{Constant, Constraint, ConstraintSet, Label, Term, Var};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '@' || c == '*'
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn location(&self, at: usize) -> (usize, usize) {
        let before = &self.src[..at];
        let line = before.matches('\n').count() + 1;
        let col = before.rfind('\n').map(|i| before[i + 1..].chars().count()).unwrap_or(before.chars().count()) + 1;
        (line, col)
    }

    fn error_at(&self, at: usize, message: impl Into<String>) -> FormatError {
        let (line, col) = self.location(at);
        FormatError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> FormatError {
        self.error_at(self.pos, message)
    }

    fn at_line_start(&self) -> bool {
        self.src[..self.pos]
            .rsplit('\n')
            .next()
            .map(|l| l.trim().is_empty())
            .unwrap_or(true)
    }

    fn rest_of_line(&mut self) -> &'a str {
        let rest = self.rest();
        let end = rest.find('\n').unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    /// Skips whitespace and `%` comments.
    fn skip(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    self.rest_of_line();
                }
                _ => break,
            }
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), FormatError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`{}", s, self.found())))
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            None => ", found end of input".to_string(),
            Some(_) => {
                let token: String = self
                    .rest()
                    .chars()
                    .take_while(|c| !c.is_whitespace())
                    .take(16)
                    .collect();
                format!(", found `{}`", token)
            }
        }
    }

    /// Identifier: letters, digits, `_`, `@`, `*`, and `-` when followed by a
    /// digit (so `np@0-1` lexes but `a->` does not swallow the arrow).
    fn ident(&mut self) -> Option<(usize, &'a str)> {
        self.skip();
        let start = self.pos;
        let rest = self.rest();
        let mut end = 0;
        let mut chars = rest.char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            let ok = is_ident_char(c)
                || (c == '-' && end > 0 && chars.peek().map(|&(_, d)| d.is_ascii_digit()).unwrap_or(false));
            if !ok {
                break;
            }
            end = i + c.len_utf8();
        }
        if end == 0 {
            return None;
        }
        self.pos += end;
        Some((start, &rest[..end]))
    }

    fn quoted(&mut self) -> Result<Option<&'a str>, FormatError> {
        self.skip();
        if self.peek() != Some('\'') {
            return Ok(None);
        }
        let start = self.pos;
        self.bump();
        let rest = self.rest();
        match rest.find('\'') {
            Some(end) => {
                self.pos += end + 1;
                Ok(Some(&rest[..end]))
            }
            None => Err(self.error_at(start, "unterminated quote")),
        }
    }
}

fn is_variable_name(s: &str) -> bool {
    s.chars().next().map(|c| c.is_uppercase()).unwrap_or(false)
}

fn parse_var(cur: &mut Cursor) -> Result<Var, FormatError> {
    match cur.ident() {
        Some((_, name)) if is_variable_name(name) => Ok(Var::parse(name)),
        Some((at, name)) => Err(cur.error_at(at, format!("expected a variable, found `{}`", name))),
        None => Err(cur.error(format!("expected a variable{}", cur.found()))),
    }
}

/// A name, quoted or not. Returns (offset, text, was_quoted).
fn parse_symbol_name<'a>(cur: &mut Cursor<'a>) -> Result<(usize, &'a str, bool), FormatError> {
    cur.skip();
    let at = cur.pos;
    match cur.quoted()? {
        Some(q) => Ok((at, q, true)),
        None => cur
            .ident()
            .map(|(at, name)| (at, name, false))
            .ok_or_else(|| cur.error(format!("expected a name{}", cur.found()))),
    }
}

fn parse_term(cur: &mut Cursor) -> Result<Term, FormatError> {
    if let Some(q) = cur.quoted()? {
        return Ok(Term::Const(Constant::new(q)));
    }
    match cur.ident() {
        Some((_, name)) if is_variable_name(name) => Ok(Term::Var(Var::parse(name))),
        Some((_, name)) => Ok(Term::Const(Constant::new(name))),
        None => Err(cur.error(format!("expected a term{}", cur.found()))),
    }
}

fn parse_label(cur: &mut Cursor) -> Result<Label, FormatError> {
    let (at, name, quoted) = parse_symbol_name(cur)?;
    if !quoted && is_variable_name(name) {
        return Err(cur.error_at(at, format!("labels must not be capitalized: `{}`", name)));
    }
    Ok(Label::new(name))
}

fn parse_constraint(cur: &mut Cursor) -> Result<Constraint, FormatError> {
    cur.expect("[")?;
    cur.expect("[")?;
    let mut ident = vec![parse_term(cur)?];
    while cur.eat(",") {
        ident.push(parse_term(cur)?);
    }
    cur.expect("]")?;
    let mut access = Vec::new();
    while cur.eat(",") {
        cur.expect("(")?;
        let label = parse_label(cur)?;
        cur.expect(",")?;
        let value = parse_term(cur)?;
        cur.expect(")")?;
        access.push((label, value));
    }
    cur.expect("]")?;
    Ok(Constraint::new(ident, access).expect("nonempty"))
}

fn parse_constraints_body(cur: &mut Cursor, close: Option<&str>) -> Result<ConstraintSet, FormatError> {
    cur.skip();
    if cur.rest().starts_with("TOP") {
        cur.pos += 3;
        return Ok(ConstraintSet::Top);
    }
    let mut list = Vec::new();
    let at_end = |cur: &mut Cursor| {
        cur.skip();
        match close {
            Some(c) => cur.rest().starts_with(c),
            None => cur.rest().is_empty(),
        }
    };
    if at_end(cur) {
        return Ok(ConstraintSet::Set(list));
    }
    list.push(parse_constraint(cur)?);
    while cur.eat(",") {
        list.push(parse_constraint(cur)?);
    }
    Ok(ConstraintSet::Set(list))
}

/// Parses a bare constraint list such as `[[A],(l,B)], [[B,sg]]` or `TOP`.
pub fn parse_constraint_set(text: &str) -> Result<ConstraintSet, FormatError> {
    let mut cur = Cursor::new(text);
    let cs = parse_constraints_body(&mut cur, None)?;
    cur.skip();
    if !cur.rest().is_empty() {
        return Err(cur.error(format!("unexpected input{}", cur.found())));
    }
    Ok(cs)
}

fn parse_rule_at(cur: &mut Cursor, id: u32) -> Result<Rule, FormatError> {
    let (at, lhs, quoted) = parse_symbol_name(cur)?;
    if !quoted && is_variable_name(lhs) {
        return Err(cur.error_at(at, format!("nonterminal names must not be capitalized: `{}`", lhs)));
    }
    cur.expect("(")?;
    let lhs_var = parse_var(cur)?;
    cur.expect(")")?;
    if !cur.eat("->") && !cur.eat("→") {
        return Err(cur.error(format!("expected `->`{}", cur.found())));
    }
    let mut rhs = Vec::new();
    loop {
        cur.skip();
        match cur.peek() {
            Some('[') => {
                let start = cur.pos;
                cur.bump();
                let rest = cur.rest();
                let end = rest.find(|c| c == ']' || c == '\n').unwrap_or(rest.len());
                if !rest[end..].starts_with(']') {
                    return Err(cur.error_at(start, "unterminated terminal"));
                }
                let word = rest[..end].trim();
                if word.is_empty() {
                    return Err(cur.error_at(start, "empty terminal"));
                }
                rhs.push(Symbol::Terminal(Terminal::new(word)));
                cur.pos += end + 1;
            }
            Some('{') | Some('.') | None => break,
            Some(_) => {
                let (at, name, quoted) = parse_symbol_name(cur)?;
                if !quoted && is_variable_name(name) {
                    return Err(cur.error_at(at, format!("expected a nonterminal or `[terminal]`, found `{}`", name)));
                }
                if !cur.eat("(") {
                    return Err(cur.error_at(
                        at,
                        format!("`{}` is not a nonterminal call; terminals must be written `[{}]`", name, name),
                    ));
                }
                let arg = parse_var(cur)?;
                cur.expect(")")?;
                rhs.push(Symbol::Call {
                    name: Nonterminal::new(name),
                    arg,
                });
            }
        }
    }
    let constraints = if cur.eat("{") {
        let cs = parse_constraints_body(cur, Some("}"))?;
        cur.expect("}")?;
        cs
    } else {
        ConstraintSet::empty()
    };
    cur.expect(".")?;
    Ok(Rule {
        id: RuleId(id),
        lhs: Nonterminal::new(lhs),
        lhs_var,
        rhs,
        constraints,
        provenance: Provenance::Source,
    })
}

/// Parses one rule (terminated by `.`).
pub fn parse_rule(text: &str) -> Result<Rule, FormatError> {
    let mut cur = Cursor::new(text);
    let r = parse_rule_at(&mut cur, 0)?;
    cur.skip();
    if !cur.rest().is_empty() {
        return Err(cur.error(format!("unexpected input after rule{}", cur.found())));
    }
    Ok(r)
}

/// Parses a grammar file without validation.
pub fn parse_grammar_unchecked(text: &str) -> Result<Grammar, FormatError> {
    let mut cur = Cursor::new(text);
    let mut rules = Vec::new();
    let mut start: Option<Nonterminal> = None;
    let mut kind = GrammarKind::Reference;
    loop {
        // directives are only recognized at the start of a line
        while let Some(c) = cur.peek() {
            if c.is_whitespace() {
                cur.bump();
            } else if c == '%' {
                let at = cur.pos;
                let line_start = cur.at_line_start();
                let line = cur.rest_of_line();
                let mut words = line[1..].split_whitespace();
                match (line_start, words.next()) {
                    (true, Some("start")) => match words.next() {
                        Some(name) => start = Some(Nonterminal::new(name)),
                        None => return Err(cur.error_at(at, "`%start` needs a nonterminal")),
                    },
                    (true, Some("kind")) => {
                        let name = words.next().unwrap_or("");
                        kind = GrammarKind::from_name(name)
                            .ok_or_else(|| cur.error_at(at, format!("unknown grammar kind `{}`", name)))?;
                    }
                    _ => {}
                }
            } else {
                break;
            }
        }
        if cur.peek().is_none() {
            break;
        }
        rules.push(parse_rule_at(&mut cur, rules.len() as u32)?);
    }
    // an empty derived grammar is written with an explicit start
    let start = match (start, rules.first()) {
        (Some(s), _) if kind != GrammarKind::Reference => s,
        (_, None) => return Err(FormatError::NoRules),
        (s, Some(first)) => s.unwrap_or_else(|| first.lhs.clone()),
    };
    Ok(Grammar { rules, start, kind })
}

/// Parses a grammar file. Reference grammars (the default kind) are
/// validated.
pub fn parse_grammar_file(text: &str) -> Result<Grammar, FormatError> {
    let g = parse_grammar_unchecked(text)?;
    if g.kind == GrammarKind::Reference {
        let violations = validate_reference_grammar(&g);
        if !violations.is_empty() {
            return Err(FormatError::Invalid(violations));
        }
    }
    Ok(g)
}

fn plain_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if (c.is_alphanumeric() && !c.is_uppercase()) || c == '_' => {}
        _ => return false,
    }
    let mut cur = Cursor::new(s);
    matches!(cur.ident(), Some((0, id)) if id.len() == s.len())
}

fn write_name(out: &mut String, s: &str) {
    if plain_name(s) {
        out.push_str(s);
    } else {
        let _ = write!(out, "'{}'", s);
    }
}

fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Var(v) => {
            let _ = write!(out, "{}", v);
        }
        Term::Const(c) => write_name(out, c.as_str()),
    }
}

/// Text form of a constraint set; `TOP` for `Top`.
pub fn constraint_set_to_text(cs: &ConstraintSet) -> String {
    let mut out = String::new();
    match cs {
        ConstraintSet::Top => out.push_str("TOP"),
        ConstraintSet::Set(list) => {
            for (i, c) in list.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str("[[");
                for (k, t) in c.ident().iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    write_term(&mut out, t);
                }
                out.push(']');
                for (l, t) in c.access_relations() {
                    out.push_str(",(");
                    write_name(&mut out, l.as_str());
                    out.push(',');
                    write_term(&mut out, t);
                    out.push(')');
                }
                out.push(']');
            }
        }
    }
    out
}

pub fn rule_to_text(r: &Rule) -> String {
    let mut out = String::new();
    write_name(&mut out, r.lhs.as_str());
    let _ = write!(out, "({}) ->", r.lhs_var);
    for s in &r.rhs {
        out.push(' ');
        match s {
            Symbol::Terminal(t) => {
                let _ = write!(out, "[{}]", t);
            }
            Symbol::Call { name, arg } => {
                write_name(&mut out, name.as_str());
                let _ = write!(out, "({})", arg);
            }
        }
    }
    let body = constraint_set_to_text(&r.constraints);
    if body.is_empty() {
        out.push_str(" { }.");
    } else {
        let _ = write!(out, " {{ {} }}.", body);
    }
    out
}

fn provenance_comment(r: &Rule) -> String {
    match &r.provenance {
        Provenance::Source => format!("{}", r.id),
        Provenance::Chart { rule, edge } => format!("{} from {} at {}", r.id, rule, edge),
        Provenance::Expansion { parent, definer } => format!("{} from {} expanding {}", r.id, parent, definer),
    }
}

/// Text form of a grammar; parses back to an alpha-equivalent grammar.
pub fn grammar_to_text(g: &Grammar) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "%kind {}", g.kind.name());
    let _ = writeln!(out, "%start {}", g.start);
    for r in &g.rules {
        let _ = writeln!(out, "{}  % {}", rule_to_text(r), provenance_comment(r));
    }
    out
}

/// One line per edge: `e1 v@1-2 = r2 [read] | r3 [read]`. Accepting edges
/// are marked with `*`.
pub fn chart_to_text(chart: &Chart) -> String {
    let accepting: Vec<EdgeId> = chart.accepting_edges();
    let mut out = String::new();
    for (i, e) in chart.edges().iter().enumerate() {
        let mark = if accepting.contains(&EdgeId(i)) { "*" } else { "" };
        let _ = write!(out, "e{}{} {} =", i, mark, e.composite_name());
        for (k, d) in e.derivations.iter().enumerate() {
            if k > 0 {
                out.push_str(" |");
            }
            match d {
                Derivation::Binary { rule, left, right } => {
                    let _ = write!(out, " {} e{} e{}", rule, left.0, right.0);
                }
                Derivation::Lexical { rule, terminal } => {
                    let _ = write!(out, " {} [{}]", rule, terminal);
                }
            }
        }
        out.push('\n');
    }
    out
}
