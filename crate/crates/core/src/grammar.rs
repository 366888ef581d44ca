//! Rules and grammars with a context-free backbone.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::term::{Constant, Constraint, ConstraintSet, Label, Term, Var, VarSupply};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Nonterminal(Arc<str>);

impl Nonterminal {
    pub fn new(name: &str) -> Self {
        Nonterminal(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Nonterminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Terminal(Arc<str>);

impl Terminal {
    pub fn new(name: &str) -> Self {
        Terminal(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Symbol {
    Terminal(Terminal),
    Call { name: Nonterminal, arg: Var },
}

impl Symbol {
    pub fn call(name: &str, arg: &str) -> Self {
        Symbol::Call {
            name: Nonterminal::new(name),
            arg: Var::new(arg),
        }
    }

    pub fn terminal(t: &str) -> Self {
        Symbol::Terminal(Terminal::new(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId(pub u32);

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

/// Where a rule came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Written by hand (reference grammar file).
    Source,
    /// Instance of a reference rule for one chart edge.
    Chart { rule: RuleId, edge: Nonterminal },
    /// Call site of `parent` partially evaluated with `definer`.
    Expansion { parent: RuleId, definer: RuleId },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub id: RuleId,
    pub lhs: Nonterminal,
    pub lhs_var: Var,
    pub rhs: Vec<Symbol>,
    pub constraints: ConstraintSet,
    pub provenance: Provenance,
}

impl Rule {
    pub fn new(id: u32, lhs: &str, lhs_var: &str, rhs: Vec<Symbol>, constraints: ConstraintSet) -> Self {
        Rule {
            id: RuleId(id),
            lhs: Nonterminal::new(lhs),
            lhs_var: Var::new(lhs_var),
            rhs,
            constraints,
            provenance: Provenance::Source,
        }
    }

    pub fn calls(&self) -> impl Iterator<Item = (&Nonterminal, &Var)> {
        self.rhs.iter().filter_map(|s| match s {
            Symbol::Call { name, arg } => Some((name, arg)),
            Symbol::Terminal(_) => None,
        })
    }

    pub fn terminals(&self) -> impl Iterator<Item = &Terminal> {
        self.rhs.iter().filter_map(|s| match s {
            Symbol::Terminal(t) => Some(t),
            Symbol::Call { .. } => None,
        })
    }

    /// Every variable of the rule, in first-occurrence order (lhs, rhs,
    /// then constraints).
    pub fn variables(&self) -> Vec<Var> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut push = |v: &Var| {
            if seen.insert(v.clone()) {
                out.push(v.clone());
            }
        };
        push(&self.lhs_var);
        for (_, arg) in self.calls() {
            push(arg);
        }
        for t in self.constraints.terms() {
            if let Term::Var(v) = t {
                push(v);
            }
        }
        out
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}) ->", self.lhs, self.lhs_var)?;
        for s in &self.rhs {
            match s {
                Symbol::Terminal(t) => write!(f, " [{}]", t)?,
                Symbol::Call { name, arg } => write!(f, " {}({})", name, arg)?,
            }
        }
        write!(f, " {{ {} }}", self.constraints)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GrammarKind {
    Reference,
    Specialization,
    InteractionFree,
}

impl GrammarKind {
    pub fn name(self) -> &'static str {
        match self {
            GrammarKind::Reference => "reference",
            GrammarKind::Specialization => "specialization",
            GrammarKind::InteractionFree => "interaction-free",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "reference" => Some(GrammarKind::Reference),
            "specialization" | "spec" => Some(GrammarKind::Specialization),
            "interaction-free" | "if" => Some(GrammarKind::InteractionFree),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grammar {
    pub rules: Vec<Rule>,
    pub start: Nonterminal,
    pub kind: GrammarKind,
}

impl Grammar {
    pub fn new(rules: Vec<Rule>, start: &str, kind: GrammarKind) -> Self {
        Grammar {
            rules,
            start: Nonterminal::new(start),
            kind,
        }
    }

    pub fn rule(&self, id: RuleId) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn rules_for<'a>(&'a self, name: &'a Nonterminal) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules.iter().filter(move |r| &r.lhs == name)
    }

    pub fn next_rule_id(&self) -> u32 {
        self.rules.iter().map(|r| r.id.0 + 1).max().unwrap_or(0)
    }

    /// A supply guaranteed not to clash with any variable already present.
    pub fn var_supply(&self) -> VarSupply {
        let max = self
            .rules
            .iter()
            .flat_map(|r| r.variables())
            .map(|v| v.counter())
            .max()
            .unwrap_or(0);
        VarSupply::starting_at(max + 1)
    }

    /// Nonterminal names in first-occurrence order (start symbol first).
    pub fn nonterminals(&self) -> Vec<Nonterminal> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut push = |n: &Nonterminal| {
            if seen.insert(n.clone()) {
                out.push(n.clone());
            }
        };
        push(&self.start);
        for r in &self.rules {
            push(&r.lhs);
            for (name, _) in r.calls() {
                push(name);
            }
        }
        out
    }
}

/// One problem found by [`validate_reference_grammar`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoRules,
    StartUndefined(Nonterminal),
    DuplicateRuleId(RuleId),
    EmptyProduction(RuleId),
    ChainProduction(RuleId),
    BadShape(RuleId),
    RepeatedVariable { rule: RuleId, var: Var },
    UndefinedNonterminal { rule: RuleId, name: Nonterminal },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoRules => f.write_str("no rules"),
            Violation::StartUndefined(n) => write!(f, "start symbol `{}` has no rule", n),
            Violation::DuplicateRuleId(id) => write!(f, "duplicate rule id {}", id),
            Violation::EmptyProduction(id) => write!(f, "rule {}: empty production", id),
            Violation::ChainProduction(id) => write!(f, "rule {}: chain production", id),
            Violation::BadShape(id) => {
                write!(f, "rule {}: rhs must be two nonterminals or one terminal", id)
            }
            Violation::RepeatedVariable { rule, var } => {
                write!(f, "rule {}: variable {} used for more than one of lhs/rhs calls", rule, var)
            }
            Violation::UndefinedNonterminal { rule, name } => {
                write!(f, "rule {}: nonterminal `{}` has no rule", rule, name)
            }
        }
    }
}

/// Checks that `g` is a binary/lexical reference grammar without chain or
/// empty productions and with distinct call variables in every rule.
pub fn validate_reference_grammar(g: &Grammar) -> Vec<Violation> {
    let mut out = Vec::new();
    if g.rules.is_empty() {
        out.push(Violation::NoRules);
        return out;
    }
    let defined: HashSet<&Nonterminal> = g.rules.iter().map(|r| &r.lhs).collect();
    if !defined.contains(&g.start) {
        out.push(Violation::StartUndefined(g.start.clone()));
    }
    let mut ids = HashSet::new();
    for r in &g.rules {
        if !ids.insert(r.id) {
            out.push(Violation::DuplicateRuleId(r.id));
        }
        let calls = r.calls().count();
        let terms = r.terminals().count();
        match (calls, terms) {
            (0, 0) => out.push(Violation::EmptyProduction(r.id)),
            (1, 0) => out.push(Violation::ChainProduction(r.id)),
            (2, 0) | (0, 1) => {}
            _ => out.push(Violation::BadShape(r.id)),
        }
        out.extend(call_variable_violations(r));
        for (name, _) in r.calls() {
            if !defined.contains(name) {
                out.push(Violation::UndefinedNonterminal {
                    rule: r.id,
                    name: name.clone(),
                });
            }
        }
    }
    out
}

fn call_variable_violations(r: &Rule) -> Vec<Violation> {
    let mut seen = HashSet::new();
    seen.insert(&r.lhs_var);
    let mut out = Vec::new();
    for (_, arg) in r.calls() {
        if !seen.insert(arg) {
            out.push(Violation::RepeatedVariable {
                rule: r.id,
                var: arg.clone(),
            });
        }
    }
    out
}

/// Returns a copy of `r` with every variable consistently replaced by a fresh
/// one from `supply`.
pub fn fresh_rename(r: &Rule, supply: &mut VarSupply) -> Rule {
    let map: HashMap<Var, Var> = r.variables().into_iter().map(|v| {
        let fresh = supply.fresh(&v);
        (v, fresh)
    }).collect();
    rename_rule(r, &map)
}

pub(crate) fn rename_rule(r: &Rule, map: &HashMap<Var, Var>) -> Rule {
    let sub = |v: &Var| map.get(v).cloned().unwrap_or_else(|| v.clone());
    Rule {
        id: r.id,
        lhs: r.lhs.clone(),
        lhs_var: sub(&r.lhs_var),
        rhs: r
            .rhs
            .iter()
            .map(|s| match s {
                Symbol::Terminal(t) => Symbol::Terminal(t.clone()),
                Symbol::Call { name, arg } => Symbol::Call {
                    name: name.clone(),
                    arg: sub(arg),
                },
            })
            .collect(),
        constraints: r.constraints.map_terms(|t| match t {
            Term::Var(v) => Term::Var(sub(v)),
            c => c.clone(),
        }),
        provenance: r.provenance.clone(),
    }
}

/// True iff `a` and `b` differ only by a consistent bijective renaming of
/// variables. Rule ids and provenance are ignored; order is significant.
pub fn alpha_equivalent(a: &Rule, b: &Rule) -> bool {
    struct Bijection {
        fwd: HashMap<Var, Var>,
        bwd: HashMap<Var, Var>,
    }
    impl Bijection {
        fn link(&mut self, x: &Var, y: &Var) -> bool {
            match (self.fwd.get(x), self.bwd.get(y)) {
                (None, None) => {
                    self.fwd.insert(x.clone(), y.clone());
                    self.bwd.insert(y.clone(), x.clone());
                    true
                }
                (Some(fy), Some(bx)) => fy == y && bx == x,
                _ => false,
            }
        }
        fn term(&mut self, x: &Term, y: &Term) -> bool {
            match (x, y) {
                (Term::Var(vx), Term::Var(vy)) => self.link(vx, vy),
                (Term::Const(cx), Term::Const(cy)) => cx == cy,
                _ => false,
            }
        }
    }
    let mut bij = Bijection {
        fwd: HashMap::new(),
        bwd: HashMap::new(),
    };
    if a.lhs != b.lhs || a.rhs.len() != b.rhs.len() || !bij.link(&a.lhs_var, &b.lhs_var) {
        return false;
    }
    for (sa, sb) in a.rhs.iter().zip(&b.rhs) {
        let ok = match (sa, sb) {
            (Symbol::Terminal(ta), Symbol::Terminal(tb)) => ta == tb,
            (Symbol::Call { name: na, arg: va }, Symbol::Call { name: nb, arg: vb }) => {
                na == nb && bij.link(va, vb)
            }
            _ => false,
        };
        if !ok {
            return false;
        }
    }
    match (&a.constraints, &b.constraints) {
        (ConstraintSet::Top, ConstraintSet::Top) => true,
        (ConstraintSet::Set(ca), ConstraintSet::Set(cb)) => {
            ca.len() == cb.len()
                && ca.iter().zip(cb).all(|(x, y)| {
                    x.ident().len() == y.ident().len()
                        && x.access_relations().len() == y.access_relations().len()
                        && x.ident().iter().zip(y.ident()).all(|(s, t)| bij.term(s, t))
                        && x
                            .access_relations()
                            .iter()
                            .zip(y.access_relations())
                            .all(|((l1, s), (l2, t))| l1 == l2 && bij.term(s, t))
                })
        }
        _ => false,
    }
}

/// Grammar-level alpha-equivalence: same start, kind and rules pairwise
/// alpha-equivalent in order.
pub fn grammars_alpha_equivalent(a: &Grammar, b: &Grammar) -> bool {
    a.start == b.start
        && a.kind == b.kind
        && a.rules.len() == b.rules.len()
        && a.rules.iter().zip(&b.rules).all(|(x, y)| alpha_equivalent(x, y))
}

/// A nonterminal cycle `n0 -> n1 -> ... -> n0` (the closing `n0` omitted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle(pub Vec<Nonterminal>);

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|n| n.as_str()).collect();
        write!(f, "{}", names.join(" -> "))?;
        if let Some(first) = self.0.first() {
            write!(f, " -> {}", first)?;
        }
        Ok(())
    }
}

/// Orders nonterminals so that every callee precedes its callers, or returns
/// a cycle of the call graph.
pub fn rule_dependency_order(g: &Grammar) -> Result<Vec<Nonterminal>, Cycle> {
    let names = g.nonterminals();
    let index: HashMap<&Nonterminal, usize> = names.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); names.len()];
    for r in &g.rules {
        let from = index[&r.lhs];
        for (name, _) in r.calls() {
            let to = index[name];
            if !succ[from].contains(&to) {
                succ[from].push(to);
            }
        }
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut mark = vec![Mark::New; names.len()];
    let mut order = Vec::with_capacity(names.len());
    for root in 0..names.len() {
        if mark[root] != Mark::New {
            continue;
        }
        // (node, next successor index)
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Active;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if let Some(&child) = succ[node].get(*next) {
                *next += 1;
                match mark[child] {
                    Mark::New => {
                        mark[child] = Mark::Active;
                        stack.push((child, 0));
                    }
                    Mark::Active => {
                        let pos = stack.iter().position(|&(n, _)| n == child).expect("on stack");
                        return Err(Cycle(stack[pos..].iter().map(|&(n, _)| names[n].clone()).collect()));
                    }
                    Mark::Done => {}
                }
            } else {
                mark[node] = Mark::Done;
                order.push(names[node].clone());
                stack.pop();
            }
        }
    }
    Ok(order)
}

/// Indices into `g.rules`: rules of lower nonterminals first, ties broken by
/// rule id.
pub fn rule_order(g: &Grammar) -> Result<Vec<usize>, Cycle> {
    let order = rule_dependency_order(g)?;
    let pos: HashMap<&Nonterminal, usize> = order.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut idx: Vec<usize> = (0..g.rules.len()).collect();
    idx.sort_by_key(|&i| (pos[&g.rules[i].lhs], g.rules[i].id));
    Ok(idx)
}

/// Number of CF derivation trees from the start symbol, ignoring
/// constraints. `None` on a cycle or overflow.
pub fn derivation_count(g: &Grammar) -> Option<u128> {
    let order = rule_dependency_order(g).ok()?;
    let mut count: HashMap<&Nonterminal, u128> = HashMap::new();
    for n in &order {
        let mut total: u128 = 0;
        for r in g.rules_for(n) {
            let mut product: u128 = 1;
            for (callee, _) in r.calls() {
                product = product.checked_mul(count.get(callee).copied().unwrap_or(0))?;
            }
            total = total.checked_add(product)?;
        }
        count.insert(n, total);
    }
    Some(count.get(&g.start).copied().unwrap_or(0))
}

/// The grammar that records derivations of the binary/lexical backbone of
/// `backbone`: `a(A) -> b(B) c(C) {[[A],(l,B),(r,C)]}` and
/// `a(A) -> [t] {[[A],(lex,t)]}`.
pub fn pure_derivation_grammar(backbone: &Grammar) -> Grammar {
    let left = Label::new("l");
    let right = Label::new("r");
    let lex = Label::new("lex");
    let rules = backbone
        .rules
        .iter()
        .map(|r| {
            let a = Var::new("A");
            let (rhs, constraint) = match r.rhs.as_slice() {
                [Symbol::Call { name: b, .. }, Symbol::Call { name: c, .. }] => (
                    vec![
                        Symbol::Call { name: b.clone(), arg: Var::new("B") },
                        Symbol::Call { name: c.clone(), arg: Var::new("C") },
                    ],
                    Constraint::new(
                        vec![Term::Var(a.clone())],
                        vec![(left.clone(), Term::var("B")), (right.clone(), Term::var("C"))],
                    )
                    .expect("nonempty"),
                ),
                _ => {
                    let words: Vec<&Terminal> = r.terminals().collect();
                    let word = words.first().map(|t| t.as_str()).unwrap_or("");
                    (
                        r.rhs.clone(),
                        Constraint::access(Term::Var(a.clone()), lex.clone(), Term::Const(Constant::new(word))),
                    )
                }
            };
            Rule {
                id: r.id,
                lhs: r.lhs.clone(),
                lhs_var: a,
                rhs,
                constraints: ConstraintSet::Set(vec![constraint]),
                provenance: r.provenance.clone(),
            }
        })
        .collect();
    Grammar {
        rules,
        start: backbone.start.clone(),
        kind: backbone.kind,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::john_read_here_grammar;

    fn access(a: &str, l: &str, b: &str) -> Constraint {
        Constraint::access(Term::var(a), Label::new(l), Term::var(b))
    }

    #[test]
    fn example_grammar_validates() {
        assert!(validate_reference_grammar(&john_read_here_grammar()).is_empty());
    }

    #[test]
    fn chain_production_reported() {
        let g = Grammar::new(
            vec![
                Rule::new(0, "a", "A", vec![Symbol::call("b", "B")], ConstraintSet::empty()),
                Rule::new(1, "b", "B", vec![Symbol::terminal("t")], ConstraintSet::empty()),
            ],
            "a",
            GrammarKind::Reference,
        );
        assert!(validate_reference_grammar(&g).contains(&Violation::ChainProduction(RuleId(0))));
    }

    #[test]
    fn reused_lhs_var_reported() {
        let g = Grammar::new(
            vec![
                Rule::new(0, "a", "A", vec![Symbol::call("b", "A"), Symbol::call("b", "C")], ConstraintSet::empty()),
                Rule::new(1, "b", "B", vec![Symbol::terminal("t")], ConstraintSet::empty()),
            ],
            "a",
            GrammarKind::Reference,
        );
        let report = validate_reference_grammar(&g);
        assert_eq!(
            report,
            vec![Violation::RepeatedVariable {
                rule: RuleId(0),
                var: Var::new("A")
            }]
        );
    }

    #[test]
    fn empty_and_undefined() {
        let g = Grammar::new(
            vec![
                Rule::new(0, "a", "A", vec![], ConstraintSet::empty()),
                Rule::new(1, "a", "A", vec![Symbol::call("b", "B"), Symbol::call("c", "C")], ConstraintSet::empty()),
            ],
            "s",
            GrammarKind::Reference,
        );
        let report = validate_reference_grammar(&g);
        assert!(report.contains(&Violation::StartUndefined(Nonterminal::new("s"))));
        assert!(report.contains(&Violation::EmptyProduction(RuleId(0))));
        assert_eq!(
            report.iter().filter(|v| matches!(v, Violation::UndefinedNonterminal { .. })).count(),
            2
        );
    }

    #[test]
    fn rename_simple() {
        let r = Rule::new(0, "a", "A", vec![Symbol::call("b", "B")], vec![access("A", "l", "B")].into());
        let mut supply = VarSupply::default();
        let renamed = fresh_rename(&r, &mut supply);
        assert_eq!(renamed.to_string(), "a(A_1) -> b(B_2) { [[A_1],(l,B_2)] }");
        assert!(alpha_equivalent(&r, &renamed));
        assert_eq!(r.lhs_var, Var::new("A"));
    }

    #[test]
    fn rename_disjoint_supplies_share_nothing() {
        let r = Rule::new(0, "a", "A", vec![Symbol::call("b", "B")], vec![access("A", "l", "D")].into());
        let x = fresh_rename(&r, &mut VarSupply::starting_at(1));
        let y = fresh_rename(&r, &mut VarSupply::starting_at(100));
        let vx: HashSet<Var> = x.variables().into_iter().collect();
        let vy: HashSet<Var> = y.variables().into_iter().collect();
        assert!(vx.is_disjoint(&vy));
    }

    #[test]
    fn rename_covers_local_variables() {
        let r = Rule::new(
            0,
            "a",
            "A",
            vec![Symbol::call("b", "B"), Symbol::call("c", "C")],
            vec![access("A", "l", "D"), access("D", "m", "B")].into(),
        );
        let before: HashSet<Var> = r.variables().into_iter().collect();
        let renamed = fresh_rename(&r, &mut VarSupply::default());
        let after: HashSet<Var> = renamed.variables().into_iter().collect();
        assert_eq!(before.len(), 4);
        assert_eq!(after.len(), 4);
        assert!(before.is_disjoint(&after));
        assert!(before.contains(&Var::new("D")));
    }

    #[test]
    fn alpha_equivalence_rejects_non_bijection() {
        let r1 = Rule::new(0, "a", "A", vec![Symbol::call("b", "B")], vec![access("A", "l", "B")].into());
        let r2 = Rule::new(0, "a", "A", vec![Symbol::call("b", "B")], vec![access("A", "l", "A")].into());
        assert!(!alpha_equivalent(&r1, &r2));
    }

    #[test]
    fn example_grammar_order() {
        let order = rule_dependency_order(&john_read_here_grammar()).unwrap();
        let pos = |n: &str| order.iter().position(|x| x.as_str() == n).unwrap();
        assert_eq!(order.len(), 5);
        for low in ["v", "np", "a"] {
            assert!(pos(low) < pos("vp"));
        }
        assert!(pos("vp") < pos("s"));
    }

    #[test]
    fn single_rule_order() {
        let g = Grammar::new(
            vec![Rule::new(0, "s", "S", vec![Symbol::terminal("x")], ConstraintSet::empty())],
            "s",
            GrammarKind::Reference,
        );
        assert_eq!(rule_dependency_order(&g).unwrap(), vec![Nonterminal::new("s")]);
    }

    #[test]
    fn self_loop_is_a_cycle() {
        // a@0-0 -> a@0-0 a@0-0 is what the intersection with a one-state
        // looping automaton produces.
        let g = Grammar::new(
            vec![
                Rule::new(0, "a", "A", vec![Symbol::call("a", "B"), Symbol::call("a", "C")], ConstraintSet::empty()),
                Rule::new(1, "a", "A", vec![Symbol::terminal("x")], ConstraintSet::empty()),
            ],
            "a",
            GrammarKind::Specialization,
        );
        assert_eq!(rule_dependency_order(&g), Err(Cycle(vec![Nonterminal::new("a")])));
    }

    #[test]
    fn pure_derivation_grammar_is_valid() {
        let g = pure_derivation_grammar(&john_read_here_grammar());
        assert!(validate_reference_grammar(&g).is_empty());
        assert_eq!(g.rules[0].to_string(), "s(A) -> np(B) vp(C) { [[A],(l,B),(r,C)] }");
        assert_eq!(g.rules[2].to_string(), "v(A) -> [read] { [[A],(lex,read)] }");
    }
}
