//! Backbone charts over acyclic word lattices and the specialization grammar
//! read off them.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::grammar::{
    fresh_rename, rule_dependency_order, validate_reference_grammar, Cycle, Grammar, GrammarKind, Nonterminal,
    Provenance, Rule, RuleId, Symbol, Terminal, Violation,
};
use crate::term::{ConstraintSet, VarSupply};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub label: Terminal,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FsaError {
    #[error("transition {index} references undeclared state {state}")]
    UndeclaredState { index: usize, state: usize },
    #[error("start state {0} is not declared")]
    BadStart(usize),
    #[error("automaton has no final state")]
    NoFinal,
    #[error("final state {0} is not declared")]
    BadFinal(usize),
}

/// A finite automaton whose paths spell the admissible token sequences.
/// States are dense indices `0..num_states`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputFsa {
    state_names: Vec<String>,
    transitions: Vec<Transition>,
    start: usize,
    finals: BTreeSet<usize>,
}

impl InputFsa {
    pub fn new(
        state_names: Vec<String>,
        transitions: Vec<Transition>,
        start: usize,
        finals: BTreeSet<usize>,
    ) -> Result<Self, FsaError> {
        let n = state_names.len();
        if start >= n {
            return Err(FsaError::BadStart(start));
        }
        if finals.is_empty() {
            return Err(FsaError::NoFinal);
        }
        if let Some(&f) = finals.iter().find(|&&f| f >= n) {
            return Err(FsaError::BadFinal(f));
        }
        for (index, t) in transitions.iter().enumerate() {
            for state in [t.from, t.to] {
                if state >= n {
                    return Err(FsaError::UndeclaredState { index, state });
                }
            }
        }
        let mut unique: Vec<Transition> = Vec::with_capacity(transitions.len());
        for t in transitions {
            if !unique.contains(&t) {
                unique.push(t);
            }
        }
        Ok(InputFsa {
            state_names,
            transitions: unique,
            start,
            finals,
        })
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.state_names[q]
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn finals(&self) -> &BTreeSet<usize> {
        &self.finals
    }

    /// States in topological order, or `None` if the transition graph has a
    /// cycle.
    pub fn topological_states(&self) -> Option<Vec<usize>> {
        let n = self.num_states();
        let mut indegree = vec![0usize; n];
        for t in &self.transitions {
            indegree[t.to] += 1;
        }
        let mut ready: VecDeque<usize> = (0..n).filter(|&q| indegree[q] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(q) = ready.pop_front() {
            order.push(q);
            for t in self.transitions.iter().filter(|t| t.from == q) {
                indegree[t.to] -= 1;
                if indegree[t.to] == 0 {
                    ready.push_back(t.to);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_states().is_some()
    }

    /// Number of start-to-final paths; `None` for cyclic automata.
    pub fn accepting_path_count(&self) -> Option<u128> {
        let order = self.topological_states()?;
        let mut paths = vec![0u128; self.num_states()];
        paths[self.start] = 1;
        for q in order {
            for t in self.transitions.iter().filter(|t| t.from == q) {
                paths[t.to] += paths[q];
            }
        }
        Some(self.finals.iter().map(|&f| paths[f]).sum())
    }
}

/// The linear automaton `0 -t1-> 1 -t2-> ... -> n`.
pub fn string_to_fsa<S: AsRef<str>>(tokens: &[S]) -> InputFsa {
    let n = tokens.len();
    InputFsa {
        state_names: (0..=n).map(|q| q.to_string()).collect(),
        transitions: tokens
            .iter()
            .enumerate()
            .map(|(i, t)| Transition {
                from: i,
                label: Terminal::new(t.as_ref()),
                to: i + 1,
            })
            .collect(),
        start: 0,
        finals: BTreeSet::from([n]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    Binary { rule: RuleId, left: EdgeId, right: EdgeId },
    Lexical { rule: RuleId, terminal: Terminal },
}

/// `name` covers some path from state `from` to state `to`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: Nonterminal,
    pub from: usize,
    pub to: usize,
    pub derivations: Vec<Derivation>,
}

impl Edge {
    pub fn composite_name(&self) -> Nonterminal {
        composite_name(&self.name, self.from, self.to)
    }
}

/// `name@from-to`
pub fn composite_name(name: &Nonterminal, from: usize, to: usize) -> Nonterminal {
    Nonterminal::new(&format!("{}@{}-{}", name, from, to))
}

#[derive(Debug, Clone)]
pub struct Chart {
    edges: Vec<Edge>,
    index: HashMap<(Nonterminal, usize, usize), EdgeId>,
    start_symbol: Nonterminal,
    start_state: usize,
    finals: BTreeSet<usize>,
}

impl Chart {
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn find(&self, name: &str, from: usize, to: usize) -> Option<&Edge> {
        self.index
            .get(&(Nonterminal::new(name), from, to))
            .map(|&id| &self.edges[id.0])
    }

    /// Edges `(start symbol, fsa start, f)` for final states `f`.
    pub fn accepting_edges(&self) -> Vec<EdgeId> {
        self.finals
            .iter()
            .filter_map(|&f| self.index.get(&(self.start_symbol.clone(), self.start_state, f)).copied())
            .collect()
    }

    pub fn recognizes(&self) -> bool {
        !self.accepting_edges().is_empty()
    }

    pub fn derivation_records(&self) -> usize {
        self.edges.iter().map(|e| e.derivations.len()).sum()
    }

    fn daughters(&self, id: EdgeId) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges[id.0].derivations.iter().flat_map(|d| match d {
            Derivation::Binary { left, right, .. } => vec![*left, *right],
            Derivation::Lexical { .. } => vec![],
        })
    }

    /// Edges reachable from the accepting edges, in creation order.
    pub fn useful_edges(&self) -> Vec<EdgeId> {
        let mut seen = vec![false; self.edges.len()];
        let mut stack = self.accepting_edges();
        for e in &stack {
            seen[e.0] = true;
        }
        while let Some(e) = stack.pop() {
            for d in self.daughters(e) {
                if !seen[d.0] {
                    seen[d.0] = true;
                    stack.push(d);
                }
            }
        }
        (0..self.edges.len()).filter(|&i| seen[i]).map(EdgeId).collect()
    }

    /// Number of backbone parse trees rooted at accepting edges; `None` if a
    /// useful edge participates in a cycle.
    pub fn tree_count(&self) -> Option<u128> {
        if check_chart_acyclic(self).is_err() {
            return None;
        }
        let mut memo: HashMap<EdgeId, u128> = HashMap::new();
        fn count(chart: &Chart, e: EdgeId, memo: &mut HashMap<EdgeId, u128>) -> u128 {
            if let Some(&c) = memo.get(&e) {
                return c;
            }
            let total = chart.edges[e.0]
                .derivations
                .iter()
                .map(|d| match d {
                    Derivation::Lexical { .. } => 1,
                    Derivation::Binary { left, right, .. } => count(chart, *left, memo) * count(chart, *right, memo),
                })
                .sum();
            memo.insert(e, total);
            total
        }
        Some(self.accepting_edges().into_iter().map(|e| count(self, e, &mut memo)).sum())
    }
}

/// Bottom-up dynamic programming over automaton states for a binary/lexical
/// backbone. Constraints are ignored. Terminates on cyclic automata too.
pub fn build_backbone_chart(g: &Grammar, fsa: &InputFsa) -> Chart {
    let mut lexical: HashMap<&Terminal, Vec<&Rule>> = HashMap::new();
    let mut by_left: HashMap<&Nonterminal, Vec<(&Rule, &Nonterminal)>> = HashMap::new();
    let mut by_right: HashMap<&Nonterminal, Vec<(&Rule, &Nonterminal)>> = HashMap::new();
    for r in &g.rules {
        match r.rhs.as_slice() {
            [Symbol::Terminal(t)] => lexical.entry(t).or_default().push(r),
            [Symbol::Call { name: b, .. }, Symbol::Call { name: c, .. }] => {
                by_left.entry(b).or_default().push((r, c));
                by_right.entry(c).or_default().push((r, b));
            }
            _ => {}
        }
    }

    let n = fsa.num_states();
    let mut chart = Chart {
        edges: Vec::new(),
        index: HashMap::new(),
        start_symbol: g.start.clone(),
        start_state: fsa.start(),
        finals: fsa.finals().clone(),
    };
    let mut agenda: VecDeque<EdgeId> = VecDeque::new();
    let add = |chart: &mut Chart, agenda: &mut VecDeque<EdgeId>, name: &Nonterminal, from, to, d| {
        let key = (name.clone(), from, to);
        match chart.index.get(&key) {
            Some(&id) => chart.edges[id.0].derivations.push(d),
            None => {
                let id = EdgeId(chart.edges.len());
                chart.edges.push(Edge {
                    name: name.clone(),
                    from,
                    to,
                    derivations: vec![d],
                });
                chart.index.insert(key, id);
                agenda.push_back(id);
            }
        }
    };

    for t in fsa.transitions() {
        for r in lexical.get(&t.label).into_iter().flatten() {
            add(
                &mut chart,
                &mut agenda,
                &r.lhs,
                t.from,
                t.to,
                Derivation::Lexical {
                    rule: r.id,
                    terminal: t.label.clone(),
                },
            );
        }
    }

    let mut starting: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    let mut ending: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    while let Some(e) = agenda.pop_front() {
        let (name, from, to) = {
            let edge = &chart.edges[e.0];
            (edge.name.clone(), edge.from, edge.to)
        };
        starting[from].push(e);
        ending[to].push(e);
        let mut found: Vec<(&Rule, usize, usize, EdgeId, EdgeId)> = Vec::new();
        // e as left daughter; partners may include e itself
        for &(r, right) in by_left.get(&name).into_iter().flatten() {
            for &p in &starting[to] {
                let pe = &chart.edges[p.0];
                if &pe.name == right {
                    found.push((r, from, pe.to, e, p));
                }
            }
        }
        // e as right daughter; e itself was handled above
        for &(r, left) in by_right.get(&name).into_iter().flatten() {
            for &p in &ending[from] {
                let pe = &chart.edges[p.0];
                if p != e && &pe.name == left {
                    found.push((r, pe.from, to, p, e));
                }
            }
        }
        for (r, a, b, left, right) in found {
            let d = Derivation::Binary { rule: r.id, left, right };
            add(&mut chart, &mut agenda, &r.lhs, a, b, d);
        }
    }
    chart
}

/// Checks the chart for an edge that derives itself.
pub fn check_chart_acyclic(chart: &Chart) -> Result<(), Cycle> {
    let rules = (0..chart.edges.len())
        .map(EdgeId)
        .map(|e| {
            let edge = chart.edge(e);
            let calls: Vec<Symbol> = chart
                .daughters(e)
                .map(|d| Symbol::Call {
                    name: chart.edge(d).composite_name(),
                    arg: crate::term::Var::new("X"),
                })
                .collect();
            Rule::new(0, edge.composite_name().as_str(), "X", calls, ConstraintSet::empty())
        })
        .collect();
    let g = Grammar {
        rules,
        start: Nonterminal::new(""),
        kind: GrammarKind::Specialization,
    };
    check_grammar_acyclic(&g)
}

/// Checks the nonterminal call graph of `g` for cycles.
pub fn check_grammar_acyclic(g: &Grammar) -> Result<(), Cycle> {
    rule_dependency_order(g).map(|_| ())
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecializeError {
    #[error("grammar is not a valid reference grammar: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("no parse")]
    NoParse,
    /// The specialization is returned for inspection but must not be
    /// transformed.
    #[error("cyclic specialization: {cycle}")]
    Cyclic { grammar: Box<Grammar>, cycle: Cycle },
}

/// Name of the synthetic start symbol used when several edges accept.
pub fn root_name(start: &Nonterminal) -> Nonterminal {
    Nonterminal::new(&format!("{}@root", start))
}

/// Builds the chart and reads it off as a unification grammar: one rule per
/// useful (edge, derivation) pair, each a fresh copy of its reference rule.
pub fn specialize(g: &Grammar, fsa: &InputFsa) -> Result<Grammar, SpecializeError> {
    let violations = validate_reference_grammar(g);
    if !violations.is_empty() {
        return Err(SpecializeError::Invalid(violations));
    }
    let chart = build_backbone_chart(g, fsa);
    specialize_chart(g, &chart)
}

/// [`specialize`] for an already built chart.
pub fn specialize_chart(g: &Grammar, chart: &Chart) -> Result<Grammar, SpecializeError> {
    let accepting = chart.accepting_edges();
    if accepting.is_empty() {
        return Err(SpecializeError::NoParse);
    }
    let mut supply = g.var_supply();
    let sources: HashMap<RuleId, &Rule> = g.rules.iter().map(|r| (r.id, r)).collect();
    let mut rules = Vec::new();
    let mut next_id = 0u32;
    let mut emit = |lhs: Nonterminal, edge: &Edge, d: &Derivation, supply: &mut VarSupply, rules: &mut Vec<Rule>| {
        let (rule_id, daughters) = match d {
            Derivation::Binary { rule, left, right } => (*rule, vec![*left, *right]),
            Derivation::Lexical { rule, .. } => (*rule, vec![]),
        };
        let fresh = fresh_rename(sources[&rule_id], supply);
        let mut calls = daughters.into_iter();
        let rhs = fresh
            .rhs
            .iter()
            .map(|s| match s {
                Symbol::Call { arg, .. } => Symbol::Call {
                    name: chart.edge(calls.next().expect("binary derivation")).composite_name(),
                    arg: arg.clone(),
                },
                t => t.clone(),
            })
            .collect();
        rules.push(Rule {
            id: RuleId(next_id),
            lhs,
            lhs_var: fresh.lhs_var,
            rhs,
            constraints: fresh.constraints,
            provenance: Provenance::Chart {
                rule: rule_id,
                edge: edge.composite_name(),
            },
        });
        next_id += 1;
    };

    let start = if accepting.len() == 1 {
        chart.edge(accepting[0]).composite_name()
    } else {
        let root = root_name(&g.start);
        for &e in &accepting {
            let edge = chart.edge(e);
            for d in &edge.derivations {
                emit(root.clone(), edge, d, &mut supply, &mut rules);
            }
        }
        root
    };
    for e in chart.useful_edges() {
        let edge = chart.edge(e);
        for d in &edge.derivations {
            emit(edge.composite_name(), edge, d, &mut supply, &mut rules);
        }
    }
    let grammar = Grammar {
        rules,
        start,
        kind: GrammarKind::Specialization,
    };
    match check_grammar_acyclic(&grammar) {
        Ok(()) => Ok(grammar),
        Err(cycle) => Err(SpecializeError::Cyclic {
            grammar: Box::new(grammar),
            cycle,
        }),
    }
}
