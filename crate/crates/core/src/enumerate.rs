//! Feature-structure solutions of acyclic grammars.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::grammar::{fresh_rename, rule_dependency_order, Cycle, Grammar, Nonterminal, Rule, RuleId};
use crate::standardize::{is_interaction_free, is_standardized, standardize, Store};
use crate::transform::prune_unproductive;
use crate::term::{Constant, Constraint, ConstraintSet, Label, Term, Var, VarSupply};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Atom(Constant),
    /// Outgoing edges in insertion order.
    Complex(Vec<(Label, usize)>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("node {0} has two edges labeled {1}")]
    NotFunctional(usize, Label),
    #[error("edge from node {0} points to missing node {1}")]
    DanglingEdge(usize, usize),
    #[error("node {0} is not reachable from the root")]
    Unreachable(usize),
    #[error("root {0} does not exist")]
    BadRoot(usize),
}

/// A rooted graph with labeled edges, functional per label, atoms at leaves.
/// Cycles and shared nodes are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureStructure {
    nodes: Vec<Node>,
    root: usize,
}

impl FeatureStructure {
    pub fn new(nodes: Vec<Node>, root: usize) -> Result<Self, StructureError> {
        let fs = FeatureStructure { nodes, root };
        fs.check()?;
        Ok(fs)
    }

    fn check(&self) -> Result<(), StructureError> {
        if self.root >= self.nodes.len() {
            return Err(StructureError::BadRoot(self.root));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if let Node::Complex(edges) = n {
                for (k, (l, t)) in edges.iter().enumerate() {
                    if *t >= self.nodes.len() {
                        return Err(StructureError::DanglingEdge(i, *t));
                    }
                    if edges[..k].iter().any(|(l2, _)| l2 == l) {
                        return Err(StructureError::NotFunctional(i, l.clone()));
                    }
                }
            }
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(n) = stack.pop() {
            for &(_, t) in self.edges(n) {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(i) => Err(StructureError::Unreachable(i)),
            None => Ok(()),
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edges(&self, node: usize) -> &[(Label, usize)] {
        match &self.nodes[node] {
            Node::Complex(e) => e,
            Node::Atom(_) => &[],
        }
    }

    pub fn atom(&self, node: usize) -> Option<&Constant> {
        match &self.nodes[node] {
            Node::Atom(c) => Some(c),
            Node::Complex(_) => None,
        }
    }

    /// Follows a path of labels from the root.
    pub fn follow(&self, path: &[&str]) -> Option<usize> {
        let mut at = self.root;
        for step in path {
            at = self.edges(at).iter().find(|(l, _)| l.as_str() == *step)?.1;
        }
        Some(at)
    }

    /// `#0{l:#1{lex:john n:sg} ...}`. Complex nodes are tagged in order of
    /// first appearance; later visits print the bare tag. Atoms print as
    /// their value.
    pub fn render(&self) -> String {
        self.render_with(false)
    }

    /// Rendering with edges sorted by label. Two structures are isomorphic
    /// iff their canonical renderings are equal.
    pub fn canonical(&self) -> String {
        self.render_with(true)
    }

    fn render_with(&self, sorted: bool) -> String {
        fn go(fs: &FeatureStructure, n: usize, sorted: bool, tags: &mut HashMap<usize, usize>, out: &mut String) {
            match &fs.nodes[n] {
                Node::Atom(c) => out.push_str(c.as_str()),
                Node::Complex(edges) => {
                    if let Some(t) = tags.get(&n) {
                        let _ = write!(out, "#{}", t);
                        return;
                    }
                    let tag = tags.len();
                    tags.insert(n, tag);
                    let _ = write!(out, "#{}{{", tag);
                    let mut edges: Vec<&(Label, usize)> = edges.iter().collect();
                    if sorted {
                        edges.sort_by(|a, b| a.0.cmp(&b.0));
                    }
                    for (i, (l, t)) in edges.into_iter().enumerate() {
                        if i > 0 {
                            out.push(' ');
                        }
                        let _ = write!(out, "{}:", l);
                        go(fs, *t, sorted, tags, out);
                    }
                    out.push('}');
                }
            }
        }
        let mut out = String::new();
        go(self, self.root, sorted, &mut HashMap::new(), &mut out);
        out
    }
}

/// Root-, label- and atom-preserving bijection between the two node sets,
/// found by synchronized traversal.
pub fn iso_equal(a: &FeatureStructure, b: &FeatureStructure) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut fwd: Vec<Option<usize>> = vec![None; a.len()];
    let mut bwd: Vec<Option<usize>> = vec![None; b.len()];
    let mut stack = vec![(a.root, b.root)];
    while let Some((x, y)) = stack.pop() {
        match (fwd[x], bwd[y]) {
            (Some(fy), Some(bx)) if fy == y && bx == x => continue,
            (None, None) => {
                fwd[x] = Some(y);
                bwd[y] = Some(x);
            }
            _ => return false,
        }
        match (&a.nodes[x], &b.nodes[y]) {
            (Node::Atom(p), Node::Atom(q)) => {
                if p != q {
                    return false;
                }
            }
            (Node::Complex(ex), Node::Complex(ey)) => {
                if ex.len() != ey.len() {
                    return false;
                }
                for (l, tx) in ex {
                    match ey.iter().find(|(m, _)| m == l) {
                        Some(&(_, ty)) => stack.push((*tx, ty)),
                        None => return false,
                    }
                }
            }
            _ => return false,
        }
    }
    true
}

/// Multiset equality under [`iso_equal`].
pub fn multiset_equal(a: &[FeatureStructure], b: &[FeatureStructure]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        match (0..b.len()).find(|&j| !used[j] && iso_equal(x, &b[j])) {
            Some(j) => {
                used[j] = true;
                true
            }
            None => false,
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("constraint set is unsatisfiable")]
    Top,
    #[error("constraint set is not standardized")]
    NotStandardized,
    #[error("rule {0} is not interaction-free")]
    NotInteractionFree(RuleId),
    #[error("grammar is cyclic: {0}")]
    Cyclic(Cycle),
    /// Only raised for grammars that passed IF certification.
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum ClassKey {
    Constraint(usize),
    Bare(Term),
}

/// The most general structure satisfying a standardized set, rooted at
/// `root`. Node ids follow depth-first discovery order.
pub fn structure_of(cs: &ConstraintSet, root: &Var) -> Result<FeatureStructure, EnumError> {
    let list = match cs {
        ConstraintSet::Top => return Err(EnumError::Top),
        ConstraintSet::Set(list) => list,
    };
    if !is_standardized(cs) {
        return Err(EnumError::NotStandardized);
    }
    let mut home: HashMap<&Term, usize> = HashMap::new();
    for (i, c) in list.iter().enumerate() {
        for t in c.ident() {
            home.insert(t, i);
        }
    }
    let key_of = |t: &Term| match home.get(t) {
        Some(&i) => ClassKey::Constraint(i),
        None => ClassKey::Bare(t.clone()),
    };
    let children = |k: &ClassKey| -> Vec<(Label, ClassKey)> {
        match k {
            ClassKey::Constraint(i) => list[*i]
                .access_relations()
                .iter()
                .map(|(l, t)| (l.clone(), key_of(t)))
                .collect(),
            ClassKey::Bare(_) => Vec::new(),
        }
    };

    // preorder numbering
    let mut ids: HashMap<ClassKey, usize> = HashMap::new();
    let mut order: Vec<ClassKey> = Vec::new();
    let mut stack = vec![key_of(&Term::Var(root.clone()))];
    while let Some(k) = stack.pop() {
        if ids.contains_key(&k) {
            continue;
        }
        ids.insert(k.clone(), order.len());
        order.push(k.clone());
        for (_, child) in children(&k).into_iter().rev() {
            if !ids.contains_key(&child) {
                stack.push(child);
            }
        }
    }
    let nodes = order
        .iter()
        .map(|k| {
            let constant = match k {
                ClassKey::Constraint(i) => list[*i].ident().iter().find_map(|t| match t {
                    Term::Const(c) => Some(c.clone()),
                    Term::Var(_) => None,
                }),
                ClassKey::Bare(Term::Const(c)) => Some(c.clone()),
                ClassKey::Bare(Term::Var(_)) => None,
            };
            match constant {
                Some(c) => Node::Atom(c),
                None => Node::Complex(children(k).into_iter().map(|(l, c)| (l, ids[&c])).collect()),
            }
        })
        .collect();
    FeatureStructure::new(nodes, 0).map_err(|e| EnumError::InvariantViolation(e.to_string()))
}

fn rules_by_lhs(g: &Grammar) -> HashMap<Nonterminal, Vec<Rule>> {
    let mut map: HashMap<Nonterminal, Vec<Rule>> = HashMap::new();
    for r in &g.rules {
        map.entry(r.lhs.clone()).or_default().push(r.clone());
    }
    map
}

#[derive(Clone)]
struct Partial {
    store: Store,
    // pending calls, next one last
    agenda: Vec<(Nonterminal, Var)>,
}

/// Lazy, backtrack-free top-down enumeration over an IF grammar.
///
/// Constraints are merged into a union-find store as rules are applied. Any
/// clash or dead end is counted in [`Solutions::failures`] and surfaced as an
/// [`EnumError::InvariantViolation`] item.
pub struct Solutions {
    rules: HashMap<Nonterminal, Vec<Rule>>,
    supply: VarSupply,
    root: Var,
    stack: Vec<(Partial, usize)>,
    failures: usize,
}

impl Solutions {
    pub fn failures(&self) -> usize {
        self.failures
    }

    fn fail(&mut self, what: String) -> Option<Result<FeatureStructure, EnumError>> {
        self.failures += 1;
        Some(Err(EnumError::InvariantViolation(what)))
    }
}

impl Iterator for Solutions {
    type Item = Result<FeatureStructure, EnumError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let (partial, alt) = self.stack.last_mut()?;
            let Some((name, var)) = partial.agenda.last().cloned() else {
                let (mut done, _) = self.stack.pop().expect("nonempty");
                let cs = ConstraintSet::Set(done.store.export());
                return Some(structure_of(&cs, &self.root));
            };
            let alternatives = self.rules.get(&name).map(|v| v.len()).unwrap_or(0);
            if alternatives == 0 {
                self.stack.pop();
                return self.fail(format!("nonterminal {} has no rules", name));
            }
            let rule = &self.rules[&name][*alt];
            *alt += 1;
            let mut child = if *alt == alternatives {
                self.stack.pop().expect("nonempty").0
            } else {
                partial.clone()
            };
            let copy = fresh_rename(rule, &mut self.supply);
            child.agenda.pop();
            for (n, v) in copy.calls().collect::<Vec<_>>().into_iter().rev() {
                child.agenda.push((n.clone(), v.clone()));
            }
            let applied = match &copy.constraints {
                ConstraintSet::Top => Err(crate::standardize::Clash),
                ConstraintSet::Set(list) => child
                    .store
                    .unify(&Term::Var(var.clone()), &Term::Var(copy.lhs_var.clone()))
                    .and_then(|()| child.store.add_all(list)),
            };
            if applied.is_err() {
                return self.fail(format!("unification failed applying rule {}", copy.id));
            }
            self.stack.push((child, 0));
        }
    }
}

/// Starts enumerating the solutions of an IF-certified acyclic grammar.
pub fn enumerate_solutions(g: &Grammar) -> Result<Solutions, EnumError> {
    rule_dependency_order(g).map_err(EnumError::Cyclic)?;
    for r in &g.rules {
        match is_interaction_free(r) {
            Ok(true) => {}
            _ => return Err(EnumError::NotInteractionFree(r.id)),
        }
    }
    // dead ends are the only source of failure left once every rule is IF
    let (live, _) = prune_unproductive(g);
    let rules = rules_by_lhs(&live);
    let mut supply = g.var_supply();
    let root = supply.fresh(&Var::new("ROOT"));
    let mut store = Store::new();
    store.unify(&Term::Var(root.clone()), &Term::Var(root.clone())).expect("trivial");
    Ok(Solutions {
        stack: if rules.contains_key(&g.start) {
            vec![(
                Partial {
                    store,
                    agenda: vec![(g.start.clone(), root.clone())],
                },
                0,
            )]
        } else {
            Vec::new()
        },
        rules,
        supply,
        root,
        failures: 0,
    })
}

/// Exhaustive enumeration for any acyclic grammar: every derivation's
/// constraints are collected, then standardized; unsatisfiable derivations
/// are discarded. Multiplicities are kept.
pub fn oracle_enumerate(g: &Grammar) -> Result<Vec<FeatureStructure>, EnumError> {
    rule_dependency_order(g).map_err(EnumError::Cyclic)?;
    let rules = rules_by_lhs(g);
    let mut supply = g.var_supply();
    let root = supply.fresh(&Var::new("ROOT"));

    fn derive(
        rules: &HashMap<Nonterminal, Vec<Rule>>,
        name: &Nonterminal,
        arg: &Var,
        supply: &mut VarSupply,
    ) -> Vec<Vec<Constraint>> {
        let mut out = Vec::new();
        for rule in rules.get(name).into_iter().flatten() {
            if rule.constraints.is_top() {
                continue;
            }
            let copy = fresh_rename(rule, supply);
            let mut base = vec![Constraint::identify(
                Term::Var(arg.clone()),
                Term::Var(copy.lhs_var.clone()),
            )];
            base.extend(copy.constraints.constraints().iter().cloned());
            let mut partials = vec![base];
            for (callee, v) in copy.calls() {
                let subs = derive(rules, callee, v, supply);
                let mut next = Vec::with_capacity(partials.len() * subs.len());
                for p in &partials {
                    for s in &subs {
                        let mut joined = p.clone();
                        joined.extend(s.iter().cloned());
                        next.push(joined);
                    }
                }
                partials = next;
            }
            out.extend(partials);
        }
        out
    }

    let mut solutions = Vec::new();
    for collected in derive(&rules, &g.start, &root, &mut supply) {
        let std = standardize(&ConstraintSet::Set(collected));
        if !std.is_top() {
            solutions.push(structure_of(&std, &root)?);
        }
    }
    Ok(solutions)
}
