//! Need-driven partial evaluation of an acyclic grammar into
//! interaction-free form.
//!
//! The loop repeatedly picks a non-IF rule all of whose lower rules are IF,
//! in-lines the leftmost call whose variable sits in an identification set,
//! standardizes the copies and drops those that reduce to `Top`. Calls whose
//! variable never enters an identification set are left alone.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::grammar::{
    fresh_rename, rule_dependency_order, rule_order, Cycle, Grammar, GrammarKind, Nonterminal, Provenance, Rule,
    RuleId, Symbol,
};
use crate::standardize::{is_interaction_free, standardize, trigger_positions, NotStandardized};
use crate::term::{Constraint, ConstraintSet, Term, VarSupply};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("expected a specialization grammar, got a {} grammar (specialize first)", .0.name())]
    WrongKind(GrammarKind),
    #[error("grammar is cyclic: {0}")]
    Cyclic(Cycle),
    #[error(transparent)]
    NotStandardized(#[from] NotStandardized),
    #[error("no rule {0}")]
    UnknownRule(RuleId),
    #[error("rule {rule}: position {position} is not a nonterminal call")]
    NotACall { rule: RuleId, position: usize },
    #[error("rule {rule}: call at position {position} does not interact")]
    NotTriggering { rule: RuleId, position: usize },
}

/// Result of in-lining one call site.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialEvaluation {
    /// Standardized, satisfiable copies of the rule.
    pub rules: Vec<Rule>,
    /// Copies (before standardization) whose constraints reduced to `Top`.
    pub eliminated: Vec<Rule>,
    /// Number of rules defining the in-lined nonterminal.
    pub definers: usize,
}

/// A non-IF rule all of whose strictly lower rules are IF, first in
/// [`rule_order`]; `None` when the grammar is IF.
pub fn select_lowest_non_if(g: &Grammar) -> Result<Option<RuleId>, TransformError> {
    let order = rule_order(g).map_err(TransformError::Cyclic)?;
    for i in order {
        let r = &g.rules[i];
        if !is_interaction_free(r)? {
            return Ok(Some(r.id));
        }
    }
    Ok(None)
}

/// In-lines the call at `position` of rule `id` with every rule defining the
/// called nonterminal.
///
/// Each definer is freshly renamed, its rhs spliced in place of the call, and
/// its constraints prepended, together with `[[B,B']]` linking the call
/// variable to the definer's lhs variable. Copies are then standardized.
pub fn partial_evaluate(
    g: &Grammar,
    id: RuleId,
    position: usize,
    supply: &mut VarSupply,
) -> Result<PartialEvaluation, TransformError> {
    let rule = g.rule(id).ok_or(TransformError::UnknownRule(id))?;
    let (name, arg) = match rule.rhs.get(position) {
        Some(Symbol::Call { name, arg }) => (name, arg),
        _ => return Err(TransformError::NotACall { rule: id, position }),
    };
    if !trigger_positions(rule).contains(&position) {
        return Err(TransformError::NotTriggering { rule: id, position });
    }

    let mut next_id = g.next_rule_id();
    let mut out = PartialEvaluation {
        rules: Vec::new(),
        eliminated: Vec::new(),
        definers: 0,
    };
    for definer in g.rules_for(name) {
        out.definers += 1;
        let copy = fresh_rename(definer, supply);
        let mut rhs = Vec::with_capacity(rule.rhs.len() + copy.rhs.len() - 1);
        rhs.extend_from_slice(&rule.rhs[..position]);
        rhs.extend(copy.rhs.iter().cloned());
        rhs.extend_from_slice(&rule.rhs[position + 1..]);
        let bridge = ConstraintSet::Set(vec![Constraint::identify(
            Term::Var(arg.clone()),
            Term::Var(copy.lhs_var.clone()),
        )]);
        let constraints = copy.constraints.concat(&rule.constraints).concat(&bridge);
        let candidate = Rule {
            id: RuleId(next_id),
            lhs: rule.lhs.clone(),
            lhs_var: rule.lhs_var.clone(),
            rhs,
            constraints,
            provenance: Provenance::Expansion {
                parent: rule.id,
                definer: definer.id,
            },
        };
        next_id += 1;
        let standardized = standardize(&candidate.constraints);
        if standardized.is_top() {
            out.eliminated.push(candidate);
        } else {
            out.rules.push(Rule {
                constraints: standardized,
                ..candidate
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TransformStats {
    /// Rules of the input (after standardization).
    pub input_rules: usize,
    /// Input rules whose constraints were already unsatisfiable.
    pub input_top: usize,
    /// Partial evaluation steps.
    pub expansions: usize,
    /// Satisfiable copies produced.
    pub created: usize,
    /// Copies dropped because they reduced to `Top`.
    pub eliminated: usize,
    /// Steps that found no rule for the in-lined nonterminal.
    pub unproductive: usize,
    /// Rules removed at the end because they call a nonterminal with no rules.
    pub pruned: usize,
    pub output_rules: usize,
}

/// One step of the transformation.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub rule: Rule,
    pub position: usize,
    pub result: PartialEvaluation,
}

/// The transformation as an explicit loop, for callers that want to watch
/// individual steps.
#[derive(Debug, Clone)]
pub struct Transformer {
    grammar: Grammar,
    supply: VarSupply,
    stats: TransformStats,
}

impl Transformer {
    /// Checks preconditions and standardizes every rule; rules that reduce to
    /// `Top` are dropped.
    pub fn new(g: &Grammar) -> Result<Self, TransformError> {
        if g.kind == GrammarKind::Reference {
            return Err(TransformError::WrongKind(g.kind));
        }
        rule_dependency_order(g).map_err(TransformError::Cyclic)?;
        let mut stats = TransformStats::default();
        let mut rules = Vec::with_capacity(g.rules.len());
        for r in &g.rules {
            let constraints = standardize(&r.constraints);
            if constraints.is_top() {
                stats.input_top += 1;
            } else {
                rules.push(Rule {
                    constraints,
                    ..r.clone()
                });
            }
        }
        stats.input_rules = g.rules.len();
        let grammar = Grammar {
            rules,
            start: g.start.clone(),
            kind: g.kind,
        };
        Ok(Transformer {
            supply: grammar.var_supply(),
            grammar,
            stats,
        })
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub fn stats(&self) -> TransformStats {
        self.stats
    }

    /// Performs one partial evaluation, or returns `None` when every rule is
    /// IF.
    pub fn step(&mut self) -> Result<Option<Step>, TransformError> {
        let Some(id) = select_lowest_non_if(&self.grammar)? else {
            return Ok(None);
        };
        let index = self.grammar.rules.iter().position(|r| r.id == id).expect("selected rule exists");
        let rule = self.grammar.rules[index].clone();
        let position = *trigger_positions(&rule)
            .first()
            .expect("a standardized, satisfiable non-IF rule has a triggering call");
        let result = partial_evaluate(&self.grammar, id, position, &mut self.supply)?;
        self.stats.expansions += 1;
        self.stats.created += result.rules.len();
        self.stats.eliminated += result.eliminated.len();
        if result.definers == 0 {
            self.stats.unproductive += 1;
        }
        self.grammar.rules.splice(index..=index, result.rules.iter().cloned());
        Ok(Some(Step { rule, position, result }))
    }

    /// Runs to completion and removes rules that can no longer derive
    /// anything.
    pub fn finish(mut self) -> Result<(Grammar, TransformStats), TransformError> {
        while self.step()?.is_some() {}
        let (mut grammar, pruned) = prune_unproductive(&self.grammar);
        grammar.kind = GrammarKind::InteractionFree;
        self.stats.pruned = pruned;
        self.stats.output_rules = grammar.rules.len();
        Ok((grammar, self.stats))
    }
}

/// Transforms an acyclic specialization grammar into an equivalent IF
/// grammar whose nonterminals are all productive.
pub fn to_interaction_free(g: &Grammar) -> Result<(Grammar, TransformStats), TransformError> {
    Transformer::new(g)?.finish()
}

/// Removes rules that call a nonterminal without rules, to a fixpoint.
/// Returns the number of rules removed.
pub fn prune_unproductive(g: &Grammar) -> (Grammar, usize) {
    let mut alive: Vec<bool> = vec![false; g.rules.len()];
    let mut productive: HashSet<&Nonterminal> = HashSet::new();
    loop {
        let mut changed = false;
        for (i, r) in g.rules.iter().enumerate() {
            if !alive[i] && r.calls().all(|(n, _)| productive.contains(n)) {
                alive[i] = true;
                changed |= productive.insert(&r.lhs);
            }
        }
        if !changed {
            break;
        }
    }
    let rules: Vec<Rule> = g
        .rules
        .iter()
        .zip(&alive)
        .filter(|(_, &a)| a)
        .map(|(r, _)| r.clone())
        .collect();
    let removed = g.rules.len() - rules.len();
    (
        Grammar {
            rules,
            start: g.start.clone(),
            kind: g.kind,
        },
        removed,
    )
}

/// Removes rules whose lhs is unreachable from the start symbol.
pub fn sweep_unreachable(g: &Grammar) -> Grammar {
    let mut by_lhs: HashMap<&Nonterminal, Vec<&Rule>> = HashMap::new();
    for r in &g.rules {
        by_lhs.entry(&r.lhs).or_default().push(r);
    }
    let mut reached: HashSet<&Nonterminal> = HashSet::new();
    let mut stack = vec![&g.start];
    reached.insert(&g.start);
    while let Some(n) = stack.pop() {
        for r in by_lhs.get(n).into_iter().flatten() {
            for (callee, _) in r.calls() {
                if reached.insert(callee) {
                    stack.push(callee);
                }
            }
        }
    }
    Grammar {
        rules: g.rules.iter().filter(|r| reached.contains(&r.lhs)).cloned().collect(),
        start: g.start.clone(),
        kind: g.kind,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{specialize, string_to_fsa};
    use crate::examples::john_read_here_grammar;
    use crate::format::parse_grammar_file;
    use crate::grammar::pure_derivation_grammar;

    fn agreement_spec() -> Grammar {
        specialize(&john_read_here_grammar(), &string_to_fsa(&["john", "read", "here"])).unwrap()
    }

    fn has_ident(r: &Rule, want: &[&str]) -> bool {
        r.constraints.constraints().iter().any(|c| {
            c.ident().len() == want.len()
                && want.iter().all(|w| {
                    c.ident().iter().any(|t| match t {
                        Term::Const(k) => k.as_str() == *w,
                        Term::Var(v) => v.base() == *w,
                    })
                })
        })
    }

    #[test]
    fn selects_vp_first() {
        let g = agreement_spec();
        let id = select_lowest_non_if(&g).unwrap().unwrap();
        assert_eq!(g.rule(id).unwrap().lhs.as_str(), "vp@1-3");
    }

    #[test]
    fn selection_on_if_grammar_is_none() {
        let g = parse_grammar_file("%kind specialization\ns(S) -> [x] { [[S],(lex,x)] }.").unwrap();
        assert_eq!(select_lowest_non_if(&g), Ok(None));
    }

    #[test]
    fn selection_above_lexical_rules() {
        let g = parse_grammar_file(
            "%kind specialization\n\
             s(S) -> a(A) b(B) { [[A],(n,X)], [[B],(n,X)] }.\n\
             a(A) -> [x] { [[A],(n,sg)] }.\n\
             b(B) -> [y] { [[B],(n,sg)] }.",
        )
        .unwrap();
        assert_eq!(select_lowest_non_if(&g), Ok(Some(RuleId(0))));
    }

    #[test]
    fn expanding_v_gives_two_vp_rules() {
        let g = agreement_spec();
        let id = select_lowest_non_if(&g).unwrap().unwrap();
        let mut supply = g.var_supply();
        let out = partial_evaluate(&g, id, 0, &mut supply).unwrap();
        assert_eq!(out.definers, 2);
        assert_eq!(out.rules.len(), 2);
        assert!(out.eliminated.is_empty());
        assert!(has_ident(&out.rules[0], &["sg", "Y"]));
        assert!(has_ident(&out.rules[1], &["pl", "Y"]));
        for r in &out.rules {
            assert!(matches!(r.rhs[0], Symbol::Terminal(_)));
            assert_eq!(is_interaction_free(r), Ok(true));
        }
    }

    #[test]
    fn partial_evaluation_errors() {
        let g = agreement_spec();
        let vp = select_lowest_non_if(&g).unwrap().unwrap();
        let mut supply = g.var_supply();
        assert_eq!(
            partial_evaluate(&g, vp, 1, &mut supply),
            Err(TransformError::NotTriggering { rule: vp, position: 1 })
        );
        assert_eq!(
            partial_evaluate(&g, vp, 7, &mut supply),
            Err(TransformError::NotACall { rule: vp, position: 7 })
        );
    }

    #[test]
    fn zero_definers_gives_nothing() {
        let g = parse_grammar_file(
            "%kind specialization\n\
             s(S) -> a(A) b(B) { [[A],(n,X)] }.\n\
             b(B) -> [y] { }.",
        )
        .unwrap();
        let out = partial_evaluate(&g, RuleId(0), 0, &mut g.var_supply()).unwrap();
        assert_eq!(out.definers, 0);
        assert!(out.rules.is_empty());
    }

    #[test]
    fn agreement_transformation() {
        let mut t = Transformer::new(&agreement_spec()).unwrap();
        let steps: Vec<Step> = std::iter::from_fn(|| t.step().unwrap()).collect();
        assert_eq!(steps.len(), 3);
        assert_eq!(steps[0].rule.lhs.as_str(), "vp@1-3");
        assert_eq!(steps[1].rule.lhs.as_str(), "s@0-3");
        assert_eq!(steps[1].position, 0);
        assert_eq!(steps[2].result.rules.len(), 1);
        assert_eq!(steps[2].result.eliminated.len(), 1);
        let (g, stats) = t.finish().unwrap();
        assert_eq!(stats.eliminated, 1);
        assert_eq!(stats.expansions, 3);
        let s_rules: Vec<&Rule> = g.rules_for(&g.start).collect();
        assert_eq!(s_rules.len(), 1);
        let calls: Vec<&str> = s_rules[0].calls().map(|(n, _)| n.as_str()).collect();
        assert_eq!(calls, vec!["a@2-3"]);
        assert!(has_ident(s_rules[0], &["Y", "X", "sg"]));
        assert!(g.rules.iter().all(|r| is_interaction_free(r) == Ok(true)));

        let swept = sweep_unreachable(&g);
        let mut names: Vec<&str> = swept.rules.iter().map(|r| r.lhs.as_str()).collect();
        names.sort();
        assert_eq!(names, vec!["a@2-3", "s@0-3"]);
    }

    #[test]
    fn pure_derivation_grammar_unchanged() {
        let pure = pure_derivation_grammar(&john_read_here_grammar());
        let spec = specialize(&pure, &string_to_fsa(&["john", "read", "here"])).unwrap();
        let (out, stats) = to_interaction_free(&spec).unwrap();
        assert_eq!(stats.expansions, 0);
        assert_eq!(out.rules, spec.rules);
        assert_eq!(out.kind, GrammarKind::InteractionFree);
    }

    #[test]
    fn reference_grammar_rejected() {
        assert_eq!(
            to_interaction_free(&john_read_here_grammar()).unwrap_err(),
            TransformError::WrongKind(GrammarKind::Reference)
        );
    }

    #[test]
    fn cyclic_rejected() {
        let g = parse_grammar_file("%kind specialization\na(A) -> a(B) a(C) { }.\na(A) -> [t] { }.").unwrap();
        assert!(matches!(to_interaction_free(&g), Err(TransformError::Cyclic(_))));
    }

    #[test]
    fn dead_callees_are_pruned() {
        // x's only rule clashes, so the IF rule for s that calls x freely is
        // left without a derivation.
        let g = parse_grammar_file(
            "%kind specialization\n\
             s(S) -> x(X) y(Y) { [[S],(l,X),(r,Y)] }.\n\
             x(X) -> p(P) q(Q) { [[X],(l,P)], [[P],(n,a)] }.\n\
             p(P) -> [t] { [[P],(n,b)] }.\n\
             q(Q) -> [t] { }.\n\
             y(Y) -> [t] { }.",
        )
        .unwrap();
        let (out, stats) = to_interaction_free(&g).unwrap();
        assert_eq!(stats.eliminated, 1);
        assert!(out.rules_for(&out.start).next().is_none());
        assert!(stats.pruned >= 1);
    }

    #[test]
    fn sweep_edge_cases() {
        let g = parse_grammar_file("s(S) -> a(A) a(B) { }.\na(A) -> [t] { }.").unwrap();
        assert_eq!(sweep_unreachable(&g), g);
        let empty = Grammar::new(vec![], "s", GrammarKind::InteractionFree);
        assert_eq!(sweep_unreachable(&empty), empty);
    }
}
