//! JSON emitters. Output only; the text format is the interchange format.

use serde_json::{json, Map, Value};

use crate::chart::{Chart, Derivation};
use crate::enumerate::{FeatureStructure, Node};
use crate::grammar::{Grammar, Provenance, Rule, Symbol};
use crate::term::{ConstraintSet, Term};

fn term_json(t: &Term) -> Value {
    match t {
        Term::Var(v) => json!({ "var": v.to_string() }),
        Term::Const(c) => json!({ "const": c.as_str() }),
    }
}

fn constraints_json(cs: &ConstraintSet) -> Value {
    match cs {
        ConstraintSet::Top => json!("TOP"),
        ConstraintSet::Set(list) => Value::Array(
            list.iter()
                .map(|c| {
                    json!({
                        "ident": c.ident().iter().map(term_json).collect::<Vec<_>>(),
                        "access": c
                            .access_relations()
                            .iter()
                            .map(|(l, t)| json!([l.as_str(), term_json(t)]))
                            .collect::<Vec<_>>(),
                    })
                })
                .collect(),
        ),
    }
}

fn provenance_json(p: &Provenance) -> Value {
    match p {
        Provenance::Source => json!({ "kind": "source" }),
        Provenance::Chart { rule, edge } => json!({ "kind": "chart", "rule": rule.0, "edge": edge.as_str() }),
        Provenance::Expansion { parent, definer } => {
            json!({ "kind": "expansion", "parent": parent.0, "definer": definer.0 })
        }
    }
}

fn rule_json(r: &Rule) -> Value {
    json!({
        "id": r.id.0,
        "lhs": r.lhs.as_str(),
        "lhsVar": r.lhs_var.to_string(),
        "rhs": r.rhs.iter().map(|s| match s {
            Symbol::Terminal(t) => json!({ "terminal": t.as_str() }),
            Symbol::Call { name, arg } => json!({ "call": name.as_str(), "arg": arg.to_string() }),
        }).collect::<Vec<_>>(),
        "constraints": constraints_json(&r.constraints),
        "provenance": provenance_json(&r.provenance),
    })
}

pub fn grammar_to_json(g: &Grammar) -> Value {
    json!({
        "kind": g.kind.name(),
        "start": g.start.as_str(),
        "rules": g.rules.iter().map(rule_json).collect::<Vec<_>>(),
    })
}

pub fn structure_to_json(fs: &FeatureStructure) -> Value {
    let mut edges = Vec::new();
    let mut atoms = Map::new();
    for (i, node) in fs.nodes().iter().enumerate() {
        match node {
            Node::Atom(c) => {
                atoms.insert(i.to_string(), json!(c.as_str()));
            }
            Node::Complex(out) => {
                for (l, to) in out {
                    edges.push(json!([i, l.as_str(), to]));
                }
            }
        }
    }
    json!({
        "nodes": fs.len(),
        "edges": edges,
        "atoms": atoms,
        "root": fs.root(),
    })
}

pub fn structures_to_json(list: &[FeatureStructure]) -> Value {
    json!({ "structures": list.iter().map(structure_to_json).collect::<Vec<_>>() })
}

pub fn chart_to_json(chart: &Chart) -> Value {
    json!({
        "edges": chart.edges().iter().enumerate().map(|(i, e)| json!({
            "id": i,
            "name": e.name.as_str(),
            "from": e.from,
            "to": e.to,
            "derivations": e.derivations.iter().map(|d| match d {
                Derivation::Binary { rule, left, right } => json!({ "rule": rule.0, "left": left.0, "right": right.0 }),
                Derivation::Lexical { rule, terminal } => json!({ "rule": rule.0, "terminal": terminal.as_str() }),
            }).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "accepting": chart.accepting_edges().iter().map(|e| e.0).collect::<Vec<_>>(),
    })
}
