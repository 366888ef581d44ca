//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ifgram::grammar::{Grammar, GrammarKind, Nonterminal, Rule, Symbol};
use ifgram::term::{Constraint, ConstraintSet, Label, Term, Var};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub const LABELS: [&str; 4] = ["f", "g", "h", "k"];
pub const CONSTANTS: [&str; 3] = ["a", "b", "c"];

#[derive(Debug, Clone, Copy)]
pub struct SetShape {
    pub vars: usize,
    pub constants: usize,
    pub labels: usize,
    pub max_constraints: usize,
}

impl Default for SetShape {
    fn default() -> Self {
        SetShape {
            vars: 5,
            constants: 3,
            labels: 4,
            max_constraints: 8,
        }
    }
}

fn random_term(rng: &mut StdRng, vars: &[Var], constants: usize, const_p: f64) -> Term {
    if constants > 0 && rng.gen_bool(const_p) {
        Term::constant(CONSTANTS[rng.gen_range(0..constants)])
    } else {
        Term::Var(vars[rng.gen_range(0..vars.len())].clone())
    }
}

fn random_constraint(rng: &mut StdRng, vars: &[Var], constants: usize, labels: usize) -> Constraint {
    let n_ident = rng.gen_range(1..=3);
    let ident: Vec<Term> = (0..n_ident).map(|_| random_term(rng, vars, constants, 0.15)).collect();
    let n_access = rng.gen_range(0..=2);
    let access = (0..n_access)
        .map(|_| {
            (
                Label::new(LABELS[rng.gen_range(0..labels)]),
                random_term(rng, vars, constants, 0.25),
            )
        })
        .collect();
    Constraint::new(ident, access).expect("nonempty ident")
}

pub fn random_constraint_set(rng: &mut StdRng, shape: SetShape) -> ConstraintSet {
    let vars: Vec<Var> = (0..shape.vars).map(|i| Var::new(&((b'A' + i as u8) as char).to_string())).collect();
    let n = rng.gen_range(1..=shape.max_constraints);
    ConstraintSet::Set(
        (0..n)
            .map(|_| random_constraint(rng, &vars, shape.constants, shape.labels))
            .collect(),
    )
}

// ---- partition oracle -------------------------------------------------

/// Distinct terms of the sets, in first-seen order.
pub fn term_universe(sets: &[&ConstraintSet]) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for cs in sets {
        for c in cs.constraints() {
            for t in c.ident().iter().chain(c.access_relations().iter().map(|(_, t)| t)) {
                if !out.contains(t) {
                    out.push(t.clone());
                }
            }
        }
    }
    out
}

/// Calls `f` with every partition of `0..n` as a block index per element.
pub fn for_each_partition(n: usize, mut f: impl FnMut(&[usize]) -> bool) {
    let mut a = vec![0usize; n];
    let mut max = vec![0usize; n];
    loop {
        if !f(&a) {
            return;
        }
        // next restricted growth string
        let mut i = n;
        loop {
            if i <= 1 {
                return;
            }
            i -= 1;
            let limit = if i == 0 { 0 } else { max[i - 1] + 1 };
            if a[i] < limit {
                a[i] += 1;
                let m = max[i - 1].max(a[i]);
                max[i] = m;
                for j in i + 1..n {
                    a[j] = 0;
                    max[j] = m;
                }
                break;
            }
        }
    }
}

/// Block-level edges, if the partition satisfies the set.
pub fn partition_model(cs: &ConstraintSet, terms: &[Term], block: &[usize]) -> Option<BTreeSet<(usize, String, usize)>> {
    let ConstraintSet::Set(list) = cs else {
        return None;
    };
    let idx = |t: &Term| block[terms.iter().position(|u| u == t).expect("term in universe")];
    let mut constant_of: HashMap<usize, &Term> = HashMap::new();
    for t in terms {
        if t.is_const() {
            if let Some(other) = constant_of.insert(idx(t), t) {
                if other != t {
                    return None;
                }
            }
        }
    }
    let mut edge: HashMap<(usize, String), usize> = HashMap::new();
    for c in list {
        let b = idx(&c.ident()[0]);
        if c.ident().iter().any(|t| idx(t) != b) {
            return None;
        }
        for (l, t) in c.access_relations() {
            if constant_of.contains_key(&b) {
                return None;
            }
            let target = idx(t);
            if let Some(&old) = edge.get(&(b, l.as_str().to_string())) {
                if old != target {
                    return None;
                }
            }
            edge.insert((b, l.as_str().to_string()), target);
        }
    }
    Some(edge.into_iter().map(|((a, l), b)| (a, l, b)).collect())
}

pub fn oracle_satisfiable(cs: &ConstraintSet) -> bool {
    if cs.is_top() {
        return false;
    }
    let terms = term_universe(&[cs]);
    let mut sat = false;
    for_each_partition(terms.len(), |p| {
        sat = partition_model(cs, &terms, p).is_some();
        !sat
    });
    sat
}

/// Same satisfying partitions with the same induced edges.
pub fn oracle_equivalent(a: &ConstraintSet, b: &ConstraintSet) -> bool {
    let terms = term_universe(&[a, b]);
    let mut same = true;
    for_each_partition(terms.len(), |p| {
        same = partition_model(a, &terms, p) == partition_model(b, &terms, p);
        same
    });
    same
}

/// Access graph over classes of identified terms has no cycle.
pub fn constraint_graph_acyclic(cs: &ConstraintSet) -> bool {
    let terms = term_universe(&[cs]);
    let n = terms.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let pos = |t: &Term| terms.iter().position(|u| u == t).unwrap();
    for c in cs.constraints() {
        let first = pos(&c.ident()[0]);
        for t in &c.ident()[1..] {
            let (x, y) = (find(&mut parent, first), find(&mut parent, pos(t)));
            parent[x] = y;
        }
    }
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for c in cs.constraints() {
        let from = find(&mut parent, pos(&c.ident()[0]));
        for (_, t) in c.access_relations() {
            let to = find(&mut parent, pos(t));
            succ[from].push(to);
        }
    }
    // 0 new, 1 active, 2 done
    let mut mark = vec![0u8; n];
    fn dfs(v: usize, succ: &[Vec<usize>], mark: &mut [u8]) -> bool {
        mark[v] = 1;
        for &w in &succ[v] {
            if mark[w] == 1 || (mark[w] == 0 && !dfs(w, succ, mark)) {
                return false;
            }
        }
        mark[v] = 2;
        true
    }
    (0..n).all(|v| mark[v] == 2 || dfs(v, &succ, &mut mark))
}

// ---- grammars ---------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct GrammarShape {
    pub max_rules: usize,
    pub labels: usize,
    pub constants: usize,
}

impl Default for GrammarShape {
    fn default() -> Self {
        GrammarShape {
            max_rules: 12,
            labels: 4,
            constants: 3,
        }
    }
}

/// Derivation trees allowed per generated grammar, so the oracle stays cheap.
pub const MAX_TREES: u128 = 300;

/// Random acyclic grammar of kind specialization: `n{i}` only calls
/// `n{j}` with `j > i`; start `n0`. At most [`MAX_TREES`] derivations.
pub fn random_specialization(rng: &mut StdRng, shape: GrammarShape) -> Grammar {
    loop {
        let g = random_specialization_unbounded(rng, shape);
        if grammar_tree_count(&g) <= MAX_TREES {
            return g;
        }
    }
}

fn random_specialization_unbounded(rng: &mut StdRng, shape: GrammarShape) -> Grammar {
    let k = rng.gen_range(2..=5);
    let mut rules = Vec::new();
    'outer: for i in 0..k {
        let count = rng.gen_range(1..=3);
        for _ in 0..count {
            if rules.len() >= shape.max_rules {
                break 'outer;
            }
            let lhs = format!("n{}", i);
            let kind = if i + 1 == k { 0 } else { rng.gen_range(0..10) };
            let mut rhs = Vec::new();
            let mut vars = vec![Var::new("X")];
            match kind {
                0..=2 => rhs.push(Symbol::terminal(["t", "u"][rng.gen_range(0..2)])),
                3 => {
                    rhs.push(Symbol::terminal("t"));
                    rhs.push(Symbol::call(&format!("n{}", rng.gen_range(i + 1..k)), "A"));
                    vars.push(Var::new("A"));
                }
                _ => {
                    rhs.push(Symbol::call(&format!("n{}", rng.gen_range(i + 1..k)), "A"));
                    rhs.push(Symbol::call(&format!("n{}", rng.gen_range(i + 1..k)), "B"));
                    vars.push(Var::new("A"));
                    vars.push(Var::new("B"));
                }
            }
            let mut pool = vars.clone();
            pool.push(Var::new("Y"));
            pool.push(Var::new("Z"));
            let mut list = Vec::new();
            // tie the daughters to the mother so solutions carry structure
            let mut tie: Vec<(Label, Term)> = vars[1..]
                .iter()
                .enumerate()
                .map(|(d, v)| (Label::new(["l", "r"][d]), Term::Var(v.clone())))
                .collect();
            if rng.gen_bool(0.5) {
                tie.push((
                    Label::new(LABELS[rng.gen_range(0..shape.labels)]),
                    random_term(rng, &pool, shape.constants, 0.6),
                ));
            }
            if !tie.is_empty() {
                list.push(Constraint::new(vec![Term::Var(vars[0].clone())], tie).unwrap());
            }
            for _ in 0..rng.gen_range(0..=2) {
                list.push(random_constraint(rng, &pool, shape.constants, shape.labels));
            }
            rules.push(Rule::new(rules.len() as u32, &lhs, "X", rhs, ConstraintSet::Set(list)));
        }
    }
    Grammar::new(rules, "n0", GrammarKind::Specialization)
}

/// Binary/lexical reference grammar over terminals `t`, `u`; every called
/// nonterminal has a lexical rule.
pub fn random_reference(rng: &mut StdRng) -> Grammar {
    let k = rng.gen_range(1..=3);
    let mut rules = Vec::new();
    for i in 0..k {
        for t in ["t", "u"] {
            if rng.gen_bool(0.6) || (t == "t" && i == 0) {
                let cs = ConstraintSet::Set(vec![Constraint::access(Term::var("X"), Label::new("lex"), Term::constant(t))]);
                rules.push(Rule::new(rules.len() as u32, &format!("n{}", i), "X", vec![Symbol::terminal(t)], cs));
            }
        }
    }
    let defined: BTreeSet<String> = rules.iter().map(|r| r.lhs.as_str().to_string()).collect();
    let defined: Vec<String> = defined.into_iter().collect();
    for _ in 0..rng.gen_range(1..=4) {
        let pick = |rng: &mut StdRng| defined[rng.gen_range(0..defined.len())].clone();
        let lhs = pick(rng);
        let (l, r) = (pick(rng), pick(rng));
        let cs = ConstraintSet::Set(vec![Constraint::new(
            vec![Term::var("X")],
            vec![(Label::new("l"), Term::var("A")), (Label::new("r"), Term::var("B"))],
        )
        .unwrap()]);
        rules.push(Rule::new(
            rules.len() as u32,
            &lhs,
            "X",
            vec![Symbol::call(&l, "A"), Symbol::call(&r, "B")],
            cs,
        ));
    }
    Grammar::new(rules, "n0", GrammarKind::Reference)
}

/// Parse trees of a binary/lexical grammar over `tokens`, by exhaustive
/// splitting.
pub fn naive_tree_count(g: &Grammar, tokens: &[&str]) -> u128 {
    fn count(g: &Grammar, n: &Nonterminal, toks: &[&str]) -> u128 {
        let mut total = 0;
        for r in g.rules.iter().filter(|r| &r.lhs == n) {
            match r.rhs.as_slice() {
                [Symbol::Terminal(t)] => {
                    if toks.len() == 1 && t.as_str() == toks[0] {
                        total += 1;
                    }
                }
                [Symbol::Call { name: a, .. }, Symbol::Call { name: b, .. }] => {
                    for split in 1..toks.len() {
                        let left = count(g, a, &toks[..split]);
                        if left > 0 {
                            total += left * count(g, b, &toks[split..]);
                        }
                    }
                }
                _ => panic!("not binary/lexical"),
            }
        }
        total
    }
    count(g, &g.start, tokens)
}

/// Derivation trees of an acyclic grammar from its start symbol, by
/// recursion over rules.
pub fn grammar_tree_count(g: &Grammar) -> u128 {
    fn count(g: &Grammar, n: &Nonterminal) -> u128 {
        g.rules
            .iter()
            .filter(|r| &r.lhs == n)
            .map(|r| r.calls().map(|(c, _)| count(g, c)).product::<u128>())
            .sum()
    }
    count(g, &g.start)
}

/// Height of each nonterminal: 0 without calls, else 1 + max callee height.
pub fn heights(g: &Grammar) -> HashMap<Nonterminal, usize> {
    fn h(g: &Grammar, n: &Nonterminal, memo: &mut HashMap<Nonterminal, usize>) -> usize {
        if let Some(&v) = memo.get(n) {
            return v;
        }
        let mut best = 0;
        for r in g.rules.iter().filter(|r| &r.lhs == n) {
            for (c, _) in r.calls() {
                best = best.max(1 + h(g, c, memo));
            }
        }
        memo.insert(n.clone(), best);
        best
    }
    let mut memo = HashMap::new();
    for n in g.nonterminals() {
        h(g, &n, &mut memo);
    }
    memo
}

/// Nested multiset of call heights: per rule the heights of its calls in
/// descending order; rules in descending order. Compared lexicographically
/// this is the multiset extension of the multiset extension of `<`.
pub fn termination_measure(g: &Grammar) -> Vec<Vec<usize>> {
    let h = heights(g);
    let mut outer: Vec<Vec<usize>> = g
        .rules
        .iter()
        .map(|r| {
            let mut v: Vec<usize> = r.calls().map(|(c, _)| h[c]).collect();
            v.sort_unstable_by(|a, b| b.cmp(a));
            v
        })
        .collect();
    outer.sort_unstable_by(|a, b| b.cmp(a));
    outer
}
