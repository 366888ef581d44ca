//! Reduction of constraint sets to standardized form.
//!
//! Two routes are provided. [`reduce_once`] applies a single rewrite
//! (merge, duplicate-label elimination, or clash detection) and is iterated
//! by [`standardize_by_rewriting`]. [`standardize`] runs the same reduction
//! with a union-find [`Store`] in near-linear time; the store is also used
//! incrementally during enumeration.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::grammar::{Rule, Symbol};
use crate::term::{Constant, Constraint, ConstraintSet, Label, Term};

/// Unification failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("constraints are unsatisfiable")]
pub struct Clash;

#[derive(Debug, Clone)]
struct Class {
    constant: Option<Constant>,
    // label -> (sequence number, target term id)
    access: HashMap<Label, (u64, usize)>,
    stamp: u64,
}

/// Incremental union-find over terms.
///
/// Each class carries its (at most one) constant and a functional map from
/// labels to target terms. Adding a constraint merges classes and propagates
/// duplicate labels until a fixpoint or a [`Clash`].
#[derive(Debug, Clone, Default)]
pub struct Store {
    ids: HashMap<Term, usize>,
    terms: Vec<Term>,
    parent: Vec<usize>,
    size: Vec<usize>,
    class: Vec<Option<Class>>,
    seq: u64,
}

const UNSTAMPED: u64 = u64::MAX;

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    fn intern(&mut self, t: &Term) -> usize {
        if let Some(&id) = self.ids.get(t) {
            return id;
        }
        let id = self.terms.len();
        self.ids.insert(t.clone(), id);
        self.terms.push(t.clone());
        self.parent.push(id);
        self.size.push(1);
        self.class.push(Some(Class {
            constant: match t {
                Term::Const(c) => Some(c.clone()),
                Term::Var(_) => None,
            },
            access: HashMap::new(),
            stamp: UNSTAMPED,
        }));
        id
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn next_seq(&mut self) -> u64 {
        self.seq += 1;
        self.seq
    }

    fn class_mut(&mut self, root: usize) -> &mut Class {
        self.class[root].as_mut().expect("root has class data")
    }

    /// Adds one constraint. On `Err` the store is left in an unspecified
    /// (but memory-safe) state and should be discarded.
    pub fn add(&mut self, c: &Constraint) -> Result<(), Clash> {
        let stamp = self.next_seq();
        let first = self.intern(&c.ident()[0]);
        let mut pending: Vec<(usize, usize)> = Vec::new();
        for t in &c.ident()[1..] {
            let id = self.intern(t);
            pending.push((first, id));
        }
        {
            let root = self.find(first);
            let class = self.class_mut(root);
            class.stamp = class.stamp.min(stamp);
        }
        self.drain(&mut pending)?;
        for (label, target) in c.access_relations() {
            let target = self.intern(target);
            let seq = self.next_seq();
            let root = self.find(first);
            let class = self.class_mut(root);
            if class.constant.is_some() {
                return Err(Clash);
            }
            match class.access.get(label) {
                Some(&(_, existing)) => pending.push((existing, target)),
                None => {
                    class.access.insert(label.clone(), (seq, target));
                }
            }
            self.drain(&mut pending)?;
        }
        Ok(())
    }

    pub fn add_all<'a>(&mut self, cs: impl IntoIterator<Item = &'a Constraint>) -> Result<(), Clash> {
        for c in cs {
            self.add(c)?;
        }
        Ok(())
    }

    /// Identifies two terms.
    pub fn unify(&mut self, a: &Term, b: &Term) -> Result<(), Clash> {
        let a = self.intern(a);
        let b = self.intern(b);
        self.drain(&mut vec![(a, b)])
    }

    fn drain(&mut self, pending: &mut Vec<(usize, usize)>) -> Result<(), Clash> {
        while let Some((a, b)) = pending.pop() {
            let ra = self.find(a);
            let rb = self.find(b);
            if ra == rb {
                continue;
            }
            let stamp = self.next_seq();
            let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
            let small_class = self.class[small].take().expect("root has class data");
            self.parent[small] = big;
            self.size[big] += self.size[small];
            let big_class = self.class_mut(big);
            big_class.stamp = big_class.stamp.min(small_class.stamp);
            if big_class.stamp == UNSTAMPED {
                big_class.stamp = stamp;
            }
            match (&big_class.constant, small_class.constant) {
                (Some(x), Some(y)) if *x != y => return Err(Clash),
                (None, Some(y)) => big_class.constant = Some(y),
                _ => {}
            }
            for (label, (seq, target)) in small_class.access {
                match big_class.access.get_mut(&label) {
                    Some(entry) => {
                        let other = entry.1;
                        if seq < entry.0 {
                            *entry = (seq, target);
                        }
                        pending.push((other, target));
                    }
                    None => {
                        big_class.access.insert(label, (seq, target));
                    }
                }
            }
            if big_class.constant.is_some() && !big_class.access.is_empty() {
                return Err(Clash);
            }
        }
        Ok(())
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.ids.contains_key(t)
    }

    /// Members of the class of `t` (empty if `t` is unknown), in first-seen
    /// order.
    pub fn class_of(&mut self, t: &Term) -> Vec<Term> {
        let Some(&id) = self.ids.get(t) else {
            return Vec::new();
        };
        let root = self.find(id);
        let members: Vec<usize> = (0..self.terms.len()).filter(|&i| self.find(i) == root).collect();
        members.into_iter().map(|i| self.terms[i].clone()).collect()
    }

    /// The standardized constraint list equivalent to everything added so
    /// far. Trivial classes (one member, no access relation) are omitted.
    pub fn export(&mut self) -> Vec<Constraint> {
        let n = self.terms.len();
        let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..n {
            let root = self.find(i);
            members.entry(root).or_default().push(i);
        }
        let mut roots: Vec<usize> = members.keys().copied().collect();
        roots.sort_by_key(|&r| {
            let class = self.class[r].as_ref().expect("root");
            (class.stamp, members[&r][0])
        });
        let mut out = Vec::new();
        for root in roots {
            let class = self.class[root].as_ref().expect("root");
            let ids = &members[&root];
            if ids.len() == 1 && class.access.is_empty() {
                continue;
            }
            let ident: Vec<Term> = ids.iter().map(|&i| self.terms[i].clone()).collect();
            let mut access: Vec<(u64, Label, Term)> = class
                .access
                .iter()
                .map(|(l, &(seq, t))| (seq, l.clone(), self.terms[t].clone()))
                .collect();
            access.sort_by_key(|(seq, _, _)| *seq);
            out.push(
                Constraint::new(ident, access.into_iter().map(|(_, l, t)| (l, t)).collect())
                    .expect("nonempty"),
            );
        }
        out
    }
}

/// Reduces `cs` to an equivalent standardized set, `Top` iff unsatisfiable.
/// A set already in standardized form is returned unchanged.
pub fn standardize(cs: &ConstraintSet) -> ConstraintSet {
    match cs {
        ConstraintSet::Top => ConstraintSet::Top,
        ConstraintSet::Set(_) if is_standardized(cs) => cs.clone(),
        ConstraintSet::Set(list) => {
            let mut store = Store::new();
            match store.add_all(list) {
                Ok(()) => ConstraintSet::Set(store.export()),
                Err(Clash) => ConstraintSet::Top,
            }
        }
    }
}

/// One rewrite applicable to a constraint list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rewrite {
    /// Constraints `i < j` share an identification term.
    Merge(usize, usize),
    /// Constraint `c` has label duplicates at access positions `first < second`.
    DedupLabel { c: usize, first: usize, second: usize },
    /// Constraint `c` is contradictory on its own.
    Clash(usize),
}

/// Every rewrite applicable to `cs`, in a fixed order (merges, then label
/// duplicates, then clashes).
pub fn applicable_rewrites(cs: &[Constraint]) -> Vec<Rewrite> {
    let mut out = Vec::new();
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            if cs[i].ident().iter().any(|t| cs[j].ident().contains(t)) {
                out.push(Rewrite::Merge(i, j));
            }
        }
    }
    for (ci, c) in cs.iter().enumerate() {
        let acc = c.access_relations();
        for second in 0..acc.len() {
            if let Some(first) = (0..second).find(|&f| acc[f].0 == acc[second].0) {
                out.push(Rewrite::DedupLabel { c: ci, first, second });
            }
        }
    }
    for (ci, c) in cs.iter().enumerate() {
        let constants = c.ident().iter().filter(|t| t.is_const()).count();
        if constants > 1 || (constants == 1 && !c.access_relations().is_empty()) {
            out.push(Rewrite::Clash(ci));
        }
    }
    out
}

/// Applies one rewrite to a constraint list.
pub fn apply_rewrite(cs: &[Constraint], rw: Rewrite) -> ConstraintSet {
    match rw {
        Rewrite::Clash(_) => ConstraintSet::Top,
        Rewrite::Merge(i, j) => {
            let mut out = Vec::with_capacity(cs.len() - 1);
            for (k, c) in cs.iter().enumerate() {
                if k == i {
                    let ident = c.ident().iter().chain(cs[j].ident()).cloned().collect();
                    let access = c
                        .access_relations()
                        .iter()
                        .chain(cs[j].access_relations())
                        .cloned()
                        .collect();
                    out.push(Constraint::new(ident, access).expect("nonempty"));
                } else if k != j {
                    out.push(c.clone());
                }
            }
            ConstraintSet::Set(out)
        }
        Rewrite::DedupLabel { c, first, second } => {
            let mut out: Vec<Constraint> = cs.to_vec();
            let target = &cs[c];
            let b = target.access_relations()[first].1.clone();
            let d = target.access_relations()[second].1.clone();
            let access = target
                .access_relations()
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != second)
                .map(|(_, a)| a.clone())
                .collect();
            out[c] = Constraint::new(target.ident().to_vec(), access).expect("nonempty");
            out.push(Constraint::identify(b, d));
            ConstraintSet::Set(out)
        }
    }
}

/// Applies the first applicable rewrite. Returns the new set and whether
/// anything changed.
pub fn reduce_once(cs: &ConstraintSet) -> (ConstraintSet, bool) {
    match cs {
        ConstraintSet::Top => (ConstraintSet::Top, false),
        ConstraintSet::Set(list) => match applicable_rewrites(list).first() {
            Some(&rw) => (apply_rewrite(list, rw), true),
            None => (cs.clone(), false),
        },
    }
}

/// Iterates rewrites to a fixpoint. `pick` chooses among the applicable
/// rewrites (given their count); returning 0 always gives [`reduce_once`]
/// order.
pub fn standardize_by_rewriting(cs: &ConstraintSet, mut pick: impl FnMut(usize) -> usize) -> ConstraintSet {
    let mut current = cs.clone();
    loop {
        let ConstraintSet::Set(list) = &current else {
            return current;
        };
        let rewrites = applicable_rewrites(list);
        if rewrites.is_empty() {
            return current;
        }
        let k = pick(rewrites.len()).min(rewrites.len() - 1);
        current = apply_rewrite(list, rewrites[k]);
    }
}

/// The standardized-form test.
pub fn is_standardized(cs: &ConstraintSet) -> bool {
    let ConstraintSet::Set(list) = cs else {
        return true;
    };
    let mut seen: HashSet<&Term> = HashSet::new();
    for c in list {
        for t in c.ident() {
            if !seen.insert(t) {
                return false;
            }
        }
        let mut labels = HashSet::new();
        if !c.access_relations().iter().all(|(l, _)| labels.insert(l)) {
            return false;
        }
        let constants = c.ident().iter().filter(|t| t.is_const()).count();
        if constants > 1 || (constants == 1 && !c.access_relations().is_empty()) {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("rule {0} is not standardized")]
pub struct NotStandardized(pub crate::grammar::RuleId);

/// True iff the rule's constraints are not `Top` and no rhs call variable
/// occurs in an identification set.
pub fn is_interaction_free(r: &Rule) -> Result<bool, NotStandardized> {
    if !is_standardized(&r.constraints) {
        return Err(NotStandardized(r.id));
    }
    Ok(trigger_positions(r).is_empty() && !r.constraints.is_top())
}

/// Rhs positions whose call variable occurs in some identification set.
pub fn trigger_positions(r: &Rule) -> Vec<usize> {
    let in_ident: HashSet<&Term> = r.constraints.constraints().iter().flat_map(|c| c.ident()).collect();
    r.rhs
        .iter()
        .enumerate()
        .filter_map(|(i, s)| match s {
            Symbol::Call { arg, .. } if in_ident.contains(&Term::Var(arg.clone())) => Some(i),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_constraint_set;

    fn cs(text: &str) -> ConstraintSet {
        parse_constraint_set(text).unwrap()
    }

    #[test]
    fn merge_step() {
        let (out, changed) = reduce_once(&cs("[[V],(lex,read),(n,sg)], [[V],(n,Y)]"));
        assert!(changed);
        assert_eq!(out, cs("[[V],(lex,read),(n,sg),(n,Y)]"));
    }

    #[test]
    fn dedup_step() {
        let (out, changed) = reduce_once(&cs("[[V],(lex,read),(n,sg),(n,Y)]"));
        assert!(changed);
        assert_eq!(out, cs("[[V],(lex,read),(n,sg)], [[sg,Y]]"));
    }

    #[test]
    fn nothing_to_do() {
        let input = cs("[[A],(l,B)]");
        assert_eq!(reduce_once(&input), (input.clone(), false));
    }

    #[test]
    fn clash_step() {
        assert_eq!(reduce_once(&cs("[[pl,Y,X,sg]]")).0, ConstraintSet::Top);
        assert_eq!(reduce_once(&cs("[[sg,Y],(l,A)]")).0, ConstraintSet::Top);
    }

    #[test]
    fn standardized_vp_rule() {
        let input = cs("[[V],(lex,read),(n,sg)], [[VP],(l,V),(r,A),(n,Y)], [[V],(n,Y)]");
        let expected = cs("[[V],(lex,read),(n,sg)], [[VP],(l,V),(r,A),(n,Y)], [[sg,Y]]");
        assert_eq!(standardize(&input), expected);
        assert_eq!(standardize_by_rewriting(&input, |_| 0), expected);
    }

    #[test]
    fn plural_chain_is_top() {
        let input = cs("[[V],(lex,read),(n,pl)], [[VP],(l,V),(r,A),(n,Y)], [[pl,Y]], \
             [[NP],(lex,john),(n,sg)], [[S],(l,NP),(r,VP)], [[VP],(n,X)], [[X,sg]]");
        assert_eq!(standardize(&input), ConstraintSet::Top);
        assert_eq!(standardize_by_rewriting(&input, |_| 0), ConstraintSet::Top);
    }

    #[test]
    fn empty_and_top() {
        assert_eq!(standardize(&ConstraintSet::empty()), ConstraintSet::empty());
        assert_eq!(standardize(&ConstraintSet::Top), ConstraintSet::Top);
    }

    #[test]
    fn duplicate_constants_are_not_a_clash() {
        assert_eq!(standardize(&cs("[[sg,X]], [[Y,sg]]")), cs("[[sg,X,Y]]"));
    }

    #[test]
    fn self_loop_is_standard() {
        let input = cs("[[A],(l,A)]");
        assert!(is_standardized(&input));
        assert_eq!(standardize(&input), input);
    }

    #[test]
    fn standardized_form_test() {
        assert!(is_standardized(&ConstraintSet::Top));
        assert!(is_standardized(&cs("[[A],(l,B)],[[B],(l,C)]")));
        assert!(!is_standardized(&cs("[[A],(l,B)],[[A],(r,C)]")));
        assert!(!is_standardized(&cs("[[A],(l,B),(l,C)]")));
        assert!(!is_standardized(&cs("[[sg,pl]]")));
        assert!(!is_standardized(&cs("[[sg],(l,B)]")));
        assert!(is_standardized(&cs("[[sg,Y]]")));
    }

    #[test]
    fn interaction_free_rules() {
        use crate::format::parse_rule;
        let s = parse_rule("s(S) -> np(NP) vp(VP) { [[S],(l,NP),(r,VP)], [[NP],(n,X)], [[VP],(n,X)] }.").unwrap();
        assert_eq!(is_interaction_free(&s), Ok(false));
        assert_eq!(trigger_positions(&s), vec![0, 1]);
        let fin = parse_rule(
            "s(S) -> [john] [read] a(A) { [[V],(lex,read),(n,sg)], [[VP],(l,V),(r,A),(n,Y)], \
             [[NP],(lex,john),(n,sg)], [[S],(l,NP),(r,VP)], [[Y,X,sg]] }.",
        )
        .unwrap();
        assert_eq!(is_interaction_free(&fin), Ok(true));
        let top = parse_rule("a(A) -> [t] { TOP }.").unwrap();
        assert_eq!(is_interaction_free(&top), Ok(false));
        let bad = parse_rule("a(A) -> [t] { [[A],(l,B)], [[A],(m,C)] }.").unwrap();
        assert!(is_interaction_free(&bad).is_err());
    }

    #[test]
    fn store_unify_incremental() {
        let mut store = Store::new();
        store.add(&Constraint::access(Term::var("A"), Label::new("n"), Term::constant("sg"))).unwrap();
        store.add(&Constraint::access(Term::var("B"), Label::new("n"), Term::constant("pl"))).unwrap();
        let mut ok = store.clone();
        ok.unify(&Term::var("A"), &Term::var("C")).unwrap();
        assert_eq!(store.unify(&Term::var("A"), &Term::var("B")), Err(Clash));
        assert_eq!(ok.class_of(&Term::var("C")), vec![Term::var("A"), Term::var("C")]);
    }
}
