//! Terms, labels and unification constraints.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

/// An atomic value such as `sg` or `read`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constant(Arc<str>);

impl Constant {
    pub fn new(name: &str) -> Self {
        Constant(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An attribute name such as `subj` or `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Arc<str>);

impl Label {
    pub fn new(name: &str) -> Self {
        Label(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A feature-structure variable.
///
/// Identity is the pair (base name, counter). Variables written by hand carry
/// counter 0; [`VarSupply`] hands out fresh counters so renamed copies stay
/// readable (`NP_7` is a copy of `NP`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    base: Arc<str>,
    counter: u32,
}

impl Var {
    pub fn new(base: &str) -> Self {
        Var::with_counter(base, 0)
    }

    pub fn with_counter(base: &str, counter: u32) -> Self {
        Var {
            base: Arc::from(base),
            counter,
        }
    }

    /// Parses the rendered form produced by `Display`: a trailing `_<digits>`
    /// becomes the counter.
    pub fn parse(text: &str) -> Self {
        if let Some((base, digits)) = text.rsplit_once('_') {
            if !base.is_empty() && !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                if let Ok(counter) = digits.parse::<u32>() {
                    return Var::with_counter(base, counter);
                }
            }
        }
        Var::new(text)
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn counter(&self) -> u32 {
        self.counter
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counter == 0 {
            f.write_str(&self.base)
        } else {
            write!(f, "{}_{}", self.base, self.counter)
        }
    }
}

/// Source of never-before-used variable counters.
#[derive(Debug, Clone)]
pub struct VarSupply {
    next: u32,
}

impl VarSupply {
    /// A supply whose first counter is `first`. Counter 0 is reserved for
    /// user-written variables, so `first` is clamped to at least 1.
    pub fn starting_at(first: u32) -> Self {
        VarSupply { next: first.max(1) }
    }

    pub fn fresh(&mut self, like: &Var) -> Var {
        let counter = self.next;
        self.next += 1;
        Var {
            base: like.base.clone(),
            counter,
        }
    }

    pub fn peek(&self) -> u32 {
        self.next
    }
}

impl Default for VarSupply {
    fn default() -> Self {
        VarSupply::starting_at(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Const(Constant),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: &str) -> Self {
        Term::Const(Constant::new(name))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Term::Const(_))
    }
}

impl From<Var> for Term {
    fn from(v: Var) -> Self {
        Term::Var(v)
    }
}

impl From<Constant> for Term {
    fn from(c: Constant) -> Self {
        Term::Const(c)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => v.fmt(f),
            Term::Const(c) => c.fmt(f),
        }
    }
}

/// `[[A1,...,An],(l1,B1),...,(lm,Bm)]`: the terms of the identification set
/// denote one structure whose attribute `li` is `Bi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    ident: Vec<Term>,
    access: Vec<(Label, Term)>,
}

impl Constraint {
    /// Builds a constraint, dropping repeated identification terms (first
    /// occurrence kept). Returns `None` if `ident` is empty.
    pub fn new(ident: Vec<Term>, access: Vec<(Label, Term)>) -> Option<Self> {
        if ident.is_empty() {
            return None;
        }
        let mut seen = HashSet::with_capacity(ident.len());
        let deduped: Vec<Term> = ident.into_iter().filter(|t| seen.insert(t.clone())).collect();
        Some(Constraint {
            ident: deduped,
            access,
        })
    }

    /// `[[a,b]]`
    pub fn identify(a: Term, b: Term) -> Self {
        Constraint::new(vec![a, b], Vec::new()).expect("nonempty")
    }

    /// `[[a],(label,b)]`
    pub fn access(a: Term, label: Label, b: Term) -> Self {
        Constraint::new(vec![a], vec![(label, b)]).expect("nonempty")
    }

    pub fn ident(&self) -> &[Term] {
        &self.ident
    }

    pub fn access_relations(&self) -> &[(Label, Term)] {
        &self.access
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.ident.iter().chain(self.access.iter().map(|(_, t)| t))
    }

    pub fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Constraint {
        Constraint::new(
            self.ident.iter().map(&mut f).collect(),
            self.access.iter().map(|(l, t)| (l.clone(), f(t))).collect(),
        )
        .expect("nonempty")
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[[")?;
        for (i, t) in self.ident.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            t.fmt(f)?;
        }
        f.write_str("]")?;
        for (l, t) in &self.access {
            write!(f, ",({},{})", l, t)?;
        }
        f.write_str("]")
    }
}

/// A set of constraints, or the unsatisfiable `Top`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConstraintSet {
    Top,
    Set(Vec<Constraint>),
}

impl ConstraintSet {
    pub fn empty() -> Self {
        ConstraintSet::Set(Vec::new())
    }

    pub fn is_top(&self) -> bool {
        matches!(self, ConstraintSet::Top)
    }

    pub fn constraints(&self) -> &[Constraint] {
        match self {
            ConstraintSet::Top => &[],
            ConstraintSet::Set(cs) => cs,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.constraints().iter().flat_map(|c| c.terms())
    }

    pub fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> ConstraintSet {
        match self {
            ConstraintSet::Top => ConstraintSet::Top,
            ConstraintSet::Set(cs) => ConstraintSet::Set(cs.iter().map(|c| c.map_terms(&mut f)).collect()),
        }
    }

    /// Concatenation; `Top` absorbs.
    pub fn concat(&self, other: &ConstraintSet) -> ConstraintSet {
        match (self, other) {
            (ConstraintSet::Set(a), ConstraintSet::Set(b)) => {
                ConstraintSet::Set(a.iter().chain(b.iter()).cloned().collect())
            }
            _ => ConstraintSet::Top,
        }
    }

    /// Total number of access relations.
    pub fn access_count(&self) -> usize {
        self.constraints().iter().map(|c| c.access.len()).sum()
    }
}

impl From<Vec<Constraint>> for ConstraintSet {
    fn from(cs: Vec<Constraint>) -> Self {
        ConstraintSet::Set(cs)
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintSet::Top => f.write_str("TOP"),
            ConstraintSet::Set(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    c.fmt(f)?;
                }
                Ok(())
            }
        }
    }
}
