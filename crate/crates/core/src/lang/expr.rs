//! Terms and quantifier-free formulas of the Skolemized language.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::rank::Rank;

/// Variable index. Inside a Skolem index formula, `0` is the distinguished
/// variable and `1..=arity` are the parameters in first-occurrence order.
pub type Var = u32;

/// Function symbols of Peano arithmetic. `0` is the numeral `Num(0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PaFun {
    Succ,
    Add,
    Mul,
}

impl PaFun {
    pub fn arity(self) -> usize {
        match self {
            PaFun::Succ => 1,
            PaFun::Add | PaFun::Mul => 2,
        }
    }

    /// Interpretation in the standard model.
    pub fn apply(self, args: &[BigUint]) -> BigUint {
        match self {
            PaFun::Succ => &args[0] + 1u32,
            PaFun::Add => &args[0] + &args[1],
            PaFun::Mul => &args[0] * &args[1],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PaFun::Succ => "s",
            PaFun::Add => "+",
            PaFun::Mul => "*",
        }
    }
}

/// Relation symbols of Peano arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Eq,
    Lt,
}

impl Rel {
    pub fn holds(self, a: &BigUint, b: &BigUint) -> bool {
        match self {
            Rel::Eq => a == b,
            Rel::Lt => a < b,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rel::Eq => "=",
            Rel::Lt => "<",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Num(BigUint),
    Var(Var),
    Fun(PaFun, Vec<Term>),
    Skolem(Arc<SkolemSymbol>, Vec<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Top,
    Bottom,
    Rel(Rel, Term, Term),
    /// `t ∈ I`. Inside an inductive clause the same node stands for `t ∈ X`.
    In(Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Ordinary,
    /// `c_{∃x ¬B(x,y,I)}`, the rank Ω witness attached to the inductive clause.
    InductiveWitness,
}

/// A Skolem function symbol `c_{∃x φ(x, y⃗)}`.
///
/// Two symbols are equal iff their index formulas (canonically named) and
/// kinds coincide; `level` and `mentions_i` are cached functions of the index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SkolemSymbol {
    index: Formula,
    arity: usize,
    kind: SymbolKind,
    level: usize,
    mentions_i: bool,
}

impl SkolemSymbol {
    pub(crate) fn new(index: Formula, arity: usize, kind: SymbolKind) -> Self {
        let level = 1 + index.simple_rank();
        let mentions_i = index.mentions_in();
        SkolemSymbol {
            index,
            arity,
            kind,
            level,
            mentions_i,
        }
    }

    pub fn index(&self) -> &Formula {
        &self.index
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn is_inductive_witness(&self) -> bool {
        self.kind == SymbolKind::InductiveWitness
    }

    /// `rk_s(c(0⃗))`.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn rank(&self) -> Rank {
        match self.kind {
            SymbolKind::InductiveWitness => Rank::Omega,
            SymbolKind::Ordinary if self.mentions_i => Rank::OmegaPlus(self.level),
            SymbolKind::Ordinary => Rank::Fin(self.level),
        }
    }

    /// `φ(x, a⃗)`: the index formula with the distinguished variable and the
    /// parameters replaced.
    pub fn instantiate(&self, x: &Term, params: &[Term]) -> Formula {
        debug_assert_eq!(params.len(), self.arity);
        self.index.subst_with(&|v| {
            if v == 0 {
                Some(x.clone())
            } else {
                params.get(v as usize - 1).cloned()
            }
        })
    }
}

impl Term {
    pub fn num(n: u64) -> Term {
        Term::Num(BigUint::from(n))
    }

    pub fn zero() -> Term {
        Term::Num(BigUint::zero())
    }

    /// `S(t)`, normalised to a numeral when `t` is one.
    pub fn succ(t: Term) -> Term {
        match t {
            Term::Num(n) => Term::Num(n + BigUint::one()),
            t => Term::Fun(PaFun::Succ, vec![t]),
        }
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Fun(PaFun::Add, vec![a, b])
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Fun(PaFun::Mul, vec![a, b])
    }

    pub fn as_numeral(&self) -> Option<&BigUint> {
        match self {
            Term::Num(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Num(_) => true,
            Term::Var(_) => false,
            Term::Fun(_, args) | Term::Skolem(_, args) => args.iter().all(Term::is_closed),
        }
    }

    pub fn mentions_var(&self, x: Var) -> bool {
        match self {
            Term::Num(_) => false,
            Term::Var(v) => *v == x,
            Term::Fun(_, args) | Term::Skolem(_, args) => args.iter().any(|a| a.mentions_var(x)),
        }
    }

    pub fn free_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Num(_) => {}
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v)
                }
            }
            Term::Fun(_, args) | Term::Skolem(_, args) => {
                args.iter().for_each(|a| a.free_vars(out))
            }
        }
    }

    /// Replaces free variables. Skolem index formulas are opaque and are not
    /// entered.
    pub fn subst_with(&self, f: &dyn Fn(Var) -> Option<Term>) -> Term {
        match self {
            Term::Num(_) => self.clone(),
            Term::Var(v) => f(*v).unwrap_or_else(|| self.clone()),
            Term::Fun(g, args) => {
                let args: Vec<Term> = args.iter().map(|a| a.subst_with(f)).collect();
                if *g == PaFun::Succ {
                    Term::succ(args.into_iter().next().unwrap())
                } else {
                    Term::Fun(*g, args)
                }
            }
            Term::Skolem(c, args) => {
                Term::Skolem(c.clone(), args.iter().map(|a| a.subst_with(f)).collect())
            }
        }
    }

    pub fn subst(&self, x: Var, by: &Term) -> Term {
        self.subst_with(&|v| (v == x).then(|| by.clone()))
    }

    /// Stratification level: 0 without Skolem terms, otherwise the largest
    /// `1 + rk_s(index)` over the symbols occurring.
    pub fn simple_rank(&self) -> usize {
        match self {
            Term::Num(_) | Term::Var(_) => 0,
            Term::Fun(_, args) => args.iter().map(Term::simple_rank).max().unwrap_or(0),
            Term::Skolem(c, args) => args
                .iter()
                .map(Term::simple_rank)
                .fold(c.level(), usize::max),
        }
    }

    /// Number of Skolem-term occurrences (nested ones included).
    pub fn skolem_count(&self) -> usize {
        match self {
            Term::Num(_) | Term::Var(_) => 0,
            Term::Fun(_, args) => args.iter().map(Term::skolem_count).sum(),
            Term::Skolem(_, args) => 1 + args.iter().map(Term::skolem_count).sum::<usize>(),
        }
    }

    pub fn visit_skolem<'a>(&'a self, f: &mut dyn FnMut(&'a Arc<SkolemSymbol>, &'a [Term])) {
        match self {
            Term::Num(_) | Term::Var(_) => {}
            Term::Fun(_, args) => args.iter().for_each(|a| a.visit_skolem(f)),
            Term::Skolem(c, args) => {
                f(c, args);
                args.iter().for_each(|a| a.visit_skolem(f));
            }
        }
    }
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Rel(Rel::Eq, a, b)
    }

    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::Rel(Rel::Lt, a, b)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// `a → b`, an abbreviation for `¬a ∨ b`.
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(Formula::not(a), b)
    }

    /// Right-nested conjunction; `⊤` when empty.
    pub fn and_all(items: Vec<Formula>) -> Formula {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Formula::Top,
            Some(last) => it.fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    /// Right-nested disjunction; `⊥` when empty.
    pub fn or_all(items: Vec<Formula>) -> Formula {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Formula::Bottom,
            Some(last) => it.fold(last, |acc, f| Formula::or(f, acc)),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Formula::Top | Formula::Bottom => true,
            Formula::Rel(_, a, b) => a.is_closed() && b.is_closed(),
            Formula::In(t) => t.is_closed(),
            Formula::Not(f) => f.is_closed(),
            Formula::And(a, b) | Formula::Or(a, b) => a.is_closed() && b.is_closed(),
        }
    }

    pub fn mentions_var(&self, x: Var) -> bool {
        match self {
            Formula::Top | Formula::Bottom => false,
            Formula::Rel(_, a, b) => a.mentions_var(x) || b.mentions_var(x),
            Formula::In(t) => t.mentions_var(x),
            Formula::Not(f) => f.mentions_var(x),
            Formula::And(a, b) | Formula::Or(a, b) => a.mentions_var(x) || b.mentions_var(x),
        }
    }

    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.for_each_term(&mut |t| t.free_vars(&mut out));
        out
    }

    /// True if an `In` atom occurs at the top level (not inside Skolem indices).
    pub fn mentions_in(&self) -> bool {
        match self {
            Formula::In(_) => true,
            Formula::Top | Formula::Bottom | Formula::Rel(..) => false,
            Formula::Not(f) => f.mentions_in(),
            Formula::And(a, b) | Formula::Or(a, b) => a.mentions_in() || b.mentions_in(),
        }
    }

    pub fn for_each_term<'a>(&'a self, f: &mut dyn FnMut(&'a Term)) {
        match self {
            Formula::Top | Formula::Bottom => {}
            Formula::Rel(_, a, b) => {
                f(a);
                f(b);
            }
            Formula::In(t) => f(t),
            Formula::Not(g) => g.for_each_term(f),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.for_each_term(f);
                b.for_each_term(f);
            }
        }
    }

    pub fn subst_with(&self, f: &dyn Fn(Var) -> Option<Term>) -> Formula {
        self.map_terms(&|t| t.subst_with(f))
    }

    pub fn subst(&self, x: Var, by: &Term) -> Formula {
        self.subst_with(&|v| (v == x).then(|| by.clone()))
    }

    pub fn map_terms(&self, f: &dyn Fn(&Term) -> Term) -> Formula {
        match self {
            Formula::Top | Formula::Bottom => self.clone(),
            Formula::Rel(r, a, b) => Formula::Rel(*r, f(a), f(b)),
            Formula::In(t) => Formula::In(f(t)),
            Formula::Not(g) => Formula::not(g.map_terms(f)),
            Formula::And(a, b) => Formula::and(a.map_terms(f), b.map_terms(f)),
            Formula::Or(a, b) => Formula::or(a.map_terms(f), b.map_terms(f)),
        }
    }

    /// Replaces every `In(t)` atom by `g(t)`.
    pub fn map_in(&self, g: &dyn Fn(&Term) -> Formula) -> Formula {
        match self {
            Formula::Top | Formula::Bottom | Formula::Rel(..) => self.clone(),
            Formula::In(t) => g(t),
            Formula::Not(f) => Formula::not(f.map_in(g)),
            Formula::And(a, b) => Formula::and(a.map_in(g), b.map_in(g)),
            Formula::Or(a, b) => Formula::or(a.map_in(g), b.map_in(g)),
        }
    }

    pub fn simple_rank(&self) -> usize {
        let mut r = 0;
        self.for_each_term(&mut |t| r = r.max(t.simple_rank()));
        r
    }

    /// Number of `t ∈ I` atoms plus Skolem-term occurrences.
    pub fn expression_count(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom => 0,
            Formula::Rel(_, a, b) => a.skolem_count() + b.skolem_count(),
            Formula::In(t) => 1 + t.skolem_count(),
            Formula::Not(f) => f.expression_count(),
            Formula::And(a, b) | Formula::Or(a, b) => a.expression_count() + b.expression_count(),
        }
    }

    /// Each `In` atom occurs under an even number of negations.
    pub fn in_positive(&self) -> bool {
        fn go(f: &Formula, positive: bool) -> bool {
            match f {
                Formula::In(_) => positive,
                Formula::Top | Formula::Bottom | Formula::Rel(..) => true,
                Formula::Not(g) => go(g, !positive),
                Formula::And(a, b) | Formula::Or(a, b) => go(a, positive) && go(b, positive),
            }
        }
        go(self, true)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Term::Num(n) => write!(f, "{}", n),
            Term::Var(v) => write!(f, "v{}", v),
            Term::Fun(g, args) => {
                write!(f, "({}", g.name())?;
                for a in args {
                    write!(f, " {}", a)?;
                }
                write!(f, ")")
            }
            Term::Skolem(c, args) => {
                match c.kind() {
                    SymbolKind::InductiveWitness => write!(f, "(cw")?,
                    SymbolKind::Ordinary => write!(f, "(eps {} {}", c.arity(), c.index())?,
                }
                for a in args {
                    write!(f, " {}", a)?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Formula::Top => write!(f, "true"),
            Formula::Bottom => write!(f, "false"),
            Formula::Rel(r, a, b) => write!(f, "({} {} {})", r.name(), a, b),
            Formula::In(t) => write!(f, "(in {})", t),
            Formula::Not(g) => write!(f, "(not {})", g),
            Formula::And(a, b) => write!(f, "(and {} {})", a, b),
            Formula::Or(a, b) => write!(f, "(or {} {})", a, b),
        }
    }
}

impl fmt::Display for SkolemSymbol {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self.kind {
            SymbolKind::InductiveWitness => write!(f, "cw"),
            SymbolKind::Ordinary => write!(f, "(eps {} {})", self.arity, self.index),
        }
    }
}
