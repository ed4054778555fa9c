//! Epsilon-substitutions and the reduction semantics `|t|_S`, `|φ|_S`.
//!
//! A [`Substitution`] is a finite map from canonical expressions to values.
//! Lookups go through the [`Assignment`] trait so the same reduction code
//! runs over `S` itself, over its standard extension `S̄` ([`Standard`]), or
//! over an instrumented view.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::lang::{Canon, Formula, Language, Rank, Term};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Num(BigUint),
    Top,
    /// The symbol `?`.
    Unknown,
}

impl Value {
    pub fn num(n: u64) -> Value {
        Value::Num(BigUint::from(n))
    }

    pub fn is_unknown(&self) -> bool {
        *self == Value::Unknown
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Value::Num(n) => write!(f, "{}", n),
            Value::Top => write!(f, "T"),
            Value::Unknown => write!(f, "?"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("canonical term {0} cannot take the value 0 (values are positive numerals or ?)")]
    ZeroTermValue(String),
    #[error("value {value} is not admissible for {expr}")]
    Incompatible { expr: String, value: String },
}

fn check_value(e: &Canon, v: &Value) -> Result<(), SubstError> {
    match (e, v) {
        (_, Value::Unknown) | (Canon::Form(_), Value::Top) => Ok(()),
        (Canon::Term(..), Value::Num(n)) if n.is_zero() => {
            Err(SubstError::ZeroTermValue(e.to_string()))
        }
        (Canon::Term(..), Value::Num(_)) => Ok(()),
        _ => Err(SubstError::Incompatible {
            expr: e.to_string(),
            value: v.to_string(),
        }),
    }
}

/// Source of values for canonical expressions during reduction.
pub trait Assignment {
    /// `None` means the expression is outside the domain.
    fn lookup(&self, e: &Canon) -> Option<Value>;
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    entries: BTreeMap<Canon, Value>,
}

impl Assignment for Substitution {
    fn lookup(&self, e: &Canon) -> Option<Value> {
        self.entries.get(e).cloned()
    }
}

/// The standard extension `S̄`: every expression outside `dom(S)` maps to `?`.
#[derive(Clone, Copy, Debug)]
pub struct Standard<'a>(pub &'a Substitution);

impl Assignment for Standard<'_> {
    fn lookup(&self, e: &Canon) -> Option<Value> {
        Some(self.0.entries.get(e).cloned().unwrap_or(Value::Unknown))
    }
}

/// Like [`Standard`], but remembers every lookup that fell outside `dom(S)`.
#[derive(Debug)]
pub struct Recording<'a> {
    s: &'a Substitution,
    missed: RefCell<BTreeSet<Canon>>,
}

impl<'a> Recording<'a> {
    pub fn new(s: &'a Substitution) -> Self {
        Recording { s, missed: RefCell::new(BTreeSet::new()) }
    }

    pub fn missed(&self) -> BTreeSet<Canon> {
        self.missed.borrow().clone()
    }
}

impl Assignment for Recording<'_> {
    fn lookup(&self, e: &Canon) -> Option<Value> {
        match self.s.get(e) {
            Some(v) => Some(v.clone()),
            None => {
                self.missed.borrow_mut().insert(e.clone());
                Some(Value::Unknown)
            }
        }
    }
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(
        entries: impl IntoIterator<Item = (Canon, Value)>,
    ) -> Result<Self, SubstError> {
        let mut s = Substitution::new();
        for (e, v) in entries {
            s.insert(e, v)?;
        }
        Ok(s)
    }

    pub fn standard(&self) -> Standard<'_> {
        Standard(self)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, e: &Canon) -> Option<&Value> {
        self.entries.get(e)
    }

    pub fn contains(&self, e: &Canon) -> bool {
        self.entries.contains_key(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Canon, &Value)> {
        self.entries.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Canon> {
        self.entries.keys()
    }

    /// Inserts or overwrites an entry, validating the value against the
    /// expression's type.
    pub fn insert(&mut self, e: Canon, v: Value) -> Result<Option<Value>, SubstError> {
        check_value(&e, &v)?;
        Ok(self.entries.insert(e, v))
    }

    pub fn with(&self, e: Canon, v: Value) -> Result<Substitution, SubstError> {
        let mut s = self.clone();
        s.insert(e, v)?;
        Ok(s)
    }

    pub fn remove(&mut self, e: &Canon) -> Option<Value> {
        self.entries.remove(e)
    }

    /// Right-biased union.
    pub fn union(&self, other: &Substitution) -> Substitution {
        let mut s = self.clone();
        s.extend(other);
        s
    }

    pub fn extend(&mut self, other: &Substitution) {
        for (e, v) in &other.entries {
            self.entries.insert(e.clone(), v.clone());
        }
    }

    pub fn is_subset_of(&self, other: &Substitution) -> bool {
        self.entries.iter().all(|(e, v)| other.entries.get(e) == Some(v))
    }

    pub fn filter(&self, keep: impl Fn(&Canon, &Value) -> bool) -> Substitution {
        Substitution {
            entries: self
                .entries
                .iter()
                .filter(|(e, v)| keep(e, v))
                .map(|(e, v)| (e.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn below(&self, r: Rank) -> Substitution {
        self.filter(|e, _| e.rank() < r)
    }

    pub fn at_most(&self, r: Rank) -> Substitution {
        self.filter(|e, _| e.rank() <= r)
    }

    pub fn at(&self, r: Rank) -> Substitution {
        self.filter(|e, _| e.rank() == r)
    }

    pub fn above(&self, r: Rank) -> Substitution {
        self.filter(|e, _| e.rank() > r)
    }

    /// `S^{+,form}_{=Ω}`: the entries `(n∈I, ⊤)`.
    pub fn pos_form_omega(&self) -> Substitution {
        self.filter(|e, v| e.is_formula() && *v == Value::Top)
    }

    /// `S^{+,term}_{=Ω}`: the entries `(c_n, ?)`.
    pub fn pos_term_omega(&self) -> Substitution {
        self.filter(|e, v| e.is_term() && e.rank().is_omega() && v.is_unknown())
    }

    /// `S^{-,term}_{=Ω}`: the entries `(c_n, m)` with `m` a numeral.
    pub fn neg_term_omega(&self) -> Substitution {
        self.filter(|e, v| e.is_term() && e.rank().is_omega() && !v.is_unknown())
    }

    /// `S^{-,form}_{=Ω}`: the entries `(n∈I, ?)`.
    pub fn neg_form_omega(&self) -> Substitution {
        self.filter(|e, v| e.is_formula() && v.is_unknown())
    }

    pub fn positive_omega(&self) -> Substitution {
        self.pos_form_omega().union(&self.pos_term_omega())
    }

    pub fn negative_omega(&self) -> Substitution {
        self.neg_form_omega().union(&self.neg_term_omega())
    }

    /// Entries ordered by rank, then by their textual form.
    pub fn sorted_entries(&self) -> Vec<(&Canon, &Value)> {
        let mut v: Vec<_> = self
            .entries
            .iter()
            .map(|(e, val)| ((e.rank(), e.to_string()), (e, val)))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v.into_iter().map(|(_, p)| p).collect()
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (e, v)) in self.sorted_entries().into_iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} := {}", e, v)?;
        }
        write!(f, "}}")
    }
}

/// `|t|_S`.
pub fn reduce_term<A: Assignment + ?Sized>(t: &Term, s: &A) -> Term {
    match t {
        Term::Num(_) | Term::Var(_) => t.clone(),
        Term::Fun(g, args) => {
            let args: Vec<Term> = args.iter().map(|a| reduce_term(a, s)).collect();
            match args.iter().map(Term::as_numeral).collect::<Option<Vec<_>>>() {
                Some(nums) => {
                    let nums: Vec<BigUint> = nums.into_iter().cloned().collect();
                    Term::Num(g.apply(&nums))
                }
                None => Term::Fun(*g, args),
            }
        }
        Term::Skolem(c, args) => {
            let args: Vec<Term> = args.iter().map(|a| reduce_term(a, s)).collect();
            let reduced = Term::Skolem(c.clone(), args);
            match Canon::from_term(&reduced) {
                Some(e) => match s.lookup(&e) {
                    Some(Value::Unknown) => Term::zero(),
                    Some(Value::Num(n)) => Term::Num(n),
                    // A formula value cannot be stored under a term.
                    Some(Value::Top) => unreachable!("term {} mapped to T", e),
                    None => reduced,
                },
                None => reduced,
            }
        }
    }
}

/// `|φ|_S`.
pub fn reduce_formula<A: Assignment + ?Sized>(f: &Formula, s: &A) -> Formula {
    match f {
        Formula::Top | Formula::Bottom => f.clone(),
        Formula::Rel(r, a, b) => Formula::Rel(*r, reduce_term(a, s), reduce_term(b, s)),
        Formula::In(t) => {
            let t = reduce_term(t, s);
            match t.as_numeral() {
                Some(n) => match s.lookup(&Canon::Form(n.clone())) {
                    Some(Value::Top) => Formula::Top,
                    Some(Value::Unknown) => Formula::Bottom,
                    Some(Value::Num(_)) => unreachable!("formula {} mapped to a numeral", n),
                    None => Formula::In(t),
                },
                None => Formula::In(t),
            }
        }
        Formula::Not(g) => Formula::not(reduce_formula(g, s)),
        Formula::And(a, b) => Formula::and(reduce_formula(a, s), reduce_formula(b, s)),
        Formula::Or(a, b) => Formula::or(reduce_formula(a, s), reduce_formula(b, s)),
    }
}

/// Truth value of a quantifier-free arithmetic sentence; `None` if the
/// formula still contains Skolem terms, variables or `∈ I` atoms.
pub fn eval_sentence(f: &Formula) -> Option<bool> {
    match f {
        Formula::Top => Some(true),
        Formula::Bottom => Some(false),
        Formula::Rel(r, a, b) => Some(r.holds(eval_term(a)?.as_ref(), eval_term(b)?.as_ref())),
        Formula::In(_) => None,
        Formula::Not(g) => eval_sentence(g).map(|b| !b),
        Formula::And(a, b) => Some(eval_sentence(a)? & eval_sentence(b)?),
        Formula::Or(a, b) => Some(eval_sentence(a)? | eval_sentence(b)?),
    }
}

fn eval_term(t: &Term) -> Option<std::borrow::Cow<'_, BigUint>> {
    use std::borrow::Cow;
    match t {
        Term::Num(n) => Some(Cow::Borrowed(n)),
        Term::Fun(g, args) => {
            let nums = args
                .iter()
                .map(|a| eval_term(a).map(Cow::into_owned))
                .collect::<Option<Vec<_>>>()?;
            Some(Cow::Owned(g.apply(&nums)))
        }
        Term::Var(_) | Term::Skolem(..) => None,
    }
}

/// `S ⊨ φ`.
pub fn models<A: Assignment + ?Sized>(s: &A, f: &Formula) -> bool {
    eval_sentence(&reduce_formula(f, s)) == Some(true)
}

/// `S` decides `φ`: `S ⊨ φ` or `S ⊨ ¬φ`.
pub fn decides<A: Assignment + ?Sized>(s: &A, f: &Formula) -> bool {
    eval_sentence(&reduce_formula(f, s)).is_some()
}

/// The correctness condition `F(e, u)`.
pub fn correctness_formula(lang: &Language, e: &Canon, u: &Value) -> Result<Formula, SubstError> {
    check_value(e, u)?;
    Ok(match (e, u) {
        (_, Value::Unknown) => Formula::Top,
        (Canon::Term(c, args), Value::Num(m)) => {
            let params: Vec<Term> = args.iter().cloned().map(Term::Num).collect();
            if c.is_inductive_witness() {
                // F(c_n, m) = ¬B(m, n, I); I occurs only negatively.
                Formula::not(lang.clause_at(&Term::Num(m.clone()), &params[0]))
            } else {
                let mut parts = vec![c.instantiate(&Term::Num(m.clone()), &params)];
                let mut v = BigUint::zero();
                while &v < m {
                    parts.push(Formula::not(c.instantiate(&Term::Num(v.clone()), &params)));
                    v += 1u32;
                }
                Formula::and_all(parts)
            }
        }
        (Canon::Form(n), Value::Top) => lang.a_formula(&Term::Num(n.clone())),
        _ => unreachable!("rejected by check_value"),
    })
}

fn entry_formula(lang: &Language, e: &Canon, u: &Value) -> Formula {
    correctness_formula(lang, e, u).expect("substitution entries are type-checked on insertion")
}

/// Every `(e, u) ∈ S` has `S̄ ⊨ F(e, u)`.
pub fn is_correct(lang: &Language, s: &Substitution) -> bool {
    incorrect_entries(lang, s).is_empty()
}

/// The entries whose correctness formula fails under `S̄`.
pub fn incorrect_entries<'a>(lang: &Language, s: &'a Substitution) -> Vec<(&'a Canon, &'a Value)> {
    s.iter()
        .filter(|(e, u)| !models(&s.standard(), &entry_formula(lang, e, u)))
        .collect()
}

/// Computational consistency.
pub fn is_cc(lang: &Language, s: &Substitution) -> bool {
    let refuted = s
        .iter()
        .any(|(e, u)| models(s, &Formula::not(entry_formula(lang, e, u))));
    let clash = s.iter().any(|(e, u)| {
        matches!(u, Value::Num(_))
            && e.witness_point()
                .is_some_and(|n| s.get(&Canon::Form(n.clone())) == Some(&Value::Top))
    });
    !refuted && !clash
}

pub fn is_ci(lang: &Language, s: &Substitution) -> bool {
    !is_cc(lang, s)
}

/// `S` decides `F(e, u)` for every entry.
pub fn is_computing(lang: &Language, s: &Substitution) -> bool {
    s.iter().all(|(e, u)| decides(s, &entry_formula(lang, e, u)))
}
