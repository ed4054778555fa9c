//! The Skolemized language: expressions, Skolem symbols, ranks and the
//! expansion of quantifiers into Skolem terms.

mod canonical;
mod expr;
mod rank;
pub mod source;

use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

pub use canonical::Canon;
pub use expr::{Formula, PaFun, Rel, SkolemSymbol, SymbolKind, Term, Var};
pub use rank::Rank;
use source::{SFormula, STerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("inductive clause may only mention its two variables")]
    ClauseNotClosed,
    #[error("set variable occurs negatively in the inductive clause")]
    ClauseNotPositive,
    #[error("inductive clause must not contain Skolem terms")]
    ClauseHasSkolem,
}

/// The clause `B(y, x, X)` with `A(x, X) = ∀y B(y, x, X)`.
///
/// Variable 0 is the universally bound `y`, variable 1 the point `x`, and
/// every `In` atom refers to the set variable `X`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InductiveClause {
    body: Formula,
}

/// What to plug in for the set variable of the clause.
#[derive(Clone, Copy, Debug)]
pub enum SetArg<'a> {
    /// The inductively defined predicate `I`.
    I,
    /// A formula `φ(z)` with hole variable `var`.
    Pred { var: Var, body: &'a Formula },
}

impl InductiveClause {
    pub fn new(body: Formula) -> Result<Self, LangError> {
        if body.free_vars().iter().any(|v| *v > 1) {
            return Err(LangError::ClauseNotClosed);
        }
        if body.simple_rank() > 0 {
            return Err(LangError::ClauseHasSkolem);
        }
        if !body.in_positive() {
            return Err(LangError::ClauseNotPositive);
        }
        Ok(InductiveClause { body })
    }

    pub fn body(&self) -> &Formula {
        &self.body
    }

    /// `B(bound, point, X)`.
    pub fn instantiate(&self, bound: &Term, point: &Term, set: SetArg) -> Formula {
        let f = self.body.subst_with(&|v| match v {
            0 => Some(bound.clone()),
            1 => Some(point.clone()),
            _ => None,
        });
        match set {
            SetArg::I => f,
            SetArg::Pred { var, body } => f.map_in(&|t| body.subst(var, t)),
        }
    }
}

/// The Skolemized language fixed by an inductive clause.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Language {
    clause: InductiveClause,
    witness: Arc<SkolemSymbol>,
}

impl Language {
    pub fn new(clause: InductiveClause) -> Self {
        let witness = Arc::new(SkolemSymbol::new(
            Formula::not(clause.body.clone()),
            1,
            SymbolKind::InductiveWitness,
        ));
        Language { clause, witness }
    }

    /// Language for problems that never mention `I` (clause `B ≡ ⊥`).
    pub fn pa_only() -> Self {
        Language::new(InductiveClause { body: Formula::Bottom })
    }

    pub fn clause(&self) -> &InductiveClause {
        &self.clause
    }

    /// `c_{∃x ¬B(x,y,I)}`.
    pub fn witness_symbol(&self) -> &Arc<SkolemSymbol> {
        &self.witness
    }

    pub fn witness_term(&self, t: Term) -> Term {
        Term::Skolem(self.witness.clone(), vec![t])
    }

    /// The canonical term `c_n`.
    pub fn witness_canon(&self, n: BigUint) -> Canon {
        Canon::Term(self.witness.clone(), vec![n])
    }

    /// `B(bound, point, I)`.
    pub fn clause_at(&self, bound: &Term, point: &Term) -> Formula {
        self.clause.instantiate(bound, point, SetArg::I)
    }

    /// Skolem symbol for `∃x φ`, together with its argument vector.
    pub fn skolem_symbol(&self, phi: &Formula, x: Var) -> (Arc<SkolemSymbol>, Vec<Term>) {
        if let Formula::Not(inner) = phi {
            if let Some(t) = self.match_clause(inner, x) {
                return (self.witness.clone(), vec![t]);
            }
        }
        let (index, args) = abstract_closed_terms(phi, x);
        if args.len() == 1 && index == *self.witness.index() {
            return (self.witness.clone(), args);
        }
        let sym = SkolemSymbol::new(index, args.len(), SymbolKind::Ordinary);
        (Arc::new(sym), args)
    }

    /// `c_{∃x φ}(t⃗)`.
    pub fn exists_witness(&self, phi: &Formula, x: Var) -> Term {
        let (c, args) = self.skolem_symbol(phi, x);
        Term::Skolem(c, args)
    }

    /// `c_{∃x ¬φ}(t⃗)`, or `c_{∃x ¬B(x,y,I)}(t)` when `φ` is `B(x, t, I)`.
    pub fn forall_witness(&self, phi: &Formula, x: Var) -> Term {
        match self.match_clause(phi, x) {
            Some(t) => self.witness_term(t),
            None => self.exists_witness(&Formula::not(phi.clone()), x),
        }
    }

    /// `∃x φ` as `φ(c_{∃x φ}(t⃗), t⃗)`.
    pub fn exists(&self, phi: &Formula, x: Var) -> Formula {
        phi.subst(x, &self.exists_witness(phi, x))
    }

    /// `∀x φ` as `φ(c_{∃x ¬φ}(t⃗), t⃗)`.
    pub fn forall(&self, phi: &Formula, x: Var) -> Formula {
        phi.subst(x, &self.forall_witness(phi, x))
    }

    /// `A(t, X) = ∀y B(y, t, X)` together with its Skolem witness.
    pub fn inductive_formula(&self, t: &Term, set: SetArg) -> (Formula, Term) {
        let mut used = Vec::new();
        t.free_vars(&mut used);
        if let SetArg::Pred { var, body } = set {
            used.push(var);
            used.extend(body.free_vars());
        }
        let y = used.iter().max().map_or(0, |m| m + 1);
        let body = self.clause.instantiate(&Term::Var(y), t, set);
        let w = self.forall_witness(&body, y);
        (body.subst(y, &w), w)
    }

    /// `A(t, I)`.
    pub fn a_formula(&self, t: &Term) -> Formula {
        self.inductive_formula(t, SetArg::I).0
    }

    /// If `φ` is literally `B(x, t, I)` with `x` not in `t`, returns `t`.
    pub fn match_clause(&self, phi: &Formula, x: Var) -> Option<Term> {
        let mut binding = None;
        if match_formula(&self.clause.body, phi, x, &mut binding) {
            binding
        } else {
            None
        }
    }

    /// Expands every quantifier of a closed source formula, innermost first.
    pub fn expand(&self, f: &SFormula) -> Result<Formula, LangError> {
        Expander::new(self).formula(f)
    }

    pub fn expand_term(&self, t: &STerm) -> Result<Term, LangError> {
        Expander::new(self).term(t)
    }

    /// Expands a formula whose free variables are among `holes`; returns the
    /// variable assigned to each hole.
    pub fn expand_open(
        &self,
        f: &SFormula,
        holes: &[&str],
    ) -> Result<(Formula, Vec<Var>), LangError> {
        let mut ex = Expander::new(self);
        let vars: Vec<Var> = holes.iter().map(|h| ex.bind(h)).collect();
        Ok((ex.formula(f)?, vars))
    }

    /// Expands a single top-level quantifier over an already quantifier-free
    /// body: `∃x φ` when `existential`, `∀x φ` otherwise.
    pub fn expand_quantifier(
        &self,
        existential: bool,
        x: &str,
        body: &SFormula,
    ) -> Result<Formula, LangError> {
        let q = if existential {
            SFormula::exists(x, body.clone())
        } else {
            SFormula::forall(x, body.clone())
        };
        self.expand(&q)
    }
}

/// Replaces the maximal closed subterms of `φ` and its free variables other
/// than `x` by parameters `1..`, in left-to-right first-occurrence order,
/// identical subterms sharing a parameter; `x` becomes variable 0.
pub fn abstract_closed_terms(phi: &Formula, x: Var) -> (Formula, Vec<Term>) {
    struct Abs {
        x: Var,
        params: Vec<Term>,
    }
    impl Abs {
        fn param(&mut self, t: &Term) -> Term {
            let i = match self.params.iter().position(|p| p == t) {
                Some(i) => i,
                None => {
                    self.params.push(t.clone());
                    self.params.len() - 1
                }
            };
            Term::Var(i as Var + 1)
        }

        fn term(&mut self, t: &Term) -> Term {
            match t {
                Term::Var(v) if *v == self.x => Term::Var(0),
                Term::Var(_) => self.param(t),
                _ if t.is_closed() => self.param(t),
                Term::Fun(g, args) => Term::Fun(*g, args.iter().map(|a| self.term(a)).collect()),
                Term::Skolem(c, args) => {
                    Term::Skolem(c.clone(), args.iter().map(|a| self.term(a)).collect())
                }
                Term::Num(_) => unreachable!("numerals are closed"),
            }
        }

        fn formula(&mut self, f: &Formula) -> Formula {
            match f {
                Formula::Top | Formula::Bottom => f.clone(),
                Formula::Rel(r, a, b) => {
                    let a = self.term(a);
                    Formula::Rel(*r, a, self.term(b))
                }
                Formula::In(t) => Formula::In(self.term(t)),
                Formula::Not(g) => Formula::not(self.formula(g)),
                Formula::And(a, b) => {
                    let a = self.formula(a);
                    Formula::and(a, self.formula(b))
                }
                Formula::Or(a, b) => {
                    let a = self.formula(a);
                    Formula::or(a, self.formula(b))
                }
            }
        }
    }
    let mut abs = Abs {
        x,
        params: Vec::new(),
    };
    let index = abs.formula(phi);
    (index, abs.params)
}

fn match_term(tpl: &Term, t: &Term, x: Var, binding: &mut Option<Term>) -> bool {
    match (tpl, t) {
        (Term::Var(0), _) => *t == Term::Var(x),
        (Term::Var(_), _) => {
            if t.mentions_var(x) {
                return false;
            }
            match binding {
                Some(b) => b == t,
                None => {
                    *binding = Some(t.clone());
                    true
                }
            }
        }
        (Term::Fun(PaFun::Succ, a), Term::Num(n)) if *n > BigUint::from(0u32) => {
            match_term(&a[0], &Term::Num(n - 1u32), x, binding)
        }
        (Term::Fun(g, xs), Term::Fun(h, ys)) => {
            g == h && xs.iter().zip(ys).all(|(a, b)| match_term(a, b, x, binding))
        }
        (Term::Num(a), Term::Num(b)) => a == b,
        _ => false,
    }
}

fn match_formula(tpl: &Formula, f: &Formula, x: Var, binding: &mut Option<Term>) -> bool {
    match (tpl, f) {
        (Formula::Top, Formula::Top) | (Formula::Bottom, Formula::Bottom) => true,
        (Formula::Rel(r1, a1, b1), Formula::Rel(r2, a2, b2)) => {
            r1 == r2 && match_term(a1, a2, x, binding) && match_term(b1, b2, x, binding)
        }
        (Formula::In(a), Formula::In(b)) => match_term(a, b, x, binding),
        (Formula::Not(a), Formula::Not(b)) => match_formula(a, b, x, binding),
        (Formula::And(a1, b1), Formula::And(a2, b2)) | (Formula::Or(a1, b1), Formula::Or(a2, b2)) => {
            match_formula(a1, a2, x, binding) && match_formula(b1, b2, x, binding)
        }
        _ => false,
    }
}

struct Expander<'a> {
    lang: &'a Language,
    env: Vec<(String, Var)>,
    next: Var,
}

impl<'a> Expander<'a> {
    fn new(lang: &'a Language) -> Self {
        Expander {
            lang,
            env: Vec::new(),
            next: 0,
        }
    }

    fn bind(&mut self, name: &str) -> Var {
        let v = self.next;
        self.next += 1;
        self.env.push((name.to_string(), v));
        v
    }

    fn term(&mut self, t: &STerm) -> Result<Term, LangError> {
        Ok(match t {
            STerm::Num(n) => Term::Num(n.clone()),
            STerm::Var(name) => {
                let v = self
                    .env
                    .iter()
                    .rev()
                    .find(|(n, _)| n == name)
                    .map(|(_, v)| *v)
                    .ok_or_else(|| LangError::Unbound(name.clone()))?;
                Term::Var(v)
            }
            STerm::Succ(a) => Term::succ(self.term(a)?),
            STerm::Add(a, b) => Term::add(self.term(a)?, self.term(b)?),
            STerm::Mul(a, b) => Term::mul(self.term(a)?, self.term(b)?),
        })
    }

    fn scoped(&mut self, name: &str, f: &SFormula) -> Result<(Var, Formula), LangError> {
        let v = self.bind(name);
        let body = self.formula(f);
        self.env.pop();
        Ok((v, body?))
    }

    fn formula(&mut self, f: &SFormula) -> Result<Formula, LangError> {
        Ok(match f {
            SFormula::True => Formula::Top,
            SFormula::False => Formula::Bottom,
            SFormula::Eq(a, b) => Formula::eq(self.term(a)?, self.term(b)?),
            SFormula::Lt(a, b) => Formula::lt(self.term(a)?, self.term(b)?),
            SFormula::In(t) => Formula::In(self.term(t)?),
            SFormula::Not(g) => Formula::not(self.formula(g)?),
            SFormula::And(fs) => Formula::and_all(self.formulas(fs)?),
            SFormula::Or(fs) => Formula::or_all(self.formulas(fs)?),
            SFormula::Implies(a, b) => Formula::implies(self.formula(a)?, self.formula(b)?),
            SFormula::Exists(x, g) => {
                let (v, body) = self.scoped(x, g)?;
                self.lang.exists(&body, v)
            }
            SFormula::Forall(x, g) => {
                let (v, body) = self.scoped(x, g)?;
                self.lang.forall(&body, v)
            }
            SFormula::Ind(t) => {
                let t = self.term(t)?;
                self.lang.a_formula(&t)
            }
            SFormula::IndOf(t, z, g) => {
                let t = self.term(t)?;
                let (var, body) = self.scoped(z, g)?;
                self.lang
                    .inductive_formula(&t, SetArg::Pred { var, body: &body })
                    .0
            }
        })
    }

    fn formulas(&mut self, fs: &[SFormula]) -> Result<Vec<Formula>, LangError> {
        fs.iter().map(|f| self.formula(f)).collect()
    }
}
