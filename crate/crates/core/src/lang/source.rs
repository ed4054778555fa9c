//! Quantified source formulas with named variables, as written in problem
//! files. Quantifiers are expanded into Skolem terms by
//! [`Language::expand`](super::Language::expand).

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum STerm {
    Num(BigUint),
    Var(String),
    Succ(Box<STerm>),
    Add(Box<STerm>, Box<STerm>),
    Mul(Box<STerm>, Box<STerm>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SFormula {
    True,
    False,
    Eq(STerm, STerm),
    Lt(STerm, STerm),
    In(STerm),
    Not(Box<SFormula>),
    And(Vec<SFormula>),
    Or(Vec<SFormula>),
    Implies(Box<SFormula>, Box<SFormula>),
    Exists(String, Box<SFormula>),
    Forall(String, Box<SFormula>),
    /// `A(t, I)`.
    Ind(STerm),
    /// `A(t, λz. φ)`.
    IndOf(STerm, String, Box<SFormula>),
}

impl STerm {
    pub fn num(n: u64) -> STerm {
        STerm::Num(BigUint::from(n))
    }

    pub fn var(name: &str) -> STerm {
        STerm::Var(name.to_string())
    }

    pub fn succ(t: STerm) -> STerm {
        match t {
            STerm::Num(n) => STerm::Num(n + BigUint::one()),
            t => STerm::Succ(Box::new(t)),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            STerm::Num(_) => true,
            STerm::Var(_) => false,
            STerm::Succ(a) => a.is_closed(),
            STerm::Add(a, b) | STerm::Mul(a, b) => a.is_closed() && b.is_closed(),
        }
    }

    fn free_vars(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match self {
            STerm::Num(_) => {}
            STerm::Var(v) => {
                if !bound.contains(v) && !out.contains(v) {
                    out.push(v.clone())
                }
            }
            STerm::Succ(a) => a.free_vars(bound, out),
            STerm::Add(a, b) | STerm::Mul(a, b) => {
                a.free_vars(bound, out);
                b.free_vars(bound, out);
            }
        }
    }

    /// Capture is impossible for terms; `by` is inserted verbatim.
    pub fn subst(&self, x: &str, by: &STerm) -> STerm {
        match self {
            STerm::Num(_) => self.clone(),
            STerm::Var(v) if v == x => by.clone(),
            STerm::Var(_) => self.clone(),
            STerm::Succ(a) => STerm::succ(a.subst(x, by)),
            STerm::Add(a, b) => STerm::Add(Box::new(a.subst(x, by)), Box::new(b.subst(x, by))),
            STerm::Mul(a, b) => STerm::Mul(Box::new(a.subst(x, by)), Box::new(b.subst(x, by))),
        }
    }
}

impl SFormula {
    pub fn not(f: SFormula) -> SFormula {
        SFormula::Not(Box::new(f))
    }

    pub fn implies(a: SFormula, b: SFormula) -> SFormula {
        SFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(x: &str, f: SFormula) -> SFormula {
        SFormula::Exists(x.to_string(), Box::new(f))
    }

    pub fn forall(x: &str, f: SFormula) -> SFormula {
        SFormula::Forall(x.to_string(), Box::new(f))
    }

    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match self {
            SFormula::True | SFormula::False => {}
            SFormula::Eq(a, b) | SFormula::Lt(a, b) => {
                a.free_vars(bound, out);
                b.free_vars(bound, out);
            }
            SFormula::In(t) | SFormula::Ind(t) => t.free_vars(bound, out),
            SFormula::Not(f) => f.collect_free(bound, out),
            SFormula::And(fs) | SFormula::Or(fs) => {
                fs.iter().for_each(|f| f.collect_free(bound, out))
            }
            SFormula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            SFormula::Exists(x, f) | SFormula::Forall(x, f) => {
                bound.push(x.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
            SFormula::IndOf(t, z, f) => {
                t.free_vars(bound, out);
                bound.push(z.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Substitutes free occurrences of `x`. The caller guarantees that the
    /// free variables of `by` are not captured by binders of `self`.
    pub fn subst(&self, x: &str, by: &STerm) -> SFormula {
        let s = |t: &STerm| t.subst(x, by);
        match self {
            SFormula::True | SFormula::False => self.clone(),
            SFormula::Eq(a, b) => SFormula::Eq(s(a), s(b)),
            SFormula::Lt(a, b) => SFormula::Lt(s(a), s(b)),
            SFormula::In(t) => SFormula::In(s(t)),
            SFormula::Ind(t) => SFormula::Ind(s(t)),
            SFormula::Not(f) => SFormula::not(f.subst(x, by)),
            SFormula::And(fs) => SFormula::And(fs.iter().map(|f| f.subst(x, by)).collect()),
            SFormula::Or(fs) => SFormula::Or(fs.iter().map(|f| f.subst(x, by)).collect()),
            SFormula::Implies(a, b) => SFormula::implies(a.subst(x, by), b.subst(x, by)),
            SFormula::Exists(y, _) | SFormula::Forall(y, _) if y == x => self.clone(),
            SFormula::Exists(y, f) => SFormula::Exists(y.clone(), Box::new(f.subst(x, by))),
            SFormula::Forall(y, f) => SFormula::Forall(y.clone(), Box::new(f.subst(x, by))),
            SFormula::IndOf(t, z, f) if z == x => SFormula::IndOf(s(t), z.clone(), f.clone()),
            SFormula::IndOf(t, z, f) => {
                SFormula::IndOf(s(t), z.clone(), Box::new(f.subst(x, by)))
            }
        }
    }
}

/// First-order matching of `pattern` against `target`, where free
/// occurrences of `x` in `pattern` may stand for any term (consistently).
///
/// Returns `None` when the two do not match, `Some(None)` when they match
/// without `x` being constrained, and `Some(Some(t))` with the instance.
pub fn match_instance(pattern: &SFormula, x: &str, target: &SFormula) -> Option<Option<STerm>> {
    let mut m = Matcher {
        x,
        binding: None,
        shadowed: 0,
    };
    m.formula(pattern, target).then_some(m.binding)
}

struct Matcher<'a> {
    x: &'a str,
    binding: Option<STerm>,
    shadowed: usize,
}

impl Matcher<'_> {
    fn bind(&mut self, t: &STerm) -> bool {
        match &self.binding {
            Some(b) => b == t,
            None => {
                self.binding = Some(t.clone());
                true
            }
        }
    }

    fn term(&mut self, p: &STerm, t: &STerm) -> bool {
        match (p, t) {
            (STerm::Var(v), _) if v == self.x && self.shadowed == 0 => self.bind(t),
            (STerm::Succ(a), STerm::Num(n)) if !n.is_zero() => {
                self.term(a, &STerm::Num(n - BigUint::one()))
            }
            (STerm::Succ(a), STerm::Succ(b)) => self.term(a, b),
            (STerm::Add(a1, b1), STerm::Add(a2, b2)) | (STerm::Mul(a1, b1), STerm::Mul(a2, b2)) => {
                self.term(a1, a2) && self.term(b1, b2)
            }
            (STerm::Num(a), STerm::Num(b)) => a == b,
            (STerm::Var(a), STerm::Var(b)) => a == b,
            _ => false,
        }
    }

    fn under(&mut self, binder: &str, p: &SFormula, t: &SFormula) -> bool {
        let shadow = binder == self.x;
        if shadow {
            self.shadowed += 1;
        }
        let ok = self.formula(p, t);
        if shadow {
            self.shadowed -= 1;
        }
        ok
    }

    fn formula(&mut self, p: &SFormula, t: &SFormula) -> bool {
        use SFormula as F;
        match (p, t) {
            (F::True, F::True) | (F::False, F::False) => true,
            (F::Eq(a1, b1), F::Eq(a2, b2)) | (F::Lt(a1, b1), F::Lt(a2, b2)) => {
                self.term(a1, a2) && self.term(b1, b2)
            }
            (F::In(a), F::In(b)) | (F::Ind(a), F::Ind(b)) => self.term(a, b),
            (F::Not(a), F::Not(b)) => self.formula(a, b),
            (F::And(xs), F::And(ys)) | (F::Or(xs), F::Or(ys)) => {
                xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| self.formula(a, b))
            }
            (F::Implies(a1, b1), F::Implies(a2, b2)) => self.formula(a1, a2) && self.formula(b1, b2),
            (F::Exists(x1, a), F::Exists(x2, b)) | (F::Forall(x1, a), F::Forall(x2, b)) => {
                x1 == x2 && self.under(x1, a, b)
            }
            (F::IndOf(t1, z1, a), F::IndOf(t2, z2, b)) => {
                z1 == z2 && self.term(t1, t2) && self.under(z1, a, b)
            }
            _ => false,
        }
    }
}

impl fmt::Display for STerm {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            STerm::Num(n) => write!(f, "{}", n),
            STerm::Var(v) => write!(f, "{}", v),
            STerm::Succ(a) => write!(f, "(s {})", a),
            STerm::Add(a, b) => write!(f, "(+ {} {})", a, b),
            STerm::Mul(a, b) => write!(f, "(* {} {})", a, b),
        }
    }
}

impl fmt::Display for SFormula {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let list = |f: &mut fmt::Formatter, head: &str, items: &[SFormula]| -> fmt::Result {
            write!(f, "({}", head)?;
            for i in items {
                write!(f, " {}", i)?;
            }
            write!(f, ")")
        };
        match self {
            SFormula::True => write!(f, "true"),
            SFormula::False => write!(f, "false"),
            SFormula::Eq(a, b) => write!(f, "(= {} {})", a, b),
            SFormula::Lt(a, b) => write!(f, "(< {} {})", a, b),
            SFormula::In(t) => write!(f, "(in {})", t),
            SFormula::Not(a) => write!(f, "(not {})", a),
            SFormula::And(xs) => list(f, "and", xs),
            SFormula::Or(xs) => list(f, "or", xs),
            SFormula::Implies(a, b) => write!(f, "(-> {} {})", a, b),
            SFormula::Exists(x, a) => write!(f, "(exists {} {})", x, a),
            SFormula::Forall(x, a) => write!(f, "(forall {} {})", x, a),
            SFormula::Ind(t) => write!(f, "(A {})", t),
            SFormula::IndOf(t, z, a) => write!(f, "(A {} {} {})", t, z, a),
        }
    }
}
