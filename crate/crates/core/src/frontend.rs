//! Problem files.
//!
//! A problem is a sequence of s-expressions; `;` starts a comment.
//!
//! ```text
//! (clause (y x) (or (not (< y x)) (in y)))   ; B(y, x, X); (in t) is t ∈ X
//! (option max-steps 5000)
//! (crit inddef 0)                            ; A(0, I) → 0 ∈ I
//! (crit eps 1 x (= x (s 0)))                 ; φ(1) → ∃x φ(x)
//! (crit (-> (not (= 2 0)) (exists x (= 2 (s x)))))
//! (goal (exists x (= x (s 0))) 1)
//! ```
//!
//! Every critical formula, whether written out or given through one of the
//! shorthands `pred`, `eps`, `ind`, `inddef`, `closure`, is checked against
//! the five axiom schemas before it is Skolemized.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::hproc::CriticalFormula;
use crate::lang::source::{match_instance, SFormula, STerm};
use crate::lang::{Formula, InductiveClause, LangError, Language, Var};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Loc {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ErrorKind {
    #[error("unexpected end of input")]
    Eof,
    #[error("unbalanced ')'")]
    Unbalanced,
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("unknown form `{0}`")]
    UnknownForm(String),
    #[error("unknown option `{0}`")]
    UnknownOption(String),
    #[error("`{0}` is reserved")]
    Reserved(String),
    #[error("a second clause declaration")]
    DuplicateClause,
    #[error("`{0}` needs an inductive clause declaration")]
    NeedsClause(&'static str),
    #[error("clause must be declared before it is used")]
    LateClause,
    #[error("critical formula is not closed (free: {0})")]
    NotClosed(String),
    #[error("not a critical formula: {0}")]
    NotCritical(String),
    #[error("goal must have the form (exists x φ) with φ otherwise closed")]
    BadGoal,
    #[error(transparent)]
    Lang(#[from] LangError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{loc}: {kind}")]
pub struct ParseError {
    pub loc: Loc,
    pub kind: ErrorKind,
}

fn err<T>(loc: Loc, kind: ErrorKind) -> Result<T, ParseError> {
    Err(ParseError { loc, kind })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Sexp {
    Atom(String, Loc),
    List(Vec<Sexp>, Loc),
}

impl Sexp {
    fn loc(&self) -> Loc {
        match self {
            Sexp::Atom(_, l) | Sexp::List(_, l) => *l,
        }
    }

    fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a, _) => Some(a),
            Sexp::List(..) => None,
        }
    }
}

fn read_all(text: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut stack: Vec<(Vec<Sexp>, Loc)> = Vec::new();
    let mut top = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&ch) = chars.peek() {
        let loc = Loc { line, col };
        match ch {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
                continue;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
                continue;
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                stack.push((Vec::new(), loc));
            }
            ')' => {
                chars.next();
                let (items, at) = match stack.pop() {
                    Some(frame) => frame,
                    None => return err(loc, ErrorKind::Unbalanced),
                };
                let node = Sexp::List(items, at);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => top.push(node),
                }
            }
            _ => {
                let mut atom = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    atom.push(c);
                    chars.next();
                    col += 1;
                }
                let node = Sexp::Atom(atom, loc);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => top.push(node),
                }
                continue;
            }
        }
        col += 1;
    }
    if let Some((_, loc)) = stack.pop() {
        return err(loc, ErrorKind::Eof);
    }
    Ok(top)
}

const RESERVED: &[&str] = &[
    "s", "+", "*", "=", "<", "in", "not", "and", "or", "->", "exists", "forall", "A", "true", "false",
];

/// Which occurrences of `in` and `A` are allowed.
#[derive(Clone, Copy)]
struct Ctx {
    has_clause: bool,
}

fn term(e: &Sexp) -> Result<STerm, ParseError> {
    match e {
        Sexp::Atom(a, loc) => {
            if let Ok(n) = a.parse::<BigUint>() {
                Ok(STerm::Num(n))
            } else if RESERVED.contains(&a.as_str()) {
                err(*loc, ErrorKind::Reserved(a.clone()))
            } else {
                Ok(STerm::Var(a.clone()))
            }
        }
        Sexp::List(items, loc) => {
            let head = items.first().and_then(Sexp::atom);
            match (head, items.len()) {
                (Some("s"), 2) => Ok(STerm::succ(term(&items[1])?)),
                (Some("+"), 3) => Ok(STerm::Add(Box::new(term(&items[1])?), Box::new(term(&items[2])?))),
                (Some("*"), 3) => Ok(STerm::Mul(Box::new(term(&items[1])?), Box::new(term(&items[2])?))),
                _ => err(*loc, ErrorKind::Expected("a term")),
            }
        }
    }
}

fn var_name(e: &Sexp) -> Result<String, ParseError> {
    match term(e)? {
        STerm::Var(v) => Ok(v),
        _ => err(e.loc(), ErrorKind::Expected("a variable")),
    }
}

fn formula(e: &Sexp, ctx: Ctx) -> Result<SFormula, ParseError> {
    let (items, loc) = match e {
        Sexp::Atom(a, loc) => {
            return match a.as_str() {
                "true" => Ok(SFormula::True),
                "false" => Ok(SFormula::False),
                _ => err(*loc, ErrorKind::Expected("a formula")),
            }
        }
        Sexp::List(items, loc) => (items, *loc),
    };
    let head = items.first().and_then(Sexp::atom).unwrap_or("");
    let args = &items[1.min(items.len())..];
    let f = |i: usize| formula(&args[i], ctx);
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            err(loc, ErrorKind::Expected("a different number of arguments"))
        }
    };
    match head {
        "=" | "<" => {
            arity(2)?;
            let (a, b) = (term(&args[0])?, term(&args[1])?);
            Ok(if head == "=" { SFormula::Eq(a, b) } else { SFormula::Lt(a, b) })
        }
        "in" => {
            arity(1)?;
            if !ctx.has_clause {
                return err(loc, ErrorKind::NeedsClause("in"));
            }
            Ok(SFormula::In(term(&args[0])?))
        }
        "not" => {
            arity(1)?;
            Ok(SFormula::not(f(0)?))
        }
        "and" | "or" => {
            let fs = (0..args.len()).map(f).collect::<Result<Vec<_>, _>>()?;
            Ok(if head == "and" { SFormula::And(fs) } else { SFormula::Or(fs) })
        }
        "->" => {
            arity(2)?;
            Ok(SFormula::implies(f(0)?, f(1)?))
        }
        "exists" | "forall" => {
            arity(2)?;
            let x = var_name(&args[0])?;
            let body = f(1)?;
            Ok(if head == "exists" { SFormula::exists(&x, body) } else { SFormula::forall(&x, body) })
        }
        "A" => {
            if !ctx.has_clause {
                return err(loc, ErrorKind::NeedsClause("A"));
            }
            match args.len() {
                1 => Ok(SFormula::Ind(term(&args[0])?)),
                3 => Ok(SFormula::IndOf(term(&args[0])?, var_name(&args[1])?, Box::new(f(2)?))),
                _ => err(loc, ErrorKind::Expected("(A t) or (A t z φ)")),
            }
        }
        _ => err(loc, ErrorKind::Expected("a formula")),
    }
}

/// A goal `∃x φ`, optionally with a candidate witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Goal {
    pub source: SFormula,
    pub candidate: Option<STerm>,
    /// `φ` expanded with `x` free as `var`.
    pub phi: Formula,
    pub var: Var,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub lang: Language,
    /// `(bound name, point name, body)` as written.
    pub clause: Option<(String, String, SFormula)>,
    /// Explicit critical formulas first, then those generated by goals.
    pub critical: Vec<CriticalFormula>,
    pub goals: Vec<Goal>,
    pub options: BTreeMap<String, String>,
}

impl Problem {
    pub fn max_steps(&self) -> Option<u64> {
        self.options.get("max-steps").and_then(|s| s.parse().ok())
    }

    /// Number of critical formulas written in the file.
    pub fn explicit_count(&self) -> usize {
        self.critical.len() - self.goals.iter().filter(|g| g.candidate.is_some()).count()
    }

    /// Problem-file text that parses back to an equal problem.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        if let Some((y, x, body)) = &self.clause {
            out.push_str(&format!("(clause ({} {}) {})\n", y, x, body));
        }
        for (k, v) in &self.options {
            out.push_str(&format!("(option {} {})\n", k, v));
        }
        for c in &self.critical[..self.explicit_count()] {
            let src = c.source.as_ref().expect("parsed critical formulas keep their source");
            out.push_str(&format!("(crit {})\n", src));
        }
        for g in &self.goals {
            match &g.candidate {
                Some(t) => out.push_str(&format!("(goal {} {})\n", g.source, t)),
                None => out.push_str(&format!("(goal {})\n", g.source)),
            }
        }
        out
    }
}

pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let forms = read_all(text)?;
    let mut lang = Language::pa_only();
    let mut clause = None;
    let mut options = BTreeMap::new();
    let mut critical = Vec::new();
    let mut goals: Vec<(Goal, Loc)> = Vec::new();
    let mut used_lang = false;

    for form in &forms {
        let Sexp::List(items, loc) = form else {
            return err(form.loc(), ErrorKind::Expected("a top-level form"));
        };
        let loc = *loc;
        let head = items.first().and_then(Sexp::atom).unwrap_or("");
        let args = &items[1.min(items.len())..];
        let ctx = Ctx { has_clause: clause.is_some() };
        match head {
            "clause" => {
                if clause.is_some() {
                    return err(loc, ErrorKind::DuplicateClause);
                }
                if used_lang {
                    return err(loc, ErrorKind::LateClause);
                }
                let (y, x, body) = match args {
                    [Sexp::List(vars, _), body] if vars.len() == 2 => {
                        (var_name(&vars[0])?, var_name(&vars[1])?, formula(body, Ctx { has_clause: true })?)
                    }
                    _ => return err(loc, ErrorKind::Expected("(clause (y x) B)")),
                };
                let (b, _) = lang
                    .expand_open(&body, &[&y, &x])
                    .map_err(|e| ParseError { loc, kind: e.into() })?;
                let c = InductiveClause::new(b).map_err(|e| ParseError { loc, kind: e.into() })?;
                lang = Language::new(c);
                clause = Some((y, x, body));
            }
            "option" => match args {
                [Sexp::Atom(k, kl), Sexp::Atom(v, vl)] => {
                    if k != "max-steps" {
                        return err(*kl, ErrorKind::UnknownOption(k.clone()));
                    }
                    if v.parse::<u64>().is_err() {
                        return err(*vl, ErrorKind::Expected("a step count"));
                    }
                    options.insert(k.clone(), v.clone());
                }
                _ => return err(loc, ErrorKind::Expected("(option NAME VALUE)")),
            },
            "crit" => {
                used_lang = true;
                let src = crit_source(args, loc, ctx)?;
                critical.push(shape_check(&lang, &src).map_err(|kind| ParseError { loc, kind })?);
            }
            "goal" => {
                used_lang = true;
                let (g, candidate) = match args {
                    [g] => (formula(g, ctx)?, None),
                    [g, t] => (formula(g, ctx)?, Some(term(t)?)),
                    _ => return err(loc, ErrorKind::Expected("(goal (exists x φ) [t])")),
                };
                let goal = make_goal(&lang, g, candidate).map_err(|kind| ParseError { loc, kind })?;
                goals.push((goal, loc));
            }
            other => return err(loc, ErrorKind::UnknownForm(other.to_string())),
        }
    }

    for (g, loc) in &goals {
        if let Some(t) = &g.candidate {
            let t = lang.expand_term(t).map_err(|e| ParseError { loc: *loc, kind: e.into() })?;
            let SFormula::Exists(x, body) = &g.source else { unreachable!() };
            let inst = SFormula::implies(body.subst(x, g.candidate.as_ref().unwrap()), g.source.clone());
            critical.push(CriticalFormula::epsilon(&lang, &g.phi, g.var, t).with_source(inst));
        }
    }
    Ok(Problem {
        lang,
        clause,
        critical,
        goals: goals.into_iter().map(|(g, _)| g).collect(),
        options,
    })
}

fn closed_term(t: STerm, loc: Loc) -> Result<STerm, ParseError> {
    if t.is_closed() {
        Ok(t)
    } else {
        err(loc, ErrorKind::NotClosed(t.to_string()))
    }
}

/// The quantified source formula named by a `crit` form.
fn crit_source(args: &[Sexp], loc: Loc, ctx: Ctx) -> Result<SFormula, ParseError> {
    let kw = args.first().and_then(Sexp::atom).unwrap_or("");
    let t = |i: usize| closed_term(term(&args[i])?, args[i].loc());
    match (kw, args.len()) {
        ("pred", 2) => {
            let s = t(1)?;
            Ok(SFormula::implies(
                SFormula::not(SFormula::Eq(s.clone(), STerm::num(0))),
                SFormula::exists("x", SFormula::Eq(s, STerm::succ(STerm::var("x")))),
            ))
        }
        ("eps", 4) => {
            let (tt, x, q) = (t(1)?, var_name(&args[2])?, formula(&args[3], ctx)?);
            Ok(SFormula::implies(q.subst(&x, &tt), SFormula::exists(&x, q)))
        }
        ("ind", 4) => {
            let (tt, x, q) = (t(1)?, var_name(&args[2])?, formula(&args[3], ctx)?);
            let step = SFormula::And(vec![
                q.clone(),
                SFormula::not(q.subst(&x, &STerm::succ(STerm::var(&x)))),
            ]);
            Ok(SFormula::implies(
                SFormula::And(vec![q.subst(&x, &STerm::num(0)), SFormula::not(q.subst(&x, &tt))]),
                SFormula::exists(&x, step),
            ))
        }
        ("inddef", 2) => {
            if !ctx.has_clause {
                return err(loc, ErrorKind::NeedsClause("inddef"));
            }
            let tt = t(1)?;
            Ok(SFormula::implies(SFormula::Ind(tt.clone()), SFormula::In(tt)))
        }
        ("closure", 3) => {
            if !ctx.has_clause {
                return err(loc, ErrorKind::NeedsClause("closure"));
            }
            let (z, q) = (var_name(&args[1])?, formula(&args[2], ctx)?);
            let zt = STerm::var(&z);
            Ok(SFormula::implies(
                SFormula::forall(
                    &z,
                    SFormula::implies(SFormula::IndOf(zt.clone(), z.clone(), Box::new(q.clone())), q.clone()),
                ),
                SFormula::forall(&z, SFormula::implies(SFormula::In(zt), q)),
            ))
        }
        (_, 1) => formula(&args[0], ctx),
        _ => err(loc, ErrorKind::Expected("a critical formula")),
    }
}

fn make_goal(lang: &Language, g: SFormula, candidate: Option<STerm>) -> Result<Goal, ErrorKind> {
    let SFormula::Exists(x, body) = &g else {
        return Err(ErrorKind::BadGoal);
    };
    if !g.free_vars().is_empty() {
        return Err(ErrorKind::BadGoal);
    }
    if let Some(t) = &candidate {
        if !t.is_closed() {
            return Err(ErrorKind::NotClosed(t.to_string()));
        }
    }
    let (phi, vars) = lang.expand_open(body, &[x])?;
    Ok(Goal { phi, var: vars[0], source: g.clone(), candidate })
}

fn same_hole(a: &SFormula, x: &str, b: &SFormula, y: &str) -> bool {
    a.subst(x, &STerm::var(y)) == *b
}

/// Recognises one of the five axiom schemas in a closed source formula and
/// Skolemizes it.
pub fn shape_check(lang: &Language, src: &SFormula) -> Result<CriticalFormula, ErrorKind> {
    let free = src.free_vars();
    if !free.is_empty() {
        return Err(ErrorKind::NotClosed(free.join(" ")));
    }
    let not_critical = || ErrorKind::NotCritical(src.to_string());
    let SFormula::Implies(ante, cons) = src else {
        return Err(not_critical());
    };
    let open = |body: &SFormula, x: &str| -> Result<(Formula, Var), ErrorKind> {
        let (f, vars) = lang.expand_open(body, &[x])?;
        Ok((f, vars[0]))
    };
    let cf = if let Some(s) = match_pred(ante, cons) {
        CriticalFormula::pred(lang, lang.expand_term(&s)?)
    } else if let (SFormula::Ind(t), SFormula::In(u)) = (&**ante, &**cons) {
        if t != u {
            return Err(not_critical());
        }
        CriticalFormula::inductive_def(lang, lang.expand_term(t)?)
    } else if let Some((z, q)) = match_closure(ante, cons) {
        let (phi, x) = open(q, z)?;
        CriticalFormula::closure(lang, &phi, x)
    } else if let Some((x, q, t)) = match_induction(ante, cons) {
        let (phi, v) = open(q, x)?;
        CriticalFormula::induction(lang, &phi, v, lang.expand_term(&t)?)
    } else if let SFormula::Exists(x, q) = &**cons {
        let t = match match_instance(q, x, ante) {
            Some(t) => t.unwrap_or(STerm::num(0)),
            None => return Err(not_critical()),
        };
        let (phi, v) = open(q, x)?;
        CriticalFormula::epsilon(lang, &phi, v, lang.expand_term(&t)?)
    } else {
        return Err(not_critical());
    };
    Ok(cf.with_source(src.clone()))
}

/// `¬s=0 → ∃x s=Sx`.
fn match_pred(ante: &SFormula, cons: &SFormula) -> Option<STerm> {
    let SFormula::Not(inner) = ante else { return None };
    let SFormula::Eq(s, zero) = &**inner else { return None };
    let SFormula::Exists(x, body) = cons else { return None };
    let SFormula::Eq(s2, sx) = &**body else { return None };
    let ok = *zero == STerm::num(0)
        && s == s2
        && s.is_closed()
        && *sx == STerm::Succ(Box::new(STerm::var(x)));
    ok.then(|| s.clone())
}

/// `∀x (A(x, λz.φ) → φ(x)) → ∀x' (x'∈I → φ(x'))`.
fn match_closure<'a>(ante: &'a SFormula, cons: &'a SFormula) -> Option<(&'a str, &'a SFormula)> {
    let SFormula::Forall(x, a_body) = ante else { return None };
    let SFormula::Implies(ind, phi_x) = &**a_body else { return None };
    let SFormula::IndOf(t, z, q) = &**ind else { return None };
    let SFormula::Forall(x2, c_body) = cons else { return None };
    let SFormula::Implies(mem, phi_x2) = &**c_body else { return None };
    let SFormula::In(u) = &**mem else { return None };
    let ok = *t == STerm::var(x)
        && *u == STerm::var(x2)
        && same_hole(q, z, phi_x, x)
        && same_hole(q, z, phi_x2, x2);
    ok.then_some((z.as_str(), &**q))
}

/// `φ(0) ∧ ¬φ(t) → ∃x (φ(x) ∧ ¬φ(Sx))`.
fn match_induction<'a>(ante: &'a SFormula, cons: &'a SFormula) -> Option<(&'a str, &'a SFormula, STerm)> {
    let SFormula::And(pre) = ante else { return None };
    let [phi0, SFormula::Not(phit)] = pre.as_slice() else { return None };
    let SFormula::Exists(x, body) = cons else { return None };
    let SFormula::And(post) = &**body else { return None };
    let [q, SFormula::Not(qs)] = post.as_slice() else { return None };
    if q.subst(x, &STerm::succ(STerm::var(x))) != **qs {
        return None;
    }
    match match_instance(q, x, phi0)? {
        Some(z) if z != STerm::num(0) => return None,
        _ => {}
    }
    let t = match_instance(q, x, phit)?.unwrap_or(STerm::num(0));
    Some((x.as_str(), q, t))
}
