//! Deterministic problem corpus and reference evaluators shared by the
//! acceptance tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use epsilon_core::frontend::{parse_problem, Problem};
use epsilon_core::lang::source::{SFormula, STerm};
use epsilon_core::lang::{Canon, Formula, PaFun, Rel, Term};
use epsilon_core::subst::{Substitution, Value};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Peano arithmetic only.
    Pa,
    /// `I = ℕ`.
    Nat,
    /// `I` = the even numbers.
    Even,
    /// `I = {0, ..., 5}`.
    Below6,
}

impl Family {
    pub fn clause(self) -> Option<&'static str> {
        match self {
            Family::Pa => None,
            Family::Nat => Some("(or (not (< y x)) (in y))"),
            Family::Even => Some("(or (= x 0) (and (not (= x 1)) (or (not (= x (+ y 2))) (in y))))"),
            Family::Below6 => Some("(and (< x 6) (or (not (< y x)) (in y)))"),
        }
    }

    /// The least fixed point of the clause.
    pub fn member(self, n: u64) -> bool {
        match self {
            Family::Pa => false,
            Family::Nat => true,
            Family::Even => n % 2 == 0,
            Family::Below6 => n < 6,
        }
    }
}

pub struct Case {
    pub name: String,
    pub family: Family,
    pub text: String,
    pub problem: Problem,
}

pub const CORPUS_SEED: u64 = 0x1d1_5eed;

/// At least 200 problems, a quarter PA-only and the rest over three clauses.
pub fn corpus() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let plan = [(Family::Pa, 70), (Family::Nat, 60), (Family::Even, 55), (Family::Below6, 55)];
    let mut out = Vec::new();
    for (family, count) in plan {
        for i in 0..count {
            let text = problem_text(&mut rng, family);
            let problem = parse_problem(&text)
                .unwrap_or_else(|e| panic!("generated problem does not parse: {}\n{}", e, text));
            out.push(Case { name: format!("{:?}-{:03}", family, i), family, text, problem });
        }
    }
    out
}

fn num(rng: &mut ChaCha8Rng, hi: u64) -> STerm {
    STerm::num(rng.gen_range(0..=hi))
}

/// A PA term over `vars` whose value stays small.
fn term(rng: &mut ChaCha8Rng, vars: &[&str], depth: u32) -> STerm {
    let leaf = |rng: &mut ChaCha8Rng| {
        if !vars.is_empty() && rng.gen_bool(0.6) {
            STerm::var(vars.choose(rng).unwrap())
        } else {
            num(rng, 5)
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..6) {
        0 => STerm::Succ(Box::new(term(rng, vars, depth - 1))),
        1 => STerm::Add(Box::new(term(rng, vars, depth - 1)), Box::new(leaf(rng))),
        2 => STerm::Mul(Box::new(leaf(rng)), Box::new(num(rng, 2))),
        _ => leaf(rng),
    }
}

fn atom(rng: &mut ChaCha8Rng, vars: &[&str]) -> SFormula {
    let (a, b) = (term(rng, vars, 1), term(rng, vars, 1));
    if rng.gen_bool(0.5) {
        SFormula::Eq(a, b)
    } else {
        SFormula::Lt(a, b)
    }
}

/// A quantifier-free PA formula over `vars`.
pub fn qf(rng: &mut ChaCha8Rng, vars: &[&str], depth: u32) -> SFormula {
    if depth == 0 {
        return atom(rng, vars);
    }
    match rng.gen_range(0..5) {
        0 => SFormula::not(qf(rng, vars, depth - 1)),
        1 => SFormula::And(vec![qf(rng, vars, depth - 1), qf(rng, vars, depth - 1)]),
        2 => SFormula::Or(vec![qf(rng, vars, depth - 1), qf(rng, vars, depth - 1)]),
        _ => atom(rng, vars),
    }
}

/// A formula in `x` that mentions `x`, optionally with one inner quantifier.
fn formula_in(rng: &mut ChaCha8Rng, x: &str, quantified: bool) -> SFormula {
    loop {
        let f = if quantified && rng.gen_bool(0.3) {
            let inner = qf(rng, &[x, "w"], 1);
            if rng.gen_bool(0.5) {
                SFormula::exists("w", SFormula::And(vec![SFormula::Lt(STerm::var("w"), STerm::num(4)), inner]))
            } else {
                SFormula::forall("w", SFormula::implies(SFormula::Lt(STerm::var("w"), STerm::var(x)), inner))
            }
        } else {
            qf(rng, &[x], 2)
        };
        if f.free_vars() == vec![x.to_string()] {
            return f;
        }
    }
}

/// A Σ₁ goal `∃x φ` with φ quantifier-free and a true candidate instance.
fn goal(rng: &mut ChaCha8Rng) -> String {
    loop {
        let phi = formula_in(rng, "x", false);
        let hits: Vec<u64> = (0..=8).filter(|&n| eval_source(&phi.subst("x", &STerm::num(n)))).collect();
        if let Some(&n) = hits.choose(rng) {
            let cand = if n > 0 && rng.gen_bool(0.3) {
                let k = rng.gen_range(0..n);
                STerm::Add(Box::new(STerm::num(k)), Box::new(STerm::num(n - k)))
            } else {
                STerm::num(n)
            };
            return format!("(goal {} {})", SFormula::exists("x", phi), cand);
        }
    }
}

/// An induction formula whose premise `φ(0) ∧ ¬φ(t)` is usually true.
fn induction(rng: &mut ChaCha8Rng) -> String {
    for _ in 0..20 {
        let phi = formula_in(rng, "x", false);
        let at = |n: u64| eval_source(&phi.subst("x", &STerm::num(n)));
        if !at(0) {
            continue;
        }
        if let Some(t) = (1..=8).filter(|&n| !at(n)).last() {
            return format!("(crit ind {} x {})", t, phi);
        }
    }
    format!("(crit ind {} x {})", num(rng, 8), formula_in(rng, "x", true))
}

/// φ(z) with φ(0) true and φ failing somewhere in 1..=7, when one is found
/// quickly; otherwise the antecedent of the closure axiom is rarely true.
fn closure_formula(rng: &mut ChaCha8Rng) -> SFormula {
    let mut phi = formula_in(rng, "z", false);
    for _ in 0..20 {
        let at = |n: u64| eval_source(&phi.subst("z", &STerm::num(n)));
        if at(0) && (1..=7).any(|n| !at(n)) {
            break;
        }
        phi = formula_in(rng, "z", false);
    }
    phi
}

/// The clause body with `y`, `x` and `X` instantiated.
fn clause_at(family: Family, y: &STerm, x: &STerm, set: &dyn Fn(&STerm) -> SFormula) -> SFormula {
    let src = format!("(clause (y x) {})", family.clause().unwrap());
    let p = parse_problem(&src).unwrap();
    let (_, _, body) = p.clause.unwrap();
    replace_in(&body.subst("y", &STerm::var("__y")).subst("x", x).subst("__y", y), set)
}

fn replace_in(f: &SFormula, set: &dyn Fn(&STerm) -> SFormula) -> SFormula {
    let go = |g: &SFormula| replace_in(g, set);
    match f {
        SFormula::In(t) => set(t),
        SFormula::Not(g) => SFormula::not(go(g)),
        SFormula::And(gs) => SFormula::And(gs.iter().map(go).collect()),
        SFormula::Or(gs) => SFormula::Or(gs.iter().map(go).collect()),
        SFormula::Implies(a, b) => SFormula::implies(go(a), go(b)),
        other => other.clone(),
    }
}

fn problem_text(rng: &mut ChaCha8Rng, family: Family) -> String {
    let mut lines = Vec::new();
    if let Some(c) = family.clause() {
        lines.push(format!("(clause (y x) {})", c));
    }
    let items = rng.gen_range(1..=6);
    let pa_item = |rng: &mut ChaCha8Rng| match rng.gen_range(0..5) {
        0 => goal(rng),
        1 => format!("(crit pred {})", term(rng, &[], 2)),
        2 => induction(rng),
        _ => format!("(crit eps {} x {})", num(rng, 6), formula_in(rng, "x", true)),
    };
    if family == Family::Pa {
        for _ in 0..items {
            lines.push(pa_item(rng));
        }
        return lines.join("\n");
    }
    // Build I from 0 upwards with gaps, then add witnesses that probe it.
    let mut points: Vec<u64> = (0..=7).filter(|_| rng.gen_bool(0.6)).collect();
    if !points.contains(&0) || rng.gen_bool(0.5) {
        points.insert(0, 0);
    }
    points.dedup();
    for n in &points {
        lines.push(format!("(crit inddef {})", n));
    }
    let closure_phi = closure_formula(rng);
    if rng.gen_bool(0.7) {
        lines.push(format!("(crit closure z {})", closure_phi));
    }
    for _ in 0..items {
        let n = *points.choose(rng).unwrap();
        let line = match rng.gen_range(0..7) {
            0 => pa_item(rng),
            1 | 2 => {
                // c_n: a y with ¬B(y, n, I)
                let m = rng.gen_range(0..=n.max(1));
                let b = clause_at(family, &STerm::var("y"), &STerm::num(n), &|t| SFormula::In(t.clone()));
                format!("(crit eps {} y {})", m, SFormula::not(b))
            }
            3 => {
                // witness for ∀x (x ∈ I → φ(x)) in the closure consequent,
                // preferably a point of I where φ fails
                let bad: Vec<u64> = points
                    .iter()
                    .copied()
                    .filter(|&m| !eval_source(&closure_phi.subst("z", &STerm::num(m))))
                    .collect();
                let t = bad.choose(rng).copied().unwrap_or_else(|| rng.gen_range(0..=7));
                let body = SFormula::not(SFormula::implies(
                    SFormula::In(STerm::var("x")),
                    closure_phi.subst("z", &STerm::var("x")),
                ));
                format!("(crit eps {} x {})", t, body)
            }
            4 => {
                // a y with ¬B(y, n, φ) at a point of I where φ fails, so
                // that A(n, φ) is refuted, plus the consequent witness n
                let bad: Vec<u64> = points
                    .iter()
                    .copied()
                    .filter(|&m| !eval_source(&closure_phi.subst("z", &STerm::num(m))))
                    .collect();
                let n = bad.first().copied().unwrap_or(n);
                let b = clause_at(family, &STerm::var("y"), &STerm::num(n), &|t| closure_phi.subst("z", t));
                let refuting: Vec<u64> =
                    (0..=8).filter(|&m| !eval_source(&b.subst("y", &STerm::num(m)))).collect();
                let m = refuting.choose(rng).copied().unwrap_or_else(|| rng.gen_range(0..=n));
                let cons = SFormula::not(SFormula::implies(
                    SFormula::In(STerm::var("x")),
                    closure_phi.subst("z", &STerm::var("x")),
                ));
                format!(
                    "(crit eps {} y {})\n(crit eps {} x {})",
                    m,
                    SFormula::not(b),
                    n,
                    cons
                )
            }
            5 => {
                let psi = qf(rng, &["x"], 1);
                let body = SFormula::And(vec![SFormula::In(STerm::var("x")), psi]);
                format!("(crit eps {} x {})", n, body)
            }
            _ => format!("(crit inddef {})", rng.gen_range(0..=9)),
        };
        lines.push(line);
    }
    lines.join("\n")
}

/// Standard-model value of a closed PA source term.
pub fn eval_source_term(t: &STerm) -> BigUint {
    match t {
        STerm::Num(n) => n.clone(),
        STerm::Var(v) => panic!("free variable {}", v),
        STerm::Succ(a) => eval_source_term(a) + 1u32,
        STerm::Add(a, b) => eval_source_term(a) + eval_source_term(b),
        STerm::Mul(a, b) => eval_source_term(a) * eval_source_term(b),
    }
}

/// Truth of a closed quantifier-free PA source formula.
pub fn eval_source(f: &SFormula) -> bool {
    match f {
        SFormula::True => true,
        SFormula::False => false,
        SFormula::Eq(a, b) => eval_source_term(a) == eval_source_term(b),
        SFormula::Lt(a, b) => eval_source_term(a) < eval_source_term(b),
        SFormula::Not(g) => !eval_source(g),
        SFormula::And(gs) => gs.iter().all(eval_source),
        SFormula::Or(gs) => gs.iter().any(eval_source),
        SFormula::Implies(a, b) => !eval_source(a) || eval_source(b),
        other => panic!("not a quantifier-free PA formula: {}", other),
    }
}

/// A total assignment written out by hand: unlisted expressions are `?`.
pub type Table = BTreeMap<Canon, Value>;

pub fn table(s: &Substitution) -> Table {
    s.iter().map(|(e, v)| (e.clone(), v.clone())).collect()
}

/// `|t|` under the standard extension of `s`, computed without the engine.
pub fn eval_term(t: &Term, s: &Table) -> BigUint {
    match t {
        Term::Num(n) => n.clone(),
        Term::Var(v) => panic!("open term, variable {}", v),
        Term::Fun(f, args) => {
            let a: Vec<BigUint> = args.iter().map(|a| eval_term(a, s)).collect();
            match f {
                PaFun::Succ => &a[0] + 1u32,
                PaFun::Add => &a[0] + &a[1],
                PaFun::Mul => &a[0] * &a[1],
            }
        }
        Term::Skolem(c, args) => {
            let key = Canon::Term(c.clone(), args.iter().map(|a| eval_term(a, s)).collect());
            match s.get(&key) {
                Some(Value::Num(n)) => n.clone(),
                _ => BigUint::from(0u32),
            }
        }
    }
}

/// `S̄ ⊨ φ`, computed without the engine.
pub fn eval(f: &Formula, s: &Table) -> bool {
    match f {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Rel(r, a, b) => {
            let (a, b) = (eval_term(a, s), eval_term(b, s));
            match r {
                Rel::Eq => a == b,
                Rel::Lt => a < b,
            }
        }
        Formula::In(t) => matches!(s.get(&Canon::Form(eval_term(t, s))), Some(Value::Top)),
        Formula::Not(g) => !eval(g, s),
        Formula::And(a, b) => eval(a, s) && eval(b, s),
        Formula::Or(a, b) => eval(a, s) || eval(b, s),
    }
}

/// Every canonical expression whose value `eval` consults for `f` under `s`.
pub fn consulted(f: &Formula, s: &Table, out: &mut Vec<Canon>) {
    fn term(t: &Term, s: &Table, out: &mut Vec<Canon>) {
        match t {
            Term::Num(_) | Term::Var(_) => {}
            Term::Fun(_, args) => args.iter().for_each(|a| term(a, s, out)),
            Term::Skolem(c, args) => {
                args.iter().for_each(|a| term(a, s, out));
                let key = Canon::Term(c.clone(), args.iter().map(|a| eval_term(a, s)).collect());
                if !out.contains(&key) {
                    out.push(key);
                }
            }
        }
    }
    match f {
        Formula::Top | Formula::Bottom => {}
        Formula::Rel(_, a, b) => {
            term(a, s, out);
            term(b, s, out);
        }
        Formula::In(t) => {
            term(t, s, out);
            let key = Canon::Form(eval_term(t, s));
            if !out.contains(&key) {
                out.push(key);
            }
        }
        Formula::Not(g) => consulted(g, s, out),
        Formula::And(a, b) | Formula::Or(a, b) => {
            consulted(a, s, out);
            consulted(b, s, out);
        }
    }
}
