//! Critical formulas and the H-process.
//!
//! Each critical formula is stored twice: as the closed, fully expanded
//! formula that is evaluated under `S̄`, and as the components of its axiom
//! schema, which the analysis needs to compute the H-expression and H-value.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::history::{subst_to_json, validate, History, HistoricalSubstitution};
use crate::lang::source::SFormula;
use crate::lang::{Canon, Formula, Language, Rank, SetArg, Term, Var};
use crate::subst::{incorrect_entries, models, reduce_term, Assignment, Substitution, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Axiom {
    /// `¬s=0 → ∃x s=Sx`.
    Pred { s: Term, witness: Term },
    /// `φ(t) → ∃x φ(x)`.
    Epsilon { phi: Formula, x: Var, t: Term, witness: Term },
    /// `φ(0) ∧ ¬φ(t) → ∃x (φ(x) ∧ ¬φ(Sx))`.
    Induction { phi: Formula, x: Var, t: Term, witness: Term },
    /// `A(t, I) → t ∈ I`.
    InductiveDef { t: Term },
    /// `∀x (A(x,φ) → φ(x)) → ∀x (x∈I → φ(x))`. `a` is `A(x, φ)` with `x`
    /// free and `a_witness` its inner Skolem term; `witness` is the Skolem
    /// term of the antecedent.
    Closure { phi: Formula, x: Var, a: Formula, a_witness: Term, witness: Term },
}

impl Axiom {
    pub fn kind(&self) -> &'static str {
        match self {
            Axiom::Pred { .. } => "pred",
            Axiom::Epsilon { .. } => "epsilon",
            Axiom::Induction { .. } => "induction",
            Axiom::InductiveDef { .. } => "inductive-def",
            Axiom::Closure { .. } => "closure",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalFormula {
    pub axiom: Axiom,
    /// The closed expanded formula.
    pub formula: Formula,
    /// The formula as written, when it came from a problem file.
    pub source: Option<SFormula>,
}

impl CriticalFormula {
    /// `s` must be closed.
    pub fn pred(lang: &Language, s: Term) -> Self {
        let x = 0;
        let body = Formula::eq(s.clone(), Term::succ(Term::Var(x)));
        let witness = lang.exists_witness(&body, x);
        let formula = Formula::implies(
            Formula::not(Formula::eq(s.clone(), Term::zero())),
            body.subst(x, &witness),
        );
        CriticalFormula { axiom: Axiom::Pred { s, witness }, formula, source: None }
    }

    /// `phi` has at most `x` free; `t` is closed.
    pub fn epsilon(lang: &Language, phi: &Formula, x: Var, t: Term) -> Self {
        let witness = lang.exists_witness(phi, x);
        let formula = Formula::implies(phi.subst(x, &t), phi.subst(x, &witness));
        let axiom = Axiom::Epsilon { phi: phi.clone(), x, t, witness };
        CriticalFormula { axiom, formula, source: None }
    }

    pub fn induction(lang: &Language, phi: &Formula, x: Var, t: Term) -> Self {
        let step = Formula::and(
            phi.clone(),
            Formula::not(phi.subst(x, &Term::succ(Term::Var(x)))),
        );
        let witness = lang.exists_witness(&step, x);
        let formula = Formula::implies(
            Formula::and(phi.subst(x, &Term::zero()), Formula::not(phi.subst(x, &t))),
            step.subst(x, &witness),
        );
        let axiom = Axiom::Induction { phi: phi.clone(), x, t, witness };
        CriticalFormula { axiom, formula, source: None }
    }

    pub fn inductive_def(lang: &Language, t: Term) -> Self {
        let formula = Formula::implies(lang.a_formula(&t), Formula::In(t.clone()));
        CriticalFormula { axiom: Axiom::InductiveDef { t }, formula, source: None }
    }

    pub fn closure(lang: &Language, phi: &Formula, x: Var) -> Self {
        let (a, a_witness) = lang.inductive_formula(&Term::Var(x), SetArg::Pred { var: x, body: phi });
        let ante = Formula::implies(a.clone(), phi.clone());
        let witness = lang.forall_witness(&ante, x);
        let cons = Formula::implies(Formula::In(Term::Var(x)), phi.clone());
        let formula = Formula::implies(ante.subst(x, &witness), lang.forall(&cons, x));
        let axiom = Axiom::Closure { phi: phi.clone(), x, a, a_witness, witness };
        CriticalFormula { axiom, formula, source: None }
    }

    pub fn with_source(mut self, source: SFormula) -> Self {
        self.source = Some(source);
        self
    }
}

impl fmt::Display for CriticalFormula {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match &self.source {
            Some(s) => write!(f, "{} {}", self.axiom.kind(), s),
            None => write!(f, "{} {}", self.axiom.kind(), self.formula),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HError {
    #[error("critical formula {0}: no m below |t| has φ(m) and ¬φ(m+1)")]
    NoInductionWitness(usize),
    #[error("critical formula {0}: no n ∈ I in P has ¬φ(n)")]
    NoClosurePoint(usize),
    #[error("critical formula {index}: H-value 0 computed for {expr}")]
    ZeroValue { index: usize, expr: String },
    #[error("critical formula {index}: witness {term} does not reduce to a canonical term")]
    NotCanonical { index: usize, term: String },
    #[error("substitution is not correct: {0}")]
    Incorrect(String),
    #[error("invalid historical substitution after step {step}: {diag}")]
    Invalid { step: u64, diag: String },
}

/// `S` satisfies every critical formula under its standard extension.
pub fn is_solving(s: &Substitution, cr: &[CriticalFormula]) -> bool {
    is_solving_in(&s.standard(), cr)
}

/// [`is_solving`] over an arbitrary assignment.
pub fn is_solving_in<A: Assignment + ?Sized>(sb: &A, cr: &[CriticalFormula]) -> bool {
    cr.iter().all(|c| models(sb, &c.formula))
}

/// Canonical form of a Skolem term after reducing its arguments.
fn canonical_of<A: Assignment + ?Sized>(t: &Term, sb: &A) -> Option<Canon> {
    match t {
        Term::Skolem(c, args) => Canon::from_term(&Term::Skolem(
            c.clone(),
            args.iter().map(|a| reduce_term(a, sb)).collect(),
        )),
        _ => None,
    }
}

fn numeral<A: Assignment + ?Sized>(t: &Term, sb: &A) -> BigUint {
    reduce_term(t, sb)
        .as_numeral()
        .cloned()
        .expect("closed terms reduce to numerals under the standard extension")
}

/// The least `m ≤ bound` satisfying `pred`.
fn least(bound: &BigUint, mut pred: impl FnMut(&BigUint) -> bool) -> Option<BigUint> {
    let mut m = BigUint::zero();
    while &m <= bound {
        if pred(&m) {
            return Some(m);
        }
        m += 1u32;
    }
    None
}

/// The H-expression and H-value of `cr[index]`, or `None` when it is
/// satisfied.
pub fn analyze(
    lang: &Language,
    hs: &HistoricalSubstitution,
    cr: &[CriticalFormula],
    index: usize,
) -> Result<Option<(Canon, Value)>, HError> {
    analyze_in(lang, hs, cr, index, &hs.s.standard())
}

/// [`analyze`] with every lookup going through `sb`, which must extend
/// `hs.s` to a total assignment.
pub fn analyze_in<A: Assignment + ?Sized>(
    lang: &Language,
    hs: &HistoricalSubstitution,
    cr: &[CriticalFormula],
    index: usize,
    sb: &A,
) -> Result<Option<(Canon, Value)>, HError> {
    let c = &cr[index];
    if models(sb, &c.formula) {
        return Ok(None);
    }
    let canon = |t: &Term| {
        canonical_of(t, sb).ok_or_else(|| HError::NotCanonical { index, term: t.to_string() })
    };
    let positive = |n: BigUint, e: &Canon| {
        if n.is_zero() {
            Err(HError::ZeroValue { index, expr: e.to_string() })
        } else {
            Ok(Value::Num(n))
        }
    };
    let (e, v) = match &c.axiom {
        Axiom::Pred { s, witness } => {
            let e = canon(witness)?;
            let n = numeral(s, sb);
            if n.is_zero() {
                return Err(HError::ZeroValue { index, expr: e.to_string() });
            }
            let v = positive(n - 1u32, &e)?;
            (e, v)
        }
        Axiom::Epsilon { phi, x, t, witness } => {
            // The least instance below |t|, so that F(e, v) holds with its
            // minimality conjunct; it is |t| itself when no smaller one exists.
            let e = canon(witness)?;
            let bound = numeral(t, sb);
            let m = least(&bound, |m| models(sb, &phi.subst(*x, &Term::Num(m.clone()))))
                .unwrap_or(bound);
            let v = positive(m, &e)?;
            (e, v)
        }
        Axiom::Induction { phi, x, t, witness } => {
            let e = canon(witness)?;
            let bound = numeral(t, sb);
            let mut m = BigUint::zero();
            let found = loop {
                if m >= bound {
                    break None;
                }
                let next = &m + BigUint::one();
                if models(sb, &phi.subst(*x, &Term::Num(m.clone())))
                    && models(sb, &Formula::not(phi.subst(*x, &Term::Num(next.clone()))))
                {
                    break Some(m);
                }
                m = next;
            };
            let m = found.ok_or(HError::NoInductionWitness(index))?;
            let v = positive(m, &e)?;
            (e, v)
        }
        Axiom::InductiveDef { t } => (Canon::Form(numeral(t, sb)), Value::Top),
        Axiom::Closure { phi, x, a, a_witness, witness } => {
            let n = hs
                .hist
                .p()
                .iter()
                .find(|n| models(sb, &Formula::not(phi.subst(*x, &Term::Num((*n).clone())))))
                .cloned()
                .ok_or(HError::NoClosurePoint(index))?;
            let at_n = Term::Num(n.clone());
            if models(sb, &Formula::not(a.subst(*x, &at_n))) {
                let inner = canon(&a_witness.subst(*x, &at_n))?;
                let v = sb.lookup(&inner).unwrap_or(Value::Unknown);
                (lang.witness_canon(n), v)
            } else {
                // Least m ≤ n with A(m, φ) ∧ ¬φ(m); n itself qualifies.
                let e = canon(witness)?;
                let m = least(&n, |m| {
                    let at = Term::Num(m.clone());
                    models(sb, &a.subst(*x, &at)) && models(sb, &Formula::not(phi.subst(*x, &at)))
                })
                .unwrap_or(n);
                let v = positive(m, &e)?;
                (e, v)
            }
        }
    };
    Ok(Some((e, v)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankCase {
    Low,
    High,
    OmegaPos,
    OmegaNeg,
}

impl RankCase {
    pub fn of(e: &Canon) -> RankCase {
        match e.rank() {
            Rank::Fin(_) => RankCase::Low,
            Rank::OmegaPlus(_) => RankCase::High,
            Rank::Omega if e.is_formula() => RankCase::OmegaPos,
            Rank::Omega => RankCase::OmegaNeg,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RankCase::Low => "low",
            RankCase::High => "high",
            RankCase::OmegaPos => "omega-pos",
            RankCase::OmegaNeg => "omega-neg",
        }
    }
}

/// The selected critical formula with its H-expression and H-value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Choice {
    pub index: usize,
    pub e: Canon,
    pub v: Value,
}

/// Among unsatisfied critical formulas, the one of least rank, ties broken
/// by least index. `None` when `S` is solving.
pub fn choose(
    lang: &Language,
    hs: &HistoricalSubstitution,
    cr: &[CriticalFormula],
) -> Result<Option<Choice>, HError> {
    choose_in(lang, hs, cr, &hs.s.standard())
}

/// [`choose`] over an arbitrary total assignment extending `hs.s`.
pub fn choose_in<A: Assignment + ?Sized>(
    lang: &Language,
    hs: &HistoricalSubstitution,
    cr: &[CriticalFormula],
    sb: &A,
) -> Result<Option<Choice>, HError> {
    let mut best: Option<Choice> = None;
    for index in 0..cr.len() {
        if let Some((e, v)) = analyze_in(lang, hs, cr, index, sb)? {
            if best.as_ref().map_or(true, |b| e.rank() < b.e.rank()) {
                best = Some(Choice { index, e, v });
            }
        }
    }
    Ok(best)
}

/// Applies the H-step for a given H-expression and H-value.
pub fn apply(hs: &HistoricalSubstitution, e: &Canon, v: &Value) -> HistoricalSubstitution {
    let s = &hs.s;
    let insert = |mut out: Substitution| {
        out.insert(e.clone(), v.clone()).expect("H-values are type-correct");
        out
    };
    match RankCase::of(e) {
        RankCase::Low => HistoricalSubstitution::new(insert(s.at_most(e.rank())), History::new()),
        RankCase::High => HistoricalSubstitution::new(insert(s.at_most(e.rank())), hs.hist.clone()),
        RankCase::OmegaPos => {
            let n = match e {
                Canon::Form(n) => n.clone(),
                Canon::Term(..) => unreachable!(),
            };
            let out = s.below(Rank::Omega).union(&s.positive_omega());
            let mut hist = hs.hist.clone();
            hist.push(n, s.negative_omega());
            HistoricalSubstitution::new(insert(out), hist)
        }
        RankCase::OmegaNeg => {
            let n = e.witness_point().expect("rank Ω terms are witnesses c_n");
            let hist = hs.hist.prefix_without(n);
            let kept = |m: &BigUint| hist.p().contains(m);
            let s_prime = s.filter(|e2, v2| match e2 {
                Canon::Form(m) => *v2 == Value::Top && kept(m),
                Canon::Term(..) => {
                    v2.is_unknown() && e2.witness_point().is_some_and(|m| kept(m))
                }
            });
            let v_prime = match hs.hist.v(n) {
                Some(saved) => saved.clone(),
                None => s.negative_omega(),
            };
            let out = s.below(Rank::Omega).union(&s_prime).union(&v_prime);
            HistoricalSubstitution::new(insert(out), hist)
        }
    }
}

/// Record of one executed H-step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HStep {
    pub step: u64,
    pub index: usize,
    pub e: Canon,
    pub v: Value,
    pub case: RankCase,
    pub added: Substitution,
    pub removed: Substitution,
    pub p: Vec<BigUint>,
    pub v_added: Vec<(BigUint, Substitution)>,
    pub v_removed: Vec<BigUint>,
    pub digest_before: u64,
    pub digest_after: u64,
    pub solving: bool,
}

/// FNV-1a over the sorted textual form; stable across runs and platforms.
pub fn digest(s: &Substitution) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.to_string().bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl HStep {
    pub fn between(
        step: u64,
        choice: &Choice,
        before: &HistoricalSubstitution,
        after: &HistoricalSubstitution,
        solving: bool,
    ) -> HStep {
        let added = after.s.filter(|e, v| before.s.get(e) != Some(v));
        let removed = before.s.filter(|e, v| after.s.get(e) != Some(v));
        let v_added = after
            .hist
            .p()
            .iter()
            .filter(|n| before.hist.v(n) != after.hist.v(n))
            .map(|n| (n.clone(), after.hist.v(n).cloned().unwrap_or_default()))
            .collect();
        let v_removed = before
            .hist
            .p()
            .iter()
            .filter(|n| after.hist.v(n).is_none())
            .cloned()
            .collect();
        HStep {
            step,
            index: choice.index,
            e: choice.e.clone(),
            v: choice.v.clone(),
            case: RankCase::of(&choice.e),
            added,
            removed,
            p: after.hist.p().to_vec(),
            v_added,
            v_removed,
            digest_before: digest(&before.s),
            digest_after: digest(&after.s),
            solving,
        }
    }

    /// One line of the structured trace.
    pub fn to_json(&self) -> Json {
        let mut vd_added = serde_json::Map::new();
        for (n, s) in &self.v_added {
            vd_added.insert(n.to_string(), subst_to_json(s));
        }
        json!({
            "step": self.step,
            "I": self.index,
            "rankCase": self.case.name(),
            "e": self.e.to_string(),
            "v": self.v.to_string(),
            "addedEntries": subst_to_json(&self.added),
            "removedEntries": subst_to_json(&self.removed),
            "P": self.p.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
            "Vdelta": {
                "added": vd_added,
                "removed": self.v_removed.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
            },
            "solving": self.solving,
        })
    }
}

impl fmt::Display for HStep {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(
            f,
            "step {}: Cr[{}] {} {} := {}; +{} -{}; P = <",
            self.step,
            self.index,
            self.case.name(),
            self.e,
            self.v,
            self.added,
            self.removed
        )?;
        for (i, n) in self.p.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", n)?;
        }
        write!(f, ">{}", if self.solving { " solving" } else { "" })
    }
}

/// Computes the next state, or `None` when `S` is already solving.
pub fn h_step(
    lang: &Language,
    hs: &HistoricalSubstitution,
    cr: &[CriticalFormula],
    step: u64,
) -> Result<Option<(HistoricalSubstitution, HStep)>, HError> {
    let Some(choice) = choose(lang, hs, cr)? else {
        return Ok(None);
    };
    let next = apply(hs, &choice.e, &choice.v);
    let solving = is_solving(&next.s, cr);
    let record = HStep::between(step, &choice, hs, &next, solving);
    Ok(Some((next, record)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub max_steps: u64,
    /// Assert correctness and the history invariants after every step.
    pub check: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { max_steps: 1_000_000, check: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Solved { state: HistoricalSubstitution, steps: u64 },
    StepLimit { state: HistoricalSubstitution, steps: u64 },
    InternalError { state: HistoricalSubstitution, steps: u64, error: HError },
}

impl Outcome {
    pub fn state(&self) -> &HistoricalSubstitution {
        match self {
            Outcome::Solved { state, .. }
            | Outcome::StepLimit { state, .. }
            | Outcome::InternalError { state, .. } => state,
        }
    }

    pub fn steps(&self) -> u64 {
        match self {
            Outcome::Solved { steps, .. }
            | Outcome::StepLimit { steps, .. }
            | Outcome::InternalError { steps, .. } => *steps,
        }
    }

    pub fn is_solved(&self) -> bool {
        matches!(self, Outcome::Solved { .. })
    }
}

/// Runs the H-process from `(∅, ⟨⟩, ∅)`, reporting each step to `observe`.
pub fn run(
    lang: &Language,
    cr: &[CriticalFormula],
    cfg: RunConfig,
    observe: &mut dyn FnMut(&HStep),
) -> Outcome {
    let mut state = HistoricalSubstitution::empty();
    let mut steps = 0u64;
    loop {
        if steps >= cfg.max_steps {
            if is_solving(&state.s, cr) {
                return Outcome::Solved { state, steps };
            }
            return Outcome::StepLimit { state, steps };
        }
        match h_step(lang, &state, cr, steps + 1) {
            Ok(None) => return Outcome::Solved { state, steps },
            Ok(Some((next, record))) => {
                steps += 1;
                observe(&record);
                state = next;
                if cfg.check {
                    if let Err(error) = check_state(lang, &state, steps) {
                        return Outcome::InternalError { state, steps, error };
                    }
                }
            }
            Err(error) => return Outcome::InternalError { state, steps, error },
        }
    }
}

fn check_state(lang: &Language, hs: &HistoricalSubstitution, step: u64) -> Result<(), HError> {
    let bad = incorrect_entries(lang, &hs.s);
    if let Some((e, v)) = bad.first() {
        return Err(HError::Incorrect(format!("after step {}: {} := {}", step, e, v)));
    }
    let diag = validate(hs, lang);
    if !diag.is_empty() {
        return Err(HError::Invalid { step, diag: diag.join("; ") });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("goal {0} is not true under the final substitution")]
pub struct WitnessError(pub String);

/// The numeral `|c_{∃x φ}(t⃗)|_{S̄}` witnessing the goal `∃x φ`.
pub fn extract_witness(
    lang: &Language,
    s: &Substitution,
    phi: &Formula,
    x: Var,
) -> Result<BigUint, WitnessError> {
    let sb = s.standard();
    let n = numeral(&lang.exists_witness(phi, x), &sb);
    if models(&sb, &phi.subst(x, &Term::Num(n.clone()))) {
        Ok(n)
    } else {
        Err(WitnessError(lang.exists(phi, x).to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::InductiveClause;

    fn nat() -> Language {
        Language::new(
            InductiveClause::new(Formula::or(
                Formula::not(Formula::lt(Term::Var(0), Term::Var(1))),
                Formula::In(Term::Var(0)),
            ))
            .unwrap(),
        )
    }

    fn n(k: u64) -> BigUint {
        BigUint::from(k)
    }

    fn x_eq_s0(lang: &Language) -> CriticalFormula {
        // (S0=S0) → ∃x x=S0
        let phi = Formula::eq(Term::Var(0), Term::num(1));
        CriticalFormula::epsilon(lang, &phi, 0, Term::num(1))
    }

    fn trace(lang: &Language, cr: &[CriticalFormula]) -> (Outcome, Vec<HStep>) {
        let mut steps = Vec::new();
        let cfg = RunConfig { max_steps: 10_000, check: true };
        let out = run(lang, cr, cfg, &mut |s| steps.push(s.clone()));
        (out, steps)
    }

    #[test]
    fn solving_examples() {
        let lang = Language::pa_only();
        assert!(is_solving(&Substitution::new(), &[]));
        let cr = [CriticalFormula::pred(&lang, Term::num(2))];
        assert!(!is_solving(&Substitution::new(), &cr));
        let Axiom::Pred { witness, .. } = &cr[0].axiom else { unreachable!() };
        let e = Canon::from_term(witness).unwrap();
        let s = Substitution::from_entries([(e, Value::num(1))]).unwrap();
        assert!(is_solving(&s, &cr));
    }

    #[test]
    fn analyze_examples() {
        let lang = nat();
        let empty = HistoricalSubstitution::empty();
        let cr = [
            CriticalFormula::pred(&lang, Term::num(2)),
            x_eq_s0(&lang),
            CriticalFormula::inductive_def(&lang, Term::zero()),
        ];
        let (e, v) = analyze(&lang, &empty, &cr, 0).unwrap().unwrap();
        assert_eq!(e.to_string(), "(eps 1 (= v1 (s v0)) 2)");
        assert_eq!(v, Value::num(1));
        let (e, v) = analyze(&lang, &empty, &cr, 1).unwrap().unwrap();
        assert_eq!(e.to_string(), "(eps 1 (= v0 v1) 1)");
        assert_eq!(v, Value::num(1));
        let (e, v) = analyze(&lang, &empty, &cr, 2).unwrap().unwrap();
        assert_eq!(e, Canon::Form(n(0)));
        assert_eq!(v, Value::Top);
    }

    #[test]
    fn choose_prefers_low_rank_then_index() {
        let lang = nat();
        let empty = HistoricalSubstitution::empty();
        let cr = [
            CriticalFormula::inductive_def(&lang, Term::zero()),
            CriticalFormula::pred(&lang, Term::num(3)),
            CriticalFormula::pred(&lang, Term::num(2)),
        ];
        let c = choose(&lang, &empty, &cr).unwrap().unwrap();
        assert_eq!(c.index, 1);
        assert!(choose(&lang, &empty, &[]).unwrap().is_none());
    }

    #[test]
    fn epsilon_run() {
        let lang = Language::pa_only();
        let cr = [x_eq_s0(&lang)];
        let (out, steps) = trace(&lang, &cr);
        assert!(out.is_solved());
        assert_eq!(out.steps(), 1);
        assert_eq!(steps[0].case, RankCase::Low);
        assert!(steps[0].solving);
        let phi = Formula::eq(Term::Var(0), Term::num(1));
        assert_eq!(extract_witness(&lang, &out.state().s, &phi, 0).unwrap(), n(1));
        // ∃x x=x has the default witness 0
        let phi = Formula::eq(Term::Var(0), Term::Var(0));
        assert_eq!(extract_witness(&lang, &out.state().s, &phi, 0).unwrap(), n(0));
        let phi = Formula::eq(Term::Var(0), Term::num(2));
        assert!(extract_witness(&lang, &out.state().s, &phi, 0).is_err());
    }

    #[test]
    fn empty_list_is_solved() {
        let (out, steps) = trace(&nat(), &[]);
        assert_eq!(out, Outcome::Solved { state: HistoricalSubstitution::empty(), steps: 0 });
        assert!(steps.is_empty());
    }

    #[test]
    fn inductive_def_run() {
        let lang = nat();
        let cr = [
            CriticalFormula::inductive_def(&lang, Term::zero()),
            CriticalFormula::inductive_def(&lang, Term::num(1)),
        ];
        let (out, steps) = trace(&lang, &cr);
        assert!(out.is_solved(), "{:?}", out);
        assert_eq!(steps[0].e, Canon::Form(n(0)));
        assert_eq!(steps[0].case, RankCase::OmegaPos);
        let s = &out.state().s;
        assert_eq!(s.get(&Canon::Form(n(0))), Some(&Value::Top));
        assert_eq!(s.get(&Canon::Form(n(1))), Some(&Value::Top));
        assert_eq!(out.state().hist.p(), &[n(0), n(1)]);
        assert!(out.state().hist.v(&n(0)).unwrap().is_empty());
    }

    #[test]
    fn omega_pos_step() {
        let hs = HistoricalSubstitution::empty();
        let next = apply(&hs, &Canon::Form(n(0)), &Value::Top);
        assert_eq!(next.hist.p(), &[n(0)]);
        assert_eq!(next.hist.v(&n(0)), Some(&Substitution::new()));
        assert_eq!(next.s.get(&Canon::Form(n(0))), Some(&Value::Top));
    }

    #[test]
    fn omega_neg_restores_history() {
        let lang = nat();
        // P = <a, n, b> with a = 0, n = 1, b = 2.
        let mut hist = History::new();
        let v_n = Substitution::from_entries([(lang.witness_canon(n(7)), Value::num(3))]).unwrap();
        hist.push(n(0), Substitution::new());
        hist.push(n(1), v_n.clone());
        hist.push(n(2), Substitution::new());
        let s = Substitution::from_entries([
            (Canon::Form(n(0)), Value::Top),
            (Canon::Form(n(1)), Value::Top),
            (Canon::Form(n(2)), Value::Top),
            (lang.witness_canon(n(0)), Value::Unknown),
            (lang.witness_canon(n(2)), Value::Unknown),
        ])
        .unwrap();
        let hs = HistoricalSubstitution::new(s, hist);
        let next = apply(&hs, &lang.witness_canon(n(1)), &Value::num(1));
        assert_eq!(next.hist.p(), &[n(0)]);
        assert!(next.hist.v(&n(2)).is_none());
        let expected = Substitution::from_entries([
            (Canon::Form(n(0)), Value::Top),
            (lang.witness_canon(n(0)), Value::Unknown),
            (lang.witness_canon(n(7)), Value::num(3)),
            (lang.witness_canon(n(1)), Value::num(1)),
        ])
        .unwrap();
        assert_eq!(next.s, expected);
    }

    #[test]
    fn omega_neg_outside_history_keeps_negative_part() {
        let lang = nat();
        let s = Substitution::from_entries([
            (Canon::Form(n(0)), Value::Unknown),
            (lang.witness_canon(n(4)), Value::num(2)),
        ])
        .unwrap();
        let hs = HistoricalSubstitution::new(s.clone(), History::new());
        let next = apply(&hs, &lang.witness_canon(n(1)), &Value::num(1));
        assert_eq!(next.s, s.with(lang.witness_canon(n(1)), Value::num(1)).unwrap());
        assert!(next.hist.is_empty());
    }

    #[test]
    fn low_step_resets_history_high_step_keeps_it() {
        let lang = nat();
        let mut hist = History::new();
        hist.push(n(0), Substitution::new());
        let s = Substitution::from_entries([(Canon::Form(n(0)), Value::Top)]).unwrap();
        let hs = HistoricalSubstitution::new(s, hist);
        let low = CriticalFormula::pred(&lang, Term::num(2));
        let Axiom::Pred { witness, .. } = &low.axiom else { unreachable!() };
        let e = Canon::from_term(witness).unwrap();
        let next = apply(&hs, &e, &Value::num(1));
        assert!(next.hist.is_empty());
        assert_eq!(next.s.len(), 1);

        // c_{∃x x∈I} has rank above Ω.
        let phi = Formula::In(Term::Var(0));
        let high = CriticalFormula::epsilon(&lang, &phi, 0, Term::num(0));
        let Axiom::Epsilon { witness, .. } = &high.axiom else { unreachable!() };
        let e = Canon::from_term(witness).unwrap();
        assert_eq!(RankCase::of(&e), RankCase::High);
        let next = apply(&hs, &e, &Value::num(1));
        assert_eq!(next.hist, hs.hist);
        assert_eq!(next.s.len(), 2);
    }

    #[test]
    fn induction_and_closure_runs() {
        let lang = nat();
        // φ(x) = x < 3, t = 5: φ(0) ∧ ¬φ(5) → ∃x (φ(x) ∧ ¬φ(Sx))
        let phi = Formula::lt(Term::Var(0), Term::num(3));
        let cr = [CriticalFormula::induction(&lang, &phi, 0, Term::num(5))];
        let (out, steps) = trace(&lang, &cr);
        assert!(out.is_solved());
        assert_eq!(steps[0].v, Value::num(2));

        // Closure for φ(x) = x < 2 with 0, 1, 2 ∈ I being derivable.
        let cr = vec![
            CriticalFormula::inductive_def(&lang, Term::zero()),
            CriticalFormula::inductive_def(&lang, Term::num(1)),
            CriticalFormula::inductive_def(&lang, Term::num(2)),
            CriticalFormula::closure(&lang, &Formula::lt(Term::Var(0), Term::num(2)), 0),
        ];
        let (out, _) = trace(&lang, &cr);
        assert!(out.is_solved(), "{:?}", out);
    }

    #[test]
    fn trace_json_shape() {
        let lang = Language::pa_only();
        let (_, steps) = trace(&lang, &[x_eq_s0(&lang)]);
        let j = steps[0].to_json();
        let keys: Vec<&str> = j.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(
            keys,
            ["step", "I", "rankCase", "e", "v", "addedEntries", "removedEntries", "P", "Vdelta", "solving"]
        );
        assert_eq!(j["addedEntries"].to_string(), r#"[["(eps 1 (= v0 v1) 1)","1"]]"#);
    }
}
