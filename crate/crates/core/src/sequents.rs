//! Sequents `Θ = (S, P, V, F)`, the axioms of the deduction system, and the
//! termination measures `ρ`, `d`, `ν`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::history::{is_admissible, subst_to_json, History, HistoricalSubstitution};
use crate::hproc::{apply, choose_in, is_solving, CriticalFormula, RankCase};
use crate::lang::{Canon, Formula, Language, Rank};
use crate::subst::{correctness_formula, is_ci, is_correct, reduce_formula, Recording, Substitution, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flag {
    T,
    F,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            Flag::T => "t",
            Flag::F => "f",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequentError {
    #[error("flag domain mismatch at {0}")]
    FlagDomain(String),
    #[error("{0} is already in the domain")]
    InDomain(String),
    #[error("{expr} cannot be added as ({expr}, {value}) in this form")]
    WrongForm { expr: String, value: String },
    #[error("sequence is not proper for (in {0})")]
    NotProper(String),
    #[error("dom(V_e) must be exactly the formulas of P_e")]
    HistoryDomain,
}

/// `e` carries a flag iff `S(e) = ?` or `rk(e) = Ω`.
fn needs_flag(e: &Canon, v: &Value) -> bool {
    v.is_unknown() || e.rank().is_omega()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankCmp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl RankCmp {
    pub fn holds(self, a: Rank, b: Rank) -> bool {
        match self {
            RankCmp::Lt => a < b,
            RankCmp::Le => a <= b,
            RankCmp::Eq => a == b,
            RankCmp::Ge => a >= b,
            RankCmp::Gt => a > b,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sequent {
    hs: HistoricalSubstitution,
    flags: BTreeMap<Canon, Flag>,
}

impl Sequent {
    /// Checks that `flags` is defined exactly on the required domain.
    pub fn new(hs: HistoricalSubstitution, flags: BTreeMap<Canon, Flag>) -> Result<Self, SequentError> {
        for (e, v) in hs.s.iter() {
            if needs_flag(e, v) != flags.contains_key(e) {
                return Err(SequentError::FlagDomain(e.to_string()));
            }
        }
        if let Some(e) = flags.keys().find(|e| !hs.s.contains(e)) {
            return Err(SequentError::FlagDomain(e.to_string()));
        }
        Ok(Sequent { hs, flags })
    }

    /// Every flag set to `t`.
    pub fn from_hs(hs: HistoricalSubstitution) -> Self {
        let flags = hs
            .s
            .iter()
            .filter(|(e, v)| needs_flag(e, v))
            .map(|(e, _)| (e.clone(), Flag::T))
            .collect();
        Sequent { hs, flags }
    }

    pub fn hs(&self) -> &HistoricalSubstitution {
        &self.hs
    }

    pub fn s(&self) -> &Substitution {
        &self.hs.s
    }

    pub fn p(&self) -> &[BigUint] {
        self.hs.hist.p()
    }

    pub fn flag(&self, e: &Canon) -> Option<Flag> {
        self.flags.get(e).copied()
    }

    pub fn flags(&self) -> &BTreeMap<Canon, Flag> {
        &self.flags
    }

    fn with_flag(&self, flag: Flag) -> Substitution {
        self.hs.s.filter(|e, _| self.flags.get(e) == Some(&flag))
    }

    /// `Θt`.
    pub fn t_part(&self) -> Substitution {
        self.with_flag(Flag::T)
    }

    /// `Θf`.
    pub fn f_part(&self) -> Substitution {
        self.with_flag(Flag::F)
    }

    /// `Θs`: the rank Ω part kept by an H-step at some `c_m` with `m ∈ I`
    /// outside `P`.
    pub fn s_part(&self) -> Substitution {
        let s = &self.hs.s;
        let justified = s.pos_term_omega().filter(|e, _| {
            let n = e.witness_point().expect("rank Ω terms are witnesses");
            s.get(&Canon::Form(n.clone())) == Some(&Value::Top)
        });
        s.negative_omega().union(&s.pos_form_omega()).union(&justified)
    }

    /// `Θ ⋈ r`.
    pub fn bounded(&self, cmp: RankCmp, r: Rank) -> bool {
        self.hs.s.domain().all(|e| cmp.holds(e.rank(), r))
    }

    /// `Θ_{⋈ r}`.
    pub fn restrict(&self, cmp: RankCmp, r: Rank) -> Sequent {
        let s = self.hs.s.filter(|e, _| cmp.holds(e.rank(), r));
        let hist = if cmp.holds(Rank::Omega, r) { self.hs.hist.clone() } else { History::new() };
        let flags = self
            .flags
            .iter()
            .filter(|(e, _)| s.contains(e))
            .map(|(e, f)| (e.clone(), *f))
            .collect();
        Sequent { hs: HistoricalSubstitution::new(s, hist), flags }
    }

    fn fresh(&self, e: &Canon) -> Result<(), SequentError> {
        if self.hs.s.contains(e) {
            Err(SequentError::InDomain(e.to_string()))
        } else {
            Ok(())
        }
    }

    fn inserted(&self, e: &Canon, u: &Value, flag: Option<Flag>) -> Result<Sequent, SequentError> {
        let mut out = self.clone();
        out.hs.s.insert(e.clone(), u.clone()).map_err(|_| SequentError::WrongForm {
            expr: e.to_string(),
            value: u.to_string(),
        })?;
        if let Some(i) = flag {
            out.flags.insert(e.clone(), i);
        }
        Ok(out)
    }

    /// `(e, u), Θ` for a term `e` of rank other than Ω and `u ≠ ?`.
    pub fn add_value(&self, e: &Canon, u: &Value) -> Result<Sequent, SequentError> {
        self.fresh(e)?;
        if !e.is_term() || e.rank().is_omega() || u.is_unknown() {
            return Err(SequentError::WrongForm { expr: e.to_string(), value: u.to_string() });
        }
        self.inserted(e, u, None)
    }

    /// `(e, ?, i), Θ`.
    pub fn add_unknown(&self, e: &Canon, i: Flag) -> Result<Sequent, SequentError> {
        self.fresh(e)?;
        self.inserted(e, &Value::Unknown, Some(i))
    }

    /// `(c_n, u, i), Θ` with `u ≠ ?`.
    pub fn add_witness_value(&self, e: &Canon, u: &Value, i: Flag) -> Result<Sequent, SequentError> {
        self.fresh(e)?;
        if e.witness_point().is_none() || u.is_unknown() {
            return Err(SequentError::WrongForm { expr: e.to_string(), value: u.to_string() });
        }
        self.inserted(e, u, Some(i))
    }

    /// `P_e` is proper for `n ∈ I, Θ`.
    pub fn is_proper(&self, lang: &Language, n: &BigUint, p_e: &[BigUint]) -> bool {
        let distinct = p_e.iter().enumerate().all(|(i, m)| !p_e[..i].contains(m));
        let unknown_witnesses = p_e.iter().all(|m| {
            self.hs
                .s
                .get(&lang.witness_canon(m.clone()))
                .map_or(true, Value::is_unknown)
        });
        let disjoint = p_e.iter().all(|m| !self.p().contains(m));
        let mut joined = self.p().to_vec();
        joined.extend_from_slice(p_e);
        !self.hs.s.contains(&Canon::Form(n.clone()))
            && distinct
            && unknown_witnesses
            && p_e.last() == Some(n)
            && disjoint
            && is_admissible(&joined, lang)
    }

    /// `(n ∈ I, ⊤, i, P_e, V_e), Θ`.
    pub fn add_formula(
        &self,
        lang: &Language,
        n: &BigUint,
        i: Flag,
        p_e: &[BigUint],
        v_e: &BTreeMap<BigUint, Substitution>,
    ) -> Result<Sequent, SequentError> {
        if !self.is_proper(lang, n, p_e) {
            return Err(SequentError::NotProper(n.to_string()));
        }
        let mut keys: Vec<&BigUint> = p_e.iter().collect();
        keys.sort();
        if v_e.keys().collect::<Vec<_>>() != keys {
            return Err(SequentError::HistoryDomain);
        }
        let mut out = self.clone();
        for m in p_e {
            let e = Canon::Form(m.clone());
            out.hs.s.insert(e.clone(), Value::Top).expect("formula entries accept T");
            out.flags.insert(e, i);
            out.hs.hist.push(m.clone(), v_e[m].clone());
        }
        Ok(out)
    }

    /// The H-step applies: `S` is correct and nonsolving and every lookup made
    /// while computing `H(S, P, V)` hits `dom(S)`.
    pub fn h_step_applies(&self, lang: &Language, cr: &[CriticalFormula]) -> bool {
        let s = &self.hs.s;
        if !is_correct(lang, s) || is_solving(s, cr) {
            return false;
        }
        let rec = Recording::new(s);
        let choice = match choose_in(lang, &self.hs, cr, &rec) {
            Ok(Some(c)) => c,
            _ => return false,
        };
        if !rec.missed().is_empty() {
            return false;
        }
        match RankCase::of(&choice.e) {
            RankCase::OmegaNeg => {
                let n = choice.e.witness_point().expect("rank Ω term");
                s.contains(&Canon::Form(n.clone()))
                    && s.pos_term_omega().domain().all(|c| {
                        let m = c.witness_point().expect("rank Ω term");
                        s.contains(&Canon::Form(m.clone()))
                    })
            }
            RankCase::OmegaPos => match &choice.e {
                Canon::Form(n) => s.contains(&lang.witness_canon(n.clone())),
                Canon::Term(..) => unreachable!(),
            },
            RankCase::Low | RankCase::High => true,
        }
    }

    /// `H(Θ)`, when the H-step applies. New flagged entries get `t`.
    pub fn h(&self, lang: &Language, cr: &[CriticalFormula]) -> Option<Sequent> {
        if !self.h_step_applies(lang, cr) {
            return None;
        }
        let choice = choose_in(lang, &self.hs, cr, &self.hs.s.standard()).ok()??;
        let next = apply(&self.hs, &choice.e, &choice.v);
        let flags = next
            .s
            .iter()
            .filter(|(e, v)| needs_flag(e, v))
            .map(|(e, _)| (e.clone(), self.flags.get(e).copied().unwrap_or(Flag::T)))
            .collect();
        Some(Sequent { hs: next, flags })
    }

    /// `e ∈ dom(S)` of rank `r(Θ)` whose value differs or vanishes in `H(Θ)`.
    pub fn active_expressions(&self, lang: &Language, cr: &[CriticalFormula]) -> Option<Vec<Canon>> {
        let next = self.h(lang, cr)?;
        let choice = choose_in(lang, &self.hs, cr, &self.hs.s.standard()).ok()??;
        let r = choice.e.rank();
        Some(
            self.hs
                .s
                .iter()
                .filter(|(e, v)| e.rank() == r && next.hs.s.get(e) != Some(*v))
                .map(|(e, _)| e.clone())
                .collect(),
        )
    }

    /// Every axiom the sequent is an instance of.
    pub fn classify_axiom(&self, lang: &Language, cr: &[CriticalFormula]) -> Vec<AxiomInstance> {
        let mut out = Vec::new();
        if is_ci(lang, &self.hs.s) {
            out.push(AxiomInstance::AxF);
        }
        if is_solving(&self.hs.s, cr) {
            out.push(AxiomInstance::AxS);
        }
        if let Some(active) = self.active_expressions(lang, cr) {
            if active.iter().any(|e| self.flag(e) == Some(Flag::F)) {
                if let Ok(Some(c)) = choose_in(lang, &self.hs, cr, &self.hs.s.standard()) {
                    out.push(AxiomInstance::AxH { e: c.e, v: c.v });
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Json {
        let (p, v) = self.hs.hist.to_json();
        let flags: Vec<Json> = self
            .hs
            .s
            .sorted_entries()
            .into_iter()
            .filter_map(|(e, _)| self.flags.get(e).map(|f| json!([e.to_string(), f.to_string()])))
            .collect();
        json!({ "S": subst_to_json(&self.hs.s), "P": p, "V": v, "F": flags })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomInstance {
    AxF,
    AxS,
    AxH { e: Canon, v: Value },
}

/// `ω·ρ + count`, compared lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Measure {
    pub rho: usize,
    pub count: usize,
}

/// `F(Θ, C) = C ∪ {F(e, u) : (e, u) ∈ Θ_S, e a term}`, without duplicates.
pub fn formula_set(lang: &Language, theta: &Sequent, c: &[Formula]) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::new();
    let from_s = theta.s().iter().filter(|(e, _)| e.is_term()).map(|(e, u)| {
        correctness_formula(lang, e, u).expect("substitution entries are type-checked")
    });
    for f in c.iter().cloned().chain(from_s) {
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

/// `d(φ)`: the number of `t ∈ I` atoms and Skolem terms in `φ`.
pub fn d(phi: &Formula) -> usize {
    phi.expression_count()
}

/// `d_r(φ)`.
pub fn d_r(phi: &Formula, r: usize) -> usize {
    if phi.simple_rank() == r {
        d(phi)
    } else {
        0
    }
}

pub fn rho(lang: &Language, theta: &Sequent, c: &[Formula]) -> usize {
    formula_set(lang, theta, c)
        .iter()
        .map(|f| reduce_formula(f, theta.s()).simple_rank())
        .max()
        .unwrap_or(0)
}

/// `ν(Θ, C)`, reading the aggregate over `F(Θ, C)` as a sum.
pub fn nu(lang: &Language, theta: &Sequent, c: &[Formula]) -> Measure {
    let reduced: Vec<Formula> = formula_set(lang, theta, c)
        .iter()
        .map(|f| reduce_formula(f, theta.s()))
        .collect();
    let rho = reduced.iter().map(Formula::simple_rank).max().unwrap_or(0);
    let count = reduced.iter().map(|f| d_r(f, rho)).sum();
    Measure { rho, count }
}
