//! Substitution histories `(P, V)` and historical substitutions `(S, P, V)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use serde_json::{json, Value as Json};

use crate::lang::{Canon, Language, Term};
use crate::subst::{models, Substitution, Value};

/// `P` lists the points `n` of the formulas `n ∈ I` in the order they were
/// set to `⊤`; `V(n)` is the negative rank-Ω part saved when `n ∈ I` was added.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct History {
    p: Vec<BigUint>,
    v: BTreeMap<BigUint, Substitution>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(p: Vec<BigUint>, v: BTreeMap<BigUint, Substitution>) -> Self {
        History { p, v }
    }

    pub fn p(&self) -> &[BigUint] {
        &self.p
    }

    pub fn v(&self, n: &BigUint) -> Option<&Substitution> {
        self.v.get(n)
    }

    pub fn v_map(&self) -> &BTreeMap<BigUint, Substitution> {
        &self.v
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn position(&self, n: &BigUint) -> Option<usize> {
        self.p.iter().position(|m| m == n)
    }

    /// `P ⌢ ⟨n ∈ I⟩` with `V(n ∈ I) = saved`.
    pub fn push(&mut self, n: BigUint, saved: Substitution) {
        self.v.insert(n.clone(), saved);
        self.p.push(n);
    }

    /// Restricts to the first `len` entries of `P`.
    pub fn truncate(&self, len: usize) -> History {
        let p: Vec<BigUint> = self.p[..len.min(self.p.len())].to_vec();
        let v = p
            .iter()
            .filter_map(|n| self.v.get(n).map(|s| (n.clone(), s.clone())))
            .collect();
        History { p, v }
    }

    /// The longest initial segment of `P` not containing `n`.
    pub fn prefix_without(&self, n: &BigUint) -> History {
        self.truncate(self.position(n).unwrap_or(self.p.len()))
    }

    /// `P` as `[n0, n1, ...]` and `V` as `{n: [[e, v], ...]}`, keys in `P` order.
    pub fn to_json(&self) -> (Json, Json) {
        let p = Json::Array(self.p.iter().map(|n| json!(n.to_string())).collect());
        let mut v = serde_json::Map::new();
        for n in &self.p {
            if let Some(s) = self.v.get(n) {
                v.insert(n.to_string(), subst_to_json(s));
            }
        }
        (p, Json::Object(v))
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "P = <")?;
        for (i, n) in self.p.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(in {})", n)?;
        }
        write!(f, ">")?;
        for n in &self.p {
            if let Some(s) = self.v.get(n) {
                write!(f, "; V(in {}) = {}", n, s)?;
            }
        }
        Ok(())
    }
}

/// A substitution as a list of `[expression, value]` pairs sorted by rank.
pub fn subst_to_json(s: &Substitution) -> Json {
    Json::Array(
        s.sorted_entries()
            .into_iter()
            .map(|(e, v)| json!([e.to_string(), v.to_string()]))
            .collect(),
    )
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct HistoricalSubstitution {
    pub s: Substitution,
    pub hist: History,
}

impl HistoricalSubstitution {
    pub fn new(s: Substitution, hist: History) -> Self {
        HistoricalSubstitution { s, hist }
    }

    pub fn empty() -> Self {
        Self::default()
    }
}

/// For each `i`, `B(0, n_i, I)` holds under the standard extension of
/// `{(n_j ∈ I, ⊤) : j < i}`.
pub fn is_admissible(p: &[BigUint], lang: &Language) -> bool {
    first_inadmissible(p, lang).is_none()
}

fn first_inadmissible(p: &[BigUint], lang: &Language) -> Option<usize> {
    let mut prefix = Substitution::new();
    for (i, n) in p.iter().enumerate() {
        let b = lang.clause_at(&Term::zero(), &Term::Num(n.clone()));
        if !models(&prefix.standard(), &b) {
            return Some(i);
        }
        prefix
            .insert(Canon::Form(n.clone()), Value::Top)
            .expect("formula entries accept T");
    }
    None
}

/// Violations of the structural invariants and of admissibility; empty when
/// the historical substitution is well formed.
pub fn validate(hs: &HistoricalSubstitution, lang: &Language) -> Vec<String> {
    let mut out = Vec::new();
    let p = hs.hist.p();

    let mut sorted: Vec<&BigUint> = p.iter().collect();
    sorted.sort();
    sorted.dedup();
    let positive: Vec<BigUint> = hs
        .s
        .pos_form_omega()
        .domain()
        .filter_map(|e| match e {
            Canon::Form(n) => Some(n.clone()),
            Canon::Term(..) => None,
        })
        .collect();
    if sorted.len() != p.len() || sorted.into_iter().cloned().collect::<Vec<_>>() != positive {
        out.push("P does not order S^{+,form}".to_string());
    }

    let keys: Vec<&BigUint> = hs.hist.v_map().keys().collect();
    let mut in_p: Vec<&BigUint> = p.iter().collect();
    in_p.sort();
    in_p.dedup();
    if keys != in_p {
        out.push("dom(V) differs from the formulas in P".to_string());
    }

    for (n, s) in hs.hist.v_map() {
        if s.negative_omega() != *s {
            out.push(format!("V not negative-Ω at (in {})", n));
        }
    }

    if let Some(i) = first_inadmissible(p, lang) {
        out.push(format!("P is not admissible at position {} (in {})", i, p[i]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{Formula, InductiveClause};
    use proptest::prelude::*;

    fn lang_with(body: Formula) -> Language {
        Language::new(InductiveClause::new(body).unwrap())
    }

    fn nat() -> Language {
        lang_with(Formula::or(
            Formula::not(Formula::lt(Term::Var(0), Term::Var(1))),
            Formula::In(Term::Var(0)),
        ))
    }

    fn n(k: u64) -> BigUint {
        BigUint::from(k)
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(&[], &nat()));
        assert!(is_admissible(&[n(0)], &nat()));
        assert!(!is_admissible(&[n(0)], &lang_with(Formula::In(Term::Var(0)))));
        // 1 needs 0 ∈ I first
        assert!(!is_admissible(&[n(1)], &nat()));
        assert!(is_admissible(&[n(0), n(1)], &nat()));
        assert!(is_admissible(&[n(0), n(2)], &nat()));
    }

    #[test]
    fn validate_examples() {
        let lang = nat();
        assert!(validate(&HistoricalSubstitution::empty(), &lang).is_empty());

        let s = Substitution::from_entries([(Canon::Form(n(3)), Value::Top)]).unwrap();
        let d = validate(&HistoricalSubstitution::new(s, History::new()), &lang);
        assert_eq!(d, vec!["P does not order S^{+,form}".to_string()]);

        let mut hist = History::new();
        let bad = Substitution::from_entries([(Canon::Form(n(7)), Value::Top)]).unwrap();
        hist.push(n(0), bad);
        let s = Substitution::from_entries([(Canon::Form(n(0)), Value::Top)]).unwrap();
        let d = validate(&HistoricalSubstitution::new(s, hist), &lang);
        assert_eq!(d, vec!["V not negative-Ω at (in 0)".to_string()]);
    }

    #[test]
    fn prefix_without() {
        let mut h = History::new();
        for k in [4, 2, 9] {
            h.push(n(k), Substitution::new());
        }
        let p = h.prefix_without(&n(2));
        assert_eq!(p.p(), &[n(4)]);
        assert!(p.v(&n(9)).is_none());
        assert_eq!(h.prefix_without(&n(5)), h);
        let (pj, vj) = h.to_json();
        assert_eq!(pj.to_string(), r#"["4","2","9"]"#);
        assert_eq!(vj.to_string(), r#"{"4":[],"2":[],"9":[]}"#);
    }

    fn points() -> impl Strategy<Value = Vec<BigUint>> {
        proptest::collection::vec(0u64..6, 0..6).prop_map(|v| {
            let mut seen = Vec::new();
            for k in v {
                if !seen.contains(&n(k)) {
                    seen.push(n(k));
                }
            }
            seen
        })
    }

    proptest! {
        #[test]
        fn admissibility_is_prefix_closed(p in points()) {
            let lang = nat();
            if is_admissible(&p, &lang) {
                for k in 0..p.len() {
                    prop_assert!(is_admissible(&p[..k], &lang));
                }
            }
        }

        // I occurs positively in B, so more ⊤ entries never falsify B(0,n,I).
        #[test]
        fn clause_is_monotone_in_i(p in points(), extra in points(), m in 0u64..8) {
            let lang = nat();
            let b = lang.clause_at(&Term::zero(), &Term::num(m));
            let mut small = Substitution::new();
            for k in &p {
                small.insert(Canon::Form(k.clone()), Value::Top).unwrap();
            }
            let mut big = small.clone();
            for k in &extra {
                big.insert(Canon::Form(k.clone()), Value::Top).unwrap();
            }
            if models(&small.standard(), &b) {
                prop_assert!(models(&big.standard(), &b));
            }
        }
    }
}
