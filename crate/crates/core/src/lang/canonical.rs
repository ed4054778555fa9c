use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use super::expr::{Formula, SkolemSymbol, Term};
use super::rank::Rank;

/// A canonical expression: a Skolem term over numerals, or an atom `n ∈ I`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Canon {
    Term(Arc<SkolemSymbol>, Vec<BigUint>),
    Form(BigUint),
}

impl Canon {
    /// Recognises `c(n⃗)` with every argument a numeral.
    pub fn from_term(t: &Term) -> Option<Canon> {
        match t {
            Term::Skolem(c, args) => {
                let nums = args
                    .iter()
                    .map(|a| a.as_numeral().cloned())
                    .collect::<Option<Vec<_>>>()?;
                Some(Canon::Term(c.clone(), nums))
            }
            _ => None,
        }
    }

    pub fn rank(&self) -> Rank {
        match self {
            Canon::Term(c, _) => c.rank(),
            Canon::Form(_) => Rank::Omega,
        }
    }

    pub fn is_term(&self) -> bool {
        matches!(self, Canon::Term(..))
    }

    pub fn is_formula(&self) -> bool {
        matches!(self, Canon::Form(_))
    }

    /// `Some(n)` when this is the rank Ω term `c_n`.
    pub fn witness_point(&self) -> Option<&BigUint> {
        match self {
            Canon::Term(c, args) if c.is_inductive_witness() => args.first(),
            _ => None,
        }
    }

    pub fn simple_rank(&self) -> usize {
        match self {
            Canon::Term(c, _) => c.level(),
            Canon::Form(_) => 0,
        }
    }

    pub fn to_term(&self) -> Option<Term> {
        match self {
            Canon::Term(c, args) => Some(Term::Skolem(
                c.clone(),
                args.iter().cloned().map(Term::Num).collect(),
            )),
            Canon::Form(_) => None,
        }
    }

    pub fn to_formula(&self) -> Option<Formula> {
        match self {
            Canon::Form(n) => Some(Formula::In(Term::Num(n.clone()))),
            Canon::Term(..) => None,
        }
    }
}

impl fmt::Display for Canon {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Canon::Term(..) => write!(f, "{}", self.to_term().unwrap()),
            Canon::Form(n) => write!(f, "(in {})", n),
        }
    }
}
