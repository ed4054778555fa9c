use std::fmt;

/// Ordinal rank of a Skolem symbol or canonical expression.
///
/// The derived order is the intended one: every `Fin` lies below `Omega`,
/// which lies below every `OmegaPlus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rank {
    Fin(usize),
    Omega,
    /// `OmegaPlus(n)` is the ordinal `Ω + n + 1`.
    OmegaPlus(usize),
}

impl Rank {
    pub fn is_omega(self) -> bool {
        self == Rank::Omega
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Rank::Fin(n) => write!(f, "{}", n),
            Rank::Omega => write!(f, "W"),
            Rank::OmegaPlus(n) => write!(f, "W+{}", n + 1),
        }
    }
}
