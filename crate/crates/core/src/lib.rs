//! The epsilon-substitution method for the theory ID1 of one inductive
//! definition: the Skolemized language, reduction under epsilon-substitutions,
//! the H-process over a fixed list of critical formulas, and the finitary
//! predicates on sequents together with their termination measures.

pub mod lang;
pub mod subst;
pub mod history;
pub mod hproc;
pub mod sequents;
pub mod frontend;
