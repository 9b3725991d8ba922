//! Terms, orderings, empirical point sets, evaluation maps and monic polynomials.

mod eval;
mod ordering;
mod points;
mod polynomial;
mod term;

pub use eval::{eval_matrix, eval_partial, eval_term, partial_matrix};
pub use ordering::{next_candidate, OrderKind, TermOrdering};
pub use points::EmpiricalPointSet;
pub use polynomial::MonicPolynomial;
pub use term::Term;
