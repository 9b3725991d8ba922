use std::cmp::Ordering;

use super::term::Term;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OrderKind {
    #[default]
    DegLex,
    DegRevLex,
    Lex,
}

/// A term ordering: a comparison strategy plus a ranking of the variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermOrdering {
    kind: OrderKind,
    /// Variable indices listed from the smallest variable to the largest.
    ascending: Vec<usize>,
}

impl TermOrdering {
    /// `ascending` lists variable indices from smallest to largest, e.g.
    /// `[1, 0]` over `(x, y)` means `y < x`.
    pub fn new(kind: OrderKind, ascending: Vec<usize>) -> Result<Self> {
        let n = ascending.len();
        let mut seen = vec![false; n];
        for &v in &ascending {
            if v >= n || seen[v] {
                return Err(Error::InvalidInput(format!(
                    "variable priority {ascending:?} is not a permutation of 0..{n}"
                )));
            }
            seen[v] = true;
        }
        Ok(Self { kind, ascending })
    }

    /// Ordering over `n` variables with `x_1 < x_2 < ... < x_n`.
    pub fn natural(kind: OrderKind, n: usize) -> Self {
        Self {
            kind,
            ascending: (0..n).collect(),
        }
    }

    pub fn deglex(ascending: Vec<usize>) -> Result<Self> {
        Self::new(OrderKind::DegLex, ascending)
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn ascending(&self) -> &[usize] {
        &self.ascending
    }

    pub fn nvars(&self) -> usize {
        self.ascending.len()
    }

    /// Checked comparison.
    pub fn compare(&self, a: &Term, b: &Term) -> Result<Ordering> {
        let n = self.nvars();
        for t in [a, b] {
            if t.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: t.nvars(),
                });
            }
        }
        Ok(self.cmp(a, b))
    }

    /// Comparison for terms already known to have the right dimension.
    pub fn cmp(&self, a: &Term, b: &Term) -> Ordering {
        debug_assert_eq!(a.nvars(), self.nvars());
        debug_assert_eq!(b.nvars(), self.nvars());
        let (ea, eb) = (a.exponents(), b.exponents());
        let lex = || {
            self.ascending
                .iter()
                .rev()
                .map(|&v| ea[v].cmp(&eb[v]))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        };
        match self.kind {
            OrderKind::Lex => lex(),
            OrderKind::DegLex => a.degree().cmp(&b.degree()).then_with(lex),
            OrderKind::DegRevLex => a.degree().cmp(&b.degree()).then_with(|| {
                self.ascending
                    .iter()
                    .map(|&v| eb[v].cmp(&ea[v]))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            }),
        }
    }
}

/// One step of candidate generation: pushes every `x_i * t` that is not a
/// multiple of a pending term into `pending` (kept sorted ascending), then
/// pops and returns the smallest pending term.
pub fn next_candidate(t: &Term, pending: &mut Vec<Term>, ord: &TermOrdering) -> Result<Term> {
    if t.nvars() != ord.nvars() {
        return Err(Error::DimensionMismatch {
            expected: ord.nvars(),
            found: t.nvars(),
        });
    }
    for var in 0..t.nvars() {
        let cand = t.mul_var(var);
        if pending.iter().any(|p| p.divides(&cand)) {
            continue;
        }
        let pos = pending.partition_point(|p| ord.cmp(p, &cand).is_lt());
        pending.insert(pos, cand);
    }
    if pending.is_empty() {
        return Err(Error::Internal("no candidate terms left"));
    }
    Ok(pending.remove(0))
}
