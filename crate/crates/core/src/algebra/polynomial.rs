use nalgebra::{DMatrix, DVector};

use super::eval::eval_partial;
use super::ordering::TermOrdering;
use super::term::Term;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `f = t − Σ α_i t_i` with leading term `t` and support `O = (t_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonicPolynomial<T: Scalar> {
    leading: Term,
    support: Vec<Term>,
    alpha: DVector<T>,
}

impl<T: Scalar> MonicPolynomial<T> {
    pub fn new(leading: Term, support: Vec<Term>, alpha: DVector<T>) -> Result<Self> {
        if support.len() != alpha.len() {
            return Err(Error::DimensionMismatch {
                expected: support.len(),
                found: alpha.len(),
            });
        }
        if let Some(t) = support.iter().find(|t| t.nvars() != leading.nvars()) {
            return Err(Error::DimensionMismatch {
                expected: leading.nvars(),
                found: t.nvars(),
            });
        }
        if support.contains(&leading) {
            return Err(Error::InvalidInput(format!(
                "leading term {leading} also appears in the support"
            )));
        }
        Ok(Self {
            leading,
            support,
            alpha,
        })
    }

    pub fn leading_term(&self) -> &Term {
        &self.leading
    }

    pub fn support(&self) -> &[Term] {
        &self.support
    }

    /// The `α` vector, aligned with [`Self::support`].
    pub fn alpha(&self) -> &DVector<T> {
        &self.alpha
    }

    pub fn nvars(&self) -> usize {
        self.leading.nvars()
    }

    /// Monomial-basis coefficient of a support term (i.e. `−α_i`).
    pub fn coefficient_of(&self, term: &Term) -> T {
        if term == &self.leading {
            return T::one();
        }
        self.support
            .iter()
            .position(|t| t == term)
            .map_or(T::zero(), |i| -self.alpha[i])
    }

    /// All `(term, coefficient)` pairs, leading term first, then the support
    /// in descending order under `ord`.
    pub fn terms_descending(&self, ord: &TermOrdering) -> Vec<(Term, T)> {
        let mut out: Vec<(Term, T)> = self
            .support
            .iter()
            .zip(self.alpha.iter())
            .map(|(t, a)| (t.clone(), -*a))
            .collect();
        out.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        out.insert(0, (self.leading.clone(), T::one()));
        out
    }

    /// 2-norm of the full coefficient vector, leading 1 included.
    pub fn coefficient_norm(&self) -> T {
        (T::one() + self.alpha.norm_squared()).sqrt()
    }

    pub fn eval_at(&self, point: &[T]) -> T {
        let mut v = self.leading.eval(point.iter().copied());
        for (t, a) in self.support.iter().zip(self.alpha.iter()) {
            v -= *a * t.eval(point.iter().copied());
        }
        v
    }

    /// `f(X)` over the rows of `pts`.
    pub fn eval(&self, pts: &DMatrix<T>) -> Result<DVector<T>> {
        if pts.ncols() != self.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.nvars(),
                found: pts.ncols(),
            });
        }
        let mut row = vec![T::zero(); pts.ncols()];
        Ok(DVector::from_fn(pts.nrows(), |i, _| {
            row.iter_mut()
                .zip(pts.row(i).iter())
                .for_each(|(d, s)| *d = *s);
            self.eval_at(&row)
        }))
    }

    /// `‖f(X)‖₂ / ‖f‖`, the almost-vanishing measure.
    pub fn normalized_residual(&self, pts: &DMatrix<T>) -> Result<T> {
        Ok(self.eval(pts)?.norm() / self.coefficient_norm())
    }

    pub fn gradient_at(&self, point: &[T]) -> DVector<T> {
        DVector::from_fn(self.nvars(), |k, _| {
            let mut g = eval_partial(&self.leading, k, point.iter().copied());
            for (t, a) in self.support.iter().zip(self.alpha.iter()) {
                g -= *a * eval_partial(t, k, point.iter().copied());
            }
            g
        })
    }

    /// Every term with its monomial coefficient, leading term included.
    pub(crate) fn monomials(&self) -> impl Iterator<Item = (&Term, T)> {
        std::iter::once((&self.leading, T::one())).chain(
            self.support
                .iter()
                .zip(self.alpha.iter())
                .map(|(t, a)| (t, -*a)),
        )
    }
}
