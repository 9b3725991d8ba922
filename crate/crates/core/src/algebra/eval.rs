use nalgebra::{DMatrix, DVector};

use super::term::Term;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn check_dim<T: Scalar>(t: &Term, pts: &DMatrix<T>) -> Result<()> {
    if t.nvars() != pts.ncols() {
        return Err(Error::DimensionMismatch {
            expected: pts.ncols(),
            found: t.nvars(),
        });
    }
    Ok(())
}

/// Evaluation vector `t(X)` over the rows of `pts`.
pub fn eval_term<T: Scalar>(t: &Term, pts: &DMatrix<T>) -> Result<DVector<T>> {
    check_dim(t, pts)?;
    Ok(DVector::from_fn(pts.nrows(), |i, _| {
        t.eval(pts.row(i).iter().copied())
    }))
}

/// Evaluation matrix `M_G(X)`: entry `(i, j)` is `g_j(p_i)`.
pub fn eval_matrix<T: Scalar>(terms: &[Term], pts: &DMatrix<T>) -> Result<DMatrix<T>> {
    if terms.is_empty() {
        return Err(Error::InvalidInput(
            "evaluation matrix of an empty term list".into(),
        ));
    }
    for t in terms {
        check_dim(t, pts)?;
    }
    Ok(DMatrix::from_fn(pts.nrows(), terms.len(), |i, j| {
        terms[j].eval(pts.row(i).iter().copied())
    }))
}

/// Evaluation of `∂_var t` at the point given as a coordinate iterator.
pub fn eval_partial<T: Scalar>(t: &Term, var: usize, point: impl IntoIterator<Item = T>) -> T {
    match t.formal_partial(var) {
        Some((c, d)) => T::from_usize_lossy(c as usize) * d.eval(point),
        None => T::zero(),
    }
}

/// Evaluation matrix of the formal partials `∂_var G`.
pub fn partial_matrix<T: Scalar>(
    terms: &[Term],
    var: usize,
    pts: &DMatrix<T>,
) -> Result<DMatrix<T>> {
    for t in terms {
        check_dim(t, pts)?;
    }
    Ok(DMatrix::from_fn(pts.nrows(), terms.len(), |i, j| {
        eval_partial(&terms[j], var, pts.row(i).iter().copied())
    }))
}
