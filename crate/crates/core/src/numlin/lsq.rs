use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Thin QR of a tall matrix with full column rank, reused for every
/// least-squares quantity derived from it.
#[derive(Debug, Clone)]
pub struct LsqFactor<T: Scalar> {
    q: DMatrix<T>,
    r: DMatrix<T>,
}

/// Relative pivot tolerance of the triangular factors, in units of `eps·max(dim)`.
fn pivot_floor<T: Scalar>(r: &DMatrix<T>, dim: usize) -> (T, T) {
    let diag_max = r.diagonal().iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let diag_min = r
        .diagonal()
        .iter()
        .fold(T::max_value().unwrap(), |a, v| a.min(v.abs()));
    (
        diag_min,
        diag_max * T::eps() * T::from_usize_lossy(dim.max(1)),
    )
}

impl<T: Scalar> LsqFactor<T> {
    /// Factors `M` (`s x m`). Fails with [`Error::DomainViolation`] if `M` is
    /// wide or numerically rank deficient.
    pub fn new(m: &DMatrix<T>) -> Result<Self> {
        let (rows, cols) = m.shape();
        if cols == 0 {
            return Ok(Self {
                q: DMatrix::zeros(rows, 0),
                r: DMatrix::zeros(0, 0),
            });
        }
        if rows < cols || m.iter().any(|v| !v.is_finite()) {
            return Err(Error::DomainViolation);
        }
        let qr = m.clone().qr();
        let (q, r) = (qr.q(), qr.r());
        let (min, floor) = pivot_floor(&r, rows);
        if min <= floor {
            return Err(Error::DomainViolation);
        }
        Ok(Self { q, r })
    }

    pub fn q(&self) -> &DMatrix<T> {
        &self.q
    }

    pub fn r(&self) -> &DMatrix<T> {
        &self.r
    }

    /// `α = M†v`.
    pub fn coefficients(&self, v: &DVector<T>) -> DVector<T> {
        let qtv = self.q.transpose() * v;
        self.r
            .solve_upper_triangular(&qtv)
            .expect("triangular factor checked at construction")
    }

    /// `(I − M M†) v`.
    pub fn project_out(&self, v: &DVector<T>) -> DVector<T> {
        v - &self.q * (self.q.transpose() * v)
    }

    /// `(M†)ᵗ g = Q R⁻ᵗ g`.
    pub fn pinv_transpose_times(&self, g: &DVector<T>) -> DVector<T> {
        let y = self
            .r
            .tr_solve_upper_triangular(g)
            .expect("triangular factor checked at construction");
        &self.q * y
    }

    /// The projector `I − M M†` as an explicit `s x s` matrix.
    pub fn complement_projector(&self) -> DMatrix<T> {
        let s = self.q.nrows();
        DMatrix::identity(s, s) - &self.q * self.q.transpose()
    }
}

/// Least-squares fit `α = M†v` and residual `ρ = v − Mα`.
pub fn least_squares<T: Scalar>(
    m: &DMatrix<T>,
    v: &DVector<T>,
) -> Result<(DVector<T>, DVector<T>)> {
    if m.nrows() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: v.len(),
        });
    }
    let f = LsqFactor::new(m)?;
    Ok((f.coefficients(v), f.project_out(v)))
}

/// Minimal 2-norm solution of the underdetermined system `J h = b`, via a QR
/// factorisation of `Jᵗ`. Fails with [`Error::RankDrop`] if `J` loses row rank.
pub fn min_norm_solve<T: Scalar>(j: &DMatrix<T>, b: &DVector<T>) -> Result<DVector<T>> {
    let (m, n) = j.shape();
    if m != b.len() {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: b.len(),
        });
    }
    if m == 0 {
        return Ok(DVector::zeros(n));
    }
    if m > n {
        return Err(Error::RankDrop);
    }
    let qr = j.transpose().qr();
    let (q, r) = (qr.q(), qr.r());
    let (min, floor) = pivot_floor(&r, n);
    if !(min > floor) {
        return Err(Error::RankDrop);
    }
    let y = r.tr_solve_upper_triangular(b).ok_or(Error::RankDrop)?;
    Ok(q * y)
}
