//! Least-squares residual of a candidate term over a support, viewed as a
//! function of the perturbations applied to the data points.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{eval_matrix, eval_partial, eval_term, EmpiricalPointSet, Term};
use crate::error::{Error, Result};
use crate::numlin::{has_full_numerical_rank, LsqFactor};
use crate::scalar::Scalar;

/// Perturbation variables for `s` points in `R^n`.
///
/// Stored coordinate-major, `(e_11, …, e_s1, e_12, …, e_s2, …, e_sn)`, so the
/// entry for point `k` and coordinate `j` lives at `j * s + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorVector<T: Scalar> {
    values: DVector<T>,
    npoints: usize,
}

type Factored<T> = (DMatrix<T>, LsqFactor<T>, DVector<T>, DVector<T>);
impl<T: Scalar> ErrorVector<T> {
    pub fn zeros(npoints: usize, dim: usize) -> Self {
        Self {
            values: DVector::zeros(npoints * dim),
            npoints,
        }
    }

    /// Wraps a coordinate-major vector.
    pub fn from_vector(values: DVector<T>, npoints: usize) -> Result<Self> {
        if npoints == 0 || !values.len().is_multiple_of(npoints) {
            return Err(Error::DimensionMismatch {
                expected: npoints,
                found: values.len(),
            });
        }
        Ok(Self { values, npoints })
    }

    /// Builds the vector from an `s x n` matrix whose row `k` is `e_k`.
    pub fn from_matrix(m: &DMatrix<T>) -> Self {
        let (s, n) = m.shape();
        Self {
            values: DVector::from_fn(s * n, |idx, _| m[(idx % s, idx / s)]),
            npoints: s,
        }
    }

    pub fn as_vector(&self) -> &DVector<T> {
        &self.values
    }

    pub fn npoints(&self) -> usize {
        self.npoints
    }

    pub fn dim(&self) -> usize {
        self.values.len() / self.npoints
    }

    pub fn get(&self, point: usize, coord: usize) -> T {
        self.values[coord * self.npoints + point]
    }

    /// `e_k`, the perturbation of point `k`.
    pub fn point(&self, k: usize) -> Vec<T> {
        (0..self.dim()).map(|j| self.get(k, j)).collect()
    }

    /// Row `k` holds `e_k`.
    pub fn to_matrix(&self) -> DMatrix<T> {
        DMatrix::from_fn(self.npoints, self.dim(), |k, j| self.get(k, j))
    }

    pub fn sup_norm(&self) -> T {
        self.values.amax()
    }

    /// Membership in the box `Q_ε`.
    pub fn is_admissible(&self, epsilon: T) -> bool {
        self.sup_norm() <= epsilon
    }
}

/// `X(e)`: each point `p_k` shifted by `e_k`.
pub fn perturbed_points<T: Scalar>(
    x: &EmpiricalPointSet<T>,
    e: &ErrorVector<T>,
) -> Result<DMatrix<T>> {
    if e.npoints() != x.len() || e.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.len() * x.dim(),
            found: e.as_vector().len(),
        });
    }
    Ok(x.points() + e.to_matrix())
}

/// Data needed to evaluate the residual `ρ(e) = t(e) − M_O(e) α(e)`.
#[derive(Debug, Clone)]
pub struct ResidualContext<T: Scalar> {
    points: EmpiricalPointSet<T>,
    support: Vec<Term>,
    candidate: Term,
    /// Support positions that take part in the fit.
    fit: Vec<usize>,
    /// Points whose residual component is tracked.
    rows: Vec<usize>,
    /// Positions `j * s + k` of the free error variables.
    free: Vec<usize>,
}

/// Which components must beat the first-order bound for a term to be excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExclusionMode {
    /// Every component `|ρ_i(0)|` must exceed its bound.
    AllComponents,
    /// One component exceeding its bound is enough.
    #[default]
    AnyComponent,
}

/// Result of the first-order exclusion test at `e = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Exclusion<T: Scalar> {
    pub excluded: bool,
    pub rho0: DVector<T>,
    pub bound: DVector<T>,
}

impl<T: Scalar> ResidualContext<T> {
    pub fn new(points: &EmpiricalPointSet<T>, support: Vec<Term>, candidate: Term) -> Result<Self> {
        let n = points.dim();
        if support.is_empty() {
            return Err(Error::InvalidInput(
                "support must contain at least one term".into(),
            ));
        }
        if let Some(t) = support.iter().chain([&candidate]).find(|t| t.nvars() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: t.nvars(),
            });
        }
        if support.contains(&candidate) {
            return Err(Error::InvalidInput(format!(
                "candidate {candidate} already in the support"
            )));
        }
        let s = points.len();
        Ok(Self {
            points: points.clone(),
            fit: (0..support.len()).collect(),
            support,
            candidate,
            rows: (0..s).collect(),
            free: (0..s * n).collect(),
        })
    }

    /// Pins the coefficient of `1` to zero. Points lying exactly at the origin
    /// then satisfy the fitted polynomial identically; their error variables are
    /// frozen at zero and their (identically zero) residual components dropped.
    pub fn with_zero_constant(mut self) -> Self {
        self.fit.retain(|&i| !self.support[i].is_one());
        if self.candidate.is_one() {
            return self;
        }
        let origin = self.points.origin_points();
        let s = self.points.len();
        self.rows.retain(|k| !origin.contains(k));
        self.free.retain(|idx| !origin.contains(&(idx % s)));
        self
    }

    pub fn points(&self) -> &EmpiricalPointSet<T> {
        &self.points
    }

    pub fn support(&self) -> &[Term] {
        &self.support
    }

    pub fn candidate(&self) -> &Term {
        &self.candidate
    }

    /// Number of residual components tracked.
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Number of free error variables.
    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    /// Point indices behind the residual components.
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    /// Scatters free variables into a full error vector.
    pub fn expand(&self, x: &DVector<T>) -> Result<ErrorVector<T>> {
        if x.len() != self.free.len() {
            return Err(Error::DimensionMismatch {
                expected: self.free.len(),
                found: x.len(),
            });
        }
        let mut e = ErrorVector::zeros(self.points.len(), self.points.dim());
        for (v, &idx) in x.iter().zip(&self.free) {
            e.values[idx] = *v;
        }
        Ok(e)
    }

    /// Gathers the free variables of a full error vector.
    pub fn restrict(&self, e: &ErrorVector<T>) -> DVector<T> {
        DVector::from_iterator(self.free.len(), self.free.iter().map(|&i| e.values[i]))
    }

    fn fit_terms(&self) -> Vec<Term> {
        self.fit.iter().map(|&i| self.support[i].clone()).collect()
    }

    fn tracked_points(&self, e: &ErrorVector<T>) -> Result<DMatrix<T>> {
        let all = perturbed_points(&self.points, e)?;
        Ok(all.select_rows(self.rows.iter()))
    }

    /// `M_O(e)` restricted to the fitted columns and tracked rows.
    pub fn fit_matrix(&self, e: &ErrorVector<T>) -> Result<DMatrix<T>> {
        let pts = self.tracked_points(e)?;
        let terms = self.fit_terms();
        if terms.is_empty() {
            return Ok(DMatrix::zeros(pts.nrows(), 0));
        }
        eval_matrix(&terms, &pts)
    }

    /// Fit matrix, its factorization, candidate values and coefficients.
    fn factor(&self, e: &ErrorVector<T>) -> Result<Factored<T>> {
        let pts = self.tracked_points(e)?;
        let m = self.fit_matrix(e)?;
        let tv = eval_term(&self.candidate, &pts)?;
        let f = LsqFactor::new(&m)?;
        let alpha = f.coefficients(&tv);
        Ok((pts, f, alpha, tv))
    }

    fn full_alpha(&self, fit_alpha: &DVector<T>) -> DVector<T> {
        let mut a = DVector::zeros(self.support.len());
        for (v, &i) in fit_alpha.iter().zip(&self.fit) {
            a[i] = *v;
        }
        a
    }

    /// `(ρ(e), α(e))`, with `α` aligned to the full support (pinned entries 0).
    pub fn rho(&self, e: &ErrorVector<T>) -> Result<(DVector<T>, DVector<T>)> {
        let (_, f, alpha, tv) = self.factor(e)?;
        let rho = f.project_out(&tv);
        if rho.iter().any(|v| !v.is_finite()) {
            return Err(Error::Evaluation);
        }
        Ok((rho, self.full_alpha(&alpha)))
    }

    /// Jacobian of `ρ` with respect to the free error variables, assembled
    /// column by column from the least-squares factors without ever forming
    /// `ρ` symbolically.
    pub fn jacobian(&self, e: &ErrorVector<T>) -> Result<DMatrix<T>> {
        let (pts, f, alpha, tv) = self.factor(e)?;
        let rho = f.project_out(&tv);
        let fit = self.fit_terms();
        let s = self.points.len();
        let q = f.q();
        let mut jac = DMatrix::zeros(self.rows.len(), self.free.len());
        for (col, &idx) in self.free.iter().enumerate() {
            let (k, var) = (idx % s, idx / s);
            let Some(row) = self.rows.iter().position(|&r| r == k) else {
                continue;
            };
            let p: Vec<T> = pts.row(row).iter().copied().collect();
            let g = DVector::from_iterator(
                fit.len(),
                fit.iter().map(|t| eval_partial(t, var, p.iter().copied())),
            );
            // only row `k` of ∂t/∂e and ∂M/∂e is non-zero
            let d = eval_partial(&self.candidate, var, p.iter().copied()) - g.dot(&alpha);
            let mut c = -(q * q.row(row).transpose()) * d;
            c[row] += d;
            if !rho[row].is_zero() && !g.is_empty() {
                c -= f.pinv_transpose_times(&g) * rho[row];
            }
            jac.set_column(col, &c);
        }
        Ok(jac)
    }

    /// Membership of `e` in the domain: full numerical `(δ, k)`-rank of `M_O(e)`.
    pub fn in_domain(&self, e: &ErrorVector<T>, delta: T, k: T) -> bool {
        match self.fit_matrix(e) {
            Ok(m) => m.iter().all(|v| v.is_finite()) && has_full_numerical_rank(&m, delta, k),
            Err(_) => false,
        }
    }

    /// First-order test that `ρ(e) = 0` has no admissible solution: compares
    /// `|ρ(0)|` against `ε |I − M M†| Σ_k |∂_k t(0) − M_{∂_k O}(0) α(0)|`.
    pub fn exclusion_check(&self, epsilon: T, mode: ExclusionMode) -> Result<Exclusion<T>> {
        let zero = ErrorVector::zeros(self.points.len(), self.points.dim());
        let (pts, f, alpha, tv) = self.factor(&zero)?;
        let rho0 = f.project_out(&tv);
        let fit = self.fit_terms();
        let mut sum = DVector::zeros(pts.nrows());
        for var in 0..self.points.dim() {
            for i in 0..pts.nrows() {
                let p = || pts.row(i).iter().copied().collect::<Vec<_>>();
                let mut v = eval_partial(&self.candidate, var, p());
                for (t, a) in fit.iter().zip(alpha.iter()) {
                    v -= *a * eval_partial(t, var, p());
                }
                sum[i] += v.abs();
            }
        }
        let proj = f.complement_projector().abs();
        let bound = proj * sum * epsilon;
        // residual entries at rounding level count as zero, so a square fit
        // never excludes its candidate
        let floor = T::default_epsilon() * T::lit(16.0) * T::lit(pts.nrows() as f64) * tv.amax();
        let beats = rho0
            .iter()
            .zip(bound.iter())
            .map(|(r, b)| r.abs() > *b + floor);
        let excluded = match mode {
            ExclusionMode::AllComponents => {
                let mut all = beats.collect::<Vec<_>>();
                !all.is_empty() && all.drain(..).all(|b| b)
            }
            ExclusionMode::AnyComponent => beats.into_iter().any(|b| b),
        };
        Ok(Exclusion {
            excluded,
            rho0,
            bound,
        })
    }
}
