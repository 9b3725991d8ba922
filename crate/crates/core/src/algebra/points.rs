use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `s` empirical points in `R^n` sharing a uniform tolerance `epsilon`.
///
/// Points are the rows of an `s x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPointSet<T: Scalar> {
    points: DMatrix<T>,
    epsilon: T,
}

impl<T: Scalar> EmpiricalPointSet<T> {
    /// Validates and wraps the points. Two points whose ε-boxes intersect
    /// (`‖p_i − p_j‖_∞ <= 2ε`) are rejected.
    pub fn new(points: DMatrix<T>, epsilon: T) -> Result<Self> {
        let (s, n) = points.shape();
        if s == 0 || n == 0 {
            return Err(Error::InvalidInput(format!(
                "point set must be non-empty (got {s} points in dimension {n})"
            )));
        }
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(Error::InvalidInput(
                "epsilon must be a positive finite number".into(),
            ));
        }
        if let Some(i) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite coordinate in point {}",
                i % s
            )));
        }
        let two_eps = epsilon + epsilon;
        for i in 0..s {
            for j in (i + 1)..s {
                let d = (0..n)
                    .map(|c| (points[(i, c)] - points[(j, c)]).abs())
                    .fold(T::zero(), |a, b| a.max(b));
                if d <= two_eps {
                    return Err(Error::NotDistinct {
                        first: i,
                        second: j,
                        distance: d.to_f64_lossy(),
                    });
                }
            }
        }
        Ok(Self { points, epsilon })
    }

    /// Builds a set from row slices.
    pub fn from_rows(rows: &[Vec<T>], epsilon: T) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        let m = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
        Self::new(m, epsilon)
    }

    pub fn points(&self) -> &DMatrix<T> {
        &self.points
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    /// Number of points `s`.
    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    /// Indices of points that sit exactly at the origin.
    pub fn origin_points(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.points.row(i).iter().all(|v| *v == T::zero()))
            .collect()
    }
}
