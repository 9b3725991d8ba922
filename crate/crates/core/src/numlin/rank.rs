use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Outcome of a numerical `(δ, k)`-rank determination.
#[derive(Debug, Clone, PartialEq)]
pub struct RankDecision<T: Scalar> {
    pub rank: usize,
    /// Singular values in descending order.
    pub singular_values: DVector<T>,
    pub delta: T,
    pub k: T,
    pub full_rank: bool,
}

/// `q(t, r) = sqrt(r (t − r) + min(r, t − r))`.
pub fn q_factor<T: Scalar>(t: usize, r: usize) -> T {
    assert!(r <= t, "q_factor requires r <= t");
    T::from_usize_lossy(r * (t - r) + r.min(t - r)).sqrt()
}

/// Singular values sorted in descending order.
pub fn singular_values<T: Scalar>(a: &DMatrix<T>) -> DVector<T> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return DVector::zeros(0);
    }
    let mut sv: Vec<T> = a
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    DVector::from_vec(sv)
}

/// Spectral norm `‖A‖₂`.
pub fn spectral_norm<T: Scalar>(a: &DMatrix<T>) -> T {
    singular_values(a)
        .iter()
        .copied()
        .next()
        .unwrap_or_else(T::zero)
}

/// What to do when a singular value falls inside `[δ, kδ]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GapPolicy {
    /// Report [`Error::NoGap`].
    Strict,
    /// Count only the singular values above `kδ`, treating the ambiguous ones
    /// as negligible.
    #[default]
    CountAboveUpper,
}

/// Largest `r` with `σ_r > kδ > δ > σ_{r+1}`.
///
/// Fails with [`Error::NoGap`] when some singular value lies in `[δ, kδ]`.
pub fn numerical_rank<T: Scalar>(a: &DMatrix<T>, delta: T, k: T) -> Result<RankDecision<T>> {
    numerical_rank_with(a, delta, k, GapPolicy::Strict)
}

/// [`numerical_rank`] with an explicit policy for spectra without a gap.
pub fn numerical_rank_with<T: Scalar>(
    a: &DMatrix<T>,
    delta: T,
    k: T,
    policy: GapPolicy,
) -> Result<RankDecision<T>> {
    check_thresholds(delta, k)?;
    let sv = singular_values(a);
    let upper = k * delta;
    let in_gap = sv
        .iter()
        .enumerate()
        .find(|(_, v)| **v >= delta && **v <= upper);
    if let (GapPolicy::Strict, Some((j, v))) = (policy, in_gap) {
        return Err(Error::NoGap {
            delta: delta.to_f64_lossy(),
            k: k.to_f64_lossy(),
            index: j + 1,
            value: v.to_f64_lossy(),
        });
    }
    let rank = sv.iter().filter(|v| **v > upper).count();
    Ok(RankDecision {
        rank,
        full_rank: rank == sv.len(),
        singular_values: sv,
        delta,
        k,
    })
}

/// True when `A` has full numerical `(δ, k)`-rank, i.e. `σ_min(A) > kδ`.
///
/// No gap is required: a matrix whose smallest singular value does not clear
/// `kδ` cannot have full numerical rank whatever the rest of its spectrum.
pub fn has_full_numerical_rank<T: Scalar>(a: &DMatrix<T>, delta: T, k: T) -> bool {
    let sv = singular_values(a);
    sv.iter().last().is_none_or(|s| *s > k * delta)
}

pub(crate) fn check_thresholds<T: Scalar>(delta: T, k: T) -> Result<()> {
    if !(delta > T::zero()) || !(k > T::one()) {
        return Err(Error::InvalidInput(format!(
            "rank thresholds need delta > 0 and k > 1 (got delta = {delta}, k = {k})"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_values() {
        assert!((q_factor::<f64>(3, 1) - 3f64.sqrt()).abs() < 1e-15);
        assert!((q_factor::<f64>(5, 2) - 8f64.sqrt()).abs() < 1e-15);
        assert_eq!(q_factor::<f64>(7, 7), 0.0);
        assert_eq!(q_factor::<f64>(7, 0), 0.0);
    }

    #[test]
    fn identity_is_full_rank() {
        let d = numerical_rank(&DMatrix::<f64>::identity(3, 3), 0.1, 2.0).unwrap();
        assert_eq!(d.rank, 3);
        assert!(d.full_rank);
    }

    #[test]
    fn tiny_singular_value_dropped() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-8]));
        let d = numerical_rank(&a, 1e-3, 2.0).unwrap();
        assert_eq!(d.rank, 1);
        assert!(!d.full_rank);
    }

    #[test]
    fn value_inside_gap() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.15]));
        let e = numerical_rank(&a, 0.1, 2.0).unwrap_err();
        assert!(matches!(e, Error::NoGap { index: 2, .. }));
    }

    #[test]
    fn lenient_policy_counts_above_upper() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.15, 1e-4]));
        let d = numerical_rank_with(&a, 0.1, 2.0, GapPolicy::CountAboveUpper).unwrap();
        assert_eq!(d.rank, 1);
    }

    #[test]
    fn bad_thresholds() {
        let a = DMatrix::<f64>::identity(2, 2);
        assert!(numerical_rank(&a, 0.0, 2.0).is_err());
        assert!(numerical_rank(&a, 0.1, 1.0).is_err());
    }

    #[test]
    fn f32_works() {
        let d = numerical_rank(&DMatrix::<f32>::identity(4, 2), 0.1, 2.0).unwrap();
        assert_eq!(d.rank, 2);
    }
}
