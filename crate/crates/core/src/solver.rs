//! Rank-guarded normal-flow root finding for underdetermined systems whose
//! Jacobian may be ill-conditioned.
//!
//! The system is first repaired: the numerical rank `r` of `(J_F(0) | F(0))ᵗ`
//! is computed and a strong RRQR of that matrix picks `r` components `F₁` of
//! `F`; the remaining components are (to first order) linear combinations of
//! those and are not solved for. Minimal-norm Newton steps on `F₁ = 0` then
//! run from the origin while the step is larger than `ω` and `J_{F₁}` keeps
//! full numerical rank.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numlin::{
    has_full_numerical_rank, min_norm_solve, numerical_rank_with, rrqr_partition, GapPolicy,
};
use crate::scalar::Scalar;

/// Default stopping threshold on the step length.
pub const DEFAULT_OMEGA: f64 = 1e-10;
/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 100;

/// A nonlinear map `F: D ⊆ R^n → R^m` (assumed `C²` on `D`) with its Jacobian.
pub trait SystemOracle<T: Scalar> {
    fn n_vars(&self) -> usize;
    fn n_eqs(&self) -> usize;
    fn eval(&self, x: &DVector<T>) -> Result<DVector<T>>;
    fn jacobian(&self, x: &DVector<T>) -> Result<DMatrix<T>>;
    /// Domain membership; the whole space by default.
    fn in_domain(&self, _x: &DVector<T>) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfaConfig<T: Scalar> {
    pub epsilon: T,
    pub delta: T,
    pub k: T,
    pub omega: T,
    pub max_iter: usize,
    /// Rank rule for `(J_F(0) | F(0))ᵗ` when its spectrum has no `(δ, k)` gap.
    pub gap_policy: GapPolicy,
}

impl<T: Scalar> RfaConfig<T> {
    /// `δ = 2ε`, `k = 2`, `ω = 1e-10`, lenient gap policy.
    pub fn new(epsilon: T) -> Self {
        Self {
            epsilon,
            delta: epsilon + epsilon,
            k: T::lit(2.0),
            omega: T::lit(DEFAULT_OMEGA),
            max_iter: DEFAULT_MAX_ITER,
            gap_policy: GapPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfaStatus {
    /// Converged inside the box and the domain.
    Solution,
    /// The first step was already below `ω`: `F₁(0) = 0`.
    ExactAtOrigin,
    /// `J_{F₁}(0)` lacks full numerical rank; nothing was iterated.
    NoIteration,
    /// The final iterate left the box `Q_ε` or the domain.
    OutOfBox,
    /// `J_{F₁}` lost rank after at least one step.
    RankDropMidway,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RfaOutcome<T: Scalar> {
    pub status: RfaStatus,
    /// The returned root; `None` is the "no admissible solution" answer.
    pub point: Option<DVector<T>>,
    /// Iterates, starting with the origin.
    pub trace: Vec<DVector<T>>,
    /// Box membership of each iterate.
    pub in_box: Vec<bool>,
    /// Domain membership of each iterate.
    pub in_domain: Vec<bool>,
    /// Numerical rank `r` of `(J_F(0) | F(0))ᵗ`.
    pub rank: usize,
    /// Indices of the components kept in `F₁`.
    pub selection: Vec<usize>,
    /// Norm of the last displacement (`sqrt(n)` for the untouched sentinel).
    pub last_step_norm: T,
    pub iterations: usize,
    /// Every iterate lies in `Q_ε`, hence so does their convex hull.
    pub hull_in_box: bool,
}

/// Rank and component selection for the repaired system.
///
/// `r` is the numerical `(δ, k)`-rank of `(J0 | F0)ᵗ`; the selection is the
/// leading column set of a strong RRQR of that matrix.
pub fn select_f1<T: Scalar>(
    f0: &DVector<T>,
    j0: &DMatrix<T>,
    delta: T,
    k: T,
    policy: GapPolicy,
) -> Result<(usize, Vec<usize>)> {
    let (m, n) = j0.shape();
    if f0.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: f0.len(),
        });
    }
    let mut aug = DMatrix::zeros(n + 1, m);
    aug.view_mut((0, 0), (n, m)).copy_from(&j0.transpose());
    aug.row_mut(n).copy_from(&f0.transpose());
    let r = numerical_rank_with(&aug, delta, k, policy)?.rank;
    let part = rrqr_partition(&aug, r)?;
    Ok((r, part.leading().to_vec()))
}

fn check_finite<T: Scalar>(v: impl IntoIterator<Item = T>) -> Result<()> {
    if v.into_iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Evaluation)
    }
}

enum Step<T: Scalar> {
    Ok(T),
    LeftDomain,
}

/// Runs the root-finding iteration on `F` starting from the origin.
pub fn rfa<T: Scalar, F: SystemOracle<T> + ?Sized>(
    oracle: &F,
    cfg: &RfaConfig<T>,
) -> Result<RfaOutcome<T>> {
    crate::numlin::check_thresholds(cfg.delta, cfg.k)?;
    let n = oracle.n_vars();
    let origin = DVector::zeros(n);
    let f0 = oracle.eval(&origin)?;
    let j0 = oracle.jacobian(&origin)?;
    check_finite(f0.iter().copied())?;
    check_finite(j0.iter().copied())?;
    let (rank, selection) = select_f1(&f0, &j0, cfg.delta, cfg.k, cfg.gap_policy)?;

    let sel_f = |v: &DVector<T>| v.select_rows(selection.iter());
    let sel_j = |m: &DMatrix<T>| m.select_rows(selection.iter());

    let in_box = |x: &DVector<T>| x.amax() <= cfg.epsilon;
    let mut x = origin.clone();
    let mut h_norm = T::from_usize_lossy(n).sqrt();
    let mut trace = vec![x.clone()];
    let mut iterations = 0;
    let mut guard_failed = false;
    let mut left_domain = false;
    let mut cached = Some((f0, j0));

    while h_norm > cfg.omega {
        let step = (|| -> Result<Step<T>> {
            let (fx, jx) = match cached.take() {
                Some(c) => c,
                None => match (oracle.eval(&x), oracle.jacobian(&x)) {
                    (Ok(f), Ok(j)) => (f, j),
                    (Err(Error::DomainViolation), _) | (_, Err(Error::DomainViolation)) => {
                        return Ok(Step::LeftDomain)
                    }
                    (Err(e), _) | (_, Err(e)) => return Err(e),
                },
            };
            check_finite(fx.iter().copied())?;
            check_finite(jx.iter().copied())?;
            let j1 = sel_j(&jx);
            if !has_full_numerical_rank(&j1, cfg.delta, cfg.k) {
                return Ok(Step::Ok(-T::one()));
            }
            if iterations >= cfg.max_iter {
                return Err(Error::Divergence(cfg.max_iter));
            }
            let h = match min_norm_solve(&j1, &(-sel_f(&fx))) {
                Ok(h) => h,
                Err(Error::RankDrop) => return Ok(Step::Ok(-T::one())),
                Err(e) => return Err(e),
            };
            check_finite(h.iter().copied())?;
            x += &h;
            Ok(Step::Ok(h.norm()))
        })()?;
        match step {
            Step::LeftDomain => {
                left_domain = true;
                break;
            }
            Step::Ok(norm) if norm < T::zero() => {
                guard_failed = true;
                break;
            }
            Step::Ok(norm) => {
                h_norm = norm;
                iterations += 1;
                trace.push(x.clone());
            }
        }
    }

    let box_flags: Vec<bool> = trace.iter().map(in_box).collect();
    let domain_flags: Vec<bool> = trace.iter().map(|p| oracle.in_domain(p)).collect();
    let hull_in_box = box_flags.iter().all(|b| *b);
    let admissible = !left_domain && in_box(&x) && *domain_flags.last().unwrap();

    let (status, point) = if guard_failed && iterations == 0 {
        (RfaStatus::NoIteration, None)
    } else if guard_failed {
        (RfaStatus::RankDropMidway, admissible.then(|| x.clone()))
    } else if !admissible {
        (RfaStatus::OutOfBox, None)
    } else if iterations == 1 && h_norm <= cfg.omega {
        (RfaStatus::ExactAtOrigin, Some(x.clone()))
    } else {
        (RfaStatus::Solution, Some(x.clone()))
    };

    Ok(RfaOutcome {
        status,
        point,
        trace,
        in_box: box_flags,
        in_domain: domain_flags,
        rank,
        selection,
        last_step_norm: h_norm,
        iterations,
        hull_in_box,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// F(x) = A x + b
    struct Affine {
        a: DMatrix<f64>,
        b: DVector<f64>,
    }

    impl SystemOracle<f64> for Affine {
        fn n_vars(&self) -> usize {
            self.a.ncols()
        }
        fn n_eqs(&self) -> usize {
            self.a.nrows()
        }
        fn eval(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
            Ok(&self.a * x + &self.b)
        }
        fn jacobian(&self, _x: &DVector<f64>) -> Result<DMatrix<f64>> {
            Ok(self.a.clone())
        }
    }

    fn cfg(eps: f64) -> RfaConfig<f64> {
        RfaConfig::new(eps)
    }

    #[test]
    fn linear_system_one_step() {
        let sys = Affine {
            a: DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, -1.0]),
            b: DVector::from_vec(vec![0.01, -0.02]),
        };
        let out = rfa(&sys, &cfg(0.1)).unwrap();
        assert_eq!(out.status, RfaStatus::Solution);
        let x = out.point.unwrap();
        assert!(sys.eval(&x).unwrap().norm() < 1e-15);
        // minimal norm root is Aᵗ(AAᵗ)⁻¹(−b)
        let a = &sys.a;
        let expect = a.transpose() * (a * a.transpose()).try_inverse().unwrap() * (-&sys.b);
        assert!((&x - expect).norm() < 1e-15);
        // the first step solves exactly; the second one is below ω
        assert_eq!(out.iterations, 2);
    }

    #[test]
    fn exact_at_origin() {
        let sys = Affine {
            a: DMatrix::from_row_slice(1, 2, &[1.0, 2.0]),
            b: DVector::zeros(1),
        };
        let out = rfa(&sys, &cfg(0.1)).unwrap();
        assert_eq!(out.status, RfaStatus::ExactAtOrigin);
        assert_eq!(out.point.unwrap(), DVector::zeros(2));
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn ill_conditioned_jacobian_skips_iteration() {
        // (J|F) has a large singular value only through F
        let sys = Affine {
            a: DMatrix::from_row_slice(1, 2, &[1e-3, 0.0]),
            b: DVector::from_vec(vec![1.0]),
        };
        let out = rfa(&sys, &cfg(0.1)).unwrap();
        assert_eq!(out.status, RfaStatus::NoIteration);
        assert!(out.point.is_none());
        assert_eq!(out.trace.len(), 1);
        assert_eq!(out.last_step_norm, 2f64.sqrt());
    }

    #[test]
    fn root_outside_box() {
        let sys = Affine {
            a: DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            b: DVector::from_vec(vec![5.0]),
        };
        let out = rfa(&sys, &cfg(0.1)).unwrap();
        assert_eq!(out.status, RfaStatus::OutOfBox);
        assert!(!out.hull_in_box);
    }

    #[test]
    fn duplicated_component_dropped() {
        let sys = Affine {
            a: DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 0.5, 1.0, 2.0, 0.5]),
            b: DVector::from_vec(vec![0.01, 0.01]),
        };
        let out = rfa(&sys, &cfg(0.1)).unwrap();
        assert_eq!(out.rank, 1);
        assert_eq!(out.selection.len(), 1);
        assert_eq!(out.status, RfaStatus::Solution);
    }

    #[test]
    fn select_full_rank() {
        let j0 = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let (r, sel) = select_f1(
            &DVector::from_vec(vec![0.1, 0.2]),
            &j0,
            0.01,
            2.0,
            GapPolicy::Strict,
        )
        .unwrap();
        assert_eq!(r, 2);
        let mut sel = sel;
        sel.sort();
        assert_eq!(sel, vec![0, 1]);
    }

    #[test]
    fn nan_aborts() {
        let sys = Affine {
            a: DMatrix::from_row_slice(1, 2, &[f64::NAN, 0.0]),
            b: DVector::from_vec(vec![1.0]),
        };
        assert_eq!(rfa(&sys, &cfg(0.1)).unwrap_err(), Error::Evaluation);
    }

    #[test]
    fn deterministic_trace() {
        let sys = Affine {
            a: DMatrix::from_row_slice(2, 4, &[1.0, 0.3, 0.0, 1.0, 0.0, 1.0, -1.0, 0.2]),
            b: DVector::from_vec(vec![0.03, -0.01]),
        };
        let a = rfa(&sys, &cfg(0.1)).unwrap();
        let b = rfa(&sys, &cfg(0.1)).unwrap();
        assert_eq!(a, b);
    }
}
