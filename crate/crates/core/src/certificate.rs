//! Kantorovich existence certificate for an exact on-variety perturbation.
//!
//! For each point `p_i` the scalar map `f_i(e) = f(p_i + e)` is examined near
//! `ē_i`. A radius `R_i` inside the admissible box, a Lipschitz constant `γ_i`
//! for the gradient and a bound `μ_i` on the pseudoinverse of the gradient
//! give a threshold `χ_i = R_i / (μ_i (2 + γ_i R_i μ_i))`. When `|f_i(ē_i)| < χ_i`
//! the Newton iteration converges to a root of `f_i` within `R_i` of `ē_i`.

use nalgebra::DMatrix;

use crate::algebra::{EmpiricalPointSet, MonicPolynomial};
use crate::error::{Error, Result};
use crate::residual::ErrorVector;
use crate::scalar::Scalar;

/// Number of candidate radii tried by [`RadiusPolicy::GridMaximizeChi`].
pub const RADIUS_GRID_SIZE: usize = 64;
/// Ratio between the smallest and the largest candidate radius.
const RADIUS_GRID_SPAN: f64 = 1e-6;
/// Fraction of the admissible radius used by the grid's top end.
const RADIUS_GRID_TOP: f64 = 0.999;

/// How the radius `R_i` is picked inside `(0, min(r_i, ‖J‖/γ_i))`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RadiusPolicy<T: Scalar> {
    /// Geometric grid below `0.999·min(r_i, ‖J‖/γ_i)`, keeping the radius with
    /// the largest threshold.
    #[default]
    GridMaximizeChi,
    /// `R_i = θ·min(r_i, ‖J‖/γ_i)` with `0 < θ < 1`.
    FixedFraction(T),
}

/// How the bound `μ_i ≥ ‖J_{f_i}(e)†‖₂` on `B(ē_i, R_i)` is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PseudoinverseBound {
    /// `μ_i = 1/(‖J_{f_i}(ē_i)‖₂ − γ_i R_i)` for each point separately.
    PerPoint,
    /// The largest per-point value, shared by every point.
    #[default]
    Uniform,
}

/// Knobs of [`kantorovich_certificate_with`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CertifyOptions<T: Scalar> {
    pub radius: RadiusPolicy<T>,
    pub pseudoinverse: PseudoinverseBound,
}

/// Why a point did not pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    /// `∇f` vanishes at the perturbed point.
    ZeroGradient,
    /// `|f_i(ē_i)| ≥ χ_i`.
    ThresholdExceeded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCertificate<T: Scalar> {
    pub index: usize,
    /// `ε − ‖ē_i‖_∞`.
    pub r: T,
    pub gamma: T,
    /// `‖J_{f_i}(ē_i)‖₂`.
    pub gradient_norm: T,
    pub radius: T,
    pub mu: T,
    pub chi: T,
    pub residual_abs: T,
    pub passed: bool,
    pub failure: Option<FailureReason>,
}

impl<T: Scalar> PointCertificate<T> {
    /// `γμ²χ/2 < 1` and `2μχ/(2 − γμ²χ) < R`.
    pub fn side_conditions_hold(&self) -> bool {
        if self.failure == Some(FailureReason::ZeroGradient) {
            return false;
        }
        let two = T::lit(2.0);
        let h = self.gamma * self.mu * self.mu * self.chi;
        h / two < T::one() && two * self.mu * self.chi / (two - h) < self.radius
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<T: Scalar> {
    pub per_point: Vec<PointCertificate<T>>,
    pub all_passed: bool,
    /// `max_i R_i`; bounds `‖e* − ē‖_∞` when every point passes.
    pub distance_bound: T,
}

impl<T: Scalar> Certificate<T> {
    pub fn failed_points(&self) -> impl Iterator<Item = &PointCertificate<T>> {
        self.per_point.iter().filter(|c| !c.passed)
    }
}

/// Lipschitz constant (2-norm) of `∇f_i`, with `f_i(e) = f(p + e)`, on the
/// closed sup-norm ball `B(center, radius)`.
///
/// Every second partial is bounded by the triangle inequality with each
/// `|p_j + e_j| ≤ |p_j| + ‖center‖_∞ + radius`. The spectral norm of the
/// resulting nonnegative matrix dominates the Hessian's spectral norm
/// everywhere on the ball.
pub fn gamma_bound<T: Scalar>(f: &MonicPolynomial<T>, p: &[T], center: &[T], radius: T) -> T {
    let n = f.nvars();
    let reach = center.iter().fold(T::zero(), |m, c| m.max(c.abs())) + radius;
    let bounds: Vec<T> = p.iter().map(|v| v.abs() + reach).collect();
    let mut hess = DMatrix::<T>::zeros(n, n);
    for (term, coeff) in f.monomials() {
        if coeff == T::zero() || term.degree() < 2 {
            continue;
        }
        for a in 0..n {
            let Some((ca, da)) = term.formal_partial(a) else {
                continue;
            };
            for b in a..n {
                let Some((cb, dab)) = da.formal_partial(b) else {
                    continue;
                };
                let mag = coeff.abs()
                    * T::from_usize_lossy(ca as usize)
                    * T::from_usize_lossy(cb as usize)
                    * dab.eval(bounds.iter().copied());
                hess[(a, b)] += mag;
                if a != b {
                    hess[(b, a)] += mag;
                }
            }
        }
    }
    crate::numlin::spectral_norm(&hess)
}

fn threshold<T: Scalar>(radius: T, gamma: T, gnorm: T) -> (T, T) {
    let mu = T::one() / (gnorm - gamma * radius);
    let chi = radius / (mu * (T::lit(2.0) + gamma * radius * mu));
    (mu, chi)
}

fn choose_radius<T: Scalar>(policy: RadiusPolicy<T>, limit: T, gamma: T, gnorm: T) -> (T, T, T) {
    match policy {
        RadiusPolicy::FixedFraction(theta) => {
            let radius = theta * limit;
            let (mu, chi) = threshold(radius, gamma, gnorm);
            (radius, mu, chi)
        }
        RadiusPolicy::GridMaximizeChi => {
            let top = T::lit(RADIUS_GRID_TOP) * limit;
            let span = T::lit(RADIUS_GRID_SPAN);
            let last = T::from_usize_lossy(RADIUS_GRID_SIZE - 1);
            let mut best = (T::zero(), T::zero(), T::zero());
            for j in 0..RADIUS_GRID_SIZE {
                let radius = top * span.powf(T::one() - T::from_usize_lossy(j) / last);
                let (mu, chi) = threshold(radius, gamma, gnorm);
                if chi > best.2 {
                    best = (radius, mu, chi);
                }
            }
            best
        }
    }
}

/// Certify each point of `x` perturbed by `e_bar` against `f`, with the
/// default pseudoinverse bound.
pub fn kantorovich_certificate<T: Scalar>(
    f: &MonicPolynomial<T>,
    x: &EmpiricalPointSet<T>,
    e_bar: &ErrorVector<T>,
    policy: RadiusPolicy<T>,
) -> Result<Certificate<T>> {
    let opts = CertifyOptions {
        radius: policy,
        ..CertifyOptions::default()
    };
    kantorovich_certificate_with(f, x, e_bar, opts)
}

/// Certify each point of `x` perturbed by `e_bar` against `f`.
pub fn kantorovich_certificate_with<T: Scalar>(
    f: &MonicPolynomial<T>,
    x: &EmpiricalPointSet<T>,
    e_bar: &ErrorVector<T>,
    opts: CertifyOptions<T>,
) -> Result<Certificate<T>> {
    let policy = opts.radius;
    if f.nvars() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: f.nvars(),
        });
    }
    if e_bar.npoints() != x.len() || e_bar.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.len() * x.dim(),
            found: e_bar.npoints() * e_bar.dim(),
        });
    }
    let eps = x.epsilon();
    if e_bar.sup_norm() >= eps {
        return Err(Error::InvalidInput(format!(
            "perturbation sup-norm {} is not below epsilon {}",
            e_bar.sup_norm().to_f64_lossy(),
            eps.to_f64_lossy()
        )));
    }
    if let RadiusPolicy::FixedFraction(theta) = policy {
        if !(theta > T::zero() && theta < T::one()) {
            return Err(Error::InvalidInput(
                "radius fraction must lie in (0, 1)".into(),
            ));
        }
    }

    let pts = x.points();
    let mut per_point = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let p: Vec<T> = pts.row(i).iter().copied().collect();
        let e = e_bar.point(i);
        let moved: Vec<T> = p.iter().zip(&e).map(|(a, b)| *a + *b).collect();
        let r = eps - e.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let gamma = gamma_bound(f, &p, &e, r);
        let gnorm = f.gradient_at(&moved).norm();
        let residual_abs = f.eval_at(&moved).abs();

        if gnorm == T::zero() {
            per_point.push(PointCertificate {
                index: i,
                r,
                gamma,
                gradient_norm: gnorm,
                radius: T::zero(),
                mu: T::zero(),
                chi: T::zero(),
                residual_abs,
                passed: false,
                failure: Some(FailureReason::ZeroGradient),
            });
            continue;
        }
        let limit = if gamma > T::zero() {
            r.min(gnorm / gamma)
        } else {
            r
        };
        let (radius, mu, chi) = choose_radius(policy, limit, gamma, gnorm);
        let passed = residual_abs < chi;
        per_point.push(PointCertificate {
            index: i,
            r,
            gamma,
            gradient_norm: gnorm,
            radius,
            mu,
            chi,
            residual_abs,
            passed,
            failure: (!passed).then_some(FailureReason::ThresholdExceeded),
        });
    }
    if opts.pseudoinverse == PseudoinverseBound::Uniform {
        let regular = per_point
            .iter()
            .filter(|c| c.failure != Some(FailureReason::ZeroGradient));
        let mu = regular.fold(T::zero(), |m, c| m.max(c.mu));
        for c in per_point
            .iter_mut()
            .filter(|c| c.failure != Some(FailureReason::ZeroGradient))
        {
            c.mu = mu;
            c.chi = c.radius / (mu * (T::lit(2.0) + c.gamma * c.radius * mu));
            c.passed = c.residual_abs < c.chi;
            c.failure = (!c.passed).then_some(FailureReason::ThresholdExceeded);
        }
    }
    let all_passed = per_point.iter().all(|c| c.passed);
    let distance_bound = per_point.iter().fold(T::zero(), |m, c| m.max(c.radius));
    Ok(Certificate {
        per_point,
        all_passed,
        distance_bound,
    })
}
