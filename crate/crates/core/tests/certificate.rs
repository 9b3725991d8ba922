mod common;

use common::{damped_newton, distance2, rng, rows_of};
use lowdeg::algebra::{EmpiricalPointSet, MonicPolynomial, Term, TermOrdering};
use lowdeg::certificate::gamma_bound;
use lowdeg::datasets::{BEZIER, PARABOLA};
use lowdeg::lpa::{lpa, lpa_constrained_zero_constant, LpaConfig, LpaResult};
use lowdeg::residual::ErrorVector;
use lowdeg::{
    kantorovich_certificate, kantorovich_certificate_with, CertifyOptions, Error, FailureReason,
    PseudoinverseBound, RadiusPolicy,
};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;

fn ylx() -> TermOrdering {
    TermOrdering::deglex(vec![1, 0]).unwrap()
}

fn fixture(
    data: &[[f64; 2]],
    eps: f64,
    zero_constant: bool,
) -> (EmpiricalPointSet<f64>, LpaResult<f64>) {
    let x = EmpiricalPointSet::from_rows(&rows_of(data), eps).unwrap();
    let cfg = LpaConfig::new(eps, ylx());
    let res = if zero_constant {
        lpa_constrained_zero_constant(&x, &cfg).unwrap()
    } else {
        lpa(&x, &cfg).unwrap()
    };
    (x, res)
}

fn fixtures() -> Vec<(EmpiricalPointSet<f64>, LpaResult<f64>)> {
    vec![
        fixture(&PARABOLA, 0.1, false),
        fixture(&BEZIER, 1e-4, false),
        fixture(&BEZIER, 1e-4, true),
    ]
}

/// Wherever a point passes, Newton from `ē_i` lands on a root of `f_i`
/// inside the certified radius.
#[test]
fn newton_confirms_certified_roots() {
    for (x, res) in fixtures() {
        let cert =
            kantorovich_certificate(&res.f, &x, &res.e_bar, RadiusPolicy::GridMaximizeChi).unwrap();
        for pc in cert.per_point.iter().filter(|c| c.passed) {
            let p: Vec<f64> = x.points().row(pc.index).iter().copied().collect();
            let e0 = res.e_bar.point(pc.index);
            let root = damped_newton(&res.f, &p, &e0, 1e-13).expect("Newton converges");
            assert!(distance2(&root, &e0) < pc.radius, "point {}", pc.index);
        }
    }
}

#[test]
fn parabola_certificate_passes_everywhere() {
    let (x, res) = fixture(&PARABOLA, 0.1, false);
    let cert =
        kantorovich_certificate(&res.f, &x, &res.e_bar, RadiusPolicy::GridMaximizeChi).unwrap();
    assert!(cert.all_passed);
    assert!(cert.distance_bound < 0.1);
    for pc in &cert.per_point {
        assert!(pc.side_conditions_hold());
        assert!(pc.radius < pc.r);
        assert!(pc.gamma * pc.radius < pc.gradient_norm);
    }
}

#[test]
fn per_point_bound_is_never_weaker_than_uniform() {
    let (x, res) = fixture(&PARABOLA, 0.1, false);
    let opts = |pseudoinverse| CertifyOptions {
        radius: RadiusPolicy::GridMaximizeChi,
        pseudoinverse,
    };
    let uniform =
        kantorovich_certificate_with(&res.f, &x, &res.e_bar, opts(PseudoinverseBound::Uniform))
            .unwrap();
    let local =
        kantorovich_certificate_with(&res.f, &x, &res.e_bar, opts(PseudoinverseBound::PerPoint))
            .unwrap();
    for (u, l) in uniform.per_point.iter().zip(&local.per_point) {
        assert!(l.mu <= u.mu * (1.0 + 1e-12));
        assert!(l.chi >= u.chi * (1.0 - 1e-12));
    }
}

/// `f = x − c` at a single point with `ē = 0`: `γ = 0`, `μ = 1`, `R = θε`
/// and `χ = R/2`.
#[test]
fn linear_closed_form() {
    let eps = 0.1;
    let theta = 0.5;
    let opts = CertifyOptions {
        radius: RadiusPolicy::FixedFraction(theta),
        pseudoinverse: PseudoinverseBound::PerPoint,
    };
    for (p, c) in [(0.3, 0.31), (0.3, 0.324), (0.3, 0.326), (-1.0, -1.1)] {
        let x = EmpiricalPointSet::from_rows(&[vec![p]], eps).unwrap();
        let f = MonicPolynomial::new(
            Term::var(1, 0),
            vec![Term::one(1)],
            DVector::from_vec(vec![c]),
        )
        .unwrap();
        let cert = kantorovich_certificate_with(&f, &x, &ErrorVector::zeros(1, 1), opts).unwrap();
        let pc = &cert.per_point[0];
        assert_eq!(pc.gamma, 0.0);
        assert!((pc.mu - 1.0_f64).abs() < 1e-15);
        assert!((pc.radius - theta * eps).abs() < 1e-15);
        assert!((pc.chi - theta * eps / 2.0).abs() < 1e-15);
        assert_eq!(
            pc.passed,
            (p - c).abs() < theta * eps / 2.0,
            "p = {p}, c = {c}"
        );
    }
}

#[test]
fn boundary_perturbation_is_rejected() {
    let (x, res) = fixture(&PARABOLA, 0.1, false);
    let mut m = res.e_bar.to_matrix();
    m[(0, 0)] = 0.1;
    let e = ErrorVector::from_matrix(&m);
    assert!(matches!(
        kantorovich_certificate(&res.f, &x, &e, RadiusPolicy::GridMaximizeChi),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn flat_point_fails_with_zero_gradient() {
    // f = x² − 1e-6 at p = 0 has a vanishing gradient
    let x = EmpiricalPointSet::from_rows(&[vec![0.0]], 0.1).unwrap();
    let f = MonicPolynomial::new(
        Term::new(vec![2]),
        vec![Term::one(1)],
        DVector::from_vec(vec![1e-6]),
    )
    .unwrap();
    let cert = kantorovich_certificate(
        &f,
        &x,
        &ErrorVector::zeros(1, 1),
        RadiusPolicy::GridMaximizeChi,
    )
    .unwrap();
    assert!(!cert.all_passed);
    assert_eq!(cert.per_point[0].failure, Some(FailureReason::ZeroGradient));
}

/// An inflated constant coefficient shows up as failed points.
#[test]
fn inflated_residual_fails() {
    let (x, res) = fixture(&PARABOLA, 0.1, false);
    let one = Term::one(2);
    let mut alpha = res.f.alpha().clone();
    let idx = res.support.iter().position(|t| t == &one).unwrap();
    alpha[idx] += 0.5;
    let f = MonicPolynomial::new(res.f.leading_term().clone(), res.support.clone(), alpha).unwrap();
    let cert = kantorovich_certificate(&f, &x, &res.e_bar, RadiusPolicy::GridMaximizeChi).unwrap();
    assert!(!cert.all_passed);
    assert!(cert
        .failed_points()
        .all(|c| c.failure == Some(FailureReason::ThresholdExceeded)));
}

/// The Lipschitz bound dominates sampled difference quotients of the
/// gradient of the Bézier cubic on each certified ball.
#[test]
fn gamma_dominates_sampled_lipschitz_ratios() {
    let (x, res) = fixture(&BEZIER, 1e-4, false);
    let mut r = rng(5);
    for i in 0..x.len() {
        let p: Vec<f64> = x.points().row(i).iter().copied().collect();
        let center = res.e_bar.point(i);
        // a ball much wider than R_i makes the check meaningful
        let radius = 0.5;
        let gamma = gamma_bound(&res.f, &p, &center, radius);
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let mut draw = || -> Vec<f64> {
                center
                    .iter()
                    .zip(&p)
                    .map(|(c, q)| q + c + r.gen_range(-radius..radius))
                    .collect()
            };
            let (a, b) = (draw(), draw());
            let num = (res.f.gradient_at(&a) - res.f.gradient_at(&b)).norm();
            worst = worst.max(num / distance2(&a, &b));
        }
        assert!(worst <= gamma, "point {i}: {worst} > {gamma}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Shifting the constant coefficient leaves `γ`, `μ` and `χ` unchanged,
    /// so the set of passing points shrinks as the shift grows.
    #[test]
    fn passing_set_shrinks_with_residual(shift in 0.0f64..0.05, extra in 0.0f64..0.05) {
        let (x, res) = fixture(&PARABOLA, 0.1, false);
        let idx = res.support.iter().position(|t| t.is_one()).unwrap();
        let shifted = |s: f64| {
            let mut alpha = res.f.alpha().clone();
            alpha[idx] += s;
            let f = MonicPolynomial::new(res.f.leading_term().clone(), res.support.clone(), alpha).unwrap();
            kantorovich_certificate(&f, &x, &res.e_bar, RadiusPolicy::GridMaximizeChi).unwrap()
        };
        let small = shifted(shift);
        let large = shifted(shift + extra);
        for (a, b) in small.per_point.iter().zip(&large.per_point) {
            prop_assert!((a.chi - b.chi).abs() <= 1e-12);
            prop_assert!(b.passed <= a.passed);
        }
    }
}
