//! Low-degree monic polynomials whose zero sets pass within a tolerance of
//! every point in a noisy data set, together with an admissible perturbation
//! of the data and a Kantorovich-type existence certificate.

// `!(a > b)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod certificate;
pub mod datasets;
pub mod error;
pub mod lpa;
pub mod numlin;
pub mod residual;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use algebra::{OrderKind, Term, TermOrdering};
pub use certificate::{
    kantorovich_certificate, kantorovich_certificate_with, CertifyOptions, FailureReason,
    PseudoinverseBound, RadiusPolicy,
};
pub use lpa::{lpa, lpa_constrained_zero_constant, LpaConfig};
pub use numlin::GapPolicy;
pub use residual::ExclusionMode;
pub use solver::RfaStatus;

/// Double-precision instantiations of the generic types.
pub type Polynomial = algebra::MonicPolynomial<f64>;
pub type PointSet = algebra::EmpiricalPointSet<f64>;
pub type Perturbation = residual::ErrorVector<f64>;
pub type Config = lpa::LpaConfig<f64>;
pub type Fit = lpa::LpaResult<f64>;
pub type Step = lpa::TermStep<f64>;
pub type Certificate = certificate::Certificate<f64>;
pub type PointCertificate = certificate::PointCertificate<f64>;
