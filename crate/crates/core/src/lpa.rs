//! Buchberger–Möller style search for the first low-degree monic polynomial
//! that vanishes exactly on some admissible perturbation of the data.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{next_candidate, EmpiricalPointSet, MonicPolynomial, Term, TermOrdering};
use crate::error::{Error, Result};
use crate::numlin::GapPolicy;
use crate::residual::{perturbed_points, ErrorVector, Exclusion, ExclusionMode, ResidualContext};
use crate::scalar::Scalar;
use crate::solver::{
    rfa, RfaConfig, RfaOutcome, RfaStatus, SystemOracle, DEFAULT_MAX_ITER, DEFAULT_OMEGA,
};

#[derive(Debug, Clone, PartialEq)]
pub struct LpaConfig<T: Scalar> {
    pub epsilon: T,
    pub delta: T,
    pub k: T,
    pub omega: T,
    pub ordering: TermOrdering,
    /// Pin the coefficient of `1` to zero.
    pub zero_constant: bool,
    pub exclusion_mode: ExclusionMode,
    /// Refuse candidate terms above this degree.
    pub max_degree: Option<u32>,
    pub max_iter: usize,
    pub gap_policy: GapPolicy,
}

impl<T: Scalar> LpaConfig<T> {
    /// Defaults: `δ = 2ε`, `k = 2`, `ω = 1e-10`, any-component exclusion.
    pub fn new(epsilon: T, ordering: TermOrdering) -> Self {
        Self {
            epsilon,
            delta: epsilon + epsilon,
            k: T::lit(2.0),
            omega: T::lit(DEFAULT_OMEGA),
            ordering,
            zero_constant: false,
            exclusion_mode: ExclusionMode::default(),
            max_degree: None,
            max_iter: DEFAULT_MAX_ITER,
            gap_policy: GapPolicy::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.epsilon > T::zero()
            && self.delta >= self.epsilon
            && self.k > T::one()
            && self.omega > T::zero()
            && self.omega < T::one()
            && self.max_iter > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "need delta >= epsilon > 0, k > 1 and 0 < omega < 1 (got epsilon = {}, delta = {}, k = {}, omega = {})",
                self.epsilon, self.delta, self.k, self.omega
            )))
        }
    }

    pub fn rfa_config(&self) -> RfaConfig<T> {
        RfaConfig {
            epsilon: self.epsilon,
            delta: self.delta,
            k: self.k,
            omega: self.omega,
            max_iter: self.max_iter,
            gap_policy: self.gap_policy,
        }
    }
}

/// Summary of a root-finding run for the log.
#[derive(Debug, Clone, PartialEq)]
pub struct RfaSummary<T: Scalar> {
    pub status: RfaStatus,
    pub iterations: usize,
    pub rank: usize,
    pub selection: Vec<usize>,
    pub last_step_norm: T,
    pub hull_in_box: bool,
    pub trace: Vec<DVector<T>>,
}

impl<T: Scalar> From<&RfaOutcome<T>> for RfaSummary<T> {
    fn from(o: &RfaOutcome<T>) -> Self {
        Self {
            status: o.status,
            iterations: o.iterations,
            rank: o.rank,
            selection: o.selection.clone(),
            last_step_norm: o.last_step_norm,
            hull_in_box: o.hull_in_box,
            trace: o.trace.clone(),
        }
    }
}

/// One candidate term and what happened to it.
#[derive(Debug, Clone, PartialEq)]
pub struct TermStep<T: Scalar> {
    pub term: Term,
    pub exclusion: Exclusion<T>,
    pub rfa: Option<RfaSummary<T>>,
}

impl<T: Scalar> TermStep<T> {
    pub fn excluded(&self) -> bool {
        self.exclusion.excluded
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpaResult<T: Scalar> {
    pub e_bar: ErrorVector<T>,
    pub f: MonicPolynomial<T>,
    pub support: Vec<Term>,
    pub steps: Vec<TermStep<T>>,
    /// `‖f(X(ē))‖₂ / ‖f‖`.
    pub normalized_residual: T,
    /// The final run's iterates all stayed inside `Q_ε`.
    pub hull_in_box: bool,
    /// Numerical rank `r` of `(J_ρ(0) | ρ(0))` in the final run.
    pub rank: usize,
}

impl<T: Scalar> LpaResult<T> {
    /// `X(ē)`.
    pub fn perturbed_points(&self, x: &EmpiricalPointSet<T>) -> Result<DMatrix<T>> {
        perturbed_points(x, &self.e_bar)
    }
}

/// The residual `ρ` exposed to the root finder, with domain `D_O` judged by
/// full numerical `(δ, k)`-rank of `M_O(e)`.
pub struct ResidualSystem<'a, T: Scalar> {
    pub ctx: &'a ResidualContext<T>,
    pub delta: T,
    pub k: T,
}

impl<T: Scalar> SystemOracle<T> for ResidualSystem<'_, T> {
    fn n_vars(&self) -> usize {
        self.ctx.n_free()
    }

    fn n_eqs(&self) -> usize {
        self.ctx.n_rows()
    }

    fn eval(&self, x: &DVector<T>) -> Result<DVector<T>> {
        Ok(self.ctx.rho(&self.ctx.expand(x)?)?.0)
    }

    fn jacobian(&self, x: &DVector<T>) -> Result<DMatrix<T>> {
        self.ctx.jacobian(&self.ctx.expand(x)?)
    }

    fn in_domain(&self, x: &DVector<T>) -> bool {
        self.ctx
            .expand(x)
            .is_ok_and(|e| self.ctx.in_domain(&e, self.delta, self.k))
    }
}

fn at_term(term: &Term, e: Error) -> Error {
    Error::AtTerm {
        term: term.to_string(),
        source: Box::new(e),
    }
}

/// Runs the search. With `cfg.zero_constant` the coefficient of `1` is pinned
/// to zero while `1` stays in the support for candidate generation.
pub fn lpa<T: Scalar>(x: &EmpiricalPointSet<T>, cfg: &LpaConfig<T>) -> Result<LpaResult<T>> {
    cfg.validate()?;
    let n = x.dim();
    if cfg.ordering.nvars() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: cfg.ordering.nvars(),
        });
    }
    let mut support = vec![Term::one(n)];
    let mut pending = Vec::new();
    let mut t = Term::one(n);
    let mut steps = Vec::new();
    let rfa_cfg = cfg.rfa_config();

    loop {
        t = next_candidate(&t, &mut pending, &cfg.ordering)?;
        if let Some(cap) = cfg.max_degree {
            if t.degree() > cap {
                return Err(Error::DegreeCap(cap));
            }
        }
        let mut ctx = ResidualContext::new(x, support.clone(), t.clone())?;
        if cfg.zero_constant {
            ctx = ctx.with_zero_constant();
        }
        let exclusion = match ctx.exclusion_check(cfg.epsilon, cfg.exclusion_mode) {
            Err(Error::DomainViolation) => {
                return Err(at_term(
                    &t,
                    Error::DegenerateSupport {
                        size: support.len(),
                        points: x.len(),
                    },
                ))
            }
            other => other.map_err(|e| at_term(&t, e))?,
        };
        if exclusion.excluded {
            steps.push(TermStep {
                term: t.clone(),
                exclusion,
                rfa: None,
            });
            support.push(t.clone());
            continue;
        }

        let system = ResidualSystem {
            ctx: &ctx,
            delta: cfg.delta,
            k: cfg.k,
        };
        let outcome = rfa(&system, &rfa_cfg).map_err(|e| at_term(&t, e))?;
        steps.push(TermStep {
            term: t.clone(),
            exclusion,
            rfa: Some(RfaSummary::from(&outcome)),
        });
        let Some(point) = outcome.point else {
            support.push(t.clone());
            continue;
        };

        let e_bar = ctx.expand(&point)?;
        let (_, alpha) = ctx.rho(&e_bar).map_err(|e| at_term(&t, e))?;
        let f = MonicPolynomial::new(t.clone(), support.clone(), alpha)?;
        let normalized_residual = f.normalized_residual(&perturbed_points(x, &e_bar)?)?;
        return Ok(LpaResult {
            e_bar,
            f,
            support,
            steps,
            normalized_residual,
            hull_in_box: outcome.hull_in_box,
            rank: outcome.rank,
        });
    }
}

/// [`lpa`] with the coefficient of `1` pinned to zero.
pub fn lpa_constrained_zero_constant<T: Scalar>(
    x: &EmpiricalPointSet<T>,
    cfg: &LpaConfig<T>,
) -> Result<LpaResult<T>> {
    let cfg = LpaConfig {
        zero_constant: true,
        ..cfg.clone()
    };
    lpa(x, &cfg)
}
