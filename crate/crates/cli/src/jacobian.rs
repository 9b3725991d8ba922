//! `check-jacobian`: compare the analytic Jacobian of the residual with
//! central differences.

use std::path::PathBuf;

use clap::Args;
use lowdeg::algebra::{next_candidate, EmpiricalPointSet, Term, TermOrdering};
use lowdeg::residual::{ErrorVector, ResidualContext};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::io::PointSetFile;

/// Largest admissible error.
pub const TOLERANCE: f64 = 1e-6;

#[derive(Debug, Args)]
pub struct CheckJacobianArgs {
    /// Points to build the context from; random contexts are drawn otherwise.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Comma-separated support terms such as `1,y,x`.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub support: Vec<String>,
    /// Candidate term such as `y^2`; defaults to the last variable.
    #[arg(long)]
    pub candidate: Option<String>,
    /// Seed of the random contexts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random contexts.
    #[arg(long, default_value_t = 20)]
    pub contexts: usize,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-6)]
    pub step: f64,
}

/// Parses `x^2*y` against the variable names; `1` is the unit term.
pub fn parse_term(text: &str, names: &[String]) -> Result<Term, CliError> {
    let mut ex = vec![0u32; names.len()];
    let text = text.trim();
    if text == "1" {
        return Ok(Term::new(ex));
    }
    for factor in text.split('*') {
        let (name, power) = match factor.split_once('^') {
            Some((n, p)) => (
                n.trim(),
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| CliError::input(format!("bad exponent in term {text:?}")))?,
            ),
            None => (factor.trim(), 1),
        };
        let i = names.iter().position(|v| v == name).ok_or_else(|| {
            CliError::input(format!("unknown variable {name:?} in term {text:?}"))
        })?;
        ex[i] += power;
    }
    Ok(Term::new(ex))
}

/// `max |J − J_fd| / max(max |J|, 1)` at `e`.
pub fn check_context(
    ctx: &ResidualContext<f64>,
    e: &ErrorVector<f64>,
    h: f64,
) -> Result<f64, CliError> {
    let exact = ctx.jacobian(e)?;
    let x0 = ctx.restrict(e);
    let rho =
        |x: &DVector<f64>| -> Result<DVector<f64>, CliError> { Ok(ctx.rho(&ctx.expand(x)?)?.0) };
    let mut fd = DMatrix::zeros(exact.nrows(), exact.ncols());
    for c in 0..x0.len() {
        let mut up = x0.clone();
        let mut down = x0.clone();
        up[c] += h;
        down[c] -= h;
        fd.set_column(c, &((rho(&up)? - rho(&down)?) / (2.0 * h)));
    }
    Ok((&exact - &fd).amax() / exact.amax().max(1.0))
}

fn random_context(
    rng: &mut ChaCha8Rng,
) -> Result<(ResidualContext<f64>, ErrorVector<f64>), CliError> {
    let n = rng.gen_range(1..=3);
    let o_len = rng.gen_range(1..=5);
    let s = rng.gen_range(o_len + 1..=10);
    let eps = 0.01;
    let x = loop {
        let rows: Vec<Vec<f64>> = (0..s)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect())
            .collect();
        if let Ok(x) = EmpiricalPointSet::from_rows(&rows, eps) {
            break x;
        }
    };
    let ord = TermOrdering::natural(Default::default(), n);
    let mut t = Term::one(n);
    let mut pending = Vec::new();
    let mut support = vec![t.clone()];
    while support.len() < o_len {
        t = next_candidate(&t, &mut pending, &ord)?;
        support.push(t.clone());
    }
    let candidate = next_candidate(&t, &mut pending, &ord)?;
    let ctx = ResidualContext::new(&x, support, candidate)?;
    let e = ErrorVector::from_vector(DVector::from_fn(s * n, |_, _| rng.gen_range(-eps..eps)), s)?;
    Ok((ctx, e))
}

pub fn run(args: &CheckJacobianArgs) -> Result<(), CliError> {
    let worst = match &args.input {
        Some(path) => {
            let input = PointSetFile::read(path)?;
            let eps = args.epsilon.or(input.epsilon).unwrap_or(0.1);
            let x = input.point_set(eps)?;
            let names = &input.variables;
            let support = args
                .support
                .iter()
                .map(|s| parse_term(s, names))
                .collect::<Result<Vec<_>, _>>()?;
            let candidate = match &args.candidate {
                Some(c) => parse_term(c, names)?,
                None => Term::var(names.len(), names.len() - 1),
            };
            let ctx = ResidualContext::new(&x, support, candidate)?;
            let err = check_context(&ctx, &ErrorVector::zeros(x.len(), x.dim()), args.step)?;
            println!(
                "context from {}: max relative error {err:.3e}",
                path.display()
            );
            err
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let mut worst: f64 = 0.0;
            for i in 0..args.contexts {
                let (ctx, e) = random_context(&mut rng)?;
                let err = check_context(&ctx, &e, args.step)?;
                println!(
                    "context {i}: n = {}, s = {}, |O| = {}, candidate {}, max relative error {err:.3e}",
                    ctx.points().dim(),
                    ctx.points().len(),
                    ctx.support().len(),
                    ctx.candidate()
                );
                worst = worst.max(err);
            }
            worst
        }
    };
    println!("max relative error {worst:.3e} (tolerance {TOLERANCE:e})");
    if worst <= TOLERANCE {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "Jacobian check failed: {worst:e} > {TOLERANCE:e}"
        )))
    }
}
