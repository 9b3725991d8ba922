//! `certify`: attach an existence certificate to a result file.

use std::path::PathBuf;

use clap::Args;
use lowdeg::certificate::Certificate;
use lowdeg::{
    kantorovich_certificate_with, CertifyOptions, FailureReason, PseudoinverseBound, RadiusPolicy,
};

use crate::error::CliError;
use crate::io::{CertificateBlock, PointEntry, ResultFile};

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Result file written by `fit`; updated in place unless `--output` is set.
    pub result: PathBuf,
    /// Use `R_i = θ·min(r_i, ‖∇f‖/γ_i)` instead of maximizing the threshold.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Bound the pseudoinverse point by point instead of uniformly.
    #[arg(long)]
    pub per_point_mu: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn block(cert: &Certificate<f64>, opts: &CertifyOptions<f64>) -> CertificateBlock {
    CertificateBlock {
        radius_policy: match opts.radius {
            RadiusPolicy::GridMaximizeChi => "grid-maximize-chi".to_string(),
            RadiusPolicy::FixedFraction(t) => format!("fixed-fraction({t})"),
        },
        pseudoinverse_bound: match opts.pseudoinverse {
            PseudoinverseBound::PerPoint => "per-point",
            PseudoinverseBound::Uniform => "uniform",
        }
        .to_string(),
        all_passed: cert.all_passed,
        distance_bound: cert.distance_bound,
        points: cert
            .per_point
            .iter()
            .map(|c| PointEntry {
                index: c.index,
                r: c.r,
                gamma: c.gamma,
                gradient_norm: c.gradient_norm,
                radius: c.radius,
                mu: c.mu,
                chi: c.chi,
                residual_abs: c.residual_abs,
                passed: c.passed,
                failure: c.failure.map(|f| {
                    match f {
                        FailureReason::ZeroGradient => "zero_gradient",
                        FailureReason::ThresholdExceeded => "threshold_exceeded",
                    }
                    .to_string()
                }),
            })
            .collect(),
    }
}

pub fn run(args: &CertifyArgs) -> Result<(), CliError> {
    let mut file = ResultFile::read(&args.result)?;
    let x = file.point_set()?;
    let f = file.polynomial()?;
    let e = file.perturbation()?;
    let opts = CertifyOptions {
        radius: args
            .theta
            .map_or(RadiusPolicy::GridMaximizeChi, RadiusPolicy::FixedFraction),
        pseudoinverse: if args.per_point_mu {
            PseudoinverseBound::PerPoint
        } else {
            PseudoinverseBound::Uniform
        },
    };
    let cert = kantorovich_certificate_with(&f, &x, &e, opts)?;
    file.certificate = Some(block(&cert, &opts));
    file.write(args.output.as_ref().unwrap_or(&args.result))?;

    println!(
        "{:>5} {:>10} {:>10} {:>10} {:>10}  verdict",
        "point", "R_i", "chi_i", "|f_i|", "gamma_i"
    );
    for c in &cert.per_point {
        println!(
            "{:>5} {:>10.4e} {:>10.4e} {:>10.3e} {:>10.4e}  {}",
            c.index + 1,
            c.radius,
            c.chi,
            c.residual_abs,
            c.gamma,
            if c.passed { "pass" } else { "FAIL" }
        );
    }
    println!("distance bound {:.4e}", cert.distance_bound);
    if cert.all_passed {
        Ok(())
    } else {
        let failed: Vec<String> = cert
            .failed_points()
            .map(|c| (c.index + 1).to_string())
            .collect();
        Err(CliError::Check(format!(
            "certificate fails at points {}",
            failed.join(", ")
        )))
    }
}
