//! `fit`: run the search and write a result file.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use lowdeg::algebra::{OrderKind, Term, TermOrdering};
use lowdeg::lpa::{lpa, LpaConfig, LpaResult, TermStep};
use lowdeg::{ExclusionMode, GapPolicy, RfaStatus};

use crate::error::CliError;
use crate::io::{
    ascending_indices, ConfigEcho, IterationEntry, PointSetFile, ResultFile, RfaEntry, TermEntry,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Ordering {
    Deglex,
    Degrevlex,
    Lex,
}

impl Ordering {
    fn kind(self) -> OrderKind {
        match self {
            Ordering::Deglex => OrderKind::DegLex,
            Ordering::Degrevlex => OrderKind::DegRevLex,
            Ordering::Lex => OrderKind::Lex,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Ordering::Deglex => "deglex",
            Ordering::Degrevlex => "degrevlex",
            Ordering::Lex => "lex",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Exclusion {
    /// Exclude a term when any residual component beats its bound.
    Any,
    /// Exclude a term only when every component beats its bound.
    All,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Points as JSON (canonical) or CSV (header row of variable names).
    #[arg(long)]
    pub input: PathBuf,
    /// Tolerance of every point; optional when the JSON input carries one.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Rank threshold; defaults to twice epsilon.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    /// Stopping tolerance on the step norm of the root finder.
    #[arg(long, default_value_t = 1e-10)]
    pub omega: f64,
    #[arg(long, value_enum, default_value_t = Ordering::Deglex)]
    pub ordering: Ordering,
    /// Comma-separated variable names from the smallest to the largest.
    /// Defaults to the file's `var_order`, then to the column order.
    #[arg(long, value_delimiter = ',')]
    pub var_order: Option<Vec<String>>,
    /// Pin the constant coefficient to zero.
    #[arg(long)]
    pub zero_constant: bool,
    #[arg(long, value_enum, default_value_t = Exclusion::Any)]
    pub exclusion_mode: Exclusion,
    /// Fail when a singular value falls inside the rank band instead of
    /// counting the values above it.
    #[arg(long)]
    pub strict_gap: bool,
    /// Stop with an error once candidate terms exceed this degree.
    #[arg(long)]
    pub max_degree: Option<u32>,
    #[arg(long, default_value_t = lowdeg::solver::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Result file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn status_name(s: RfaStatus) -> &'static str {
    match s {
        RfaStatus::Solution => "solution",
        RfaStatus::ExactAtOrigin => "exact_at_origin",
        RfaStatus::NoIteration => "no_iteration",
        RfaStatus::OutOfBox => "out_of_box",
        RfaStatus::RankDropMidway => "rank_drop_midway",
    }
}

fn iteration_entry(step: &TermStep<f64>, names: &[String]) -> IterationEntry {
    let ex = &step.exclusion;
    IterationEntry {
        term: step.term.display_with(names).to_string(),
        exponents: step.term.exponents().to_vec(),
        excluded: step.excluded(),
        rho0_norm: ex.rho0.norm(),
        max_excess: ex
            .rho0
            .iter()
            .zip(ex.bound.iter())
            .map(|(r, b)| r.abs() - b)
            .fold(f64::NEG_INFINITY, f64::max),
        rfa: step.rfa.as_ref().map(|r| RfaEntry {
            status: status_name(r.status).to_string(),
            iterations: r.iterations,
            rank: r.rank,
            selection: r.selection.clone(),
            last_step_norm: r.last_step_norm,
            hull_in_box: r.hull_in_box,
            iterate_sup_norms: r.trace.iter().map(|e| e.amax()).collect(),
        }),
    }
}

/// Converts a fit into the serialized form. Terms with a zero coefficient
/// are left out of the polynomial list but stay in the support.
pub fn result_file(
    res: &LpaResult<f64>,
    input: &PointSetFile,
    cfg: &LpaConfig<f64>,
    ordering: Ordering,
) -> ResultFile {
    let names = &input.variables;
    let polynomial = res
        .f
        .terms_descending(&cfg.ordering)
        .into_iter()
        .enumerate()
        .filter(|(i, (_, c))| *i == 0 || *c != 0.0)
        .map(|(i, (t, c)): (usize, (Term, f64))| TermEntry {
            term: t.display_with(names).to_string(),
            exponents: t.exponents().to_vec(),
            coefficient: c,
            leading: i == 0,
        })
        .collect();
    let e = res.e_bar.to_matrix();
    ResultFile {
        config: ConfigEcho {
            epsilon: cfg.epsilon,
            delta: cfg.delta,
            k: cfg.k,
            omega: cfg.omega,
            ordering: ordering.name().to_string(),
            var_order: cfg
                .ordering
                .ascending()
                .iter()
                .map(|&i| names[i].clone())
                .collect(),
            zero_constant: cfg.zero_constant,
            exclusion_mode: match cfg.exclusion_mode {
                ExclusionMode::AnyComponent => "any",
                ExclusionMode::AllComponents => "all",
            }
            .to_string(),
            gap_policy: match cfg.gap_policy {
                GapPolicy::Strict => "strict",
                GapPolicy::CountAboveUpper => "count-above-upper",
            }
            .to_string(),
            max_degree: cfg.max_degree,
            max_iter: cfg.max_iter,
        },
        variables: names.clone(),
        points: input.points.clone(),
        polynomial,
        support: res.support.iter().map(|t| t.exponents().to_vec()).collect(),
        e_bar: e.row_iter().map(|r| r.iter().copied().collect()).collect(),
        normalized_residual: res.normalized_residual,
        rank: res.rank,
        hull_in_box: res.hull_in_box,
        iterations: res
            .steps
            .iter()
            .map(|s| iteration_entry(s, names))
            .collect(),
        certificate: None,
    }
}

pub fn run(args: &FitArgs) -> Result<(), CliError> {
    let input = PointSetFile::read(&args.input)?;
    let epsilon = args.epsilon.or(input.epsilon).ok_or_else(|| {
        CliError::input("--epsilon is required (the input file does not set one)")
    })?;
    let points = input.point_set(epsilon)?;
    let order_names = args
        .var_order
        .clone()
        .or_else(|| input.var_order.clone())
        .unwrap_or_else(|| input.variables.clone());
    let ascending = ascending_indices(&input.variables, &order_names)?;
    let ordering = TermOrdering::new(args.ordering.kind(), ascending)?;

    let mut cfg = LpaConfig::new(epsilon, ordering);
    if let Some(d) = args.delta {
        cfg.delta = d;
    }
    cfg.k = args.k;
    cfg.omega = args.omega;
    cfg.zero_constant = args.zero_constant;
    cfg.exclusion_mode = match args.exclusion_mode {
        Exclusion::Any => ExclusionMode::AnyComponent,
        Exclusion::All => ExclusionMode::AllComponents,
    };
    cfg.gap_policy = if args.strict_gap {
        GapPolicy::Strict
    } else {
        GapPolicy::CountAboveUpper
    };
    cfg.max_degree = args.max_degree;
    cfg.max_iter = args.max_iter;

    let res = lpa(&points, &cfg)?;
    let file = result_file(&res, &input, &cfg, args.ordering);
    match &args.output {
        Some(path) => file.write(path)?,
        None => print!("{}", file.to_json()),
    }
    let shown: Vec<String> = file
        .polynomial
        .iter()
        .map(|t| format!("{:+.6} {}", t.coefficient, t.term))
        .collect();
    eprintln!(
        "f = {}\n{} candidate terms, normalized residual {:.3e}",
        shown.join(" "),
        file.iterations.len(),
        file.normalized_residual
    );
    Ok(())
}
