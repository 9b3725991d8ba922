//! Point-set input files and the JSON result file.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use lowdeg::algebra::{EmpiricalPointSet, MonicPolynomial, Term};
use lowdeg::residual::ErrorVector;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Points read from a JSON or CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSetFile {
    /// Column names; column `j` of every point is variable `variables[j]`.
    pub variables: Vec<String>,
    pub epsilon: Option<f64>,
    /// Variable names from the smallest to the largest, when the file sets it.
    pub var_order: Option<Vec<String>>,
    pub points: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PointSetJson {
    variables: Vec<String>,
    #[serde(default)]
    epsilon: Option<f64>,
    #[serde(default)]
    var_order: Option<Vec<String>>,
    points: Vec<Vec<f64>>,
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

impl PointSetFile {
    /// Reads `path` as CSV when it ends in `.csv`, as JSON otherwise.
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let is_csv = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        let text = read_text(path)?;
        let file = if is_csv {
            Self::parse_csv(&text)
        } else {
            Self::parse_json(&text)
        }
        .map_err(|msg| CliError::input(format!("{}: {msg}", path.display())))?;
        Ok(file)
    }

    pub fn parse_json(text: &str) -> Result<Self, String> {
        let raw: PointSetJson = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let file = Self {
            variables: raw.variables,
            epsilon: raw.epsilon,
            var_order: raw.var_order,
            points: raw.points,
        };
        for (i, row) in file.points.iter().enumerate() {
            if row.len() != file.variables.len() {
                return Err(format!(
                    "field points[{i}]: expected {} coordinates, found {}",
                    file.variables.len(),
                    row.len()
                ));
            }
        }
        file.check_header()?;
        Ok(file)
    }

    /// Header row of variable names, then one point per row.
    pub fn parse_csv(text: &str) -> Result<Self, String> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let variables: Vec<String> = reader
            .headers()
            .map_err(|e| format!("header: {e}"))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut points = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| e.to_string())?;
            let line = record.position().map_or(0, |p| p.line());
            let row = record
                .iter()
                .enumerate()
                .map(|(c, v)| {
                    v.parse::<f64>().map_err(|_| {
                        format!(
                            "line {line}, column {}: cannot parse {v:?} as a number",
                            c + 1
                        )
                    })
                })
                .collect::<Result<Vec<f64>, String>>()?;
            points.push(row);
        }
        let file = Self {
            variables,
            epsilon: None,
            var_order: None,
            points,
        };
        file.check_header()?;
        Ok(file)
    }

    fn check_header(&self) -> Result<(), String> {
        if self.variables.is_empty() {
            return Err("no variables declared".into());
        }
        let mut seen = HashSet::new();
        for v in &self.variables {
            if v.is_empty() || !seen.insert(v.as_str()) {
                return Err(format!("variable name {v:?} is empty or repeated"));
            }
        }
        if self.points.is_empty() {
            return Err("the file contains no points".into());
        }
        Ok(())
    }

    /// Validated point set with tolerance `epsilon`.
    pub fn point_set(&self, epsilon: f64) -> Result<EmpiricalPointSet<f64>, CliError> {
        point_set(&self.points, epsilon)
    }
}

pub fn point_set(rows: &[Vec<f64>], epsilon: f64) -> Result<EmpiricalPointSet<f64>, CliError> {
    EmpiricalPointSet::from_rows(rows, epsilon).map_err(|e| match e {
        lowdeg::Error::NotDistinct { first, second, .. } => {
            CliError::input(format!("points[{first}] and points[{second}]: {e}"))
        }
        other => CliError::input(other.to_string()),
    })
}

/// Variable indices from the smallest to the largest variable, given names.
pub fn ascending_indices(variables: &[String], order: &[String]) -> Result<Vec<usize>, CliError> {
    if order.len() != variables.len() {
        return Err(CliError::input(format!(
            "variable order lists {} names but the data has {} variables",
            order.len(),
            variables.len()
        )));
    }
    let idx = order
        .iter()
        .map(|name| {
            variables.iter().position(|v| v == name).ok_or_else(|| {
                CliError::input(format!("unknown variable {name:?} in the variable order"))
            })
        })
        .collect::<Result<Vec<usize>, CliError>>()?;
    let distinct: HashSet<_> = idx.iter().collect();
    if distinct.len() != idx.len() {
        return Err(CliError::input("variable order repeats a variable"));
    }
    Ok(idx)
}

/// The run configuration as recorded in a result file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub epsilon: f64,
    pub delta: f64,
    pub k: f64,
    pub omega: f64,
    pub ordering: String,
    /// Variable names from the smallest to the largest.
    pub var_order: Vec<String>,
    pub zero_constant: bool,
    pub exclusion_mode: String,
    pub gap_policy: String,
    pub max_degree: Option<u32>,
    pub max_iter: usize,
}

/// One monomial of a polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEntry {
    #[serde(default)]
    pub term: String,
    pub exponents: Vec<u32>,
    pub coefficient: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub leading: bool,
}

/// Any JSON object with a `polynomial` list, such as a result file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PolynomialBlock {
    pub polynomial: Vec<TermEntry>,
}

/// `Σ c · x^a` over the entries.
pub fn eval_entries(entries: &[TermEntry], point: &[f64]) -> f64 {
    entries
        .iter()
        .map(|e| {
            e.exponents
                .iter()
                .zip(point)
                .fold(e.coefficient, |acc, (&a, &x)| acc * x.powi(a as i32))
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfaEntry {
    pub status: String,
    pub iterations: usize,
    pub rank: usize,
    pub selection: Vec<usize>,
    pub last_step_norm: f64,
    pub hull_in_box: bool,
    /// `‖e‖_∞` of every iterate, starting at the origin.
    pub iterate_sup_norms: Vec<f64>,
}

/// What happened to one candidate term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationEntry {
    pub term: String,
    pub exponents: Vec<u32>,
    pub excluded: bool,
    /// `‖ρ(0)‖₂`.
    pub rho0_norm: f64,
    /// `max_i (|ρ_i(0)| − b_i)` against the first-order exclusion bound `b`.
    pub max_excess: f64,
    pub rfa: Option<RfaEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointEntry {
    pub index: usize,
    pub r: f64,
    pub gamma: f64,
    pub gradient_norm: f64,
    pub radius: f64,
    pub mu: f64,
    pub chi: f64,
    pub residual_abs: f64,
    pub passed: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateBlock {
    pub radius_policy: String,
    pub pseudoinverse_bound: String,
    pub all_passed: bool,
    pub distance_bound: f64,
    pub points: Vec<PointEntry>,
}

/// Everything a fit produced, plus an optional certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub config: ConfigEcho,
    pub variables: Vec<String>,
    pub points: Vec<Vec<f64>>,
    /// Leading term first, then the nonzero support terms in descending order.
    pub polynomial: Vec<TermEntry>,
    /// Support `O` as exponent vectors, in the order the terms were added.
    pub support: Vec<Vec<u32>>,
    /// One row per point.
    pub e_bar: Vec<Vec<f64>>,
    /// `‖f(X(ē))‖₂ / ‖f‖`.
    pub normalized_residual: f64,
    pub rank: usize,
    pub hull_in_box: bool,
    pub iterations: Vec<IterationEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateBlock>,
}

impl ResultFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = read_text(path)?;
        Self::from_json(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result files always serialize");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.to_json())
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    pub fn point_set(&self) -> Result<EmpiricalPointSet<f64>, CliError> {
        point_set(&self.points, self.config.epsilon)
    }

    /// The monic polynomial recorded in the file.
    pub fn polynomial(&self) -> Result<MonicPolynomial<f64>, CliError> {
        let n = self.variables.len();
        let bad = |msg: String| CliError::input(format!("field polynomial: {msg}"));
        if let Some(e) = self.polynomial.iter().find(|e| e.exponents.len() != n) {
            return Err(bad(format!(
                "term {:?} does not have {n} exponents",
                e.exponents
            )));
        }
        let mut leading = self.polynomial.iter().filter(|e| e.leading);
        let lead = match (leading.next(), leading.next()) {
            (Some(l), None) if l.coefficient == 1.0 => l,
            _ => {
                return Err(bad(
                    "exactly one leading term with coefficient 1 is required".into(),
                ))
            }
        };
        let support: Vec<Term> = self
            .support
            .iter()
            .map(|ex| Term::new(ex.clone()))
            .collect();
        let alpha = DVector::from_iterator(
            support.len(),
            support.iter().map(|t| {
                self.polynomial
                    .iter()
                    .find(|e| !e.leading && e.exponents == t.exponents())
                    .map_or(0.0, |e| -e.coefficient)
            }),
        );
        if let Some(e) = self
            .polynomial
            .iter()
            .find(|e| !e.leading && !self.support.contains(&e.exponents))
        {
            return Err(bad(format!("term {:?} is not in the support", e.exponents)));
        }
        MonicPolynomial::new(Term::new(lead.exponents.clone()), support, alpha)
            .map_err(|e| bad(e.to_string()))
    }

    pub fn perturbation(&self) -> Result<ErrorVector<f64>, CliError> {
        let n = self.variables.len();
        if self.e_bar.len() != self.points.len() || self.e_bar.iter().any(|r| r.len() != n) {
            return Err(CliError::input(format!(
                "field e_bar: expected {} rows of {n} values",
                self.points.len()
            )));
        }
        let m = DMatrix::from_fn(self.e_bar.len(), n, |i, j| self.e_bar[i][j]);
        Ok(ErrorVector::from_matrix(&m))
    }

    /// `‖f(X(ē))‖₂ / ‖f‖` recomputed from the stored fields.
    pub fn recompute_normalized_residual(&self) -> Result<f64, CliError> {
        let f = self.polynomial()?;
        let rows = self.points.len();
        let n = self.variables.len();
        let e = self.perturbation()?.to_matrix();
        let moved = DMatrix::from_fn(rows, n, |i, j| self.points[i][j] + e[(i, j)]);
        f.normalized_residual(&moved)
            .map_err(|e| CliError::input(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_with_header() {
        let f = PointSetFile::parse_csv("x, y\n1, 2\n3.5, -4\n").unwrap();
        assert_eq!(f.variables, vec!["x", "y"]);
        assert_eq!(f.points, vec![vec![1.0, 2.0], vec![3.5, -4.0]]);
    }

    #[test]
    fn csv_reports_line_of_bad_value() {
        let err = PointSetFile::parse_csv("x,y\n1,2\n3,oops\n").unwrap_err();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn json_reports_short_row() {
        let err = PointSetFile::parse_json(r#"{"variables":["x","y"],"points":[[1,2],[3]]}"#)
            .unwrap_err();
        assert!(err.contains("points[1]"), "{err}");
    }

    #[test]
    fn empty_point_list_is_rejected() {
        let err = PointSetFile::parse_json(r#"{"variables":["x"],"points":[]}"#).unwrap_err();
        assert!(err.contains("no points"));
    }

    #[test]
    fn repeated_variable_is_rejected() {
        assert!(PointSetFile::parse_json(r#"{"variables":["x","x"],"points":[[1,2]]}"#).is_err());
    }

    #[test]
    fn ascending_indices_by_name() {
        let vars = vec!["x".to_string(), "y".to_string()];
        assert_eq!(
            ascending_indices(&vars, &["y".into(), "x".into()]).unwrap(),
            vec![1, 0]
        );
        assert!(ascending_indices(&vars, &["y".into(), "z".into()]).is_err());
        assert!(ascending_indices(&vars, &["y".into(), "y".into()]).is_err());
    }

    #[test]
    fn entries_evaluate_as_polynomial() {
        let e = vec![
            TermEntry {
                term: String::new(),
                exponents: vec![2, 0],
                coefficient: 1.0,
                leading: true,
            },
            TermEntry {
                term: String::new(),
                exponents: vec![0, 1],
                coefficient: -3.0,
                leading: false,
            },
        ];
        assert_eq!(eval_entries(&e, &[2.0, 1.0]), 1.0);
    }
}
