//! `emit-plot`: sample a two-variable result on a grid for external plotting.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;

use crate::error::CliError;
use crate::io::{eval_entries, PolynomialBlock, ResultFile, TermEntry};

pub const GRID: usize = 400;
pub const PADDING: f64 = 0.1;

#[derive(Debug, Args)]
pub struct EmitPlotArgs {
    /// Result file written by `fit`.
    pub result: PathBuf,
    /// CSV file to write.
    pub output: PathBuf,
    /// JSON file with a second `polynomial` list to sample on the same grid.
    #[arg(long)]
    pub overlay: Option<PathBuf>,
}

/// Axis-aligned region holding every ε-box, widened by `PADDING` of its size
/// on each side.
pub fn bounds(points: &[Vec<f64>], eps: f64) -> [(f64, f64); 2] {
    let mut out = [(f64::INFINITY, f64::NEG_INFINITY); 2];
    for p in points {
        for (axis, lim) in out.iter_mut().enumerate() {
            lim.0 = lim.0.min(p[axis] - eps);
            lim.1 = lim.1.max(p[axis] + eps);
        }
    }
    out.map(|(lo, hi)| {
        let pad = PADDING * (hi - lo);
        (lo - pad, hi + pad)
    })
}

fn grid_rows(
    out: &mut csv::Writer<Vec<u8>>,
    kind: &str,
    entries: &[TermEntry],
    b: [(f64, f64); 2],
) -> csv::Result<()> {
    let step = |(lo, hi): (f64, f64), i: usize| lo + (hi - lo) * i as f64 / (GRID - 1) as f64;
    for i in 0..GRID {
        let x = step(b[0], i);
        for j in 0..GRID {
            let y = step(b[1], j);
            let f = eval_entries(entries, &[x, y]);
            out.write_record([kind, "", &x.to_string(), &y.to_string(), &f.to_string()])?;
        }
    }
    Ok(())
}

fn read_overlay(path: &Path) -> Result<Vec<TermEntry>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let block: PolynomialBlock = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if block.polynomial.iter().any(|e| e.exponents.len() != 2) {
        return Err(CliError::input(format!(
            "{}: overlay terms need 2 exponents",
            path.display()
        )));
    }
    Ok(block.polynomial)
}

/// The CSV text: columns `kind,id,x,y,f` with kinds `grid`, `overlay`,
/// `point` (with `f` at the point) and `box` (closed corner path per point).
pub fn render(file: &ResultFile, overlay: Option<&[TermEntry]>) -> Result<String, CliError> {
    if file.variables.len() != 2 {
        return Err(CliError::input(format!(
            "plotting supports two variables, the result has {}",
            file.variables.len()
        )));
    }
    let eps = file.config.epsilon;
    let b = bounds(&file.points, eps);
    let fail = |e: csv::Error| CliError::input(e.to_string());
    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(["kind", "id", "x", "y", "f"])
        .map_err(fail)?;
    grid_rows(&mut out, "grid", &file.polynomial, b).map_err(fail)?;
    if let Some(entries) = overlay {
        grid_rows(&mut out, "overlay", entries, b).map_err(fail)?;
    }
    for (i, p) in file.points.iter().enumerate() {
        let f = eval_entries(&file.polynomial, p);
        out.write_record([
            "point",
            &i.to_string(),
            &p[0].to_string(),
            &p[1].to_string(),
            &f.to_string(),
        ])
        .map_err(fail)?;
    }
    for (i, p) in file.points.iter().enumerate() {
        let corners = [
            (-1.0, -1.0),
            (1.0, -1.0),
            (1.0, 1.0),
            (-1.0, 1.0),
            (-1.0, -1.0),
        ];
        for (dx, dy) in corners {
            let (x, y) = (p[0] + dx * eps, p[1] + dy * eps);
            out.write_record(["box", &i.to_string(), &x.to_string(), &y.to_string(), ""])
                .map_err(fail)?;
        }
    }
    let bytes = out
        .into_inner()
        .map_err(|e| CliError::input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

pub fn run(args: &EmitPlotArgs) -> Result<(), CliError> {
    let file = ResultFile::read(&args.result)?;
    let overlay = args.overlay.as_deref().map(read_overlay).transpose()?;
    let text = render(&file, overlay.as_deref())?;
    fs::write(&args.output, text)
        .map_err(|e| CliError::input(format!("{}: {e}", args.output.display())))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_pad_the_boxes() {
        let b = bounds(&[vec![0.0, 0.0], vec![1.0, 2.0]], 0.5);
        assert_eq!(b[0], (-0.7, 1.7));
        assert!((b[1].0 - -0.8_f64).abs() < 1e-12 && (b[1].1 - 2.8_f64).abs() < 1e-12);
    }
}
