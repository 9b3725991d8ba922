//! Independent oracles and fixture builders shared by the integration tests.
#![allow(dead_code)]

use lowdeg::algebra::{next_candidate, EmpiricalPointSet, MonicPolynomial, Term, TermOrdering};
use lowdeg::datasets::quadric5_point;
use lowdeg::residual::{ErrorVector, ResidualContext};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Central-difference Jacobian of `f` at `x`.
pub fn fd_jacobian(
    f: impl Fn(&DVector<f64>) -> DVector<f64>,
    x: &DVector<f64>,
    h: f64,
) -> DMatrix<f64> {
    let m = f(x).len();
    let mut jac = DMatrix::zeros(m, x.len());
    for c in 0..x.len() {
        let mut up = x.clone();
        let mut down = x.clone();
        up[c] += h;
        down[c] -= h;
        jac.set_column(c, &((f(&up) - f(&down)) / (2.0 * h)));
    }
    jac
}

/// Largest entrywise error relative to the largest entry of `exact`.
pub fn max_relative_error(exact: &DMatrix<f64>, approx: &DMatrix<f64>) -> f64 {
    let scale = exact.amax().max(1e-300);
    (exact - approx).amax() / scale
}

/// All exponent vectors of `n` variables with total degree at most `d`.
pub fn all_terms(n: usize, d: u32) -> Vec<Term> {
    fn rec(n: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Term>) {
        if prefix.len() == n {
            out.push(Term::new(prefix.clone()));
            return;
        }
        for e in 0..=left {
            prefix.push(e);
            rec(n, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

/// The candidate chain produced when every candidate is accepted into `O`.
pub fn chain(ord: &TermOrdering, len: usize) -> Vec<Term> {
    let n = ord.nvars();
    let mut t = Term::one(n);
    let mut pending = Vec::new();
    let mut out = vec![t.clone()];
    while out.len() < len {
        t = next_candidate(&t, &mut pending, ord).unwrap();
        out.push(t.clone());
    }
    out
}

/// Random orthogonal `n x n` matrix (Q factor of a uniform random matrix).
pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    a.qr().q()
}

/// `U diag(spectrum) Vᵗ` with random orthogonal factors, shape `m x t`.
pub fn planted(rng: &mut ChaCha8Rng, m: usize, t: usize, spectrum: &[f64]) -> DMatrix<f64> {
    let u = random_orthogonal(rng, m);
    let v = random_orthogonal(rng, t);
    let mut s = DMatrix::zeros(m, t);
    for (i, v) in spectrum.iter().enumerate() {
        s[(i, i)] = *v;
    }
    u * s * v.transpose()
}

pub fn uniform_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| rng.gen_range(-scale..scale))
}

/// Singular values by the eigenvalues of `AᵗA` or `AAᵗ`, sorted descending.
pub fn gram_singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let g = if a.nrows() <= a.ncols() {
        a * a.transpose()
    } else {
        a.transpose() * a
    };
    let mut v: Vec<f64> = g
        .symmetric_eigenvalues()
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

/// Random distinct points in `[-half, half]^n` with tolerance `eps`.
pub fn random_points(
    rng: &mut ChaCha8Rng,
    s: usize,
    n: usize,
    half: f64,
    eps: f64,
) -> EmpiricalPointSet<f64> {
    loop {
        let rows: Vec<Vec<f64>> = (0..s)
            .map(|_| (0..n).map(|_| rng.gen_range(-half..half)).collect())
            .collect();
        if let Ok(x) = EmpiricalPointSet::from_rows(&rows, eps) {
            return x;
        }
    }
}

/// A random residual context with `n ≤ 3`, `s ≤ 10`, `|O| ≤ 5`, together with
/// an interior error vector at which to differentiate.
pub fn random_context(rng: &mut ChaCha8Rng) -> (ResidualContext<f64>, ErrorVector<f64>) {
    let n = rng.gen_range(1..=3);
    let o_len = rng.gen_range(1..=5);
    let s = rng.gen_range(o_len + 1..=10);
    let eps = 0.01;
    let x = random_points(rng, s, n, 1.5, eps);
    let ord = TermOrdering::natural(Default::default(), n);
    let mut terms = chain(&ord, o_len + 1);
    let candidate = terms.pop().unwrap();
    let ctx = ResidualContext::new(&x, terms, candidate).unwrap();
    let e = ErrorVector::from_vector(DVector::from_fn(s * n, |_, _| rng.gen_range(-eps..eps)), s)
        .unwrap();
    (ctx, e)
}

/// Damped Newton for the scalar equation `f(p + e) = 0` from `e0`, taking
/// minimal-norm steps `−f ∇f / ‖∇f‖²` halved until `|f|` decreases.
pub fn damped_newton(
    f: &MonicPolynomial<f64>,
    p: &[f64],
    e0: &[f64],
    tol: f64,
) -> Option<Vec<f64>> {
    let at = |e: &[f64]| -> Vec<f64> { p.iter().zip(e).map(|(a, b)| a + b).collect() };
    let mut e = e0.to_vec();
    let mut val = f.eval_at(&at(&e));
    for _ in 0..200 {
        if val.abs() <= tol {
            return Some(e);
        }
        let g = f.gradient_at(&at(&e));
        let gg = g.norm_squared();
        if gg == 0.0 {
            return None;
        }
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = e
                .iter()
                .zip(g.iter())
                .map(|(x, d)| x - lambda * val * d / gg)
                .collect();
            let tv = f.eval_at(&at(&trial));
            if tv.abs() < val.abs() {
                e = trial;
                val = tv;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-12 {
                return (val.abs() <= tol * 10.0).then_some(e);
            }
        }
    }
    (val.abs() <= tol).then_some(e)
}

pub fn distance2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Twenty-five points on the five-variable quadric, free coordinates drawn
/// from `[-half, half]`, every coordinate then shifted by a uniform draw from
/// `(-noise, noise)`. Draws whose tolerance boxes would overlap are redrawn.
pub fn quadric_sample(seed: u64, half: f64, noise: f64, eps: f64) -> EmpiricalPointSet<f64> {
    let mut rng = rng(seed);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(25);
    while rows.len() < 25 {
        let mut c = || rng.gen_range(-half..half);
        let (a, b, d, e) = (c(), c(), c(), c());
        let p: Vec<f64> = quadric5_point(a, b, d, e)
            .iter()
            .map(|v| v + rng.gen_range(-noise..noise))
            .collect();
        let clash = rows.iter().any(|q| {
            q.iter()
                .zip(&p)
                .map(|(u, v)| (u - v).abs())
                .fold(0.0, f64::max)
                <= 2.0 * eps
        });
        if !clash {
            rows.push(p);
        }
    }
    EmpiricalPointSet::from_rows(&rows, eps).unwrap()
}

pub fn rows_of(data: &[[f64; 2]]) -> Vec<Vec<f64>> {
    data.iter().map(|r| r.to_vec()).collect()
}

/// A planted-spectrum case for the rank-revealing bounds: an `m x t` matrix
/// whose leading `r` singular values lie in `[1, 10]` and whose trailing ones
/// lie in `[1e-4, 1e-1]`.
pub struct PlantedCase {
    pub a: DMatrix<f64>,
    pub r: usize,
    pub spectrum: Vec<f64>,
}

pub fn planted_case(seed: u64) -> PlantedCase {
    let mut rng = rng(seed);
    let m = rng.gen_range(3..=9);
    let t = rng.gen_range(3..=9);
    let p = m.min(t);
    let r = rng.gen_range(1..p);
    let mut spectrum: Vec<f64> = (0..p)
        .map(|i| {
            if i < r {
                rng.gen_range(1.0..10.0)
            } else {
                10f64.powf(rng.gen_range(-4.0..-1.0))
            }
        })
        .collect();
    spectrum.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let a = planted(&mut rng, m, t, &spectrum);
    PlantedCase { a, r, spectrum }
}
