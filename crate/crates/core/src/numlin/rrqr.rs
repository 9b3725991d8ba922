//! Strong rank-revealing QR.
//!
//! Column pivoted QR chooses an initial leading set of `r` columns; pairwise
//! swaps between the leading and trailing sets are then applied while one of
//! them grows `|det R11|` by more than [`SWAP_THRESHOLD`]. At the fixed point
//! every entry of `R11⁻¹R12` and every `γ_j(R22)/ω_i(R11)` is bounded by the
//! threshold, which yields
//! `σ_i(R11) >= σ_i(A) / sqrt(1 + f² r (t − r))` and
//! `σ_j(R22) <= σ_{r+j}(A) sqrt(1 + f² r (t − r))`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Swap acceptance factor `f`. Kept a hair above 1 so every swap strictly
/// increases `|det R11|` and the loop cannot cycle on round-off.
pub const SWAP_THRESHOLD: f64 = 1.0 + 1e-8;

const MAX_SWAPS: usize = 10_000;

/// `AΠ = (Q1 | Q2) [[R11, R12], [0, R22]]` with a thin `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct RrqrPartition<T: Scalar> {
    /// `perm[j]` is the original column placed at position `j`.
    pub perm: Vec<usize>,
    pub rank: usize,
    pub q1: DMatrix<T>,
    pub q2: DMatrix<T>,
    pub r11: DMatrix<T>,
    pub r12: DMatrix<T>,
    pub r22: DMatrix<T>,
    /// Number of strong-RRQR swaps performed after pivoted QR.
    pub swaps: usize,
}

impl<T: Scalar> RrqrPartition<T> {
    /// The `r` leading columns chosen by the permutation.
    pub fn leading(&self) -> &[usize] {
        &self.perm[..self.rank]
    }

    pub fn trailing(&self) -> &[usize] {
        &self.perm[self.rank..]
    }

    /// `G = R12ᵗ R11⁻ᵗ`, which expresses the trailing columns through the
    /// leading ones. `None` if `R11` is singular.
    pub fn g_matrix(&self) -> Option<DMatrix<T>> {
        let w = self.r11.clone().solve_upper_triangular(&self.r12)?;
        Some(w.transpose())
    }

    /// Reassembles `AΠ` from the factors.
    pub fn reconstruct_permuted(&self) -> DMatrix<T> {
        let r = self.rank;
        let t = self.perm.len();
        let p = self.q1.ncols() + self.q2.ncols();
        let mut q = DMatrix::zeros(self.q1.nrows(), p);
        q.columns_mut(0, r).copy_from(&self.q1);
        q.columns_mut(r, p - r).copy_from(&self.q2);
        let mut big_r = DMatrix::zeros(p, t);
        big_r.view_mut((0, 0), (r, r)).copy_from(&self.r11);
        big_r.view_mut((0, r), (r, t - r)).copy_from(&self.r12);
        big_r.view_mut((r, r), (p - r, t - r)).copy_from(&self.r22);
        q * big_r
    }
}

/// `A` with its columns reordered by `perm`.
pub fn permute_columns<T: Scalar>(a: &DMatrix<T>, perm: &[usize]) -> DMatrix<T> {
    DMatrix::from_fn(a.nrows(), perm.len(), |i, j| a[(i, perm[j])])
}

/// Greedy column pivoting on successive residuals (Businger–Golub order).
fn pivot_order<T: Scalar>(a: &DMatrix<T>, steps: usize) -> Vec<usize> {
    let t = a.ncols();
    let mut perm: Vec<usize> = (0..t).collect();
    let mut b = a.clone();
    for i in 0..steps {
        let (best, norm) =
            (i..t)
                .map(|j| (j, b.column(perm[j]).norm()))
                .fold(
                    (i, -T::one()),
                    |acc, cur| if cur.1 > acc.1 { cur } else { acc },
                );
        perm.swap(i, best);
        if norm <= T::zero() {
            break;
        }
        let q = b.column(perm[i]) / norm;
        let proj = q.transpose() * &b;
        b -= &q * proj;
    }
    perm
}

/// Strong rank-revealing QR partition of `A` at rank `r`.
pub fn rrqr_partition<T: Scalar>(a: &DMatrix<T>, r: usize) -> Result<RrqrPartition<T>> {
    let (m, t) = a.shape();
    let p = m.min(t);
    if r > p {
        return Err(Error::InvalidInput(format!(
            "partition rank {r} exceeds min({m}, {t})"
        )));
    }
    let f = T::lit(SWAP_THRESHOLD);
    let mut perm = pivot_order(a, r);
    let mut swaps = 0;
    loop {
        let (q, big_r) = thin_qr(&permute_columns(a, &perm));
        let done = |perm: Vec<usize>, swaps| {
            Ok(RrqrPartition {
                perm,
                rank: r,
                q1: q.columns(0, r).into_owned(),
                q2: q.columns(r, p - r).into_owned(),
                r11: big_r.view((0, 0), (r, r)).into_owned(),
                r12: big_r.view((0, r), (r, t - r)).into_owned(),
                r22: big_r.view((r, r), (p - r, t - r)).into_owned(),
                swaps,
            })
        };
        if r == 0 || r == t || swaps >= MAX_SWAPS {
            return done(perm, swaps);
        }
        let r11 = big_r.view((0, 0), (r, r)).into_owned();
        let Some(r11_inv) = r11.solve_upper_triangular(&DMatrix::identity(r, r)) else {
            return done(perm, swaps);
        };
        if r11_inv.iter().any(|v| !v.is_finite()) {
            return done(perm, swaps);
        }
        let w = &r11_inv * big_r.view((0, r), (r, t - r));
        let r22 = big_r.view((r, r), (p - r, t - r));
        let gamma: Vec<T> = (0..t - r).map(|j| r22.column(j).norm_squared()).collect();
        let inv_omega: Vec<T> = (0..r).map(|i| r11_inv.row(i).norm_squared()).collect();

        let mut best = (0, 0, T::zero());
        for i in 0..r {
            for j in 0..t - r {
                let rho = w[(i, j)] * w[(i, j)] + gamma[j] * inv_omega[i];
                if rho > best.2 {
                    best = (i, j, rho);
                }
            }
        }
        if best.2.sqrt() <= f {
            return done(perm, swaps);
        }
        perm.swap(best.0, r + best.1);
        swaps += 1;
    }
}

/// Thin Householder QR: `Q` is `m x min(m,t)`, `R` is `min(m,t) x t`.
fn thin_qr<T: Scalar>(a: &DMatrix<T>) -> (DMatrix<T>, DMatrix<T>) {
    let qr = a.clone().qr();
    (qr.q(), qr.r())
}
