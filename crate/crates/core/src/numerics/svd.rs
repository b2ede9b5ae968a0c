use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use super::eig::Rotation;
use super::CMatrix;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Right singular vectors and singular values of a matrix, unsorted.
#[derive(Clone, Debug)]
pub struct RightSingular {
    /// `σ_j` for column `j` of `vectors`.
    pub values: Vec<f64>,
    /// Unitary `n×n` matrix of right singular vectors.
    pub vectors: CMatrix,
}

impl RightSingular {
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// One-sided (Hestenes) Jacobi SVD. Columns of `A V` become mutually
/// orthogonal; their norms are the singular values.
pub fn right_singular(a: &CMatrix) -> Result<RightSingular> {
    let n = a.cols();
    let mut w = a.clone();
    let mut v = CMatrix::identity(n);
    let col_norm2 = |w: &CMatrix, j: usize| -> f64 { (0..w.rows()).map(|i| w[(i, j)].norm_sqr()).sum() };

    let floor = 1e-30 * a.frobenius_norm() * a.frobenius_norm();
    let mut sweep = 0;
    loop {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = col_norm2(&w, p);
                let beta = col_norm2(&w, q);
                let gamma: C64 = (0..w.rows()).map(|i| w[(i, p)].conj() * w[(i, q)]).sum();
                let g = gamma.norm();
                if g <= floor || g <= 1e-15 * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let rot = Rotation::for_block(alpha, beta, gamma);
                rot.apply_right(&mut w, p, q);
                rot.apply_right(&mut v, p, q);
            }
        }
        sweep += 1;
        if !rotated {
            break;
        }
        if sweep >= MAX_SWEEPS {
            return Err(Error::NoConvergence {
                what: "one-sided Jacobi SVD",
                iterations: sweep,
            });
        }
    }
    let values = (0..n).map(|j| libm::sqrt(col_norm2(&w, j))).collect();
    Ok(RightSingular { values, vectors: v })
}

/// Relative rank tolerance `max(rows, cols) · 1e-12`; multiplied by `σ_max`
/// it gives the default numerical-rank threshold.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * 1e-12
}

/// Orthonormal basis of `ker L`: right singular vectors with
/// `σ ≤ rank_tol · σ_max`. A zero matrix has the whole space as kernel.
pub fn nullspace(l: &CMatrix, rank_tol: f64) -> Result<Vec<Vec<C64>>> {
    let s = right_singular(l)?;
    let thr = rank_tol * s.max_value();
    Ok((0..l.cols())
        .filter(|&j| s.values[j] <= thr)
        .map(|j| s.vectors.column(j))
        .collect())
}

/// Number of singular values above `rank_tol · σ_max`.
pub fn numerical_rank(l: &CMatrix, rank_tol: f64) -> Result<usize> {
    let s = right_singular(l)?;
    let thr = rank_tol * s.max_value();
    Ok(s.values.iter().filter(|&&x| x > thr).count())
}
