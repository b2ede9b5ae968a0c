use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use super::CMatrix;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius mass, relative to `‖A‖_F`, at which Jacobi stops.
pub const JACOBI_TOL: f64 = 1e-14;

/// Eigenvalues in descending order with the matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianSpectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `U diag(f(λ)) U†`
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        CMatrix::from_fn(n, n, |i, j| {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..n {
                if fl[k] != 0.0 {
                    s += u[(i, k)] * u[(j, k)].conj() * fl[k];
                }
            }
            s
        })
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|l| l)
    }
}

/// Unitary 2×2 rotation `[[g_pp, g_pq], [g_qp, g_qq]]` acting on columns
/// `p, q` that diagonalises the Hermitian block `[[app, apq], [conj(apq), aqq]]`
/// by congruence `G† B G`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Rotation {
    pub pp: C64,
    pub pq: C64,
    pub qp: C64,
    pub qq: C64,
}

impl Rotation {
    pub(crate) fn for_block(app: f64, aqq: f64, apq: C64) -> Rotation {
        let r = apq.norm();
        let phase = if r > 0.0 { apq / r } else { C64::new(1.0, 0.0) };
        let theta = (aqq - app) / (2.0 * r);
        let t = if theta.is_infinite() {
            0.0
        } else {
            let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
            sign / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0))
        };
        let c = 1.0 / libm::sqrt(t * t + 1.0);
        let s = t * c;
        // G = diag(1, conj(phase)) · [[c, s], [-s, c]]
        let ph = phase.conj();
        Rotation {
            pp: C64::new(c, 0.0),
            pq: C64::new(s, 0.0),
            qp: ph * (-s),
            qq: ph * c,
        }
    }

    /// `M ← M G` on columns `p, q`.
    pub(crate) fn apply_right(&self, m: &mut CMatrix, p: usize, q: usize) {
        for k in 0..m.rows() {
            let a = m[(k, p)];
            let b = m[(k, q)];
            m[(k, p)] = a * self.pp + b * self.qp;
            m[(k, q)] = a * self.pq + b * self.qq;
        }
    }

    /// `M ← G† M` on rows `p, q`.
    fn apply_left_adjoint(&self, m: &mut CMatrix, p: usize, q: usize) {
        for k in 0..m.cols() {
            let a = m[(p, k)];
            let b = m[(q, k)];
            m[(p, k)] = self.pp.conj() * a + self.qp.conj() * b;
            m[(q, k)] = self.pq.conj() * a + self.qq.conj() * b;
        }
    }
}

fn off_diagonal_mass(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    libm::sqrt(s)
}

/// Precondition shared by the Hermitian routines.
pub(crate) fn check_hermitian(a: &CMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::dims("square matrix", alloc::format!("{}x{}", a.rows(), a.cols())));
    }
    let defect = a.hermitian_defect();
    if !(defect <= 1e-10 * (1.0 + a.frobenius_norm())) {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix by the cyclic complex Jacobi
/// method. Eigenvalues are returned in descending order.
pub fn hermitian_eig(a: &CMatrix) -> Result<HermitianSpectrum> {
    check_hermitian(a)?;
    let n = a.rows();
    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
    }
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius_norm();
    let target = JACOBI_TOL * scale;

    let mut converged = off_diagonal_mass(&m) <= target;
    let mut sweep = 0;
    while !converged {
        if sweep >= MAX_SWEEPS {
            return Err(Error::NoConvergence {
                what: "Jacobi eigensolver",
                iterations: sweep,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // Entries negligible against both diagonal entries are zeroed.
                let g = 100.0 * r;
                if sweep > 3 && libm::fabs(app) + g == libm::fabs(app) && libm::fabs(aqq) + g == libm::fabs(aqq) {
                    m[(p, q)] = C64::new(0.0, 0.0);
                    m[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                let rot = Rotation::for_block(app, aqq, apq);
                rot.apply_right(&mut m, p, q);
                rot.apply_left_adjoint(&mut m, p, q);
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                rot.apply_right(&mut v, p, q);
            }
        }
        sweep += 1;
        converged = off_diagonal_mass(&m) <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps the result deterministic for ties.
    order.sort_by(|&i, &j| {
        m[(j, j)]
            .re
            .partial_cmp(&m[(i, i)].re)
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = v.select_columns(&order);
    Ok(HermitianSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

pub fn min_eig_hermitian(a: &CMatrix) -> Result<f64> {
    let s = hermitian_eig(a)?;
    Ok(s.eigenvalues.last().copied().unwrap_or(0.0))
}
