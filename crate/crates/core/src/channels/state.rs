use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::numerics::{hermitian_eig, norm, orthonormalize, CMatrix, HermitianSpectrum};
use crate::{Error, Result};

/// Eigenvalues in `[-EIG_CLIP, 0]` are treated as exact zeros; anything more
/// negative makes a matrix an invalid state.
pub const EIG_CLIP: f64 = 1e-10;

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!(
                "{}x{} matrix is not square",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = matrix.hermitian_defect();
        if defect > EIG_CLIP {
            return Err(Error::InvalidState(format!("Hermitian defect {defect:.3e}")));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > EIG_CLIP {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let matrix = matrix.hermitian_part();
        let min = hermitian_eig(&matrix)?.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -EIG_CLIP {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(DensityOperator { matrix })
    }

    /// Hermitian-symmetrised matrix assumed to be a state; used for channel
    /// outputs whose validity follows from the channel invariants.
    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        DensityOperator {
            matrix: matrix.hermitian_part(),
        }
    }

    /// `|ψ⟩⟨ψ|` for the normalised vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let n = norm(psi);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / n).collect();
        Ok(DensityOperator {
            matrix: CMatrix::outer(&v, &v),
        })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityOperator {
            matrix: CMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(CMatrix::diag_real(probs))
    }

    /// `Σ_i p_i |v_i⟩⟨v_i|` for normalised vectors `v_i`.
    pub fn mixture(probs: &[f64], vectors: &[Vec<C64>]) -> Result<Self> {
        if probs.len() != vectors.len() || vectors.is_empty() {
            return Err(Error::InvalidState("weights and vectors differ in length".into()));
        }
        let d = vectors[0].len();
        let mut m = CMatrix::zeros(d, d);
        for (p, v) in probs.iter().zip(vectors) {
            if v.len() != d {
                return Err(Error::dims(d, v.len()));
            }
            let n = norm(v);
            let u: Vec<C64> = v.iter().map(|z| z / n).collect();
            m += &CMatrix::outer(&u, &u).scale_real(*p);
        }
        Self::new(m)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn spectrum(&self) -> Result<HermitianSpectrum> {
        hermitian_eig(&self.matrix)
    }

    /// Number of eigenvalues above the clipping threshold.
    pub fn rank(&self) -> Result<usize> {
        Ok(self
            .spectrum()?
            .eigenvalues
            .iter()
            .filter(|&&l| l > EIG_CLIP)
            .count())
    }

    pub fn is_pure(&self) -> Result<bool> {
        Ok(self.rank()? <= 1)
    }
}

/// Subspace held as an orthonormal column frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    frame: CMatrix,
}

impl Subspace {
    /// Span of the given vectors (orthonormalised, dependent vectors dropped).
    pub fn span(ambient_dim: usize, vectors: &[Vec<C64>]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient_dim) {
            return Err(Error::dims(ambient_dim, v.len()));
        }
        let q = orthonormalize(vectors, 1e-10);
        if q.is_empty() {
            return Err(Error::BadRank("subspace must be nontrivial".into()));
        }
        Ok(Subspace {
            frame: CMatrix::from_columns(ambient_dim, &q),
        })
    }

    /// Wraps a frame whose columns are already orthonormal (to 1e-10).
    pub fn from_frame(frame: CMatrix) -> Result<Self> {
        let gram = frame.adjoint_mul(&frame);
        let defect = (&gram - &CMatrix::identity(frame.cols())).max_abs();
        if defect > 1e-10 || frame.cols() == 0 {
            return Err(Error::NotIsometry { defect });
        }
        Ok(Subspace { frame })
    }

    pub fn full(d: usize) -> Self {
        Subspace {
            frame: CMatrix::identity(d),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.rows()
    }

    pub fn dim(&self) -> usize {
        self.frame.cols()
    }

    pub fn frame(&self) -> &CMatrix {
        &self.frame
    }
}
