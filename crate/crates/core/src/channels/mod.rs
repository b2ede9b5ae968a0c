//! Quantum channels held as Kraus families.
//!
//! A [`QuantumChannel`] maps operators on `C^{d_A}` to operators on `C^{d_B}`
//! by `Φ(X) = Σ_k A_k X A_k†`. The Kraus family doubles as the Stinespring
//! isometry `V = Σ_k A_k ⊗ |k⟩`, which makes the complementary channel
//! `Φ̂(ρ)_{kl} = Tr(A_k ρ A_l†)` available directly.

mod fixtures;
mod state;
mod structure;

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::numerics::{hermitian_eig, partial_trace, CMatrix, Side};
use crate::{Error, Result};

pub use fixtures::{
    cd_channel, cq_channel, dephasing, dephasing_computational, depolarizing, identity,
    random_channel, truncation_channel,
};
pub use state::{DensityOperator, Subspace, EIG_CLIP};
pub(crate) use structure::{common_eigenbasis, commutation_obstruction, family_residual};

/// Default tolerance for structural predicates that test "= 0".
pub const STRUCTURAL_TOL: f64 = 1e-8;
/// Tolerance on `‖Σ A_k†A_k − I‖_F`.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Kraus operators with Frobenius norm at or below this are dropped when a
/// complementary channel is formed.
pub const ZERO_KRAUS_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
    choi: CMatrix,
}

impl QuantumChannel {
    /// Validates a Kraus family: common `d_B × d_A` shape, trace preservation
    /// and complete positivity of the Choi matrix.
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::ShapeMismatch("empty Kraus family".into()))?;
        let (dim_out, dim_in) = first.shape();
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::ShapeMismatch("zero-dimensional Kraus operator".into()));
        }
        for (k, a) in kraus.iter().enumerate() {
            if a.shape() != (dim_out, dim_in) {
                return Err(Error::ShapeMismatch(format!(
                    "kraus[{k}] is {}x{}, expected {dim_out}x{dim_in}",
                    a.rows(),
                    a.cols()
                )));
            }
            if !a.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        let mut sum = CMatrix::zeros(dim_in, dim_in);
        for a in &kraus {
            sum += &a.adjoint_mul(a);
        }
        let residual = (&sum - &CMatrix::identity(dim_in)).frobenius_norm();
        if !(residual <= COMPLETENESS_TOL) {
            return Err(Error::NotTracePreserving { residual });
        }
        let choi = choi_from_kraus(&kraus, dim_in, dim_out);
        let min_eig = hermitian_eig(&choi)?.eigenvalues.last().copied().unwrap_or(0.0);
        if min_eig < -COMPLETENESS_TOL {
            return Err(Error::NotCP { min_eig });
        }
        Ok(QuantumChannel {
            dim_in,
            dim_out,
            kraus,
            choi,
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// `C = Σ_{ij} E_ij ⊗ Φ(E_ij)`, input index first.
    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        Ok(DensityOperator::from_trusted(self.apply_raw(rho.matrix())?))
    }

    /// Linear extension of the channel to arbitrary `d_A × d_A` operators.
    pub fn apply_raw(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::dims(
                format!("{0}x{0}", self.dim_in),
                format!("{}x{}", x.rows(), x.cols()),
            ));
        }
        Ok(self.map(x))
    }

    pub(crate) fn map(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for a in &self.kraus {
            let ax = a * x;
            out += &(&ax * &a.adjoint());
        }
        out
    }

    /// `Φ(|u⟩⟨v|) = Σ_k (A_k u)(A_k v)†`
    pub(crate) fn map_outer(&self, u: &[C64], v: &[C64]) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for a in &self.kraus {
            let au = a.mul_vec(u);
            let av = a.mul_vec(v);
            out += &CMatrix::outer(&au, &av);
        }
        out
    }

    /// Dual (Heisenberg-picture) map `Φ*(Y) = Σ_k A_k† Y A_k`.
    pub fn dual(&self, y: &CMatrix) -> Result<CMatrix> {
        if y.shape() != (self.dim_out, self.dim_out) {
            return Err(Error::dims(
                format!("{0}x{0}", self.dim_out),
                format!("{}x{}", y.rows(), y.cols()),
            ));
        }
        let mut out = CMatrix::zeros(self.dim_in, self.dim_in);
        for a in &self.kraus {
            out += &a.adjoint_mul(&(y * a));
        }
        Ok(out)
    }

    /// Complementary channel `Φ̂ : d_A → K`, with `K` the number of nonzero
    /// Kraus operators, `Φ̂(ρ)_{kl} = Tr(A_k ρ A_l†)`.
    pub fn complement(&self) -> QuantumChannel {
        let kept: Vec<&CMatrix> = self
            .kraus
            .iter()
            .filter(|a| a.frobenius_norm() > ZERO_KRAUS_TOL)
            .collect();
        let env = kept.len();
        // R_b[k, a] = A_k[b, a]
        let kraus: Vec<CMatrix> = (0..self.dim_out)
            .map(|b| CMatrix::from_fn(env, self.dim_in, |k, a| kept[k][(b, a)]))
            .collect();
        let choi = choi_from_kraus(&kraus, self.dim_in, env);
        QuantumChannel {
            dim_in: self.dim_in,
            dim_out: env,
            kraus,
            choi,
        }
    }

    /// `self ∘ first`, i.e. `first` is applied before `self`.
    pub fn after(&self, first: &QuantumChannel) -> Result<QuantumChannel> {
        compose(self, first)
    }

    /// Restriction to operators on the subspace: Kraus operators `A_k F`.
    pub fn subchannel(&self, s: &Subspace) -> Result<QuantumChannel> {
        if s.ambient_dim() != self.dim_in {
            return Err(Error::dims(self.dim_in, s.ambient_dim()));
        }
        let kraus: Vec<CMatrix> = self.kraus.iter().map(|a| a * s.frame()).collect();
        let dim_in = s.dim();
        let choi = choi_from_kraus(&kraus, dim_in, self.dim_out);
        Ok(QuantumChannel {
            dim_in,
            dim_out: self.dim_out,
            kraus,
            choi,
        })
    }

    /// Matrix `S` with `vec(Φ(X)) = S vec(X)` for row-major `vec`.
    pub fn superoperator(&self) -> CMatrix {
        let (da, db) = (self.dim_in, self.dim_out);
        CMatrix::from_fn(db * db, da * da, |row, col| {
            let (b, b2) = (row / db, row % db);
            let (a, a2) = (col / da, col % da);
            self.kraus
                .iter()
                .map(|k| k[(b, a)] * k[(b2, a2)].conj())
                .sum()
        })
    }

    /// `Φ(E) = 0` on a basis of traceless operators, i.e. `Φ(ρ) = (Tr ρ) σ`.
    pub fn is_completely_depolarizing(&self, tol: f64) -> bool {
        let d = self.dim_in;
        let e = |i: usize| crate::numerics::basis_vector(d, i);
        for i in 0..d {
            for j in 0..d {
                if i != j && self.map_outer(&e(i), &e(j)).frobenius_norm() > tol {
                    return false;
                }
            }
        }
        let first = self.map_outer(&e(0), &e(0));
        (1..d).all(|i| (&self.map_outer(&e(i), &e(i)) - &first).frobenius_norm() <= tol)
    }

    /// Searches an orthonormal basis `{|i⟩}` of the input space with
    /// `Φ(|i⟩⟨j|) = 0` for all `i ≠ j`. On success `Φ(ρ) = Σ ⟨i|ρ|i⟩ σ_i`.
    pub fn is_discrete_cq(&self, tol: f64) -> Option<DiscreteCq> {
        let frame = CMatrix::identity(self.dim_in);
        let all = 0..self.dim_in;
        let groups = core::slice::from_ref(&all);
        let found = common_eigenbasis(self, &frame, groups, tol, 0);
        if found.residual > tol {
            return None;
        }
        let states = found
            .basis
            .iter()
            .map(|v| self.map_outer(v, v).hermitian_part())
            .collect();
        Some(DiscreteCq {
            basis: found.basis,
            states,
        })
    }
}

/// Basis and output states of a discrete classical-quantum channel.
#[derive(Clone, Debug)]
pub struct DiscreteCq {
    pub basis: Vec<Vec<C64>>,
    pub states: Vec<CMatrix>,
}

fn choi_from_kraus(kraus: &[CMatrix], dim_in: usize, dim_out: usize) -> CMatrix {
    let n = dim_in * dim_out;
    let mut c = CMatrix::zeros(n, n);
    for a in kraus {
        // vec(A)[(i, b)] = A[b, i]
        let v: Vec<C64> = (0..n).map(|idx| a[(idx % dim_out, idx / dim_out)]).collect();
        c += &CMatrix::outer(&v, &v);
    }
    c
}

/// Choi matrix `Σ_{ij} E_ij ⊗ Φ(E_ij)` of a channel.
pub fn choi(channel: &QuantumChannel) -> CMatrix {
    channel.choi.clone()
}

/// Canonical Kraus family from a Choi matrix: eigenvectors weighted by the
/// square roots of eigenvalues above the rank threshold.
pub fn kraus_from_choi(c: &CMatrix, dims: (usize, usize)) -> Result<QuantumChannel> {
    let (dim_in, dim_out) = dims;
    let n = dim_in * dim_out;
    if c.shape() != (n, n) {
        return Err(Error::dims(
            format!("{n}x{n} Choi matrix"),
            format!("{}x{}", c.rows(), c.cols()),
        ));
    }
    let spectrum = hermitian_eig(c)?;
    let lmax = spectrum.eigenvalues.first().copied().unwrap_or(0.0);
    let min_eig = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
    if min_eig < -1e-8 * lmax.max(1.0) {
        return Err(Error::NotCP { min_eig });
    }
    let marginal = partial_trace(c, Side::Second, (dim_in, dim_out))?;
    let residual = (&marginal - &CMatrix::identity(dim_in)).frobenius_norm();
    if residual > 1e-8 {
        return Err(Error::NotTracePreserving { residual });
    }
    let thr = lmax * n as f64 * 1e-12;
    let mut kraus = Vec::new();
    for (k, &l) in spectrum.eigenvalues.iter().enumerate() {
        if l <= thr {
            continue;
        }
        let s = libm::sqrt(l);
        let v = spectrum.eigenvector(k);
        kraus.push(CMatrix::from_fn(dim_out, dim_in, |b, i| v[i * dim_out + b] * s));
    }
    QuantumChannel::new(kraus)
}

/// `second ∘ first`: Kraus products `B_j A_k`.
pub fn compose(second: &QuantumChannel, first: &QuantumChannel) -> Result<QuantumChannel> {
    if first.dim_out != second.dim_in {
        return Err(Error::dims(
            format!("input dimension {}", second.dim_in),
            format!("output dimension {}", first.dim_out),
        ));
    }
    let mut kraus = Vec::with_capacity(first.kraus.len() * second.kraus.len());
    for b in &second.kraus {
        for a in &first.kraus {
            kraus.push(b * a);
        }
    }
    let choi = choi_from_kraus(&kraus, first.dim_in, second.dim_out);
    Ok(QuantumChannel {
        dim_in: first.dim_in,
        dim_out: second.dim_out,
        kraus,
        choi,
    })
}

#[cfg(test)]
mod tests;
