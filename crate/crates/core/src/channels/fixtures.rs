use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use super::{DensityOperator, QuantumChannel, EIG_CLIP};
use crate::numerics::{basis_vector, dot, hermitian_eig, CMatrix};
use crate::random::{haar_isometry, rng};
use crate::{Error, Result};

pub fn identity(d: usize) -> QuantumChannel {
    QuantumChannel::new(alloc::vec![CMatrix::identity(d)]).expect("identity is a channel")
}

/// Complete measurement in the given orthonormal basis: Kraus `|i⟩⟨i|`.
pub fn dephasing(basis: &[Vec<C64>]) -> Result<QuantumChannel> {
    check_basis(basis)?;
    QuantumChannel::new(basis.iter().map(|v| CMatrix::outer(v, v)).collect())
}

pub fn dephasing_computational(d: usize) -> QuantumChannel {
    let basis: Vec<Vec<C64>> = (0..d).map(|i| basis_vector(d, i)).collect();
    dephasing(&basis).expect("computational basis is orthonormal")
}

/// `ρ ↦ (1 − p) ρ + p · Tr(ρ) I/d`
pub fn depolarizing(p: f64, d: usize) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadProbability(p));
    }
    let mut kraus = Vec::new();
    if p < 1.0 {
        kraus.push(CMatrix::identity(d).scale_real(libm::sqrt(1.0 - p)));
    }
    if p > 0.0 {
        let w = libm::sqrt(p / d as f64);
        for i in 0..d {
            for j in 0..d {
                let mut m = CMatrix::zeros(d, d);
                m[(i, j)] = C64::new(w, 0.0);
                kraus.push(m);
            }
        }
    }
    QuantumChannel::new(kraus)
}

/// Weighted eigenvector factors `√μ_k |s_k⟩` of a state.
fn state_factors(sigma: &DensityOperator) -> Result<Vec<Vec<C64>>> {
    let spectrum = hermitian_eig(sigma.matrix())?;
    Ok(spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > EIG_CLIP)
        .map(|(k, &l)| {
            let s = libm::sqrt(l);
            spectrum.eigenvector(k).into_iter().map(|z| z * s).collect()
        })
        .collect())
}

/// `ρ ↦ Σ_i ⟨i|ρ|i⟩ σ_i`
pub fn cq_channel(basis: &[Vec<C64>], states: &[DensityOperator]) -> Result<QuantumChannel> {
    check_basis(basis)?;
    if states.len() != basis.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} states for {} basis vectors",
            states.len(),
            basis.len()
        )));
    }
    let dout = states[0].dim();
    let mut kraus = Vec::new();
    for (b, sigma) in basis.iter().zip(states) {
        if sigma.dim() != dout {
            return Err(Error::dims(dout, sigma.dim()));
        }
        for f in state_factors(sigma)? {
            kraus.push(CMatrix::outer(&f, b));
        }
    }
    QuantumChannel::new(kraus)
}

/// Completely depolarizing channel `ρ ↦ (Tr ρ) σ` on `dim_in`-dimensional inputs.
pub fn cd_channel(sigma: &DensityOperator, dim_in: usize) -> Result<QuantumChannel> {
    let mut kraus = Vec::new();
    for f in state_factors(sigma)? {
        for j in 0..dim_in {
            kraus.push(CMatrix::outer(&f, &basis_vector(dim_in, j)));
        }
    }
    QuantumChannel::new(kraus)
}

/// Channel whose Stinespring isometry is a Haar-random `(d_B·K) × d_A`
/// column block; deterministic per seed.
pub fn random_channel(
    dim_in: usize,
    dim_out: usize,
    kraus_count: usize,
    seed: u64,
) -> Result<QuantumChannel> {
    if dim_out * kraus_count < dim_in || dim_in == 0 {
        return Err(Error::BadRank(format!(
            "{kraus_count} Kraus operators of size {dim_out}x{dim_in} cannot be trace preserving"
        )));
    }
    let mut r = rng(seed, 0);
    let v = haar_isometry(dim_out * kraus_count, dim_in, &mut r);
    let kraus = (0..kraus_count)
        .map(|k| CMatrix::from_fn(dim_out, dim_in, |b, a| v[(k * dim_out + b, a)]))
        .collect();
    QuantumChannel::new(kraus)
}

/// `σ ↦ P_n σ P_n + Tr[(I − P_n)σ] τ` with `P_n` the projector on the first
/// `n` basis vectors and `τ` pure.
pub fn truncation_channel(d: usize, n: usize, tau: &DensityOperator) -> Result<QuantumChannel> {
    if n == 0 || n > d {
        return Err(Error::BadRank(format!("n = {n} outside 1..={d}")));
    }
    if tau.dim() != d {
        return Err(Error::dims(d, tau.dim()));
    }
    let spectrum = hermitian_eig(tau.matrix())?;
    if spectrum.eigenvalues.iter().filter(|&&l| l > EIG_CLIP).count() != 1 {
        return Err(Error::BadRank("tau must be a pure state".into()));
    }
    let t = spectrum.eigenvector(0);
    let mut p = CMatrix::zeros(d, d);
    for k in 0..n {
        p[(k, k)] = C64::new(1.0, 0.0);
    }
    let mut kraus = alloc::vec![p];
    for k in n..d {
        kraus.push(CMatrix::outer(&t, &basis_vector(d, k)));
    }
    QuantumChannel::new(kraus)
}

fn check_basis(basis: &[Vec<C64>]) -> Result<()> {
    let d = basis.len();
    if d == 0 {
        return Err(Error::ShapeMismatch("empty basis".into()));
    }
    for (i, u) in basis.iter().enumerate() {
        if u.len() != d {
            return Err(Error::dims(d, u.len()));
        }
        for (j, v) in basis.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            if (dot(u, v) - C64::new(expected, 0.0)).norm() > 1e-10 {
                return Err(Error::ShapeMismatch("basis is not orthonormal".into()));
            }
        }
    }
    Ok(())
}
