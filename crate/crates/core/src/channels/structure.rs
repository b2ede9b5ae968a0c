//! Search for orthonormal families `{|e_i⟩}` with `Φ(|e_i⟩⟨e_j|) = 0`.
//!
//! If such a basis exists inside a subspace with frame `F`, every compressed
//! dual operator `F† Φ*(Y) F` is diagonal in it. Conversely, when all these
//! operators (together with a block structure imposed by the caller) commute,
//! any common eigenbasis works. A generic Hermitian `Y` therefore produces a
//! candidate basis by diagonalising `F† Φ*(Y) F` inside each block; the
//! candidate is then verified directly.

use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64 as C64;

use super::QuantumChannel;
use crate::numerics::{hermitian_eig, CMatrix};
use crate::random::{random_hermitian, rng};

const CANDIDATE_TRIALS: u64 = 3;
const STREAM_BASE: u64 = 0x0c9_5eed;

pub(crate) struct Candidate {
    /// Orthonormal vectors in the ambient input space.
    pub basis: Vec<Vec<C64>>,
    /// `max_{i≠j} ‖Φ(|e_i⟩⟨e_j|)‖_F`
    pub residual: f64,
}

/// `max_{i≠j} ‖Φ(|v_i⟩⟨v_j|)‖_F` (zero for fewer than two vectors).
pub(crate) fn family_residual(channel: &QuantumChannel, vectors: &[Vec<C64>]) -> f64 {
    let images: Vec<Vec<Vec<C64>>> = vectors
        .iter()
        .map(|v| channel.kraus().iter().map(|a| a.mul_vec(v)).collect())
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..vectors.len() {
        for j in 0..vectors.len() {
            if i == j {
                continue;
            }
            let d = channel.dim_out();
            let mut m = CMatrix::zeros(d, d);
            for (au, av) in images[i].iter().zip(&images[j]) {
                m += &CMatrix::outer(au, av);
            }
            worst = worst.max(m.frobenius_norm());
        }
    }
    worst
}

fn compressed_dual(channel: &QuantumChannel, frame: &CMatrix, y: &CMatrix) -> CMatrix {
    let dual = channel.dual(y).expect("output dimension matches");
    frame.adjoint_mul(&(&dual * frame)).hermitian_part()
}

/// Candidate basis respecting `groups` (index ranges into the columns of
/// `frame`), best of a few random dual operators.
pub(crate) fn common_eigenbasis(
    channel: &QuantumChannel,
    frame: &CMatrix,
    groups: &[Range<usize>],
    tol: f64,
    seed: u64,
) -> Candidate {
    let r = frame.cols();
    let mut best: Option<Candidate> = None;
    for trial in 0..CANDIDATE_TRIALS {
        let mut g = rng(seed, STREAM_BASE + trial);
        let y = random_hermitian(channel.dim_out(), &mut g);
        let m = compressed_dual(channel, frame, &y);
        let mut coords: Vec<Vec<C64>> = Vec::with_capacity(r);
        for range in groups {
            let idx: Vec<usize> = range.clone().collect();
            let block = CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])]);
            let spectrum = hermitian_eig(&block).expect("compressed dual is Hermitian");
            for k in 0..idx.len() {
                let local = spectrum.eigenvector(k);
                let mut c = alloc::vec![C64::new(0.0, 0.0); r];
                for (pos, &i) in idx.iter().enumerate() {
                    c[i] = local[pos];
                }
                coords.push(c);
            }
        }
        let basis: Vec<Vec<C64>> = coords.iter().map(|c| frame.mul_vec(c)).collect();
        let residual = family_residual(channel, &basis);
        let better = best.as_ref().is_none_or(|b| residual < b.residual);
        if better {
            best = Some(Candidate { basis, residual });
        }
        if residual <= tol {
            break;
        }
    }
    best.expect("at least one trial")
}

fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(i, i)] = C64::new(1.0, 0.0);
        out.push(m);
        for j in (i + 1)..d {
            let mut re = CMatrix::zeros(d, d);
            re[(i, j)] = C64::new(s, 0.0);
            re[(j, i)] = C64::new(s, 0.0);
            out.push(re);
            let mut im = CMatrix::zeros(d, d);
            im[(i, j)] = C64::new(0.0, -s);
            im[(j, i)] = C64::new(0.0, s);
            out.push(im);
        }
    }
    out
}

/// Largest violation of the necessary conditions for a valid basis: entries
/// of `F† Φ*(Y) F` coupling different groups, and commutators of the
/// diagonal blocks over a Hermitian basis of `Y`s. Relative to the largest
/// compressed dual norm.
pub(crate) fn commutation_obstruction(
    channel: &QuantumChannel,
    frame: &CMatrix,
    groups: &[Range<usize>],
) -> f64 {
    let ms: Vec<CMatrix> = hermitian_basis(channel.dim_out())
        .iter()
        .map(|y| compressed_dual(channel, frame, y))
        .collect();
    let scale = ms.iter().map(|m| m.frobenius_norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let group_of = |i: usize| groups.iter().position(|g| g.contains(&i)).unwrap_or(usize::MAX);
    let r = frame.cols();
    let mut worst: f64 = 0.0;
    for m in &ms {
        let mut off = 0.0;
        for i in 0..r {
            for j in 0..r {
                if group_of(i) != group_of(j) {
                    off += m[(i, j)].norm_sqr();
                }
            }
        }
        worst = worst.max(libm::sqrt(off) / scale);
    }
    for g in groups {
        if g.len() < 2 {
            continue;
        }
        let idx: Vec<usize> = g.clone().collect();
        let blocks: Vec<CMatrix> = ms
            .iter()
            .map(|m| CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])]))
            .collect();
        for a in 0..blocks.len() {
            for b in (a + 1)..blocks.len() {
                let comm = &(&blocks[a] * &blocks[b]) - &(&blocks[b] * &blocks[a]);
                worst = worst.max(comm.frobenius_norm() / (scale * scale));
            }
        }
    }
    worst
}
