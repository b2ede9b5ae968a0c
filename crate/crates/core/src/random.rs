//! Seeded random matrices, states and isometries.
//!
//! Every randomised procedure in the crate draws from a ChaCha8 generator
//! addressed by `(seed, stream)`, so independent restarts get independent
//! streams and results are reproducible across platforms.

use alloc::vec::Vec;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::{norm, orthonormalize, CMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64, stream: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn complex_normal<R: Rng + ?Sized>(r: &mut R) -> C64 {
    let re: f64 = r.sample(StandardNormal);
    let im: f64 = r.sample(StandardNormal);
    C64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussian entries.
pub fn random_ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, r: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(r))
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, r: &mut R) -> CMatrix {
    random_ginibre(n, n, r).hermitian_part()
}

/// Haar-distributed `rows × cols` isometry (`cols ≤ rows`), from Gram–Schmidt
/// on a Ginibre matrix.
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, r: &mut R) -> CMatrix {
    assert!(cols <= rows, "isometry needs cols <= rows");
    loop {
        let g = random_ginibre(rows, cols, r);
        let q = orthonormalize(&g.columns(), 1e-8);
        if q.len() == cols {
            return CMatrix::from_columns(rows, &q);
        }
    }
}

pub fn random_unitary<R: Rng + ?Sized>(n: usize, r: &mut R) -> CMatrix {
    haar_isometry(n, n, r)
}

/// Uniformly random unit vector.
pub fn random_pure_vector<R: Rng + ?Sized>(d: usize, r: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d).map(|_| complex_normal(r)).collect();
        let n = norm(&v);
        if n > 1e-8 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Random full-rank density matrix `G G† / Tr(G G†)` with Ginibre `G`.
pub fn random_density_matrix<R: Rng + ?Sized>(d: usize, r: &mut R) -> CMatrix {
    let g = random_ginibre(d, d, r);
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    m.scale_real(1.0 / t).hermitian_part()
}
