use num_complex::Complex64 as C64;

use super::CMatrix;
use crate::{Error, Result};

/// Which tensor factor a partial trace removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

/// Tensor product `A ⊗ B`, row index `i_A · rows(B) + i_B`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (br, bc) = b.shape();
    CMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Partial trace of a square operator on `C^{d_A} ⊗ C^{d_B}` over the given
/// factor.
pub fn partial_trace(m: &CMatrix, side: Side, dims: (usize, usize)) -> Result<CMatrix> {
    let (da, db) = dims;
    let n = da * db;
    if !m.is_square() || m.rows() != n {
        return Err(Error::dims(
            alloc::format!("{n}x{n} matrix for dims ({da},{db})"),
            alloc::format!("{}x{}", m.rows(), m.cols()),
        ));
    }
    Ok(match side {
        Side::Second => CMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum::<C64>()
        }),
        Side::First => CMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|k| m[(k * db + i, k * db + j)]).sum::<C64>()
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_ginibre, rng};

    #[test]
    fn kron_of_identities() {
        let i2 = CMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), CMatrix::identity(4));
    }

    #[test]
    fn kron_of_basis_projectors() {
        let d = 3;
        let e1 = CMatrix::diag_real(&[1.0, 0.0]);
        let e2 = CMatrix::diag_real(&[0.0, 1.0, 0.0]);
        let p = kron(&e1, &e2);
        assert_eq!(p.shape(), (6, 6));
        for i in 0..6 {
            for j in 0..6 {
                let expected = if i == 1 && j == 1 { 1.0 } else { 0.0 };
                assert_eq!(p[(i, j)], C64::new(expected, 0.0), "{i},{j} (index 0·{d}+1)");
            }
        }
    }

    #[test]
    fn kron_shape_and_trace() {
        let mut r = rng(1, 0);
        let a = random_ginibre(2, 2, &mut r);
        let b = random_ginibre(3, 3, &mut r);
        let k = kron(&a, &b);
        assert_eq!(k.shape(), (6, 6));
        assert!((k.trace() - a.trace() * b.trace()).norm() < 1e-12);
    }

    #[test]
    fn product_state_partial_trace() {
        let mut r = rng(2, 0);
        let a = random_ginibre(2, 2, &mut r);
        let b = random_ginibre(3, 3, &mut r);
        let m = kron(&a, &b);
        let ta = partial_trace(&m, Side::Second, (2, 3)).unwrap();
        assert!((&ta - &a.scale(b.trace())).frobenius_norm() < 1e-12);
        let tb = partial_trace(&m, Side::First, (2, 3)).unwrap();
        assert!((&tb - &b.scale(a.trace())).frobenius_norm() < 1e-12);
    }

    #[test]
    fn bell_state_marginal() {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let phi = [C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)];
        let rho = CMatrix::outer(&phi, &phi);
        let t = partial_trace(&rho, Side::Second, (2, 2)).unwrap();
        assert!((&t - &CMatrix::diag_real(&[0.5, 0.5])).max_abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let m = CMatrix::identity(5);
        assert!(matches!(
            partial_trace(&m, Side::Second, (2, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn nested_partial_traces_preserve_trace() {
        let mut r = rng(3, 0);
        for (da, db) in [(2, 2), (2, 3), (3, 4)] {
            let m = random_ginibre(da * db, da * db, &mut r);
            let t1 = partial_trace(&m, Side::Second, (da, db)).unwrap();
            let t2 = partial_trace(&t1, Side::First, (da, 1)).unwrap();
            assert!((t2[(0, 0)] - m.trace()).norm() < 1e-12);
            let u = partial_trace(&m, Side::First, (da, db)).unwrap();
            assert!((u.trace() - m.trace()).norm() < 1e-12);
        }
    }
}
