//! Entropy functionals in bits: von Neumann and relative entropy, the
//! χ-quantity of ensembles, entropy exchange and quantum mutual information.

use alloc::format;
use alloc::vec::Vec;

use crate::channels::{DensityOperator, QuantumChannel, EIG_CLIP};
use crate::numerics::{hermitian_eig, CMatrix, HermitianSpectrum};
use crate::{Error, Result};

/// Agreement required between the two χ-quantity formulas.
pub const CHI_CROSSCHECK_TOL: f64 = 1e-8;

/// Relative entropy value; `Infinite` when the support condition fails.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RelEntropy {
    Finite(f64),
    Infinite,
}

impl RelEntropy {
    pub fn is_finite(self) -> bool {
        matches!(self, RelEntropy::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            RelEntropy::Finite(v) => Some(v),
            RelEntropy::Infinite => None,
        }
    }

    /// Sum; infinite if either operand is.
    pub fn checked_add(self, other: RelEntropy) -> RelEntropy {
        match (self, other) {
            (RelEntropy::Finite(a), RelEntropy::Finite(b)) => RelEntropy::Finite(a + b),
            _ => RelEntropy::Infinite,
        }
    }

    /// `w · D` for `w > 0`; `0 · ∞` is rejected rather than guessed.
    pub fn checked_scale(self, w: f64) -> Option<RelEntropy> {
        match self {
            RelEntropy::Finite(v) => Some(RelEntropy::Finite(w * v)),
            RelEntropy::Infinite if w > 0.0 => Some(RelEntropy::Infinite),
            RelEntropy::Infinite => None,
        }
    }
}

/// Finite probability distribution over states of a common dimension.
#[derive(Clone, Debug)]
pub struct Ensemble {
    weights: Vec<f64>,
    members: Vec<DensityOperator>,
}

impl Ensemble {
    pub fn new(weights: Vec<f64>, members: Vec<DensityOperator>) -> Result<Self> {
        if weights.is_empty() || weights.len() != members.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} weights for {} members",
                weights.len(),
                members.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w <= 0.0) {
            return Err(Error::InvalidEnsemble(format!("weight {w} is not positive")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        let d = members[0].dim();
        if members.iter().any(|m| m.dim() != d) {
            return Err(Error::InvalidEnsemble("members differ in dimension".into()));
        }
        Ok(Ensemble { weights, members })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn members(&self) -> &[DensityOperator] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    /// `ρ̄ = Σ π_i ρ_i`
    pub fn average(&self) -> DensityOperator {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, s) in self.weights.iter().zip(&self.members) {
            m += &s.matrix().scale_real(*w);
        }
        DensityOperator::from_trusted(m)
    }

    /// `{π_i, Φ(ρ_i)}`
    pub fn push_forward(&self, channel: &QuantumChannel) -> Result<Ensemble> {
        let members = self
            .members
            .iter()
            .map(|s| channel.apply(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ensemble {
            weights: self.weights.clone(),
            members,
        })
    }
}

/// `−Σ p log₂ p` over the positive entries; nonpositive entries count as 0.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * libm::log2(p))
        .sum()
}

/// `h(p) = −p log₂ p − (1−p) log₂(1−p)`
pub fn binary_entropy(p: f64) -> f64 {
    shannon_entropy(&[p, 1.0 - p])
}

pub fn vn_entropy(rho: &DensityOperator) -> Result<f64> {
    matrix_entropy(rho.matrix())
}

/// Entropy of a matrix already known to be a state up to rounding.
pub(crate) fn matrix_entropy(m: &CMatrix) -> Result<f64> {
    let spectrum = hermitian_eig(&m.hermitian_part())?;
    Ok(spectrum_entropy(&spectrum.eigenvalues))
}

pub(crate) fn spectrum_entropy(eigenvalues: &[f64]) -> f64 {
    for &l in eigenvalues {
        debug_assert!(l >= -EIG_CLIP * 10.0, "eigenvalue {l} below clip");
    }
    shannon_entropy(eigenvalues)
}

/// `Σ_k ⟨k|ρ|k⟩ log₂ λ_k` over `σ`'s support, together with the weight of
/// `ρ` outside that support.
fn cross_log(rho: &CMatrix, sigma: &HermitianSpectrum) -> (f64, f64) {
    let mut value = 0.0;
    let mut outside = 0.0;
    for (k, &l) in sigma.eigenvalues.iter().enumerate() {
        let v = sigma.eigenvector(k);
        let w = crate::numerics::dot(&v, &rho.mul_vec(&v)).re;
        if l > EIG_CLIP {
            value += w * libm::log2(l);
        } else {
            outside += w;
        }
    }
    (value, outside)
}

/// `H(ρ‖σ) = Tr ρ (log₂ ρ − log₂ σ)`, infinite unless `supp ρ ⊆ supp σ`.
pub fn rel_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<RelEntropy> {
    if rho.dim() != sigma.dim() {
        return Err(Error::dims(sigma.dim(), rho.dim()));
    }
    let spectrum = sigma.spectrum()?;
    let (cross, outside) = cross_log(rho.matrix(), &spectrum);
    if outside > EIG_CLIP {
        return Ok(RelEntropy::Infinite);
    }
    let value = -vn_entropy(rho)? - cross;
    Ok(RelEntropy::Finite(value.max(0.0)))
}

/// `χ({π_i, ρ_i}) = Σ π_i H(ρ_i‖ρ̄)`, checked against `H(ρ̄) − Σ π_i H(ρ_i)`.
pub fn chi_quantity(e: &Ensemble) -> Result<f64> {
    let avg = e.average();
    let spectrum = avg.spectrum()?;
    let h_avg = spectrum_entropy(&spectrum.eigenvalues);
    let d = e.dim() as f64;
    let mut relative = 0.0;
    let mut holevo = h_avg;
    for (&w, member) in e.weights.iter().zip(&e.members) {
        let h = vn_entropy(member)?;
        let (cross, outside) = cross_log(member.matrix(), &spectrum);
        // π_i ρ_i ≤ ρ̄ bounds the weighted leakage by the clipped mass of ρ̄.
        if w * outside > d * EIG_CLIP {
            return Err(Error::Inconsistent {
                what: "χ-quantity support condition",
                deviation: w * outside,
            });
        }
        relative += w * (-h - cross);
        holevo -= w * h;
    }
    let deviation = (relative - holevo).abs();
    if deviation > CHI_CROSSCHECK_TOL {
        return Err(Error::Inconsistent {
            what: "χ-quantity formulas",
            deviation,
        });
    }
    Ok(holevo.max(0.0))
}

/// χ-quantity of the output ensemble `{π_i, Φ(ρ_i)}`.
pub fn chi_out(channel: &QuantumChannel, e: &Ensemble) -> Result<f64> {
    if e.dim() != channel.dim_in() {
        return Err(Error::dims(channel.dim_in(), e.dim()));
    }
    chi_quantity(&e.push_forward(channel)?)
}

/// `H(Φ̂(ρ))`
pub fn entropy_exchange(channel: &QuantumChannel, rho: &DensityOperator) -> Result<f64> {
    if rho.dim() != channel.dim_in() {
        return Err(Error::dims(channel.dim_in(), rho.dim()));
    }
    vn_entropy(&channel.complement().apply(rho)?)
}

/// `I(Φ, ρ) = H(ρ) + H(Φ(ρ)) − H(Φ̂(ρ))`
pub fn mutual_information(channel: &QuantumChannel, rho: &DensityOperator) -> Result<f64> {
    if rho.dim() != channel.dim_in() {
        return Err(Error::dims(channel.dim_in(), rho.dim()));
    }
    let h = vn_entropy(rho)?;
    let out = vn_entropy(&channel.apply(rho)?)?;
    let exchange = entropy_exchange(channel, rho)?;
    Ok(h + out - exchange)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{cd_channel, dephasing_computational, identity, random_channel};
    use crate::numerics::basis_vector;
    use crate::random::{random_density_matrix, random_pure_vector, rng};
    use num_complex::Complex64 as C64;
    use proptest::prelude::*;

    fn pure(v: &[C64]) -> DensityOperator {
        DensityOperator::pure(v).unwrap()
    }

    fn ket(d: usize, k: usize) -> DensityOperator {
        pure(&basis_vector(d, k))
    }

    fn plus() -> DensityOperator {
        pure(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)])
    }

    fn random_state(d: usize, seed: u64) -> DensityOperator {
        DensityOperator::new(random_density_matrix(d, &mut rng(seed, 3))).unwrap()
    }

    /// Oracle: entropy from the closed-form 2x2 eigenvalues.
    fn qubit_entropy_oracle(m: &CMatrix) -> f64 {
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = m[(0, 1)].norm();
        let disc = libm::sqrt(((a - d) / 2.0).powi(2) + b * b);
        let mid = (a + d) / 2.0;
        let f = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
        f(mid + disc) + f(mid - disc)
    }

    #[test]
    fn entropy_examples() {
        assert!(vn_entropy(&plus()).unwrap().abs() < 1e-12);
        assert!((vn_entropy(&DensityOperator::maximally_mixed(2)).unwrap() - 1.0).abs() < 1e-14);
        let rho = DensityOperator::diagonal(&[0.75, 0.25]).unwrap();
        let oracle = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((vn_entropy(&rho).unwrap() - oracle).abs() < 1e-14);
        assert!((oracle - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn entropy_matches_closed_form_on_qubits() {
        for s in 0..50 {
            let rho = random_state(2, s);
            let oracle = qubit_entropy_oracle(rho.matrix());
            assert!((vn_entropy(&rho).unwrap() - oracle).abs() < 1e-10);
        }
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = random_state(3, 1);
        assert!(rel_entropy(&rho, &rho).unwrap().finite().unwrap().abs() < 1e-10);
        let d = rel_entropy(&ket(2, 0), &DensityOperator::maximally_mixed(2)).unwrap();
        assert!((d.finite().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(rel_entropy(&ket(2, 0), &ket(2, 1)).unwrap(), RelEntropy::Infinite);
        assert!(rel_entropy(&ket(2, 0), &ket(3, 1)).is_err());
    }

    #[test]
    fn relative_entropy_sentinel_arithmetic() {
        let f = RelEntropy::Finite(1.0);
        assert_eq!(f.checked_add(RelEntropy::Infinite), RelEntropy::Infinite);
        assert_eq!(f.checked_add(f), RelEntropy::Finite(2.0));
        assert_eq!(RelEntropy::Infinite.checked_scale(0.0), None);
        assert_eq!(RelEntropy::Infinite.checked_scale(0.5), Some(RelEntropy::Infinite));
    }

    #[test]
    fn chi_examples() {
        let e = Ensemble::new(alloc::vec![0.5, 0.5], alloc::vec![ket(2, 0), ket(2, 1)]).unwrap();
        assert!((chi_quantity(&e).unwrap() - 1.0).abs() < 1e-12);

        let single = Ensemble::new(alloc::vec![1.0], alloc::vec![random_state(3, 2)]).unwrap();
        assert!(chi_quantity(&single).unwrap().abs() < 1e-10);

        // ρ̄ has eigenvalues (1 ± 1/√2)/2
        let e = Ensemble::new(alloc::vec![0.5, 0.5], alloc::vec![ket(2, 0), plus()]).unwrap();
        let p = (1.0 + core::f64::consts::FRAC_1_SQRT_2) / 2.0;
        let oracle = -(p * p.log2() + (1.0 - p) * (1.0 - p).log2());
        assert!((chi_quantity(&e).unwrap() - oracle).abs() < 1e-12);
        assert!((oracle - 0.600876).abs() < 1e-6);
    }

    #[test]
    fn ensemble_validation() {
        assert!(Ensemble::new(alloc::vec![0.5, 0.6], alloc::vec![ket(2, 0), ket(2, 1)]).is_err());
        assert!(Ensemble::new(alloc::vec![1.0, 0.0], alloc::vec![ket(2, 0), ket(2, 1)]).is_err());
        assert!(Ensemble::new(alloc::vec![0.5, 0.5], alloc::vec![ket(2, 0), ket(3, 1)]).is_err());
        assert!(Ensemble::new(alloc::vec![], alloc::vec![]).is_err());
    }

    #[test]
    fn chi_out_examples() {
        let e = Ensemble::new(alloc::vec![0.3, 0.7], alloc::vec![random_state(2, 5), random_state(2, 6)])
            .unwrap();
        let id = identity(2);
        assert!((chi_out(&id, &e).unwrap() - chi_quantity(&e).unwrap()).abs() < 1e-12);
        let cd = cd_channel(&random_state(3, 7), 2).unwrap();
        assert!(chi_out(&cd, &e).unwrap().abs() < 1e-9);
    }

    #[test]
    fn entropy_exchange_examples() {
        assert!(entropy_exchange(&identity(3), &random_state(3, 1)).unwrap().abs() < 1e-12);
        let deph = dephasing_computational(2);
        let v = entropy_exchange(&deph, &DensityOperator::maximally_mixed(2)).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_examples() {
        let mm = DensityOperator::maximally_mixed(2);
        assert!((mutual_information(&identity(2), &mm).unwrap() - 2.0).abs() < 1e-12);
        let cd = cd_channel(&random_state(3, 4), 2).unwrap();
        for s in 0..10 {
            assert!(mutual_information(&cd, &random_state(2, s)).unwrap().abs() < 1e-9);
        }
        let deph = dephasing_computational(2);
        assert!((mutual_information(&deph, &mm).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn upper_bounds_on_mutual_information() {
        let mut r = rng(11, 0);
        for s in 0..200u64 {
            let da = 2 + (s % 3) as usize;
            let db = 2 + ((s / 3) % 3) as usize;
            let k = 1 + (s % 4) as usize;
            let k = k.max(da.div_ceil(db));
            let ch = random_channel(da, db, k, s).unwrap();
            let rho = DensityOperator::new(random_density_matrix(da, &mut r)).unwrap();
            let i = mutual_information(&ch, &rho).unwrap();
            let h = vn_entropy(&rho).unwrap();
            assert!(i >= -1e-9, "I = {i}");
            assert!(i <= 2.0 * h + 1e-9, "I = {i}, H = {h}");
        }
    }

    #[test]
    fn exchange_equals_output_entropy_on_pure_inputs() {
        let mut r = rng(12, 0);
        for s in 0..50u64 {
            let ch = random_channel(3, 2, 3, s).unwrap();
            let psi = pure(&random_pure_vector(3, &mut r));
            let a = entropy_exchange(&ch, &psi).unwrap();
            let b = vn_entropy(&ch.apply(&psi).unwrap()).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn chi_is_monotone_under_channels(seed in 0u64..1_000_000, n in 1usize..5, da in 2usize..4) {
            let mut r = rng(seed, 9);
            let members: Vec<DensityOperator> = (0..n)
                .map(|_| DensityOperator::new(random_density_matrix(da, &mut r)).unwrap())
                .collect();
            let raw: Vec<f64> = (0..n).map(|k| 1.0 + k as f64 + (seed % 7) as f64).collect();
            let total: f64 = raw.iter().sum();
            let e = Ensemble::new(raw.iter().map(|w| w / total).collect(), members).unwrap();
            let ch = random_channel(da, 2, 2, seed).unwrap();
            prop_assert!(chi_out(&ch, &e).unwrap() <= chi_quantity(&e).unwrap() + 1e-9);
        }

        #[test]
        fn chi_of_pure_members_is_bounded_by_average_entropy(seed in 0u64..1_000_000, n in 1usize..6) {
            let mut r = rng(seed, 10);
            let members: Vec<DensityOperator> =
                (0..n).map(|_| pure(&random_pure_vector(3, &mut r))).collect();
            let e = Ensemble::new(alloc::vec![1.0 / n as f64; n], members).unwrap();
            let chi = chi_quantity(&e).unwrap();
            prop_assert!(chi <= vn_entropy(&e.average()).unwrap() + 1e-9);
        }
    }
}
