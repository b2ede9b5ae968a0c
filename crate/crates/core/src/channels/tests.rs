use super::*;
use crate::numerics::{basis_vector, dot, hermitian_eig};
use crate::random::{random_density_matrix, random_pure_vector, rng};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn ket(d: usize, k: usize) -> Vec<C64> {
    basis_vector(d, k)
}

fn plus() -> Vec<C64> {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    alloc::vec![c(s), c(s)]
}

fn minus() -> Vec<C64> {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    alloc::vec![c(s), c(-s)]
}

fn random_state(d: usize, seed: u64) -> DensityOperator {
    DensityOperator::new(random_density_matrix(d, &mut rng(seed, 1))).unwrap()
}

fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    (a - b).frobenius_norm() <= tol
}

fn nonzero_spectrum(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_eig(&m.hermitian_part())
        .unwrap()
        .eigenvalues
        .into_iter()
        .filter(|&l| l > 1e-10)
        .collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

#[test]
fn validate_examples() {
    assert_eq!(identity(2).dim_in(), 2);
    assert!(QuantumChannel::new(alloc::vec![
        CMatrix::outer(&ket(2, 0), &ket(2, 0)),
        CMatrix::outer(&ket(2, 1), &ket(2, 1)),
    ])
    .is_ok());
    assert!(matches!(
        QuantumChannel::new(alloc::vec![CMatrix::identity(2), CMatrix::identity(2)]),
        Err(Error::NotTracePreserving { .. })
    ));
    assert!(matches!(
        QuantumChannel::new(alloc::vec![CMatrix::identity(2), CMatrix::identity(3)]),
        Err(Error::ShapeMismatch(_))
    ));
}

#[test]
fn apply_examples() {
    let deph = dephasing_computational(2);
    let p = DensityOperator::pure(&plus()).unwrap();
    let out = deph.apply(&p).unwrap();
    assert!(close(out.matrix(), &CMatrix::diag_real(&[0.5, 0.5]), 1e-15));

    let rho = random_state(2, 3);
    assert!(close(identity(2).apply(&rho).unwrap().matrix(), rho.matrix(), 1e-15));

    let sigma = random_state(3, 4);
    let cd = cd_channel(&sigma, 2).unwrap();
    assert!(close(cd.apply(&rho).unwrap().matrix(), sigma.matrix(), 1e-12));

    let wrong = DensityOperator::maximally_mixed(3);
    assert!(matches!(deph.apply(&wrong), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn apply_raw_examples() {
    let deph = dephasing_computational(2);
    let x = CMatrix::outer(&ket(2, 0), &ket(2, 1));
    assert!(deph.apply_raw(&x).unwrap().max_abs() == 0.0);
    assert_eq!(identity(2).apply_raw(&x).unwrap(), x);

    let ch = random_channel(2, 3, 2, 9).unwrap();
    let x1 = random_density_matrix(2, &mut rng(1, 0));
    let x2 = random_density_matrix(2, &mut rng(2, 0));
    let lhs = ch.apply_raw(&(&x1 - &x2)).unwrap();
    let rhs = &ch.apply_raw(&x1).unwrap() - &ch.apply_raw(&x2).unwrap();
    assert!(close(&lhs, &rhs, 1e-14));
    assert!(ch.apply_raw(&CMatrix::identity(3)).is_err());
}

#[test]
fn choi_examples() {
    // 2|Φ+⟩⟨Φ+|: ones at the corners of {00, 11}
    let mut expected = CMatrix::zeros(4, 4);
    for &i in &[0usize, 3] {
        for &j in &[0usize, 3] {
            expected[(i, j)] = c(1.0);
        }
    }
    assert!(close(identity(2).choi(), &expected, 1e-15));

    let cd = cd_channel(&DensityOperator::maximally_mixed(2), 2).unwrap();
    assert!(close(&choi(&cd), &CMatrix::identity(4).scale_real(0.5), 1e-15));
}

#[test]
fn choi_round_trip() {
    for seed in 0..10 {
        let ch = random_channel(2 + seed as usize % 2, 2, 3, seed).unwrap();
        let back = kraus_from_choi(ch.choi(), (ch.dim_in(), ch.dim_out())).unwrap();
        for s in 0..5 {
            let rho = random_state(ch.dim_in(), 100 + s);
            let a = ch.apply(&rho).unwrap();
            let b = back.apply(&rho).unwrap();
            assert!(close(a.matrix(), b.matrix(), 1e-8));
        }
    }
}

#[test]
fn kraus_from_choi_errors() {
    let not_cp = CMatrix::diag_real(&[1.0, -0.5, 0.0, 0.5]);
    assert!(matches!(kraus_from_choi(&not_cp, (2, 2)), Err(Error::NotCP { .. })));
    let not_tp = CMatrix::identity(4);
    assert!(matches!(
        kraus_from_choi(&not_tp, (2, 2)),
        Err(Error::NotTracePreserving { .. })
    ));
}

#[test]
fn complement_of_identity_is_trace() {
    let comp = identity(2).complement();
    assert_eq!(comp.dim_out(), 1);
    let out = comp.apply(&random_state(2, 5)).unwrap();
    assert!((out.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
}

#[test]
fn complement_of_dephasing_is_dephasing() {
    let deph = dephasing_computational(2);
    let comp = deph.complement();
    for s in 0..5 {
        let rho = random_state(2, 10 + s);
        assert!(close(
            comp.apply(&rho).unwrap().matrix(),
            deph.apply(&rho).unwrap().matrix(),
            1e-14
        ));
    }
}

#[test]
fn complement_drops_zero_kraus() {
    let ch = QuantumChannel::new(alloc::vec![CMatrix::identity(2), CMatrix::zeros(2, 2)]).unwrap();
    assert_eq!(ch.complement().dim_out(), 1);
}

#[test]
fn double_complement_preserves_output_spectrum() {
    let mut r = rng(77, 0);
    for seed in 0..50 {
        let ch = random_channel(2 + (seed as usize % 3), 2 + (seed as usize % 2), 1 + seed as usize % 4 + 1, seed)
            .unwrap();
        let cc = ch.complement().complement();
        let psi = DensityOperator::pure(&random_pure_vector(ch.dim_in(), &mut r)).unwrap();
        let a = nonzero_spectrum(ch.apply(&psi).unwrap().matrix());
        let b = nonzero_spectrum(cc.apply(&psi).unwrap().matrix());
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-8);
        }
        // marginals of V|ψ⟩ share their nonzero spectrum
        let comp = nonzero_spectrum(ch.complement().apply(&psi).unwrap().matrix());
        assert_eq!(a.len(), comp.len());
        for (x, y) in a.iter().zip(&comp) {
            assert!((x - y).abs() <= 1e-9);
        }
    }
}

#[test]
fn compose_examples() {
    let phi = random_channel(2, 3, 2, 1).unwrap();
    let psi = random_channel(3, 2, 3, 2).unwrap();
    let id_phi = compose(&identity(3), &phi).unwrap();
    let sigma = random_state(4, 8);
    let cd = cd_channel(&sigma, 3).unwrap();
    let cd_phi = compose(&cd, &phi).unwrap();
    let both = psi.after(&phi).unwrap();
    for s in 0..20 {
        let rho = random_state(2, 200 + s);
        let once = phi.apply(&rho).unwrap();
        assert!(close(id_phi.apply(&rho).unwrap().matrix(), once.matrix(), 1e-12));
        assert!(close(cd_phi.apply(&rho).unwrap().matrix(), sigma.matrix(), 1e-12));
        let twice = psi.apply(&once).unwrap();
        assert!(close(both.apply(&rho).unwrap().matrix(), twice.matrix(), 1e-10));
    }
    assert!(compose(&phi, &phi).is_err());
}

#[test]
fn subchannel_examples() {
    let ch = random_channel(3, 2, 3, 4).unwrap();
    let full = ch.subchannel(&Subspace::full(3)).unwrap();
    let rho = random_state(3, 1);
    assert!(close(full.apply(&rho).unwrap().matrix(), ch.apply(&rho).unwrap().matrix(), 1e-14));

    let deph = dephasing_computational(2);
    let s0 = Subspace::span(2, &[ket(2, 0)]).unwrap();
    let sub = deph.subchannel(&s0).unwrap();
    let out = sub.apply(&DensityOperator::maximally_mixed(1)).unwrap();
    assert!(close(out.matrix(), &CMatrix::diag_real(&[1.0, 0.0]), 1e-15));

    let s = Subspace::span(3, &[random_pure_vector(3, &mut rng(4, 4)), ket(3, 2)]).unwrap();
    let lhs = ch.subchannel(&s).unwrap().complement();
    let rhs = ch.complement().subchannel(&s).unwrap();
    for k in 0..5 {
        let r = random_state(2, 50 + k);
        assert!(close(lhs.apply(&r).unwrap().matrix(), rhs.apply(&r).unwrap().matrix(), 1e-12));
    }
    assert!(ch.subchannel(&Subspace::full(2)).is_err());
}

#[test]
fn completely_depolarizing_predicate() {
    let sigma = random_state(2, 3);
    assert!(cd_channel(&sigma, 3).unwrap().is_completely_depolarizing(STRUCTURAL_TOL));
    assert!(!dephasing_computational(2).is_completely_depolarizing(STRUCTURAL_TOL));
    assert!(!identity(2).is_completely_depolarizing(STRUCTURAL_TOL));
    assert!(depolarizing(1.0, 2).unwrap().is_completely_depolarizing(STRUCTURAL_TOL));
}

#[test]
fn discrete_cq_detection() {
    let cq = dephasing_computational(2).is_discrete_cq(STRUCTURAL_TOL).unwrap();
    for (v, s) in cq.basis.iter().zip(&cq.states) {
        let k = if v[0].norm() > 0.5 { 0 } else { 1 };
        assert!((v[k].norm() - 1.0).abs() < 1e-12);
        assert!(close(s, &CMatrix::outer(&ket(2, k), &ket(2, k)), 1e-12));
    }

    let sigma = random_state(3, 6);
    let cd = cd_channel(&sigma, 2).unwrap().is_discrete_cq(STRUCTURAL_TOL).unwrap();
    for s in &cd.states {
        assert!(close(s, sigma.matrix(), 1e-10));
    }

    assert!(identity(2).is_discrete_cq(STRUCTURAL_TOL).is_none());
}

#[test]
fn cq_channel_recovers_its_basis() {
    let mut r = rng(21, 0);
    for seed in 0..10 {
        let d = 2 + seed % 3;
        let u = crate::random::random_unitary(d, &mut r);
        let basis = u.columns();
        let states: Vec<DensityOperator> = (0..d).map(|i| random_state(2, 1000 * seed as u64 + i as u64)).collect();
        let ch = cq_channel(&basis, &states).unwrap();
        let found = ch.is_discrete_cq(STRUCTURAL_TOL).unwrap();
        for v in &found.basis {
            let best = basis.iter().map(|b| dot(b, v).norm()).fold(0.0, f64::max);
            assert!((best - 1.0).abs() < 1e-8, "basis vector not recovered: {best}");
        }
    }
}

#[test]
fn cd_iff_cq_with_equal_states() {
    let chans = [
        cd_channel(&random_state(2, 1), 3).unwrap(),
        dephasing_computational(3),
        identity(2),
        random_channel(2, 2, 3, 5).unwrap(),
        depolarizing(1.0, 3).unwrap(),
    ];
    for ch in &chans {
        let cd = ch.is_completely_depolarizing(STRUCTURAL_TOL);
        let equal_states = ch.is_discrete_cq(STRUCTURAL_TOL).is_some_and(|cq| {
            cq.states.iter().all(|s| close(s, &cq.states[0], STRUCTURAL_TOL))
        });
        assert_eq!(cd, equal_states);
    }
}

#[test]
fn truncation_examples() {
    let tau = DensityOperator::pure(&ket(2, 0)).unwrap();
    let full = truncation_channel(2, 2, &tau).unwrap();
    let rho = random_state(2, 2);
    assert!(close(full.apply(&rho).unwrap().matrix(), rho.matrix(), 1e-15));

    let t1 = truncation_channel(2, 1, &tau).unwrap();
    let one = DensityOperator::pure(&ket(2, 1)).unwrap();
    assert!(close(t1.apply(&one).unwrap().matrix(), tau.matrix(), 1e-15));

    let tau3 = DensityOperator::pure(&random_pure_vector(3, &mut rng(1, 1))).unwrap();
    let t = truncation_channel(3, 2, &tau3).unwrap();
    for s in 0..10 {
        let out = t.apply(&random_state(3, 300 + s)).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
    }
    assert!(matches!(truncation_channel(2, 0, &tau), Err(Error::BadRank(_))));
    assert!(matches!(
        truncation_channel(2, 1, &DensityOperator::maximally_mixed(2)),
        Err(Error::BadRank(_))
    ));
}

#[test]
fn fixtures_validate() {
    let full_dep = depolarizing(1.0, 2).unwrap();
    let cd = cd_channel(&DensityOperator::maximally_mixed(2), 2).unwrap();
    for s in 0..5 {
        let rho = random_state(2, 400 + s);
        assert!(close(
            full_dep.apply(&rho).unwrap().matrix(),
            cd.apply(&rho).unwrap().matrix(),
            1e-14
        ));
    }
    assert!(matches!(depolarizing(1.5, 2), Err(Error::BadProbability(_))));
    assert!(matches!(depolarizing(-0.1, 2), Err(Error::BadProbability(_))));

    let a = random_channel(2, 2, 4, 7).unwrap();
    let b = random_channel(2, 2, 4, 7).unwrap();
    assert_eq!(a.kraus(), b.kraus());
    assert!(random_channel(4, 1, 2, 0).is_err());

    for ch in [&a, &full_dep, &cd, &identity(3), &depolarizing(0.3, 3).unwrap()] {
        assert!(crate::numerics::min_eig_hermitian(ch.choi()).unwrap() >= -1e-9);
        assert!(QuantumChannel::new(ch.kraus().to_vec()).is_ok());
    }
    let _ = minus();
}
