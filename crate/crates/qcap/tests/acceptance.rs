//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always print.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use rand::Rng;

use qcap::format::GaussianDocument;
use qcap_core::capacity::{constrained_holevo_capacity, gap_d, GapConfig, OptimizerConfig};
use qcap_core::channels::{
    cd_channel, cq_channel, depolarizing, identity, random_channel, DensityOperator, QuantumChannel,
};
use qcap_core::entropic::{mutual_information, vn_entropy};
use qcap_core::equality::{
    equality_test, hat_equality_test, two_rank_separation, EqualityConfig, Reason, Verdict,
};
use qcap_core::gaussian::{
    classify_complementary, classify_direct, comp_rel_subspace, one_mode_type, validate_nid, GaussianCase,
    GaussianChannelParams, OneModeType, RealSubspace,
};
use qcap_core::random::{random_density_matrix, random_pure_vector, random_unitary, rng, SeededRng};
use qcap_core::{C64, Result};

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn core<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn random_mixed(d: usize, r: &mut SeededRng) -> DensityOperator {
    DensityOperator::new(random_density_matrix(d, r)).expect("Ginibre states are valid")
}

/// Mixed state with smallest eigenvalue at least `floor`.
fn random_well_mixed(d: usize, floor: f64, r: &mut SeededRng) -> DensityOperator {
    loop {
        let rho = random_mixed(d, r);
        if rho.spectrum().unwrap().eigenvalues.iter().all(|&l| l >= floor) {
            return rho;
        }
    }
}

/// Probabilities bounded away from 0 and from each other: a shuffled
/// arithmetic ramp plus jitter.
fn spread_probabilities(d: usize, r: &mut SeededRng) -> Vec<f64> {
    let mut w: Vec<f64> = (0..d).map(|k| (k + 1) as f64 + r.random_range(-0.3..0.3)).collect();
    for i in (1..d).rev() {
        w.swap(i, r.random_range(0..=i));
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

fn columns(u: &qcap_core::numerics::CMatrix) -> Vec<Vec<C64>> {
    u.columns()
}

/// Basis mutually unbiased to `basis`: Fourier combinations with random phases.
fn unbiased_basis(basis: &[Vec<C64>], r: &mut SeededRng) -> Vec<Vec<C64>> {
    let d = basis.len();
    let phases: Vec<C64> = (0..d)
        .map(|_| C64::from_polar(1.0, r.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    (0..d)
        .map(|j| {
            let mut v = vec![C64::new(0.0, 0.0); basis[0].len()];
            for (i, e) in basis.iter().enumerate() {
                let w = phases[i] * C64::from_polar(1.0 / (d as f64).sqrt(), std::f64::consts::TAU * (i * j) as f64 / d as f64);
                for (x, y) in v.iter_mut().zip(e) {
                    *x += w * y;
                }
            }
            v
        })
        .collect()
}

struct CqInstance {
    channel: QuantumChannel,
    basis: Vec<Vec<C64>>,
}

/// Discrete c-q channel: random orthonormal input basis, random pure outputs.
fn random_cq(r: &mut SeededRng) -> CqInstance {
    let d_in = r.random_range(2..=3usize);
    let d_out = r.random_range(2..=3usize);
    let basis = columns(&random_unitary(d_in, r));
    let states: Vec<DensityOperator> = (0..d_in)
        .map(|_| DensityOperator::pure(&random_pure_vector(d_out, r)).unwrap())
        .collect();
    CqInstance {
        channel: cq_channel(&basis, &states).unwrap(),
        basis,
    }
}

fn random_generic_channel(r: &mut SeededRng) -> QuantumChannel {
    loop {
        let a = r.random_range(2..=4usize);
        let b = r.random_range(2..=4usize);
        let k = r.random_range(1..=4usize);
        if b * k >= a {
            return random_channel(a, b, k, r.random()).unwrap();
        }
    }
}

fn quick_capacity(seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        restarts: 6,
        seed,
        ..OptimizerConfig::default()
    }
}

fn c1_inequality_suite() -> Outcome {
    let mut r = rng(1, 0);
    let mut violations = Vec::new();
    for n in 0..200u64 {
        let ch = random_generic_channel(&mut r);
        let rho = random_mixed(ch.dim_in(), &mut r);
        let cap = core(constrained_holevo_capacity(&ch, &rho, &quick_capacity(n)))?.value;
        let h = core(vn_entropy(&rho))?;
        let i = core(mutual_information(&ch, &rho))?;
        let ok = cap >= 0.0 && cap <= (h + 1e-6).min(i + 1e-6) && i <= 2.0 * h + 1e-9;
        if !ok {
            violations.push(format!("#{n}: C̄={cap:.9} H={h:.9} I={i:.9}"));
        }
    }
    ensure(violations.is_empty(), || format!("{} violations: {:?}", violations.len(), violations))?;
    Ok("200 random instances, 0 violations".into())
}

fn c2_noiseless() -> Outcome {
    let g = core(gap_d(&identity(2), &GapConfig::default()))?;
    ensure((g.value - 1.0).abs() <= 0.02, || format!("gap_D(identity) = {}", g.value))?;
    let mut r = rng(2, 0);
    let cfg = EqualityConfig::default();
    for n in 0..20 {
        let d = 2 + n % 2;
        let rho = random_mixed(d, &mut r);
        let rep = core(hat_equality_test(&identity(d), &rho, 1e-8, &cfg))?;
        ensure(rep.verdict == Verdict::Equal, || format!("instance {n}: {:?} ({:?})", rep.verdict, rep.reason))?;
    }
    Ok(format!("gap_D(id) = {:.6}; 20/20 hat-equality Equal", g.value))
}

fn c3_completely_depolarizing() -> Outcome {
    let mut r = rng(3, 0);
    let cfg = EqualityConfig::default();
    let mut worst_gap = 0.0f64;
    let mut worst_d = 0.0f64;
    for n in 0..5 {
        let d_in = 2 + n % 3;
        let sigma = random_mixed(2 + (n + 1) % 2, &mut r);
        let ch = core(cd_channel(&sigma, d_in))?;
        for _ in 0..4 {
            let rho = random_mixed(d_in, &mut r);
            let rep = core(equality_test(&ch, &rho, 1e-8, &cfg))?;
            let gap = rep.numeric_gap.unwrap_or(f64::INFINITY);
            ensure(rep.verdict == Verdict::Equal && gap <= 1e-9, || {
                format!("cd #{n}: {:?} numeric_gap {gap:e}", rep.verdict)
            })?;
            worst_gap = worst_gap.max(gap);
        }
        let g = core(gap_d(&ch, &GapConfig::default().with_seed(n as u64)))?.value;
        ensure(g <= 1e-6, || format!("cd #{n}: gap_D = {g:e}"))?;
        worst_d = worst_d.max(g);
    }
    Ok(format!("5 channels x 4 states Equal (max gap {worst_gap:.1e}); max gap_D {worst_d:.1e}"))
}

fn c4_cq_round_trip() -> Outcome {
    let mut r = rng(4, 0);
    let cfg = EqualityConfig::default();
    let (mut max_equal, mut min_strict) = (0.0f64, f64::INFINITY);
    for n in 0..30 {
        let inst = random_cq(&mut r);
        for m in 0..5 {
            let p = spread_probabilities(inst.basis.len(), &mut r);
            let rho = core(DensityOperator::mixture(&p, &inst.basis))?;
            let rep = core(equality_test(&inst.channel, &rho, 1e-8, &cfg))?;
            let gap = rep.numeric_gap.unwrap_or(f64::INFINITY);
            ensure(rep.verdict == Verdict::Equal && gap <= 1e-4, || {
                format!("channel {n} diagonal state {m}: {:?} ({:?}) gap {gap:e}", rep.verdict, rep.reason)
            })?;
            max_equal = max_equal.max(gap);
        }
        let p = spread_probabilities(inst.basis.len(), &mut r);
        let rotated = unbiased_basis(&inst.basis, &mut r);
        let rho = core(DensityOperator::mixture(&p, &rotated))?;
        let rep = core(equality_test(&inst.channel, &rho, 1e-8, &cfg))?;
        let gap = rep.numeric_gap.unwrap_or(0.0);
        ensure(rep.verdict == Verdict::StrictlyLess && gap > 1e-3, || {
            format!("channel {n} rotated state: {:?} ({:?}) gap {gap:e}", rep.verdict, rep.reason)
        })?;
        min_strict = min_strict.min(gap);
    }
    Ok(format!(
        "150 diagonal cases Equal (max gap {max_equal:.1e}); 30 rotated StrictlyLess (min gap {min_strict:.4})"
    ))
}

fn c5_depolarizing() -> Outcome {
    let ch = core(depolarizing(0.5, 2))?;
    let cfg = EqualityConfig::default();
    let mut r = rng(5, 0);
    let mut states = vec![
        DensityOperator::maximally_mixed(2),
        core(DensityOperator::diagonal(&[0.7, 0.3]))?,
        core(DensityOperator::diagonal(&[0.9, 0.1]))?,
    ];
    states.extend((0..17).map(|_| random_well_mixed(2, 0.1, &mut r)));
    let mut min_gap = f64::INFINITY;
    for (n, rho) in states.iter().enumerate() {
        let rep = core(equality_test(&ch, rho, 1e-8, &cfg))?;
        let gap = rep.numeric_gap.unwrap_or(0.0);
        ensure(
            rep.verdict == Verdict::StrictlyLess && rep.reason == Reason::TrivialKernel && gap > 0.01,
            || format!("state {n}: {:?} ({:?}) gap {gap:e}", rep.verdict, rep.reason),
        )?;
        min_gap = min_gap.min(gap);
    }
    Ok(format!("{} states StrictlyLess via trivial kernel (min gap {min_gap:.4})", states.len()))
}

fn c6_complement_identity() -> Outcome {
    let mut r = rng(6, 0);
    let mut worst = 0.0f64;
    for n in 0..50u64 {
        let ch = random_generic_channel(&mut r);
        let rho = random_mixed(ch.dim_in(), &mut r);
        let a = core(constrained_holevo_capacity(&ch, &rho, &quick_capacity(n)))?;
        let b = core(constrained_holevo_capacity(&ch.complement(), &rho, &quick_capacity(n)))?;
        let lhs = (core(mutual_information(&ch, &rho))? - core(vn_entropy(&rho))? - a.value + b.value).abs();
        let bound = 2.0 * (a.slack + b.slack);
        ensure(lhs <= bound, || format!("instance {n}: residual {lhs:e} > {bound:e}"))?;
        worst = worst.max(lhs / bound);
    }
    let mut max_diff = 0.0f64;
    for _ in 0..200 {
        let ch = random_generic_channel(&mut r);
        let psi = core(DensityOperator::pure(&random_pure_vector(ch.dim_in(), &mut r)))?;
        let x = core(vn_entropy(&core(ch.apply(&psi))?))?;
        let y = core(vn_entropy(&core(ch.complement().apply(&psi))?))?;
        max_diff = max_diff.max((x - y).abs());
    }
    ensure(max_diff <= 1e-9, || format!("pure-state entropy mismatch {max_diff:e}"))?;
    Ok(format!("50 instances within slack (worst ratio {worst:.3}); pure-state mismatch {max_diff:.1e}"))
}

fn c7_chain_rule() -> Outcome {
    let mut r = rng(7, 0);
    let cfg = EqualityConfig::default();
    let mut certified = 0;
    let mut worst = 0.0f64;
    while certified < 10 {
        let inst = random_cq(&mut r);
        let p = spread_probabilities(inst.basis.len(), &mut r);
        let rho = core(DensityOperator::mixture(&p, &inst.basis))?;
        if core(equality_test(&inst.channel, &rho, 1e-8, &cfg))?.verdict != Verdict::Equal {
            continue;
        }
        certified += 1;
        let post = random_channel(inst.channel.dim_out(), r.random_range(2..=3), 2, r.random()).unwrap();
        let chained = core(post.after(&inst.channel))?;
        let rep = core(equality_test(&chained, &rho, 1e-8, &cfg))?;
        let gap = rep.numeric_gap.unwrap_or(f64::INFINITY);
        ensure(gap <= 1e-3, || format!("pair {certified}: numeric_gap {gap:e}"))?;
        worst = worst.max(gap);
    }
    Ok(format!("10 certified pairs, max gap after post-processing {worst:.1e}"))
}

fn c8_data_processing() -> Outcome {
    let mut r = rng(8, 0);
    let mut cfg = GapConfig {
        outer_restarts: 4,
        max_evals: 300,
        ..GapConfig::default()
    };
    let mut worst = f64::NEG_INFINITY;
    for n in 0..20u64 {
        let phi = random_channel(2, 2, 2, r.random()).unwrap();
        let psi = random_channel(2, 2, 2, r.random()).unwrap();
        cfg = cfg.with_seed(n);
        let d_phi = core(gap_d(&phi, &cfg))?.value;
        let d_chain = core(gap_d(&core(psi.after(&phi))?, &cfg))?.value;
        ensure(d_chain <= d_phi + 0.02, || format!("pair {n}: D(ΨΦ) = {d_chain:.5} > D(Φ) = {d_phi:.5} + 0.02"))?;
        worst = worst.max(d_chain - d_phi);
    }
    Ok(format!("20 pairs, max D(ΨΦ) − D(Φ) = {worst:.4}"))
}

fn c9_separation() -> Outcome {
    let mut r = rng(9, 0);
    let cfg = EqualityConfig::default();
    let mut min_gap = f64::INFINITY;
    let mut tested = 0;
    while tested < 20 {
        let ch = random_generic_channel(&mut r);
        if ch.is_completely_depolarizing(1e-8) {
            continue;
        }
        tested += 1;
        let sep = core(two_rank_separation(&ch, 1e-3, &cfg))?;
        let gap = sep.as_ref().map_or(0.0, |s| s.gap);
        ensure(gap > 1e-3, || format!("channel {tested}: separation gap {gap:e}"))?;
        min_gap = min_gap.min(gap);
    }
    let cd = core(cd_channel(&random_mixed(2, &mut r), 3))?;
    ensure(core(two_rank_separation(&cd, 1e-3, &cfg))?.is_none(), || {
        "separation returned a state for a completely depolarizing channel".into()
    })?;
    Ok(format!("20 channels separated (min gap {min_gap:.4}); none for cd_channel"))
}

fn load_gaussian(name: &str) -> std::result::Result<GaussianChannelParams, String> {
    let text = std::fs::read_to_string(data(name)).map_err(|e| e.to_string())?;
    GaussianDocument::parse(&text)
        .and_then(|d| d.to_params())
        .map_err(|e| e.to_string())
}

fn c10_gaussian() -> Outcome {
    let a2 = load_gaussian("a2.json")?;
    ensure(core(validate_nid(&a2))?, || "a2: noise inequality fails".into())?;
    let direct = core(classify_direct(&a2))?;
    ensure(direct.case == GaussianCase::CaseA_IsotropicComplement, || format!("a2 direct: {:?}", direct.case))?;
    ensure(core(one_mode_type(&a2))? == OneModeType::A2, || "a2: one-mode type".into())?;

    let b1 = load_gaussian("b1.json")?;
    let direct = core(classify_direct(&b1))?;
    ensure(direct.case == GaussianCase::CaseB_FullRange, || format!("b1 direct: {:?}", direct.case))?;
    let comp = core(classify_complementary(&b1))?;
    ensure(comp.case == GaussianCase::CaseA_IsotropicComplement, || format!("b1 complementary: {:?}", comp.case))?;
    let rel = core(comp_rel_subspace(&b1))?;
    let expected = core(RealSubspace::span(2, &[vec![0.0, 1.0]]))?;
    ensure(rel.subspace.same_as(&expected, 1e-12), || format!("b1 comp_rel: {:?}", rel.subspace.basis()))?;
    ensure(core(one_mode_type(&b1))? == OneModeType::B1, || "b1: one-mode type".into())?;

    let perturbed = core(GaussianChannelParams::from_parts(
        1,
        1,
        a2.k().clone(),
        a2.l().to_vec(),
        a2.alpha().scale(0.1),
    ))?;
    ensure(!core(validate_nid(&perturbed))?, || "perturbed a2 passes the noise inequality".into())?;
    Ok("a2 CaseA/A2, b1 CaseB + isotropic complementary with span{[0,1]}/B1, perturbed a2 rejected".into())
}

fn c11_determinism() -> Outcome {
    let run = |args: &[String]| {
        Command::new(env!("CARGO_BIN_EXE_qcap"))
            .args(args)
            .output()
            .map_err(|e| e.to_string())
    };
    let d = |n: &str| data(n).display().to_string();
    let commands: Vec<Vec<String>> = vec![
        vec!["analyze".into(), d("random_3x3_k2.json")],
        vec!["equality".into(), d("random_2x2_k2.json")],
        vec!["hat-equality".into(), d("random_2x3_k3.json")],
        vec!["gap".into(), d("random_2x2_k2.json"), "--restarts".into(), "3".into()],
        vec!["separate".into(), d("random_2x3_k3.json")],
        vec!["gaussian-classify".into(), d("b1.json")],
    ];
    for base in &commands {
        for seed in ["0", "12345"] {
            let mut args = base.clone();
            args.extend(["--json".into(), "--seed".into(), seed.into()]);
            let a = run(&args)?;
            let b = run(&args)?;
            ensure(a.status.success(), || {
                format!("{} failed: {}", base[0], String::from_utf8_lossy(&a.stderr))
            })?;
            ensure(a.stdout == b.stdout && !a.stdout.is_empty(), || {
                format!("{} --seed {seed}: reports differ", base[0])
            })?;
        }
    }
    Ok(format!("{} command/seed combinations byte-identical", commands.len() * 2))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("inequality suite", c1_inequality_suite),
        ("noiseless extreme", c2_noiseless),
        ("completely depolarizing extreme", c3_completely_depolarizing),
        ("c-q round trip", c4_cq_round_trip),
        ("depolarizing fast path", c5_depolarizing),
        ("complement identity", c6_complement_identity),
        ("chain rule", c7_chain_rule),
        ("data processing", c8_data_processing),
        ("rank-two separation", c9_separation),
        ("Gaussian fixtures", c10_gaussian),
        ("CLI determinism", c11_determinism),
    ];
    let mut failures = 0;
    let total = Instant::now();
    for (n, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", n + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", n + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed [{:.1}s]",
        criteria.len() - failures,
        total.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
