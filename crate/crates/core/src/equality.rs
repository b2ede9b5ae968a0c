//! Kernel-based criteria for `C̄(Φ,ρ) = I(Φ,ρ)` and `C̄(Φ,ρ) = H(ρ)`.
//!
//! Equality with the mutual information holds exactly when some eigenbasis
//! `{|e_i⟩}` of `ρ` (inside its support) satisfies `Φ(|e_i⟩⟨e_j|) = 0` for
//! `i ≠ j`; equality with the entropy is the same condition for the
//! complementary channel. The decision combines three structural tests with
//! a numeric search:
//!
//! 1. If the subchannel on `supp ρ` has no near-null operator at all, no such
//!    basis exists.
//! 2. A valid basis diagonalises every compressed dual `F† Φ*(Y) F`, so a
//!    generic `Y` yields the only candidate up to block rotations; it is
//!    verified directly.
//! 3. Conversely a valid basis exists iff those operators are block-diagonal
//!    over the eigenvalue groups and commute within each block; a clear
//!    violation certifies strict inequality.
//!
//! Cases left ambiguous by tolerances fall back to minimising
//! `g(B) = Σ_{i<j} ‖Φ(|e_i⟩⟨e_j|)‖²` over block unitaries.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::capacity::{constrained_holevo_capacity_from, OptimizerConfig};
use crate::channels::{
    common_eigenbasis, commutation_obstruction, family_residual, DensityOperator, QuantumChannel, Subspace,
    EIG_CLIP, STRUCTURAL_TOL,
};
use crate::entropic::{matrix_entropy, mutual_information, vn_entropy};
use crate::numerics::{
    dot, hermitian_eig, nelder_mead, norm, nullspace, orthonormalize, right_singular, CMatrix, SimplexOptions,
};
use crate::random::{random_unitary, rng};
use crate::{Error, Result};

const SEARCH_STREAM: u64 = 0xe9_0000;
const SEPARATION_STREAM: u64 = 0x5e9_0000;
/// Obstructions above `OBSTRUCTION_FACTOR · tol` certify strict inequality.
const OBSTRUCTION_FACTOR: f64 = 1e3;
/// Equal verdicts must be corroborated by a numeric gap at most this large.
pub const NUMERIC_AGREEMENT: f64 = 1e-4;

/// Pairwise orthogonal unit vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalFamily {
    ambient_dim: usize,
    vectors: Vec<Vec<C64>>,
}

impl OrthogonalFamily {
    /// Requires a Gram matrix equal to the identity within `1e-9`.
    pub fn new(ambient_dim: usize, vectors: Vec<Vec<C64>>) -> Result<Self> {
        for v in &vectors {
            if v.len() != ambient_dim {
                return Err(Error::dims(ambient_dim, v.len()));
            }
        }
        let mut defect: f64 = 0.0;
        for (i, u) in vectors.iter().enumerate() {
            for (j, v) in vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((dot(u, v) - C64::new(target, 0.0)).norm());
            }
        }
        if defect > 1e-9 {
            return Err(Error::NotIsometry { defect });
        }
        Ok(OrthogonalFamily { ambient_dim, vectors })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    StrictlyLess,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Structural,
    Numeric,
    Both,
}

/// Which test settled the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reason {
    /// Nondegenerate spectrum: the unique eigenbasis was checked.
    SimpleSpectrum,
    /// Subchannel on the support has trivial kernel.
    TrivialKernel,
    /// Candidate from a generic dual operator passed verification.
    DualCandidate,
    /// Compressed duals fail to commute within eigenvalue blocks.
    CommutationObstruction,
    /// Block-unitary search reached `g ≤ tol²`.
    BlockSearch,
    /// No test was conclusive.
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct EqualityReport {
    pub verdict: Verdict,
    pub certificate: Option<OrthogonalFamily>,
    /// Numeric corroboration, `I − C̄` (or `H − C̄`), when computed.
    pub numeric_gap: Option<f64>,
    /// Smallest `max_{i≠j} ‖Φ(|e_i⟩⟨e_j|)‖_F` over tested eigenbases.
    pub residual: f64,
    pub method: Method,
    pub reason: Reason,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EqualityConfig {
    /// Restarts of the block-unitary search.
    pub search_restarts: usize,
    /// Nelder–Mead evaluations per search restart.
    pub search_evals: usize,
    /// Eigenvalues closer than this are grouped as degenerate.
    pub degeneracy_tol: f64,
    /// Random orthogonal pairs screened by [`two_rank_separation`].
    pub separation_pairs: usize,
    /// Settings for the numeric capacity estimates.
    pub capacity: OptimizerConfig,
    pub seed: u64,
}

impl Default for EqualityConfig {
    fn default() -> Self {
        EqualityConfig {
            search_restarts: 64,
            search_evals: 400,
            degeneracy_tol: 1e-8,
            separation_pairs: 2000,
            capacity: OptimizerConfig::default(),
            seed: 0,
        }
    }
}

impl EqualityConfig {
    /// Same settings with every seed replaced by `seed`.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.capacity.seed = seed;
        self
    }
}

/// Orthonormal basis of `ker Φ` as `d_A × d_A` matrices.
pub fn channel_kernel(channel: &QuantumChannel, rank_tol: f64) -> Result<Vec<CMatrix>> {
    let d = channel.dim_in();
    let vecs = nullspace(&channel.superoperator(), rank_tol)?;
    Ok(vecs
        .into_iter()
        .map(|v| CMatrix::from_vec(d, d, v).expect("length d²"))
        .collect())
}

fn check_family(channel: &QuantumChannel, family: &OrthogonalFamily) -> Result<()> {
    if family.ambient_dim() != channel.dim_in() {
        return Err(Error::dims(channel.dim_in(), family.ambient_dim()));
    }
    Ok(())
}

/// `max_{i≠j} ‖Φ(|i⟩⟨j|)‖_F ≤ tol`
pub fn family_in_pi(channel: &QuantumChannel, family: &OrthogonalFamily, tol: f64) -> Result<bool> {
    check_family(channel, family)?;
    Ok(family_residual(channel, family.vectors()) <= tol)
}

/// Membership in the family set of the complementary channel, equivalently
/// mutually orthogonal output supports `supp Φ(|i⟩⟨i|)`.
pub fn family_in_pi_hat(channel: &QuantumChannel, family: &OrthogonalFamily, tol: f64) -> Result<bool> {
    family_in_pi(&channel.complement(), family, tol)
}

/// Support eigenvectors of `ρ` (descending eigenvalues) and index ranges of
/// degenerate groups.
struct SupportSpectrum {
    eigenvalues: Vec<f64>,
    frame: CMatrix,
    groups: Vec<Range<usize>>,
}

fn support_spectrum(rho: &DensityOperator, degeneracy_tol: f64) -> Result<SupportSpectrum> {
    let spectrum = rho.spectrum()?;
    let r = spectrum.eigenvalues.iter().filter(|&&l| l > EIG_CLIP).count();
    if r < 2 {
        return Err(Error::PureState);
    }
    let eigenvalues: Vec<f64> = spectrum.eigenvalues[..r].to_vec();
    let frame = spectrum.eigenvectors.select_columns(&(0..r).collect::<Vec<_>>());
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=r {
        if i == r || (eigenvalues[i - 1] - eigenvalues[i]).abs() > degeneracy_tol {
            groups.push(start..i);
            start = i;
        }
    }
    Ok(SupportSpectrum {
        eigenvalues,
        frame,
        groups,
    })
}

fn report(verdict: Verdict, reason: Reason, certificate: Option<OrthogonalFamily>, residual: f64) -> EqualityReport {
    EqualityReport {
        verdict,
        certificate,
        numeric_gap: None,
        residual,
        method: Method::Structural,
        reason,
        diagnostics: Vec::new(),
    }
}

/// Decides whether `Π(Φ)` contains an eigenbasis of `ρ` inside `supp ρ`.
pub fn eigenbasis_in_pi(
    channel: &QuantumChannel,
    rho: &DensityOperator,
    tol: f64,
    cfg: &EqualityConfig,
) -> Result<EqualityReport> {
    if rho.dim() != channel.dim_in() {
        return Err(Error::dims(channel.dim_in(), rho.dim()));
    }
    let support = support_spectrum(rho, cfg.degeneracy_tol)?;
    let frame = &support.frame;
    let d = channel.dim_in();

    // A valid family has ‖S vec(|e_i⟩⟨e_j|)‖ ≤ tol on unit vectors, hence σ_min ≤ tol.
    let sub = channel.subchannel(&Subspace::from_frame(frame.clone())?)?;
    let sigma = right_singular(&sub.superoperator())?;
    let sigma_min = sigma.values.iter().copied().fold(f64::INFINITY, f64::min);
    if sigma_min > tol {
        let mut rep = report(Verdict::StrictlyLess, Reason::TrivialKernel, None, sigma_min);
        rep.diagnostics.push(format!(
            "kernel of the channel on supp ρ is trivial (smallest singular value {sigma_min:.3e})"
        ));
        return Ok(rep);
    }

    if support.groups.iter().all(|g| g.len() == 1) {
        let basis = frame.columns();
        let residual = family_residual(channel, &basis);
        return Ok(if residual <= tol {
            report(Verdict::Equal, Reason::SimpleSpectrum, Some(OrthogonalFamily::new(d, basis)?), residual)
        } else {
            report(Verdict::StrictlyLess, Reason::SimpleSpectrum, None, residual)
        });
    }

    let candidate = common_eigenbasis(channel, frame, &support.groups, tol, cfg.seed);
    if candidate.residual <= tol {
        let family = OrthogonalFamily::new(d, candidate.basis)?;
        return Ok(report(Verdict::Equal, Reason::DualCandidate, Some(family), candidate.residual));
    }
    let obstruction = commutation_obstruction(channel, frame, &support.groups);
    if obstruction > OBSTRUCTION_FACTOR * tol {
        let mut rep = report(
            Verdict::StrictlyLess,
            Reason::CommutationObstruction,
            None,
            candidate.residual,
        );
        rep.diagnostics
            .push(format!("compressed dual operators fail to commute by {obstruction:.3e}"));
        return Ok(rep);
    }

    let (basis, g) = block_search(channel, frame, &support.groups, tol, cfg)?;
    let residual = family_residual(channel, &basis).min(candidate.residual);
    let mut rep = if g <= tol * tol {
        let mut r = report(
            Verdict::Equal,
            Reason::BlockSearch,
            Some(OrthogonalFamily::new(d, basis)?),
            residual,
        );
        r.method = Method::Numeric;
        r
    } else {
        report(Verdict::Undecided, Reason::Inconclusive, None, residual)
    };
    rep.diagnostics.push(format!(
        "degenerate spectrum {:?}: obstruction {obstruction:.3e}, min g {g:.3e}",
        support.eigenvalues
    ));
    Ok(rep)
}

/// `exp(iH)` for Hermitian `H`.
fn unitary_exp(h: &CMatrix) -> Result<CMatrix> {
    let spectrum = hermitian_eig(h)?;
    let v = &spectrum.eigenvectors;
    let n = h.rows();
    let phased = CMatrix::from_fn(n, n, |i, k| {
        let l = spectrum.eigenvalues[k];
        v[(i, k)] * C64::new(libm::cos(l), libm::sin(l))
    });
    Ok(&phased * &v.adjoint())
}

/// Hermitian `k×k` matrix from `k²` reals.
fn hermitian_from(k: usize, x: &[f64]) -> CMatrix {
    let mut h = CMatrix::zeros(k, k);
    let mut p = 0;
    for i in 0..k {
        h[(i, i)] = C64::new(x[p], 0.0);
        p += 1;
        for j in (i + 1)..k {
            let z = C64::new(x[p], x[p + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            p += 2;
        }
    }
    h
}

fn rotated_basis(frame: &CMatrix, groups: &[Range<usize>], x: &[f64]) -> Result<Vec<Vec<C64>>> {
    let mut out = Vec::with_capacity(frame.cols());
    let mut p = 0;
    for g in groups {
        let k = g.len();
        let idx: Vec<usize> = g.clone().collect();
        let block = frame.select_columns(&idx);
        let u = unitary_exp(&hermitian_from(k, &x[p..p + k * k]))?;
        p += k * k;
        out.extend((&block * &u).columns());
    }
    Ok(out)
}

fn off_diagonal_mass(channel: &QuantumChannel, basis: &[Vec<C64>]) -> f64 {
    let mut g = 0.0;
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            let m = channel.map_outer(&basis[i], &basis[j]);
            g += m.frobenius_norm() * m.frobenius_norm();
        }
    }
    g
}

/// Random-restart Nelder–Mead over block unitaries; returns the best basis
/// and its `g` value.
fn block_search(
    channel: &QuantumChannel,
    frame: &CMatrix,
    groups: &[Range<usize>],
    tol: f64,
    cfg: &EqualityConfig,
) -> Result<(Vec<Vec<C64>>, f64)> {
    let n: usize = groups.iter().map(|g| g.len() * g.len()).sum();
    let opts = SimplexOptions {
        initial_step: 0.3,
        max_evals: cfg.search_evals,
        ftol: tol * tol * 1e-2,
        xtol: 1e-10,
    };
    let mut best_x = alloc::vec![0.0; n];
    let mut best_g = off_diagonal_mass(channel, &rotated_basis(frame, groups, &best_x)?);
    for j in 0..cfg.search_restarts {
        if best_g <= tol * tol {
            break;
        }
        let mut g = rng(cfg.seed, SEARCH_STREAM + j as u64);
        let x0: Vec<f64> = (0..n).map(|_| g.random_range(-core::f64::consts::PI..core::f64::consts::PI)).collect();
        let res = nelder_mead(
            |x| Ok(off_diagonal_mass(channel, &rotated_basis(frame, groups, x)?)),
            &x0,
            &opts,
        )?;
        if res.value < best_g {
            best_g = res.value;
            best_x = res.x;
        }
    }
    Ok((rotated_basis(frame, groups, &best_x)?, best_g))
}

/// `H(Φ(ρ)) − Σ_i ⟨e_i|ρ|e_i⟩ H(Φ(|e_i⟩⟨e_i|))`, the output χ-quantity of the
/// decomposition of `ρ` along the family.
fn family_capacity(channel: &QuantumChannel, rho: &DensityOperator, family: &OrthogonalFamily) -> Result<f64> {
    let mut value = vn_entropy(&channel.apply(rho)?)?;
    for v in family.vectors() {
        let p = dot(v, &rho.matrix().mul_vec(v)).re;
        if p > 0.0 {
            value -= p * matrix_entropy(&channel.map_outer(v, v))?;
        }
    }
    Ok(value)
}

/// `U_{ik} = ⟨k|e_i⟩` over the spectral frame used by the capacity optimiser.
fn certificate_isometry(rho: &DensityOperator, family: &OrthogonalFamily) -> Result<CMatrix> {
    let spectrum = rho.spectrum()?;
    let r = spectrum.eigenvalues.iter().filter(|&&l| l > EIG_CLIP).count();
    Ok(CMatrix::from_fn(family.len(), r, |i, k| {
        dot(&spectrum.eigenvector(k), &family.vectors()[i])
    }))
}

/// Numeric capacity estimate, seeded with the certificate decomposition when
/// one is available.
fn capacity_estimate(
    channel: &QuantumChannel,
    rho: &DensityOperator,
    certificate: Option<&OrthogonalFamily>,
    cfg: &EqualityConfig,
) -> Result<f64> {
    let mut warm = Vec::new();
    let mut direct = f64::NEG_INFINITY;
    if let Some(f) = certificate {
        direct = family_capacity(channel, rho, f)?;
        let u = certificate_isometry(rho, f)?;
        if (&u.adjoint_mul(&u) - &CMatrix::identity(u.cols())).max_abs() <= 1e-9 {
            warm.push(u);
        }
    }
    let opt = constrained_holevo_capacity_from(channel, rho, &cfg.capacity, &warm)?;
    Ok(opt.value.max(direct))
}

fn reconcile(mut rep: EqualityReport, gap: f64, what: &str) -> EqualityReport {
    rep.numeric_gap = Some(gap);
    rep.method = Method::Both;
    match rep.verdict {
        Verdict::Equal if gap > NUMERIC_AGREEMENT => {
            rep.diagnostics.push(format!(
                "structural equality not corroborated: {what} = {gap:.3e} exceeds {NUMERIC_AGREEMENT:.0e}"
            ));
            rep.verdict = Verdict::Undecided;
        }
        Verdict::StrictlyLess if gap <= 1e-9 => {
            rep.diagnostics
                .push(format!("{what} = {gap:.3e} is numerically zero; strict gap may be tiny"));
        }
        _ => {}
    }
    rep
}

/// Decides `C̄(Φ,ρ) = I(Φ,ρ)` structurally and reports `I − C̄` numerically.
pub fn equality_test(
    channel: &QuantumChannel,
    rho: &DensityOperator,
    tol: f64,
    cfg: &EqualityConfig,
) -> Result<EqualityReport> {
    let rep = eigenbasis_in_pi(channel, rho, tol, cfg)?;
    let info = mutual_information(channel, rho)?;
    let cap = capacity_estimate(channel, rho, rep.certificate.as_ref(), cfg)?;
    Ok(reconcile(rep, info - cap, "I − C̄"))
}

/// Decides `C̄(Φ,ρ) = H(ρ)` via the complementary channel and reports
/// `H(ρ) − C̄(Φ,ρ)` numerically.
pub fn hat_equality_test(
    channel: &QuantumChannel,
    rho: &DensityOperator,
    tol: f64,
    cfg: &EqualityConfig,
) -> Result<EqualityReport> {
    let rep = eigenbasis_in_pi(&channel.complement(), rho, tol, cfg)?;
    let h = vn_entropy(rho)?;
    let cap = capacity_estimate(channel, rho, rep.certificate.as_ref(), cfg)?;
    Ok(reconcile(rep, h - cap, "H − C̄"))
}

/// Rank-two state `0.3|φ⟩⟨φ| + 0.7|ψ⟩⟨ψ|` separating `C̄` from `I`.
#[derive(Clone, Debug)]
pub struct Separation {
    pub state: DensityOperator,
    pub phi: Vec<C64>,
    pub psi: Vec<C64>,
    /// `I − C̄` at `state`.
    pub gap: f64,
    /// `‖Φ(|φ⟩⟨ψ|)‖_F`
    pub coherence: f64,
}

const SEPARATION_WEIGHTS: (f64, f64) = (0.3, 0.7);
const REFINE_STEPS: usize = 200;
const SEPARATION_CANDIDATES: usize = 3;

/// Searches orthogonal pairs maximising `‖Φ(|φ⟩⟨ψ|)‖_F`. `None` exactly when
/// the channel is completely depolarizing.
pub fn two_rank_separation(channel: &QuantumChannel, tol: f64, cfg: &EqualityConfig) -> Result<Option<Separation>> {
    if channel.is_completely_depolarizing(STRUCTURAL_TOL) {
        return Ok(None);
    }
    let d = channel.dim_in();
    let mut g = rng(cfg.seed, SEPARATION_STREAM);
    let score = |u: &CMatrix| channel.map_outer(&u.column(0), &u.column(1)).frobenius_norm();
    let mut pool: Vec<(f64, CMatrix)> = Vec::new();
    for _ in 0..cfg.separation_pairs.max(1) {
        let u = random_unitary(d, &mut g);
        let s = score(&u);
        pool.push((s, u));
        pool.sort_by(|a, b| b.0.total_cmp(&a.0));
        pool.truncate(SEPARATION_CANDIDATES);
    }

    let mut best: Option<Separation> = None;
    for (mut s, mut u) in pool {
        // hill climbing by small random rotations
        let mut eps = 0.3;
        for _ in 0..REFINE_STEPS {
            let h = crate::random::random_hermitian(d, &mut g).scale_real(eps);
            let trial = &u * &unitary_exp(&h)?;
            let t = score(&trial);
            if t > s {
                s = t;
                u = trial;
            } else {
                eps *= 0.97;
            }
        }
        let phi = u.column(0);
        let psi = u.column(1);
        let (a, b) = SEPARATION_WEIGHTS;
        let state = DensityOperator::mixture(&[a, b], &[phi.clone(), psi.clone()])?;
        let info = mutual_information(channel, &state)?;
        let cap = constrained_holevo_capacity_from(channel, &state, &cfg.capacity, &[])?;
        let gap = info - cap.value;
        if best.as_ref().is_none_or(|b| gap > b.gap) {
            best = Some(Separation {
                state,
                phi,
                psi,
                gap,
                coherence: s,
            });
        }
        if best.as_ref().is_some_and(|b| b.gap > tol) {
            break;
        }
    }
    Ok(best)
}

/// Partition of a family of pure states into orthogonal components.
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Indices of the input vectors in each component, in input order.
    pub components: Vec<Vec<usize>>,
    /// Projector onto the span of each component.
    pub projectors: Vec<CMatrix>,
}

/// Connected components of the overlap graph `i ~ j ⟺ |⟨ψ_i|ψ_j⟩| > tol`.
pub fn orthogonal_decomposition(vectors: &[Vec<C64>], tol: f64) -> Result<Decomposition> {
    let Some(first) = vectors.first() else {
        return Ok(Decomposition {
            components: Vec::new(),
            projectors: Vec::new(),
        });
    };
    let d = first.len();
    for v in vectors {
        if v.len() != d {
            return Err(Error::dims(d, v.len()));
        }
        if (norm(v) - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!("vector norm {} is not 1", norm(v))));
        }
    }
    let n = vectors.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if dot(&vectors[i], &vectors[j]).norm() > tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of.iter().find(|(root, _)| *root == r) {
            Some(&(_, c)) => components[c].push(i),
            None => {
                root_of.push((r, components.len()));
                components.push(alloc::vec![i]);
            }
        }
    }
    let projectors = components
        .iter()
        .map(|c| {
            let members: Vec<Vec<C64>> = c.iter().map(|&i| vectors[i].clone()).collect();
            let mut p = CMatrix::zeros(d, d);
            for q in orthonormalize(&members, 1e-10) {
                p += &CMatrix::outer(&q, &q);
            }
            p
        })
        .collect();
    Ok(Decomposition { components, projectors })
}
