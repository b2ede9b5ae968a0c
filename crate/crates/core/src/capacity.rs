//! Constrained Holevo capacity `C̄(Φ,ρ) = H(Φ(ρ)) − Ĥ_Φ(ρ)`, where `Ĥ_Φ` is
//! the convex roof of the output entropy over pure-state decompositions of
//! `ρ`, and the noise gap `D(Φ) = max_ρ [I(Φ,ρ) − C̄(Φ,ρ)]`.
//!
//! Every `m`-element pure decomposition of a rank-`r` state is
//! `φ̃_i = Σ_k U_{ik} √λ_k |k⟩` for an `m × r` isometry `U`. The roof is
//! minimised over `U` by Riemannian gradient descent with polar retraction
//! and Armijo backtracking; results are lower bounds on `C̄`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::channels::{DensityOperator, QuantumChannel, EIG_CLIP};
use crate::entropic::{matrix_entropy, mutual_information, shannon_entropy, vn_entropy, Ensemble};
use crate::numerics::{hermitian_eig, nelder_mead, CMatrix, HermitianSpectrum, SimplexOptions};
use crate::random::{haar_isometry, random_ginibre, rng};
use crate::{Error, Result};

const RESTART_STREAM: u64 = 0x5715_0000;
const GAP_STREAM: u64 = 0x6a90_0000;
const ARMIJO_C: f64 = 1e-4;
const INITIAL_STEP: f64 = 0.5;
const MIN_STEP: f64 = 1e-14;
/// Eigenvalues of an output below `LOG_FLOOR · Tr X` are raised to it inside
/// the gradient's logarithm.
const LOG_FLOOR: f64 = 1e-13;
/// Consecutive small-decrease iterations required to stop.
const STALL_ITERS: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub conv_tol: f64,
    /// Number of ensemble members; `None` means `rank(ρ)²`.
    pub ensemble_size: Option<usize>,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 32,
            max_iters: 2000,
            conv_tol: 1e-7,
            ensemble_size: None,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0
            || self.max_iters == 0
            || !(self.conv_tol > 0.0)
            || self.ensemble_size == Some(0)
        {
            return Err(Error::InvalidParams(format!(
                "optimizer settings must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct CapacityResult {
    /// Lower bound on `C̄(Φ,ρ)` in bits.
    pub value: f64,
    pub best_ensemble: Ensemble,
    /// Isometry that generated `best_ensemble`.
    pub isometry: CMatrix,
    /// Whether the best restart met the stopping rule before `max_iters`.
    pub converged: bool,
    pub restarts_used: usize,
    pub best_restart: usize,
    /// Capacity value reached by each restart, in run order.
    pub restart_values: Vec<f64>,
    /// `max(conv_tol, best − runner-up)` over restarts.
    pub slack: f64,
    /// `H(Φ(ρ))`
    pub output_entropy: f64,
}

/// Pure-state decomposition of `ρ` generated by the isometry `U`
/// (`m × r`, `r = rank ρ`), over `ρ`'s spectral basis.
pub fn ensemble_from_isometry(rho: &DensityOperator, u: &CMatrix) -> Result<Ensemble> {
    let w = spectral_factor(rho)?;
    check_isometry(u, w.cols())?;
    let mut weights = Vec::new();
    let mut members = Vec::new();
    for i in 0..u.rows() {
        let phi = w.mul_vec(&row(u, i));
        let t: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
        if t > EIG_CLIP * EIG_CLIP {
            weights.push(t);
            members.push(DensityOperator::pure(&phi)?);
        }
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ensemble::new(weights, members)
}

/// `W = [√λ_1 |1⟩, …, √λ_r |r⟩]` over eigenvalues above the clip.
fn spectral_factor(rho: &DensityOperator) -> Result<CMatrix> {
    let spectrum = rho.spectrum()?;
    let r = spectrum.eigenvalues.iter().filter(|&&l| l > EIG_CLIP).count();
    let cols: Vec<Vec<C64>> = (0..r)
        .map(|k| {
            let s = libm::sqrt(spectrum.eigenvalues[k]);
            spectrum.eigenvector(k).into_iter().map(|z| z * s).collect()
        })
        .collect();
    Ok(CMatrix::from_columns(rho.dim(), &cols))
}

fn check_isometry(u: &CMatrix, rank: usize) -> Result<()> {
    if u.cols() != rank {
        return Err(Error::RankMismatch {
            state_rank: rank,
            cols: u.cols(),
        });
    }
    if u.rows() < rank {
        return Err(Error::BadRank(format!(
            "{} ensemble members cannot span rank {rank}",
            u.rows()
        )));
    }
    let defect = (&u.adjoint_mul(u) - &CMatrix::identity(rank)).max_abs();
    if defect > 1e-9 {
        return Err(Error::NotIsometry { defect });
    }
    Ok(())
}

fn row(u: &CMatrix, i: usize) -> Vec<C64> {
    (0..u.cols()).map(|k| u[(i, k)]).collect()
}

struct Member {
    images: Vec<Vec<C64>>,
    trace: f64,
    spectrum: HermitianSpectrum,
}

/// `f(U) = Σ_i π_i H(Φ(ψ_i)) = Σ_i [S(X_i) + t_i log₂ t_i]` with
/// `X_i = Φ(φ̃_i φ̃_i†)`, `t_i = Tr X_i` and `S(X) = −Tr X log₂ X`.
struct Roof<'a> {
    channel: &'a QuantumChannel,
    w: CMatrix,
}

impl Roof<'_> {
    fn evaluate(&self, u: &CMatrix) -> Result<(f64, Vec<Member>)> {
        let d = self.channel.dim_out();
        let mut total = 0.0;
        let mut members = Vec::with_capacity(u.rows());
        for i in 0..u.rows() {
            let phi = self.w.mul_vec(&row(u, i));
            let images: Vec<Vec<C64>> = self.channel.kraus().iter().map(|a| a.mul_vec(&phi)).collect();
            let mut x = CMatrix::zeros(d, d);
            for y in &images {
                x += &CMatrix::outer(y, y);
            }
            let spectrum = hermitian_eig(&x.hermitian_part())?;
            let trace: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
            total += shannon_entropy(&spectrum.eigenvalues);
            if trace > 0.0 {
                total += trace * libm::log2(trace);
            }
            members.push(Member {
                images,
                trace,
                spectrum,
            });
        }
        Ok((total, members))
    }

    /// Euclidean gradient `Γ` with `df = 2 Re Tr(Γ† dU)`; row `i` is
    /// `W† Φ*(G_i) φ̃_i` with `G_i = log₂(t_i) I − log₂ X_i`.
    fn gradient(&self, members: &[Member]) -> CMatrix {
        let r = self.w.cols();
        let mut grad = CMatrix::zeros(members.len(), r);
        for (i, m) in members.iter().enumerate() {
            if !(m.trace > 0.0) {
                continue;
            }
            let floor = LOG_FLOOR * m.trace;
            let lt = libm::log2(m.trace);
            let g = m.spectrum.map(|mu| lt - libm::log2(mu.max(floor)));
            let mut v = alloc::vec![C64::new(0.0, 0.0); self.channel.dim_in()];
            for (a, y) in self.channel.kraus().iter().zip(&m.images) {
                let back = a.adjoint_mul_vec(&g.mul_vec(y));
                for (acc, z) in v.iter_mut().zip(back) {
                    *acc += z;
                }
            }
            let gamma = self.w.adjoint_mul_vec(&v);
            for (k, z) in gamma.into_iter().enumerate() {
                grad[(i, k)] = z;
            }
        }
        grad
    }

    fn descend(&self, mut u: CMatrix, cfg: &OptimizerConfig) -> Result<Descent> {
        let (mut value, mut members) = self.evaluate(&u)?;
        let mut trace = alloc::vec![value];
        let mut stalled = 0;
        let mut converged = false;
        for _ in 0..cfg.max_iters {
            let gamma = self.gradient(&members);
            let xi = tangent_projection(&u, &gamma);
            let slope = 2.0 * xi.frobenius_norm() * xi.frobenius_norm();
            if slope <= 1e-24 {
                converged = true;
                break;
            }
            let mut step = INITIAL_STEP;
            let accepted = loop {
                let candidate = polar_retraction(&(&u - &xi.scale_real(step)))?;
                let (v, m) = self.evaluate(&candidate)?;
                if v <= value - ARMIJO_C * step * slope {
                    break Some((candidate, v, m));
                }
                step *= 0.5;
                if step < MIN_STEP {
                    break None;
                }
            };
            let Some((next, v, m)) = accepted else {
                converged = true;
                break;
            };
            let decrease = value - v;
            u = next;
            value = v;
            members = m;
            trace.push(value);
            if decrease <= 1e-2 * cfg.conv_tol {
                stalled += 1;
                if stalled >= STALL_ITERS {
                    converged = true;
                    break;
                }
            } else {
                stalled = 0;
            }
        }
        Ok(Descent {
            u,
            value,
            converged,
            trace,
        })
    }
}

struct Descent {
    u: CMatrix,
    value: f64,
    converged: bool,
    /// Objective after each accepted step; nonincreasing.
    #[cfg_attr(not(test), allow(dead_code))]
    trace: Vec<f64>,
}

/// `ξ = Γ − U sym(U† Γ)`, the projection onto the tangent space at `U`.
fn tangent_projection(u: &CMatrix, gamma: &CMatrix) -> CMatrix {
    let sym = u.adjoint_mul(gamma).hermitian_part();
    gamma - &(u * &sym)
}

/// `Y (Y†Y)^{-1/2}`
fn polar_retraction(y: &CMatrix) -> Result<CMatrix> {
    let gram = y.adjoint_mul(y).hermitian_part();
    let inv_sqrt = hermitian_eig(&gram)?.map(|l| 1.0 / libm::sqrt(l));
    Ok(y * &inv_sqrt)
}

fn spectral_start(m: usize, r: usize) -> CMatrix {
    CMatrix::from_fn(m, r, |i, k| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0))
}

/// Lower bound on `C̄(Φ,ρ)` from `cfg.restarts` descents: the spectral
/// decomposition first, then Haar-random isometries on per-restart streams.
pub fn constrained_holevo_capacity(
    channel: &QuantumChannel,
    rho: &DensityOperator,
    cfg: &OptimizerConfig,
) -> Result<CapacityResult> {
    constrained_holevo_capacity_from(channel, rho, cfg, &[])
}

/// As [`constrained_holevo_capacity`], with extra starting isometries run
/// right after the spectral start. Starts with fewer rows than the ensemble
/// size are padded with zero rows.
pub fn constrained_holevo_capacity_from(
    channel: &QuantumChannel,
    rho: &DensityOperator,
    cfg: &OptimizerConfig,
    warm_starts: &[CMatrix],
) -> Result<CapacityResult> {
    cfg.validate()?;
    if rho.dim() != channel.dim_in() {
        return Err(Error::dims(channel.dim_in(), rho.dim()));
    }
    let w = spectral_factor(rho)?;
    let r = w.cols();
    let m = cfg.ensemble_size.unwrap_or(r * r);
    if m < r {
        return Err(Error::BadRank(format!("ensemble size {m} below state rank {r}")));
    }
    let roof = Roof { channel, w };
    let output_entropy = vn_entropy(&channel.apply(rho)?)?;

    let mut starts: Vec<CMatrix> = alloc::vec![spectral_start(m, r)];
    for s in warm_starts {
        if s.rows() > m {
            return Err(Error::BadRank(format!("warm start has {} rows, ensemble size {m}", s.rows())));
        }
        check_isometry(s, r)?;
        starts.push(CMatrix::from_fn(m, r, |i, k| {
            if i < s.rows() {
                s[(i, k)]
            } else {
                C64::new(0.0, 0.0)
            }
        }));
    }
    let mut runs: Vec<Descent> = Vec::new();
    let mut run = |u: CMatrix| -> Result<()> {
        runs.push(roof.descend(u, cfg)?);
        Ok(())
    };
    for s in starts {
        run(s)?;
    }
    for j in 1..cfg.restarts {
        let mut g = rng(cfg.seed, RESTART_STREAM + j as u64);
        run(haar_isometry(m, r, &mut g))?;
    }

    let capacities: Vec<f64> = runs.iter().map(|d| output_entropy - d.value).collect();
    let mut best = 0;
    for (j, &c) in capacities.iter().enumerate().skip(1) {
        if c > capacities[best] + cfg.conv_tol {
            best = j;
        }
    }
    let runner_up = capacities
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != best)
        .map(|(_, &c)| c)
        .fold(f64::NEG_INFINITY, f64::max);
    let spread = if runner_up.is_finite() {
        capacities[best] - runner_up
    } else {
        0.0
    };

    let winner = &runs[best];
    let best_ensemble = ensemble_from_isometry(rho, &winner.u)?;
    let mut roof_value = 0.0;
    for (p, psi) in best_ensemble.weights().iter().zip(best_ensemble.members()) {
        roof_value += p * matrix_entropy(&channel.map(psi.matrix()))?;
    }
    Ok(CapacityResult {
        value: (output_entropy - roof_value).max(0.0),
        best_ensemble,
        isometry: winner.u.clone(),
        converged: winner.converged,
        restarts_used: runs.len(),
        best_restart: best,
        restart_values: capacities,
        slack: cfg.conv_tol.max(spread.abs()),
        output_entropy,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapConfig {
    /// Nelder–Mead restarts; the first starts from the maximally mixed state.
    pub outer_restarts: usize,
    /// Objective evaluations per restart.
    pub max_evals: usize,
    /// Inner capacity settings used during the search.
    pub inner: OptimizerConfig,
    /// Inner settings used to re-evaluate the best candidates.
    pub polish: OptimizerConfig,
    /// Number of restart optima re-evaluated with `polish`.
    pub polish_candidates: usize,
    pub seed: u64,
}

impl Default for GapConfig {
    fn default() -> Self {
        GapConfig {
            outer_restarts: 16,
            max_evals: 600,
            inner: OptimizerConfig {
                restarts: 2,
                max_iters: 200,
                conv_tol: 1e-6,
                ensemble_size: None,
                seed: 0,
            },
            polish: OptimizerConfig::default(),
            polish_candidates: 3,
            seed: 0,
        }
    }
}

impl GapConfig {
    /// Same settings with every seed replaced by `seed`.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.inner.seed = seed;
        self.polish.seed = seed;
        self
    }
}

#[derive(Clone, Debug)]
pub struct GapResult {
    /// Estimate of `D(Φ)` in bits: `I − C̄` at `state` under the polish settings.
    pub value: f64,
    pub state: DensityOperator,
    pub mutual_information: f64,
    pub capacity: CapacityResult,
    pub evaluations: usize,
}

/// `ρ = G G† / Tr(G G†)` for `G` with entries `x[2k] + i x[2k+1]`.
fn state_from_factor(d: usize, x: &[f64]) -> Option<DensityOperator> {
    let g = CMatrix::from_fn(d, d, |i, j| {
        let k = 2 * (i * d + j);
        C64::new(x[k], x[k + 1])
    });
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    if !(tr > 1e-300) || !tr.is_finite() {
        return None;
    }
    Some(DensityOperator::from_trusted(m.scale_real(1.0 / tr)))
}

fn gap_at(channel: &QuantumChannel, rho: &DensityOperator, cfg: &OptimizerConfig) -> Result<(f64, f64, CapacityResult)> {
    let info = mutual_information(channel, rho)?;
    let cap = constrained_holevo_capacity(channel, rho, cfg)?;
    Ok(((info - cap.value).max(0.0), info, cap))
}

/// Estimate of `D(Φ)` by Nelder–Mead over state factors.
pub fn gap_d(channel: &QuantumChannel, cfg: &GapConfig) -> Result<GapResult> {
    cfg.inner.validate()?;
    cfg.polish.validate()?;
    if cfg.outer_restarts == 0 || cfg.max_evals == 0 || cfg.polish_candidates == 0 {
        return Err(Error::InvalidParams("gap search settings must be positive".into()));
    }
    let d = channel.dim_in();
    let n = 2 * d * d;
    let opts = SimplexOptions {
        initial_step: 0.5,
        max_evals: cfg.max_evals,
        ftol: 1e-9,
        xtol: 1e-6,
    };
    let mut evaluations = 0;
    let mut candidates: Vec<(f64, Vec<f64>)> = Vec::new();
    for j in 0..cfg.outer_restarts {
        let x0: Vec<f64> = if j == 0 {
            (0..n).map(|k| if k % 2 == 0 && (k / 2) % (d + 1) == 0 { 1.0 } else { 0.0 }).collect()
        } else {
            let mut g = rng(cfg.seed, GAP_STREAM + j as u64);
            random_ginibre(d, d, &mut g)
                .as_slice()
                .iter()
                .flat_map(|z| [z.re, z.im])
                .collect()
        };
        let res = nelder_mead(
            |x| match state_from_factor(d, x) {
                Some(rho) => Ok(-gap_at(channel, &rho, &cfg.inner)?.0),
                None => Ok(0.0),
            },
            &x0,
            &opts,
        )?;
        evaluations += res.evaluations;
        candidates.push((res.value, res.x));
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best: Option<GapResult> = None;
    for (_, x) in candidates.iter().take(cfg.polish_candidates) {
        let Some(rho) = state_from_factor(d, x) else { continue };
        let (value, info, capacity) = gap_at(channel, &rho, &cfg.polish)?;
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(GapResult {
                value,
                state: rho,
                mutual_information: info,
                capacity,
                evaluations,
            });
        }
    }
    match best {
        Some(b) => Ok(b),
        None => {
            let rho = DensityOperator::maximally_mixed(d);
            let (value, info, capacity) = gap_at(channel, &rho, &cfg.polish)?;
            Ok(GapResult {
                value,
                state: rho,
                mutual_information: info,
                capacity,
                evaluations,
            })
        }
    }
}
