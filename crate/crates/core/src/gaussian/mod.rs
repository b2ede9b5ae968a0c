//! Parameters `(K, ℓ, α)` of Bosonic Gaussian channels and the symplectic
//! linear algebra that classifies them.
//!
//! Conventions: phase space of `s` modes is `ℝ^{2s}` with the form `Δ`
//! made of blocks `[[0, 1], [−1, 0]]`; `K` is a `2s_A × 2s_B` matrix
//! (an operator `Z_B → Z_A`); `α` is a symmetric `2s_B × 2s_B` matrix
//! subject to `α ≥ ±(i/2)(Δ_B − Kᵀ Δ_A K)`. The shift `ℓ` plays no role in
//! classification.

mod linalg;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

pub use linalg::{column_space, nullspace, orthogonal_complement, rank, RealMatrix};

use crate::numerics::{min_eig_hermitian, CMatrix};
use crate::{Error, Result};

/// Relative threshold for numerical rank of real matrices and frames.
pub const RANK_TOL: f64 = 1e-10;
/// Slack allowed on the smallest eigenvalue in the noise inequality.
pub const NID_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-12;
const FORM_TOL: f64 = 1e-9;

/// `(ℝ^{2s}, Δ)`
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticSpace {
    modes: usize,
}

impl SymplecticSpace {
    pub fn new(modes: usize) -> Self {
        SymplecticSpace { modes }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        2 * self.modes
    }

    pub fn form(&self) -> RealMatrix {
        let mut d = RealMatrix::zeros(self.dim(), self.dim());
        for m in 0..self.modes {
            d[(2 * m, 2 * m + 1)] = 1.0;
            d[(2 * m + 1, 2 * m)] = -1.0;
        }
        d
    }
}

/// Subspace of `ℝⁿ` held as an orthonormal frame.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSubspace {
    frame: RealMatrix,
}

impl RealSubspace {
    pub fn span(ambient: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(Error::dims(ambient, v.len()));
        }
        Ok(RealSubspace {
            frame: column_space(&RealMatrix::from_columns(ambient, vectors), RANK_TOL),
        })
    }

    pub fn zero(ambient: usize) -> Self {
        RealSubspace {
            frame: RealMatrix::zeros(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        RealSubspace {
            frame: RealMatrix::identity(ambient),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.rows()
    }

    pub fn dim(&self) -> usize {
        self.frame.cols()
    }

    pub fn frame(&self) -> &RealMatrix {
        &self.frame
    }

    pub fn basis(&self) -> Vec<Vec<f64>> {
        self.frame.columns()
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> RealMatrix {
        &self.frame * &self.frame.transpose()
    }

    /// Equal dimension and projectors within `tol`.
    pub fn same_as(&self, other: &RealSubspace, tol: f64) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && self.dim() == other.dim()
            && (&self.projector() - &other.projector()).max_abs() <= tol
    }
}

/// `{z : zᵀ Δ v = 0 for all v ∈ V}`; its dimension is `2s − dim V`.
pub fn skew_complement(v: &RealSubspace, space: &SymplecticSpace) -> Result<RealSubspace> {
    if v.ambient_dim() != space.dim() {
        return Err(Error::dims(space.dim(), v.ambient_dim()));
    }
    // zᵀ Δ V = 0  ⟺  (Δ V)ᵀ z = 0
    let dv = &space.form() * v.frame();
    Ok(RealSubspace {
        frame: nullspace(&dv.transpose(), RANK_TOL),
    })
}

/// Whether the form vanishes on `W`, and the rank of its restriction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticContent {
    pub is_isotropic: bool,
    /// Rank of `Wᵀ Δ W` in an orthonormal frame; always even.
    pub symplectic_rank: usize,
}

pub fn symplectic_content(w: &RealSubspace, space: &SymplecticSpace) -> Result<SymplecticContent> {
    if w.ambient_dim() != space.dim() {
        return Err(Error::dims(space.dim(), w.ambient_dim()));
    }
    let restricted = &(&w.frame().transpose() * &space.form()) * w.frame();
    // frame is orthonormal, so entries are O(1) and the threshold is absolute
    let r = if restricted.max_abs() <= RANK_TOL {
        0
    } else {
        rank(&restricted, RANK_TOL)
    };
    Ok(SymplecticContent {
        is_isotropic: r == 0,
        symplectic_rank: r,
    })
}

/// Shape-checked parameter triple; the noise inequality is checked by
/// [`GaussianChannelParams::new`] and reported by [`validate_nid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianChannelParams {
    s_a: usize,
    s_b: usize,
    k: RealMatrix,
    l: Vec<f64>,
    alpha: RealMatrix,
}

impl GaussianChannelParams {
    /// Validated parameters: shapes, symmetry of `α` and the noise inequality.
    pub fn new(s_a: usize, s_b: usize, k: RealMatrix, l: Vec<f64>, alpha: RealMatrix) -> Result<Self> {
        let p = Self::from_parts(s_a, s_b, k, l, alpha)?;
        let min = p.nid_min_eigenvalue()?;
        if min < -NID_TOL {
            return Err(Error::InvalidParams(format!(
                "noise inequality violated: minimum eigenvalue {min:.3e}"
            )));
        }
        Ok(p)
    }

    /// Shape and symmetry checks only.
    pub fn from_parts(s_a: usize, s_b: usize, k: RealMatrix, l: Vec<f64>, alpha: RealMatrix) -> Result<Self> {
        if s_a == 0 || s_b == 0 {
            return Err(Error::ShapeMismatch("mode counts must be positive".into()));
        }
        if (k.rows(), k.cols()) != (2 * s_a, 2 * s_b) {
            return Err(Error::ShapeMismatch(format!(
                "K is {}x{}, expected {}x{}",
                k.rows(),
                k.cols(),
                2 * s_a,
                2 * s_b
            )));
        }
        if l.len() != 2 * s_b {
            return Err(Error::ShapeMismatch(format!("l has length {}, expected {}", l.len(), 2 * s_b)));
        }
        if (alpha.rows(), alpha.cols()) != (2 * s_b, 2 * s_b) {
            return Err(Error::ShapeMismatch(format!(
                "alpha is {}x{}, expected {}x{}",
                alpha.rows(),
                alpha.cols(),
                2 * s_b,
                2 * s_b
            )));
        }
        if l.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let asym = (&alpha - &alpha.transpose()).max_abs();
        if asym > SYMMETRY_TOL {
            return Err(Error::InvalidParams(format!("alpha is not symmetric (defect {asym:.3e})")));
        }
        Ok(GaussianChannelParams { s_a, s_b, k, l, alpha })
    }

    pub fn s_a(&self) -> usize {
        self.s_a
    }

    pub fn s_b(&self) -> usize {
        self.s_b
    }

    pub fn k(&self) -> &RealMatrix {
        &self.k
    }

    pub fn l(&self) -> &[f64] {
        &self.l
    }

    pub fn alpha(&self) -> &RealMatrix {
        &self.alpha
    }

    pub fn space_a(&self) -> SymplecticSpace {
        SymplecticSpace::new(self.s_a)
    }

    pub fn space_b(&self) -> SymplecticSpace {
        SymplecticSpace::new(self.s_b)
    }

    /// `Δ_B − Kᵀ Δ_A K`
    pub fn form_defect(&self) -> RealMatrix {
        let kt = self.k.transpose();
        &self.space_b().form() - &(&(&kt * &self.space_a().form()) * &self.k)
    }

    /// Smaller of the minimum eigenvalues of `α ∓ (i/2)(Δ_B − Kᵀ Δ_A K)`.
    pub fn nid_min_eigenvalue(&self) -> Result<f64> {
        let m = self.form_defect();
        let n = self.alpha.rows();
        let mut worst = f64::INFINITY;
        for sign in [-1.0, 1.0] {
            let h = CMatrix::from_fn(n, n, |i, j| C64::new(self.alpha[(i, j)], sign * 0.5 * m[(i, j)]));
            worst = worst.min(min_eig_hermitian(&h)?);
        }
        Ok(worst)
    }

    /// Non-fatal remarks about the parameters.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.l.iter().any(|&x| x != 0.0) {
            w.push(String::from("nonzero shift l is ignored: classification assumes a centered channel"));
        }
        w
    }
}

/// Noise inequality `α ≥ ±(i/2)(Δ_B − Kᵀ Δ_A K)` up to [`NID_TOL`].
pub fn validate_nid(params: &GaussianChannelParams) -> Result<bool> {
    Ok(params.nid_min_eigenvalue()? >= -NID_TOL)
}

fn require_nid(params: &GaussianChannelParams) -> Result<()> {
    let min = params.nid_min_eigenvalue()?;
    if min < -NID_TOL {
        return Err(Error::InvalidParams(format!(
            "noise inequality violated: minimum eigenvalue {min:.3e}"
        )));
    }
    Ok(())
}

#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaussianCase {
    CompletelyDepolarizing,
    CaseB_FullRange,
    CaseA_IsotropicComplement,
    CaseD_SymplecticComplement,
}

impl GaussianCase {
    pub fn label(self) -> &'static str {
        match self {
            GaussianCase::CompletelyDepolarizing => "CompletelyDepolarizing",
            GaussianCase::CaseB_FullRange => "CaseB_FullRange",
            GaussianCase::CaseA_IsotropicComplement => "CaseA_IsotropicComplement",
            GaussianCase::CaseD_SymplecticComplement => "CaseD_SymplecticComplement",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OneModeType {
    A1,
    A2,
    B1,
    Other {
        rank_k: usize,
        form_preserved: bool,
        rank_alpha: usize,
    },
}

impl OneModeType {
    pub fn label(&self) -> &'static str {
        match self {
            OneModeType::A1 => "A1",
            OneModeType::A2 => "A2",
            OneModeType::B1 => "B1",
            OneModeType::Other { .. } => "Other",
        }
    }
}

/// Case label with the dimensions it was derived from.
///
/// For the direct channel `ran_k_dim = dim Ran K` and the complement is
/// `[Ran K]^⊥` (skew-orthogonal, in `Z_A`). For the complementary channel
/// the roles are played by `Ran L` and `[Ran L]^⊥ = K(ker α)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianClassification {
    pub case: GaussianCase,
    pub ran_k_dim: usize,
    pub complement_dim: usize,
    pub complement_symplectic_rank: usize,
    /// Orthonormal basis of the complement: the shift directions of the
    /// support condition in the isotropic case.
    pub complement_basis: Vec<Vec<f64>>,
    pub one_mode_type: Option<OneModeType>,
    pub notes: Vec<String>,
}

fn one_mode_or_none(params: &GaussianChannelParams) -> Result<Option<OneModeType>> {
    match one_mode_type(params) {
        Ok(t) => Ok(Some(t)),
        Err(Error::NotOneMode { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn fmt_basis(basis: &[Vec<f64>]) -> String {
    let vs: Vec<String> = basis
        .iter()
        .map(|v| {
            let xs: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
            format!("[{}]", xs.join(", "))
        })
        .collect();
    format!("span{{{}}}", vs.join(", "))
}

/// Case of the channel from `Ran K` and its skew-orthogonal complement.
pub fn classify_direct(params: &GaussianChannelParams) -> Result<GaussianClassification> {
    require_nid(params)?;
    let space = params.space_a();
    let ran = RealSubspace {
        frame: column_space(params.k(), RANK_TOL),
    };
    let comp = skew_complement(&ran, &space)?;
    let content = symplectic_content(&comp, &space)?;
    let mut notes = params.warnings();
    let case = if ran.dim() == 0 {
        notes.push("K = 0: the channel is completely depolarizing (and discrete c-q)".into());
        GaussianCase::CompletelyDepolarizing
    } else if comp.dim() == 0 {
        notes.push("Ran K is the whole phase space: C̄ < I for every mixed state of finite entropy".into());
        GaussianCase::CaseB_FullRange
    } else if content.is_isotropic {
        notes.push(format!(
            "[Ran K]^⊥ = {} is isotropic: C̄ = I exactly for states whose eigenbasis satisfies the \
             support condition with shift directions in this subspace",
            fmt_basis(&comp.basis())
        ));
        GaussianCase::CaseA_IsotropicComplement
    } else {
        notes.push(format!(
            "[Ran K]^⊥ contains a symplectic subspace (rank {}): some mixed Gaussian states reach C̄ = I",
            content.symplectic_rank
        ));
        GaussianCase::CaseD_SymplecticComplement
    };
    Ok(GaussianClassification {
        case,
        ran_k_dim: ran.dim(),
        complement_dim: comp.dim(),
        complement_symplectic_rank: content.symplectic_rank,
        complement_basis: comp.basis(),
        one_mode_type: one_mode_or_none(params)?,
        notes,
    })
}

/// `[Ran L]^⊥ = K(ker α)` for the complementary channel.
#[derive(Clone, Debug, PartialEq)]
pub struct CompRel {
    pub subspace: RealSubspace,
    /// Kernel of `α` in `Z_B`.
    pub kernel_alpha: RealSubspace,
    pub warnings: Vec<String>,
}

/// Image of `ker α` under `K`, with checks that `K` is injective and
/// form-preserving on `ker α`.
pub fn comp_rel_subspace(params: &GaussianChannelParams) -> Result<CompRel> {
    require_nid(params)?;
    let ker = RealSubspace {
        frame: nullspace(params.alpha(), RANK_TOL),
    };
    let mut warnings = params.warnings();
    if ker.dim() == 0 {
        return Ok(CompRel {
            subspace: RealSubspace::zero(2 * params.s_a()),
            kernel_alpha: ker,
            warnings,
        });
    }
    let image = params.k() * ker.frame();
    let subspace = RealSubspace {
        frame: column_space(&image, RANK_TOL),
    };
    if subspace.dim() != ker.dim() {
        warnings.push(format!(
            "K restricted to ker α is degenerate (rank {} on a {}-dimensional kernel)",
            subspace.dim(),
            ker.dim()
        ));
    }
    let n = ker.frame();
    let pulled = &(&(&n.transpose() * &params.k().transpose()) * &params.space_a().form()) * &(params.k() * n);
    let own = &(&n.transpose() * &params.space_b().form()) * n;
    let defect = (&pulled - &own).max_abs();
    if defect > FORM_TOL {
        warnings.push(format!("K does not preserve the symplectic form on ker α (defect {defect:.3e})"));
    }
    Ok(CompRel {
        subspace,
        kernel_alpha: ker,
        warnings,
    })
}

/// Case of the complementary channel, driven by `K(ker α) = [Ran L]^⊥`.
pub fn classify_complementary(params: &GaussianChannelParams) -> Result<GaussianClassification> {
    let rel = comp_rel_subspace(params)?;
    let space = params.space_a();
    let content = symplectic_content(&rel.subspace, &space)?;
    let mut notes = rel.warnings.clone();
    let full = space.dim();
    let comp = &rel.subspace;
    let case = if rel.kernel_alpha.dim() == 0 {
        notes.push("det α ≠ 0, so Ran L is the whole phase space: C̄ < H for every mixed state".into());
        GaussianCase::CaseB_FullRange
    } else if comp.dim() == full {
        notes.push("K(ker α) is the whole phase space: L = 0, the channel is noiseless".into());
        GaussianCase::CompletelyDepolarizing
    } else if content.is_isotropic {
        notes.push(format!(
            "[Ran L]^⊥ = K(ker α) = {} is isotropic: C̄ = H exactly for states whose eigenbasis \
             satisfies the support condition with shift directions in this subspace",
            fmt_basis(&comp.basis())
        ));
        GaussianCase::CaseA_IsotropicComplement
    } else {
        notes.push(format!(
            "K(ker α) contains a symplectic subspace (rank {}): some mixed Gaussian states reach C̄ = H",
            content.symplectic_rank
        ));
        GaussianCase::CaseD_SymplecticComplement
    };
    Ok(GaussianClassification {
        case,
        ran_k_dim: full - comp.dim(),
        complement_dim: comp.dim(),
        complement_symplectic_rank: content.symplectic_rank,
        complement_basis: comp.basis(),
        one_mode_type: one_mode_or_none(params)?,
        notes,
    })
}

/// Labels for one-mode channels from `rank K`, whether `K` preserves the
/// form, and `rank α`.
pub fn one_mode_type(params: &GaussianChannelParams) -> Result<OneModeType> {
    if params.s_a() != 1 || params.s_b() != 1 {
        return Err(Error::NotOneMode {
            s_a: params.s_a(),
            s_b: params.s_b(),
        });
    }
    let rank_k = rank(params.k(), RANK_TOL);
    let form_preserved = params.form_defect().max_abs() <= FORM_TOL;
    let rank_alpha = rank(params.alpha(), RANK_TOL);
    Ok(match rank_k {
        0 => OneModeType::A1,
        1 => OneModeType::A2,
        2 if form_preserved && rank_alpha == 1 => OneModeType::B1,
        _ => OneModeType::Other {
            rank_k,
            form_preserved,
            rank_alpha,
        },
    })
}
