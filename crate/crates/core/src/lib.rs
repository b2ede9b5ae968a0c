//! Entropic characteristics of finite-dimensional quantum channels.
//!
//! The crate computes the constrained Holevo capacity `C̄(Φ,ρ)`, the quantum
//! mutual information `I(Φ,ρ)` and the entropy exchange of a channel given by
//! Kraus operators, decides when `C̄(Φ,ρ) = I(Φ,ρ)` (and `C̄(Φ,ρ) = H(ρ)`) from
//! the kernel of the channel, estimates the noise gap
//! `D(Φ) = max_ρ [I(Φ,ρ) − C̄(Φ,ρ)]`, and classifies the parameters
//! `(K, ℓ, α)` of Bosonic Gaussian channels with symplectic linear algebra.
//!
//! The crate is `no_std` and only needs `alloc`. Entropies are in bits.
//!
//! Module map:
//!
//! - [`numerics`]: dense complex matrices, Hermitian eigendecomposition,
//!   SVD-based nullspaces, tensor products and partial traces.
//! - [`channels`]: density operators, Kraus channels, Choi matrices,
//!   complementary channels, structural predicates and fixtures.
//! - [`entropic`]: von Neumann and relative entropy, χ-quantity, mutual
//!   information, entropy exchange.
//! - [`capacity`]: convex-roof optimisation of `C̄(Φ,ρ)` over pure-state
//!   decompositions and the outer search for `D(Φ)`.
//! - [`equality`]: kernel-based equality criteria, separation by rank-2 states.
//! - [`gaussian`]: noise inequality, skew-orthogonal complements and the case
//!   classification of Gaussian channel parameters.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod capacity;
pub mod channels;
pub mod entropic;
pub mod equality;
mod error;
pub mod gaussian;
pub mod numerics;
pub mod random;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
