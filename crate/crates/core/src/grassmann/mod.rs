//! The finite Grassmann algebra `G_M` over generators `ψ̄_i, ψ_i`, `i ∈ {1..m}`.
//!
//! Basis monomials are normal ordered, `Ψ̄_I Ψ_J = ψ̄_{i₁}⋯ψ̄_{i_p} ψ_{j₁}⋯ψ_{j_q}` with
//! ascending index lists. Integrals use left derivatives, so `∫d ψ̄₁ψ₁ = −1`.

mod element;
mod generators;
mod integral;
pub mod reference;
mod star;
mod subset;

pub use element::{make_element, GrassmannElement, MAX_MODES, PRUNE_TOL, STAR_MAX_MODES};
pub use generators::{change_generators, compound_matrix, UNITARY_TOL};
pub use integral::{
    check_normalized, expectation, pair_integral_closed_form, pair_trace, pair_trace_expanded,
    raw_integral, raw_integral_with, top_sign, trace_integral, trace_integral_with, DerivativeSide,
    NORMALIZATION_TOL,
};
pub use star::{number_monomial, star, star_chain, star_monomials, SignLedger};
pub use subset::{half_pairs, inversions, merge_sign, parity, wedge, IndexSubset, Monomial};
