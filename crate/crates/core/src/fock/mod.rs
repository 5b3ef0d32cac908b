//! Brute-force ground truth on the fermionic Fock space `∧C^m`.
//!
//! Basis state `n` (an integer in `0..2^m`) has mode `i` occupied iff bit `i−1` is set.
//! Annihilators follow the Jordan–Wigner sign string over lower modes:
//! `c_i |n⟩ = (−1)^{#occupied modes below i} |n − e_i⟩`.

mod density;
mod operator;
mod pdm;
mod theta;

pub use density::{
    pure_density, random_density, slater_density, slater_state, DensityMatrix, DensityOptions,
    DENSITY_TOL,
};
pub use operator::{annihilation, creation, number_operator, FockOperator, FOCK_MAX_MODES};
pub use pdm::{contraction_check, number_moments, pdms_from_rho, OnePdm, TwoPdm};
pub use theta::{monomial_operator, theta, theta_inverse};

/// Applies `c_i` (or `c*_i` when `dagger`) to basis state `n`; `None` if it vanishes.
#[inline]
pub(crate) fn apply(n: usize, i: usize, dagger: bool) -> Option<(f64, usize)> {
    let bit = 1usize << (i - 1);
    let occupied = n & bit != 0;
    if occupied == dagger {
        return None;
    }
    let s = if (n & (bit - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    Some((s, n ^ bit))
}

/// Applies a word of ladder operators, rightmost first.
#[inline]
pub(crate) fn apply_word(mut n: usize, word: &[(usize, bool)]) -> Option<(f64, usize)> {
    let mut sign = 1.0;
    for &(i, dagger) in word.iter().rev() {
        let (s, next) = apply(n, i, dagger)?;
        sign *= s;
        n = next;
    }
    Some((sign, n))
}
