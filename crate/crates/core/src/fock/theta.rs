use num_complex::Complex64;

use super::apply_word;
use super::operator::{check_fock_modes, FockOperator};
use crate::error::Result;
use crate::grassmann::{GrassmannElement, IndexSubset, Monomial};

/// Ladder word for `C*_I C_J = c*_{i₁}⋯c*_{i_p} c_{j₁}⋯c_{j_q}`.
fn word(mono: Monomial) -> Vec<(usize, bool)> {
    mono.bar
        .iter()
        .map(|i| (i, true))
        .chain(mono.unbar.iter().map(|j| (j, false)))
        .collect()
}

/// `⟨x| C*_I C_J |y⟩`
fn matrix_element(mono: Monomial, x: usize, y: usize) -> f64 {
    match apply_word(y, &word(mono)) {
        Some((s, out)) if out == x => s,
        _ => 0.0,
    }
}

/// `Θ⁻¹(Ψ̄_I Ψ_J) = C*_I C_J`
pub fn monomial_operator(mono: Monomial, m: usize) -> Result<FockOperator> {
    let mut op = FockOperator::zeros(m)?;
    let w = word(mono);
    for y in 0..op.dim() {
        if let Some((s, x)) = apply_word(y, &w) {
            op.mat[(x, y)] += Complex64::new(s, 0.0);
        }
    }
    Ok(op)
}

/// `Θ⁻¹`, extended linearly over the normal-ordered basis.
pub fn theta_inverse(a: &GrassmannElement) -> Result<FockOperator> {
    let mut op = FockOperator::zeros(a.m())?;
    for (mono, c) in a.terms() {
        let w = word(*mono);
        for y in 0..op.dim() {
            if let Some((s, x)) = apply_word(y, &w) {
                op.mat[(x, y)] += c * s;
            }
        }
    }
    Ok(op)
}

/// `Θ`: expands `op` in the basis `{C*_I C_J}`.
///
/// `⟨x|C*_I C_J|y⟩` is nonzero only for `I = x∖K`, `J = y∖K` with `K ⊆ x∩y`, so the
/// coefficient of `(x, y)` follows from coefficients with strictly smaller `|x∩y|`:
/// the change-of-basis system is triangular and is solved exactly by substitution.
pub fn theta(op: &FockOperator) -> Result<GrassmannElement> {
    let m = op.m;
    check_fock_modes(m)?;
    let dim = op.dim();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut pairs: Vec<(usize, usize)> = (0..dim)
        .flat_map(|x| (0..dim).map(move |y| (x, y)))
        .collect();
    pairs.sort_by_key(|&(x, y)| (x & y).count_ones());
    for (x, y) in pairs {
        let mut rhs = op.mat[(x, y)];
        let common = IndexSubset::from_bits((x & y) as u32);
        for k in common.subsets().skip(1) {
            let kb = k.bits() as usize;
            let (xi, yj) = (x & !kb, y & !kb);
            let c = coeffs[xi * dim + yj];
            if c != Complex64::new(0.0, 0.0) {
                rhs -= c * matrix_element(mono_of(xi, yj), x, y);
            }
        }
        let diag = matrix_element(mono_of(x, y), x, y);
        coeffs[x * dim + y] = rhs / diag;
    }
    let mut out = GrassmannElement::zero(m)?;
    for (idx, c) in coeffs.into_iter().enumerate() {
        if c != Complex64::new(0.0, 0.0) {
            out.add_term(mono_of(idx / dim, idx % dim), c);
        }
    }
    Ok(out)
}

fn mono_of(bar: usize, unbar: usize) -> Monomial {
    Monomial::new(
        IndexSubset::from_bits(bar as u32),
        IndexSubset::from_bits(unbar as u32),
    )
}
