use nalgebra::DMatrix;
use num_complex::Complex64;

use super::element::GrassmannElement;
use super::subset::{IndexSubset, Monomial};
use crate::error::{Error, Result};
use crate::linalg;

/// Tolerance on `‖u*u − 1‖_max` accepted by [`change_generators`].
pub const UNITARY_TOL: f64 = 1e-10;

/// All minors `det u[I, K]` for `|I| = |K|`, as a `2^m × 2^m` matrix indexed by bitmasks
/// (row subset `I`, column subset `K`). Zero where the sizes differ; `det u[∅,∅] = 1`.
pub fn compound_matrix(u: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let m = u.nrows();
    let n = 1usize << m;
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    out[(0, 0)] = Complex64::new(1.0, 0.0);
    let mut by_size: Vec<Vec<usize>> = vec![Vec::new(); m + 1];
    for s in 0..n {
        by_size[s.count_ones() as usize].push(s);
    }
    for group in &by_size[1..] {
        for &rows in group {
            let i0 = rows.trailing_zeros() as usize;
            let rest = rows & !(1 << i0);
            for &cols in group {
                // Laplace expansion along the first row.
                let mut acc = Complex64::new(0.0, 0.0);
                for (pos, k) in IndexSubset::from_bits(cols as u32).iter().enumerate() {
                    let sub = cols & !(1 << (k - 1));
                    let term = u[(i0, k - 1)] * out[(rest, sub)];
                    if pos % 2 == 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
                out[(rows, cols)] = acc;
            }
        }
    }
    out
}

/// Rewrites `a` under the substitution `ψ_i → Σ_j u_ij ψ_j`, `ψ̄_i → Σ_j ū_ij ψ̄_j`.
///
/// For unitary `u` this preserves both integrals.
pub fn change_generators(a: &GrassmannElement, u: &DMatrix<Complex64>) -> Result<GrassmannElement> {
    let m = a.m();
    if u.nrows() != m || u.ncols() != m {
        return Err(Error::ShapeMismatch {
            expected: format!("{m}x{m}"),
            found: format!("{}x{}", u.nrows(), u.ncols()),
        });
    }
    let dev = linalg::unitary_deviation(u);
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    let n = 1usize << m;
    let mut c = DMatrix::<Complex64>::zeros(n, n);
    for (mono, v) in a.terms() {
        c[(mono.bar.bits() as usize, mono.unbar.bits() as usize)] = *v;
    }
    let bar_minors = compound_matrix(&u.map(|z| z.conj()));
    let minors = compound_matrix(u);
    let out = bar_minors.transpose() * c * minors;
    let mut result = GrassmannElement::zero(m)?;
    for k in 0..n {
        for l in 0..n {
            let v = out[(k, l)];
            if v != Complex64::new(0.0, 0.0) {
                result.add_term(
                    Monomial::new(
                        IndexSubset::from_bits(k as u32),
                        IndexSubset::from_bits(l as u32),
                    ),
                    v,
                );
            }
        }
    }
    Ok(result)
}
