use num_complex::Complex64;

use super::apply_word;
use super::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// One-particle density matrix, `γ[k,l] = tr(ρ c*_l c_k)` (0-based `k`, `l`).
#[derive(Clone, Debug, PartialEq)]
pub struct OnePdm(pub CMatrix);

/// Two-particle density matrix,
/// `Γ[(a,b),(c,d)] = tr(ρ c*_d c*_c c_a c_b)` stored at row `a·m + b`, column `c·m + d`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPdm(pub CMatrix);

impl OnePdm {
    pub fn m(&self) -> usize {
        self.0.nrows()
    }
}

impl TwoPdm {
    pub fn m(&self) -> usize {
        (self.0.nrows() as f64).sqrt().round() as usize
    }
}

/// `tr(ρ W)` for a ladder word `W` (rightmost applied first).
fn word_expectation(rho: &DensityMatrix, word: &[(usize, bool)]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for y in 0..rho.op().dim() {
        if let Some((s, x)) = apply_word(y, word) {
            acc += rho.mat()[(y, x)] * s;
        }
    }
    acc
}

/// γ and Γ by direct traces.
pub fn pdms_from_rho(rho: &DensityMatrix) -> (OnePdm, TwoPdm) {
    let m = rho.m();
    let mut g = CMatrix::zeros(m, m);
    for k in 0..m {
        for l in 0..m {
            g[(k, l)] = word_expectation(rho, &[(l + 1, true), (k + 1, false)]);
        }
    }
    let mut big = CMatrix::zeros(m * m, m * m);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    big[(a * m + b, c * m + d)] = word_expectation(
                        rho,
                        &[(d + 1, true), (c + 1, true), (a + 1, false), (b + 1, false)],
                    );
                }
            }
        }
    }
    (OnePdm(g), TwoPdm(big))
}

/// `(⟨N̂⟩, ⟨N̂(N̂−1)⟩)`
pub fn number_moments(rho: &DensityMatrix) -> (f64, f64) {
    let mut n1 = 0.0;
    let mut n2 = 0.0;
    for s in 0..rho.op().dim() {
        let p = rho.mat()[(s, s)].re;
        let n = s.count_ones() as f64;
        n1 += p * n;
        n2 += p * n * (n - 1.0);
    }
    (n1, n2)
}

/// Largest entrywise deviation between γ and `(N−1)^{-1} Σ_k ⟨· ⊗ φ_k, Γ (· ⊗ φ_k)⟩`
/// for a state in the `N`-particle sector. `onb` holds the `φ_k` as columns (identity
/// if `None`).
pub fn contraction_check(rho: &DensityMatrix, n: usize, onb: Option<&CMatrix>) -> Result<f64> {
    if n < 2 {
        return Err(Error::ContractionUndefined(n));
    }
    let m = rho.m();
    if n > m {
        return Err(Error::EmptySector { n, m });
    }
    let outside = rho.weight_outside_sector(n);
    if outside.abs() > 1e-10 {
        return Err(Error::NotInSector(outside));
    }
    let identity = CMatrix::identity(m, m);
    let phi = onb.unwrap_or(&identity);
    if phi.shape() != (m, m) {
        return Err(Error::ShapeMismatch {
            expected: format!("{m}x{m}"),
            found: format!("{}x{}", phi.nrows(), phi.ncols()),
        });
    }
    let (g, big) = pdms_from_rho(rho);
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..m {
                for p in 0..m {
                    for q in 0..m {
                        acc += phi[(p, k)].conj() * phi[(q, k)] * big.0[(a * m + p, b * m + q)];
                    }
                }
            }
            acc /= (n - 1) as f64;
            worst = worst.max((acc - g.0[(a, b)]).norm());
        }
    }
    Ok(worst)
}
