use num_complex::Complex64;

use super::HERMITIAN_INPUT_TOL;
use crate::error::{Error, Result};
use crate::fock::{theta, DensityMatrix, OnePdm, TwoPdm};
use crate::grassmann::{check_normalized, pair_trace, GrassmannElement, Monomial};
use crate::linalg::CMatrix;

/// A Grassmann density `ϰ = ϑ*⋆ϑ`: normalized (`∫D ϰ = 1`) and self-adjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannDensity {
    element: GrassmannElement,
}

impl GrassmannDensity {
    pub fn new(element: GrassmannElement) -> Result<Self> {
        check_normalized(&element)?;
        let dev = element.involution().max_abs_diff(&element);
        if dev > HERMITIAN_INPUT_TOL * (1.0 + element.max_abs()) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(GrassmannDensity { element })
    }

    /// `Θ(ρ)`
    pub fn from_rho(rho: &DensityMatrix) -> Result<Self> {
        Self::new(theta(rho.op())?)
    }

    pub fn element(&self) -> &GrassmannElement {
        &self.element
    }

    pub fn into_element(self) -> GrassmannElement {
        self.element
    }

    pub fn m(&self) -> usize {
        self.element.m()
    }

    /// `⟨μ⟩_ϰ = ∫D ϰ ⋆ μ`
    pub fn expect(&self, observable: &GrassmannElement) -> Result<Complex64> {
        pair_trace(&self.element, observable)
    }

    pub(crate) fn expect_monomial(&self, mono: Monomial, sign: f64) -> Complex64 {
        let obs = GrassmannElement::monomial(self.m(), mono, Complex64::new(sign, 0.0))
            .expect("monomial within m");
        pair_trace(&self.element, &obs).expect("same m")
    }
}

/// `γ[k,l] = ⟨ψ̄_l ⋆ ψ_k⟩_ϰ`
pub fn pdm1_from_density(density: &GrassmannDensity) -> OnePdm {
    let m = density.m();
    let mut g = CMatrix::zeros(m, m);
    for k in 1..=m {
        for l in 1..=m {
            let mono = Monomial::from_indices(&[l], &[k], m).expect("valid");
            g[(k - 1, l - 1)] = density.expect_monomial(mono, 1.0);
        }
    }
    OnePdm(g)
}

/// `Γ[(a,b),(c,d)] = ⟨ψ̄_d ⋆ ψ̄_c ⋆ ψ_a ⋆ ψ_b⟩_ϰ`; normal-ordered, so the star
/// product is the plain one.
pub fn pdm2_from_density(density: &GrassmannDensity) -> TwoPdm {
    let m = density.m();
    let mut big = CMatrix::zeros(m * m, m * m);
    for a in 1..=m {
        for b in 1..=m {
            if a == b {
                continue;
            }
            for c in 1..=m {
                for d in 1..=m {
                    if c == d {
                        continue;
                    }
                    // ψ̄_d ψ̄_c = −ψ̄_c ψ̄_d when d > c; same for ψ_a ψ_b.
                    let sign = if d > c { -1.0 } else { 1.0 } * if a > b { -1.0 } else { 1.0 };
                    let mono = Monomial::from_indices(&[c, d], &[a, b], m).expect("valid");
                    big[((a - 1) * m + (b - 1), (c - 1) * m + (d - 1))] =
                        density.expect_monomial(mono, sign);
                }
            }
        }
    }
    TwoPdm(big)
}
