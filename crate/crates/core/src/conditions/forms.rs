use num_complex::Complex64;

use super::{ConditionReport, GrassmannDensity, Method};
use crate::error::{Error, Result};
use crate::grassmann::{pair_trace, star, GrassmannElement, Monomial};
use crate::linalg::CMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormMode {
    /// `F[α,β] = ⟨b_α* ⋆ b_β⟩`
    Plain,
    /// `F[α,β] = ⟨b_α* ⋆ b_β + b_β ⋆ b_α*⟩`
    Anticommutator,
}

/// Probe elements `b_α` for a quadratic form.
#[derive(Clone, Debug)]
pub struct QuadraticFormBasis {
    pub elements: Vec<GrassmannElement>,
    pub mode: FormMode,
}

impl QuadraticFormBasis {
    pub fn new(elements: Vec<GrassmannElement>, mode: FormMode) -> Self {
        QuadraticFormBasis { elements, mode }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// The Hermitian matrix of the quadratic form `x ↦ ⟨η*⋆η⟩_ϰ` (or the anticommutator),
/// `η = Σ_β x_β b_β`.
pub fn quadratic_form_matrix(
    density: &GrassmannDensity,
    basis: &QuadraticFormBasis,
) -> Result<CMatrix> {
    let m = density.m();
    if let Some(b) = basis.elements.iter().find(|b| b.m() != m) {
        return Err(Error::ModeMismatch {
            left: m,
            right: b.m(),
        });
    }
    let n = basis.len();
    let rho = density.element();
    let mut f = CMatrix::zeros(n, n);
    for (alpha, b_alpha) in basis.elements.iter().enumerate() {
        let adj = b_alpha.involution();
        // ⟨b_α* ⋆ b_β⟩ = ∫D (ϰ ⋆ b_α*) ⋆ b_β
        let left = star(rho, &adj)?;
        // ⟨b_β ⋆ b_α*⟩ = ∫D (b_α* ⋆ ϰ) ⋆ b_β by cyclicity
        let right = match basis.mode {
            FormMode::Plain => None,
            FormMode::Anticommutator => Some(star(&adj, rho)?),
        };
        for (beta, b_beta) in basis.elements.iter().enumerate() {
            let mut v = pair_trace(&left, b_beta)?;
            if let Some(r) = &right {
                v += pair_trace(r, b_beta)?;
            }
            f[(alpha, beta)] = v;
        }
    }
    Ok(f)
}

/// Monomials `Ψ̄_I Ψ_J` with `|I| + |J| ≤ n`, by increasing degree.
pub fn order_n_probes(m: usize, n: usize) -> Vec<Monomial> {
    let mut probes: Vec<Monomial> = Monomial::all(m).filter(|p| p.degree() <= n).collect();
    probes.sort_by_key(|p| (p.degree(), p.bar.len() < p.unbar.len(), *p));
    probes
}

/// Positivity of `⟨η*⋆η⟩_ϰ` over all `η` of degree `≤ n`, so that `η*⋆η` ranges over
/// the order-`n` cone. `n = 1` is equivalent to `0 ≤ γ ≤ 1`; `n = 2` adds G, P, Q.
pub fn order_n_check(density: &GrassmannDensity, n: usize) -> Result<ConditionReport> {
    if !(1..=2).contains(&n) {
        return Err(Error::UnsupportedOrder(n));
    }
    let m = density.m();
    let one = Complex64::new(1.0, 0.0);
    let elements = order_n_probes(m, n)
        .into_iter()
        .map(|p| GrassmannElement::monomial(m, p, one))
        .collect::<Result<Vec<_>>>()?;
    let f = quadratic_form_matrix(density, &QuadraticFormBasis::new(elements, FormMode::Plain))?;
    Ok(ConditionReport::from_matrix(
        &format!("order-{n}"),
        &f,
        Method::GrassmannForm,
    ))
}

/// Single-generator probes `ψ_k` (or `ψ̄_k` when `barred`).
pub(crate) fn generator_probes(m: usize, barred: bool) -> Vec<GrassmannElement> {
    (1..=m)
        .map(|k| GrassmannElement::generator(m, k, barred).expect("k within m"))
        .collect()
}

/// `Π_k ψ_{i_k}` over ordered index lists, in star (= plain) product.
pub(crate) fn product_probe(m: usize, bar: &[usize], unbar: &[usize]) -> GrassmannElement {
    let mut e = GrassmannElement::one(m).expect("m valid");
    for &i in bar {
        e = e
            .wedge(&GrassmannElement::generator(m, i, true).expect("valid"))
            .expect("same m");
    }
    for &j in unbar {
        e = e
            .wedge(&GrassmannElement::generator(m, j, false).expect("valid"))
            .expect("same m");
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::pdm1_from_density;
    use crate::fock::{random_density, DensityOptions};
    use crate::linalg::max_abs_diff;

    fn density(m: usize, seed: u64) -> GrassmannDensity {
        GrassmannDensity::from_rho(&random_density(m, seed, DensityOptions::default()).unwrap())
            .unwrap()
    }

    #[test]
    fn unit_probe() {
        let d = density(2, 1);
        let one = vec![GrassmannElement::one(2).unwrap()];
        let f = quadratic_form_matrix(&d, &QuadraticFormBasis::new(one, FormMode::Plain)).unwrap();
        assert!((f[(0, 0)] - 1.0).norm() < 1e-12);
    }

    #[test]
    fn generator_probes_reproduce_gamma() {
        let m = 3;
        let d = density(m, 2);
        let g = pdm1_from_density(&d).0;
        let fb = quadratic_form_matrix(
            &d,
            &QuadraticFormBasis::new(generator_probes(m, true), FormMode::Plain),
        )
        .unwrap();
        // ⟨ψ̄_k* ⋆ ψ̄_l⟩ = ⟨ψ_k ⋆ ψ̄_l⟩ = (1 − γ)[k,l] and ⟨ψ_k* ⋆ ψ_l⟩ = ⟨ψ̄_k ⋆ ψ_l⟩ = γ[l,k]
        let fu = quadratic_form_matrix(
            &d,
            &QuadraticFormBasis::new(generator_probes(m, false), FormMode::Plain),
        )
        .unwrap();
        let id = CMatrix::identity(m, m);
        assert!(max_abs_diff(&fu, &g.transpose()) < 1e-12);
        assert!(max_abs_diff(&fb, &(id - &g)) < 1e-12);
    }

    #[test]
    fn probe_counts() {
        assert_eq!(order_n_probes(3, 1).len(), 1 + 6);
        assert_eq!(order_n_probes(4, 2).len(), 1 + 8 + 6 + 6 + 16);
    }

    #[test]
    fn genuine_density_passes_orders() {
        let d = density(3, 5);
        assert!(order_n_check(&d, 1).unwrap().pass);
        assert!(order_n_check(&d, 2).unwrap().pass);
        assert!(matches!(
            order_n_check(&d, 3),
            Err(Error::UnsupportedOrder(3))
        ));
    }
}
