use num_complex::Complex64;

use super::forms::{generator_probes, product_probe};
use super::{
    psd_tolerance, quadratic_form_matrix, ConditionReport, FormMode, GrassmannDensity, Method,
    QuadraticFormBasis, HERMITIAN_INPUT_TOL,
};
use crate::error::{Error, Result};
use crate::fock::{OnePdm, TwoPdm};
use crate::grassmann::GrassmannElement;
use crate::linalg::{self, exchange, kron, CMatrix};

pub(crate) fn validate(g: &OnePdm, big: Option<&TwoPdm>) -> Result<usize> {
    let m = g.0.nrows();
    if g.0.ncols() != m || m == 0 {
        return Err(Error::ShapeMismatch {
            expected: "square γ".into(),
            found: format!("{}x{}", g.0.nrows(), g.0.ncols()),
        });
    }
    let dev = linalg::hermitian_deviation(&g.0);
    if dev > HERMITIAN_INPUT_TOL {
        return Err(Error::NotHermitian(dev));
    }
    if let Some(big) = big {
        if big.0.shape() != (m * m, m * m) {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{}", m * m, m * m),
                found: format!("{}x{}", big.0.nrows(), big.0.ncols()),
            });
        }
        let dev = linalg::hermitian_deviation(&big.0);
        if dev > HERMITIAN_INPUT_TOL {
            return Err(Error::NotHermitian(dev));
        }
    }
    Ok(m)
}

/// `0 ≤ γ ≤ 1`: the margin is `min(λ_min(γ), λ_min(1 − γ))`.
pub fn check_first_order(g: &OnePdm) -> Result<ConditionReport> {
    let m = validate(g, None)?;
    let lower = linalg::min_eigenvalue(&g.0);
    let upper = linalg::min_eigenvalue(&(CMatrix::identity(m, m) - &g.0));
    Ok(ConditionReport::new(
        "first-order",
        lower.min(upper),
        psd_tolerance(linalg::max_abs(&g.0)),
        Method::ClosedForm,
    ))
}

/// First order through the forms over `{ψ_k}` (equal to `γᵀ`) and `{ψ̄_k}` (equal to `1 − γ`).
pub fn check_first_order_form(density: &GrassmannDensity) -> Result<ConditionReport> {
    let m = density.m();
    let mut margin = f64::INFINITY;
    let mut scale: f64 = 0.0;
    for barred in [false, true] {
        let basis = QuadraticFormBasis::new(generator_probes(m, barred), FormMode::Plain);
        let f = quadratic_form_matrix(density, &basis)?;
        margin = margin.min(linalg::min_eigenvalue(&f));
        scale = scale.max(linalg::max_abs(&f));
    }
    Ok(ConditionReport::new(
        "first-order",
        margin,
        psd_tolerance(scale),
        Method::GrassmannForm,
    ))
}

/// `Γ ≥ 0`
pub fn check_p(g: &OnePdm, big: &TwoPdm) -> Result<ConditionReport> {
    validate(g, Some(big))?;
    Ok(ConditionReport::from_matrix(
        "P",
        &big.0,
        Method::ClosedForm,
    ))
}

/// `Γ + (1 − Ex)(1⊗1 − γ⊗1 − 1⊗γ)`
pub fn q_matrix(g: &OnePdm, big: &TwoPdm) -> CMatrix {
    let m = g.m();
    let id = CMatrix::identity(m, m);
    let id2 = CMatrix::identity(m * m, m * m);
    let inner = &id2 - kron(&g.0, &id) - kron(&id, &g.0);
    &big.0 + (&id2 - exchange(m)) * inner
}

pub fn check_q(g: &OnePdm, big: &TwoPdm) -> Result<ConditionReport> {
    validate(g, Some(big))?;
    Ok(ConditionReport::from_matrix(
        "Q",
        &q_matrix(g, big),
        Method::ClosedForm,
    ))
}

/// Covariance form of the one-body operators `X_kl = c*_k c_l`:
/// `M[(k,l),(m,n)] = ⟨(X_kl − ⟨X_kl⟩)* (X_mn − ⟨X_mn⟩)⟩
///                 = δ_km γ[n,l] − Γ[(k,n),(m,l)] − γ[k,l] γ[n,m]`.
///
/// With `α_kl = ⟨e_k, A e_l⟩`, `α† M α = tr{(A*⊗A)(Γ + Ex(γ⊗1))} − |tr Aγ|²`.
pub fn g_matrix(g: &OnePdm, big: &TwoPdm) -> CMatrix {
    let m = g.m();
    let gm = &g.0;
    CMatrix::from_fn(m * m, m * m, |row, col| {
        let (k, l) = (row / m, row % m);
        let (mm, n) = (col / m, col % m);
        let delta = if k == mm {
            gm[(n, l)]
        } else {
            Complex64::new(0.0, 0.0)
        };
        delta - big.0[(k * m + n, mm * m + l)] - gm[(k, l)] * gm[(n, mm)]
    })
}

pub fn check_g(g: &OnePdm, big: &TwoPdm) -> Result<ConditionReport> {
    validate(g, Some(big))?;
    Ok(ConditionReport::from_matrix(
        "G",
        &g_matrix(g, big),
        Method::ClosedForm,
    ))
}

fn pair_probes(m: usize, bar_first: bool, bar_second: bool) -> Vec<GrassmannElement> {
    let mut out = Vec::with_capacity(m * m);
    for k in 1..=m {
        for l in 1..=m {
            let e = if k == l {
                GrassmannElement::zero(m).expect("m valid")
            } else {
                match (bar_first, bar_second) {
                    (true, true) => product_probe(m, &[k, l], &[]),
                    (false, false) => product_probe(m, &[], &[k, l]),
                    (true, false) => product_probe(m, &[k], &[l]),
                    _ => unreachable!(),
                }
            };
            out.push(e);
        }
    }
    out
}

/// P through the form over `ψ_k ⋆ ψ_l` (all ordered pairs); the form equals `Γ̄`.
pub fn check_p_form(density: &GrassmannDensity) -> Result<ConditionReport> {
    let f = pair_probe_matrix(density, false)?;
    Ok(ConditionReport::from_matrix("P", &f, Method::GrassmannForm))
}

/// Q through the form over `ψ̄_k ⋆ ψ̄_l`; the form equals the Q matrix entrywise.
pub fn check_q_form(density: &GrassmannDensity) -> Result<ConditionReport> {
    let f = pair_probe_matrix(density, true)?;
    Ok(ConditionReport::from_matrix("Q", &f, Method::GrassmannForm))
}

/// G through the form over `ψ̄_k ⋆ ψ_l − ⟨ψ̄_k ⋆ ψ_l⟩_ϰ`; equals [`g_matrix`] entrywise.
pub fn check_g_form(density: &GrassmannDensity) -> Result<ConditionReport> {
    let m = density.m();
    let one = GrassmannElement::one(m)?;
    let mut probes = Vec::with_capacity(m * m);
    for k in 1..=m {
        for l in 1..=m {
            let x = product_probe(m, &[k], &[l]);
            let mean = density.expect(&x)?;
            probes.push(&x - &one.scale(mean));
        }
    }
    let f = quadratic_form_matrix(density, &QuadraticFormBasis::new(probes, FormMode::Plain))?;
    Ok(ConditionReport::from_matrix("G", &f, Method::GrassmannForm))
}

/// Plain form over `ψ̄_k ⋆ ψ̄_l` (`bar`) or `ψ_k ⋆ ψ_l`, all ordered pairs.
fn pair_probe_matrix(density: &GrassmannDensity, bar: bool) -> Result<CMatrix> {
    let basis = QuadraticFormBasis::new(pair_probes(density.m(), bar, bar), FormMode::Plain);
    quadratic_form_matrix(density, &basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::{pdm1_from_density, pdm2_from_density};
    use crate::fock::{pdms_from_rho, random_density, slater_density, DensityOptions};
    use crate::linalg::max_abs_diff;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn slater_passes_all() {
        let rho = slater_density(&CMatrix::identity(4, 2)).unwrap();
        let (g, big) = pdms_from_rho(&rho);
        for r in [check_p(&g, &big), check_q(&g, &big), check_g(&g, &big)] {
            let r = r.unwrap();
            assert!(r.margin >= -1e-10, "{r:?}");
        }
    }

    #[test]
    fn half_filled_gamma_zero_gamma2() {
        let m = 2;
        let g = OnePdm(CMatrix::identity(m, m).scale(0.5));
        let big = TwoPdm(CMatrix::zeros(4, 4));
        let p = check_p(&g, &big).unwrap();
        assert!(p.pass && p.margin.abs() < 1e-15);
        // (1 − Ex)(1⊗1 − γ⊗1 − 1⊗γ) = 0 at γ = ½: every eigenvalue vanishes.
        let q = check_q(&g, &big).unwrap();
        assert!(q.margin.abs() < 1e-15);
        let qm = q_matrix(&g, &big);
        assert!(linalg::max_abs(&qm) < 1e-15);
    }

    #[test]
    fn injected_negative_eigenvalue_fails_p() {
        let rho = random_density(3, 2, DensityOptions::default()).unwrap();
        let (g, mut big) = pdms_from_rho(&rho);
        let (vals, vecs) = linalg::eigh(&big.0);
        let v = vecs.column(vals.len() - 1).into_owned();
        big.0 -= (&v * v.adjoint()).scale(vals[vals.len() - 1] + 0.1);
        let r = check_p(&g, &big).unwrap();
        assert!(!r.pass);
        assert!((r.margin + 0.1).abs() < 1e-10);
    }

    #[test]
    fn g_matrix_contracts_to_operator_inequality() {
        let m = 3;
        let rho = random_density(m, 8, DensityOptions::default()).unwrap();
        let (g, big) = pdms_from_rho(&rho);
        let mm = g_matrix(&g, &big);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for probe in [
            CMatrix::identity(m, m),
            linalg::complex_gaussian(m, m, &mut rng),
        ] {
            let alpha = linalg::vec_row_major(&probe);
            let lhs = (alpha.adjoint() * &mm * &alpha)[(0, 0)];
            let id = CMatrix::identity(m, m);
            let rhs = (kron(&probe.adjoint(), &probe) * (&big.0 + exchange(m) * kron(&g.0, &id)))
                .trace()
                - (&probe * &g.0).trace().norm_sqr();
            assert!((lhs - rhs).norm() < 1e-10, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn form_paths_match_closed() {
        let m = 3;
        let rho = random_density(m, 17, DensityOptions::default()).unwrap();
        let d = GrassmannDensity::from_rho(&rho).unwrap();
        let g = pdm1_from_density(&d);
        let big = pdm2_from_density(&d);
        let fq = pair_probe_matrix(&d, true).unwrap();
        assert!(max_abs_diff(&fq, &q_matrix(&g, &big)) < 1e-12);
        let fp = pair_probe_matrix(&d, false).unwrap();
        assert!(max_abs_diff(&fp, &big.0.map(|z| z.conj())) < 1e-12);
        for (closed, form) in [
            (check_p(&g, &big), check_p_form(&d)),
            (check_q(&g, &big), check_q_form(&d)),
            (check_g(&g, &big), check_g_form(&d)),
        ] {
            let (c, f) = (closed.unwrap(), form.unwrap());
            assert!((c.margin - f.margin).abs() < 1e-10, "{c:?} {f:?}");
            assert!(c.pass && f.pass);
        }
    }
}
