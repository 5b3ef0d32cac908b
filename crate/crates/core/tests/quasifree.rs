use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use grdm_core::conditions::{pdm1_from_density, pdm2_from_density, GrassmannDensity};
use grdm_core::fock::{pdms_from_rho, random_density, theta_inverse, DensityOptions, OnePdm};
use grdm_core::grassmann::{change_generators, star, GrassmannElement, Monomial};
use grdm_core::linalg::{eigh, exchange, kron, max_abs_diff, random_unitary, CMatrix};
use grdm_core::quasifree::{
    build_quasifree, kappa_mu_expansion, verify_quasifree, wick_expectation, GeneratorWord,
    ModeOccupation, QuasifreeSpec,
};
use grdm_core::Error;

fn diag(v: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(
        v.len(),
        v.iter().map(|&x| Complex64::new(x, 0.0)),
    ))
}

fn random_gamma(m: usize, rng: &mut ChaCha8Rng) -> (CMatrix, Vec<f64>, OnePdm) {
    let u = random_unitary(m, rng);
    let lam: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..0.95)).collect();
    let g = OnePdm(&u * diag(&lam) * u.adjoint());
    (u, lam, g)
}

#[test]
fn maximally_mixed() {
    let (spec, d) = build_quasifree(&OnePdm(diag(&[0.5, 0.5]))).unwrap();
    assert!(spec
        .modes
        .iter()
        .all(|m| *m == ModeOccupation::Interior { q: 0.0 }));
    let rho = theta_inverse(d.element()).unwrap();
    assert!(max_abs_diff(&rho.mat, &CMatrix::identity(4, 4).scale(0.25)) < 1e-15);
}

#[test]
fn q_matches_lambda() {
    let spec = QuasifreeSpec::from_gamma(&OnePdm(diag(&[0.1, 0.5, 0.8, 0.0, 1.0]))).unwrap();
    for (lam, q) in spec.lambdas.iter().zip(spec.qs()) {
        match q {
            Some(q) => assert!((1.0 / (1.0 + q.exp()) - lam).abs() < 1e-15),
            None => assert!(*lam == 0.0 || *lam == 1.0),
        }
    }
    assert!(matches!(
        QuasifreeSpec::from_gamma(&OnePdm(diag(&[-0.01]))),
        Err(Error::SpectrumOutOfRange(_))
    ));
}

#[test]
fn wick_examples() {
    let spec = QuasifreeSpec::from_gamma(&OnePdm(diag(&[0.25, 0.6]))).unwrap();
    let w = |letters: &[(usize, bool)]| wick_expectation(&spec, &GeneratorWord(letters.to_vec()));
    assert!((w(&[(1, true), (1, false)]).unwrap() - 0.25).norm() < 1e-15);
    assert!((w(&[(1, true), (1, false), (2, true), (2, false)]).unwrap() - 0.15).norm() < 1e-15);
    assert_eq!(w(&[(1, false)]).unwrap(), Complex64::new(0.0, 0.0));
    assert!(w(&[(1, true), (4, false)]).is_err());

    // brute force against the density at m = 2
    let (spec, d) = build_quasifree(&OnePdm(diag(&[0.25, 0.6]))).unwrap();
    let word = GeneratorWord(vec![(1, true), (1, false), (2, true), (2, false)]);
    let direct = d.expect(&word.to_element(2).unwrap()).unwrap();
    assert!((direct - wick_expectation(&spec, &word).unwrap()).norm() < 1e-14);
}

#[test]
fn recovery_for_random_gammas() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for t in 0..50 {
        let m = 1 + t % 4;
        let (_, _, g) = random_gamma(m, &mut rng);
        let (_, d) = build_quasifree(&g).unwrap();
        assert!(max_abs_diff(&pdm1_from_density(&d).0, &g.0) <= 1e-9);
    }
}

#[test]
fn wick_up_to_six_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..3 {
        let (_, _, g) = random_gamma(3, &mut rng);
        let (spec, d) = build_quasifree(&g).unwrap();
        assert!(verify_quasifree(&d, &spec, 6).unwrap() <= 1e-9);
    }
}

#[test]
fn generic_states_violate_factorization() {
    // number conserving, so two-point words agree and only higher ones can differ
    let rho = random_density(4, 5, DensityOptions { sector: Some(2) }).unwrap();
    let (g, _) = pdms_from_rho(&rho);
    let (spec, _) = build_quasifree(&g).unwrap();
    let d = GrassmannDensity::from_rho(&rho).unwrap();
    assert!(verify_quasifree(&d, &spec, 2).unwrap() < 1e-12);
    assert!(verify_quasifree(&d, &spec, 4).unwrap() > 1e-3);
}

#[test]
fn pull_through() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (_, _, g) = random_gamma(3, &mut rng);
    let (spec, d) = build_quasifree(&g).unwrap();
    for (i, q) in spec.qs().into_iter().enumerate() {
        let q = q.unwrap();
        // the eigenmode generators in the original coordinates
        let mut phibar = GrassmannElement::zero(3).unwrap();
        let mut phi = GrassmannElement::zero(3).unwrap();
        for j in 0..3 {
            phibar.add_term(Monomial::psibar(j + 1), spec.u[(j, i)]);
            phi.add_term(Monomial::psi(j + 1), spec.u[(j, i)].conj());
        }
        let lhs = star(&phibar, d.element()).unwrap();
        let rhs = star(d.element(), &phibar)
            .unwrap()
            .scale(Complex64::new(q.exp(), 0.0));
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        let lhs = star(d.element(), &phi).unwrap();
        let rhs = star(&phi, d.element())
            .unwrap()
            .scale(Complex64::new(q.exp(), 0.0));
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }
}

#[test]
fn two_pdm_in_the_eigenbasis() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (_, _, g) = random_gamma(3, &mut rng);
    let (spec, d) = build_quasifree(&g).unwrap();
    let big = pdm2_from_density(&d).0;
    let gg = kron(&spec.gamma, &spec.gamma);
    // Wick: Γ = (1 − Ex)(γ ⊗ γ)
    assert!(max_abs_diff(&big, &(&gg - exchange(3) * &gg)) < 1e-12);
    let uu = kron(&spec.u, &spec.u);
    let rot = uu.adjoint() * &big * &uu;
    for k in 0..3 {
        for l in 0..3 {
            if k != l {
                let expected = spec.lambdas[k] * spec.lambdas[l];
                assert!((rot[(k * 3 + l, k * 3 + l)] - expected).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn boundary_spectrum_is_a_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let lam = [1.0, 0.35, 0.0, 0.7];
    let u = random_unitary(4, &mut rng);
    let (spec, d) = build_quasifree(&OnePdm(&u * diag(&lam) * u.adjoint())).unwrap();
    assert_eq!(
        spec.modes
            .iter()
            .filter(|m| matches!(m, ModeOccupation::Interior { .. }))
            .count(),
        2
    );
    let (vals, _) = eigh(&theta_inverse(d.element()).unwrap().mat);
    let mut spec_lam = spec.lambdas.clone();
    spec_lam.sort_by(f64::total_cmp);
    let mut expected: Vec<f64> = (0..16usize)
        .map(|n| {
            (0..4)
                .map(|i| {
                    if n >> i & 1 == 1 {
                        spec_lam[i]
                    } else {
                        1.0 - spec_lam[i]
                    }
                })
                .product()
        })
        .collect();
    expected.sort_by(f64::total_cmp);
    for (v, e) in vals.iter().zip(&expected) {
        assert!((v - e).abs() < 1e-12, "{vals:?} {expected:?}");
    }
}

#[test]
fn covariance_under_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (_, _, g) = random_gamma(3, &mut rng);
    let (_, d) = build_quasifree(&g).unwrap();
    let w = random_unitary(3, &mut rng);
    let moved = change_generators(d.element(), &w).unwrap();
    let (_, direct) = build_quasifree(&OnePdm(w.adjoint() * &g.0 * &w)).unwrap();
    assert!(moved.max_abs_diff(direct.element()) < 1e-12);
}

#[test]
fn kappa_expansion_examples() {
    assert_eq!(
        kappa_mu_expansion(&[0.0, 0.0, 0.0]).unwrap(),
        GrassmannElement::one(3).unwrap()
    );
    let e = kappa_mu_expansion(&[0.7]).unwrap();
    assert_eq!(e.len(), 2);
    assert_eq!(
        e.coeff(Monomial::from_indices(&[1], &[1], 1).unwrap()),
        Complex64::new(0.7, 0.0)
    );
    // |Q| = 2 picks up (−1)^{s_Q} = −1
    let e = kappa_mu_expansion(&[2.0, 3.0]).unwrap();
    assert_eq!(
        e.coeff(Monomial::from_indices(&[1, 2], &[1, 2], 2).unwrap()),
        Complex64::new(-6.0, 0.0)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn kappa_expansion_is_the_star_product(r in proptest::collection::vec(-3.0f64..3.0, 1..=3)) {
        let m = r.len();
        let mut acc = GrassmannElement::one(m).unwrap();
        for (i, &ri) in r.iter().enumerate() {
            let mut f = GrassmannElement::one(m).unwrap();
            f.add_term(Monomial::from_indices(&[i + 1], &[i + 1], m).unwrap(), Complex64::new(ri, 0.0));
            acc = star(&acc, &f).unwrap();
        }
        prop_assert!(acc.max_abs_diff(&kappa_mu_expansion(&r).unwrap()) <= 1e-12);
    }

    #[test]
    fn recovery_with_degenerate_spectra(seed in any::<u64>(), lam in 0.05f64..0.95) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(3, &mut rng);
        let g = OnePdm(&u * diag(&[lam, lam, 1.0 - lam]) * u.adjoint());
        let (spec, d) = build_quasifree(&g).unwrap();
        prop_assert!(max_abs_diff(&pdm1_from_density(&d).0, &g.0) <= 1e-9);
        prop_assert!(verify_quasifree(&d, &spec, 4).unwrap() <= 1e-9);
    }
}
