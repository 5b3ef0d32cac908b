use nalgebra::DVector;
use num_complex::Complex64;

use super::forms::product_probe;
use super::pqg::validate;
use super::tensor::polarize;
use super::{
    quadratic_form_matrix, ConditionReport, FormMode, GrassmannDensity, Method, QuadraticFormBasis,
    T2Augmented, ThreeTensor,
};
use crate::error::{Error, Result};
use crate::fock::{OnePdm, TwoPdm};
use crate::linalg::{kron, vec_row_major, CMatrix};

const ANTISYMMETRY_TOL: f64 = 1e-10;

fn check_probe_m(m: usize, other: usize) -> Result<()> {
    if m != other {
        return Err(Error::ModeMismatch {
            left: m,
            right: other,
        });
    }
    Ok(())
}

/// Generalized T2 scalar
/// `Σ_q ⟨G_q, Γ G_q⟩ + 4 tr{Q₁Γ} + 2 tr{(Q₂ + Q₃)γ} + |a|²`, equal to `⟨{τ₂*, τ₂}⟩`.
///
/// With `[T_k]_ij = T_ijk`, `T^A_k = (T_k − T_kᵀ)/2` and `G_q = vec T_q`:
/// - `Q₁[(k,m),(n,j)] = (T̄^A_k T^A_n)[j,m]`
/// - `Q₂[i,j] = tr{T^A_i* T_j}`
/// - `Q₃[i,j] = Σ_q (T^A_i*)[j,q] a_q + [T^A_j]_{qi} ā_q`
///
/// The index order in `Q₃` is the one that reproduces the anticommutator expectation;
/// the alternative `[T^A_j]_{iq}` flips the sign of the `ā` part.
pub fn t2_scalar(g: &OnePdm, big: &TwoPdm, probe: &T2Augmented) -> Result<Complex64> {
    let m = validate(g, Some(big))?;
    check_probe_m(m, probe.m())?;
    Ok(t2_value(g, big, probe))
}

fn t2_value(g: &OnePdm, big: &TwoPdm, probe: &T2Augmented) -> Complex64 {
    let m = probe.m();
    let a = &probe.a;
    let tk: Vec<CMatrix> = (0..m).map(|k| probe.t.slice_last(k)).collect();
    let ta: Vec<CMatrix> = tk.iter().map(|t| (t - t.transpose()).scale(0.5)).collect();

    let mut acc = Complex64::new(0.0, 0.0);
    for t in &tk {
        let v = vec_row_major(t);
        acc += (v.adjoint() * &big.0 * &v)[(0, 0)];
    }

    let mut q1 = CMatrix::zeros(m * m, m * m);
    for k in 0..m {
        let conj_k = ta[k].map(|z| z.conj());
        for n in 0..m {
            let prod = &conj_k * &ta[n];
            for mm in 0..m {
                for j in 0..m {
                    q1[(k * m + mm, n * m + j)] = prod[(j, mm)];
                }
            }
        }
    }
    acc += (q1 * &big.0).trace() * 4.0;

    let mut q23 = CMatrix::zeros(m, m);
    for i in 0..m {
        let adj_i = ta[i].adjoint();
        for j in 0..m {
            let mut v = (&adj_i * &tk[j]).trace();
            for q in 0..m {
                v += adj_i[(j, q)] * a[q] + ta[j][(q, i)] * a[q].conj();
            }
            q23[(i, j)] = v;
        }
    }
    acc += (q23 * &g.0).trace() * 2.0;
    acc + a.norm_squared()
}

/// Reduced form for `a = 0` and `T_ijk = −T_jik`:
/// `Σ_q (⟨G_q, Γ G_q⟩ + 4 tr{(T̃_q* ⊗ T̃_q) Γ} + 2 tr{T̃_q* T̃_q γ})` with
/// `G_q = vec T_q`, `[T_q]_ij = T_ijq` and `[T̃_q]_ij = T_iqj`.
pub fn t2a_scalar(g: &OnePdm, big: &TwoPdm, t: &ThreeTensor) -> Result<Complex64> {
    let m = validate(g, Some(big))?;
    check_probe_m(m, t.m())?;
    let dev = t.pair_antisymmetry_deviation();
    if dev > ANTISYMMETRY_TOL * (1.0 + t.max_abs()) {
        return Err(Error::NotAntisymmetric(dev));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for q in 0..m {
        let gq = vec_row_major(&t.slice_last(q));
        let tt = t.slice_middle(q);
        acc += (gq.adjoint() * &big.0 * &gq)[(0, 0)];
        acc += (kron(&tt.adjoint(), &tt) * &big.0).trace() * 4.0;
        acc += (tt.adjoint() * &tt * &g.0).trace() * 2.0;
    }
    Ok(acc)
}

/// `((i, j), k)` with `i < j`, then the single indices; 1-based.
fn labels(m: usize) -> (Vec<(usize, usize, usize)>, usize) {
    let mut out = Vec::new();
    for i in 1..=m {
        for j in i + 1..=m {
            for k in 1..=m {
                out.push((i, j, k));
            }
        }
    }
    let n = out.len() + m;
    (out, n)
}

/// Probes `ψ̄_i ⋆ ψ̄_j ⋆ ψ_k` (`i < j`) followed by `ψ̄_i`, anticommutator mode.
pub fn t2_form_basis(m: usize) -> QuadraticFormBasis {
    let (triples, _) = labels(m);
    let mut elements: Vec<_> = triples
        .iter()
        .map(|&(i, j, k)| product_probe(m, &[i, j], &[k]))
        .collect();
    elements.extend((1..=m).map(|i| product_probe(m, &[i], &[])));
    QuadraticFormBasis::new(elements, FormMode::Anticommutator)
}

/// Coordinates on [`t2_form_basis`]: `x_{(i<j),k} = T_ijk − T_jik`, `x_i = a_i`.
/// Then `t2_scalar = x† F x`.
pub fn t2_coordinates(probe: &T2Augmented) -> DVector<Complex64> {
    let m = probe.m();
    let (triples, n) = labels(m);
    let mut x = DVector::zeros(n);
    for (c, &(i, j, k)) in triples.iter().enumerate() {
        x[c] = probe.t.get(i - 1, j - 1, k - 1) - probe.t.get(j - 1, i - 1, k - 1);
    }
    for i in 0..m {
        x[triples.len() + i] = probe.a[i];
    }
    x
}

fn probe_from_coordinates(m: usize, x: &DVector<Complex64>) -> T2Augmented {
    let (triples, _) = labels(m);
    let mut t = ThreeTensor::zeros(m);
    for (c, &(i, j, k)) in triples.iter().enumerate() {
        t.set(i - 1, j - 1, k - 1, x[c] * 0.5);
        t.set(j - 1, i - 1, k - 1, -x[c] * 0.5);
    }
    let a = DVector::from_fn(m, |i, _| x[triples.len() + i]);
    T2Augmented { t, a }
}

/// The generalized T2 form in `(γ, Γ)` alone on the coordinates of [`t2_coordinates`].
pub fn t2_closed_matrix(g: &OnePdm, big: &TwoPdm) -> Result<CMatrix> {
    let m = validate(g, Some(big))?;
    let (_, n) = labels(m);
    Ok(polarize(n, |x| {
        t2_value(g, big, &probe_from_coordinates(m, x))
    }))
}

pub fn check_t2_full(density: &GrassmannDensity) -> Result<ConditionReport> {
    let f = quadratic_form_matrix(density, &t2_form_basis(density.m()))?;
    Ok(ConditionReport::from_matrix(
        "T2",
        &f,
        Method::GrassmannForm,
    ))
}

pub fn check_t2_closed(g: &OnePdm, big: &TwoPdm) -> Result<ConditionReport> {
    let f = t2_closed_matrix(g, big)?;
    Ok(ConditionReport::from_matrix("T2", &f, Method::ClosedForm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::{pdm1_from_density, pdm2_from_density};
    use crate::fock::{random_density, DensityOptions};
    use crate::linalg::max_abs_diff;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(m: usize, seed: u64) -> (GrassmannDensity, OnePdm, TwoPdm) {
        let rho = random_density(m, seed, DensityOptions::default()).unwrap();
        let d = GrassmannDensity::from_rho(&rho).unwrap();
        let (g, big) = (pdm1_from_density(&d), pdm2_from_density(&d));
        (d, g, big)
    }

    #[test]
    fn scalar_equals_form_and_closed_matrix() {
        let m = 3;
        let (d, g, big) = setup(m, 2);
        let f = quadratic_form_matrix(&d, &t2_form_basis(m)).unwrap();
        assert!(max_abs_diff(&f, &t2_closed_matrix(&g, &big).unwrap()) < 1e-11);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let probe = T2Augmented::random(m, &mut rng);
            let x = t2_coordinates(&probe);
            let form = (x.adjoint() * &f * &x)[(0, 0)];
            let scalar = t2_scalar(&g, &big, &probe).unwrap();
            assert!(
                (form - scalar).norm() < 1e-10 * (1.0 + scalar.norm()),
                "{form} {scalar}"
            );
        }
    }

    #[test]
    fn t2a_matches_generalized() {
        let m = 3;
        let (_, g, big) = setup(m, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let raw = ThreeTensor::random(m, &mut rng);
        let t = ThreeTensor::from_fn(m, |i, j, k| (raw.get(i, j, k) - raw.get(j, i, k)) * 0.5);
        let probe = T2Augmented::new(t.clone(), DVector::zeros(m)).unwrap();
        let gen = t2_scalar(&g, &big, &probe).unwrap();
        let cor = t2a_scalar(&g, &big, &t).unwrap();
        assert!(
            (gen - cor).norm() < 1e-10 * (1.0 + gen.norm()),
            "{gen} {cor}"
        );
        assert!(matches!(
            t2a_scalar(&g, &big, &raw),
            Err(Error::NotAntisymmetric(_))
        ));
    }

    #[test]
    fn vector_only_probe_gives_norm() {
        let m = 3;
        let (_, g, big) = setup(m, 4);
        let a = DVector::from_fn(m, |i, _| Complex64::new(i as f64 + 1.0, -0.5));
        let probe = T2Augmented::new(ThreeTensor::zeros(m), a.clone()).unwrap();
        let v = t2_scalar(&g, &big, &probe).unwrap();
        assert!((v - a.norm_squared()).norm() < 1e-12);
    }
}
