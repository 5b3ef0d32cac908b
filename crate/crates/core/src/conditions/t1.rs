use nalgebra::DVector;
use num_complex::Complex64;

use super::forms::product_probe;
use super::pqg::validate;
use super::tensor::polarize;
use super::{
    psd_tolerance, quadratic_form_matrix, ConditionReport, FormMode, GrassmannDensity, Method,
    QuadraticFormBasis, ThreeTensor,
};
use crate::error::{Error, Result};
use crate::fock::{OnePdm, TwoPdm};
use crate::grassmann::GrassmannElement;
use crate::linalg::{vec_row_major, CMatrix};

const ANTISYMMETRY_TOL: f64 = 1e-10;

/// `Σ_q (2 tr{T_q* T_q} − 6 tr{T_q* T_q γ} + 3 ⟨F_q, Γ F_q⟩)` with `[T_q]_kn = T_kqn`
/// and `F_q = T̄_q` flattened as `k·m + n`. Equals `⟨{τ*, τ}⟩ / 3` for
/// `τ = Σ T_ijk ψ_i ⋆ ψ_j ⋆ ψ_k`.
pub fn t1_scalar(g: &OnePdm, big: &TwoPdm, t: &ThreeTensor) -> Result<Complex64> {
    let m = validate(g, Some(big))?;
    if t.m() != m {
        return Err(Error::ModeMismatch {
            left: m,
            right: t.m(),
        });
    }
    let dev = t.antisymmetry_deviation();
    if dev > ANTISYMMETRY_TOL * (1.0 + t.max_abs()) {
        return Err(Error::NotAntisymmetric(dev));
    }
    Ok(t1_value(g, big, t))
}

fn t1_value(g: &OnePdm, big: &TwoPdm, t: &ThreeTensor) -> Complex64 {
    let m = t.m();
    let mut acc = Complex64::new(0.0, 0.0);
    for q in 0..m {
        let tq = t.slice_middle(q);
        let sq = tq.adjoint() * &tq;
        let f = vec_row_major(&tq).map(|z| z.conj());
        acc += sq.trace() * 2.0 - (&sq * &g.0).trace() * 6.0
            + (f.adjoint() * &big.0 * &f)[(0, 0)] * 3.0;
    }
    acc
}

/// Strictly increasing triples `i < j < k` (1-based).
fn triples(m: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for i in 1..=m {
        for j in i + 1..=m {
            for k in j + 1..=m {
                out.push([i, j, k]);
            }
        }
    }
    out
}

/// Probes `ψ_i ⋆ ψ_j ⋆ ψ_k`, `i < j < k`.
pub fn t1_form_basis(m: usize) -> QuadraticFormBasis {
    let elements: Vec<GrassmannElement> = triples(m)
        .iter()
        .map(|ijk| product_probe(m, &[], ijk))
        .collect();
    QuadraticFormBasis::new(elements, FormMode::Anticommutator)
}

/// Coordinates of `τ` on [`t1_form_basis`]: `x_{ijk} = 6 T_ijk` (each ordered triple
/// collects its six permutations). Then `t1_scalar = x† F x / 3`.
pub fn t1_coordinates(t: &ThreeTensor) -> DVector<Complex64> {
    let tr = triples(t.m());
    DVector::from_iterator(
        tr.len(),
        tr.iter().map(|[i, j, k]| t.get(i - 1, j - 1, k - 1) * 6.0),
    )
}

fn tensor_from_coordinates(m: usize, x: &DVector<Complex64>) -> ThreeTensor {
    let mut t = ThreeTensor::zeros(m);
    for (c, [i, j, k]) in triples(m).into_iter().enumerate() {
        let v = x[c] / 6.0;
        let (i, j, k) = (i - 1, j - 1, k - 1);
        for (a, b, cc, s) in [
            (i, j, k, 1.0),
            (j, k, i, 1.0),
            (k, i, j, 1.0),
            (j, i, k, -1.0),
            (i, k, j, -1.0),
            (k, j, i, -1.0),
        ] {
            t.set(a, b, cc, v * s);
        }
    }
    t
}

/// The T1 anticommutator form in `(γ, Γ)` alone, on the coordinates of
/// [`t1_coordinates`]; agrees entrywise with the Grassmann form.
pub fn t1_closed_matrix(g: &OnePdm, big: &TwoPdm) -> Result<CMatrix> {
    let m = validate(g, Some(big))?;
    let n = triples(m).len();
    Ok(polarize(n, |x| {
        t1_value(g, big, &tensor_from_coordinates(m, x)) * 3.0
    }))
}

fn empty_report(method: Method) -> ConditionReport {
    ConditionReport::new("T1", f64::INFINITY, psd_tolerance(0.0), method)
}

/// T1 through the Grassmann anticommutator form. For `m < 3` the form is empty and the
/// report carries margin `+∞`.
pub fn check_t1_full(density: &GrassmannDensity) -> Result<ConditionReport> {
    let basis = t1_form_basis(density.m());
    if basis.is_empty() {
        return Ok(empty_report(Method::GrassmannForm));
    }
    let f = quadratic_form_matrix(density, &basis)?;
    Ok(ConditionReport::from_matrix(
        "T1",
        &f,
        Method::GrassmannForm,
    ))
}

pub fn check_t1_closed(g: &OnePdm, big: &TwoPdm) -> Result<ConditionReport> {
    let f = t1_closed_matrix(g, big)?;
    if f.nrows() == 0 {
        return Ok(empty_report(Method::ClosedForm));
    }
    Ok(ConditionReport::from_matrix("T1", &f, Method::ClosedForm))
}
