//! Python bindings. Matrices cross the boundary as nested lists of complex numbers;
//! Grassmann elements are wrapped in [`Element`].

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use grdm_core::conditions::{
    check_first_order, check_first_order_form, check_g, check_g_form, check_p, check_p_form,
    check_q, check_q_form, check_t1_closed, check_t1_full, check_t2_closed, check_t2_full,
    fuzz_conditions, pdm1_from_density, pdm2_from_density, ConditionReport, FuzzOptions,
    GrassmannDensity,
};
use grdm_core::fock::{self, DensityMatrix, DensityOptions, FockOperator, OnePdm, TwoPdm};
use grdm_core::grassmann::{self, DerivativeSide};
use grdm_core::io::ElementJson;
use grdm_core::linalg::CMatrix;
use grdm_core::{quasifree, selftest, GrassmannElement, Monomial};

type Rows = Vec<Vec<Complex64>>;

fn err(e: grdm_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: &Rows) -> PyResult<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn to_rows(mat: &CMatrix) -> Rows {
    mat.row_iter()
        .map(|r| r.iter().copied().collect())
        .collect()
}

fn modes_for_dim(dim: usize) -> PyResult<usize> {
    if dim.is_power_of_two() && dim > 1 {
        Ok(dim.trailing_zeros() as usize)
    } else {
        Err(PyValueError::new_err(format!(
            "operator dimension {dim} is not 2^m"
        )))
    }
}

fn operator(rows: &Rows) -> PyResult<FockOperator> {
    let mat = to_matrix(rows)?;
    FockOperator::new(modes_for_dim(mat.nrows())?, mat).map_err(err)
}

fn density_matrix(rows: &Rows) -> PyResult<DensityMatrix> {
    DensityMatrix::new(operator(rows)?).map_err(err)
}

fn report_dict<'py>(py: Python<'py>, r: &ConditionReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("condition", &r.condition)?;
    d.set_item("margin", r.margin)?;
    d.set_item("pass", r.pass)?;
    d.set_item("tol", r.tol)?;
    d.set_item("method", r.method.as_str())?;
    Ok(d)
}

/// Element of the Grassmann algebra on `m` generator pairs.
#[pyclass(name = "Element", module = "grdm", frozen)]
pub struct Element(GrassmannElement);

#[pymethods]
impl Element {
    /// `terms` is a list of `(barred, unbarred, coefficient)` with 1-based indices.
    #[new]
    #[pyo3(signature = (m, terms = Vec::new()))]
    fn new(m: usize, terms: Vec<(Vec<usize>, Vec<usize>, Complex64)>) -> PyResult<Self> {
        let mut e = GrassmannElement::zero(m).map_err(err)?;
        for (bar, unbar, c) in terms {
            e.add_term(Monomial::from_indices(&bar, &unbar, m).map_err(err)?, c);
        }
        Ok(Element(e))
    }

    #[staticmethod]
    fn one(m: usize) -> PyResult<Self> {
        GrassmannElement::one(m).map(Element).map_err(err)
    }

    #[staticmethod]
    fn zero(m: usize) -> PyResult<Self> {
        GrassmannElement::zero(m).map(Element).map_err(err)
    }

    /// `ψ̄_i` when `barred`, else `ψ_i`.
    #[staticmethod]
    #[pyo3(signature = (m, i, barred = false))]
    fn generator(m: usize, i: usize, barred: bool) -> PyResult<Self> {
        GrassmannElement::generator(m, i, barred)
            .map(Element)
            .map_err(err)
    }

    /// Dense element with Gaussian coefficients.
    #[staticmethod]
    #[pyo3(signature = (m, seed = 0))]
    fn random(m: usize, seed: u64) -> PyResult<Self> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        GrassmannElement::random(m, &mut rng)
            .map(Element)
            .map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let parsed: ElementJson =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        parsed.to_element().map(Element).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&ElementJson::from(&self.0))
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn terms(&self) -> Vec<(Vec<usize>, Vec<usize>, Complex64)> {
        self.0
            .terms()
            .map(|(mono, c)| (mono.bar.to_vec(), mono.unbar.to_vec(), *c))
            .collect()
    }

    fn coeff(&self, bar: Vec<usize>, unbar: Vec<usize>) -> PyResult<Complex64> {
        let mono = Monomial::from_indices(&bar, &unbar, self.0.m()).map_err(err)?;
        Ok(self.0.coeff(mono))
    }

    fn star(&self, other: &Element) -> PyResult<Self> {
        grassmann::star(&self.0, &other.0).map(Element).map_err(err)
    }

    fn wedge(&self, other: &Element) -> PyResult<Self> {
        self.0.wedge(&other.0).map(Element).map_err(err)
    }

    fn __mul__(&self, other: &Element) -> PyResult<Self> {
        self.star(other)
    }

    fn __add__(&self, other: &Element) -> PyResult<Self> {
        self.0.checked_add(&other.0).map(Element).map_err(err)
    }

    fn __sub__(&self, other: &Element) -> PyResult<Self> {
        let neg = other.0.scale(Complex64::new(-1.0, 0.0));
        self.0.checked_add(&neg).map(Element).map_err(err)
    }

    fn __neg__(&self) -> Self {
        Element(self.0.scale(Complex64::new(-1.0, 0.0)))
    }

    fn scale(&self, c: Complex64) -> Self {
        Element(self.0.scale(c))
    }

    fn involution(&self) -> Self {
        Element(self.0.involution())
    }

    fn trace_integral(&self) -> Complex64 {
        grassmann::trace_integral(&self.0)
    }

    /// Applies the linear change of generators given by the unitary `u`.
    fn change_generators(&self, u: Rows) -> PyResult<Self> {
        grassmann::change_generators(&self.0, &to_matrix(&u)?)
            .map(Element)
            .map_err(err)
    }

    fn max_abs_diff(&self, other: &Element) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    fn __repr__(&self) -> String {
        format!("Element(m={}, terms={})", self.0.m(), self.0.len())
    }
}

#[pyfunction]
fn star(a: &Element, b: &Element) -> PyResult<Element> {
    a.star(b)
}

#[pyfunction]
fn trace_integral(a: &Element) -> Complex64 {
    a.trace_integral()
}

/// Grassmann image of a `2^m × 2^m` Fock operator.
#[pyfunction]
fn theta(op: Rows) -> PyResult<Element> {
    fock::theta(&operator(&op)?).map(Element).map_err(err)
}

#[pyfunction]
fn theta_inverse(a: &Element) -> PyResult<Rows> {
    fock::theta_inverse(&a.0)
        .map(|op| to_rows(&op.mat))
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (m, seed = 0, sector = None))]
fn random_density(m: usize, seed: u64, sector: Option<usize>) -> PyResult<Rows> {
    fock::random_density(m, seed, DensityOptions { sector })
        .map(|rho| to_rows(rho.mat()))
        .map_err(err)
}

/// `(γ, Γ)` of a Fock-space density matrix.
#[pyfunction]
fn pdms_from_rho(rho: Rows) -> PyResult<(Rows, Rows)> {
    let (g, big) = fock::pdms_from_rho(&density_matrix(&rho)?);
    Ok((to_rows(&g.0), to_rows(&big.0)))
}

/// `(γ, Γ)` of a normalized Grassmann density.
#[pyfunction]
fn density_pdms(a: &Element) -> PyResult<(Rows, Rows)> {
    let d = GrassmannDensity::new(a.0.clone()).map_err(err)?;
    Ok((
        to_rows(&pdm1_from_density(&d).0),
        to_rows(&pdm2_from_density(&d).0),
    ))
}

/// Closed-form conditions on `γ` and, when given, `Γ`.
#[pyfunction]
#[pyo3(signature = (gamma, big_gamma = None))]
fn check_pdms<'py>(
    py: Python<'py>,
    gamma: Rows,
    big_gamma: Option<Rows>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let g = OnePdm(to_matrix(&gamma)?);
    let mut reports = vec![check_first_order(&g).map_err(err)?];
    if let Some(big) = big_gamma {
        let big = TwoPdm(to_matrix(&big)?);
        for check in [check_p, check_q, check_g, check_t1_closed, check_t2_closed] {
            reports.push(check(&g, &big).map_err(err)?);
        }
    }
    reports.iter().map(|r| report_dict(py, r)).collect()
}

/// Grassmann quadratic-form conditions on a density element.
#[pyfunction]
fn check_density<'py>(py: Python<'py>, a: &Element) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let d = GrassmannDensity::new(a.0.clone()).map_err(err)?;
    let checks = [
        check_first_order_form,
        check_p_form,
        check_q_form,
        check_g_form,
        check_t1_full,
        check_t2_full,
    ];
    checks
        .iter()
        .map(|check| report_dict(py, &check(&d).map_err(err)?))
        .collect()
}

/// Quasifree density with 1-pdm `gamma`.
#[pyfunction]
fn build_quasifree(gamma: Rows) -> PyResult<Element> {
    let (_, d) = quasifree::build_quasifree(&OnePdm(to_matrix(&gamma)?)).map_err(err)?;
    Ok(Element(d.into_element()))
}

/// Largest deviation of `a`'s n-point functions (n ≤ `max_points`) from Wick's rule for `gamma`.
#[pyfunction]
#[pyo3(signature = (a, gamma, max_points = 6))]
fn verify_quasifree(a: &Element, gamma: Rows, max_points: usize) -> PyResult<f64> {
    let spec = quasifree::QuasifreeSpec::from_gamma(&OnePdm(to_matrix(&gamma)?)).map_err(err)?;
    let d = GrassmannDensity::new(a.0.clone()).map_err(err)?;
    quasifree::verify_quasifree(&d, &spec, max_points).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (m, trials, seed = 0, sector = None, skip_third_order = false))]
fn fuzz<'py>(
    py: Python<'py>,
    m: usize,
    trials: usize,
    seed: u64,
    sector: Option<usize>,
    skip_third_order: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let options = FuzzOptions {
        sector,
        skip_third_order,
    };
    let s = py
        .detach(|| fuzz_conditions(m, trials, seed, options))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("m", s.m)?;
    d.set_item("trials", s.trials)?;
    d.set_item("seed", seed)?;
    d.set_item("failures", s.failures)?;
    d.set_item("worst_margin", s.worst_margin.clone())?;
    d.set_item("max_pdm_dev", s.max_pdm_dev)?;
    d.set_item("max_closed_form_gap", s.max_closed_form_gap)?;
    d.set_item("max_contraction_dev", s.max_contraction_dev)?;
    Ok(d)
}

/// Algebraic identities at `m = 1..=m`; `flip_sign` uses right derivatives instead.
#[pyfunction]
#[pyo3(signature = (m = 4, seed = 0, flip_sign = false))]
fn run_selftest(
    py: Python<'_>,
    m: usize,
    seed: u64,
    flip_sign: bool,
) -> PyResult<Vec<(String, usize, bool, f64)>> {
    let side = if flip_sign {
        DerivativeSide::Right
    } else {
        DerivativeSide::Left
    };
    let results = py
        .detach(|| selftest::run_selftest(side, m, seed))
        .map_err(err)?;
    Ok(results
        .into_iter()
        .map(|r| (r.name.to_string(), r.m, r.passed, r.max_dev))
        .collect())
}

#[pymodule]
fn grdm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Element>()?;
    m.add_function(wrap_pyfunction!(star, m)?)?;
    m.add_function(wrap_pyfunction!(trace_integral, m)?)?;
    m.add_function(wrap_pyfunction!(theta, m)?)?;
    m.add_function(wrap_pyfunction!(theta_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(random_density, m)?)?;
    m.add_function(wrap_pyfunction!(pdms_from_rho, m)?)?;
    m.add_function(wrap_pyfunction!(density_pdms, m)?)?;
    m.add_function(wrap_pyfunction!(check_pdms, m)?)?;
    m.add_function(wrap_pyfunction!(check_density, m)?)?;
    m.add_function(wrap_pyfunction!(build_quasifree, m)?)?;
    m.add_function(wrap_pyfunction!(verify_quasifree, m)?)?;
    m.add_function(wrap_pyfunction!(fuzz, m)?)?;
    m.add_function(wrap_pyfunction!(run_selftest, m)?)?;
    Ok(())
}
