//! Reduced density matrices of Grassmann densities and necessary representability
//! conditions, each available as a closed-form matrix inequality in `(γ, Γ)` and as
//! positivity of a Grassmann quadratic form `⟨b_α* ⋆ b_β⟩_ϰ`.

mod density;
mod forms;
mod fuzz;
mod pqg;
mod t1;
mod t2;
mod tensor;

use serde::{Deserialize, Serialize};

pub use density::{pdm1_from_density, pdm2_from_density, GrassmannDensity};
pub use forms::{
    order_n_check, order_n_probes, quadratic_form_matrix, FormMode, QuadraticFormBasis,
};
pub use fuzz::{fuzz_conditions, trial_seed, FuzzOptions, FuzzSummary, FuzzTrial};
pub use pqg::{
    check_first_order, check_first_order_form, check_g, check_g_form, check_p, check_p_form,
    check_q, check_q_form, g_matrix, q_matrix,
};
pub use t1::{
    check_t1_closed, check_t1_full, t1_closed_matrix, t1_coordinates, t1_form_basis, t1_scalar,
};
pub use t2::{
    check_t2_closed, check_t2_full, t2_closed_matrix, t2_coordinates, t2_form_basis, t2_scalar,
    t2a_scalar,
};
pub use tensor::{T2Augmented, ThreeTensor};

use crate::linalg::{self, CMatrix};

/// Relative PSD tolerance: a condition passes when `margin ≥ −PSD_REL_TOL·(1 + scale)`.
pub const PSD_REL_TOL: f64 = 1e-9;

/// Inputs more non-Hermitian than this are rejected.
pub const HERMITIAN_INPUT_TOL: f64 = 1e-8;

pub fn psd_tolerance(scale: f64) -> f64 {
    PSD_REL_TOL * (1.0 + scale)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "closed-form")]
    ClosedForm,
    #[serde(rename = "grassmann-form")]
    GrassmannForm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::GrassmannForm => "grassmann-form",
        }
    }
}

/// Outcome of one condition. `margin` is the smallest eigenvalue found (`+∞` for an
/// empty form).
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub condition: String,
    pub margin: f64,
    pub pass: bool,
    pub tol: f64,
    pub method: Method,
}

impl ConditionReport {
    pub fn new(condition: impl Into<String>, margin: f64, tol: f64, method: Method) -> Self {
        ConditionReport {
            condition: condition.into(),
            margin,
            pass: margin >= -tol,
            tol,
            method,
        }
    }

    /// Min eigenvalue of `mat` with the default tolerance scaled by `mat`'s max-norm.
    pub(crate) fn from_matrix(condition: &str, mat: &CMatrix, method: Method) -> Self {
        let margin = linalg::min_eigenvalue(mat);
        ConditionReport::new(
            condition,
            margin,
            psd_tolerance(linalg::max_abs(mat)),
            method,
        )
    }

    /// Re-judges the report under a different tolerance.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.pass = self.margin >= -tol;
        self
    }
}
