//! JSON artifacts. Generator indices are 1-based throughout; matrices are stored as
//! separate real and imaginary row lists, and `Γ` rows/columns use `(k, l) ↦ k·m + l`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::conditions::{ConditionReport, FuzzSummary, Method};
use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, FockOperator, OnePdm, TwoPdm};
use crate::grassmann::{GrassmannElement, Monomial};
use crate::linalg::CMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub m: usize,
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn new(kind: Option<&str>, m: usize, mat: &CMatrix) -> Self {
        let rows = |f: fn(&Complex64) -> f64| {
            (0..mat.nrows())
                .map(|r| (0..mat.ncols()).map(|c| f(&mat[(r, c)])).collect())
                .collect()
        };
        MatrixJson {
            kind: kind.map(str::to_owned),
            m,
            dim: mat.nrows(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn gamma(g: &OnePdm) -> Self {
        MatrixJson::new(Some("gamma"), g.m(), &g.0)
    }

    pub fn big_gamma(big: &TwoPdm) -> Self {
        MatrixJson::new(Some("Gamma"), big.m(), &big.0)
    }

    pub fn operator(op: &FockOperator) -> Self {
        MatrixJson::new(None, op.m, &op.mat)
    }

    /// Expected dimension for this record's kind.
    fn expected_dim(&self) -> usize {
        match self.kind.as_deref() {
            Some("gamma") => self.m,
            Some("Gamma") => self.m * self.m,
            _ => 1usize.checked_shl(self.m as u32).unwrap_or(0),
        }
    }

    /// Dense matrix after checking `dim` against `m` and the row lengths against `dim`.
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let dim = self.expected_dim();
        if self.dim != dim {
            return Err(Error::ShapeMismatch {
                expected: format!("dim = {dim} for m = {}", self.m),
                found: format!("dim = {}", self.dim),
            });
        }
        for (field, rows) in [("re", &self.re), ("im", &self.im)] {
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(Error::ShapeMismatch {
                    expected: format!("field `{field}` of {dim}x{dim}"),
                    found: format!(
                        "{} rows with lengths {:?}",
                        rows.len(),
                        rows.iter().map(Vec::len).collect::<Vec<_>>()
                    ),
                });
            }
        }
        Ok(CMatrix::from_fn(dim, dim, |r, c| {
            Complex64::new(self.re[r][c], self.im[r][c])
        }))
    }

    pub fn to_gamma(&self) -> Result<OnePdm> {
        Ok(OnePdm(self.to_matrix()?))
    }

    pub fn to_big_gamma(&self) -> Result<TwoPdm> {
        Ok(TwoPdm(self.to_matrix()?))
    }

    pub fn to_operator(&self) -> Result<FockOperator> {
        FockOperator::new(self.m, self.to_matrix()?)
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_operator()?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub bar: Vec<usize>,
    pub unbar: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

/// `{ "m": .., "terms": [{ "bar": [..], "unbar": [..], "re": .., "im": .. }] }`; term
/// `(I, J)` stands for `Ψ̄_I Ψ_J` with ascending indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementJson {
    pub m: usize,
    pub terms: Vec<TermJson>,
}

impl From<&GrassmannElement> for ElementJson {
    fn from(a: &GrassmannElement) -> Self {
        ElementJson {
            m: a.m(),
            terms: a
                .terms()
                .map(|(mono, c)| TermJson {
                    bar: mono.bar.to_vec(),
                    unbar: mono.unbar.to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl ElementJson {
    /// Repeated monomials are summed.
    pub fn to_element(&self) -> Result<GrassmannElement> {
        let mut a = GrassmannElement::zero(self.m)?;
        for t in &self.terms {
            let mono = Monomial::from_indices(&t.bar, &t.unbar, self.m)?;
            a.add_term(mono, Complex64::new(t.re, t.im));
        }
        Ok(a)
    }
}

/// Report record; an infinite margin (empty form) is written as `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub condition: String,
    pub margin: Option<f64>,
    pub pass: bool,
    pub tol: f64,
    pub method: Method,
}

impl From<&ConditionReport> for ReportJson {
    fn from(r: &ConditionReport) -> Self {
        ReportJson {
            condition: r.condition.clone(),
            margin: r.margin.is_finite().then_some(r.margin),
            pass: r.pass,
            tol: r.tol,
            method: r.method,
        }
    }
}

impl From<&ReportJson> for ConditionReport {
    fn from(r: &ReportJson) -> Self {
        ConditionReport {
            condition: r.condition.clone(),
            margin: r.margin.unwrap_or(f64::INFINITY),
            pass: r.pass,
            tol: r.tol,
            method: r.method,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasifreeReport {
    pub pdm1_max_dev: f64,
    pub wick_max_dev: f64,
    pub points_checked: usize,
}

/// Output of the `quasifree` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasifreeOutput {
    pub density: ElementJson,
    pub report: QuasifreeReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummaryJson {
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub failures: usize,
    pub worst_margin: BTreeMap<String, Option<f64>>,
    pub max_pdm_dev: f64,
    pub max_closed_form_gap: f64,
    pub max_contraction_dev: Option<f64>,
}

impl FuzzSummaryJson {
    pub fn new(summary: &FuzzSummary, seed: u64) -> Self {
        FuzzSummaryJson {
            m: summary.m,
            trials: summary.trials,
            seed,
            failures: summary.failures,
            worst_margin: summary
                .worst_margin
                .iter()
                .map(|(k, v)| (k.clone(), v.is_finite().then_some(*v)))
                .collect(),
            max_pdm_dev: summary.max_pdm_dev,
            max_closed_form_gap: summary.max_closed_form_gap,
            max_contraction_dev: summary.max_contraction_dev,
        }
    }
}

/// Inputs of the `check` command.
#[derive(Clone, Debug)]
pub struct CheckInput {
    pub gamma: OnePdm,
    pub big_gamma: Option<TwoPdm>,
    pub rho: Option<DensityMatrix>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    Many(Vec<MatrixJson>),
    One(MatrixJson),
}

/// Parses a record or an array of records with `kind` in `gamma`, `Gamma`, `rho`.
/// With `rho` present, missing `γ`/`Γ` are computed from it.
pub fn parse_check_input(text: &str) -> Result<CheckInput> {
    let records = match serde_json::from_str::<OneOrMany>(text) {
        Ok(OneOrMany::Many(v)) => v,
        Ok(OneOrMany::One(r)) => vec![r],
        // the untagged error says nothing about which field is wrong; retry typed
        Err(_) => match serde_json::from_str::<Vec<MatrixJson>>(text) {
            Err(e) if text.trim_start().starts_with('[') => return Err(e.into()),
            _ => vec![serde_json::from_str::<MatrixJson>(text)?],
        },
    };
    let (mut gamma, mut big, mut rho) = (None, None, None);
    for rec in &records {
        let slot_taken = |name: &str| Error::Invalid(format!("duplicate record of kind `{name}`"));
        match rec.kind.as_deref() {
            Some("gamma") => {
                if gamma.replace(rec.to_gamma()?).is_some() {
                    return Err(slot_taken("gamma"));
                }
            }
            Some("Gamma") => {
                if big.replace(rec.to_big_gamma()?).is_some() {
                    return Err(slot_taken("Gamma"));
                }
            }
            Some("rho") => {
                if rho.replace(rec.to_density()?).is_some() {
                    return Err(slot_taken("rho"));
                }
            }
            Some(other) => {
                return Err(Error::Invalid(format!(
                    "field `kind`: unknown value `{other}` (expected gamma, Gamma or rho)"
                )))
            }
            None => return Err(Error::Invalid("field `kind` missing".into())),
        }
    }
    if let Some(r) = &rho {
        let (g, b) = crate::fock::pdms_from_rho(r);
        gamma.get_or_insert(g);
        big.get_or_insert(b);
    }
    let gamma = gamma.ok_or_else(|| Error::Invalid("no record of kind `gamma`".into()))?;
    if let Some(b) = &big {
        if b.m() != gamma.m() {
            return Err(Error::ModeMismatch {
                left: gamma.m(),
                right: b.m(),
            });
        }
    }
    Ok(CheckInput {
        gamma,
        big_gamma: big,
        rho,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Pretty JSON written to a temporary file in the target directory, then renamed over `path`.
pub fn write_json_atomic<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    serde_json::to_writer_pretty(&mut tmp, value)?;
    tmp.write_all(b"\n")?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
