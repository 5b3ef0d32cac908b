//! Quasifree (Gaussian) Grassmann densities with a prescribed 1-pdm, and Wick
//! evaluation of their n-point functions.
//!
//! In the eigenbasis of `γ = U diag(λ) U*` the density is a star product of one-mode
//! factors `(e^{−q_i} − 1) ψ̄_i ψ_i + 1` with `(1 + e^{q_i})^{−1} = λ_i`. Boundary modes use
//! the limits `1 − ψ̄_i ψ_i` (empty) and `ψ̄_i ψ_i` (occupied).

use num_complex::Complex64;

use crate::conditions::GrassmannDensity;
use crate::error::{Error, Result};
use crate::fock::OnePdm;
use crate::grassmann::{
    change_generators, half_pairs, number_monomial, parity, star, trace_integral, GrassmannElement,
    IndexSubset, Monomial,
};
use crate::linalg::{self, CMatrix};

/// Eigenvalues within this distance of 0 or 1 are treated as exactly empty/occupied.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Accepted spectral slack outside `[0, 1]`.
pub const SPECTRUM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModeOccupation {
    Empty,
    Occupied,
    /// `q = ln((1 − λ)/λ)`
    Interior {
        q: f64,
    },
}

#[derive(Clone, Debug)]
pub struct QuasifreeSpec {
    pub m: usize,
    /// Eigenvectors of γ as columns.
    pub u: CMatrix,
    pub lambdas: Vec<f64>,
    pub modes: Vec<ModeOccupation>,
    /// γ in the original basis, `u diag(λ) u*`.
    pub gamma: CMatrix,
}

impl QuasifreeSpec {
    pub fn from_gamma(g: &OnePdm) -> Result<Self> {
        let m = g.m();
        if g.0.shape() != (m, m) || m == 0 {
            return Err(Error::ShapeMismatch {
                expected: "square γ".into(),
                found: format!("{}x{}", g.0.nrows(), g.0.ncols()),
            });
        }
        let dev = linalg::hermitian_deviation(&g.0);
        if dev > 1e-8 {
            return Err(Error::NotHermitian(dev));
        }
        let (vals, u) = linalg::eigh(&g.0);
        let mut lambdas = Vec::with_capacity(m);
        let mut modes = Vec::with_capacity(m);
        for &l in vals.iter() {
            if !(-SPECTRUM_TOL..=1.0 + SPECTRUM_TOL).contains(&l) {
                return Err(Error::SpectrumOutOfRange(l));
            }
            let (lam, mode) = if l <= BOUNDARY_TOL {
                (0.0, ModeOccupation::Empty)
            } else if l >= 1.0 - BOUNDARY_TOL {
                (1.0, ModeOccupation::Occupied)
            } else {
                (
                    l,
                    ModeOccupation::Interior {
                        q: ((1.0 - l) / l).ln(),
                    },
                )
            };
            lambdas.push(lam);
            modes.push(mode);
        }
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            m,
            lambdas.iter().map(|&l| Complex64::new(l, 0.0)),
        ));
        let gamma = &u * d * u.adjoint();
        Ok(QuasifreeSpec {
            m,
            u,
            lambdas,
            modes,
            gamma,
        })
    }

    /// `q_i` for interior modes, `None` on the boundary.
    pub fn qs(&self) -> Vec<Option<f64>> {
        self.modes
            .iter()
            .map(|md| match md {
                ModeOccupation::Interior { q } => Some(*q),
                _ => None,
            })
            .collect()
    }

    /// Two-point function `⟨w₁ ⋆ w₂⟩` in the original basis:
    /// `⟨ψ̄_i ⋆ ψ_j⟩ = γ[j,i]`, `⟨ψ_i ⋆ ψ̄_j⟩ = δ_ij − γ[i,j]`, same-type pairs vanish.
    pub fn two_point(&self, a: (usize, bool), b: (usize, bool)) -> Complex64 {
        let (i, j) = (a.0 - 1, b.0 - 1);
        match (a.1, b.1) {
            (true, false) => self.gamma[(j, i)],
            (false, true) => {
                let d = if i == j { 1.0 } else { 0.0 };
                Complex64::new(d, 0.0) - self.gamma[(i, j)]
            }
            _ => Complex64::new(0.0, 0.0),
        }
    }
}

/// A star-product word `ψ̃₁ ⋆ ψ̃₂ ⋆ ⋯` of generators `(index, barred)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorWord(pub Vec<(usize, bool)>);

impl GeneratorWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn check(&self, m: usize) -> Result<()> {
        match self.0.iter().find(|(i, _)| *i == 0 || *i > m) {
            Some(&(i, _)) => Err(Error::IndexOutOfRange { index: i, m }),
            None => Ok(()),
        }
    }

    /// The star product of the letters as an element.
    pub fn to_element(&self, m: usize) -> Result<GrassmannElement> {
        self.check(m)?;
        let mut acc = GrassmannElement::one(m)?;
        for &(i, barred) in &self.0 {
            acc = star(&acc, &GrassmannElement::generator(m, i, barred)?)?;
        }
        Ok(acc)
    }
}

/// `Σ_{Q⊆M} (−1)^{s_Q} r_Q Ψ̄_Q Ψ_Q`, `r_Q = Π_{i∈Q} r_i`; the star product of the
/// commuting one-mode factors `r_i ψ̄_i ψ_i + 1`.
pub fn kappa_mu_expansion(r: &[f64]) -> Result<GrassmannElement> {
    let m = r.len();
    let mut out = GrassmannElement::zero(m)?;
    for q in IndexSubset::full(m).subsets() {
        let rq: f64 = q.iter().map(|i| r[i - 1]).product();
        if rq != 0.0 {
            out.add_term(
                Monomial::new(q, q),
                Complex64::new(parity(half_pairs(q.len())) * rq, 0.0),
            );
        }
    }
    Ok(out)
}

/// The unnormalized quasifree element in eigen-coordinates.
fn eigen_element(spec: &QuasifreeSpec) -> Result<GrassmannElement> {
    let m = spec.m;
    let one = Complex64::new(1.0, 0.0);
    let mut acc = GrassmannElement::one(m)?;
    for (i, mode) in spec.modes.iter().enumerate() {
        let n = number_monomial(i + 1);
        let factor = match mode {
            ModeOccupation::Empty => {
                let mut f = GrassmannElement::one(m)?;
                f.add_term(n, -one);
                f
            }
            ModeOccupation::Occupied => GrassmannElement::monomial(m, n, one)?,
            ModeOccupation::Interior { q } => {
                let mut f = GrassmannElement::one(m)?;
                f.add_term(n, Complex64::new((-q).exp() - 1.0, 0.0));
                f
            }
        };
        acc = star(&acc, &factor)?;
    }
    Ok(acc)
}

/// The unique quasifree density with 1-pdm `γ`.
pub fn build_quasifree(g: &OnePdm) -> Result<(QuasifreeSpec, GrassmannDensity)> {
    let spec = QuasifreeSpec::from_gamma(g)?;
    let kappa = eigen_element(&spec)?;
    let z = trace_integral(&kappa);
    let kappa = kappa.scale(z.inv());
    let rotated = change_generators(&kappa, &spec.u.adjoint())?;
    Ok((spec, GrassmannDensity::new(rotated)?))
}

/// Signed sum over pairings of two-point functions; `0` for odd words.
pub fn wick_expectation(spec: &QuasifreeSpec, word: &GeneratorWord) -> Result<Complex64> {
    word.check(spec.m)?;
    if word.len() % 2 == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(pairing_sum(spec, &word.0))
}

fn pairing_sum(spec: &QuasifreeSpec, letters: &[(usize, bool)]) -> Complex64 {
    if letters.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 1..letters.len() {
        let two = spec.two_point(letters[0], letters[j]);
        if two == Complex64::new(0.0, 0.0) {
            continue;
        }
        let rest: Vec<_> = letters[1..j]
            .iter()
            .chain(&letters[j + 1..])
            .copied()
            .collect();
        // moving letter j next to letter 0 passes j − 1 generators
        acc += two * parity(j - 1) * pairing_sum(spec, &rest);
    }
    acc
}

/// All words of pairwise distinct generators with length `1..=max_points`.
pub fn quasifree_words(m: usize, max_points: usize) -> Vec<GeneratorWord> {
    let letters: Vec<(usize, bool)> = (1..=m).flat_map(|i| [(i, true), (i, false)]).collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn extend(
        letters: &[(usize, bool)],
        used: &mut Vec<bool>,
        current: &mut Vec<(usize, bool)>,
        max: usize,
        out: &mut Vec<GeneratorWord>,
    ) {
        if !current.is_empty() {
            out.push(GeneratorWord(current.clone()));
        }
        if current.len() == max {
            return;
        }
        for (idx, &l) in letters.iter().enumerate() {
            if used[idx] {
                continue;
            }
            used[idx] = true;
            current.push(l);
            extend(letters, used, current, max, out);
            current.pop();
            used[idx] = false;
        }
    }
    let mut used = vec![false; letters.len()];
    extend(&letters, &mut used, &mut current, max_points, &mut out);
    out
}

/// Largest `|⟨word⟩_ϰ − wick(word)|` over [`quasifree_words`].
pub fn verify_quasifree(
    density: &GrassmannDensity,
    spec: &QuasifreeSpec,
    max_points: usize,
) -> Result<f64> {
    let m = density.m();
    if spec.m != m {
        return Err(Error::ModeMismatch {
            left: m,
            right: spec.m,
        });
    }
    let mut worst: f64 = 0.0;
    for word in quasifree_words(m, max_points) {
        let lhs = density.expect(&word.to_element(m)?)?;
        let rhs = wick_expectation(spec, &word)?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}
