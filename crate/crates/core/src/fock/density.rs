use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::apply;
use super::operator::{check_fock_modes, FockOperator};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Tolerance for positivity, Hermiticity and unit trace of a [`DensityMatrix`].
pub const DENSITY_TOL: f64 = 1e-10;

/// A validated density matrix: Hermitian, `ρ ⪰ 0`, `tr ρ = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(FockOperator);

impl DensityMatrix {
    pub fn new(op: FockOperator) -> Result<Self> {
        let herm = linalg::hermitian_deviation(&op.mat);
        if herm > DENSITY_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = op.trace();
        if (tr - 1.0).norm() > DENSITY_TOL {
            return Err(Error::NotDensity(format!("trace {tr}")));
        }
        let lo = linalg::min_eigenvalue(&op.mat);
        if lo < -DENSITY_TOL {
            return Err(Error::NotDensity(format!("eigenvalue {lo:e}")));
        }
        Ok(DensityMatrix(op))
    }

    pub fn op(&self) -> &FockOperator {
        &self.0
    }

    pub fn m(&self) -> usize {
        self.0.m
    }

    pub fn mat(&self) -> &CMatrix {
        &self.0.mat
    }

    pub fn into_inner(self) -> FockOperator {
        self.0
    }

    /// Probability mass outside the `n`-particle sector.
    pub fn weight_outside_sector(&self, n: usize) -> f64 {
        (0..self.0.dim())
            .filter(|s| s.count_ones() as usize != n)
            .map(|s| self.0.mat[(s, s)].re)
            .sum()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DensityOptions {
    /// Restrict to the `N`-particle sector before normalizing.
    pub sector: Option<usize>,
}

/// `ρ = B*B / tr(B*B)` with `B` a seeded complex Gaussian matrix, optionally compressed
/// to a particle-number sector.
pub fn random_density(m: usize, seed: u64, options: DensityOptions) -> Result<DensityMatrix> {
    check_fock_modes(m)?;
    if let Some(n) = options.sector {
        if n > m {
            return Err(Error::EmptySector { n, m });
        }
    }
    let dim = 1usize << m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = linalg::complex_gaussian(dim, dim, &mut rng);
    let mut rho = b.adjoint() * b;
    if let Some(n) = options.sector {
        for i in 0..dim {
            for j in 0..dim {
                if i.count_ones() as usize != n || j.count_ones() as usize != n {
                    rho[(i, j)] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }
    let tr = rho.trace();
    rho /= tr;
    rho = (&rho + rho.adjoint()).scale(0.5);
    DensityMatrix::new(FockOperator::new(m, rho)?)
}

/// `c*(f₁)⋯c*(f_N)|Ω⟩` with orbital `f_k` the `k`-th column of `orbitals` (m × N).
pub fn slater_state(orbitals: &CMatrix) -> Result<DVector<Complex64>> {
    let m = orbitals.nrows();
    check_fock_modes(m)?;
    let dim = 1usize << m;
    let mut state = DVector::<Complex64>::zeros(dim);
    state[0] = Complex64::new(1.0, 0.0);
    for k in (0..orbitals.ncols()).rev() {
        let mut next = DVector::<Complex64>::zeros(dim);
        for n in 0..dim {
            if state[n] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i in 1..=m {
                if let Some((s, out)) = apply(n, i, true) {
                    next[out] += orbitals[(i - 1, k)] * state[n] * s;
                }
            }
        }
        state = next;
    }
    Ok(state)
}

/// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`
pub fn pure_density(state: &DVector<Complex64>) -> Result<DensityMatrix> {
    let dim = state.len();
    let m = dim.trailing_zeros() as usize;
    if dim != 1 << m {
        return Err(Error::ShapeMismatch {
            expected: "power-of-two length".into(),
            found: dim.to_string(),
        });
    }
    let norm2: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    if norm2 == 0.0 {
        return Err(Error::NotDensity("zero state vector".into()));
    }
    let rho = (state * state.adjoint()) / Complex64::new(norm2, 0.0);
    DensityMatrix::new(FockOperator::new(m, rho)?)
}

pub fn slater_density(orbitals: &CMatrix) -> Result<DensityMatrix> {
    pure_density(&slater_state(orbitals)?)
}
