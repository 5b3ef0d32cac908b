use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Dense `m × m × m` complex tensor `T_ijk` (0-based indices).
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeTensor {
    m: usize,
    data: Vec<Complex64>,
}

impl ThreeTensor {
    pub fn zeros(m: usize) -> Self {
        ThreeTensor {
            m,
            data: vec![Complex64::new(0.0, 0.0); m * m * m],
        }
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize, usize) -> Complex64) -> Self {
        let mut t = Self::zeros(m);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    t.set(i, j, k, f(i, j, k));
                }
            }
        }
        t
    }

    /// From a flat row-major vector (`(i·m + j)·m + k`).
    pub fn from_vec(m: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != m * m * m {
            return Err(Error::ShapeMismatch {
                expected: format!("{} entries", m * m * m),
                found: data.len().to_string(),
            });
        }
        Ok(ThreeTensor { m, data })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.data[(i * self.m + j) * self.m + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Complex64) {
        let m = self.m;
        self.data[(i * m + j) * m + k] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        Self::from_fn(m, |_, _, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        })
    }

    /// Projection onto the totally antisymmetric part.
    pub fn antisymmetrized(&self) -> Self {
        Self::from_fn(self.m, |i, j, k| {
            (self.get(i, j, k) + self.get(j, k, i) + self.get(k, i, j)
                - self.get(j, i, k)
                - self.get(i, k, j)
                - self.get(k, j, i))
                / 6.0
        })
    }

    pub fn random_antisymmetric<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        Self::random(m, rng).antisymmetrized()
    }

    /// `max |T − A(T)|` with `A` the total antisymmetrization.
    pub fn antisymmetry_deviation(&self) -> f64 {
        let a = self.antisymmetrized();
        self.data
            .iter()
            .zip(&a.data)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// `max |T_ijk + T_jik|`
    pub fn pair_antisymmetry_deviation(&self) -> f64 {
        let m = self.m;
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    worst = worst.max((self.get(i, j, k) + self.get(j, i, k)).norm());
                }
            }
        }
        worst
    }

    /// `[T_k]_{ij} = T_ijk`
    pub fn slice_last(&self, k: usize) -> CMatrix {
        CMatrix::from_fn(self.m, self.m, |i, j| self.get(i, j, k))
    }

    /// `[T_q]_{ij} = T_iqj`
    pub fn slice_middle(&self, q: usize) -> CMatrix {
        CMatrix::from_fn(self.m, self.m, |i, j| self.get(i, q, j))
    }
}

/// Probe of the generalized T2 condition,
/// `τ₂ = Σ T_ijk ψ̄_i ⋆ ψ̄_j ⋆ ψ_k + Σ a_i ψ̄_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct T2Augmented {
    pub t: ThreeTensor,
    pub a: DVector<Complex64>,
}

impl T2Augmented {
    pub fn new(t: ThreeTensor, a: DVector<Complex64>) -> Result<Self> {
        if a.len() != t.m() {
            return Err(Error::ShapeMismatch {
                expected: format!("vector of length {}", t.m()),
                found: a.len().to_string(),
            });
        }
        Ok(T2Augmented { t, a })
    }

    pub fn m(&self) -> usize {
        self.t.m()
    }

    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let t = ThreeTensor::random(m, rng);
        let a = DVector::from_fn(m, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        T2Augmented { t, a }
    }
}

/// Matrix `B[α,β]` of a sesquilinear form from its diagonal `S(x) = B(x,x)`
/// (antilinear in the first slot), by polarization over the unit vectors.
pub(crate) fn polarize(n: usize, s: impl Fn(&DVector<Complex64>) -> Complex64) -> CMatrix {
    let i = Complex64::new(0.0, 1.0);
    let unit = |a: usize| {
        let mut v = DVector::<Complex64>::zeros(n);
        v[a] = Complex64::new(1.0, 0.0);
        v
    };
    CMatrix::from_fn(n, n, |a, b| {
        let (u, v) = (unit(a), unit(b));
        let vi = v.map(|z| z * i);
        (s(&(&u + &v)) - s(&(&u - &v)) - i * (s(&(&u + &vi)) - s(&(&u - &vi)))) / 4.0
    })
}
