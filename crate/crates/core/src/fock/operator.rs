use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::apply;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Mode cap for the dense oracle (`2^6 = 64`-dimensional Fock space).
pub const FOCK_MAX_MODES: usize = 6;

/// A general (not necessarily Hermitian) operator on `∧C^m` in the occupation basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    pub m: usize,
    pub mat: CMatrix,
}

pub(crate) fn check_fock_modes(m: usize) -> Result<()> {
    if m == 0 || m > FOCK_MAX_MODES {
        Err(Error::ModeCount {
            m,
            max: FOCK_MAX_MODES,
        })
    } else {
        Ok(())
    }
}

impl FockOperator {
    pub fn new(m: usize, mat: CMatrix) -> Result<Self> {
        check_fock_modes(m)?;
        let dim = 1usize << m;
        if mat.shape() != (dim, dim) {
            return Err(Error::ShapeMismatch {
                expected: format!("{dim}x{dim}"),
                found: format!("{}x{}", mat.nrows(), mat.ncols()),
            });
        }
        Ok(FockOperator { m, mat })
    }

    pub fn zeros(m: usize) -> Result<Self> {
        check_fock_modes(m)?;
        let dim = 1usize << m;
        Ok(FockOperator {
            m,
            mat: DMatrix::zeros(dim, dim),
        })
    }

    pub fn identity(m: usize) -> Result<Self> {
        check_fock_modes(m)?;
        let dim = 1usize << m;
        Ok(FockOperator {
            m,
            mat: DMatrix::identity(dim, dim),
        })
    }

    pub fn dim(&self) -> usize {
        1usize << self.m
    }

    pub fn adjoint(&self) -> Self {
        FockOperator {
            m: self.m,
            mat: self.mat.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        FockOperator {
            m: self.m,
            mat: self.mat.map(|z| z * c),
        }
    }
}

fn ladder(i: usize, m: usize, dagger: bool) -> Result<FockOperator> {
    check_fock_modes(m)?;
    if i == 0 || i > m {
        return Err(Error::IndexOutOfRange { index: i, m });
    }
    let mut op = FockOperator::zeros(m)?;
    for n in 0..op.dim() {
        if let Some((s, out)) = apply(n, i, dagger) {
            op.mat[(out, n)] = Complex64::new(s, 0.0);
        }
    }
    Ok(op)
}

/// `c*_i`
pub fn creation(i: usize, m: usize) -> Result<FockOperator> {
    ladder(i, m, true)
}

/// `c_i`
pub fn annihilation(i: usize, m: usize) -> Result<FockOperator> {
    ladder(i, m, false)
}

/// `N̂ = Σ_i c*_i c_i`, diagonal with the occupation count.
pub fn number_operator(m: usize) -> Result<FockOperator> {
    let mut op = FockOperator::zeros(m)?;
    for n in 0..op.dim() {
        op.mat[(n, n)] = Complex64::new(n.count_ones() as f64, 0.0);
    }
    Ok(op)
}

impl Mul for &FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: &FockOperator) -> FockOperator {
        assert_eq!(self.m, rhs.m, "mode count mismatch");
        FockOperator {
            m: self.m,
            mat: &self.mat * &rhs.mat,
        }
    }
}

impl Add for &FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: &FockOperator) -> FockOperator {
        assert_eq!(self.m, rhs.m, "mode count mismatch");
        FockOperator {
            m: self.m,
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;
    fn sub(self, rhs: &FockOperator) -> FockOperator {
        assert_eq!(self.m, rhs.m, "mode count mismatch");
        FockOperator {
            m: self.m,
            mat: &self.mat - &rhs.mat,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn car_exhaustive() {
        for m in 1..=4 {
            let id = FockOperator::identity(m).unwrap();
            for i in 1..=m {
                let ci = annihilation(i, m).unwrap();
                let cdi = creation(i, m).unwrap();
                assert_eq!(cdi, ci.adjoint());
                assert!(max_abs(&(&cdi * &cdi).mat) == 0.0);
                for j in 1..=m {
                    let cj = annihilation(j, m).unwrap();
                    let cdj = creation(j, m).unwrap();
                    let anti = &(&ci * &cdj) + &(&cdj * &ci);
                    let expect = if i == j {
                        id.clone()
                    } else {
                        FockOperator::zeros(m).unwrap()
                    };
                    assert_eq!(anti, expect);
                    assert!(max_abs(&(&(&ci * &cj) + &(&cj * &ci)).mat) == 0.0);
                }
            }
        }
    }

    #[test]
    fn vacuum_is_annihilated() {
        let c = annihilation(2, 3).unwrap();
        assert!(c.mat.column(0).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn number_operator_trace() {
        let n1 = &creation(1, 2).unwrap() * &annihilation(1, 2).unwrap();
        assert_eq!(n1.trace(), Complex64::new(2.0, 0.0));
        assert_eq!(
            number_operator(3).unwrap().trace(),
            Complex64::new(12.0, 0.0)
        );
    }

    #[test]
    fn index_errors() {
        assert!(creation(0, 2).is_err());
        assert!(annihilation(3, 2).is_err());
        assert!(creation(1, FOCK_MAX_MODES + 1).is_err());
    }
}
