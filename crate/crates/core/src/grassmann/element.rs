use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::subset::{half_pairs, parity, IndexSubset, Monomial};
use crate::error::{Error, Result};

/// Cap on the generator count of a [`GrassmannElement`]. Monomial-level fast paths
/// (star of two monomials, integrals, the closed-form pair integral) work up to here.
pub const MAX_MODES: usize = 10;

/// Cap for star products of general elements (dense `4^m` accumulation).
pub const STAR_MAX_MODES: usize = 6;

/// Default relative pruning threshold.
pub const PRUNE_TOL: f64 = 1e-14;

/// A finite linear combination `Σ α_{IJ} Ψ̄_I Ψ_J` over generators `1..=m`.
#[derive(Clone, PartialEq)]
pub struct GrassmannElement {
    m: usize,
    terms: BTreeMap<Monomial, Complex64>,
}

pub(crate) fn check_modes(m: usize, max: usize) -> Result<()> {
    if m == 0 || m > max {
        Err(Error::ModeCount { m, max })
    } else {
        Ok(())
    }
}

pub(crate) fn check_same(a: usize, b: usize) -> Result<()> {
    if a != b {
        Err(Error::ModeMismatch { left: a, right: b })
    } else {
        Ok(())
    }
}

/// Builds an element from `(bar, unbar, coefficient)` triples with 1-based indices.
/// Duplicate monomials are summed.
pub fn make_element(
    m: usize,
    terms: &[(Vec<usize>, Vec<usize>, Complex64)],
) -> Result<GrassmannElement> {
    let mut out = GrassmannElement::zero(m)?;
    for (bar, unbar, c) in terms {
        let mono = Monomial::from_indices(bar, unbar, m)?;
        out.add_term(mono, *c);
    }
    Ok(out)
}

impl GrassmannElement {
    pub fn zero(m: usize) -> Result<Self> {
        check_modes(m, MAX_MODES)?;
        Ok(GrassmannElement {
            m,
            terms: BTreeMap::new(),
        })
    }

    pub fn one(m: usize) -> Result<Self> {
        Self::monomial(m, Monomial::ONE, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(m: usize, mono: Monomial, c: Complex64) -> Result<Self> {
        let mut out = Self::zero(m)?;
        if mono.max_index() > m {
            return Err(Error::IndexOutOfRange {
                index: mono.max_index(),
                m,
            });
        }
        out.add_term(mono, c);
        Ok(out)
    }

    /// The single generator `ψ̄_i` (barred) or `ψ_i`.
    pub fn generator(m: usize, i: usize, barred: bool) -> Result<Self> {
        if i == 0 || i > m {
            return Err(Error::IndexOutOfRange { index: i, m });
        }
        let mono = if barred {
            Monomial::psibar(i)
        } else {
            Monomial::psi(i)
        };
        Self::monomial(m, mono, Complex64::new(1.0, 0.0))
    }

    /// Builds from a dense coefficient vector indexed by [`Monomial::dense_index`].
    /// Exact zeros are dropped.
    pub fn from_dense(m: usize, dense: &[Complex64]) -> Result<Self> {
        let mut out = Self::zero(m)?;
        assert_eq!(dense.len(), 1usize << (2 * m));
        for (idx, c) in dense.iter().enumerate() {
            if *c != Complex64::new(0.0, 0.0) {
                out.terms.insert(Monomial::from_dense_index(idx, m), *c);
            }
        }
        Ok(out)
    }

    /// Every monomial gets an independent standard complex Gaussian coefficient.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Self> {
        check_modes(m, STAR_MAX_MODES)?;
        let dense: Vec<Complex64> = (0..1usize << (2 * m))
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::from_dense(m, &dense)
    }

    /// Random element with `Ψ̄_I Ψ_J` supported only on `|I| = |J|`.
    pub fn random_number_conserving<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Self> {
        let mut a = Self::random(m, rng)?;
        a.terms.retain(|mono, _| mono.bar.len() == mono.unbar.len());
        Ok(a)
    }

    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); 1usize << (2 * self.m)];
        for (mono, c) in &self.terms {
            v[mono.dense_index(self.m)] = *c;
        }
        v
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: Monomial) -> Complex64 {
        self.terms.get(&mono).copied().unwrap_or_default()
    }

    /// Adds `c` to the coefficient of `mono`. The monomial must lie within `1..=m`.
    pub fn add_term(&mut self, mono: Monomial, c: Complex64) {
        debug_assert!(mono.max_index() <= self.m);
        *self.terms.entry(mono).or_default() += c;
    }

    pub fn scale(&self, c: Complex64) -> Self {
        GrassmannElement {
            m: self.m,
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficientwise difference `max |a_IJ − b_IJ|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, v) in &self.terms {
            worst = worst.max((v - other.coeff(*k)).norm());
        }
        for (k, v) in &other.terms {
            if !self.terms.contains_key(k) {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    /// Drops terms below `rel_tol` times the largest coefficient magnitude.
    pub fn prune(&self, rel_tol: f64) -> Self {
        let cut = rel_tol * self.max_abs();
        GrassmannElement {
            m: self.m,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > cut)
                .map(|(k, v)| (*k, *v))
                .collect(),
        }
    }

    /// `μ*`: antilinear, `(Ψ̄_I Ψ_J)* = (−1)^{s_I + s_J} Ψ̄_J Ψ_I`.
    pub fn involution(&self) -> Self {
        GrassmannElement {
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| {
                    let s = parity(half_pairs(k.bar.len()) + half_pairs(k.unbar.len()));
                    (Monomial::new(k.unbar, k.bar), v.conj() * s)
                })
                .collect(),
        }
    }

    /// Plain Grassmann (wedge) product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        check_same(self.m, other.m)?;
        let mut out = Self::zero(self.m)?;
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((s, r)) = super::subset::wedge(*a, *b) {
                    out.add_term(r, ca * cb * s);
                }
            }
        }
        Ok(out)
    }

    /// Star product; see [`super::star`].
    pub fn star(&self, other: &Self) -> Result<Self> {
        super::star::star(self, other)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        check_same(self.m, other.m)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(*k, *v);
        }
        Ok(out)
    }

    /// True when every monomial contains equally many barred and unbarred factors.
    pub fn conserves_particle_number(&self) -> bool {
        self.terms.keys().all(|k| k.bar.len() == k.unbar.len())
    }

    pub fn support_within(&self, set: IndexSubset) -> bool {
        self.terms
            .keys()
            .all(|k| k.bar.difference(set).is_empty() && k.unbar.difference(set).is_empty())
    }
}

impl fmt::Debug for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G[m={}](", self.m)?;
        let mut first = true;
        for (k, v) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i){:?}", v.re, v.im, k)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

/// Panics on mismatched `m`; use [`GrassmannElement::checked_add`] for fallible code.
impl Add for &GrassmannElement {
    type Output = GrassmannElement;
    fn add(self, rhs: &GrassmannElement) -> GrassmannElement {
        self.checked_add(rhs).expect("generator count mismatch")
    }
}

impl Add for GrassmannElement {
    type Output = GrassmannElement;
    fn add(self, rhs: GrassmannElement) -> GrassmannElement {
        &self + &rhs
    }
}

impl AddAssign<&GrassmannElement> for GrassmannElement {
    fn add_assign(&mut self, rhs: &GrassmannElement) {
        assert_eq!(self.m, rhs.m, "generator count mismatch");
        for (k, v) in &rhs.terms {
            self.add_term(*k, *v);
        }
    }
}

impl Neg for &GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Sub for &GrassmannElement {
    type Output = GrassmannElement;
    fn sub(self, rhs: &GrassmannElement) -> GrassmannElement {
        self + &(-rhs)
    }
}

impl Sub for GrassmannElement {
    type Output = GrassmannElement;
    fn sub(self, rhs: GrassmannElement) -> GrassmannElement {
        &self - &rhs
    }
}

impl Mul<Complex64> for &GrassmannElement {
    type Output = GrassmannElement;
    fn mul(self, c: Complex64) -> GrassmannElement {
        self.scale(c)
    }
}

impl Mul<f64> for &GrassmannElement {
    type Output = GrassmannElement;
    fn mul(self, c: f64) -> GrassmannElement {
        self.scale(Complex64::new(c, 0.0))
    }
}
