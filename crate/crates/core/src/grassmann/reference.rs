//! Slow evaluation of the star product straight from its integral definition
//!
//! `(μ⋆η)(ψ̄,ψ) = ∫d(Φ̄,Φ) μ(ψ̄,φ) η(φ̄,ψ) e^{−(Ψ̄,Ψ)} e^{(Ψ̄,Φ)} e^{−(Φ̄,Φ)} e^{(Φ̄,Ψ)}`,
//!
//! in a Grassmann algebra with `4m` generators ordered `ψ̄, ψ, φ̄, φ`. Used only to
//! validate the closed-form expansion in tests; practical for `m ≤ 3`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::element::{check_same, GrassmannElement};
use super::subset::{inversions, parity, IndexSubset, Monomial};
use crate::error::{Error, Result};

const REFERENCE_MAX_MODES: usize = 4;

#[derive(Clone, Debug, Default)]
struct Poly(BTreeMap<u32, Complex64>);

impl Poly {
    fn scalar(c: f64) -> Self {
        Poly(BTreeMap::from([(0, Complex64::new(c, 0.0))]))
    }

    fn generator(g: usize) -> Self {
        Poly(BTreeMap::from([(1u32 << g, Complex64::new(1.0, 0.0))]))
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = BTreeMap::new();
        for (&a, ca) in &self.0 {
            for (&b, cb) in &other.0 {
                if a & b != 0 {
                    continue;
                }
                let s = parity(inversions(
                    IndexSubset::from_bits(a),
                    IndexSubset::from_bits(b),
                ));
                *out.entry(a | b).or_insert(Complex64::new(0.0, 0.0)) += ca * cb * s;
            }
        }
        Poly(out)
    }

    fn add(&self, other: &Poly) -> Poly {
        let mut out = self.0.clone();
        for (&k, v) in &other.0 {
            *out.entry(k).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        Poly(out)
    }

    /// Left derivative with respect to generator `g`.
    fn derive(&self, g: usize) -> Poly {
        let bit = 1u32 << g;
        let mut out = BTreeMap::new();
        for (&k, v) in &self.0 {
            if k & bit != 0 {
                let s = parity((k & (bit - 1)).count_ones() as usize);
                out.insert(k & !bit, v * s);
            }
        }
        Poly(out)
    }
}

/// `∏` of single generators in the given order.
fn word(gens: impl IntoIterator<Item = usize>) -> Poly {
    gens.into_iter()
        .fold(Poly::scalar(1.0), |acc, g| acc.mul(&Poly::generator(g)))
}

/// Embeds `Σ α Ψ̄_I Ψ_J` with barred generators at `bar_off + i − 1` and unbarred at
/// `unbar_off + j − 1`.
fn embed(a: &GrassmannElement, bar_off: usize, unbar_off: usize) -> Poly {
    let mut out = Poly::default();
    for (mono, c) in a.terms() {
        let gens = mono
            .bar
            .iter()
            .map(|i| bar_off + i - 1)
            .chain(mono.unbar.iter().map(|j| unbar_off + j - 1));
        let mut w = word(gens);
        for v in w.0.values_mut() {
            *v *= c;
        }
        out = out.add(&w);
    }
    out
}

/// `∏_α (1 + sign · x_α y_α)`
fn pair_exponential(m: usize, x_off: usize, y_off: usize, sign: f64) -> Poly {
    (0..m).fold(Poly::scalar(1.0), |acc, a| {
        let f = Poly::scalar(1.0).add(&{
            let mut p = word([x_off + a, y_off + a]);
            for v in p.0.values_mut() {
                *v *= sign;
            }
            p
        });
        acc.mul(&f)
    })
}

/// Star product from the integral definition.
pub fn star_reference(a: &GrassmannElement, b: &GrassmannElement) -> Result<GrassmannElement> {
    check_same(a.m(), b.m())?;
    let m = a.m();
    if m > REFERENCE_MAX_MODES {
        return Err(Error::ModeCount {
            m,
            max: REFERENCE_MAX_MODES,
        });
    }
    let (psibar, psi, phibar, phi) = (0, m, 2 * m, 3 * m);
    let mut integrand = embed(a, psibar, phi).mul(&embed(b, phibar, psi));
    for (x, y, s) in [
        (psibar, psi, -1.0),
        (psibar, phi, 1.0),
        (phibar, phi, -1.0),
        (phibar, psi, 1.0),
    ] {
        integrand = integrand.mul(&pair_exponential(m, x, y, s));
    }
    for alpha in 0..m {
        integrand = integrand.derive(phi + alpha).derive(phibar + alpha);
    }
    let mut out = GrassmannElement::zero(m)?;
    let low = (1u32 << m) - 1;
    for (k, v) in integrand.0 {
        debug_assert!(k >> (2 * m) == 0, "φ generators survived the integration");
        let mono = Monomial::new(
            IndexSubset::from_bits(k & low),
            IndexSubset::from_bits(k >> m),
        );
        if v != Complex64::new(0.0, 0.0) {
            out.add_term(mono, v);
        }
    }
    Ok(out)
}
