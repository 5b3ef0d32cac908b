use num_complex::Complex64;

use super::element::{check_modes, check_same, GrassmannElement, MAX_MODES, STAR_MAX_MODES};
use super::subset::{half_pairs, merge_sign, parity, wedge, IndexSubset, Monomial};
use crate::error::Result;

/// Permutation signs attached to the star product of `Ψ̄_I Ψ_J` and `Ψ̄_K Ψ_L`,
/// with `S = J ∩ K` and `T = I ∩ L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignLedger {
    /// Defined by `σ_S Φ_S Φ_{J∖S} Φ̄_S Φ̄_{K∖S} = Φ_J Φ̄_K`.
    pub sigma_s: f64,
    /// `(−1)^{|S|·|J∖S| + s_S}`.
    pub sigma_js: f64,
    /// Defined by `σ_T Ψ̄_T Ψ̄_{I∖T} Ψ_T Ψ_{L∖T} = Ψ̄_I Ψ_L` split into its two halves.
    pub sigma_t: f64,
}

impl SignLedger {
    pub fn new(a: Monomial, b: Monomial) -> Self {
        let (i, j, k, l) = (a.bar, a.unbar, b.bar, b.unbar);
        let s = j.intersection(k);
        let t = i.intersection(l);
        let sigma_s = merge_sign(s, j.difference(s)) * merge_sign(s, k.difference(s));
        let sigma_js = parity(s.len() * j.difference(s).len() + half_pairs(s.len()));
        let sigma_t = merge_sign(t, i.difference(t)) * merge_sign(t, l.difference(t));
        SignLedger {
            sigma_s,
            sigma_js,
            sigma_t,
        }
    }
}

/// Calls `sink(monomial, coefficient)` for every term of `(Ψ̄_I Ψ_J) ⋆ (Ψ̄_K Ψ_L)`.
///
/// With `S = J ∩ K` the product is
/// `σ_S σ_JS ∏_{α∈S}(1 − ψ̄_α ψ_α) · Ψ̄_I Ψ_{J∖S} Ψ̄_{K∖S} Ψ_L`;
/// the factors `(1 + ψ̄ψ)` outside `J ∪ K` cancel against `e^{−(Ψ̄,Ψ)}`, and inside
/// `J∖S`, `K∖S` the core monomial already annihilates `ψ̄_α ψ_α`.
pub(crate) fn for_each_star_term(a: Monomial, b: Monomial, mut sink: impl FnMut(Monomial, f64)) {
    let (i, j, k, l) = (a.bar, a.unbar, b.bar, b.unbar);
    let s = j.intersection(k);
    let j_rest = j.difference(s);
    let k_rest = k.difference(s);
    let Some((core_sign, core)) = wedge(Monomial::new(i, j_rest), Monomial::new(k_rest, l)) else {
        return;
    };
    let ledger = SignLedger::new(a, b);
    let prefactor = ledger.sigma_s * ledger.sigma_js * core_sign;
    // R ⊆ S must avoid the core's barred set (I) and unbarred set (L).
    let free = s.difference(core.bar).difference(core.unbar);
    for r in free.subsets() {
        let n = r.len();
        // ∏_{α∈R} (−ψ̄_α ψ_α) = (−1)^{|R| + s_R} Ψ̄_R Ψ_R
        let factor = parity(n + half_pairs(n));
        let (ws, mono) = wedge(Monomial::new(r, r), core).expect("R disjoint from core");
        sink(mono, prefactor * factor * ws);
    }
}

/// `(Ψ̄_I Ψ_J) ⋆ (Ψ̄_K Ψ_L)` as an element over `m` generators.
pub fn star_monomials(a: Monomial, b: Monomial, m: usize) -> Result<GrassmannElement> {
    check_modes(m, MAX_MODES)?;
    let mut out = GrassmannElement::zero(m)?;
    for mono in [a, b] {
        if mono.max_index() > m {
            return Err(crate::error::Error::IndexOutOfRange {
                index: mono.max_index(),
                m,
            });
        }
    }
    for_each_star_term(a, b, |mono, c| out.add_term(mono, Complex64::new(c, 0.0)));
    Ok(out)
}

/// Star product of general elements, bilinear in the monomial expansion.
/// Accumulates into a dense `4^m` buffer in a fixed order, so results are deterministic.
pub fn star(a: &GrassmannElement, b: &GrassmannElement) -> Result<GrassmannElement> {
    check_same(a.m(), b.m())?;
    let m = a.m();
    check_modes(m, STAR_MAX_MODES)?;
    let mut acc = vec![Complex64::new(0.0, 0.0); 1usize << (2 * m)];
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let cab = ca * cb;
            for_each_star_term(*ma, *mb, |mono, s| {
                acc[mono.dense_index(m)] += cab * s;
            });
        }
    }
    GrassmannElement::from_dense(m, &acc)
}

/// `μ₁ ⋆ μ₂ ⋆ ⋯ ⋆ μ_N`, left to right. Returns `1` for an empty list.
pub fn star_chain(m: usize, factors: &[GrassmannElement]) -> Result<GrassmannElement> {
    let mut acc = GrassmannElement::one(m)?;
    for f in factors {
        acc = star(&acc, f)?;
    }
    Ok(acc)
}

/// The generator `ψ̄_i ψ_i` as a monomial, convenient for projector factors.
pub fn number_monomial(i: usize) -> Monomial {
    Monomial::new(IndexSubset::singleton(i), IndexSubset::singleton(i))
}
