use num_complex::Complex64;

use super::element::{check_modes, check_same, GrassmannElement, MAX_MODES};
use super::star::{for_each_star_term, SignLedger};
use super::subset::{half_pairs, parity, IndexSubset, Monomial};
use crate::error::{Error, Result};

/// Side from which the Grassmann derivatives in `∫d = ∏_α δ/δψ̄_α δ/δψ_α` act.
///
/// The library uses [`DerivativeSide::Left`]; `Right` exists only as a negative control
/// for the convention self-test (it breaks the trace formula for odd `m`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DerivativeSide {
    #[default]
    Left,
    Right,
}

/// Tolerance on `|∫D ϰ − 1|` for a density passed to [`expectation`].
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Sign of `∫d Ψ̄_M Ψ_M`.
pub fn top_sign(m: usize, side: DerivativeSide) -> f64 {
    match side {
        DerivativeSide::Left => parity(m + half_pairs(m)),
        DerivativeSide::Right => parity(half_pairs(m)),
    }
}

/// `∫d(Ψ̄,Ψ) a`: the top coefficient of `a` times the convention sign.
pub fn raw_integral(a: &GrassmannElement) -> Complex64 {
    raw_integral_with(a, DerivativeSide::Left)
}

pub fn raw_integral_with(a: &GrassmannElement, side: DerivativeSide) -> Complex64 {
    a.coeff(Monomial::top(a.m())) * top_sign(a.m(), side)
}

/// `∫D(Ψ̄,Ψ) a`, normalized so that it equals `tr Θ⁻¹(a)` on Fock space for every `m`.
///
/// Only diagonal monomials contribute: `Ψ̄_I Ψ_I ↦ (−1)^{s_I} 2^{m−|I|}`.
pub fn trace_integral(a: &GrassmannElement) -> Complex64 {
    let m = a.m();
    let mut acc = Complex64::new(0.0, 0.0);
    for (mono, c) in a.terms() {
        if mono.bar == mono.unbar {
            let k = mono.bar.len();
            acc += c * parity(half_pairs(k)) * pow2(m - k);
        }
    }
    acc
}

/// `(−1)^m ∫d(Ψ̄,Ψ) a ∧ ∏_α(1 + 2ψ̄_α ψ_α)` evaluated literally, with a selectable
/// derivative side. Agrees with [`trace_integral`] for the left convention.
pub fn trace_integral_with(a: &GrassmannElement, side: DerivativeSide) -> Result<Complex64> {
    let m = a.m();
    let mut weight = GrassmannElement::one(m)?;
    for alpha in 1..=m {
        let mono = Monomial::new(IndexSubset::singleton(alpha), IndexSubset::singleton(alpha));
        let factor = GrassmannElement::one(m)?.checked_add(&GrassmannElement::monomial(
            m,
            mono,
            Complex64::new(2.0, 0.0),
        )?)?;
        weight = weight.wedge(&factor)?;
    }
    Ok(raw_integral_with(&a.wedge(&weight)?, side) * parity(m))
}

fn pow2(k: usize) -> f64 {
    (1u64 << k) as f64
}

/// Closed-form value of `∫D(Ψ̄,Ψ) (Ψ̄_I Ψ_J) ⋆ (Ψ̄_K Ψ_L)`:
/// `σ_S σ_T (−1)^{s_J + s_L} 2^{m − |I∪K|}` when `I∖T = J∖S` and `L∖T = K∖S`, else 0.
pub fn pair_integral_closed_form(a: Monomial, b: Monomial, m: usize) -> Result<Complex64> {
    check_modes(m, MAX_MODES)?;
    for mono in [a, b] {
        if mono.max_index() > m {
            return Err(Error::IndexOutOfRange {
                index: mono.max_index(),
                m,
            });
        }
    }
    Ok(Complex64::new(pair_value(a, b, m), 0.0))
}

pub(crate) fn pair_value(a: Monomial, b: Monomial, m: usize) -> f64 {
    let (i, j, k, l) = (a.bar, a.unbar, b.bar, b.unbar);
    let s = j.intersection(k);
    let j_rest = j.difference(s);
    let k_rest = k.difference(s);
    if !i.is_disjoint(k_rest) || !l.is_disjoint(j_rest) || i.union(k_rest) != l.union(j_rest) {
        return 0.0;
    }
    let led = SignLedger::new(a, b);
    led.sigma_s
        * led.sigma_t
        * parity(half_pairs(j.len()) + half_pairs(l.len()))
        * pow2(m - i.union(k).len())
}

/// `∫D(Ψ̄,Ψ) a ⋆ b` through the closed form, without forming the product.
pub fn pair_trace(a: &GrassmannElement, b: &GrassmannElement) -> Result<Complex64> {
    check_same(a.m(), b.m())?;
    let m = a.m();
    let mut acc = Complex64::new(0.0, 0.0);
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let v = pair_value(*ma, *mb, m);
            if v != 0.0 {
                acc += ca * cb * v;
            }
        }
    }
    Ok(acc)
}

/// `∫D(Ψ̄,Ψ) a ⋆ b` by expanding the star product term by term.
pub fn pair_trace_expanded(a: Monomial, b: Monomial, m: usize) -> f64 {
    let mut acc = 0.0;
    for_each_star_term(a, b, |mono, c| {
        if mono.bar == mono.unbar {
            let k = mono.bar.len();
            acc += c * parity(half_pairs(k)) * pow2(m - k);
        }
    });
    acc
}

/// Errors unless `∫D ϰ = 1` within [`NORMALIZATION_TOL`].
pub fn check_normalized(density: &GrassmannElement) -> Result<()> {
    let z = trace_integral(density);
    if (z - 1.0).norm() > NORMALIZATION_TOL {
        return Err(Error::UnnormalizedDensity(z.re));
    }
    Ok(())
}

/// `⟨μ⟩_ϰ = ∫D(Ψ̄,Ψ) ϰ ⋆ μ`.
pub fn expectation(density: &GrassmannElement, observable: &GrassmannElement) -> Result<Complex64> {
    check_same(density.m(), observable.m())?;
    check_normalized(density)?;
    pair_trace(density, observable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{make_element, star_monomials};

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn raw_integral_examples() {
        let one = GrassmannElement::one(2).unwrap();
        assert_eq!(raw_integral(&one), re(0.0));
        let top1 = make_element(1, &[(vec![1], vec![1], re(1.0))]).unwrap();
        assert_eq!(raw_integral(&top1), re(-1.0));
        let mixed = make_element(
            2,
            &[
                (vec![1, 2], vec![1, 2], re(3.0)),
                (vec![1], vec![2], re(7.0)),
            ],
        )
        .unwrap();
        assert_eq!(
            raw_integral(&mixed),
            re(3.0) * top_sign(2, DerivativeSide::Left)
        );
    }

    #[test]
    fn trace_integral_examples() {
        assert_eq!(trace_integral(&GrassmannElement::one(2).unwrap()), re(4.0));
        let e = make_element(3, &[(vec![1, 3], vec![1, 3], re(1.0))]).unwrap();
        assert_eq!(trace_integral(&e), re(-2.0));
        let off = make_element(2, &[(vec![1], vec![2], re(1.0))]).unwrap();
        assert_eq!(trace_integral(&off), re(0.0));
    }

    #[test]
    fn fast_trace_matches_literal_weight() {
        for m in 1..=4 {
            for mono in Monomial::all(m) {
                let e = GrassmannElement::monomial(m, mono, re(1.0)).unwrap();
                let lit = trace_integral_with(&e, DerivativeSide::Left).unwrap();
                assert_eq!(trace_integral(&e), lit, "{mono:?}");
            }
        }
    }

    #[test]
    fn right_derivatives_break_odd_m() {
        let e = GrassmannElement::one(1).unwrap();
        assert_eq!(
            trace_integral_with(&e, DerivativeSide::Right).unwrap(),
            re(-2.0)
        );
        let e = GrassmannElement::one(2).unwrap();
        assert_eq!(
            trace_integral_with(&e, DerivativeSide::Right).unwrap(),
            re(4.0)
        );
    }

    #[test]
    fn pair_closed_form_examples() {
        let n1 = Monomial::from_indices(&[1], &[1], 2).unwrap();
        assert_eq!(pair_integral_closed_form(n1, n1, 2).unwrap(), re(2.0));
        let x = Monomial::from_indices(&[1], &[2], 2).unwrap();
        assert_eq!(pair_integral_closed_form(x, x, 2).unwrap(), re(0.0));
        assert_eq!(
            pair_integral_closed_form(Monomial::ONE, Monomial::ONE, 2).unwrap(),
            re(4.0)
        );
    }

    #[test]
    fn pair_closed_form_matches_star_exhaustive_m2() {
        let m = 2;
        for a in Monomial::all(m) {
            for b in Monomial::all(m) {
                let via_star = trace_integral(&star_monomials(a, b, m).unwrap());
                let closed = pair_integral_closed_form(a, b, m).unwrap();
                assert_eq!(via_star, closed, "{a:?} ⋆ {b:?}");
                assert_eq!(pair_trace_expanded(a, b, m), closed.re);
            }
        }
    }

    #[test]
    fn expectation_requires_normalization() {
        let two = GrassmannElement::one(1).unwrap();
        assert!(matches!(
            expectation(&two, &two),
            Err(Error::UnnormalizedDensity(_))
        ));
        let rho = two.scale(re(0.5));
        assert_eq!(
            expectation(&rho, &GrassmannElement::one(1).unwrap()).unwrap(),
            re(1.0)
        );
    }
}
