//! Convention-pinning identities: the trace formula on basis monomials, the pair
//! integral closed form, the anticommutation relations under `⋆`, trace cyclicity and
//! positivity of `∫D η* ⋆ η`. Each runs with a selectable derivative side so that the
//! wrong sign convention can be shown to fail.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fock::monomial_operator;
use crate::grassmann::{
    half_pairs, pair_integral_closed_form, parity, star, star_monomials, trace_integral_with,
    DerivativeSide, GrassmannElement, Monomial,
};

/// Largest `m` the suite runs at.
pub const SELFTEST_MAX_MODES: usize = 4;

/// Relative tolerance of the floating-point identities.
pub const SELFTEST_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityResult {
    pub name: &'static str,
    pub m: usize,
    pub passed: bool,
    /// Worst deviation (or, for positivity, the most negative value) seen.
    pub max_dev: f64,
}

impl IdentityResult {
    pub fn label(&self) -> String {
        format!("{} (m={})", self.name, self.m)
    }
}

/// Runs every identity at `m = 1..=max_m`, in a fixed order.
pub fn run_selftest(side: DerivativeSide, max_m: usize, seed: u64) -> Result<Vec<IdentityResult>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for m in 1..=max_m.min(SELFTEST_MAX_MODES) {
        out.push(trace_formula(m, side)?);
        out.push(pair_closed_form(m, side, &mut rng)?);
        out.push(car(m, side)?);
        out.push(cyclicity(m, side, &mut rng)?);
        out.push(positivity(m, side, &mut rng)?);
    }
    Ok(out)
}

pub fn first_failure(results: &[IdentityResult]) -> Option<&IdentityResult> {
    results.iter().find(|r| !r.passed)
}

/// `∫D Ψ̄_I Ψ_J = δ_IJ (−1)^{s_I} 2^{m−|I|} = tr Θ⁻¹(Ψ̄_I Ψ_J)`, exactly, on all `4^m` monomials.
fn trace_formula(m: usize, side: DerivativeSide) -> Result<IdentityResult> {
    let mut dev: f64 = 0.0;
    for mono in Monomial::all(m) {
        let expected = if mono.bar == mono.unbar {
            parity(half_pairs(mono.bar.len())) * (1u64 << (m - mono.bar.len())) as f64
        } else {
            0.0
        };
        let value = trace_integral_with(&GrassmannElement::monomial(m, mono, one())?, side)?;
        let oracle = monomial_operator(mono, m)?.trace();
        dev = dev
            .max((value - expected).norm())
            .max((oracle - expected).norm());
    }
    Ok(IdentityResult {
        name: "trace-formula",
        m,
        passed: dev == 0.0,
        max_dev: dev,
    })
}

/// Closed form against `∫D ∘ ⋆` on all monomial pairs for `m ≤ 3`, on 4096 random pairs above.
fn pair_closed_form(
    m: usize,
    side: DerivativeSide,
    rng: &mut ChaCha8Rng,
) -> Result<IdentityResult> {
    let all: Vec<Monomial> = Monomial::all(m).collect();
    let pairs: Vec<(Monomial, Monomial)> = if m <= 3 {
        all.iter()
            .flat_map(|&a| all.iter().map(move |&b| (a, b)))
            .collect()
    } else {
        (0..4096)
            .map(|_| {
                (
                    all[rng.random_range(0..all.len())],
                    all[rng.random_range(0..all.len())],
                )
            })
            .collect()
    };
    let mut dev: f64 = 0.0;
    for (a, b) in pairs {
        let closed = pair_integral_closed_form(a, b, m)?;
        let via_star = trace_integral_with(&star_monomials(a, b, m)?, side)?;
        dev = dev.max((closed - via_star).norm());
    }
    Ok(IdentityResult {
        name: "pair-closed-form",
        m,
        passed: dev <= 1e-12,
        max_dev: dev,
    })
}

/// `{ψ_i, ψ̄_j}_⋆ = δ_ij`, `{ψ_i, ψ_j}_⋆ = {ψ̄_i, ψ̄_j}_⋆ = 0`, and `∫D {ψ_i, ψ̄_i}_⋆ = 2^m`.
fn car(m: usize, side: DerivativeSide) -> Result<IdentityResult> {
    let mut dev: f64 = 0.0;
    let dim = (1u64 << m) as f64;
    for i in 1..=m {
        for j in 1..=m {
            for (bi, bj) in [(false, true), (false, false), (true, true)] {
                let a = GrassmannElement::generator(m, i, bi)?;
                let b = GrassmannElement::generator(m, j, bj)?;
                let anti = &star(&a, &b)? + &star(&b, &a)?;
                let delta = if i == j && bi != bj { 1.0 } else { 0.0 };
                let expected = GrassmannElement::one(m)?.scale(Complex64::new(delta, 0.0));
                dev = dev.max(anti.max_abs_diff(&expected));
                dev = dev.max((trace_integral_with(&anti, side)? - delta * dim).norm());
            }
        }
    }
    Ok(IdentityResult {
        name: "car",
        m,
        passed: dev <= SELFTEST_TOL,
        max_dev: dev,
    })
}

/// `∫D a ⋆ b = ∫D b ⋆ a` on random elements.
fn cyclicity(m: usize, side: DerivativeSide, rng: &mut ChaCha8Rng) -> Result<IdentityResult> {
    let mut dev: f64 = 0.0;
    for _ in 0..10 {
        let a = GrassmannElement::random(m, rng)?;
        let b = GrassmannElement::random(m, rng)?;
        let ab = trace_integral_with(&star(&a, &b)?, side)?;
        let ba = trace_integral_with(&star(&b, &a)?, side)?;
        dev = dev.max((ab - ba).norm() / (1.0 + ab.norm()));
    }
    Ok(IdentityResult {
        name: "cyclicity",
        m,
        passed: dev <= SELFTEST_TOL,
        max_dev: dev,
    })
}

/// `∫D η* ⋆ η` real and nonnegative on random `η`.
fn positivity(m: usize, side: DerivativeSide, rng: &mut ChaCha8Rng) -> Result<IdentityResult> {
    let mut worst: f64 = 0.0;
    let mut passed = true;
    for _ in 0..10 {
        let eta = GrassmannElement::random(m, rng)?;
        let v = trace_integral_with(&star(&eta.involution(), &eta)?, side)?;
        let scale = 1.0 + v.norm();
        passed &= v.re >= -SELFTEST_TOL * scale && v.im.abs() <= SELFTEST_TOL * scale;
        worst = worst.min(v.re / scale);
    }
    Ok(IdentityResult {
        name: "positivity",
        m,
        passed,
        max_dev: 0.0 - worst,
    })
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}
