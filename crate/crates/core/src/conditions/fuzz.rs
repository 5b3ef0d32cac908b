use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{
    check_first_order, check_first_order_form, check_g, check_g_form, check_p, check_p_form,
    check_q, check_q_form, check_t1_full, check_t2_full, order_n_check, pdm1_from_density,
    pdm2_from_density, psd_tolerance, ConditionReport, GrassmannDensity,
};
use crate::error::Result;
use crate::fock::{contraction_check, pdms_from_rho, random_density, DensityOptions};
use crate::linalg::{max_abs, max_abs_diff};

#[derive(Clone, Copy, Debug, Default)]
pub struct FuzzOptions {
    /// Draw densities from the `N`-particle sector (also runs the contraction check when `N ≥ 2`).
    pub sector: Option<usize>,
    /// Include the Grassmann-form T1/T2 checks (the expensive part at larger `m`).
    pub skip_third_order: bool,
}

/// Per-trial outcome.
#[derive(Clone, Debug)]
pub struct FuzzTrial {
    pub seed: u64,
    pub reports: Vec<ConditionReport>,
    /// `max |γ_Grassmann − γ_oracle|` and same for Γ.
    pub pdm_dev: f64,
    /// Largest `|margin_closed − margin_form|` over P, Q, G.
    pub closed_form_gap: f64,
    pub contraction_dev: Option<f64>,
    /// `max |Γ|`, the scale entering the tolerance.
    pub gamma2_norm: f64,
}

impl FuzzTrial {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

#[derive(Clone, Debug)]
pub struct FuzzSummary {
    pub m: usize,
    pub trials: usize,
    pub failures: usize,
    /// Smallest margin seen per condition (keyed `"<name>/<method>"`).
    pub worst_margin: BTreeMap<String, f64>,
    pub max_pdm_dev: f64,
    pub max_closed_form_gap: f64,
    pub max_contraction_dev: Option<f64>,
    pub details: Vec<FuzzTrial>,
}

/// Seed of trial `i` derived from the master seed (SplitMix64 step).
pub fn trial_seed(master: u64, i: usize) -> u64 {
    let mut z = master.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_trial(m: usize, seed: u64, options: FuzzOptions) -> Result<FuzzTrial> {
    let rho = random_density(
        m,
        seed,
        DensityOptions {
            sector: options.sector,
        },
    )?;
    let (g_oracle, big_oracle) = pdms_from_rho(&rho);
    let density = GrassmannDensity::from_rho(&rho)?;
    let g = pdm1_from_density(&density);
    let big = pdm2_from_density(&density);
    let pdm_dev = max_abs_diff(&g.0, &g_oracle.0).max(max_abs_diff(&big.0, &big_oracle.0));
    let gamma2_norm = max_abs(&big.0);
    let tol = psd_tolerance(gamma2_norm);

    let mut reports = vec![
        check_first_order(&g)?,
        check_first_order_form(&density)?,
        order_n_check(&density, 1)?,
        order_n_check(&density, 2)?,
    ];
    let mut closed_form_gap: f64 = 0.0;
    for (closed, form) in [
        (check_p(&g, &big)?, check_p_form(&density)?),
        (check_q(&g, &big)?, check_q_form(&density)?),
        (check_g(&g, &big)?, check_g_form(&density)?),
    ] {
        closed_form_gap = closed_form_gap.max((closed.margin - form.margin).abs());
        reports.push(closed);
        reports.push(form);
    }
    if !options.skip_third_order {
        reports.push(check_t1_full(&density)?);
        reports.push(check_t2_full(&density)?);
    }
    let reports = reports.into_iter().map(|r| r.with_tol(tol)).collect();
    let contraction_dev = match options.sector {
        Some(n) if n >= 2 => Some(contraction_check(&rho, n, None)?),
        _ => None,
    };
    Ok(FuzzTrial {
        seed,
        reports,
        pdm_dev,
        closed_form_gap,
        contraction_dev,
        gamma2_norm,
    })
}

/// Runs every check on `trials` random genuine densities. Trials are independent and
/// run in parallel; results are collected in trial order.
pub fn fuzz_conditions(
    m: usize,
    trials: usize,
    seed: u64,
    options: FuzzOptions,
) -> Result<FuzzSummary> {
    let details = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(m, trial_seed(seed, i), options))
        .collect::<Result<Vec<_>>>()?;
    let mut worst_margin: BTreeMap<String, f64> = BTreeMap::new();
    let mut max_pdm_dev: f64 = 0.0;
    let mut max_gap: f64 = 0.0;
    let mut max_contraction: Option<f64> = None;
    for t in &details {
        for r in &t.reports {
            let key = format!("{}/{}", r.condition, r.method.as_str());
            let e = worst_margin.entry(key).or_insert(f64::INFINITY);
            *e = e.min(r.margin);
        }
        max_pdm_dev = max_pdm_dev.max(t.pdm_dev);
        max_gap = max_gap.max(t.closed_form_gap);
        if let Some(c) = t.contraction_dev {
            max_contraction = Some(max_contraction.unwrap_or(0.0).max(c));
        }
    }
    Ok(FuzzSummary {
        m,
        trials,
        failures: details.iter().filter(|t| !t.passed()).count(),
        worst_margin,
        max_pdm_dev,
        max_closed_form_gap: max_gap,
        max_contraction_dev: max_contraction,
        details,
    })
}
