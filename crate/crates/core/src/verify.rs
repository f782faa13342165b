//! Seeded Monte Carlo check of ensemble monotonicity: random pure state,
//! random pure-to-pure U(1) channel, compare `M(ψ)` with `Σ_x p_x M(φ_x)`.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{apply_channel_pure, random_channel_with};
use crate::error::{Error, Result};
use crate::monotones::{vidal_f, MonotoneId};
use crate::sampling;
use crate::states::StandardState;

/// A trial violates monotonicity when its margin is below `-MARGIN_TOL`.
pub const MARGIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyParams {
    pub measure: MonotoneId,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub shifts: Vec<i64>,
    pub kraus_per_shift: usize,
}

impl VerifyParams {
    pub fn new(
        measure: MonotoneId,
        dim: usize,
        trials: usize,
        seed: u64,
        shifts: Vec<i64>,
    ) -> Self {
        Self {
            measure,
            dim,
            trials,
            seed,
            shifts,
            kraus_per_shift: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub measure: MonotoneId,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub shifts: Vec<i64>,
    pub kraus_per_shift: usize,
    pub violations: usize,
    /// Most negative `M(ψ) − Σ p_x M(φ_x)` seen.
    pub worst_margin: f64,
    /// Trials where some tail sum `F_k` increased on average.
    pub majorization_violations: usize,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub margin: f64,
    /// Number of outcomes with nonzero probability.
    pub p_count: usize,
    /// Smallest `F_k(ψ) − Σ p_x F_k(φ_x)` over `k = 2..=d`.
    pub majorization_margin: f64,
}

pub fn run_trial(params: &VerifyParams, trial: usize) -> Result<TrialOutcome> {
    let mut rng = sampling::derived_rng(params.seed, trial as u64);
    let psi = StandardState::from_amplitudes(&sampling::haar_vector(params.dim, &mut rng))?;
    let channel =
        random_channel_with(params.dim, &params.shifts, params.kraus_per_shift, &mut rng)?;
    let ens = apply_channel_pure(&channel, &psi)?;

    let before = params.measure.evaluate(&psi)?;
    let mut after = 0.0;
    for (p, phi) in &ens.members {
        after += p * params.measure.evaluate(phi)?;
    }

    let mut majorization_margin = f64::INFINITY;
    for k in 2..=params.dim {
        let mut avg = 0.0;
        for (p, phi) in &ens.members {
            avg += p * vidal_f(phi, k)?;
        }
        majorization_margin = majorization_margin.min(vidal_f(&psi, k)? - avg);
    }

    Ok(TrialOutcome {
        trial,
        margin: before - after,
        p_count: ens.len(),
        majorization_margin,
    })
}

pub fn verify_monotonicity(
    params: &VerifyParams,
) -> Result<(VerificationReport, Vec<TrialOutcome>)> {
    if params.dim < 2 {
        return Err(Error::BadConfig(format!("dimension {} < 2", params.dim)));
    }
    params.measure.check_dim(params.dim)?;
    let start = Instant::now();
    let outcomes = (0..params.trials)
        .into_par_iter()
        .map(|t| run_trial(params, t))
        .collect::<Result<Vec<_>>>()?;
    let report = VerificationReport {
        measure: params.measure,
        dim: params.dim,
        trials: params.trials,
        seed: params.seed,
        shifts: params.shifts.clone(),
        kraus_per_shift: params.kraus_per_shift,
        violations: outcomes.iter().filter(|o| o.margin < -MARGIN_TOL).count(),
        worst_margin: outcomes
            .iter()
            .map(|o| o.margin)
            .fold(f64::INFINITY, f64::min),
        majorization_violations: outcomes
            .iter()
            .filter(|o| o.majorization_margin < -MARGIN_TOL)
            .count(),
        runtime_ms: start.elapsed().as_millis() as u64,
    };
    Ok((report, outcomes))
}

/// Per-trial rows: `trial,margin,p_count`.
pub fn outcomes_csv(outcomes: &[TrialOutcome]) -> String {
    let mut out = String::from("trial,margin,p_count\n");
    for o in outcomes {
        out.push_str(&format!("{},{:e},{}\n", o.trial, o.margin, o.p_count));
    }
    out
}
