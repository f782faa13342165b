//! Convex-roof extension of pure-state measures.
//!
//! Every decomposition of a rank-`r` state `ρ = Σ_j e_j |v_j⟩⟨v_j|` into `m`
//! pure states is `|φ_i⟩ = Σ_j W_ij √e_j |v_j⟩` for an `m×r` isometry `W`.
//! The optimizer walks the isometry manifold by left-multiplying `W` with
//! two-row rotations and keeps the lowest average it finds.

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{Ensemble, PROB_EPS};
use crate::error::{Error, Result};
use crate::monotones::{self, MonotoneId};
use crate::numerics::{self, c, ComplexMatrix, ComplexVector, C64};
use crate::sampling;
use crate::states::{spectrum_of_weights, DensityMatrix, StandardState, SPECTRUM_EPS};

/// Deviation from `W†W = I` tolerated in a supplied mixing matrix.
pub const ISOMETRY_TOL: f64 = 1e-9;
/// Restart values closer than this count as ties.
const TIE_EPS: f64 = 1e-12;
const INITIAL_STEP: f64 = 0.4;
/// A move must lower the objective by `SUFFICIENT_DECREASE * step^2`;
/// otherwise flat valleys are crawled at a fixed step for thousands of sweeps.
const SUFFICIENT_DECREASE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct RoofConfig {
    /// Number of pure states `m`; `None` picks `min(2r, r + 2)`.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    /// Cap on coordinate sweeps per restart.
    pub max_iters: usize,
    pub step_tolerance: f64,
    pub seed: u64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: 32,
            max_iters: 20_000,
            step_tolerance: 1e-6,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RoofResult {
    pub value: f64,
    /// Normalized pure states in the basis of the input matrix.
    #[serde(serialize_with = "crate::io::serialize_vector_ensemble")]
    pub ensemble: Ensemble<ComplexVector>,
    pub converged: bool,
    pub iterations_used: usize,
    /// The sector populations of the input have a gap.
    pub gapped_support: bool,
}

/// Subnormalized eigenvectors `√e_j |v_j⟩` of the support, as columns.
fn support_vectors(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let eig = numerics::hermitian_eig(rho.matrix())?;
    let cols: Vec<ComplexVector> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > SPECTRUM_EPS)
        .map(|(j, &e)| eig.vectors.column(j).scale(e.sqrt()))
        .collect();
    Ok(ComplexMatrix::from_columns(&cols))
}

pub fn decomposition_from_map(
    rho: &DensityMatrix,
    mix: &ComplexMatrix,
) -> Result<Ensemble<ComplexVector>> {
    let support = support_vectors(rho)?;
    let rank = support.ncols();
    if mix.ncols() != rank {
        return Err(Error::RankMismatch {
            rank,
            got: mix.ncols(),
        });
    }
    let gram = mix.adjoint() * mix;
    let dev = numerics::max_abs_diff(&gram, &ComplexMatrix::identity(rank, rank));
    if dev > ISOMETRY_TOL {
        return Err(Error::NotIsometry(dev));
    }
    Ok(members_of(&support, mix))
}

fn members_of(support: &ComplexMatrix, mix: &ComplexMatrix) -> Ensemble<ComplexVector> {
    let phi = support * mix.transpose();
    let members = phi
        .column_iter()
        .filter_map(|col| {
            let p = col.norm_squared();
            (p > PROB_EPS).then(|| (p, col.unscale(p.sqrt())))
        })
        .collect();
    Ensemble { members }
}

/// Evaluates `Σ_i p_i M(φ_i)` for decompositions of a fixed state.
struct Objective<'a> {
    measure: MonotoneId,
    support: &'a ComplexMatrix,
    sectors: &'a [usize],
    ambient: usize,
}

impl Objective<'_> {
    fn pure_value(&self, phi: impl Iterator<Item = C64>) -> Result<(f64, f64)> {
        let mut w = vec![0.0; self.ambient];
        for (z, &n) in phi.zip(self.sectors) {
            w[n] += z.norm_sqr();
        }
        let p: f64 = w.iter().sum();
        if p <= PROB_EPS {
            return Ok((0.0, 0.0));
        }
        let st = StandardState::from_unnormalized(w);
        Ok((p, self.measure.evaluate(&st)?))
    }

    fn value(&self, mix: &ComplexMatrix) -> Result<f64> {
        let (d, r) = self.support.shape();
        let mut total = 0.0;
        for i in 0..mix.nrows() {
            let phi = (0..d).map(|a| {
                (0..r)
                    .map(|j| mix[(i, j)] * self.support[(a, j)])
                    .sum::<C64>()
            });
            let (p, v) = self.pure_value(phi)?;
            total += p * v;
        }
        Ok(total)
    }

    fn ensemble_value(&self, ens: &Ensemble<ComplexVector>) -> Result<f64> {
        let mut total = 0.0;
        for (p, v) in &ens.members {
            total += p * self.pure_value(v.iter().copied())?.1;
        }
        Ok(total)
    }
}

/// Two-row rotation applied from the left: real (`X`-type) or with `i`
/// off-diagonals (`Y`-type).
fn rotate_rows(mix: &mut ComplexMatrix, j: usize, k: usize, imaginary: bool, theta: f64) {
    let (s, co) = theta.sin_cos();
    let off = if imaginary { c(0.0, s) } else { c(s, 0.0) };
    let off_t = if imaginary { c(0.0, s) } else { c(-s, 0.0) };
    for col in 0..mix.ncols() {
        let a = mix[(j, col)];
        let b = mix[(k, col)];
        mix[(j, col)] = a * co + off_t * b;
        mix[(k, col)] = off * a + b * co;
    }
}

struct LocalRun {
    value: f64,
    mix: ComplexMatrix,
    converged: bool,
    sweeps: usize,
}

/// Pattern search over the rotation coordinates with step halving.
fn local_search(obj: &Objective, mut mix: ComplexMatrix, cfg: &RoofConfig) -> Result<LocalRun> {
    let m = mix.nrows();
    let coords: Vec<(usize, usize, bool)> = (0..m)
        .flat_map(|j| (j + 1..m).flat_map(move |k| [(j, k, false), (j, k, true)]))
        .collect();
    let mut best = obj.value(&mix)?;
    let mut step = INITIAL_STEP;
    let mut sweeps = 0;
    while sweeps < cfg.max_iters {
        if step < cfg.step_tolerance || coords.is_empty() {
            return Ok(LocalRun {
                value: best,
                mix,
                converged: true,
                sweeps,
            });
        }
        sweeps += 1;
        let mut improved = false;
        for &(j, k, imag) in &coords {
            for dir in [1.0, -1.0] {
                let mut trial = mix.clone();
                rotate_rows(&mut trial, j, k, imag, dir * step);
                let v = obj.value(&trial)?;
                if v < best - SUFFICIENT_DECREASE * step * step {
                    best = v;
                    mix = trial;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(LocalRun {
        value: best,
        mix,
        converged: step < cfg.step_tolerance,
        sweeps,
    })
}

fn gapped(rho: &DensityMatrix) -> bool {
    !spectrum_of_weights(&rho.sector_weights()).is_gapless()
}

/// Best upper bound on the convex roof of `measure` at `rho` found over
/// `cfg.restarts` seeded local searches.
pub fn convex_roof(
    measure: MonotoneId,
    rho: &DensityMatrix,
    cfg: &RoofConfig,
) -> Result<RoofResult> {
    measure.check_dim(rho.ambient_dim())?;
    if cfg.restarts == 0 {
        return Err(Error::BadConfig("restarts must be at least 1".into()));
    }
    let support = support_vectors(rho)?;
    let rank = support.ncols();
    let obj = Objective {
        measure,
        support: &support,
        sectors: rho.sectors(),
        ambient: rho.ambient_dim(),
    };
    if rank <= 1 {
        let ensemble = members_of(&support, &ComplexMatrix::identity(1, 1));
        return Ok(RoofResult {
            value: obj.ensemble_value(&ensemble)?,
            ensemble,
            converged: true,
            iterations_used: 0,
            gapped_support: gapped(rho),
        });
    }
    let m = cfg.ensemble_size.unwrap_or((2 * rank).min(rank + 2));
    if m < rank {
        return Err(Error::BadConfig(format!(
            "ensemble size {m} below rank {rank}"
        )));
    }
    let runs = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = sampling::derived_rng(cfg.seed, i as u64);
            local_search(&obj, sampling::haar_isometry(m, rank, &mut rng), cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = &runs[0];
    for run in &runs[1..] {
        if run.value < best.value - TIE_EPS {
            best = run;
        }
    }
    let mix = sampling::gram_schmidt(&best.mix).unwrap_or_else(|| best.mix.clone());
    let ensemble = members_of(&support, &mix);
    Ok(RoofResult {
        value: obj.ensemble_value(&ensemble)?,
        ensemble,
        converged: best.converged,
        iterations_used: runs.iter().map(|r| r.sweeps).sum(),
        gapped_support: gapped(rho),
    })
}

/// Minimum average over `samples` Haar-random `m×r` isometries. Samples are
/// drawn sequentially from one stream, so a longer run extends a shorter
/// one with the same seed.
pub fn brute_force_roof(
    measure: MonotoneId,
    rho: &DensityMatrix,
    samples: usize,
    m: usize,
    seed: u64,
) -> Result<f64> {
    measure.check_dim(rho.ambient_dim())?;
    let support = support_vectors(rho)?;
    let rank = support.ncols();
    let obj = Objective {
        measure,
        support: &support,
        sectors: rho.sectors(),
        ambient: rho.ambient_dim(),
    };
    if rank <= 1 {
        return obj.value(&ComplexMatrix::identity(1, 1));
    }
    if m < rank {
        return Err(Error::BadConfig(format!(
            "ensemble size {m} below rank {rank}"
        )));
    }
    let mut rng = sampling::derived_rng(seed, 0);
    let mut best = f64::INFINITY;
    for _ in 0..samples {
        let mix = sampling::haar_isometry(m, rank, &mut rng);
        best = best.min(obj.value(&mix)?);
    }
    Ok(best)
}

/// Average of `measure` over an explicit decomposition.
pub fn ensemble_average(
    measure: MonotoneId,
    rho: &DensityMatrix,
    ens: &Ensemble<ComplexVector>,
) -> Result<f64> {
    let mut total = 0.0;
    for (p, v) in &ens.members {
        total += p * measure.evaluate(&rho.standard_form_of(v)?)?;
    }
    Ok(total)
}

/// Qubit frameness of formation through the concurrence, `C₂(ρ)²`.
pub fn fof_via_concurrence(rho: &DensityMatrix) -> Result<f64> {
    let conc = monotones::qubit_concurrence(rho)?;
    Ok(conc * conc)
}

/// Re-assembles `Σ p_i |ψ_i⟩⟨ψ_i|`.
pub fn mixture(ens: &Ensemble<ComplexVector>, dim: usize) -> ComplexMatrix {
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for (p, v) in &ens.members {
        sum += numerics::outer(v, v).scale(*p);
    }
    sum
}
