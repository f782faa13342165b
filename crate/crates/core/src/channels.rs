//! U(1)-covariant operations. Every Kraus operator shifts the number by a
//! fixed amount: `K = Σ_n k_n |n + ℓ⟩⟨n|`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numerics::{c, ComplexMatrix, C64};
use crate::sampling;
use crate::states::{DensityMatrix, StandardState};

/// Outcomes with probability at or below this are dropped.
pub const PROB_EPS: f64 = 1e-12;
pub const COMPLETENESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct U1Kraus {
    pub shift: i64,
    /// `n → k_{ℓ,n}`; missing entries are zero.
    pub coeffs: BTreeMap<usize, C64>,
    /// Distinguishes Kraus operators that share a shift.
    pub tag: usize,
}

impl U1Kraus {
    pub fn new(shift: i64, coeffs: BTreeMap<usize, C64>, tag: usize) -> Self {
        Self { shift, coeffs, tag }
    }

    /// Identity on a `dim`-sector window.
    pub fn identity(dim: usize) -> Self {
        Self::new(0, (0..dim).map(|n| (n, c(1.0, 0.0))).collect(), 0)
    }

    /// Projector `|n⟩⟨n|`.
    pub fn number_projector(n: usize) -> Self {
        Self::new(0, [(n, c(1.0, 0.0))].into_iter().collect(), n)
    }

    pub fn coeff(&self, n: usize) -> C64 {
        self.coeffs.get(&n).copied().unwrap_or(c(0.0, 0.0))
    }

    /// Target sector of `n`, if it stays inside `0..dim`.
    pub fn target(&self, n: usize, dim: usize) -> Option<usize> {
        let m = n as i64 + self.shift;
        (0..dim as i64).contains(&m).then_some(m as usize)
    }

    pub fn matrix(&self, dim: usize) -> ComplexMatrix {
        let mut k = ComplexMatrix::zeros(dim, dim);
        for (&n, &z) in &self.coeffs {
            if n < dim {
                if let Some(m) = self.target(n, dim) {
                    k[(m, n)] = z;
                }
            }
        }
        k
    }
}

/// A U(1)-covariant instrument: outcome `x` applies the Kraus operators of
/// `outcomes[x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct U1Channel {
    pub dim: usize,
    pub outcomes: Vec<Vec<U1Kraus>>,
}

impl U1Channel {
    pub fn new(dim: usize, outcomes: Vec<Vec<U1Kraus>>) -> Self {
        Self { dim, outcomes }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, vec![vec![U1Kraus::identity(dim)]])
    }

    /// Projective measurement of the number operator.
    pub fn number_measurement(dim: usize) -> Self {
        Self::new(
            dim,
            (0..dim)
                .map(|n| vec![U1Kraus::number_projector(n)])
                .collect(),
        )
    }

    pub fn kraus(&self) -> impl Iterator<Item = &U1Kraus> {
        self.outcomes.iter().flatten()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// `Σ |k_{ℓ,n}|²` over every Kraus operator, per `n`.
    pub completeness: Vec<f64>,
    pub trace_preserving: bool,
}

pub fn validate_channel(ch: &U1Channel) -> Result<ValidationReport> {
    let mut sums = vec![0.0; ch.dim];
    for k in ch.kraus() {
        for (&n, z) in &k.coeffs {
            if z.norm_sqr() == 0.0 {
                continue;
            }
            if n >= ch.dim || k.target(n, ch.dim).is_none() {
                return Err(Error::ShiftOutOfRange {
                    shift: k.shift,
                    n,
                    dim: ch.dim,
                });
            }
            sums[n] += z.norm_sqr();
        }
    }
    if let Some((n, &sum)) = sums
        .iter()
        .enumerate()
        .find(|(_, &s)| s > 1.0 + COMPLETENESS_TOL)
    {
        return Err(Error::OvercompleteChannel { n, sum });
    }
    let trace_preserving = sums.iter().all(|s| (s - 1.0).abs() <= COMPLETENESS_TOL);
    Ok(ValidationReport {
        completeness: sums,
        trace_preserving,
    })
}

/// Samples a trace-preserving channel. For each `n` the coefficients over
/// all admissible `(ℓ, α)` form an independent Haar-random unit vector;
/// every Kraus operator is its own outcome.
pub fn random_channel(
    dim: usize,
    shifts: &[i64],
    kraus_per_shift: usize,
    seed: u64,
) -> Result<U1Channel> {
    let mut rng = sampling::derived_rng(seed, 0);
    random_channel_with(dim, shifts, kraus_per_shift, &mut rng)
}

pub(crate) fn random_channel_with<R: rand::Rng + ?Sized>(
    dim: usize,
    shifts: &[i64],
    kraus_per_shift: usize,
    rng: &mut R,
) -> Result<U1Channel> {
    let mut shifts = shifts.to_vec();
    shifts.sort_unstable();
    shifts.dedup();
    if shifts.is_empty() {
        return Err(Error::EmptyShiftSet);
    }
    if dim < 2 {
        return Err(Error::BadConfig(format!("dimension {dim} < 2")));
    }
    if kraus_per_shift == 0 {
        return Err(Error::BadConfig("kraus_per_shift must be positive".into()));
    }
    let mut ops: Vec<U1Kraus> = shifts
        .iter()
        .flat_map(|&shift| {
            (0..kraus_per_shift).map(move |tag| U1Kraus::new(shift, BTreeMap::new(), tag))
        })
        .collect();
    for n in 0..dim {
        let admissible: Vec<usize> = (0..ops.len())
            .filter(|&i| ops[i].target(n, dim).is_some())
            .collect();
        if admissible.is_empty() {
            return Err(Error::NoAdmissibleShift(n));
        }
        let v = sampling::haar_vector(admissible.len(), rng);
        for (&i, &z) in admissible.iter().zip(v.iter()) {
            ops[i].coeffs.insert(n, z);
        }
    }
    Ok(U1Channel::new(
        dim,
        ops.into_iter()
            .filter(|k| !k.coeffs.is_empty())
            .map(|k| vec![k])
            .collect(),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble<T> {
    pub members: Vec<(f64, T)>,
}

impl<T> Ensemble<T> {
    pub fn total_probability(&self) -> f64 {
        self.members.iter().map(|(p, _)| p).sum()
    }

    /// `Σ p_i f(x_i)`.
    pub fn average<F: FnMut(&T) -> f64>(&self, mut f: F) -> f64 {
        self.members.iter().map(|(p, x)| p * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Applies one Kraus operator to a standard state. Returns the outcome
/// probability and, when it exceeds [`PROB_EPS`], the post-measurement state
/// (still in standard form, shifted by `ℓ`).
pub fn apply_kraus_pure(k: &U1Kraus, st: &StandardState) -> (f64, Option<StandardState>) {
    let dim = st.dim();
    let mut out = vec![0.0; dim];
    for (n, &w) in st.weights().iter().enumerate() {
        if let Some(m) = k.target(n, dim) {
            out[m] += w * k.coeff(n).norm_sqr();
        }
    }
    let p: f64 = out.iter().sum();
    if p > PROB_EPS {
        (p, Some(StandardState::from_unnormalized(out)))
    } else {
        (0.0, None)
    }
}

fn require_trace_preserving(ch: &U1Channel) -> Result<()> {
    if validate_channel(ch)?.trace_preserving {
        Ok(())
    } else {
        Err(Error::NotTracePreserving)
    }
}

pub fn apply_channel_pure(ch: &U1Channel, st: &StandardState) -> Result<Ensemble<StandardState>> {
    if st.dim() != ch.dim {
        return Err(Error::DimensionMismatch {
            expected: ch.dim,
            got: st.dim(),
        });
    }
    require_trace_preserving(ch)?;
    let mut members = Vec::with_capacity(ch.outcomes.len());
    for (x, group) in ch.outcomes.iter().enumerate() {
        let k = match group.as_slice() {
            [k] => k,
            [] => continue,
            _ => return Err(Error::MixedOutcomeGroup(x)),
        };
        if let (p, Some(out)) = apply_kraus_pure(k, st) {
            members.push((p, out));
        }
    }
    Ok(Ensemble { members })
}

pub fn apply_channel_density(
    ch: &U1Channel,
    rho: &DensityMatrix,
) -> Result<Ensemble<DensityMatrix>> {
    if rho.dim() != ch.dim || !rho.is_number_basis() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim,
            got: rho.ambient_dim(),
        });
    }
    validate_channel(ch)?;
    let mut members = Vec::with_capacity(ch.outcomes.len());
    for group in &ch.outcomes {
        let mut sigma = ComplexMatrix::zeros(ch.dim, ch.dim);
        for k in group {
            let m = k.matrix(ch.dim);
            sigma += &m * rho.matrix() * m.adjoint();
        }
        let p = sigma.trace().re;
        if p > PROB_EPS {
            let sigma = sigma.unscale(p);
            let sigma = (&sigma + sigma.adjoint()).scale(0.5);
            members.push((p, DensityMatrix::new(sigma)?));
        }
    }
    Ok(Ensemble { members })
}
