//! State model: sectored pure states, the standard form, number spectra,
//! U(1) dephasing, purification and majorization.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numerics::{self, c, ComplexMatrix, ComplexVector, C64};

/// Weights at or below this are treated as unoccupied.
pub const SPECTRUM_EPS: f64 = 1e-12;
/// Normalization slack accepted at ingestion.
pub const NORM_TOL: f64 = 1e-9;
/// Trace slack for density matrices.
pub const TRACE_TOL: f64 = 1e-9;

/// Pure state with amplitudes indexed by charge sector `n` and multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct SectoredPureState {
    dim: usize,
    sectors: BTreeMap<usize, Vec<C64>>,
}

impl SectoredPureState {
    pub fn new(dim: usize, sectors: BTreeMap<usize, Vec<C64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidState("dimension must be positive".into()));
        }
        if let Some((&n, _)) = sectors.iter().find(|(&n, _)| n >= dim) {
            return Err(Error::InvalidState(format!(
                "sector {n} lies outside the window 0..{dim}"
            )));
        }
        if sectors
            .values()
            .any(|amps| amps.iter().any(|z| !z.is_finite()))
        {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        Ok(Self { dim, sectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sectors(&self) -> &BTreeMap<usize, Vec<C64>> {
        &self.sectors
    }

    pub fn norm_sqr(&self) -> f64 {
        self.sectors
            .values()
            .flat_map(|a| a.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Multiplicity of each sector in the flattened basis. Absent sectors
    /// still get one slot so that multiplicity-free states live in C^d.
    fn multiplicities(&self) -> Vec<usize> {
        (0..self.dim)
            .map(|n| self.sectors.get(&n).map_or(1, |a| a.len().max(1)))
            .collect()
    }

    /// Amplitude vector over the flattened `(n, β)` basis and the sector
    /// label of every basis element.
    pub fn flatten(&self) -> (ComplexVector, Vec<usize>) {
        let mult = self.multiplicities();
        let mut labels = Vec::new();
        let mut amps = Vec::new();
        for (n, &m) in mult.iter().enumerate() {
            let given = self.sectors.get(&n);
            for beta in 0..m {
                labels.push(n);
                amps.push(
                    given
                        .and_then(|a| a.get(beta))
                        .copied()
                        .unwrap_or(c(0.0, 0.0)),
                );
            }
        }
        (ComplexVector::from_vec(amps), labels)
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        let (v, labels) = self.flatten();
        let v = v.unscale(norm.sqrt());
        DensityMatrix::with_sectors(numerics::outer(&v, &v), labels)
    }
}

/// Pure state in standard form `Σ √λ_n |n⟩`, stored as its weights.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardState {
    weights: Vec<f64>,
}

impl StandardState {
    /// Accepts weights summing to one within [`NORM_TOL`] and rescales them
    /// to unit sum.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidState("no weights".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidState(format!(
                "weight {w} is negative or not finite"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self::renormalized(weights, total))
    }

    /// For weights known to be nonnegative with positive total.
    pub(crate) fn from_unnormalized(weights: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        Self::renormalized(weights, total)
    }

    fn renormalized(mut weights: Vec<f64>, total: f64) -> Self {
        if total != 1.0 {
            weights.iter_mut().for_each(|w| *w /= total);
        }
        Self { weights }
    }

    pub fn number_state(dim: usize, n: usize) -> Self {
        assert!(n < dim, "number state outside window");
        let mut weights = vec![0.0; dim];
        weights[n] = 1.0;
        Self { weights }
    }

    pub fn uniform(dim: usize) -> Self {
        Self {
            weights: vec![1.0 / dim as f64; dim],
        }
    }

    /// Standard form of a number-basis amplitude vector.
    pub fn from_amplitudes(v: &ComplexVector) -> Result<Self> {
        let w: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
        let total: f64 = w.iter().sum();
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Ok(Self::from_unnormalized(w))
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Same weights in a window of `dim ≥ self.dim()` sectors.
    pub fn padded(&self, dim: usize) -> Result<Self> {
        if dim < self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: dim,
            });
        }
        let mut weights = self.weights.clone();
        weights.resize(dim, 0.0);
        Ok(Self { weights })
    }

    pub fn amplitudes(&self) -> ComplexVector {
        ComplexVector::from_iterator(self.dim(), self.weights.iter().map(|w| c(w.sqrt(), 0.0)))
    }

    pub fn projector(&self) -> DensityMatrix {
        let v = self.amplitudes();
        DensityMatrix {
            matrix: numerics::outer(&v, &v),
            sectors: (0..self.dim()).collect(),
        }
    }

    /// Mean and variance of the number operator.
    pub fn number_moments(&self) -> (f64, f64) {
        let mean: f64 = self
            .weights
            .iter()
            .enumerate()
            .map(|(n, w)| w * n as f64)
            .sum();
        let var: f64 = self
            .weights
            .iter()
            .enumerate()
            .map(|(n, w)| w * (n as f64 - mean).powi(2))
            .sum();
        (mean, var)
    }
}

pub fn standard_form(s: &SectoredPureState) -> Result<StandardState> {
    let norm = s.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let weights = (0..s.dim())
        .map(|n| {
            s.sectors()
                .get(&n)
                .map_or(0.0, |a| a.iter().map(|z| z.norm_sqr()).sum())
        })
        .collect();
    Ok(StandardState::from_unnormalized(weights))
}

/// Occupied number sectors, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberSpectrum {
    pub support: Vec<usize>,
}

impl NumberSpectrum {
    pub fn n_min(&self) -> Option<usize> {
        self.support.first().copied()
    }

    pub fn n_max(&self) -> Option<usize> {
        self.support.last().copied()
    }

    pub fn is_gapless(&self) -> bool {
        self.support.windows(2).all(|w| w[1] == w[0] + 1)
    }
}

pub fn spectrum(st: &StandardState) -> NumberSpectrum {
    spectrum_of_weights(st.weights())
}

pub(crate) fn spectrum_of_weights(weights: &[f64]) -> NumberSpectrum {
    NumberSpectrum {
        support: weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > SPECTRUM_EPS)
            .map(|(n, _)| n)
            .collect(),
    }
}

pub fn is_gapless(sp: &NumberSpectrum) -> bool {
    sp.is_gapless()
}

/// Density matrix in a basis whose elements each carry a sector label.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    sectors: Vec<usize>,
}

impl DensityMatrix {
    /// Number-basis density matrix: basis element `i` is sector `i`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let labels = (0..matrix.nrows()).collect();
        Self::with_sectors(matrix, labels)
    }

    pub fn with_sectors(matrix: ComplexMatrix, sectors: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidDensity(
                "matrix must be square and nonempty".into(),
            ));
        }
        if sectors.len() != matrix.nrows() {
            return Err(Error::InvalidDensity(format!(
                "{} sector labels for a {}-dimensional matrix",
                sectors.len(),
                matrix.nrows()
            )));
        }
        if matrix.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidDensity("non-finite entry".into()));
        }
        if matrix.nrows() > numerics::MAX_DIM {
            return Err(Error::DimensionTooLarge(matrix.nrows()));
        }
        let defect = numerics::hermiticity_defect(&matrix);
        if defect > numerics::H_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (defect {defect:e})"
            )));
        }
        if !numerics::is_unit_trace(&matrix, TRACE_TOL) {
            return Err(Error::InvalidDensity(format!(
                "trace {} is not 1",
                matrix.trace()
            )));
        }
        let eig =
            numerics::hermitian_eig(&matrix).map_err(|e| Error::InvalidDensity(e.to_string()))?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -numerics::P_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { matrix, sectors })
    }

    pub fn pure(v: &ComplexVector) -> Result<Self> {
        let norm = v.norm();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::InvalidDensity("zero vector".into()));
        }
        let v = v.unscale(norm);
        Self::new(numerics::outer(&v, &v))
    }

    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        let d = weights.len();
        Self::new(ComplexMatrix::from_fn(d, d, |i, j| {
            if i == j {
                c(weights[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        }))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn sectors(&self) -> &[usize] {
        &self.sectors
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// True when basis element `i` is sector `i` (no multiplicities).
    pub fn is_number_basis(&self) -> bool {
        self.sectors.iter().enumerate().all(|(i, &n)| i == n)
    }

    /// Number of sector slots, `max label + 1`.
    pub fn ambient_dim(&self) -> usize {
        self.sectors.iter().max().map_or(0, |m| m + 1)
    }

    /// Population of each number sector.
    pub fn sector_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.ambient_dim()];
        for (i, &n) in self.sectors.iter().enumerate() {
            w[n] += self.matrix[(i, i)].re;
        }
        w
    }

    /// Standard form of a pure vector expressed in this matrix's basis.
    pub fn standard_form_of(&self, v: &ComplexVector) -> Result<StandardState> {
        let mut w = vec![0.0; self.ambient_dim()];
        for (i, &n) in self.sectors.iter().enumerate() {
            w[n] += v[i].norm_sqr();
        }
        let total: f64 = w.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Ok(StandardState::from_unnormalized(w))
    }
}

/// U(1) twirl: removes every coherence between distinct number sectors and
/// keeps within-sector blocks intact.
pub fn twirl(rho: &DensityMatrix) -> DensityMatrix {
    let s = &rho.sectors;
    let matrix = ComplexMatrix::from_fn(rho.dim(), rho.dim(), |i, j| {
        if s[i] == s[j] {
            rho.matrix[(i, j)]
        } else {
            c(0.0, 0.0)
        }
    });
    DensityMatrix {
        matrix,
        sectors: s.clone(),
    }
}

/// Pure state on `S ⊗ R` with every amplitude on the line `n_S + n_R = t`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartitePureState {
    /// `amplitudes[(n_s, n_r)]`
    amplitudes: ComplexMatrix,
    total_charge: usize,
}

impl BipartitePureState {
    pub fn new(amplitudes: ComplexMatrix, total_charge: usize) -> Result<Self> {
        let (rows, cols) = amplitudes.shape();
        for i in 0..rows {
            for j in 0..cols {
                if amplitudes[(i, j)].norm() > 0.0 && i + j != total_charge {
                    return Err(Error::InvalidState(format!(
                        "amplitude at ({i}, {j}) is off the charge line {total_charge}"
                    )));
                }
            }
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            amplitudes,
            total_charge,
        })
    }

    pub fn amplitude(&self, n_s: usize, n_r: usize) -> C64 {
        if n_s < self.amplitudes.nrows() && n_r < self.amplitudes.ncols() {
            self.amplitudes[(n_s, n_r)]
        } else {
            c(0.0, 0.0)
        }
    }

    pub fn total_charge(&self) -> usize {
        self.total_charge
    }

    pub fn dims(&self) -> (usize, usize) {
        self.amplitudes.shape()
    }

    /// Reduced state of `S` (trace over `R`).
    pub fn reduced_s(&self) -> ComplexMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// Reduced state of `R` (trace over `S`).
    pub fn reduced_r(&self) -> ComplexMatrix {
        let t = self.amplitudes.transpose();
        &t * t.adjoint()
    }
}

/// Purification of the twirled state: `Σ √λ_n |n⟩_S |n_max − n⟩_R`.
pub fn purify(st: &StandardState) -> BipartitePureState {
    let n_max = spectrum(st).n_max().unwrap_or(0);
    let mut amps = ComplexMatrix::zeros(st.dim(), n_max + 1);
    for (n, &w) in st.weights().iter().enumerate().take(n_max + 1) {
        amps[(n, n_max - n)] = c(w.sqrt(), 0.0);
    }
    BipartitePureState {
        amplitudes: amps,
        total_charge: n_max,
    }
}

fn check_probability_vector(v: &[f64]) -> Result<()> {
    if let Some(x) = v.iter().find(|x| !x.is_finite() || **x < -SPECTRUM_EPS) {
        return Err(Error::NotProbabilityVector(format!("entry {x}")));
    }
    let total: f64 = v.iter().sum();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::NotProbabilityVector(format!("sum {total}")));
    }
    Ok(())
}

/// Sorts descending after zero-padding to `len`.
pub(crate) fn sorted_desc(v: &[f64], len: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    out.resize(len.max(v.len()), 0.0);
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// `a ≻ b`: every partial sum of `a↓` dominates the one of `b↓`.
pub fn majorizes(a: &[f64], b: &[f64]) -> Result<bool> {
    check_probability_vector(a)?;
    check_probability_vector(b)?;
    let len = a.len().max(b.len());
    let (a, b) = (sorted_desc(a, len), sorted_desc(b, len));
    let (mut sa, mut sb) = (0.0, 0.0);
    for (x, y) in a.iter().zip(&b) {
        sa += x;
        sb += y;
        if sa < sb - SPECTRUM_EPS {
            return Ok(false);
        }
    }
    Ok(true)
}
