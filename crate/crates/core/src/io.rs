//! JSON file formats for states, density matrices and channels.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major.

use std::collections::BTreeMap;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::channels::{Ensemble, U1Channel, U1Kraus};
use crate::error::{Error, Result};
use crate::numerics::{c, ComplexMatrix, ComplexVector, C64};
use crate::states::{standard_form, DensityMatrix, SectoredPureState, StandardState};

pub type Pair = [f64; 2];

fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

fn complex(p: Pair) -> C64 {
    c(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorJson {
    pub n: usize,
    pub amplitudes: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityJson {
    pub dim: usize,
    pub matrix: Vec<Vec<Pair>>,
    /// Sector label per basis element; absent means the number basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sectors: Option<Vec<usize>>,
}

/// Any of the three state file shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateFile {
    Density(DensityJson),
    Sectored {
        dim: usize,
        sectors: Vec<SectorJson>,
    },
    Standard {
        dim: usize,
        weights: Vec<f64>,
    },
}

/// A parsed state file.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedState {
    Sectored(SectoredPureState),
    Standard(StandardState),
    Density(DensityMatrix),
}

impl LoadedState {
    /// Standard form of a pure input; `None` for density matrices.
    pub fn standard(&self) -> Option<Result<StandardState>> {
        match self {
            Self::Sectored(s) => Some(standard_form(s)),
            Self::Standard(s) => Some(Ok(s.clone())),
            Self::Density(_) => None,
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        match self {
            Self::Sectored(s) => s.to_density(),
            Self::Standard(s) => Ok(s.projector()),
            Self::Density(d) => Ok(d.clone()),
        }
    }
}

pub fn parse_state(text: &str) -> Result<LoadedState> {
    let file: StateFile = serde_json::from_str(text)?;
    match file {
        StateFile::Density(d) => Ok(LoadedState::Density(density_from_json(&d)?)),
        StateFile::Sectored { dim, sectors } => {
            let mut map: BTreeMap<usize, Vec<C64>> = BTreeMap::new();
            for s in sectors {
                if map.contains_key(&s.n) {
                    return Err(Error::Parse(format!("sector {} listed twice", s.n)));
                }
                map.insert(s.n, s.amplitudes.into_iter().map(complex).collect());
            }
            Ok(LoadedState::Sectored(SectoredPureState::new(dim, map)?))
        }
        StateFile::Standard { dim, weights } => {
            if weights.len() > dim {
                return Err(Error::Parse(format!(
                    "{} weights for dim {dim}",
                    weights.len()
                )));
            }
            Ok(LoadedState::Standard(
                StandardState::new(weights)?.padded(dim)?,
            ))
        }
    }
}

pub fn density_from_json(d: &DensityJson) -> Result<DensityMatrix> {
    if d.matrix.len() != d.dim || d.matrix.iter().any(|row| row.len() != d.dim) {
        return Err(Error::Parse(format!("matrix is not {0}x{0}", d.dim)));
    }
    let m = ComplexMatrix::from_fn(d.dim, d.dim, |i, j| complex(d.matrix[i][j]));
    match &d.sectors {
        Some(s) => DensityMatrix::with_sectors(m, s.clone()),
        None => DensityMatrix::new(m),
    }
}

pub fn density_to_json(rho: &DensityMatrix) -> DensityJson {
    let m = rho.matrix();
    DensityJson {
        dim: rho.dim(),
        matrix: (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect())
            .collect(),
        sectors: (!rho.is_number_basis()).then(|| rho.sectors().to_vec()),
    }
}

pub fn standard_to_json(st: &StandardState) -> StateFile {
    StateFile::Standard {
        dim: st.dim(),
        weights: st.weights().to_vec(),
    }
}

pub fn sectored_to_json(s: &SectoredPureState) -> StateFile {
    StateFile::Sectored {
        dim: s.dim(),
        sectors: s
            .sectors()
            .iter()
            .map(|(&n, a)| SectorJson {
                n,
                amplitudes: a.iter().copied().map(pair).collect(),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausJson {
    pub shift: i64,
    /// Keys are decimal sector indices.
    pub coeffs: BTreeMap<String, Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub dim: usize,
    pub outcomes: Vec<Vec<KrausJson>>,
}

/// Tags are not stored in the file; they are reassigned in order of
/// appearance among operators sharing a shift.
pub fn channel_from_json(ch: &ChannelJson) -> Result<U1Channel> {
    if ch.dim == 0 {
        return Err(Error::Parse("channel dimension must be positive".into()));
    }
    let mut seen: BTreeMap<i64, usize> = BTreeMap::new();
    let mut outcomes = Vec::with_capacity(ch.outcomes.len());
    for group in &ch.outcomes {
        let mut ops = Vec::with_capacity(group.len());
        for k in group {
            let mut coeffs = BTreeMap::new();
            for (key, &z) in &k.coeffs {
                let n: usize = key
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad sector key '{key}'")))?;
                if !(z[0].is_finite() && z[1].is_finite()) {
                    return Err(Error::Parse(format!("non-finite coefficient at n = {n}")));
                }
                coeffs.insert(n, complex(z));
            }
            let tag = seen.entry(k.shift).or_insert(0);
            ops.push(U1Kraus::new(k.shift, coeffs, *tag));
            *tag += 1;
        }
        outcomes.push(ops);
    }
    Ok(U1Channel::new(ch.dim, outcomes))
}

pub fn channel_to_json(ch: &U1Channel) -> ChannelJson {
    ChannelJson {
        dim: ch.dim,
        outcomes: ch
            .outcomes
            .iter()
            .map(|g| {
                g.iter()
                    .map(|k| KrausJson {
                        shift: k.shift,
                        coeffs: k
                            .coeffs
                            .iter()
                            .map(|(n, &z)| (n.to_string(), pair(z)))
                            .collect(),
                    })
                    .collect()
            })
            .collect(),
    }
}

pub fn parse_channel(text: &str) -> Result<U1Channel> {
    channel_from_json(&serde_json::from_str(text)?)
}

#[derive(Serialize)]
struct MemberJson {
    p: f64,
    amplitudes: Vec<Pair>,
}

pub(crate) fn serialize_vector_ensemble<S: Serializer>(
    ens: &Ensemble<ComplexVector>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = ser.serialize_seq(Some(ens.members.len()))?;
    for (p, v) in &ens.members {
        seq.serialize_element(&MemberJson {
            p: *p,
            amplitudes: v.iter().copied().map(pair).collect(),
        })?;
    }
    seq.end()
}
