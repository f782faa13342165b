//! Pure-state frameness monotones and closed-form qubit mixed-state measures.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::channels::Ensemble;
use crate::error::{Error, Result};
use crate::numerics::{self, c, ComplexMatrix, ComplexVector, C64};
use crate::states::{sorted_desc, DensityMatrix, StandardState, SPECTRUM_EPS};

/// Which pure-state measure to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonotoneId {
    #[serde(rename = "vidal_k")]
    Vidal {
        k: usize,
    },
    Entropy,
    #[serde(rename = "concurrence_k")]
    Concurrence {
        k: usize,
    },
    Variance,
}

impl MonotoneId {
    /// Builds an id from a CLI-style name (`vidal`, `entropy`, `concurrence`,
    /// `variance`) and optional `k`.
    pub fn parse(name: &str, k: Option<usize>) -> Result<Self> {
        match name {
            "vidal" | "vidal_k" => Ok(Self::Vidal {
                k: k.ok_or(Error::MissingK("vidal"))?,
            }),
            "concurrence" | "concurrence_k" => Ok(Self::Concurrence {
                k: k.ok_or(Error::MissingK("concurrence"))?,
            }),
            "entropy" => Ok(Self::Entropy),
            "variance" => Ok(Self::Variance),
            other => Err(Error::Parse(format!("unknown measure '{other}'"))),
        }
    }

    pub fn k(&self) -> Option<usize> {
        match *self {
            Self::Vidal { k } | Self::Concurrence { k } => Some(k),
            Self::Entropy | Self::Variance => None,
        }
    }

    /// Checks that `k` is admissible for a `dim`-sector window.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self.k() {
            Some(k) if !(2..=dim).contains(&k) => Err(Error::BadK { k, max: dim }),
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, st: &StandardState) -> Result<f64> {
        match *self {
            Self::Vidal { k } => vidal_f(st, k),
            Self::Entropy => Ok(entropy_of_frameness(st)),
            Self::Concurrence { k } => concurrence_pure(st, k),
            Self::Variance => Ok(variance_pure(st)),
        }
    }
}

impl fmt::Display for MonotoneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Vidal { k } => write!(f, "vidal_k(k={k})"),
            Self::Entropy => write!(f, "entropy"),
            Self::Concurrence { k } => write!(f, "concurrence_k(k={k})"),
            Self::Variance => write!(f, "variance"),
        }
    }
}

fn check_k(k: usize, len: usize) -> Result<()> {
    if (2..=len).contains(&k) {
        Ok(())
    } else {
        Err(Error::BadK { k, max: len })
    }
}

/// Tail sum `Σ_{i≥k} λ↓_i` (1-based `k`).
pub fn vidal_f(st: &StandardState, k: usize) -> Result<f64> {
    check_k(k, st.dim())?;
    Ok(sorted_desc(st.weights(), st.dim())[k - 1..].iter().sum())
}

/// Shannon entropy of the weights in bits, i.e. the von Neumann entropy of
/// the twirled state.
pub fn entropy_of_frameness(st: &StandardState) -> f64 {
    let h: f64 = st
        .weights()
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| -w * w.log2())
        .sum();
    if h > 0.0 {
        h
    } else {
        0.0
    }
}

/// `S_k(λ)`, coefficient of `x^k` in `Π (1 + λ_i x)`.
pub fn elementary_symmetric(lams: &[f64], k: usize) -> Result<f64> {
    check_k(k, lams.len())?;
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for (i, &l) in lams.iter().enumerate() {
        for j in (1..=k.min(i + 1)).rev() {
            e[j] += l * e[j - 1];
        }
    }
    Ok(e[k])
}

/// `S_k(1/d, …, 1/d) = C(d, k) / d^k`.
fn uniform_elementary_symmetric(d: usize, k: usize) -> f64 {
    let df = d as f64;
    (0..k).fold(1.0, |acc, i| acc * (df - i as f64) / ((i + 1) as f64 * df))
}

/// `[S_k(λ) / S_k(1/d, …)]^{1/k}` over the state's full window.
pub fn concurrence_pure(st: &StandardState, k: usize) -> Result<f64> {
    let d = st.dim();
    check_k(k, d)?;
    let s = elementary_symmetric(st.weights(), k)?.max(0.0);
    Ok((s / uniform_elementary_symmetric(d, k)).powf(1.0 / k as f64))
}

/// `4 Var(n̂)`; depends on sector labels, not only on the sorted weights.
pub fn variance_pure(st: &StandardState) -> f64 {
    4.0 * st.number_moments().1
}

fn require_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 2 || !rho.is_number_basis() {
        return Err(Error::WrongDimension {
            expected: 2,
            got: rho.dim(),
        });
    }
    Ok(())
}

/// Eigenvalues `(μ₁, μ₂)` of `R = √(√ρ ρ̃ √ρ)`, descending.
pub fn qubit_r_eigs(rho: &DensityMatrix) -> Result<(f64, f64)> {
    require_qubit(rho)?;
    let m = rho.matrix();
    let mu = numerics::product_eig_sqrt(m, &numerics::spin_flip(m))?;
    Ok((mu[0], mu[1]))
}

/// Same eigenvalues through explicit matrix square roots.
pub fn qubit_r_eigs_direct(rho: &DensityMatrix) -> Result<(f64, f64)> {
    require_qubit(rho)?;
    let m = rho.matrix();
    let mu = numerics::product_eig_sqrt_direct(m, &numerics::spin_flip(m))?;
    Ok((mu[0], mu[1]))
}

pub fn qubit_concurrence(rho: &DensityMatrix) -> Result<f64> {
    let (a, b) = qubit_r_eigs(rho)?;
    Ok((a - b).abs())
}

/// Qubit frameness of formation, `C₂²`.
pub fn qubit_fof(rho: &DensityMatrix) -> Result<f64> {
    let conc = qubit_concurrence(rho)?;
    Ok(conc * conc)
}

/// Explicit qubit quantities for `ρ = p|φ₁⟩⟨φ₁| + (1−p)|φ₂⟩⟨φ₂|` with real
/// Bloch vectors at polar angle `α`.
#[derive(Debug, Clone)]
pub struct AppendixForm {
    pub mu1: f64,
    pub mu2: f64,
    pub concurrence: f64,
    pub fof: f64,
    pub rho: DensityMatrix,
}

pub fn appendix_closed_form(p: f64, alpha: f64) -> Result<AppendixForm> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadProbability(p));
    }
    let q = p * (1.0 - p);
    let s = (1.0 - 2.0 * p) * alpha.sin();
    let base = q + 0.5 * s * s;
    let k = 0.5 * s.abs() * (s * s + 4.0 * q).sqrt();
    let upper = base + k;
    // base - k == q² / (base + k); the quotient avoids cancellation
    let lower = if upper > 0.0 { q * q / upper } else { 0.0 };
    let (h_cos, h_sin) = ((alpha / 2.0).cos(), (alpha / 2.0).sin());
    let phi1 = [h_cos, h_sin];
    let phi2 = [-h_sin, h_cos];
    let matrix = ComplexMatrix::from_fn(2, 2, |i, j| {
        c(p * phi1[i] * phi1[j] + (1.0 - p) * phi2[i] * phi2[j], 0.0)
    });
    Ok(AppendixForm {
        mu1: upper.sqrt(),
        mu2: lower.sqrt(),
        concurrence: s.abs(),
        fof: s * s,
        rho: DensityMatrix::new(matrix)?,
    })
}

/// Complex-symmetric bilinear form `conj(uᵀ X v)` = `⟨u|ṽ⟩`.
fn flip_overlap(u: &ComplexVector, v: &ComplexVector) -> C64 {
    (u[0] * v[1] + u[1] * v[0]).conj()
}

/// Takagi factorization `A = Q Σ Qᵀ` of a complex symmetric matrix, with
/// `Σ` descending. Returns `(σ, Q)`.
fn takagi(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = a.nrows();
    // [[B, C], [C, -B]] has eigenpairs (±σ, [x; y]) with u = x + i y
    let embed = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i % n, j % n);
        let z = a[(bi, bj)];
        match (i < n, j < n) {
            (true, true) => z.re,
            (false, false) => -z.re,
            _ => z.im,
        }
    });
    let eig = SymmetricEigen::new(embed);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let scale = eig.eigenvalues.amax().max(1.0);
    let mut sigma = Vec::with_capacity(n);
    let mut cols: Vec<ComplexVector> = Vec::with_capacity(n);
    for &i in order.iter().take(n) {
        let val = eig.eigenvalues[i];
        if val <= 1e-13 * scale {
            break;
        }
        let col = eig.eigenvectors.column(i);
        let u = ComplexVector::from_fn(n, |r, _| c(col[r], col[r + n]));
        let norm = u.norm();
        sigma.push(val);
        cols.push(u.unscale(norm));
    }
    // remaining directions span the kernel of A·conj
    let mut e = 0;
    while cols.len() < n {
        let mut v = ComplexVector::zeros(n);
        v[e] = c(1.0, 0.0);
        e += 1;
        for u in &cols {
            let proj = u.dotc(&v);
            v -= u * proj;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            sigma.push(0.0);
            cols.push(v.unscale(norm));
        }
    }
    (sigma, ComplexMatrix::from_columns(&cols))
}

/// Decomposition of a qubit `ρ` whose members all carry concurrence `C₂(ρ)`.
pub fn optimal_qubit_decomposition(rho: &DensityMatrix) -> Result<Ensemble<ComplexVector>> {
    require_qubit(rho)?;
    let eig = numerics::hermitian_eig(rho.matrix())?;
    let rank = eig.values.iter().filter(|&&v| v > SPECTRUM_EPS).count();
    if rank <= 1 {
        let v = eig.vectors.column(0).into_owned();
        return Ok(Ensemble {
            members: vec![(1.0, v)],
        });
    }
    let phi: Vec<ComplexVector> = (0..2)
        .map(|j| eig.vectors.column(j).scale(eig.values[j].max(0.0).sqrt()))
        .collect();
    let tau = ComplexMatrix::from_fn(2, 2, |i, j| flip_overlap(&phi[i], &phi[j]));
    let tau = (&tau + tau.transpose()).scale(0.5);
    let (mu, q) = takagi(&tau);
    // x_i = Σ_j Q_ji φ_j makes ⟨x_i|x̃_j⟩ = diag(μ)
    let mut x: Vec<ComplexVector> = (0..2)
        .map(|i| &phi[0] * q[(0, i)] + &phi[1] * q[(1, i)])
        .collect();
    x[1] *= c(0.0, 1.0);
    let pre = mu[0] - mu[1];

    let rotate = |theta: f64| -> (ComplexVector, ComplexVector) {
        let (s, co) = theta.sin_cos();
        (
            &x[0] * c(co, 0.0) + &x[1] * c(s, 0.0),
            &x[1] * c(co, 0.0) - &x[0] * c(s, 0.0),
        )
    };
    let mismatch = |theta: f64| -> f64 {
        let (y, _) = rotate(theta);
        flip_overlap(&y, &y).re - pre * y.norm_squared()
    };
    let theta = if mismatch(0.0).abs() <= 1e-14 {
        0.0
    } else {
        smallest_root(mismatch, 0.0, FRAC_PI_2)
    };
    let (y1, y2) = rotate(theta);
    let members = [y1, y2]
        .into_iter()
        .filter_map(|y| {
            let p = y.norm_squared();
            (p > SPECTRUM_EPS).then(|| (p, y.unscale(p.sqrt())))
        })
        .collect();
    Ok(Ensemble { members })
}

/// First sign change of `f` on `[lo, hi]`, refined by bisection.
fn smallest_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    const GRID: usize = 2048;
    let step = (hi - lo) / GRID as f64;
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=GRID {
        let b = lo + step * i as f64;
        let fb = f(b);
        if fa == 0.0 {
            return a;
        }
        if fa.signum() != fb.signum() {
            let (mut l, mut r, mut fl) = (a, b, fa);
            for _ in 0..200 {
                let m = 0.5 * (l + r);
                let fm = f(m);
                if fm == 0.0 || r <= l + f64::EPSILON {
                    return m;
                }
                if fm.signum() == fl.signum() {
                    l = m;
                    fl = fm;
                } else {
                    r = m;
                }
            }
            return 0.5 * (l + r);
        }
        a = b;
        fa = fb;
    }
    hi
}

/// `C₂` of a normalized qubit vector, `|⟨ψ|X|ψ*⟩|`.
pub fn pure_qubit_concurrence(v: &ComplexVector) -> f64 {
    flip_overlap(v, v).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::max_abs_diff;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn st(w: &[f64]) -> StandardState {
        StandardState::new(w.to_vec()).unwrap()
    }

    /// Subset enumeration, exponential but independent of the recurrence.
    fn brute_elementary(l: &[f64], k: usize) -> f64 {
        let n = l.len();
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| {
                (0..n)
                    .filter(|i| m >> i & 1 == 1)
                    .map(|i| l[i])
                    .product::<f64>()
            })
            .sum()
    }

    #[test]
    fn vidal_examples() {
        let s = st(&[0.5, 0.3, 0.2]);
        assert!((vidal_f(&s, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((vidal_f(&s, 3).unwrap() - 0.2).abs() < 1e-15);
        for k in 2..=3 {
            assert_eq!(vidal_f(&st(&[1.0, 0.0, 0.0]), k).unwrap(), 0.0);
        }
        assert!(matches!(vidal_f(&s, 1), Err(Error::BadK { .. })));
        assert!(matches!(vidal_f(&s, 4), Err(Error::BadK { .. })));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy_of_frameness(&st(&[0.5, 0.5])), 1.0);
        assert_eq!(entropy_of_frameness(&st(&[1.0, 0.0])), 0.0);
        let direct = -(0.25f64 * 0.25f64.log2() + 0.75 * 0.75f64.log2());
        assert!((direct - 0.811278).abs() < 1e-6);
        assert!((entropy_of_frameness(&st(&[0.25, 0.75])) - direct).abs() < 1e-15);
    }

    #[test]
    fn elementary_symmetric_examples() {
        let third = 1.0 / 3.0;
        assert!((elementary_symmetric(&[third; 3], 2).unwrap() - third).abs() < 1e-15);
        assert_eq!(elementary_symmetric(&[0.5, 0.5, 0.0], 3).unwrap(), 0.0);
        assert!((elementary_symmetric(&[0.5, 0.3, 0.2], 2).unwrap() - 0.31).abs() < 1e-15);
        assert!(elementary_symmetric(&[0.5, 0.5], 3).is_err());
    }

    #[test]
    fn elementary_symmetric_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in [4, 9, 14] {
            let l = StandardState::from_amplitudes(&sampling::haar_vector(d, &mut rng)).unwrap();
            for k in 2..=d {
                let fast = elementary_symmetric(l.weights(), k).unwrap();
                let slow = brute_elementary(l.weights(), k);
                assert!(
                    (fast - slow).abs() <= 1e-14 * slow.max(1e-300) + 1e-300,
                    "d={d} k={k}"
                );
            }
        }
        for d in 2..=16 {
            for k in 2..=d {
                let u = vec![1.0 / d as f64; d];
                let e = elementary_symmetric(&u, k).unwrap();
                assert!((e / uniform_elementary_symmetric(d, k) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn concurrence_examples() {
        let third = 1.0 / 3.0;
        assert!((concurrence_pure(&st(&[third; 3]), 2).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(concurrence_pure(&st(&[1.0, 0.0]), 2).unwrap(), 0.0);
        let v = concurrence_pure(&st(&[0.5, 0.5, 0.0]), 2).unwrap();
        assert!((v - 0.75f64.sqrt()).abs() < 1e-14);
        assert!((v - 0.866025).abs() < 1e-6);
    }

    #[test]
    fn variance_examples() {
        assert!((variance_pure(&st(&[0.5, 0.5])) - 1.0).abs() < 1e-15);
        assert_eq!(variance_pure(&StandardState::number_state(3, 2)), 0.0);
        assert!((variance_pure(&st(&[0.5, 0.0, 0.5])) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn variance_depends_on_labels_others_do_not() {
        let a = st(&[0.5, 0.3, 0.2]);
        let b = st(&[0.3, 0.2, 0.5]);
        for m in [
            MonotoneId::Vidal { k: 2 },
            MonotoneId::Entropy,
            MonotoneId::Concurrence { k: 2 },
            MonotoneId::Concurrence { k: 3 },
        ] {
            assert!((m.evaluate(&a).unwrap() - m.evaluate(&b).unwrap()).abs() < 1e-15);
        }
        assert!((variance_pure(&a) - variance_pure(&b)).abs() > 1e-3);
    }

    #[test]
    fn qubit_r_examples() {
        let half = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        let (a, b) = qubit_r_eigs(&half).unwrap();
        assert!((a - 0.5).abs() < 1e-15 && (b - 0.5).abs() < 1e-15);
        assert_eq!(qubit_concurrence(&half).unwrap(), 0.0);
        assert_eq!(qubit_fof(&half).unwrap(), 0.0);

        let plus = StandardState::uniform(2).projector();
        let (a, b) = qubit_r_eigs(&plus).unwrap();
        assert!((a - 1.0).abs() < 1e-15 && b.abs() < 1e-15);
        assert!((qubit_concurrence(&plus).unwrap() - 1.0).abs() < 1e-15);
        assert!((qubit_fof(&plus).unwrap() - 1.0).abs() < 1e-15);

        let form = appendix_closed_form(0.25, PI / 2.0).unwrap();
        let (a, b) = qubit_r_eigs(&form.rho).unwrap();
        assert!((a - 0.75).abs() < 1e-14 && (b - 0.25).abs() < 1e-14);
        assert!((qubit_concurrence(&form.rho).unwrap() - 0.5).abs() < 1e-14);
        assert!((qubit_fof(&form.rho).unwrap() - 0.25).abs() < 1e-14);

        let three = DensityMatrix::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        assert!(matches!(
            qubit_r_eigs(&three),
            Err(Error::WrongDimension { .. })
        ));
    }

    #[test]
    fn appendix_examples() {
        let f = appendix_closed_form(0.0, PI / 2.0).unwrap();
        assert!((f.mu1 - 1.0).abs() < 1e-15 && f.mu2.abs() < 1e-15);
        assert!((f.concurrence - 1.0).abs() < 1e-15 && (f.fof - 1.0).abs() < 1e-15);
        for alpha in [0.0, 0.4, 1.3, PI] {
            let f = appendix_closed_form(0.5, alpha).unwrap();
            assert_eq!((f.concurrence, f.fof), (0.0, 0.0));
        }
        let f = appendix_closed_form(0.25, PI / 2.0).unwrap();
        assert!((f.mu1 - 0.75).abs() < 1e-15 && (f.mu2 - 0.25).abs() < 1e-15);
        assert!((f.concurrence - 0.5).abs() < 1e-15 && (f.fof - 0.25).abs() < 1e-15);
        assert!(matches!(
            appendix_closed_form(1.5, 0.0),
            Err(Error::BadProbability(_))
        ));
    }

    #[test]
    fn r_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let rho = DensityMatrix::new(sampling::random_density(2, &mut rng)).unwrap();
            let (a, b) = qubit_r_eigs(&rho).unwrap();
            let (x, y) = qubit_r_eigs_direct(&rho).unwrap();
            assert!((a - x).abs() <= 1e-8 && (b - y).abs() <= 1e-8);
        }
    }

    fn check_decomposition(rho: &DensityMatrix) {
        let ens = optimal_qubit_decomposition(rho).unwrap();
        let target = qubit_concurrence(rho).unwrap();
        let mut sum = ComplexMatrix::zeros(2, 2);
        for (p, v) in &ens.members {
            sum += numerics::outer(v, v).scale(*p);
            assert!(
                (pure_qubit_concurrence(v) - target).abs() <= 1e-8,
                "member {} vs {target}",
                pure_qubit_concurrence(v)
            );
        }
        assert!(max_abs_diff(&sum, rho.matrix()) <= 1e-9);
    }

    #[test]
    fn optimal_decomposition_examples() {
        let plus = StandardState::uniform(2).projector();
        let ens = optimal_qubit_decomposition(&plus).unwrap();
        assert_eq!(ens.len(), 1);
        assert!((ens.members[0].0 - 1.0).abs() < 1e-15);
        check_decomposition(&plus);

        let half = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        let ens = optimal_qubit_decomposition(&half).unwrap();
        assert!(ens.average(pure_qubit_concurrence) < 1e-12);
        check_decomposition(&half);

        check_decomposition(&DensityMatrix::diagonal(&[0.8, 0.2]).unwrap());
        check_decomposition(&appendix_closed_form(0.25, 1.0).unwrap().rho);

        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..200 {
            check_decomposition(
                &DensityMatrix::new(sampling::random_density(2, &mut rng)).unwrap(),
            );
        }
    }

    #[test]
    fn pure_concurrence_matches_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let v = sampling::haar_vector(2, &mut rng);
            let s = StandardState::from_amplitudes(&v).unwrap();
            assert!((pure_qubit_concurrence(&v) - concurrence_pure(&s, 2).unwrap()).abs() < 1e-14);
            assert!((pure_qubit_concurrence(&v).powi(2) - variance_pure(&s)).abs() < 1e-14);
        }
    }

    #[test]
    fn monotone_id_parsing() {
        assert_eq!(
            MonotoneId::parse("vidal", Some(2)).unwrap(),
            MonotoneId::Vidal { k: 2 }
        );
        assert!(matches!(
            MonotoneId::parse("vidal", None),
            Err(Error::MissingK(_))
        ));
        assert_eq!(
            MonotoneId::parse("variance", None).unwrap(),
            MonotoneId::Variance
        );
        assert!(MonotoneId::parse("bogus", None).is_err());
        let json = serde_json::to_string(&MonotoneId::Concurrence { k: 3 }).unwrap();
        assert_eq!(json, r#"{"kind":"concurrence_k","k":3}"#);
    }
}
