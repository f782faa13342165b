//! Seeded random objects: Haar vectors and isometries, Ginibre-based
//! densities. Every sampler takes the RNG explicitly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::{ComplexMatrix, ComplexVector, C64};

/// RNG for an independent sub-task (trial, restart) of a seeded run.
pub fn derived_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Uniformly random unit vector in C^d.
pub fn haar_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexVector {
    loop {
        let v = ComplexVector::from_fn(d, |_, _| complex_normal(rng));
        let norm = v.norm();
        if norm > 1e-8 {
            return v.unscale(norm);
        }
    }
}

/// Haar-random `m×r` isometry (orthonormal columns), `m ≥ r`.
pub fn haar_isometry<R: Rng + ?Sized>(m: usize, r: usize, rng: &mut R) -> ComplexMatrix {
    assert!(m >= r, "isometry needs m >= r");
    loop {
        let g = ComplexMatrix::from_fn(m, r, |_, _| complex_normal(rng));
        if let Some(q) = gram_schmidt(&g) {
            return q;
        }
    }
}

/// Orthonormalizes the columns of `g`; `None` if they are (nearly) dependent.
pub fn gram_schmidt(g: &ComplexMatrix) -> Option<ComplexMatrix> {
    let mut q = g.clone();
    for j in 0..q.ncols() {
        // two passes for stability
        for _ in 0..2 {
            for i in 0..j {
                let qi = q.column(i).into_owned();
                let proj = qi.dotc(&q.column(j));
                let mut col = q.column_mut(j);
                col -= &qi * proj;
            }
        }
        let norm = q.column(j).norm();
        if norm < 1e-10 {
            return None;
        }
        q.column_mut(j).unscale_mut(norm);
    }
    Some(q)
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| complex_normal(rng));
    (&g + g.adjoint()).scale(0.5)
}

/// `M†M` for Ginibre `M`.
pub fn random_psd<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    random_psd_rank(d, d, rng)
}

pub fn random_psd_rank<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, rank, |_, _| complex_normal(rng));
    let p = &g * g.adjoint();
    (&p + p.adjoint()).scale(0.5)
}

/// Hilbert–Schmidt random density matrix of full rank.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    random_density_rank(d, d, rng)
}

pub fn random_density_rank<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let p = random_psd_rank(d, rank, rng);
    let tr = p.trace().re;
    p.unscale(tr)
}
