//! Helpers shared by the integration test suites.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use tomokit::linalg::{dagger, trace};
use tomokit::processes::KrausSet;
use tomokit::states::DensityMatrix;
use tomokit::CMatrix;

/// Deterministic pseudo-random density matrix of the given dimension and rank.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let g = CMatrix::from_shape_fn((dim, rank), |_| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let m = g.dot(&dagger(&g));
    let tr = trace(&m).re;
    DensityMatrix::new(m.mapv(|z| z / tr)).unwrap()
}

/// Random isometry: Gram–Schmidt-orthonormalized complex Gaussian columns.
pub fn random_isometry(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let g = CMatrix::from_shape_fn((rows, cols), |_| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let mut columns: Vec<Vec<Complex64>> = (0..cols).map(|j| g.column(j).to_vec()).collect();
    for j in 0..cols {
        for _pass in 0..2 {
            for i in 0..j {
                let overlap: Complex64 = columns[i]
                    .iter()
                    .zip(columns[j].iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let prev = columns[i].clone();
                for (vj, vi) in columns[j].iter_mut().zip(prev.iter()) {
                    *vj -= overlap * vi;
                }
            }
        }
        let norm: f64 = columns[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for v in columns[j].iter_mut() {
            *v /= norm;
        }
    }
    CMatrix::from_shape_fn((rows, cols), |(i, j)| columns[j][i])
}

/// Random trace-preserving Kraus set with `m` operators on dimension `s`,
/// built from a random isometry split into blocks.
pub fn random_kraus(s: usize, m: usize, seed: u64) -> KrausSet {
    let iso = random_isometry(m * s, s, seed);
    let ops: Vec<CMatrix> = (0..m)
        .map(|k| CMatrix::from_shape_fn((s, s), |(i, j)| iso[[k * s + i, j]]))
        .collect();
    KrausSet::new(ops).unwrap()
}
