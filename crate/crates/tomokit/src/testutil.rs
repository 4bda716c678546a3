//! Helpers shared by unit tests across modules.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use crate::linalg::{self, CMatrix};
use crate::states::DensityMatrix;

/// Deterministic pseudo-random density matrix of the given dimension and rank.
pub(crate) fn random_density(dim: usize, rank: usize, seed: u64) -> DensityMatrix {
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let g = CMatrix::from_shape_fn((dim, rank), |_| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let m = g.dot(&linalg::dagger(&g));
    let tr = linalg::trace(&m).re;
    DensityMatrix::new(m.mapv(|z| z / tr)).unwrap()
}
