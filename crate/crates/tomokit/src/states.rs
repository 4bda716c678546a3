//! Density matrices, purified states, and fidelity.
//!
//! A mixed state of rank r in an s-dimensional Hilbert space is represented
//! either as the s×s density matrix ρ or as an s×r purified block c with
//! ρ = c·c†. The block is defined up to a right unitary gauge c → c·V; every
//! routine here is gauge independent.

use num_complex::Complex64;

use crate::error::{Result, TomoError};
use crate::linalg::{self, CMatrix};
use crate::tol;

/// Hermitian, positive semidefinite, unit-trace matrix describing a quantum
/// state.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dim: usize,
    rank: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validate and wrap a candidate density matrix.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || dim == 0 {
            return Err(TomoError::dimension_mismatch(
                "density matrix",
                dim,
                matrix.ncols(),
            ));
        }
        let herm = linalg::hermiticity_residual(&matrix);
        if herm > tol::TAU_HERM {
            return Err(TomoError::NotHermitian { residual: herm });
        }
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > tol::TAU_TRACE || tr.im.abs() > tol::TAU_TRACE {
            return Err(TomoError::BadTrace {
                expected: 1.0,
                got: tr.re,
            });
        }
        let evals = linalg::eigvalsh(&matrix)?;
        let min = evals.first().copied().unwrap_or(0.0);
        if min < -tol::TAU_PSD {
            return Err(TomoError::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
        let max = evals.last().copied().unwrap_or(0.0);
        let rank = evals
            .iter()
            .filter(|&&v| v > tol::TAU_RANK * max.max(0.0))
            .count()
            .max(1);
        Ok(DensityMatrix { dim, rank, matrix })
    }

    /// Pure state ρ = |ψ⟩⟨ψ| from a (not necessarily normalized) vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(TomoError::invalid("zero state vector"));
        }
        let s = psi.len();
        let m = CMatrix::from_shape_fn((s, s), |(i, j)| psi[i] * psi[j].conj() / norm_sq);
        DensityMatrix::new(m)
    }

    /// Maximally mixed state I/s.
    pub fn maximally_mixed(dim: usize) -> Self {
        let m = CMatrix::eye(dim).mapv(|z| z / dim as f64);
        DensityMatrix {
            dim,
            rank: dim,
            matrix: m,
        }
    }

    /// Project an arbitrary Hermitian-ish matrix onto the state space:
    /// symmetrize, clamp negative eigenvalues, renormalize the trace.
    pub fn project(matrix: &CMatrix) -> Result<Self> {
        let sym = (matrix + &linalg::dagger(matrix)).mapv(|z| z * 0.5);
        let clamped = linalg::hermitian_map(&sym, |x| x.max(0.0))?;
        let tr = linalg::trace(&clamped).re;
        if tr <= 0.0 {
            return Err(TomoError::invalid("matrix projects to zero state"));
        }
        DensityMatrix::new(clamped.mapv(|z| z / tr))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Numerical rank: eigenvalues above TAU_RANK relative to the largest.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::eigvalsh(&self.matrix)
    }
}

/// Purified representation: an s×r coefficient block of unit Frobenius norm
/// whose outer product c·c† is the density matrix.
#[derive(Debug, Clone)]
pub struct PurifiedState {
    dim: usize,
    rank: usize,
    block: CMatrix,
}

impl PurifiedState {
    /// Wrap a coefficient block, checking its normalization.
    pub fn new(block: CMatrix) -> Result<Self> {
        let (dim, rank) = block.dim();
        if dim == 0 || rank == 0 {
            return Err(TomoError::invalid("empty purified block"));
        }
        let norm = linalg::fro_norm(&block);
        if (norm - 1.0).abs() > tol::TAU_NORM {
            return Err(TomoError::invalid(format!(
                "purified block norm {norm} differs from 1"
            )));
        }
        Ok(PurifiedState { dim, rank, block })
    }

    /// Wrap a block, rescaling it to unit norm.
    pub fn normalized(block: CMatrix) -> Result<Self> {
        let norm = linalg::fro_norm(&block);
        if norm <= 0.0 {
            return Err(TomoError::invalid("zero purified block"));
        }
        let (dim, rank) = block.dim();
        Ok(PurifiedState {
            dim,
            rank,
            block: block.mapv(|z| z / norm),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn block(&self) -> &CMatrix {
        &self.block
    }

    /// Apply a right gauge unitary: c → c·V. The derived state is unchanged.
    pub fn gauge(&self, v: &CMatrix) -> Result<Self> {
        if v.nrows() != self.rank || v.ncols() != self.rank {
            return Err(TomoError::dimension_mismatch(
                "gauge unitary",
                self.rank,
                v.nrows(),
            ));
        }
        let res = linalg::isometry_residual(v);
        if res > tol::TAU_UNIT {
            return Err(TomoError::NotUnitary { residual: res });
        }
        Ok(PurifiedState {
            dim: self.dim,
            rank: self.rank,
            block: self.block.dot(v),
        })
    }
}

/// Apply a unitary: ρ → UρU†.
pub fn apply_unitary(rho: &DensityMatrix, u: &CMatrix) -> Result<DensityMatrix> {
    if u.nrows() != rho.dim() || u.ncols() != rho.dim() {
        return Err(TomoError::dimension_mismatch(
            "apply_unitary",
            rho.dim(),
            u.nrows(),
        ));
    }
    let res = linalg::isometry_residual(u);
    if res > tol::TAU_UNIT {
        return Err(TomoError::NotUnitary { residual: res });
    }
    let out = u.dot(rho.matrix()).dot(&linalg::dagger(u));
    DensityMatrix::new(out)
}

/// Uhlmann fidelity F(ρ0, ρ) = (Tr √(√ρ0 ρ √ρ0))².
///
/// Computed as the squared nuclear norm of √ρ0·√ρ, which is the same number
/// without the outer square root.
pub fn fidelity(rho0: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    if rho0.dim() != rho.dim() {
        return Err(TomoError::dimension_mismatch(
            "fidelity",
            rho0.dim(),
            rho.dim(),
        ));
    }
    let a = linalg::psd_sqrt(rho0.matrix())?;
    let b = linalg::psd_sqrt(rho.matrix())?;
    let m = a.dot(&b);
    let s = linalg::singular_values(&m)?;
    let total: f64 = s.iter().sum();
    Ok((total * total).clamp(0.0, 1.0))
}

/// Fidelity via purifications: the Uhlmann maximum over gauge unitaries,
/// (Σ singular values of c0†c)².
pub fn fidelity_purified(c0: &PurifiedState, c: &PurifiedState) -> Result<f64> {
    if c0.dim() != c.dim() {
        return Err(TomoError::dimension_mismatch(
            "fidelity_purified",
            c0.dim(),
            c.dim(),
        ));
    }
    let overlap = linalg::dagger(c0.block()).dot(c.block());
    let s = linalg::singular_values(&overlap)?;
    let total: f64 = s.iter().sum();
    Ok((total * total).clamp(0.0, 1.0))
}

/// Purify a density matrix into an s×r block (r ≥ rank of ρ).
///
/// Columns are √λ_k·v_k for the r largest eigenpairs, padded with zeros, with
/// eigenvector phases fixed so the largest-magnitude component is real
/// positive. Deterministic for a fixed input.
pub fn purify(rho: &DensityMatrix, r: usize) -> Result<PurifiedState> {
    if r < rho.rank() {
        return Err(TomoError::invalid(format!(
            "purification rank {r} below state rank {}",
            rho.rank()
        )));
    }
    let s = rho.dim();
    let (vals, vecs) = linalg::eigh(rho.matrix())?;
    let mut block = CMatrix::zeros((s, r));
    // eigh returns ascending order; take the top r
    for col in 0..r.min(s) {
        let k = s - 1 - col;
        let lam = vals[k].max(0.0);
        if lam == 0.0 {
            continue;
        }
        let v = vecs.column(k);
        // phase fix
        let (mut best, mut best_mag) = (Complex64::new(1.0, 0.0), 0.0);
        for z in v.iter() {
            if z.norm() > best_mag {
                best_mag = z.norm();
                best = *z;
            }
        }
        let phase = if best_mag > 0.0 {
            best.conj() / best.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let scale = lam.sqrt();
        for i in 0..s {
            block[[i, col]] = v[i] * phase * scale;
        }
    }
    PurifiedState::normalized(block)
}

/// Derive the density matrix c·c† / ⟨c|c⟩ from a purified block.
pub fn densify(c: &PurifiedState) -> Result<DensityMatrix> {
    let outer = c.block().dot(&linalg::dagger(c.block()));
    let tr = linalg::trace(&outer).re;
    if tr <= 0.0 {
        return Err(TomoError::invalid("purified block has zero norm"));
    }
    DensityMatrix::new(outer.mapv(|z| z / tr))
}
