//! Quantum processes: Kraus sets, chi matrices, Choi states and the
//! conversions among them.
//!
//! Index conventions, fixed once for the whole toolkit:
//!
//! * the joint space of the Choi construction is ordered (A, B) with index
//!   j·s + b, where A carries the maximally entangled reference and B is the
//!   subsystem the process acts on;
//! * with that ordering, the Choi state of a Kraus set is
//!   ρ_χ = (1/s) Σ_k vec(E_k)·vec(E_k)† using column-stacking vectorization,
//!   and the chi matrix is χ = s·ρ_χ with Tr χ = s;
//! * trace preservation is equivalent to the A-marginal of ρ_χ (trace over B)
//!   being I/s.

use num_complex::Complex64;

use crate::error::{Result, TomoError};
use crate::linalg::{self, CMatrix, CVector};
use crate::states::DensityMatrix;
use crate::tol;

/// Operator-sum representation: a list of s×s Kraus operators.
#[derive(Debug, Clone)]
pub struct KrausSet {
    dim: usize,
    operators: Vec<CMatrix>,
}

impl KrausSet {
    /// Wrap a list of Kraus operators, checking trace preservation.
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let set = KrausSet::new_unchecked(operators)?;
        let res = set.trace_preservation_residual();
        if res > tol::TAU_TP {
            return Err(TomoError::NotTracePreserving { residual: res });
        }
        Ok(set)
    }

    /// Wrap a list of operators without the trace-preservation check.
    /// Dimension consistency is still enforced.
    pub fn new_unchecked(operators: Vec<CMatrix>) -> Result<Self> {
        let dim = match operators.first() {
            Some(op) => op.nrows(),
            None => return Err(TomoError::invalid("empty Kraus set")),
        };
        for op in &operators {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(TomoError::dimension_mismatch(
                    "Kraus operator",
                    dim,
                    op.nrows().max(op.ncols()),
                ));
            }
        }
        Ok(KrausSet { dim, operators })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// ‖Σ E†E − I‖ (Frobenius); zero for an exactly trace-preserving set.
    pub fn trace_preservation_residual(&self) -> f64 {
        let mut acc = CMatrix::zeros((self.dim, self.dim));
        for e in &self.operators {
            acc += &linalg::dagger(e).dot(e);
        }
        let diff = &acc - &CMatrix::eye(self.dim);
        linalg::fro_norm(&diff)
    }
}

/// ‖Σ E†E − I‖ for a Kraus set.
pub fn verify_trace_preserving(ops: &KrausSet) -> f64 {
    ops.trace_preservation_residual()
}

/// Apply the operator sum: ρ → Σ E_k ρ E_k†.
pub fn apply_kraus(rho: &DensityMatrix, ops: &KrausSet) -> Result<DensityMatrix> {
    if ops.dim() != rho.dim() {
        return Err(TomoError::dimension_mismatch(
            "apply_kraus",
            rho.dim(),
            ops.dim(),
        ));
    }
    let res = ops.trace_preservation_residual();
    if res > tol::TAU_TP {
        return Err(TomoError::NotTracePreserving { residual: res });
    }
    let mut out = CMatrix::zeros((rho.dim(), rho.dim()));
    for e in ops.operators() {
        out += &e.dot(rho.matrix()).dot(&linalg::dagger(e));
    }
    DensityMatrix::new(out)
}

/// Embed a Kraus set as the first block-column of an ms×ms unitary.
///
/// The stacked block [E_1; …; E_m] must be an isometry (the trace-preservation
/// condition); the remaining columns are a deterministic orthonormal
/// completion. The first block-column of the result equals the inputs exactly.
pub fn dilate_to_unitary(ops: &KrausSet) -> Result<CMatrix> {
    let s = ops.dim();
    let m = ops.len();
    let mut stacked = CMatrix::zeros((m * s, s));
    for (k, e) in ops.operators().iter().enumerate() {
        for i in 0..s {
            for j in 0..s {
                stacked[[k * s + i, j]] = e[[i, j]];
            }
        }
    }
    let res = linalg::isometry_residual(&stacked);
    if res > tol::TAU_TP {
        return Err(TomoError::NotIsometry { residual: res });
    }
    linalg::complete_basis(&stacked)
}

/// The maximally entangled state (1/√s) Σ_j |j⟩⊗|j⟩ as a length-s² vector.
pub fn maximally_entangled_state(s: usize) -> Result<CVector> {
    if s < 2 {
        return Err(TomoError::invalid(format!(
            "maximally entangled state needs dimension >= 2, got {s}"
        )));
    }
    let mut v = CVector::zeros(s * s);
    let amp = Complex64::new(1.0 / (s as f64).sqrt(), 0.0);
    for j in 0..s {
        v[j * s + j] = amp;
    }
    Ok(v)
}

/// Operator basis used to express a chi matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiBasis {
    /// Matrix units |j⟩⟨b| via column-stacking vectorization.
    Computational,
    /// Normalized Pauli products (I, X, Y, Z)^⊗k / √s; requires s = 2^k.
    PauliProduct,
}

/// Process matrix χ of a quantum operation: s²×s² Hermitian PSD with
/// Tr χ = s, so that ρ_χ = χ/s is a state.
#[derive(Debug, Clone)]
pub struct ChiMatrix {
    dim: usize,
    basis: ChiBasis,
    matrix: CMatrix,
}

impl ChiMatrix {
    pub fn new(dim: usize, basis: ChiBasis, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(TomoError::dimension_mismatch(
                "chi matrix",
                dim * dim,
                matrix.nrows(),
            ));
        }
        let herm = linalg::hermiticity_residual(&matrix);
        if herm > tol::TAU_HERM {
            return Err(TomoError::NotHermitian { residual: herm });
        }
        let tr = linalg::trace(&matrix);
        if (tr.re - dim as f64).abs() > tol::TAU_TRACE * dim as f64 {
            return Err(TomoError::BadTrace {
                expected: dim as f64,
                got: tr.re,
            });
        }
        let evals = linalg::eigvalsh(&matrix)?;
        let min = evals.first().copied().unwrap_or(0.0);
        if min < -tol::TAU_PSD * dim as f64 {
            return Err(TomoError::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
        Ok(ChiMatrix { dim, basis, matrix })
    }

    /// System dimension s (the matrix itself is s²×s²).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> ChiBasis {
        self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Re-express in the requested basis.
    pub fn in_basis(&self, basis: ChiBasis) -> Result<ChiMatrix> {
        if basis == self.basis {
            return Ok(self.clone());
        }
        let t = pauli_transform(self.dim)?;
        let matrix = match (self.basis, basis) {
            (ChiBasis::Computational, ChiBasis::PauliProduct) => {
                linalg::dagger(&t).dot(&self.matrix).dot(&t)
            }
            (ChiBasis::PauliProduct, ChiBasis::Computational) => {
                t.dot(&self.matrix).dot(&linalg::dagger(&t))
            }
            _ => unreachable!(),
        };
        ChiMatrix::new(self.dim, basis, matrix)
    }
}

/// Unitary change of basis whose columns are vec(P_m)/√s for the Pauli
/// products P_m. Only defined for qubit registers (s = 2^k).
fn pauli_transform(s: usize) -> Result<CMatrix> {
    let basis = pauli_product_basis(s)?;
    let mut t = CMatrix::zeros((s * s, s * s));
    let scale = 1.0 / (s as f64).sqrt();
    for (m, p) in basis.iter().enumerate() {
        let v = linalg::vec_columns(p);
        for i in 0..s * s {
            t[[i, m]] = v[i] * scale;
        }
    }
    Ok(t)
}

/// The 2×2 Pauli matrices I, X, Y, Z.
pub fn pauli_matrices() -> [CMatrix; 4] {
    let z = |re: f64, im: f64| Complex64::new(re, im);
    [
        CMatrix::from_shape_vec((2, 2), vec![z(1., 0.), z(0., 0.), z(0., 0.), z(1., 0.)]).unwrap(),
        CMatrix::from_shape_vec((2, 2), vec![z(0., 0.), z(1., 0.), z(1., 0.), z(0., 0.)]).unwrap(),
        CMatrix::from_shape_vec((2, 2), vec![z(0., 0.), z(0., -1.), z(0., 1.), z(0., 0.)]).unwrap(),
        CMatrix::from_shape_vec((2, 2), vec![z(1., 0.), z(0., 0.), z(0., 0.), z(-1., 0.)]).unwrap(),
    ]
}

/// Pauli product operators (I, X, Y, Z)^⊗k in lexicographic order, for
/// s = 2^k. Each element has Hilbert–Schmidt norm √s.
pub fn pauli_product_basis(s: usize) -> Result<Vec<CMatrix>> {
    if !s.is_power_of_two() {
        return Err(TomoError::invalid(format!(
            "Pauli product basis needs a power-of-two dimension, got {s}"
        )));
    }
    let k = s.trailing_zeros();
    let singles = pauli_matrices();
    let mut basis = vec![CMatrix::eye(1)];
    for _ in 0..k {
        let mut next = Vec::with_capacity(basis.len() * 4);
        for b in &basis {
            for p in &singles {
                next.push(linalg::kron(b, p));
            }
        }
        basis = next;
    }
    Ok(basis)
}

/// Choi–Jamiolkowski state of a process: the image of half a maximally
/// entangled pair, a density matrix on the s² joint space.
#[derive(Debug, Clone)]
pub struct ChoiState {
    dim: usize,
    state: DensityMatrix,
}

impl ChoiState {
    pub fn new(dim: usize, state: DensityMatrix) -> Result<Self> {
        if state.dim() != dim * dim {
            return Err(TomoError::dimension_mismatch(
                "Choi state",
                dim * dim,
                state.dim(),
            ));
        }
        Ok(ChoiState { dim, state })
    }

    /// System dimension s (the state lives on s²).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn matrix(&self) -> &CMatrix {
        self.state.matrix()
    }

    /// Reduced state on the reference subsystem A (trace over B).
    /// Equals I/s exactly when the underlying process is trace preserving.
    pub fn input_marginal(&self) -> CMatrix {
        linalg::partial_trace_second(self.state.matrix(), self.dim, self.dim)
    }

    /// ‖Tr_B ρ_χ − I/s‖, the trace-preservation residual.
    pub fn tp_residual(&self) -> f64 {
        let marg = self.input_marginal();
        let target = CMatrix::eye(self.dim).mapv(|z| z / self.dim as f64);
        linalg::fro_norm(&(&marg - &target))
    }
}

/// A completely positive trace-preserving map in any of its three
/// interchangeable representations.
#[derive(Debug, Clone)]
pub enum QuantumProcess {
    Kraus(KrausSet),
    Chi(ChiMatrix),
    Choi(ChoiState),
}

impl QuantumProcess {
    /// Channel of a single unitary.
    pub fn unitary(u: CMatrix) -> Result<Self> {
        let res = linalg::isometry_residual(&u);
        if res > tol::TAU_UNIT {
            return Err(TomoError::NotUnitary { residual: res });
        }
        Ok(QuantumProcess::Kraus(KrausSet::new(vec![u])?))
    }

    /// Fully depolarizing channel ρ → I/s.
    pub fn depolarizing(s: usize) -> Result<Self> {
        let scale = Complex64::new(1.0 / (s as f64).sqrt(), 0.0);
        let mut ops = Vec::with_capacity(s * s);
        for a in 0..s {
            for b in 0..s {
                let mut e = CMatrix::zeros((s, s));
                e[[a, b]] = scale;
                ops.push(e);
            }
        }
        Ok(QuantumProcess::Kraus(KrausSet::new(ops)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            QuantumProcess::Kraus(k) => k.dim(),
            QuantumProcess::Chi(c) => c.dim(),
            QuantumProcess::Choi(c) => c.dim(),
        }
    }

    /// Apply the process to a state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        match self {
            QuantumProcess::Kraus(k) => apply_kraus(rho, k),
            _ => {
                let choi = choi_of_process(self)?;
                apply_via_choi(&choi, rho)
            }
        }
    }
}

/// Apply a process through its Choi state:
/// E(ρ)[x,y] = s·Σ_{j,j'} ρ[j,j']·ρ_χ[(j,x),(j',y)].
fn apply_via_choi(choi: &ChoiState, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let s = choi.dim();
    if rho.dim() != s {
        return Err(TomoError::dimension_mismatch("apply", s, rho.dim()));
    }
    let rc = choi.matrix();
    let rm = rho.matrix();
    let mut out = CMatrix::zeros((s, s));
    for x in 0..s {
        for y in 0..s {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..s {
                for jp in 0..s {
                    acc += rm[[j, jp]] * rc[[j * s + x, jp * s + y]];
                }
            }
            out[[x, y]] = acc * s as f64;
        }
    }
    DensityMatrix::new(out)
}

/// Choi state of a process: (I ⊗ E) applied to |Φ⟩⟨Φ|, the process acting on
/// the second tensor factor.
pub fn choi_of_process(proc: &QuantumProcess) -> Result<ChoiState> {
    match proc {
        QuantumProcess::Choi(c) => Ok(c.clone()),
        QuantumProcess::Chi(chi) => {
            let comp = chi.in_basis(ChiBasis::Computational)?;
            let s = comp.dim();
            let state = DensityMatrix::new(comp.matrix().mapv(|z| z / s as f64))?;
            ChoiState::new(s, state)
        }
        QuantumProcess::Kraus(k) => {
            let res = k.trace_preservation_residual();
            if res > tol::TAU_TP {
                return Err(TomoError::NotTracePreserving { residual: res });
            }
            let s = k.dim();
            let mut acc = CMatrix::zeros((s * s, s * s));
            for e in k.operators() {
                let v = linalg::vec_columns(e);
                for i in 0..s * s {
                    for j in 0..s * s {
                        acc[[i, j]] += v[i] * v[j].conj();
                    }
                }
            }
            let state = DensityMatrix::new(acc.mapv(|z| z / s as f64))?;
            ChoiState::new(s, state)
        }
    }
}

/// χ = s·ρ_χ in the computational basis.
pub fn chi_from_choi(rho_chi: &ChoiState) -> Result<ChiMatrix> {
    let s = rho_chi.dim();
    ChiMatrix::new(
        s,
        ChiBasis::Computational,
        rho_chi.matrix().mapv(|z| z * s as f64),
    )
}

/// Kraus operators from a chi matrix: scaled eigenvectors of χ, discarding
/// eigenvalues below TAU_RANK relative to the largest.
pub fn kraus_from_chi(chi: &ChiMatrix) -> Result<KrausSet> {
    let comp = chi.in_basis(ChiBasis::Computational)?;
    let s = comp.dim();
    let (vals, vecs) = linalg::eigh(comp.matrix())?;
    let max = vals.last().copied().unwrap_or(0.0);
    if let Some(&min) = vals.first() {
        if min < -tol::TAU_PSD * s as f64 {
            return Err(TomoError::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
    }
    let mut ops = Vec::new();
    // descending order so the dominant Kraus operator comes first
    for k in (0..vals.len()).rev() {
        let lam = vals[k];
        if lam <= tol::TAU_RANK * max.max(0.0) {
            continue;
        }
        let col = vecs.column(k).to_owned();
        // deterministic phase: largest-magnitude entry real positive
        let (mut best, mut best_mag) = (Complex64::new(1.0, 0.0), 0.0);
        for z in col.iter() {
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
        let scaled = col.mapv(|z| z * phase * lam.sqrt());
        ops.push(linalg::unvec_columns(&scaled, s));
    }
    if ops.is_empty() {
        return Err(TomoError::invalid("chi matrix has no positive eigenvalues"));
    }
    KrausSet::new_unchecked(ops)
}
