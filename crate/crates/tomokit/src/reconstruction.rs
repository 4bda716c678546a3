//! Maximum-likelihood reconstruction of states and processes over purified
//! blocks, with adequate-rank selection.
//!
//! The estimate is the s×r (or s²×r for processes) block c with intensities
//! λ_j = ⟨c|(Λ_j ⊗ I_r)|c⟩. A stationary point of the likelihood solves
//! I·c = J(c)·c with I = Σ_j t_j (Λ_j ⊗ I_r) and J(c) = Σ_j (k_j/λ_j)
//! (Λ_j ⊗ I_r); the solver iterates the damped fixed point
//! c ← (1−α)·I⁻¹J(c)c + α·c, rejecting any step that lowers the
//! log-likelihood and increasing the damping instead. Process estimates are
//! projected back onto the trace-preserving set after every step.

use num_complex::Complex64;

use crate::error::{Result, TomoError};
use crate::linalg::{self, CMatrix};
use crate::processes::{ChiMatrix, ChoiState, KrausSet};
use crate::protocols::{Protocol, ProtocolKind};
use crate::simulator::MeasurementData;
use crate::states::{densify, DensityMatrix, PurifiedState};
use crate::statistics::{chi_square_adequacy, AdequacyReport};
use crate::tol;

const MAX_ITERATIONS: usize = 10_000;

/// Outcome of a maximum-likelihood reconstruction.
#[derive(Debug, Clone)]
pub struct TomographyResult {
    kind: ProtocolKind,
    dim: usize,
    rank: usize,
    estimate: PurifiedState,
    log_likelihood: f64,
    iterations: usize,
    residual: f64,
}

impl TomographyResult {
    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    /// System dimension s of the protocol the data came from.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The purified estimate on the object space (state or Choi).
    pub fn estimate(&self) -> &PurifiedState {
        &self.estimate
    }

    /// Poisson-form log-likelihood Σ k_j ln λ_j − t_j λ_j at the estimate.
    pub fn log_likelihood(&self) -> f64 {
        self.log_likelihood
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Last fixed-point movement ‖c_new − c‖.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Density-matrix view of the estimate.
    pub fn density(&self) -> Result<DensityMatrix> {
        densify(&self.estimate)
    }

    /// Choi-state view (process reconstructions only).
    pub fn choi(&self) -> Result<ChoiState> {
        if self.kind != ProtocolKind::Process {
            return Err(TomoError::invalid("not a process reconstruction"));
        }
        ChoiState::new(self.dim, self.density()?)
    }

    /// Chi-matrix view (process reconstructions only).
    pub fn chi(&self) -> Result<ChiMatrix> {
        crate::processes::chi_from_choi(&self.choi()?)
    }

    /// Kraus view (process reconstructions only).
    pub fn kraus(&self) -> Result<KrausSet> {
        crate::processes::kraus_from_chi(&self.chi()?)
    }

    /// Model intensities λ̂_j under a protocol.
    pub fn intensities(&self, p: &Protocol) -> Result<Vec<f64>> {
        if p.object_dim() != self.estimate.dim() {
            return Err(TomoError::dimension_mismatch(
                "intensities",
                self.estimate.dim(),
                p.object_dim(),
            ));
        }
        let c = self.estimate.block();
        Ok((0..p.len())
            .map(|j| intensity(&p.effective_operator(j), c))
            .collect())
    }
}

fn intensity(op: &CMatrix, c: &CMatrix) -> f64 {
    let w = op.dot(c);
    c.iter()
        .zip(w.iter())
        .map(|(a, b)| (a.conj() * b).re)
        .sum()
}

/// Reconstruct a quantum state of the given rank from measured counts.
pub fn reconstruct_state(
    data: &MeasurementData,
    p: &Protocol,
    rank: usize,
) -> Result<TomographyResult> {
    if p.kind() != ProtocolKind::State {
        return Err(TomoError::invalid("protocol is not a state protocol"));
    }
    run_reconstruction(data, p, rank)
}

/// Reconstruct a quantum process of the given Choi rank from measured counts.
pub fn reconstruct_process(
    data: &MeasurementData,
    p: &Protocol,
    rank: usize,
) -> Result<TomographyResult> {
    if p.kind() != ProtocolKind::Process {
        return Err(TomoError::invalid("protocol is not a process protocol"));
    }
    run_reconstruction(data, p, rank)
}

fn run_reconstruction(data: &MeasurementData, p: &Protocol, rank: usize) -> Result<TomographyResult> {
    if rank == 0 {
        return Err(TomoError::invalid("rank must be at least 1"));
    }
    data.check_alignment(p)?;
    let d = p.object_dim();
    if rank > d {
        return Err(TomoError::invalid(format!(
            "rank {rank} exceeds object dimension {d}"
        )));
    }
    let ops: Vec<CMatrix> = (0..p.len()).map(|j| p.effective_operator(j)).collect();
    let t = &data.exposures;
    let k = &data.counts;

    // I = Σ t_j Λ_j at the block level, with a clamped pseudo-inverse
    let mut weighted = CMatrix::zeros((d, d));
    for (j, op) in ops.iter().enumerate() {
        weighted += &op.mapv(|z| z * t[j]);
    }
    let a_inv = pseudo_inverse(&weighted)?;

    let mut c = initial_block(data, p, &ops, rank)?;
    if p.kind() == ProtocolKind::Process {
        c = project_trace_preserving(&c, p.dim())?;
    }

    let mut log_l = log_likelihood(&ops, t, k, &c);
    let mut alpha = 0.5f64;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        // J(c)·c = Σ (k_j/λ_j) Λ_j c, intensities floored to guard divisions
        let mut jc = CMatrix::zeros(c.dim());
        for (j, op) in ops.iter().enumerate() {
            if k[j] == 0 {
                continue;
            }
            let w = op.dot(&c);
            let lam: f64 = c.iter().zip(w.iter()).map(|(a, b)| (a.conj() * b).re).sum();
            jc += &w.mapv(|z| z * (k[j] as f64 / lam.max(tol::LAMBDA_FLOOR)));
        }
        let fixed_point = a_inv.dot(&jc);

        let mut accepted = false;
        for _attempt in 0..12 {
            let mut candidate = fixed_point.mapv(|z| z * (1.0 - alpha)) + c.mapv(|z| z * alpha);
            if p.kind() == ProtocolKind::Process {
                candidate = project_trace_preserving(&candidate, p.dim())?;
            }
            let cand_log_l = log_likelihood(&ops, t, k, &candidate);
            if cand_log_l >= log_l - 1e-10 * (1.0 + log_l.abs()) {
                residual = linalg::fro_norm(&(&candidate - &c));
                c = candidate;
                log_l = cand_log_l;
                alpha = (alpha * 0.7).max(0.05);
                accepted = true;
                break;
            }
            alpha = (1.0 + alpha) / 2.0;
        }
        if !accepted {
            // damping saturated: the iterate is at a numerical stationary point
            residual = 0.0;
            break;
        }
        if residual < tol::TAU_CONV {
            break;
        }
    }

    if iterations >= MAX_ITERATIONS && residual >= tol::TAU_CONV {
        return Err(TomoError::NonConvergence {
            iterations,
            residual,
        });
    }

    // a converged estimate insisting on zero intensity against observed
    // counts is a genuine model violation, not numerical noise
    for (j, op) in ops.iter().enumerate() {
        if k[j] == 0 {
            continue;
        }
        let lam = intensity(op, &c);
        if lam < tol::LAMBDA_FLOOR {
            return Err(TomoError::ModelViolation {
                row: j,
                intensity: lam,
                count: k[j],
            });
        }
    }

    let estimate = PurifiedState::normalized(c)?;
    Ok(TomographyResult {
        kind: p.kind(),
        dim: p.dim(),
        rank,
        estimate,
        log_likelihood: log_l,
        iterations,
        residual,
    })
}

/// Poisson-form log-likelihood with intensities floored against ln(0).
fn log_likelihood(ops: &[CMatrix], t: &[f64], k: &[u64], c: &CMatrix) -> f64 {
    let mut acc = 0.0;
    for (j, op) in ops.iter().enumerate() {
        let lam = intensity(op, c);
        if k[j] > 0 {
            acc += k[j] as f64 * lam.max(tol::LAMBDA_FLOOR).ln();
        }
        acc -= t[j] * lam.max(0.0);
    }
    acc
}

/// Clamped pseudo-inverse of a Hermitian PSD matrix.
fn pseudo_inverse(a: &CMatrix) -> Result<CMatrix> {
    let evals = linalg::eigvalsh(a)?;
    let top = evals.last().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return Err(TomoError::invalid("exposure-weighted operator sum is zero"));
    }
    let floor = top * 1e-12;
    linalg::hermitian_map(a, |x| if x > floor { 1.0 / x } else { 0.0 })
}

/// Linear-inversion warm start: least-squares fit of the Hermitian object to
/// the observed frequencies, projected to the state space and truncated to
/// rank r. Falls back to the maximally mixed block for very large objects.
///
/// The truncated block is blended with columns of the discrete Fourier
/// matrix until every row with observed counts has a strictly positive
/// initial intensity; a row the fixed point cannot see at the start would
/// stay invisible forever.
fn initial_block(
    data: &MeasurementData,
    p: &Protocol,
    ops: &[CMatrix],
    rank: usize,
) -> Result<CMatrix> {
    let d = p.object_dim();
    let herm_dim = d * d;
    let estimate = if herm_dim <= 1024 {
        linear_inversion(data, ops, d).ok()
    } else {
        None
    };
    let rho = match estimate {
        Some(m) => DensityMatrix::project(&m)
            .unwrap_or_else(|_| DensityMatrix::maximally_mixed(d)),
        None => DensityMatrix::maximally_mixed(d),
    };
    // ridge blend keeps the full spectrum positive before truncation
    let beta = 0.01;
    let blended = rho.matrix().mapv(|z| z * (1.0 - beta))
        + CMatrix::eye(d).mapv(|z| z * (beta / d as f64));
    let full = DensityMatrix::new(blended)?;
    let purified = crate::states::purify(&full, rank.max(full.rank()))?;
    let block = purified.block();
    let mut c = CMatrix::zeros((d, rank));
    for col in 0..rank.min(block.ncols()) {
        for i in 0..d {
            c[[i, col]] = block[[i, col]];
        }
    }
    let norm = linalg::fro_norm(&c);
    let mut c = c.mapv(|z| z / norm);

    // dense deterministic mixing pattern: DFT columns have no zero entries
    let dft = CMatrix::from_shape_fn((d, rank), |(i, j)| {
        Complex64::from_polar(
            1.0 / (d as f64 * rank as f64).sqrt(),
            std::f64::consts::TAU * (i * (j + 1)) as f64 / d as f64,
        )
    });
    let mut gamma = 0.05;
    for _ in 0..8 {
        let visible = ops.iter().enumerate().all(|(j, op)| {
            data.counts[j] == 0 || intensity(op, &c) > 10.0 * tol::LAMBDA_FLOOR
        });
        if visible {
            break;
        }
        let mixed = c.mapv(|z| z * (1.0 - gamma)) + dft.mapv(|z| z * gamma);
        let norm = linalg::fro_norm(&mixed);
        c = mixed.mapv(|z| z / norm);
        gamma = (gamma * 2.0).min(0.9);
    }
    Ok(c)
}

fn linear_inversion(data: &MeasurementData, ops: &[CMatrix], d: usize) -> Result<CMatrix> {
    let herm_dim = d * d;
    let sqrt2 = 2.0f64.sqrt();
    let iso = |op: &CMatrix| -> Vec<f64> {
        let mut v = Vec::with_capacity(herm_dim);
        for i in 0..d {
            v.push(op[[i, i]].re);
        }
        for i in 0..d {
            for j in i + 1..d {
                v.push(sqrt2 * op[[i, j]].re);
                v.push(sqrt2 * op[[i, j]].im);
            }
        }
        v
    };
    let freqs = data.frequencies();
    let mut gram = ndarray::Array2::<f64>::zeros((herm_dim, herm_dim));
    let mut rhs = vec![0.0; herm_dim];
    for (j, op) in ops.iter().enumerate() {
        let row = iso(op);
        for a in 0..herm_dim {
            rhs[a] += freqs[j] * row[a];
            for b in 0..herm_dim {
                gram[[a, b]] += row[a] * row[b];
            }
        }
    }
    let (evals, evecs) = linalg::eigh_real(&gram)?;
    let top = evals.last().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return Err(TomoError::invalid("degenerate design matrix"));
    }
    let floor = top * 1e-10;
    // x = V f(Λ) Vᵀ rhs
    let mut x = vec![0.0; herm_dim];
    for (idx, &lam) in evals.iter().enumerate() {
        if lam <= floor {
            continue;
        }
        let col = evecs.column(idx);
        let proj: f64 = col.iter().zip(rhs.iter()).map(|(a, b)| a * b).sum();
        let scale = proj / lam;
        for a in 0..herm_dim {
            x[a] += scale * col[a];
        }
    }
    // unpack isometric coordinates back into a Hermitian matrix
    let mut m = CMatrix::zeros((d, d));
    let mut idx = 0;
    for i in 0..d {
        m[[i, i]] = Complex64::new(x[idx], 0.0);
        idx += 1;
    }
    for i in 0..d {
        for j in i + 1..d {
            let re = x[idx] / sqrt2;
            let im = x[idx + 1] / sqrt2;
            idx += 2;
            m[[i, j]] = Complex64::new(re, im);
            m[[j, i]] = Complex64::new(re, -im);
        }
    }
    Ok(m)
}

/// Project a purified Choi block onto the trace-preserving set by normalizing
/// its input marginal to I/s with the symmetric inverse square root.
pub fn project_trace_preserving(c: &CMatrix, s: usize) -> Result<CMatrix> {
    let (dd, r) = c.dim();
    if dd != s * s {
        return Err(TomoError::dimension_mismatch("tp projection", s * s, dd));
    }
    // G = Tr_B(cc†) without forming the full outer product
    let mut g = CMatrix::zeros((s, s));
    for col in 0..r {
        for j in 0..s {
            for jp in 0..s {
                let mut acc = Complex64::new(0.0, 0.0);
                for b in 0..s {
                    acc += c[[j * s + b, col]] * c[[jp * s + b, col]].conj();
                }
                g[[j, jp]] += acc;
            }
        }
    }
    let scaled = g.mapv(|z| z * s as f64);
    let evals = linalg::eigvalsh(&scaled)?;
    let top = evals.last().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return Err(TomoError::invalid("zero input marginal"));
    }
    let floor = top * 1e-12;
    let inv_sqrt = linalg::hermitian_map(&scaled, |x| if x > floor { 1.0 / x.sqrt() } else { 0.0 })?;
    // c' = (T ⊗ I_B)·c
    let mut out = CMatrix::zeros((dd, r));
    for col in 0..r {
        for j in 0..s {
            for b in 0..s {
                let mut acc = Complex64::new(0.0, 0.0);
                for jp in 0..s {
                    acc += inv_sqrt[[j, jp]] * c[[jp * s + b, col]];
                }
                out[[j * s + b, col]] = acc;
            }
        }
    }
    // exact TP would give unit norm; renormalize to absorb clamping
    let norm = linalg::fro_norm(&out);
    if norm <= 0.0 {
        return Err(TomoError::invalid("trace-preserving projection collapsed"));
    }
    Ok(out.mapv(|z| z / norm))
}

/// How the rank ladder terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankOutcome {
    /// Smallest rank whose adequacy p-value reached the significance level.
    Adequate,
    /// No rank passed; the reported rank is the largest testable one.
    NonePassed,
}

/// Result of adequate-rank selection.
#[derive(Debug, Clone)]
pub struct RankSelection {
    pub rank: usize,
    pub outcome: RankOutcome,
    pub result: TomographyResult,
    /// Adequacy report per tested rank, in ladder order.
    pub reports: Vec<(usize, AdequacyReport)>,
}

/// Reconstruct at r = 1, 2, … and return the smallest rank whose chi-square
/// adequacy p-value reaches the significance level.
pub fn adequate_rank(
    data: &MeasurementData,
    p: &Protocol,
    significance: f64,
) -> Result<RankSelection> {
    if !(0.0..1.0).contains(&significance) || significance == 0.0 {
        return Err(TomoError::invalid("significance must be in (0, 1)"));
    }
    let max_rank = p.object_dim();
    let mut reports = Vec::new();
    let mut last: Option<TomographyResult> = None;
    for r in 1..=max_rank {
        let result = run_reconstruction(data, p, r)?;
        match chi_square_adequacy(p, data, &result, significance) {
            Ok(report) => {
                let adequate = report.adequate;
                reports.push((r, report));
                if adequate {
                    return Ok(RankSelection {
                        rank: r,
                        outcome: RankOutcome::Adequate,
                        result,
                        reports,
                    });
                }
                last = Some(result);
            }
            Err(TomoError::OverParameterized { .. }) => {
                // no degrees of freedom left to test; stop the ladder
                let result = last.unwrap_or(result);
                return Ok(RankSelection {
                    rank: result.rank(),
                    outcome: RankOutcome::NonePassed,
                    result,
                    reports,
                });
            }
            Err(e) => return Err(e),
        }
    }
    let result = last.expect("at least one rank was tested");
    Ok(RankSelection {
        rank: result.rank(),
        outcome: RankOutcome::NonePassed,
        result,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{
        build_pauli6_process_protocol, build_pauli6_state_protocol, build_set1_process_protocol,
    };
    use crate::simulator::{
        noisy_z_gate, predict_probabilities, simulate_experiment, SamplingMode, TomographyObject,
    };
    use crate::states::fidelity;
    use crate::processes::{choi_of_process, pauli_matrices, ChiBasis, QuantumProcess};

    /// Exact-frequency data: counts equal to t·p rounded on a huge exposure.
    fn exact_data(obj: &TomographyObject, p: &Protocol, trials: f64) -> MeasurementData {
        let probs = predict_probabilities(obj, p).unwrap();
        let exposures: Vec<f64> = p.rows().iter().map(|r| r.exposure * trials).collect();
        let counts: Vec<u64> = probs
            .iter()
            .zip(exposures.iter())
            .map(|(&pr, &t)| (pr * t).round() as u64)
            .collect();
        MeasurementData {
            counts,
            exposures,
            mode: SamplingMode::Multinomial,
            n: trials * p.complete_groups().len().max(1) as f64,
        }
    }

    #[test]
    fn exact_pure_state_recovered() {
        let p = build_pauli6_state_protocol();
        let truth = DensityMatrix::pure(&[
            Complex64::new(0.8, 0.0),
            Complex64::new(0.36, 0.48),
        ])
        .unwrap();
        let data = exact_data(&TomographyObject::State(truth.clone()), &p, 1e9);
        let result = reconstruct_state(&data, &p, 1).unwrap();
        let est = result.density().unwrap();
        let f = fidelity(&truth, &est).unwrap();
        assert!(f > 1.0 - 1e-9, "fidelity {f}");
    }

    #[test]
    fn noisy_pure_state_close() {
        let p = build_pauli6_state_protocol().scale_exposures(100_000.0).unwrap();
        let truth = DensityMatrix::pure(&[
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
        ])
        .unwrap();
        let data = simulate_experiment(
            &TomographyObject::State(truth.clone()),
            &p,
            SamplingMode::Multinomial,
            31,
        )
        .unwrap();
        let result = reconstruct_state(&data, &p, 1).unwrap();
        let f = fidelity(&truth, &result.density().unwrap()).unwrap();
        assert!(f > 0.999, "fidelity {f}");
    }

    #[test]
    fn mixed_state_rank2_recovered() {
        let p = build_pauli6_state_protocol();
        let truth = crate::testutil::random_density(2, 2, 61);
        let data = exact_data(&TomographyObject::State(truth.clone()), &p, 1e9);
        let result = reconstruct_state(&data, &p, 2).unwrap();
        let f = fidelity(&truth, &result.density().unwrap()).unwrap();
        assert!(f > 1.0 - 1e-6, "fidelity {f}");
    }

    #[test]
    fn gauge_of_initial_block_is_irrelevant() {
        // likelihood and result depend on the initial block only through cc†
        let p = build_pauli6_state_protocol().scale_exposures(10_000.0).unwrap();
        let truth = crate::testutil::random_density(2, 2, 62);
        let data = simulate_experiment(
            &TomographyObject::State(truth),
            &p,
            SamplingMode::Multinomial,
            63,
        )
        .unwrap();
        let r1 = reconstruct_state(&data, &p, 2).unwrap();
        let r2 = reconstruct_state(&data, &p, 2).unwrap();
        // determinism
        assert_eq!(r1.iterations(), r2.iterations());
        let d1 = r1.density().unwrap();
        let d2 = r2.density().unwrap();
        assert!(linalg::fro_norm(&(d1.matrix() - d2.matrix())) < 1e-12);
        // gauge rotation of the estimate leaves the density matrix unchanged
        let v = crate::simulator::haar_unitary(2, 64);
        let rotated = r1.estimate().gauge(&v).unwrap();
        let d3 = densify(&rotated).unwrap();
        assert!(linalg::fro_norm(&(d1.matrix() - d3.matrix())) < 1e-8);
    }

    #[test]
    fn exact_z_gate_process_recovered() {
        let p = build_pauli6_process_protocol();
        let [_, _, _, z] = pauli_matrices();
        let proc = QuantumProcess::unitary(z.clone()).unwrap();
        let data = exact_data(&TomographyObject::Process(proc.clone()), &p, 1e9);
        let result = reconstruct_process(&data, &p, 1).unwrap();
        let est_choi = result.choi().unwrap();
        let true_choi = choi_of_process(&proc).unwrap();
        let f = fidelity(true_choi.state(), est_choi.state()).unwrap();
        assert!(f > 1.0 - 1e-9, "process fidelity {f}");
        assert!(est_choi.tp_residual() < 1e-6);
    }

    #[test]
    fn noisy_z_gate_rank2_chi_dominant_zz() {
        let p = build_pauli6_process_protocol().scale_exposures(200_000.0).unwrap();
        let proc = noisy_z_gate(0.05).unwrap();
        let data = simulate_experiment(
            &TomographyObject::Process(proc),
            &p,
            SamplingMode::Multinomial,
            71,
        )
        .unwrap();
        let result = reconstruct_process(&data, &p, 2).unwrap();
        let chi = result.chi().unwrap().in_basis(ChiBasis::PauliProduct).unwrap();
        // dominant element on the (Z, Z) diagonal
        let zz = chi.matrix()[[3, 3]].re;
        assert!(zz > 1.5, "ZZ element {zz}");
        for i in 0..4 {
            if i != 3 {
                assert!(chi.matrix()[[i, i]].re < 0.2);
            }
        }
        assert!(result.choi().unwrap().tp_residual() < 1e-6);
    }

    #[test]
    fn incomplete_protocol_still_converges() {
        let p = build_set1_process_protocol(4)
            .unwrap()
            .scale_exposures(10_000.0)
            .unwrap();
        let proc = QuantumProcess::unitary(crate::simulator::haar_unitary(4, 81)).unwrap();
        let data = simulate_experiment(
            &TomographyObject::Process(proc.clone()),
            &p,
            SamplingMode::Multinomial,
            82,
        )
        .unwrap();
        let result = reconstruct_process(&data, &p, 1).unwrap();
        // fidelity to the truth may be arbitrarily poor; the fit itself is fine
        let predicted = result.intensities(&p).unwrap();
        let freqs = data.frequencies();
        let max_gap = predicted
            .iter()
            .zip(freqs.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max_gap < 0.05, "max intensity gap {max_gap}");
    }

    #[test]
    fn zero_operator_row_with_counts_is_model_violation() {
        // a row whose operator is identically zero can never predict counts
        let mut rows: Vec<crate::protocols::MeasurementOperator> =
            build_pauli6_state_protocol().rows().to_vec();
        rows.push(crate::protocols::MeasurementOperator {
            operator: CMatrix::zeros((2, 2)),
            exposure: 1000.0,
            group: 99,
            provenance: Default::default(),
        });
        let p = Protocol::new(
            2,
            ProtocolKind::State,
            rows,
            std::collections::BTreeSet::from([0, 1, 2]),
        )
        .unwrap();
        let truth = crate::testutil::random_density(2, 2, 95);
        let mut data = exact_data(&TomographyObject::State(truth), &p, 1000.0);
        data.counts[6] = 5;
        let err = reconstruct_state(&data, &p, 2).unwrap_err();
        assert!(matches!(err, TomoError::ModelViolation { .. }));
    }

    #[test]
    fn rank_ladder_prefers_one_for_unitary_data() {
        let p = build_pauli6_process_protocol().scale_exposures(20_000.0).unwrap();
        let [_, _, _, z] = pauli_matrices();
        let proc = QuantumProcess::unitary(z).unwrap();
        let data = simulate_experiment(
            &TomographyObject::Process(proc),
            &p,
            SamplingMode::Multinomial,
            91,
        )
        .unwrap();
        let selection = adequate_rank(&data, &p, 0.05).unwrap();
        assert_eq!(selection.rank, 1);
        assert_eq!(selection.outcome, RankOutcome::Adequate);
    }

    #[test]
    fn underpowered_data_accepts_rank_one() {
        let p = build_pauli6_process_protocol().scale_exposures(30.0).unwrap();
        let proc = noisy_z_gate(0.05).unwrap();
        let data = simulate_experiment(
            &TomographyObject::Process(proc),
            &p,
            SamplingMode::Multinomial,
            92,
        )
        .unwrap();
        let selection = adequate_rank(&data, &p, 0.05).unwrap();
        assert_eq!(selection.rank, 1, "tiny samples cannot reject rank 1");
    }

    #[test]
    fn trace_preserving_projection_fixes_marginal() {
        let mut c = CMatrix::zeros((4, 2));
        c[[0, 0]] = Complex64::new(0.9, 0.1);
        c[[1, 0]] = Complex64::new(0.2, 0.0);
        c[[2, 1]] = Complex64::new(0.5, -0.3);
        c[[3, 1]] = Complex64::new(0.1, 0.4);
        let projected = project_trace_preserving(&c, 2).unwrap();
        let outer = projected.dot(&linalg::dagger(&projected));
        let marg = linalg::partial_trace_second(&outer, 2, 2);
        let target = CMatrix::eye(2).mapv(|z| z * 0.5);
        assert!(linalg::fro_norm(&(&marg - &target)) < 1e-10);
    }
}
