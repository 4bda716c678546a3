//! Forward model and seeded count generation.
//!
//! Reproducibility contract: every stochastic routine takes an explicit seed
//! and derives one ChaCha20 stream per protocol row (or per multinomial
//! group, keyed by the group's first row), so results are independent of
//! evaluation order and safe to parallelize.

use num_complex::Complex64;
use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TomoError};
use crate::linalg::{self, CMatrix, CVector};
use crate::processes::{choi_of_process, KrausSet, QuantumProcess};
use crate::protocols::{Protocol, ProtocolKind};
use crate::states::DensityMatrix;

/// The object a tomography experiment probes.
#[derive(Debug, Clone)]
pub enum TomographyObject {
    State(DensityMatrix),
    Process(QuantumProcess),
}

impl TomographyObject {
    pub fn dim(&self) -> usize {
        match self {
            TomographyObject::State(rho) => rho.dim(),
            TomographyObject::Process(p) => p.dim(),
        }
    }
}

/// How counts are drawn from predicted probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// One multinomial draw per complete group; ungrouped rows fall back to
    /// independent binomials.
    #[default]
    Multinomial,
    /// Independent binomial per row.
    Binomial,
    /// Independent Poisson per row with mean exposure·probability.
    Poisson,
}

/// Observed counts aligned with a protocol's rows.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MeasurementData {
    pub counts: Vec<u64>,
    pub exposures: Vec<f64>,
    pub mode: SamplingMode,
    /// Total sample size: one exposure per complete group plus one per
    /// ungrouped row.
    pub n: f64,
}

impl MeasurementData {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Observed frequencies k_j / t_j.
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts
            .iter()
            .zip(self.exposures.iter())
            .map(|(&k, &t)| if t > 0.0 { k as f64 / t } else { 0.0 })
            .collect()
    }

    /// Check row alignment against a protocol.
    pub fn check_alignment(&self, p: &Protocol) -> Result<()> {
        if self.counts.len() != p.len() || self.exposures.len() != p.len() {
            return Err(TomoError::dimension_mismatch(
                "measurement data rows",
                p.len(),
                self.counts.len(),
            ));
        }
        Ok(())
    }
}

/// Predicted outcome probabilities of an object under a protocol.
///
/// Each value is Tr[Λ_j ρ] for states or Tr[χ·M_j] for processes; complete
/// groups sum to one.
pub fn predict_probabilities(obj: &TomographyObject, p: &Protocol) -> Result<Vec<f64>> {
    match (obj, p.kind()) {
        (TomographyObject::State(rho), ProtocolKind::State) => {
            if rho.dim() != p.dim() {
                return Err(TomoError::dimension_mismatch("predict", p.dim(), rho.dim()));
            }
            Ok(p.rows()
                .iter()
                .map(|r| clamp_probability(linalg::hs_inner(&r.operator, rho.matrix()).re))
                .collect())
        }
        (TomographyObject::Process(proc), ProtocolKind::Process) => {
            if proc.dim() != p.dim() {
                return Err(TomoError::dimension_mismatch("predict", p.dim(), proc.dim()));
            }
            let choi = choi_of_process(proc)?;
            let s = p.dim() as f64;
            Ok(p.rows()
                .iter()
                .map(|r| {
                    clamp_probability(s * linalg::hs_inner(&r.operator, choi.matrix()).re)
                })
                .collect())
        }
        _ => Err(TomoError::invalid(
            "object kind does not match protocol kind",
        )),
    }
}

fn clamp_probability(p: f64) -> f64 {
    if p < 0.0 && p > -1e-9 {
        0.0
    } else if p > 1.0 && p < 1.0 + 1e-9 {
        1.0
    } else {
        p
    }
}

/// Draw counts for the given probabilities under a protocol's exposures.
///
/// Probabilities must lie in [0, 1]; multinomial groups must sum to one
/// within 1e−6. Identical inputs and seed give identical data.
pub fn sample_counts(
    probabilities: &[f64],
    p: &Protocol,
    mode: SamplingMode,
    seed: u64,
) -> Result<MeasurementData> {
    if probabilities.len() != p.len() {
        return Err(TomoError::dimension_mismatch(
            "probabilities",
            p.len(),
            probabilities.len(),
        ));
    }
    for (i, &prob) in probabilities.iter().enumerate() {
        if !(0.0..=1.0).contains(&prob) {
            return Err(TomoError::invalid(format!(
                "probability {prob} at row {i} outside [0, 1]"
            )));
        }
    }
    let mut counts = vec![0u64; p.len()];
    let exposures: Vec<f64> = p.rows().iter().map(|r| r.exposure).collect();

    let mut grouped = vec![false; p.len()];
    if mode == SamplingMode::Multinomial {
        for (&g, members) in &p.group_members() {
            if !p.is_group_complete(g) {
                continue;
            }
            let total: f64 = members.iter().map(|&i| probabilities[i]).sum();
            if (total - 1.0).abs() > 1e-6 {
                return Err(TomoError::invalid(format!(
                    "group {g} probabilities sum to {total}, expected 1"
                )));
            }
            let trials = exposures[members[0]].round() as u64;
            let mut rng = row_rng(seed, members[0]);
            // conditional binomial chain
            let mut remaining = trials;
            let mut prob_left = 1.0f64;
            for (pos, &idx) in members.iter().enumerate() {
                grouped[idx] = true;
                if remaining == 0 {
                    break;
                }
                if pos == members.len() - 1 {
                    counts[idx] = remaining;
                    break;
                }
                let cond = (probabilities[idx] / prob_left).clamp(0.0, 1.0);
                let k = draw_binomial(&mut rng, remaining, cond);
                counts[idx] = k;
                remaining -= k;
                prob_left = (prob_left - probabilities[idx]).max(0.0);
            }
        }
    }

    for i in 0..p.len() {
        if grouped[i] {
            continue;
        }
        let mut rng = row_rng(seed, i);
        counts[i] = match mode {
            SamplingMode::Poisson => {
                let mean = exposures[i] * probabilities[i];
                if mean == 0.0 {
                    0
                } else {
                    Poisson::new(mean)
                        .map_err(|e| TomoError::invalid(format!("poisson: {e}")))?
                        .sample(&mut rng) as u64
                }
            }
            _ => draw_binomial(&mut rng, exposures[i].round() as u64, probabilities[i]),
        };
    }

    let n = p.total_trials();
    Ok(MeasurementData {
        counts,
        exposures,
        mode,
        n,
    })
}

fn row_rng(seed: u64, row: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(row as u64 + 1);
    rng
}

fn draw_binomial(rng: &mut ChaCha20Rng, trials: u64, p: f64) -> u64 {
    if trials == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return trials;
    }
    Binomial::new(trials, p)
        .expect("checked parameters")
        .sample(rng)
}

/// Simulate a full experiment: predict probabilities, then draw counts.
pub fn simulate_experiment(
    obj: &TomographyObject,
    p: &Protocol,
    mode: SamplingMode,
    seed: u64,
) -> Result<MeasurementData> {
    let probs = predict_probabilities(obj, p)?;
    sample_counts(&probs, p, mode, seed)
}

/// Haar-distributed random unitary via QR of a complex Gaussian matrix with
/// the phase convention that makes the factorization unique.
pub fn haar_unitary(n: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(0);
    let g = CMatrix::from_shape_fn((n, n), |_| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    // modified Gram-Schmidt with a re-orthogonalization pass; the resulting
    // R has a positive real diagonal, which is exactly the Haar convention
    let mut cols: Vec<CVector> = (0..n).map(|j| g.column(j).to_owned()).collect();
    for j in 0..n {
        for _pass in 0..2 {
            for i in 0..j {
                let c = cols[i].clone();
                let overlap: Complex64 =
                    c.iter().zip(cols[j].iter()).map(|(a, b)| a.conj() * b).sum();
                cols[j] = &cols[j] - &c.mapv(|x| x * overlap);
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols[j] = cols[j].mapv(|z| z / norm);
    }
    let mut q = CMatrix::zeros((n, n));
    for (j, c) in cols.iter().enumerate() {
        q.column_mut(j).assign(c);
    }
    q
}

/// Noisy network fixture: convex mixture of a Haar-random unitary channel
/// with a fully depolarizing component of weight `epsilon`.
pub fn noisy_network(n: usize, seed: u64, epsilon: f64) -> Result<QuantumProcess> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(TomoError::invalid(format!(
            "noise weight {epsilon} outside [0, 1]"
        )));
    }
    let u = haar_unitary(n, seed);
    if epsilon == 0.0 {
        return QuantumProcess::unitary(u);
    }
    let mut ops = Vec::with_capacity(n * n + 1);
    if epsilon < 1.0 {
        ops.push(u.mapv(|z| z * (1.0 - epsilon).sqrt()));
    }
    let scale = Complex64::new((epsilon / n as f64).sqrt(), 0.0);
    for a in 0..n {
        for b in 0..n {
            let mut e = CMatrix::zeros((n, n));
            e[[a, b]] = scale;
            ops.push(e);
        }
    }
    Ok(QuantumProcess::Kraus(KrausSet::new(ops)?))
}

/// Qubit Z gate mixed with depolarizing noise of weight `epsilon`.
pub fn noisy_z_gate(epsilon: f64) -> Result<QuantumProcess> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(TomoError::invalid(format!(
            "noise weight {epsilon} outside [0, 1]"
        )));
    }
    let [_, _, _, z] = crate::processes::pauli_matrices();
    if epsilon == 0.0 {
        return QuantumProcess::unitary(z);
    }
    let mut ops = vec![z.mapv(|v| v * (1.0 - epsilon).sqrt())];
    let scale = Complex64::new((epsilon / 2.0).sqrt(), 0.0);
    for a in 0..2 {
        for b in 0..2 {
            let mut e = CMatrix::zeros((2, 2));
            e[[a, b]] = scale;
            ops.push(e);
        }
    }
    Ok(QuantumProcess::Kraus(KrausSet::new(ops)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{
        build_pauli6_process_protocol, build_pauli6_state_protocol, build_set1_process_protocol,
    };

    #[test]
    fn basis_state_probabilities_under_pauli6() {
        let p = build_pauli6_state_protocol();
        let rho = DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        let probs = predict_probabilities(&TomographyObject::State(rho), &p).unwrap();
        assert!((probs[0] - 1.0).abs() < 1e-14); // +z
        assert!(probs[1].abs() < 1e-14); // -z
        for &v in &probs[2..] {
            assert!((v - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn maximally_mixed_is_half_on_projective_rows() {
        let p = build_pauli6_state_protocol();
        let rho = DensityMatrix::maximally_mixed(2);
        let probs = predict_probabilities(&TomographyObject::State(rho), &p).unwrap();
        for v in probs {
            assert!((v - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_process_diagonal_rows() {
        let p = build_pauli6_process_protocol();
        let id = QuantumProcess::unitary(CMatrix::eye(2)).unwrap();
        let probs = predict_probabilities(&TomographyObject::Process(id), &p).unwrap();
        for (i, r) in p.rows().iter().enumerate() {
            let (input, output) = (r.provenance.input.unwrap(), r.provenance.output.unwrap());
            if input == output {
                assert!((probs[i] - 1.0).abs() < 1e-12, "row {i}: {}", probs[i]);
            }
        }
        // complete groups sum to one
        for (g, members) in p.group_members() {
            if p.is_group_complete(g) {
                let sum: f64 = members.iter().map(|&i| probs[i]).sum();
                assert!((sum - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn forward_model_is_linear() {
        let p = build_pauli6_state_protocol();
        let rho1 = crate::testutil::random_density(2, 2, 51);
        let rho2 = crate::testutil::random_density(2, 1, 52);
        let alpha = 0.3;
        let mix = DensityMatrix::new(
            rho1.matrix().mapv(|z| z * alpha) + rho2.matrix().mapv(|z| z * (1.0 - alpha)),
        )
        .unwrap();
        let p1 = predict_probabilities(&TomographyObject::State(rho1), &p).unwrap();
        let p2 = predict_probabilities(&TomographyObject::State(rho2), &p).unwrap();
        let pm = predict_probabilities(&TomographyObject::State(mix), &p).unwrap();
        for i in 0..p.len() {
            assert!((pm[i] - (alpha * p1[i] + (1.0 - alpha) * p2[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn certain_rows_get_all_counts() {
        let p = build_pauli6_state_protocol().scale_exposures(1000.0).unwrap();
        let rho = DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        let data = simulate_experiment(
            &TomographyObject::State(rho),
            &p,
            SamplingMode::Multinomial,
            7,
        )
        .unwrap();
        assert_eq!(data.counts[0], 1000);
        assert_eq!(data.counts[1], 0);
        // group totals match trials
        assert_eq!(data.counts[2] + data.counts[3], 1000);
        assert_eq!(data.counts[4] + data.counts[5], 1000);
        assert!((data.n - 3000.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_reproducible() {
        let p = build_set1_process_protocol(3).unwrap().scale_exposures(500.0).unwrap();
        let proc = noisy_network(3, 11, 0.1).unwrap();
        let obj = TomographyObject::Process(proc);
        let a = simulate_experiment(&obj, &p, SamplingMode::Multinomial, 42).unwrap();
        let b = simulate_experiment(&obj, &p, SamplingMode::Multinomial, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_experiment(&obj, &p, SamplingMode::Multinomial, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn binomial_counts_concentrate() {
        // p = 1/2, 10^6 trials: within 5σ = 2500 of the mean
        let p = build_pauli6_state_protocol().scale_exposures(1e6).unwrap();
        let rho = DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        let data = simulate_experiment(
            &TomographyObject::State(rho),
            &p,
            SamplingMode::Binomial,
            3,
        )
        .unwrap();
        for i in 2..6 {
            let dev = (data.counts[i] as f64 - 500_000.0).abs();
            assert!(dev < 2500.0, "row {i} deviates by {dev}");
        }
    }

    #[test]
    fn frequencies_converge_at_root_n_rate() {
        let rho = crate::testutil::random_density(2, 1, 77);
        let base = build_pauli6_state_protocol();
        let probs =
            predict_probabilities(&TomographyObject::State(rho.clone()), &base).unwrap();
        let mut errs = Vec::new();
        for &trials in &[1_000.0, 100_000.0] {
            let p = base.scale_exposures(trials).unwrap();
            let data = simulate_experiment(
                &TomographyObject::State(rho.clone()),
                &p,
                SamplingMode::Multinomial,
                5,
            )
            .unwrap();
            let freqs = data.frequencies();
            let err = freqs
                .iter()
                .zip(probs.iter())
                .map(|(f, q)| (f - q).abs())
                .fold(0.0f64, f64::max);
            errs.push(err);
        }
        // 100× the sample size should shrink the error by roughly 10×;
        // allow generous slack for randomness
        assert!(errs[1] < errs[0] * 0.5, "errors: {errs:?}");
    }

    #[test]
    fn haar_unitary_is_unitary_and_seeded() {
        let u = haar_unitary(8, 123);
        assert!(linalg::isometry_residual(&u) < 1e-12);
        let v = haar_unitary(8, 123);
        assert!(linalg::fro_norm(&(&u - &v)) == 0.0);
        let w = haar_unitary(8, 124);
        assert!(linalg::fro_norm(&(&u - &w)) > 1e-3);
    }

    #[test]
    fn noisy_network_limits() {
        // ε = 0: unitary channel, Choi rank 1
        let clean = noisy_network(3, 9, 0.0).unwrap();
        let choi = choi_of_process(&clean).unwrap();
        assert_eq!(choi.state().rank(), 1);

        // ε = 1: Choi is I/N²
        let full = noisy_network(3, 9, 1.0).unwrap();
        let choi = choi_of_process(&full).unwrap();
        let mixed = CMatrix::eye(9).mapv(|z| z / 9.0);
        assert!(linalg::fro_norm(&(choi.matrix() - &mixed)) < 1e-12);
    }

    #[test]
    fn poisson_mode_draws_on_ungrouped_rows() {
        let p = build_set1_process_protocol(2).unwrap().scale_exposures(10000.0).unwrap();
        let proc = noisy_network(2, 21, 0.05).unwrap();
        let data =
            simulate_experiment(&TomographyObject::Process(proc), &p, SamplingMode::Poisson, 9)
                .unwrap();
        assert_eq!(data.counts.len(), 4);
        assert!(data.counts.iter().sum::<u64>() > 0);
    }
}
