//! Statistical apparatus: the complete information matrix of a purified
//! state, the loss-of-fidelity distribution, chi-square adequacy, and
//! adjusted fidelity for incomplete protocols.
//!
//! Everything works in the doubled real coordinate space
//! z = (Re c, Im c) ∈ R^{2dr} of a purified block c. The purification gauge
//! contributes r² tangent directions c·(iG) plus the norm direction c; the
//! physical content of the model lives on their orthogonal complement, whose
//! dimension is exactly j_max = (2d − r)·r − 1.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Result, TomoError};
use crate::linalg::{self, CMatrix};
use crate::protocols::{Protocol, ProtocolKind};
use crate::reconstruction::TomographyResult;
use crate::simulator::MeasurementData;
use crate::states::PurifiedState;
use crate::tol;

/// Degrees of freedom of a rank-r state in dimension d: (2d − r)·r − 1.
pub fn j_max(dim: usize, rank: usize) -> usize {
    (2 * dim - rank) * rank - 1
}

/// Free real parameters of a trace-preserving process of Choi rank r on an
/// s-dimensional system: 2s²r − r² − s².
pub fn process_parameter_count(s: usize, rank: usize) -> i64 {
    let ss = (s * s) as i64;
    let r = rank as i64;
    2 * ss * r - r * r - ss
}

/// Fisher information of the independent-Poisson measurement model in the
/// doubled real coordinates of a purified block, together with the gauge
/// structure needed to interpret it.
#[derive(Debug, Clone)]
pub struct InformationMatrix {
    dim: usize,
    rank: usize,
    n: f64,
    h: Array2<f64>,
    /// Orthonormal gauge + norm directions.
    gauge: Array2<f64>,
    /// Eigenvalues of H on the gauge complement, descending.
    spectrum: Vec<f64>,
    /// Full-space eigenvectors matching `spectrum`, as columns.
    directions: Array2<f64>,
}

impl InformationMatrix {
    /// Real dimension 2·d·r.
    pub fn real_dim(&self) -> usize {
        2 * self.dim * self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Total sample size of the underlying exposures.
    pub fn sample_size(&self) -> f64 {
        self.n
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.h
    }

    /// Orthonormal gauge + norm basis (columns).
    pub fn gauge_basis(&self) -> &Array2<f64> {
        &self.gauge
    }

    /// j_max for this (d, r).
    pub fn j_max(&self) -> usize {
        j_max(self.dim, self.rank)
    }

    /// Eigenvalues of the gauge-projected information matrix, descending.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// Eigenvectors matching [`Self::spectrum`], as columns in the full
    /// doubled real space.
    pub fn directions(&self) -> &Array2<f64> {
        &self.directions
    }

    /// Number of measurable directions: eigenvalues above TAU_MEAS relative
    /// to the largest.
    pub fn measurable_count(&self) -> usize {
        let top = self.spectrum.first().copied().unwrap_or(0.0);
        if top <= 0.0 {
            return 0;
        }
        self.spectrum
            .iter()
            .filter(|&&v| v > tol::TAU_MEAS * top)
            .count()
    }

    /// Whether every physical direction is measurable.
    pub fn complete(&self) -> bool {
        self.measurable_count() == self.spectrum.len()
    }

    /// Projection of a doubled-real-coordinate vector onto the measurable
    /// subspace.
    pub fn project_measurable(&self, delta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; delta.len()];
        let top = self.spectrum.first().copied().unwrap_or(0.0);
        for (k, &lam) in self.spectrum.iter().enumerate() {
            if lam <= tol::TAU_MEAS * top {
                break;
            }
            let dir = self.directions.column(k);
            let overlap: f64 = dir.iter().zip(delta.iter()).map(|(a, b)| a * b).sum();
            for (o, d) in out.iter_mut().zip(dir.iter()) {
                *o += overlap * d;
            }
        }
        out
    }
}

/// Doubled real embedding of a complex block: real parts then imaginary
/// parts, row-major.
fn embed(c: &CMatrix) -> Vec<f64> {
    let mut z = Vec::with_capacity(2 * c.len());
    for v in c.iter() {
        z.push(v.re);
    }
    for v in c.iter() {
        z.push(v.im);
    }
    z
}

/// Information matrix of a purified state under a protocol, using the
/// protocol's own exposures.
pub fn information_matrix(c: &PurifiedState, p: &Protocol) -> Result<InformationMatrix> {
    let exposures: Vec<f64> = p.rows().iter().map(|r| r.exposure).collect();
    information_matrix_with_exposures(c, p, &exposures)
}

/// Information matrix with explicit per-row exposures (e.g. observed trials).
pub fn information_matrix_with_exposures(
    c: &PurifiedState,
    p: &Protocol,
    exposures: &[f64],
) -> Result<InformationMatrix> {
    let d = c.dim();
    if p.object_dim() != d {
        return Err(TomoError::dimension_mismatch(
            "information matrix",
            p.object_dim(),
            d,
        ));
    }
    if exposures.len() != p.len() {
        return Err(TomoError::dimension_mismatch(
            "exposures",
            p.len(),
            exposures.len(),
        ));
    }
    let r = c.rank();
    let real_dim = 2 * d * r;
    let block = c.block();
    let mut h = Array2::zeros((real_dim, real_dim));
    for (j, t) in exposures.iter().enumerate() {
        if *t <= 0.0 {
            continue;
        }
        let op = p.effective_operator(j);
        let w = op.dot(block);
        let lam: f64 = block
            .iter()
            .zip(w.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        if lam <= tol::LAMBDA_FLOOR {
            // boundary rows carry no first-order information
            continue;
        }
        // g = 2·(Re w, Im w)
        let mut g = embed(&w);
        for v in g.iter_mut() {
            *v *= 2.0;
        }
        let scale = t / lam;
        for a in 0..real_dim {
            if g[a] == 0.0 {
                continue;
            }
            let ga = g[a] * scale;
            for b in 0..real_dim {
                h[[a, b]] += ga * g[b];
            }
        }
    }

    // gauge tangents c·(iG) for a Hermitian basis G, plus the norm direction c
    let mut gauge_vecs: Vec<Vec<f64>> = Vec::with_capacity(r * r + 1);
    gauge_vecs.push(embed(block));
    let i_unit = Complex64::new(0.0, 1.0);
    for a in 0..r {
        let mut g = CMatrix::zeros((r, r));
        g[[a, a]] = i_unit;
        gauge_vecs.push(embed(&block.dot(&g)));
    }
    let inv = 1.0 / 2.0f64.sqrt();
    for a in 0..r {
        for b in a + 1..r {
            let mut g_sym = CMatrix::zeros((r, r));
            g_sym[[a, b]] = i_unit * inv;
            g_sym[[b, a]] = i_unit * inv;
            gauge_vecs.push(embed(&block.dot(&g_sym)));
            let mut g_asym = CMatrix::zeros((r, r));
            g_asym[[a, b]] = Complex64::new(inv, 0.0);
            g_asym[[b, a]] = Complex64::new(-inv, 0.0);
            gauge_vecs.push(embed(&block.dot(&g_asym)));
        }
    }
    let gauge = linalg::orthonormalize_real(&gauge_vecs);

    // eigenvalues of H on the orthogonal complement of the gauge
    let complement = linalg::orthonormal_complement_real(&gauge);
    let m = complement.ncols();
    let hw = h.dot(&complement);
    let reduced = complement.t().dot(&hw);
    let sym = (&reduced + &reduced.t()) * 0.5;
    let (vals, vecs) = linalg::eigh_real(&sym)?;
    let mut spectrum = Vec::with_capacity(m);
    let mut directions = Array2::zeros((real_dim, m));
    for k in 0..m {
        let idx = m - 1 - k;
        spectrum.push(vals[idx].max(0.0));
        let full = complement.dot(&vecs.column(idx).to_owned());
        directions.column_mut(k).assign(&full);
    }

    let n = total_trials(p, exposures);
    Ok(InformationMatrix {
        dim: d,
        rank: r,
        n,
        h,
        gauge,
        spectrum,
        directions,
    })
}

/// Sample size implied by exposures: one contribution per complete group,
/// one per ungrouped row.
fn total_trials(p: &Protocol, exposures: &[f64]) -> f64 {
    let mut n = 0.0;
    let mut seen = std::collections::BTreeSet::new();
    for (i, row) in p.rows().iter().enumerate() {
        if p.is_group_complete(row.group) {
            if seen.insert(row.group) {
                n += exposures[i];
            }
        } else {
            n += exposures[i];
        }
    }
    n
}

/// Coefficients and summary statistics of the loss-of-fidelity distribution
/// 1 − F = Σ d_j ξ_j².
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LossDistribution {
    /// Coefficients, descending.
    pub d: Vec<f64>,
    /// Degrees of freedom (2d − r)·r − 1 of the state class.
    pub j_max: usize,
    /// Number of measurable directions actually contributing.
    pub measurable_count: usize,
    /// False when the protocol leaves unmeasurable directions, in which case
    /// `d` covers the measurable subspace only.
    pub complete: bool,
    /// Sample size the coefficients refer to.
    pub n: f64,
    /// Mean loss Σ d_j.
    pub mean: f64,
    /// Variance 2 Σ d_j².
    pub variance: f64,
    /// Size-independent loss L = n·Σ d_j.
    pub normalized_loss: f64,
}

impl LossDistribution {
    /// Assemble a distribution from raw coefficients.
    pub fn from_coefficients(d: Vec<f64>, j_max: usize, n: f64, complete: bool) -> Result<Self> {
        if d.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(TomoError::invalid("loss coefficients must be nonnegative"));
        }
        let mean: f64 = d.iter().sum();
        let variance: f64 = 2.0 * d.iter().map(|&x| x * x).sum::<f64>();
        let measurable_count = d.len();
        Ok(LossDistribution {
            d,
            j_max,
            measurable_count,
            complete,
            n,
            mean,
            variance,
            normalized_loss: n * mean,
        })
    }
}

/// Loss coefficients from the information matrix: d_j = 1/h_j over the
/// measurable eigenvalues of the gauge-projected Fisher information.
///
/// The inverse-information construction is validated against the mean-loss
/// identity ⟨1 − F⟩ = Σ d_j by the Monte-Carlo test suite; with the gradient
/// convention used here the factor is exactly one.
pub fn loss_coefficients(h: &InformationMatrix) -> Result<LossDistribution> {
    let spectrum = h.spectrum();
    let top = spectrum.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return Err(TomoError::invalid(
            "information matrix has no measurable directions",
        ));
    }
    let mut d: Vec<f64> = spectrum
        .iter()
        .filter(|&&v| v > tol::TAU_MEAS * top)
        .map(|&v| 1.0 / v)
        .collect();
    d.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let complete = d.len() == spectrum.len();
    LossDistribution::from_coefficients(d, h.j_max(), h.sample_size(), complete)
}

/// Confidence-quantile summary of the loss distribution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FidelityBound {
    pub confidence: f64,
    /// The `confidence` quantile of Σ d_j ξ_j².
    pub loss_quantile: f64,
    /// 1 − loss quantile: with this confidence the fidelity is at least this.
    pub fidelity_bound: f64,
}

/// Confidence bound on fidelity: 1 − q where q is the `confidence` quantile
/// of Σ d_j ξ_j², estimated by seeded Monte-Carlo with `draws` samples.
pub fn loss_quantile(
    dist: &LossDistribution,
    confidence: f64,
    draws: usize,
    seed: u64,
) -> Result<FidelityBound> {
    if !(0.0..1.0).contains(&confidence) || confidence == 0.0 {
        return Err(TomoError::invalid("confidence must be in (0, 1)"));
    }
    if draws == 0 {
        return Err(TomoError::invalid("need at least one draw"));
    }
    if dist.d.is_empty() || dist.mean == 0.0 {
        return Ok(FidelityBound {
            confidence,
            loss_quantile: 0.0,
            fidelity_bound: 1.0,
        });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(0x10ad);
    let mut losses: Vec<f64> = (0..draws)
        .map(|_| {
            dist.d
                .iter()
                .map(|&dj| {
                    let xi: f64 = rng.sample(StandardNormal);
                    dj * xi * xi
                })
                .sum()
        })
        .collect();
    losses.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let idx = ((confidence * draws as f64).ceil() as usize).clamp(1, draws) - 1;
    let q = losses[idx];
    Ok(FidelityBound {
        confidence,
        loss_quantile: q,
        fidelity_bound: 1.0 - q,
    })
}

/// Upper tail probability of the chi-squared law with `nu` degrees of
/// freedom.
pub fn chi_square_tail(chi2: f64, nu: usize) -> Result<f64> {
    if nu == 0 {
        return Err(TomoError::OverParameterized { nu: 0 });
    }
    if chi2 <= 0.0 {
        return Ok(1.0);
    }
    let law = ChiSquared::new(nu as f64)
        .map_err(|e| TomoError::invalid(format!("chi-squared law: {e}")))?;
    Ok((1.0 - law.cdf(chi2)).clamp(0.0, 1.0))
}

/// Chi-square goodness-of-fit verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdequacyReport {
    pub chi_square: f64,
    pub nu: usize,
    pub p_value: f64,
    pub significance: f64,
    pub adequate: bool,
}

/// Pearson chi-square adequacy of a reconstruction against its data.
///
/// χ² = Σ (k_j − t_j λ̂_j)²/(t_j λ̂_j); the degrees of freedom are the
/// independent frequencies (rows minus one per complete group) minus the
/// model's free parameters: (2d − r)r − 1 for states, 2s²r − r² − s² for
/// trace-preserving processes.
pub fn chi_square_adequacy(
    p: &Protocol,
    data: &MeasurementData,
    result: &TomographyResult,
    significance: f64,
) -> Result<AdequacyReport> {
    data.check_alignment(p)?;
    let intensities = result.intensities(p)?;
    let floor = 1e-9;
    let mut chi2 = 0.0;
    let mut counted_rows = 0usize;
    let mut groups_with_rows = std::collections::BTreeSet::new();
    for (j, (&k, &t)) in data.counts.iter().zip(data.exposures.iter()).enumerate() {
        let expected = t * intensities[j];
        if expected <= floor {
            if k > 0 {
                return Err(TomoError::ModelViolation {
                    row: j,
                    intensity: intensities[j],
                    count: k,
                });
            }
            continue;
        }
        counted_rows += 1;
        let g = p.rows()[j].group;
        if p.is_group_complete(g) {
            groups_with_rows.insert(g);
        }
        let diff = k as f64 - expected;
        chi2 += diff * diff / expected;
    }
    let independent = counted_rows as i64 - groups_with_rows.len() as i64;
    let params: i64 = match result.kind() {
        ProtocolKind::State => j_max(result.dim(), result.rank()) as i64,
        ProtocolKind::Process => process_parameter_count(result.dim(), result.rank()),
    };
    let nu = independent - params;
    if nu <= 0 {
        return Err(TomoError::OverParameterized { nu });
    }
    let p_value = chi_square_tail(chi2, nu as usize)?;
    Ok(AdequacyReport {
        chi_square: chi2,
        nu: nu as usize,
        p_value,
        significance,
        adequate: p_value >= significance,
    })
}

/// Fidelity restricted to the measurable subspace: gauge-align the estimate
/// to the truth, project the coordinate deviation onto the measurable
/// directions of `h`, and return 1 − ‖P_meas δz‖².
pub fn adjusted_fidelity(
    c_true: &PurifiedState,
    c_est: &PurifiedState,
    h: &InformationMatrix,
) -> Result<f64> {
    if c_true.dim() != c_est.dim() || c_true.rank() != c_est.rank() {
        return Err(TomoError::dimension_mismatch(
            "adjusted fidelity",
            c_true.dim() * c_true.rank(),
            c_est.dim() * c_est.rank(),
        ));
    }
    if h.dim() != c_true.dim() || h.rank() != c_true.rank() {
        return Err(TomoError::dimension_mismatch(
            "information matrix shape",
            2 * c_true.dim() * c_true.rank(),
            h.real_dim(),
        ));
    }
    // Uhlmann-maximizing right unitary: for M = c_true† c_est = UΣV†,
    // the gauge V·U† makes c_true†(c_est·gauge) Hermitian PSD
    let overlap = linalg::dagger(c_true.block()).dot(c_est.block());
    let (u, _, vt) = linalg::svd(&overlap)?;
    let gauge = linalg::dagger(&vt).dot(&linalg::dagger(&u));
    let aligned = c_est.block().dot(&gauge);

    let zt = embed(c_true.block());
    let ze = embed(&aligned);
    let delta: Vec<f64> = ze.iter().zip(zt.iter()).map(|(a, b)| a - b).collect();

    let projected = h.project_measurable(&delta);
    let measurable_norm_sq: f64 = projected.iter().map(|x| x * x).sum();
    Ok((1.0 - measurable_norm_sq).clamp(0.0, 1.0))
}

/// Two-sample Kolmogorov–Smirnov test: statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(TomoError::invalid("KS test needs nonempty samples"));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let mut i = 0;
    let mut j = 0;
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = xs[i].min(ys[j]);
        while i < n && xs[i] <= x {
            i += 1;
        }
        while j < m && ys[j] <= x {
            j += 1;
        }
        let gap = (i as f64 / n as f64 - j as f64 / m as f64).abs();
        d = d.max(gap);
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    Ok((d, kolmogorov_tail((ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d)))
}

/// One-sample KS test against the uniform law on [0, 1].
pub fn ks_uniform(sample: &[f64]) -> Result<(f64, f64)> {
    if sample.is_empty() {
        return Err(TomoError::invalid("KS test needs a nonempty sample"));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let cdf = x.clamp(0.0, 1.0);
        d = d.max((cdf - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - cdf).abs());
    }
    Ok((d, kolmogorov_tail((n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d)))
}

fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::build_pauli6_state_protocol;
    use crate::states::{purify, DensityMatrix};

    fn pure_qubit(theta: f64, phi: f64) -> DensityMatrix {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let amp0 = c(theta.cos(), 0.0);
        let amp1 = Complex64::from_polar(theta.sin(), phi);
        DensityMatrix::pure(&[amp0, amp1]).unwrap()
    }

    #[test]
    fn j_max_arithmetic() {
        assert_eq!(j_max(2, 1), 2);
        assert_eq!(j_max(2, 2), 3);
        assert_eq!(j_max(4, 2), 11);
    }

    #[test]
    fn process_parameters_reproduce_known_counts() {
        // rank-1 qubit process: a unitary, 3 free parameters
        assert_eq!(process_parameter_count(2, 1), 3);
        // rank-2 qubit process: 8 parameters, the count behind ν = 18 − 8 = 10
        assert_eq!(process_parameter_count(2, 2), 8);
        // full-rank: s⁴ − s²
        assert_eq!(process_parameter_count(2, 4), 12);
    }

    #[test]
    fn pure_qubit_information_has_two_informative_eigenvalues() {
        let p = build_pauli6_state_protocol().scale_exposures(1000.0).unwrap();
        // axis-aligned state: one protocol row has exactly zero intensity
        let rho = DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        let c = purify(&rho, 1).unwrap();
        let h = information_matrix(&c, &p).unwrap();
        assert_eq!(h.j_max(), 2);
        assert_eq!(h.spectrum().len(), 2);
        assert_eq!(h.measurable_count(), 2);
        // both informative eigenvalues are 4·m with m = 1000 trials per group
        for &v in h.spectrum() {
            assert!((v - 4000.0).abs() < 1e-6, "eigenvalue {v}");
        }
        assert!((h.sample_size() - 3000.0).abs() < 1e-9);
    }

    #[test]
    fn information_scales_linearly_with_exposure() {
        let p = build_pauli6_state_protocol().scale_exposures(500.0).unwrap();
        let c = purify(&pure_qubit(0.6, 0.4), 1).unwrap();
        let h1 = information_matrix(&c, &p).unwrap();
        let h2 = information_matrix(&c, &p.scale_exposures(2.0).unwrap()).unwrap();
        let diff = &h2.matrix().clone() - &(h1.matrix().clone() * 2.0);
        let norm: f64 = diff.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm < 1e-9, "H does not double: {norm}");
    }

    #[test]
    fn loss_mean_and_variance_identities() {
        // synthetic all-ones coefficients reproduce the ordinary chi-squared
        let d = vec![1.0; 5];
        let dist = LossDistribution::from_coefficients(d, 5, 100.0, true).unwrap();
        assert_eq!(dist.mean, 5.0);
        assert_eq!(dist.variance, 10.0);
        assert_eq!(dist.normalized_loss, 500.0);

        let d = vec![0.3, 0.2, 0.1];
        let dist = LossDistribution::from_coefficients(d.clone(), 3, 10.0, true).unwrap();
        assert!((dist.mean - d.iter().sum::<f64>()).abs() < 1e-15);
        assert!((dist.variance - 2.0 * d.iter().map(|x| x * x).sum::<f64>()).abs() < 1e-15);
    }

    #[test]
    fn loss_coefficients_scale_inversely_with_sample_size() {
        let p = build_pauli6_state_protocol().scale_exposures(1000.0).unwrap();
        let c = purify(&pure_qubit(0.7, 1.1), 1).unwrap();
        let d1 = loss_coefficients(&information_matrix(&c, &p).unwrap()).unwrap();
        let d10 = loss_coefficients(
            &information_matrix(&c, &p.scale_exposures(10.0).unwrap()).unwrap(),
        )
        .unwrap();
        assert_eq!(d1.d.len(), d10.d.len());
        for (a, b) in d1.d.iter().zip(d10.d.iter()) {
            assert!((a / b - 10.0).abs() < 1e-10);
        }
        // L is unchanged
        assert!((d1.normalized_loss - d10.normalized_loss).abs() < 1e-9 * d1.normalized_loss);
    }

    #[test]
    fn quantile_of_single_unit_coefficient_is_chi_squared() {
        let dist = LossDistribution::from_coefficients(vec![1.0], 1, 1.0, true).unwrap();
        let bound = loss_quantile(&dist, 0.95, 200_000, 7).unwrap();
        // 95% quantile of χ²₁ is 3.8415
        let q = bound.loss_quantile;
        assert!((q - 3.8415).abs() < 0.06, "quantile {q}");
        assert!((bound.fidelity_bound - (1.0 - q)).abs() < 1e-15);
    }

    #[test]
    fn quantile_with_zero_coefficients_is_one() {
        let dist = LossDistribution::from_coefficients(vec![], 2, 1.0, false).unwrap();
        assert_eq!(loss_quantile(&dist, 0.95, 1000, 3).unwrap().fidelity_bound, 1.0);
    }

    #[test]
    fn quantile_scales_linearly_in_d() {
        let d1 = LossDistribution::from_coefficients(vec![0.5, 0.25], 2, 1.0, true).unwrap();
        let d2 = LossDistribution::from_coefficients(vec![0.05, 0.025], 2, 1.0, true).unwrap();
        let q1 = loss_quantile(&d1, 0.9, 100_000, 5).unwrap().loss_quantile;
        let q2 = loss_quantile(&d2, 0.9, 100_000, 5).unwrap().loss_quantile;
        assert!((q1 / q2 - 10.0).abs() < 1e-6, "ratio {}", q1 / q2);
    }

    #[test]
    fn paper_p_value_checkpoints() {
        // independent continued-fraction oracle for the regularized upper
        // incomplete gamma Q(a, x), evaluated at the two published points
        fn upper_gamma_q(a: f64, x: f64) -> f64 {
            if x < a + 1.0 {
                // series for P(a, x)
                let mut sum = 1.0 / a;
                let mut term = sum;
                for n in 1..500 {
                    term *= x / (a + n as f64);
                    sum += term;
                    if term.abs() < 1e-16 * sum.abs() {
                        break;
                    }
                }
                let ln_p = a * x.ln() - x - ln_gamma(a) + sum.ln();
                1.0 - ln_p.exp()
            } else {
                // Lentz continued fraction for Q(a, x)
                let tiny = 1e-300;
                let mut b = x + 1.0 - a;
                let mut c = 1.0 / tiny;
                let mut d = 1.0 / b;
                let mut h = d;
                for i in 1..500 {
                    let an = -(i as f64) * (i as f64 - a);
                    b += 2.0;
                    d = an * d + b;
                    if d.abs() < tiny {
                        d = tiny;
                    }
                    c = b + an / c;
                    if c.abs() < tiny {
                        c = tiny;
                    }
                    d = 1.0 / d;
                    let del = d * c;
                    h *= del;
                    if (del - 1.0).abs() < 1e-16 {
                        break;
                    }
                }
                (a * x.ln() - x - ln_gamma(a)).exp() * h
            }
        }
        fn ln_gamma(x: f64) -> f64 {
            // Lanczos
            let g = [
                76.180_091_729_471_46,
                -86.505_320_329_416_77,
                24.014_098_240_830_91,
                -1.231_739_572_450_155,
                0.120_865_097_386_617_7e-2,
                -0.539_523_938_495_3e-5,
            ];
            let mut ser = 1.000_000_000_190_015;
            for (i, &gi) in g.iter().enumerate() {
                ser += gi / (x + 1.0 + i as f64);
            }
            let tmp = x + 5.5 - (x + 0.5) * (x + 5.5).ln();
            -tmp + (2.506_628_274_631_000_5 * ser / x).ln()
        }

        let p1 = chi_square_tail(18.002, 10).unwrap();
        let oracle1 = upper_gamma_q(5.0, 18.002 / 2.0);
        assert!((p1 - 0.055).abs() < 0.001, "p = {p1}");
        assert!((p1 - oracle1).abs() < 1e-10);

        let p2 = chi_square_tail(7.14, 6).unwrap();
        let oracle2 = upper_gamma_q(3.0, 7.14 / 2.0);
        assert!((p2 - 0.31).abs() < 0.01, "p = {p2}");
        assert!((p2 - oracle2).abs() < 1e-10);
    }

    #[test]
    fn adjusted_fidelity_of_identical_states_is_one() {
        let p = build_pauli6_state_protocol().scale_exposures(100.0).unwrap();
        let c = purify(&pure_qubit(0.5, 0.3), 1).unwrap();
        let h = information_matrix(&c, &p).unwrap();
        let f = adjusted_fidelity(&c, &c, &h).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adjusted_equals_uhlmann_exactly_for_pure_states() {
        // at rank 1 the measurable projection reproduces the Uhlmann value
        // identically on complete protocols
        let p = build_pauli6_state_protocol().scale_exposures(100.0).unwrap();
        let c_true = purify(&pure_qubit(0.5, 0.3), 1).unwrap();
        let h = information_matrix(&c_true, &p).unwrap();
        let mut block = c_true.block().clone();
        block[[0, 0]] += Complex64::new(0.21, -0.13);
        block[[1, 0]] += Complex64::new(-0.05, 0.17);
        let c_est = PurifiedState::normalized(block).unwrap();
        let plain = crate::states::fidelity_purified(&c_true, &c_est).unwrap();
        let adjusted = adjusted_fidelity(&c_true, &c_est, &h).unwrap();
        assert!((adjusted - plain).abs() < 1e-12, "{adjusted} vs {plain}");
    }

    #[test]
    fn adjusted_matches_uhlmann_on_complete_protocols() {
        // on a complete protocol the gauge alignment makes the norm-direction
        // overlap equal −‖δ‖²/2 exactly, so the measurable projection
        // reproduces the Uhlmann fidelity identically — stronger than the
        // second-order agreement the construction promises
        let p = build_pauli6_state_protocol().scale_exposures(100.0).unwrap();
        let truth = crate::testutil::random_density(2, 2, 301);
        let c_true = purify(&truth, 2).unwrap();
        let h = information_matrix(&c_true, &p).unwrap();
        for &eps in &[2e-1, 8e-2, 2e-2] {
            let mut block = c_true.block().clone();
            block[[0, 0]] += Complex64::new(eps * 0.4, -eps * 0.6);
            block[[1, 0]] += Complex64::new(-eps * 0.7, eps * 0.2);
            block[[0, 1]] += Complex64::new(eps * 0.3, eps * 0.5);
            block[[1, 1]] += Complex64::new(-eps * 0.1, -eps * 0.45);
            let c_est = PurifiedState::normalized(block).unwrap();
            let plain = crate::states::fidelity_purified(&c_true, &c_est).unwrap();
            let adjusted = adjusted_fidelity(&c_true, &c_est, &h).unwrap();
            assert!((adjusted - plain).abs() < 1e-10, "eps {eps}: {adjusted} vs {plain}");
        }
    }

    #[test]
    fn ks_uniform_accepts_uniform_and_rejects_shifted() {
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let uniform: Vec<f64> = (0..400).map(|_| rng.gen::<f64>()).collect();
        let (_, p_ok) = ks_uniform(&uniform).unwrap();
        assert!(p_ok > 0.01, "p = {p_ok}");
        let shifted: Vec<f64> = uniform.iter().map(|x| x * x).collect();
        let (_, p_bad) = ks_uniform(&shifted).unwrap();
        assert!(p_bad < 1e-6, "p = {p_bad}");
    }

    #[test]
    fn ks_two_sample_same_law() {
        let mut rng = ChaCha20Rng::seed_from_u64(19);
        let a: Vec<f64> = (0..300).map(|_| rng.gen::<f64>()).collect();
        let b: Vec<f64> = (0..500).map(|_| rng.gen::<f64>()).collect();
        let (_, p) = ks_two_sample(&a, &b).unwrap();
        assert!(p > 0.01, "p = {p}");
    }
}
