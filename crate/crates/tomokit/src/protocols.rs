//! Measurement protocols, the measurement matrix B, and the completeness
//! verdict.
//!
//! A protocol is an ordered list of measurement operators with exposures. For
//! state protocols each operator Λ acts on the system itself and the
//! predicted probability is Tr[Λρ]. For process protocols each row holds the
//! operator ρ_inᵀ ⊗ Λ_out on the doubled space, so that the predicted
//! probability is Tr[χ·M] — linear in the chi matrix.
//!
//! The matrix B stacks one vectorized operator per row, stored over the reals
//! with the real and imaginary parts side by side. A protocol is complete
//! exactly when B has full column rank on the space of Hermitian operators
//! (s² real parameters for states, s⁴ for processes).

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Result, TomoError};
use crate::linalg::{self, CMatrix, CVector};
use crate::tol;

/// Which kind of object a protocol measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    State,
    Process,
}

/// Where a protocol row came from, for reporting and serialization.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Provenance {
    pub fn labeled(label: &str) -> Self {
        Provenance {
            label: Some(label.to_string()),
            ..Default::default()
        }
    }
}

/// One measurement outcome: a Hermitian PSD operator, an exposure (trials or
/// relative intensity) and the normalization group it belongs to.
#[derive(Debug, Clone)]
pub struct MeasurementOperator {
    pub operator: CMatrix,
    pub exposure: f64,
    pub group: usize,
    pub provenance: Provenance,
}

/// Ordered list of measurement operators over a fixed dimension.
#[derive(Debug, Clone)]
pub struct Protocol {
    dim: usize,
    kind: ProtocolKind,
    rows: Vec<MeasurementOperator>,
    complete_groups: BTreeSet<usize>,
}

impl Protocol {
    /// Assemble and validate a protocol.
    ///
    /// `complete_groups` lists groups whose outcomes exhaust a measurement:
    /// for state rows their operators must sum to a multiple of the identity;
    /// for process rows to ρᵀ ⊗ I with Tr ρ = 1. Within a complete group all
    /// exposures must agree (they describe one multi-outcome experiment).
    pub fn new(
        dim: usize,
        kind: ProtocolKind,
        rows: Vec<MeasurementOperator>,
        complete_groups: BTreeSet<usize>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(TomoError::invalid("protocol has no rows"));
        }
        let odim = match kind {
            ProtocolKind::State => dim,
            ProtocolKind::Process => dim * dim,
        };
        for (i, row) in rows.iter().enumerate() {
            if row.operator.nrows() != odim || row.operator.ncols() != odim {
                return Err(TomoError::dimension_mismatch(
                    "protocol row",
                    odim,
                    row.operator.nrows(),
                ));
            }
            let herm = linalg::hermiticity_residual(&row.operator);
            if herm > tol::TAU_HERM {
                return Err(TomoError::NotHermitian { residual: herm });
            }
            if row.exposure < 0.0 || !row.exposure.is_finite() {
                return Err(TomoError::invalid(format!(
                    "row {i} has invalid exposure {}",
                    row.exposure
                )));
            }
        }
        let protocol = Protocol {
            dim,
            kind,
            rows,
            complete_groups,
        };
        protocol.check_group_sums()?;
        Ok(protocol)
    }

    fn check_group_sums(&self) -> Result<()> {
        let odim = self.object_dim();
        for &g in &self.complete_groups {
            let members: Vec<&MeasurementOperator> =
                self.rows.iter().filter(|r| r.group == g).collect();
            if members.is_empty() {
                return Err(TomoError::invalid(format!(
                    "complete group {g} has no rows"
                )));
            }
            let t0 = members[0].exposure;
            if members.iter().any(|r| (r.exposure - t0).abs() > 1e-9 * t0.max(1.0)) {
                return Err(TomoError::invalid(format!(
                    "complete group {g} mixes different exposures"
                )));
            }
            let mut sum = CMatrix::zeros((odim, odim));
            for r in &members {
                sum += &r.operator;
            }
            match self.kind {
                ProtocolKind::State => {
                    let scale = linalg::trace(&sum).re / odim as f64;
                    let diff = &sum - &CMatrix::eye(odim).mapv(|z| z * scale);
                    if linalg::fro_norm(&diff) > 1e-6 * scale.max(1.0) {
                        return Err(TomoError::invalid(format!(
                            "group {g} operators do not sum to a multiple of the identity"
                        )));
                    }
                }
                ProtocolKind::Process => {
                    // complete process groups sum to ρᵀ ⊗ I with Tr ρ = 1
                    let s = self.dim;
                    let a = linalg::partial_trace_second(&sum, s, s).mapv(|z| z / s as f64);
                    let expect = linalg::kron(&a, &CMatrix::eye(s));
                    if linalg::fro_norm(&(&sum - &expect)) > 1e-6 {
                        return Err(TomoError::invalid(format!(
                            "group {g} operators do not sum to an input-state ⊗ identity form"
                        )));
                    }
                    let tr = linalg::trace(&a).re;
                    if (tr - 1.0).abs() > 1e-6 {
                        return Err(TomoError::invalid(format!(
                            "group {g} input marginal has trace {tr}, expected 1"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// System dimension s.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    /// Dimension of the reconstructed object's Hilbert space:
    /// s for states, s² (the Choi space) for processes.
    pub fn object_dim(&self) -> usize {
        match self.kind {
            ProtocolKind::State => self.dim,
            ProtocolKind::Process => self.dim * self.dim,
        }
    }

    /// Real dimension of the Hermitian parameter space B must span for the
    /// protocol to be complete: s² for states, s⁴ for processes.
    pub fn full_dimension(&self) -> usize {
        self.object_dim() * self.object_dim()
    }

    pub fn rows(&self) -> &[MeasurementOperator] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn complete_groups(&self) -> &BTreeSet<usize> {
        &self.complete_groups
    }

    pub fn is_group_complete(&self, group: usize) -> bool {
        self.complete_groups.contains(&group)
    }

    /// Indices of rows in each group, in row order.
    pub fn group_members(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, r) in self.rows.iter().enumerate() {
            map.entry(r.group).or_default().push(i);
        }
        map
    }

    /// Operator whose expectation under the normalized object (density matrix
    /// or Choi state) is the row's outcome probability. For process rows this
    /// is s·(ρ_inᵀ ⊗ Λ_out), absorbing the χ = s·ρ_χ scale.
    pub fn effective_operator(&self, row: usize) -> CMatrix {
        let op = &self.rows[row].operator;
        match self.kind {
            ProtocolKind::State => op.clone(),
            ProtocolKind::Process => op.mapv(|z| z * self.dim as f64),
        }
    }

    /// Total sample size implied by the exposures: one contribution per
    /// complete group plus one per ungrouped row.
    pub fn total_trials(&self) -> f64 {
        let mut n = 0.0;
        let mut seen = BTreeSet::new();
        for r in &self.rows {
            if self.is_group_complete(r.group) {
                if seen.insert(r.group) {
                    n += r.exposure;
                }
            } else {
                n += r.exposure;
            }
        }
        n
    }

    /// Copy of the protocol with every exposure multiplied by `factor`.
    pub fn scale_exposures(&self, factor: f64) -> Result<Self> {
        if factor <= 0.0 || !factor.is_finite() {
            return Err(TomoError::invalid("exposure scale must be positive"));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| MeasurementOperator {
                operator: r.operator.clone(),
                exposure: r.exposure * factor,
                group: r.group,
                provenance: r.provenance.clone(),
            })
            .collect();
        Protocol::new(self.dim, self.kind, rows, self.complete_groups.clone())
    }

    /// Deep validation of the PSD and norm bounds of every row operator.
    /// Builders guarantee these; use this on protocols read from files.
    pub fn validate_operators(&self) -> Result<()> {
        for (i, r) in self.rows.iter().enumerate() {
            let evals = linalg::eigvalsh(&r.operator)?;
            let min = evals.first().copied().unwrap_or(0.0);
            let max = evals.last().copied().unwrap_or(0.0);
            if min < -1e-8 {
                return Err(TomoError::invalid(format!(
                    "row {i} operator has negative eigenvalue {min:.3e}"
                )));
            }
            if max > 1.0 + 1e-8 {
                return Err(TomoError::invalid(format!(
                    "row {i} operator has norm {max:.6} above 1"
                )));
            }
        }
        Ok(())
    }
}

/// The six Pauli eigenstates |+z⟩, |−z⟩, |+x⟩, |−x⟩, |+y⟩, |−y⟩.
pub fn pauli6_state_vectors() -> Vec<(CVector, &'static str)> {
    let inv = 1.0 / 2.0f64.sqrt();
    let c = Complex64::new;
    vec![
        (CVector::from(vec![c(1.0, 0.0), c(0.0, 0.0)]), "+z"),
        (CVector::from(vec![c(0.0, 0.0), c(1.0, 0.0)]), "-z"),
        (CVector::from(vec![c(inv, 0.0), c(inv, 0.0)]), "+x"),
        (CVector::from(vec![c(inv, 0.0), c(-inv, 0.0)]), "-x"),
        (CVector::from(vec![c(inv, 0.0), c(0.0, inv)]), "+y"),
        (CVector::from(vec![c(inv, 0.0), c(0.0, -inv)]), "-y"),
    ]
}

fn projector(v: &CVector) -> CMatrix {
    let n = v.len();
    CMatrix::from_shape_fn((n, n), |(i, j)| v[i] * v[j].conj())
}

/// Qubit state protocol with the six Pauli eigenprojectors in three
/// two-outcome groups of equal exposure.
pub fn build_pauli6_state_protocol() -> Protocol {
    let rows = pauli6_state_vectors()
        .into_iter()
        .enumerate()
        .map(|(i, (v, label))| MeasurementOperator {
            operator: projector(&v),
            exposure: 1.0,
            group: i / 2,
            provenance: Provenance::labeled(label),
        })
        .collect();
    Protocol::new(
        2,
        ProtocolKind::State,
        rows,
        BTreeSet::from([0, 1, 2]),
    )
    .expect("static protocol is valid")
}

/// Process protocol from explicit input states and output projectors.
///
/// One row per (input, output) pair, input-major. Each row's operator is
/// ρ_inᵀ ⊗ Λ_out; rows are left ungrouped (independent binomial outcomes).
pub fn build_process_protocol(inputs: &[CVector], outputs: &[CMatrix]) -> Result<Protocol> {
    if inputs.is_empty() || outputs.is_empty() {
        return Err(TomoError::invalid("process protocol needs inputs and outputs"));
    }
    let s = inputs[0].len();
    let mut rows = Vec::with_capacity(inputs.len() * outputs.len());
    for (ii, input) in inputs.iter().enumerate() {
        if input.len() != s {
            return Err(TomoError::dimension_mismatch("input state", s, input.len()));
        }
        let norm: f64 = input.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(TomoError::invalid(format!("input {ii} is not normalized")));
        }
        let rho_t = projector(input).t().to_owned();
        for (oo, lambda) in outputs.iter().enumerate() {
            if lambda.nrows() != s || lambda.ncols() != s {
                return Err(TomoError::dimension_mismatch("output projector", s, lambda.nrows()));
            }
            rows.push(MeasurementOperator {
                operator: linalg::kron(&rho_t, lambda),
                exposure: 1.0,
                group: rows.len(),
                provenance: Provenance {
                    input: Some(ii),
                    output: Some(oo),
                    ..Default::default()
                },
            });
        }
    }
    Protocol::new(s, ProtocolKind::Process, rows, BTreeSet::new())
}

/// Process protocol whose output side is a grouped state protocol: the group
/// structure (and completeness flags) of the outputs is replicated per input.
pub fn build_process_protocol_grouped(
    inputs: &[CVector],
    outputs: &Protocol,
) -> Result<Protocol> {
    if outputs.kind() != ProtocolKind::State {
        return Err(TomoError::invalid("output protocol must be a state protocol"));
    }
    let s = outputs.dim();
    let out_groups: Vec<usize> = outputs.rows().iter().map(|r| r.group).collect();
    let n_groups = out_groups.iter().max().map(|m| m + 1).unwrap_or(0);
    let mut rows = Vec::with_capacity(inputs.len() * outputs.len());
    let mut complete = BTreeSet::new();
    for (ii, input) in inputs.iter().enumerate() {
        if input.len() != s {
            return Err(TomoError::dimension_mismatch("input state", s, input.len()));
        }
        let rho_t = projector(input).t().to_owned();
        for (oo, out_row) in outputs.rows().iter().enumerate() {
            let group = ii * n_groups + out_row.group;
            if outputs.is_group_complete(out_row.group) {
                complete.insert(group);
            }
            rows.push(MeasurementOperator {
                operator: linalg::kron(&rho_t, &out_row.operator),
                exposure: out_row.exposure,
                group,
                provenance: Provenance {
                    input: Some(ii),
                    output: Some(oo),
                    phase: out_row.provenance.phase,
                    label: out_row.provenance.label.clone(),
                },
            });
        }
    }
    Protocol::new(s, ProtocolKind::Process, rows, complete)
}

/// The 36-row qubit process protocol: six Pauli eigenstates at the input and
/// the same six projectors at the output, grouped per (input, output basis).
pub fn build_pauli6_process_protocol() -> Protocol {
    let inputs: Vec<CVector> = pauli6_state_vectors().into_iter().map(|(v, _)| v).collect();
    build_process_protocol_grouped(&inputs, &build_pauli6_state_protocol())
        .expect("static protocol is valid")
}

/// Set №1: the N single-mode basis states |j⟩.
pub fn build_optical_set1(n: usize) -> Result<Vec<CVector>> {
    if n < 2 {
        return Err(TomoError::invalid("mode count must be at least 2"));
    }
    Ok((0..n)
        .map(|j| {
            let mut v = CVector::zeros(n);
            v[j] = Complex64::new(1.0, 0.0);
            v
        })
        .collect())
}

/// Set №2: two-mode superpositions (e^{−iφ/2}|j⟩ + e^{iφ/2}|k⟩)/√2 for every
/// pair j < k (or j fixed to the first mode when restricted) and every phase.
pub fn build_optical_set2(n: usize, phases: &[f64], restrict_j_to_first: bool) -> Result<Vec<CVector>> {
    if n < 2 {
        return Err(TomoError::invalid("mode count must be at least 2"));
    }
    if phases.is_empty() {
        return Err(TomoError::invalid("phase list is empty"));
    }
    for &phi in phases {
        if !(0.0..std::f64::consts::TAU).contains(&phi) {
            return Err(TomoError::invalid(format!("phase {phi} outside [0, 2\u{03c0})")));
        }
    }
    let inv = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
    let j_range = if restrict_j_to_first { 0..1 } else { 0..n - 1 };
    let mut out = Vec::new();
    for j in j_range {
        for k in j + 1..n {
            for &phi in phases {
                let mut v = CVector::zeros(n);
                v[j] = inv * Complex64::from_polar(1.0, -phi / 2.0);
                v[k] = inv * Complex64::from_polar(1.0, phi / 2.0);
                out.push(v);
            }
        }
    }
    Ok(out)
}

/// Phases used by the restricted protocol.
pub const RESTRICTED_PHASES: [f64; 2] = [0.0, std::f64::consts::FRAC_PI_2];

/// Phases used by the extended protocol.
pub const EXTENDED_PHASES: [f64; 4] = [
    0.0,
    std::f64::consts::FRAC_PI_2,
    std::f64::consts::PI,
    3.0 * std::f64::consts::FRAC_PI_2,
];

/// Restricted intermediate protocol: inputs are Set №1 plus Set №2 restricted
/// to superpositions with the first mode at phases {0, π/2}; outputs are the
/// Set №1 projectors, one complete group per input.
pub fn build_restricted_protocol(n: usize) -> Result<Protocol> {
    let mut inputs = build_optical_set1(n)?;
    inputs.extend(build_optical_set2(n, &RESTRICTED_PHASES, true)?);
    let outputs = set1_output_protocol(n)?;
    build_process_protocol_grouped(&inputs, &outputs)
}

/// Extended protocol: Set №1 plus Set №2 over all pairs at phases
/// {0, π/2, π, 3π/2}, used on both the input and the output side. Rows are
/// independent (ungrouped) outcomes.
pub fn build_extended_protocol(n: usize) -> Result<Protocol> {
    let mut states = build_optical_set1(n)?;
    states.extend(build_optical_set2(n, &EXTENDED_PHASES, false)?);
    let outputs: Vec<CMatrix> = states.iter().map(projector).collect();
    build_process_protocol(&states, &outputs)
}

/// Set №1-only process protocol: basis states in, basis projectors out.
pub fn build_set1_process_protocol(n: usize) -> Result<Protocol> {
    let inputs = build_optical_set1(n)?;
    let outputs = set1_output_protocol(n)?;
    build_process_protocol_grouped(&inputs, &outputs)
}

/// The N basis projectors as a single complete measurement group.
fn set1_output_protocol(n: usize) -> Result<Protocol> {
    let rows = build_optical_set1(n)?
        .iter()
        .enumerate()
        .map(|(j, v)| MeasurementOperator {
            operator: projector(v),
            exposure: 1.0,
            group: 0,
            provenance: Provenance {
                output: Some(j),
                ..Default::default()
            },
        })
        .collect();
    Protocol::new(n, ProtocolKind::State, rows, BTreeSet::from([0]))
}

/// The measurement matrix B of a protocol, stored over the reals.
#[derive(Debug, Clone)]
pub struct ProtocolMatrix {
    b: Array2<f64>,
    rows: usize,
    full_dimension: usize,
    singular_values: Vec<f64>,
    rank: usize,
}

impl ProtocolMatrix {
    /// The stored real matrix: one row per measurement operator, real parts
    /// of the vectorized operator followed by imaginary parts.
    pub fn matrix(&self) -> &Array2<f64> {
        &self.b
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of real Hermitian parameters the protocol must resolve.
    pub fn full_dimension(&self) -> usize {
        self.full_dimension
    }

    /// Singular values, descending; at most min(rows, full dimension) values.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// Completeness verdict for a protocol matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub rows: usize,
    pub full_dimension: usize,
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub complete: bool,
}

/// Build the measurement matrix B of a protocol.
///
/// Singular values are computed from the Gram matrix of the rows in an
/// isometric real parameterization of the Hermitian operator space. That Gram
/// matrix has entries Tr(Λ_i Λ_j), exactly the Gram of the stored doubled
/// real rows, so the spectrum and rank agree with an SVD of the stored B
/// while the eigenproblem stays at the Hermitian dimension.
pub fn build_b_matrix(p: &Protocol) -> Result<ProtocolMatrix> {
    let odim = p.object_dim();
    let nrows = p.len();
    let vec_len = odim * odim;
    let mut b = Array2::zeros((nrows, 2 * vec_len));
    // isometric coordinates: diagonal entries, then √2·(Re, Im) per off-diagonal
    let mut iso = Array2::zeros((nrows, vec_len));
    let sqrt2 = 2.0f64.sqrt();
    for (r, row) in p.rows().iter().enumerate() {
        let op = &row.operator;
        for i in 0..odim {
            for j in 0..odim {
                let z = op[[i, j]];
                b[[r, i * odim + j]] = z.re;
                b[[r, vec_len + i * odim + j]] = z.im;
            }
        }
        let mut k = 0;
        for i in 0..odim {
            iso[[r, k]] = op[[i, i]].re;
            k += 1;
        }
        for i in 0..odim {
            for j in i + 1..odim {
                let z = op[[i, j]];
                iso[[r, k]] = sqrt2 * z.re;
                iso[[r, k + 1]] = sqrt2 * z.im;
                k += 2;
            }
        }
    }
    let gram = linalg::column_gram(&iso);
    drop(iso);
    let evals = linalg::eigvalsh_real(&gram)?;
    let mut singular_values: Vec<f64> = evals
        .iter()
        .rev()
        .take(vec_len.min(nrows))
        .map(|&v| v.max(0.0).sqrt())
        .collect();
    // clamp descending order against roundoff
    singular_values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let top = singular_values.first().copied().unwrap_or(0.0);
    let rank = singular_values
        .iter()
        .filter(|&&v| v > tol::TAU_B * top)
        .count();
    Ok(ProtocolMatrix {
        b,
        rows: nrows,
        full_dimension: vec_len,
        singular_values,
        rank,
    })
}

/// Completeness verdict: complete iff rank equals the full Hermitian
/// dimension.
pub fn completeness_report(b: &ProtocolMatrix) -> CompletenessReport {
    CompletenessReport {
        rows: b.rows(),
        full_dimension: b.full_dimension(),
        rank: b.rank(),
        singular_values: b.singular_values().to_vec(),
        complete: b.rank() == b.full_dimension(),
    }
}
