//! Versioned JSON/CSV schemas for protocols, counts, objects and results.
//!
//! Complex numbers serialize as `[re, im]` pairs, matrices as row-major
//! nested arrays. All floating-point round trips are lossless: serde_json
//! prints the shortest decimal that parses back to the same double.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{Result, TomoError};
use crate::linalg::CMatrix;
use crate::processes::{ChiBasis, ChiMatrix, ChoiState, QuantumProcess};
use crate::protocols::{MeasurementOperator, Protocol, ProtocolKind, Provenance};
use crate::reconstruction::TomographyResult;
use crate::simulator::{MeasurementData, SamplingMode, TomographyObject};
use crate::states::DensityMatrix;
use crate::statistics::{AdequacyReport, FidelityBound, LossDistribution};

pub const FORMAT_VERSION: u32 = 1;

/// Row-major complex matrix as nested `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[[i, j]].re, m[[i, j]].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    if nrows == 0 || ncols == 0 {
        return Err(TomoError::invalid("empty matrix"));
    }
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(TomoError::invalid("ragged matrix rows"));
    }
    let mut m = Array2::zeros((nrows, ncols));
    for (i, row) in rows.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(TomoError::invalid(format!(
                    "non-finite entry at ({i}, {j})"
                )));
            }
            m[[i, j]] = Complex64::new(re, im);
        }
    }
    Ok(m)
}

/// Protocol file schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolFile {
    pub version: u32,
    pub dimension: usize,
    pub kind: ProtocolKind,
    pub rows: Vec<ProtocolRowFile>,
    #[serde(default)]
    pub complete_groups: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolRowFile {
    pub lambda: MatrixJson,
    pub exposure: f64,
    pub group: usize,
    #[serde(default, skip_serializing_if = "is_default_provenance")]
    pub provenance: Provenance,
}

fn is_default_provenance(p: &Provenance) -> bool {
    *p == Provenance::default()
}

pub fn protocol_to_file(p: &Protocol) -> ProtocolFile {
    ProtocolFile {
        version: FORMAT_VERSION,
        dimension: p.dim(),
        kind: p.kind(),
        rows: p
            .rows()
            .iter()
            .map(|r| ProtocolRowFile {
                lambda: matrix_to_json(&r.operator),
                exposure: r.exposure,
                group: r.group,
                provenance: r.provenance.clone(),
            })
            .collect(),
        complete_groups: p.complete_groups().iter().copied().collect(),
    }
}

pub fn protocol_from_file(file: &ProtocolFile) -> Result<Protocol> {
    if file.version != FORMAT_VERSION {
        return Err(TomoError::invalid(format!(
            "unsupported protocol format version {}",
            file.version
        )));
    }
    let rows = file
        .rows
        .iter()
        .map(|r| {
            Ok(MeasurementOperator {
                operator: matrix_from_json(&r.lambda)?,
                exposure: r.exposure,
                group: r.group,
                provenance: r.provenance.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let protocol = Protocol::new(
        file.dimension,
        file.kind,
        rows,
        BTreeSet::from_iter(file.complete_groups.iter().copied()),
    )?;
    protocol.validate_operators()?;
    Ok(protocol)
}

/// Counts file schema (JSON form).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountsFile {
    pub version: u32,
    pub mode: SamplingMode,
    pub counts: Vec<u64>,
    pub trials: Vec<f64>,
    pub sample_size: f64,
}

pub fn counts_to_file(data: &MeasurementData) -> CountsFile {
    CountsFile {
        version: FORMAT_VERSION,
        mode: data.mode,
        counts: data.counts.clone(),
        trials: data.exposures.clone(),
        sample_size: data.n,
    }
}

pub fn counts_from_file(file: &CountsFile) -> Result<MeasurementData> {
    if file.counts.len() != file.trials.len() {
        return Err(TomoError::invalid("counts and trials lengths differ"));
    }
    Ok(MeasurementData {
        counts: file.counts.clone(),
        exposures: file.trials.clone(),
        mode: file.mode,
        n: file.sample_size,
    })
}

/// CSV encoding: header `row_index,count,trials`, one line per row.
pub fn counts_to_csv(data: &MeasurementData) -> String {
    let mut out = String::from("row_index,count,trials\n");
    for (i, (&k, &t)) in data.counts.iter().zip(data.exposures.iter()).enumerate() {
        out.push_str(&format!("{i},{k},{t}\n"));
    }
    out
}

pub fn counts_from_csv(text: &str, mode: SamplingMode, sample_size: Option<f64>) -> Result<MeasurementData> {
    let mut counts = Vec::new();
    let mut trials = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with("row_index")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(TomoError::invalid(format!(
                "counts line {} has {} fields, expected 3",
                lineno + 1,
                fields.len()
            )));
        }
        let idx: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| TomoError::invalid(format!("bad row index on line {}", lineno + 1)))?;
        if idx != counts.len() {
            return Err(TomoError::invalid(format!(
                "row indices must be consecutive, got {idx} on line {}",
                lineno + 1
            )));
        }
        counts.push(fields[1].trim().parse().map_err(|_| {
            TomoError::invalid(format!("bad count on line {}", lineno + 1))
        })?);
        trials.push(fields[2].trim().parse().map_err(|_| {
            TomoError::invalid(format!("bad trials on line {}", lineno + 1))
        })?);
    }
    if counts.is_empty() {
        return Err(TomoError::invalid("counts file has no rows"));
    }
    let n = sample_size.unwrap_or_else(|| trials.iter().sum());
    Ok(MeasurementData {
        counts,
        exposures: trials,
        mode,
        n,
    })
}

/// Serialized state or process, used for ground-truth sidecars and references.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectFile {
    pub version: u32,
    pub kind: ProtocolKind,
    pub dimension: usize,
    /// Density matrix (state kind) or Choi-state matrix (process kind).
    pub matrix: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<FixtureInfo>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureInfo {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
}

pub fn object_to_file(obj: &TomographyObject, fixture: Option<FixtureInfo>) -> Result<ObjectFile> {
    Ok(match obj {
        TomographyObject::State(rho) => ObjectFile {
            version: FORMAT_VERSION,
            kind: ProtocolKind::State,
            dimension: rho.dim(),
            matrix: matrix_to_json(rho.matrix()),
            fixture,
        },
        TomographyObject::Process(proc) => {
            let choi = crate::processes::choi_of_process(proc)?;
            ObjectFile {
                version: FORMAT_VERSION,
                kind: ProtocolKind::Process,
                dimension: choi.dim(),
                matrix: matrix_to_json(choi.matrix()),
                fixture,
            }
        }
    })
}

pub fn object_from_file(file: &ObjectFile) -> Result<TomographyObject> {
    let m = matrix_from_json(&file.matrix)?;
    Ok(match file.kind {
        ProtocolKind::State => TomographyObject::State(DensityMatrix::new(m)?),
        ProtocolKind::Process => {
            let state = DensityMatrix::new(m)?;
            let choi = ChoiState::new(file.dimension, state)?;
            TomographyObject::Process(QuantumProcess::Choi(choi))
        }
    })
}

/// Reconstruction result schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultFile {
    pub version: u32,
    pub kind: ProtocolKind,
    pub dimension: usize,
    pub rank: usize,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub residual: f64,
    /// Density matrix (state) or Choi-state matrix (process).
    pub matrix: MatrixJson,
    /// Chi matrix in the Pauli-product basis when the dimension permits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_pauli: Option<MatrixJson>,
    /// Kraus operators derived from the estimate (process kind).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adequacy: Option<AdequacyReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_ladder: Option<Vec<RankStep>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankStep {
    pub rank: usize,
    pub chi_square: f64,
    pub nu: usize,
    pub p_value: f64,
}

pub fn result_to_file(
    result: &TomographyResult,
    adequacy: Option<AdequacyReport>,
    rank_ladder: Option<Vec<RankStep>>,
) -> Result<ResultFile> {
    let (matrix, chi_pauli, kraus) = match result.kind() {
        ProtocolKind::State => (matrix_to_json(result.density()?.matrix()), None, None),
        ProtocolKind::Process => {
            let choi = result.choi()?;
            let chi_pauli = if result.dim().is_power_of_two() {
                let chi = result.chi()?.in_basis(ChiBasis::PauliProduct)?;
                Some(matrix_to_json(chi.matrix()))
            } else {
                None
            };
            let kraus = result
                .kraus()?
                .operators()
                .iter()
                .map(matrix_to_json)
                .collect();
            (matrix_to_json(choi.matrix()), chi_pauli, Some(kraus))
        }
    };
    Ok(ResultFile {
        version: FORMAT_VERSION,
        kind: result.kind(),
        dimension: result.dim(),
        rank: result.rank(),
        log_likelihood: result.log_likelihood(),
        iterations: result.iterations(),
        residual: result.residual(),
        matrix,
        chi_pauli,
        kraus,
        adequacy,
        rank_ladder,
    })
}

/// Estimate (or any object) back out of a result file.
pub fn object_from_result(file: &ResultFile) -> Result<TomographyObject> {
    let m = matrix_from_json(&file.matrix)?;
    Ok(match file.kind {
        ProtocolKind::State => TomographyObject::State(DensityMatrix::new(m)?),
        ProtocolKind::Process => {
            let choi = ChoiState::new(file.dimension, DensityMatrix::new(m)?)?;
            TomographyObject::Process(QuantumProcess::Choi(choi))
        }
    })
}

/// Loss-analysis report schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LossFile {
    pub version: u32,
    pub distribution: LossDistribution,
    pub bound: FidelityBound,
}

/// Chi matrix convenience wrapper used by reports.
pub fn chi_to_json(chi: &ChiMatrix) -> MatrixJson {
    matrix_to_json(chi.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{build_pauli6_process_protocol, build_restricted_protocol};
    use crate::simulator::{simulate_experiment, noisy_network};

    #[test]
    fn protocol_round_trip_is_lossless() {
        let p = build_restricted_protocol(3).unwrap();
        let file = protocol_to_file(&p);
        let text = serde_json::to_string(&file).unwrap();
        let parsed: ProtocolFile = serde_json::from_str(&text).unwrap();
        let back = protocol_from_file(&parsed).unwrap();
        assert_eq!(back.len(), p.len());
        assert_eq!(back.complete_groups(), p.complete_groups());
        for (a, b) in p.rows().iter().zip(back.rows().iter()) {
            assert_eq!(a.operator, b.operator);
            assert_eq!(a.exposure, b.exposure);
            assert_eq!(a.group, b.group);
            assert_eq!(a.provenance, b.provenance);
        }
    }

    #[test]
    fn counts_round_trips_csv_and_json() {
        let p = build_pauli6_process_protocol().scale_exposures(512.0).unwrap();
        let proc = noisy_network(2, 3, 0.1).unwrap();
        let data = simulate_experiment(
            &TomographyObject::Process(proc),
            &p,
            SamplingMode::Multinomial,
            5,
        )
        .unwrap();
        let csv = counts_to_csv(&data);
        let back = counts_from_csv(&csv, data.mode, Some(data.n)).unwrap();
        assert_eq!(back, data);

        let file = counts_to_file(&data);
        let text = serde_json::to_string(&file).unwrap();
        let parsed: CountsFile = serde_json::from_str(&text).unwrap();
        assert_eq!(counts_from_file(&parsed).unwrap(), data);
    }

    #[test]
    fn object_round_trip_preserves_choi() {
        let proc = noisy_network(2, 9, 0.2).unwrap();
        let obj = TomographyObject::Process(proc);
        let file = object_to_file(&obj, None).unwrap();
        let text = serde_json::to_string(&file).unwrap();
        let parsed: ObjectFile = serde_json::from_str(&text).unwrap();
        let back = object_from_file(&parsed).unwrap();
        match (&obj, &back) {
            (TomographyObject::Process(a), TomographyObject::Process(b)) => {
                let ca = crate::processes::choi_of_process(a).unwrap();
                let cb = crate::processes::choi_of_process(b).unwrap();
                assert_eq!(ca.matrix(), cb.matrix());
            }
            _ => panic!("kind changed"),
        }
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(counts_from_csv("row_index,count\n0,1\n", SamplingMode::Binomial, None).is_err());
        assert!(counts_from_csv("", SamplingMode::Binomial, None).is_err());
        let ragged: MatrixJson = vec![vec![[1.0, 0.0]], vec![[0.0, 0.0], [1.0, 0.0]]];
        assert!(matrix_from_json(&ragged).is_err());
    }
}
