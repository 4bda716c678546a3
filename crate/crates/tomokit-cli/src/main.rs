//! Command-line front end for the tomography toolkit.
//!
//! Exit codes: 0 success, 1 input error, 2 incomplete-protocol verdict
//! (`check` only), 3 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tomokit::io;
use tomokit::processes::{choi_of_process, QuantumProcess};
use tomokit::protocols::{
    build_b_matrix, build_extended_protocol, build_pauli6_process_protocol,
    build_pauli6_state_protocol, build_restricted_protocol, build_set1_process_protocol,
    completeness_report, Protocol, ProtocolKind,
};
use tomokit::reconstruction::{adequate_rank, reconstruct_process, reconstruct_state};
use tomokit::simulator::{
    noisy_network, noisy_z_gate, simulate_experiment, SamplingMode, TomographyObject,
};
use tomokit::states::{fidelity, purify, DensityMatrix};
use tomokit::statistics::{
    adjusted_fidelity, chi_square_adequacy, information_matrix, loss_coefficients, loss_quantile,
};
use tomokit::TomoError;

#[derive(Parser)]
#[command(
    name = "tomokit",
    version,
    about = "Design, audit, simulate and score quantum tomography protocols"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Completeness audit: singular spectrum and rank of the measurement matrix
    Check(CheckArgs),
    /// Simulate an experiment: predicted probabilities and seeded counts
    Simulate(SimulateArgs),
    /// Maximum-likelihood reconstruction from a counts file
    Reconstruct(ReconstructArgs),
    /// Chi-square goodness-of-fit of a fixed-rank reconstruction
    Adequacy(AdequacyArgs),
    /// Fidelity (plain and adjusted) between an estimate and a reference
    Fidelity(FidelityArgs),
    /// Loss-of-fidelity distribution and confidence bound
    Loss(LossArgs),
}

#[derive(Args)]
struct ProtocolArgs {
    /// Protocol: pauli6 | pauli6-process | set1 | set1-process | restricted |
    /// extended, or a path to a protocol JSON file
    #[arg(long)]
    protocol: String,
    /// Mode count for the optical protocol families
    #[arg(long, default_value_t = 4)]
    modes: usize,
    /// Trials per group (grouped rows) or per row (ungrouped rows)
    #[arg(long)]
    trials: Option<f64>,
}

impl ProtocolArgs {
    fn build(&self) -> Result<Protocol> {
        let p = match self.protocol.as_str() {
            "pauli6" => build_pauli6_state_protocol(),
            "pauli6-process" => build_pauli6_process_protocol(),
            "set1" => single_group_set1(self.modes)?,
            "set1-process" => build_set1_process_protocol(self.modes)?,
            "restricted" => build_restricted_protocol(self.modes)?,
            "extended" => build_extended_protocol(self.modes)?,
            path => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading protocol file {path}"))?;
                let file: io::ProtocolFile =
                    serde_json::from_str(&text).context("parsing protocol file")?;
                io::protocol_from_file(&file)?
            }
        };
        match self.trials {
            Some(t) if t > 0.0 => Ok(p.scale_exposures(t)?),
            Some(t) => bail!("--trials must be positive, got {t}"),
            None => Ok(p),
        }
    }
}

/// Set №1 as a state protocol: the N basis projectors, one complete group.
fn single_group_set1(n: usize) -> Result<Protocol> {
    use tomokit::protocols::{build_optical_set1, MeasurementOperator, Provenance};
    let rows = build_optical_set1(n)?
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let s = v.len();
            let operator =
                tomokit::CMatrix::from_shape_fn((s, s), |(a, b)| v[a] * v[b].conj());
            MeasurementOperator {
                operator,
                exposure: 1.0,
                group: 0,
                provenance: Provenance {
                    output: Some(j),
                    ..Default::default()
                },
            }
        })
        .collect();
    Ok(Protocol::new(
        n,
        ProtocolKind::State,
        rows,
        std::collections::BTreeSet::from([0]),
    )?)
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Also write the report as JSON
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Multinomial,
    Binomial,
    Poisson,
}

impl From<ModeArg> for SamplingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Multinomial => SamplingMode::Multinomial,
            ModeArg::Binomial => SamplingMode::Binomial,
            ModeArg::Poisson => SamplingMode::Poisson,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Fixture: ideal-z | noisy-z | haar-unitary | noisy-unitary |
    /// pure-qubit | maximally-mixed, or a path to an object JSON file
    #[arg(long)]
    fixture: String,
    /// Depolarizing weight for the noisy fixtures
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    /// Seed of the random fixture itself (network drawing)
    #[arg(long, default_value_t = 1)]
    fixture_seed: u64,
    /// Polar angle of the pure-qubit fixture
    #[arg(long, default_value_t = 0.6)]
    theta: f64,
    /// Azimuthal angle of the pure-qubit fixture
    #[arg(long, default_value_t = 0.4)]
    phi: f64,
    /// Sampling mode
    #[arg(long, value_enum, default_value_t = ModeArg::Multinomial)]
    mode: ModeArg,
    /// Seed for count generation (required: no ambient entropy)
    #[arg(long)]
    seed: u64,
    /// Counts output path (.csv or .json)
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth sidecar path (default: <out>.truth.json)
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Counts file (.csv or .json)
    #[arg(long)]
    counts: PathBuf,
    /// Rank of the fitted object, or "auto" for adequate-rank selection
    #[arg(long, default_value = "auto")]
    rank: String,
    /// Significance level for adequacy
    #[arg(long, default_value_t = 0.05)]
    significance: f64,
    /// Result output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AdequacyArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,
    #[arg(long)]
    counts: PathBuf,
    #[arg(long)]
    rank: usize,
    #[arg(long, default_value_t = 0.05)]
    significance: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FidelityArgs {
    /// Estimate: a result JSON from `reconstruct` or an object JSON
    #[arg(long)]
    estimate: PathBuf,
    /// Reference object JSON (e.g. a simulation ground-truth sidecar)
    #[arg(long)]
    reference: PathBuf,
    /// Protocol for the adjusted fidelity (omit to skip adjustment)
    #[arg(long)]
    protocol: Option<String>,
    #[arg(long, default_value_t = 4)]
    modes: usize,
    #[arg(long)]
    trials: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LossArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Object JSON (truth sidecar or reconstruction result)
    #[arg(long)]
    object: PathBuf,
    /// Purification rank (default: numerical rank of the object)
    #[arg(long)]
    rank: Option<usize>,
    /// Confidence level of the fidelity bound
    #[arg(long, default_value_t = 0.95)]
    confidence: f64,
    /// Monte-Carlo draws for the quantile
    #[arg(long, default_value_t = 200_000)]
    draws: usize,
    /// Seed for the quantile Monte-Carlo (required: no ambient entropy)
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<TomoError>() {
        Some(
            TomoError::NonConvergence { .. }
            | TomoError::ModelViolation { .. }
            | TomoError::Numerical(_)
            | TomoError::OverParameterized { .. }
            | TomoError::DegenerateIntensity { .. },
        ) => 3,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Simulate(args) => cmd_simulate(args).map(|_| 0),
        Command::Reconstruct(args) => cmd_reconstruct(args).map(|_| 0),
        Command::Adequacy(args) => cmd_adequacy(args).map(|_| 0),
        Command::Fidelity(args) => cmd_fidelity(args).map(|_| 0),
        Command::Loss(args) => cmd_loss(args).map(|_| 0),
    }
}

fn cmd_check(args: CheckArgs) -> Result<u8> {
    let protocol = args.protocol.build()?;
    let b = build_b_matrix(&protocol)?;
    let report = completeness_report(&b);

    println!("rows:            {}", report.rows);
    println!("full dimension:  {}", report.full_dimension);
    println!("rank:            {}", report.rank);
    println!(
        "verdict:         {}",
        if report.complete { "complete" } else { "incomplete" }
    );
    println!("singular values ({} shown):", report.singular_values.len());
    for (value, count) in group_values(&report.singular_values) {
        if count > 1 {
            println!("  {value:.12}  (x{count})");
        } else {
            println!("  {value:.12}");
        }
    }
    if let Some(path) = args.json {
        write_json(&path, &report)?;
        println!("report written to {}", path.display());
    }
    Ok(if report.complete { 0 } else { 2 })
}

fn group_values(values: &[f64]) -> Vec<(f64, usize)> {
    let mut grouped: Vec<(f64, usize)> = Vec::new();
    for &v in values {
        match grouped.last_mut() {
            Some((head, count)) if (*head - v).abs() < 1e-9 * head.max(1.0) => *count += 1,
            _ => grouped.push((v, 1)),
        }
    }
    grouped
}

fn build_fixture(args: &SimulateArgs, protocol: &Protocol) -> Result<TomographyObject> {
    let obj = match args.fixture.as_str() {
        "ideal-z" => TomographyObject::Process(noisy_z_gate(0.0)?),
        "noisy-z" => TomographyObject::Process(noisy_z_gate(args.noise)?),
        "haar-unitary" => TomographyObject::Process(QuantumProcess::unitary(
            tomokit::simulator::haar_unitary(protocol.dim(), args.fixture_seed),
        )?),
        "noisy-unitary" => TomographyObject::Process(noisy_network(
            protocol.dim(),
            args.fixture_seed,
            args.noise,
        )?),
        "pure-qubit" => {
            let amp0 = num_complex::Complex64::new(args.theta.cos(), 0.0);
            let amp1 = num_complex::Complex64::from_polar(args.theta.sin(), args.phi);
            TomographyObject::State(DensityMatrix::pure(&[amp0, amp1])?)
        }
        "maximally-mixed" => {
            TomographyObject::State(DensityMatrix::maximally_mixed(protocol.dim()))
        }
        path => {
            let file: io::ObjectFile = read_json(Path::new(path))?;
            io::object_from_file(&file)?
        }
    };
    if obj.dim() != protocol.dim() {
        bail!(
            "fixture dimension {} does not match protocol dimension {}",
            obj.dim(),
            protocol.dim()
        );
    }
    match (&obj, protocol.kind()) {
        (TomographyObject::State(_), ProtocolKind::State)
        | (TomographyObject::Process(_), ProtocolKind::Process) => Ok(obj),
        _ => bail!("fixture kind does not match protocol kind"),
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let protocol = args.protocol.build()?;
    let obj = build_fixture(&args, &protocol)?;
    let data = simulate_experiment(&obj, &protocol, args.mode.into(), args.seed)?;

    let is_json = args
        .out
        .extension()
        .map(|e| e.eq_ignore_ascii_case("json"))
        .unwrap_or(false);
    if is_json {
        write_json(&args.out, &io::counts_to_file(&data))?;
    } else {
        std::fs::write(&args.out, io::counts_to_csv(&data))
            .with_context(|| format!("writing {}", args.out.display()))?;
    }

    let truth_path = args
        .truth
        .clone()
        .unwrap_or_else(|| sidecar_path(&args.out));
    let fixture = io::FixtureInfo {
        name: args.fixture.clone(),
        seed: Some(args.fixture_seed),
        noise: Some(args.noise),
    };
    write_json(&truth_path, &io::object_to_file(&obj, Some(fixture))?)?;
    println!(
        "counts written to {}, ground truth to {}",
        args.out.display(),
        truth_path.display()
    );
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".truth.json");
    PathBuf::from(name)
}

fn load_counts(path: &Path, protocol: &Protocol) -> Result<tomokit::simulator::MeasurementData> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let is_json = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("json"))
        .unwrap_or(false);
    let data = if is_json {
        let file: io::CountsFile = serde_json::from_str(&text).context("parsing counts JSON")?;
        io::counts_from_file(&file)?
    } else {
        io::counts_from_csv(&text, SamplingMode::Multinomial, None)?
    };
    data.check_alignment(protocol)
        .map_err(|_| anyhow!("counts file has {} rows, protocol has {}", data.len(), protocol.len()))?;
    Ok(data)
}

fn cmd_reconstruct(args: ReconstructArgs) -> Result<()> {
    let protocol = args.protocol.build()?;
    let data = load_counts(&args.counts, &protocol)?;

    let (result, adequacy, ladder) = if args.rank == "auto" {
        let selection = adequate_rank(&data, &protocol, args.significance)?;
        let ladder: Vec<io::RankStep> = selection
            .reports
            .iter()
            .map(|(r, rep)| io::RankStep {
                rank: *r,
                chi_square: rep.chi_square,
                nu: rep.nu,
                p_value: rep.p_value,
            })
            .collect();
        let adequacy = selection.reports.last().map(|(_, rep)| rep.clone());
        (selection.result, adequacy, Some(ladder))
    } else {
        let rank: usize = args
            .rank
            .parse()
            .map_err(|_| anyhow!("--rank must be a positive integer or \"auto\""))?;
        let result = match protocol.kind() {
            ProtocolKind::State => reconstruct_state(&data, &protocol, rank)?,
            ProtocolKind::Process => reconstruct_process(&data, &protocol, rank)?,
        };
        let adequacy = chi_square_adequacy(&protocol, &data, &result, args.significance).ok();
        (result, adequacy, None)
    };

    let file = io::result_to_file(&result, adequacy, ladder)?;
    emit_json(args.out.as_deref(), &file)
}

fn cmd_adequacy(args: AdequacyArgs) -> Result<()> {
    let protocol = args.protocol.build()?;
    let data = load_counts(&args.counts, &protocol)?;
    let result = match protocol.kind() {
        ProtocolKind::State => reconstruct_state(&data, &protocol, args.rank)?,
        ProtocolKind::Process => reconstruct_process(&data, &protocol, args.rank)?,
    };
    let report = chi_square_adequacy(&protocol, &data, &result, args.significance)?;
    emit_json(args.out.as_deref(), &report)
}

/// Load an object from either an object file or a reconstruction result.
fn load_object(path: &Path) -> Result<TomographyObject> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(file) = serde_json::from_str::<io::ResultFile>(&text) {
        if let Ok(obj) = io::object_from_result(&file) {
            return Ok(obj);
        }
    }
    let file: io::ObjectFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing object file {}", path.display()))?;
    Ok(io::object_from_file(&file)?)
}

/// The density-matrix form of an object: the state itself or the Choi state.
fn object_density(obj: &TomographyObject) -> Result<(DensityMatrix, ProtocolKind, usize)> {
    Ok(match obj {
        TomographyObject::State(rho) => (rho.clone(), ProtocolKind::State, rho.dim()),
        TomographyObject::Process(proc) => {
            let choi = choi_of_process(proc)?;
            (choi.state().clone(), ProtocolKind::Process, choi.dim())
        }
    })
}

fn cmd_fidelity(args: FidelityArgs) -> Result<()> {
    let est = load_object(&args.estimate)?;
    let reference = load_object(&args.reference)?;
    let (rho_est, kind_est, dim_est) = object_density(&est)?;
    let (rho_ref, kind_ref, dim_ref) = object_density(&reference)?;
    if kind_est != kind_ref || dim_est != dim_ref {
        bail!("estimate and reference have different kinds or dimensions");
    }
    let plain = fidelity(&rho_ref, &rho_est)?;

    let adjusted = match &args.protocol {
        None => None,
        Some(selector) => {
            let protocol = ProtocolArgs {
                protocol: selector.clone(),
                modes: args.modes,
                trials: args.trials,
            }
            .build()?;
            if protocol.kind() != kind_ref || protocol.dim() != dim_ref {
                bail!("protocol does not match the compared objects");
            }
            let rank = rho_ref.rank().max(rho_est.rank());
            let c_ref = purify(&rho_ref, rank)?;
            let c_est = purify(&rho_est, rank)?;
            // measurable subspace linearized at the reference
            let h = information_matrix(&c_ref, &protocol)?;
            Some(adjusted_fidelity(&c_ref, &c_est, &h)?)
        }
    };

    #[derive(serde::Serialize)]
    struct FidelityOut {
        fidelity: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        adjusted_fidelity: Option<f64>,
    }
    emit_json(
        args.out.as_deref(),
        &FidelityOut {
            fidelity: plain,
            adjusted_fidelity: adjusted,
        },
    )
}

fn cmd_loss(args: LossArgs) -> Result<()> {
    let protocol = args.protocol.build()?;
    let obj = load_object(&args.object)?;
    let (rho, kind, dim) = object_density(&obj)?;
    if kind != protocol.kind() || dim != protocol.dim() {
        bail!("object does not match the protocol");
    }
    let rank = args.rank.unwrap_or_else(|| rho.rank());
    let c = purify(&rho, rank.max(rho.rank()))?;
    let h = information_matrix(&c, &protocol)?;
    let dist = loss_coefficients(&h)?;
    let bound = loss_quantile(&dist, args.confidence, args.draws, args.seed)?;
    let file = io::LossFile {
        version: io::FORMAT_VERSION,
        distribution: dist,
        bound,
    };
    emit_json(args.out.as_deref(), &file)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).context("serializing JSON")?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    match path {
        Some(p) => write_json(p, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value).context("serializing JSON")?);
            Ok(())
        }
    }
}
