//! Implementations of the five subcommands. Every report is wrapped in
//! a provenance envelope (library version, config hash, seed) and
//! printed as JSON with a stable key order, so reruns are byte-identical.

use serde::Serialize;
use sha2::{Digest, Sha256};

use synmom::codes::{self, Code};
use synmom::estimate::{run_estimation, EstimationOptions, MomentSource, WeightMode};
use synmom::gf2::BitVec;
use synmom::identify::{
    self, build_coefficient_matrix, certify_full_rank, chain_entry_closed_form,
    check_equivalent_condition, check_identifiability, intersection_matrix, orthogonal_array_check,
    schur_chain, sign_symmetries, LabelOrder, RowSource,
};
use synmom::noise::gamma_hat;
use synmom::ratmat::leading_principal_minors;

use crate::config::Mode;
use crate::{CliError, CodeInfoArgs, RunArgs, VerifyArgs};

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    version: &'static str,
    command: &'static str,
    config_hash: String,
    seed: u64,
    report: T,
}

fn envelope<T: Serialize>(
    command: &'static str,
    config_json: &str,
    seed: u64,
    report: T,
) -> Envelope<T> {
    let mut hasher = Sha256::new();
    hasher.update(config_json.as_bytes());
    Envelope {
        version: env!("CARGO_PKG_VERSION"),
        command,
        config_hash: hex::encode(hasher.finalize()),
        seed,
        report,
    }
}

fn emit<T: Serialize>(doc: &T, out: Option<&str>) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(doc).expect("report serializes");
    match out {
        Some(path) => std::fs::write(path, json + "\n")
            .map_err(|e| CliError::input(format!("cannot write report `{path}`: {e}"))),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CodeInfoReport {
    kind: String,
    n: usize,
    m: usize,
    generators: usize,
    group_size: u64,
    distance: String,
    pure_distance: String,
    max_weight: usize,
}

pub fn code_info(args: &CodeInfoArgs) -> Result<i32, CliError> {
    let code = if args.file {
        let text = std::fs::read_to_string(&args.code)
            .map_err(|e| CliError::input(format!("cannot read `{}`: {e}", args.code)))?;
        Code::from_text(&text).map_err(CliError::from_core)?
    } else {
        codes::catalog(&args.code, args.n.or(args.l)).map_err(CliError::from_core)?
    };
    let distance = code
        .distance(args.max_weight)
        .map_err(CliError::from_core)?;
    let pure = code
        .pure_distance(args.max_weight)
        .map_err(CliError::from_core)?;
    let report = CodeInfoReport {
        kind: code.kind().as_str().into(),
        n: code.block_size(),
        m: code.meas_bits(),
        generators: code.generator_count(),
        group_size: code.group_size(),
        distance: distance.to_string(),
        pure_distance: pure.to_string(),
        max_weight: args.max_weight,
    };
    emit(&report, None)?;
    Ok(0)
}

pub fn check(args: &RunArgs) -> Result<i32, CliError> {
    let config = args.effective_config()?;
    let code = config.build_code()?;
    let supports = config.build_supports(&code)?;
    let report = identify::identifiability_report(&code, &supports).map_err(CliError::from_core)?;
    let identifiable = report.identifiable;
    let doc = envelope(
        "check",
        &config.canonical_json(),
        config.seed.unwrap_or(0),
        report,
    );
    emit(&doc, config.outputs.report.as_deref())?;
    Ok(if identifiable { 0 } else { 1 })
}

#[derive(Serialize)]
struct HistogramEntry {
    syndrome: String,
    count: u64,
}

#[derive(Serialize)]
struct SimulateReport {
    shots: u64,
    syndrome_bits: usize,
    histogram: Vec<HistogramEntry>,
}

pub fn simulate(args: &RunArgs) -> Result<i32, CliError> {
    let config = args.effective_config()?;
    let code = config.build_code()?;
    let model = config.build_model(&code)?;
    let shots = config
        .shots
        .ok_or_else(|| CliError::input("simulate needs a shot count (--shots)"))?;
    let seed = config.seed.unwrap_or(0);
    let batch = model
        .sample(&code, shots, seed)
        .map_err(CliError::from_core)?;
    let histogram = batch
        .histogram()
        .into_iter()
        .map(|(syn, count)| HistogramEntry {
            syndrome: syn.to_string(),
            count,
        })
        .collect();
    let report = SimulateReport {
        shots,
        syndrome_bits: batch.syndrome_bits(),
        histogram,
    };
    let doc = envelope("simulate", &config.canonical_json(), seed, report);
    emit(&doc, config.outputs.report.as_deref())?;
    Ok(0)
}

pub fn estimate(args: &RunArgs) -> Result<i32, CliError> {
    let config = args.effective_config()?;
    let code = config.build_code()?;
    let model = config.build_model(&code)?;
    let mode = config.mode.unwrap_or(Mode::Exact);
    let seed = config.seed.unwrap_or(0);
    let options = EstimationOptions {
        weight_mode: if args.weighted {
            WeightMode::InverseVariance
        } else {
            WeightMode::Unweighted
        },
        clamp_nonpositive: args.clamp,
        skip_identifiability_check: args.force,
        ..Default::default()
    };
    let report = match mode {
        Mode::Exact => run_estimation(&code, &model, MomentSource::ExactOracle, &options)
            .map_err(CliError::from_core)?,
        Mode::Sample => {
            let shots = config
                .shots
                .ok_or_else(|| CliError::input("sample mode needs a shot count (--shots)"))?;
            let batch = model
                .sample(&code, shots, seed)
                .map_err(CliError::from_core)?;
            run_estimation(&code, &model, MomentSource::Batch(&batch), &options)
                .map_err(CliError::from_core)?
        }
    };
    if let Some(path) = config.outputs.csv.as_deref() {
        std::fs::write(path, report.rates_csv())
            .map_err(|e| CliError::input(format!("cannot write csv `{path}`: {e}")))?;
    }
    let doc = envelope(
        "estimate",
        &config.canonical_json(),
        seed,
        report.document(),
    );
    emit(&doc, config.outputs.report.as_deref())?;
    Ok(0)
}

#[derive(Serialize)]
struct CheckLine {
    name: String,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct VerifyReport {
    suite: String,
    pass: bool,
    checks: Vec<CheckLine>,
}

pub fn verify(args: &VerifyArgs) -> Result<i32, CliError> {
    let checks = match args.suite.as_str() {
        "orthogonal-array" => verify_orthogonal_array(args)?,
        "intersection-matrix" => verify_intersection_matrix(args)?,
        "schur-chain" => verify_schur_chain(args)?,
        "rank-condition" => verify_rank_condition(args)?,
        "symmetries" => verify_symmetries(args)?,
        other => {
            return Err(CliError::input(format!(
                "unknown suite `{other}` (orthogonal-array | intersection-matrix | schur-chain | \
                 rank-condition | symmetries)"
            )))
        }
    };
    let pass = checks.iter().all(|c| c.pass);
    let report = VerifyReport {
        suite: args.suite.clone(),
        pass,
        checks,
    };
    emit(&report, None)?;
    Ok(if pass { 0 } else { 1 })
}

fn load_catalog(args: &VerifyArgs) -> Result<Code, CliError> {
    codes::catalog(&args.code, args.param).map_err(CliError::from_core)
}

fn verify_orthogonal_array(args: &VerifyArgs) -> Result<Vec<CheckLine>, CliError> {
    let code = load_catalog(args)?;
    let dim = code.ambient_dim();
    let mut checks = Vec::new();
    let mut supports: Vec<Vec<usize>> = Vec::new();
    for size in 0..=args.max_size.min(dim) {
        codes::for_each_combination(dim, size, |combo| supports.push(combo.to_vec()));
    }
    let mut balanced = 0usize;
    let mut skipped = 0usize;
    for positions in &supports {
        // Candidates are generated on the barred side directly.
        if !code.check().columns_independent(positions) {
            skipped += 1;
            continue;
        }
        let barred = BitVec::from_indices(dim, positions);
        let gamma = code.shape().bar(&barred);
        let ok = orthogonal_array_check(&code, &code.shape().bar(&gamma))
            .map_err(CliError::from_core)?;
        if !ok {
            checks.push(CheckLine {
                name: format!("pattern-balance {positions:?}"),
                pass: false,
                detail: "unbalanced restriction".into(),
            });
        }
        balanced += 1;
    }
    checks.push(CheckLine {
        name: "pattern-balance".into(),
        pass: checks.is_empty(),
        detail: format!(
            "{balanced} detectable supports balanced, {skipped} undetectable skipped (size <= {})",
            args.max_size
        ),
    });
    Ok(checks)
}

fn verify_intersection_matrix(args: &VerifyArgs) -> Result<Vec<CheckLine>, CliError> {
    use num::Signed;
    let im = intersection_matrix(args.n, args.t).map_err(CliError::from_core)?;
    let minors = leading_principal_minors(&im.matrix);
    let all_positive = minors.len() == im.labels.len() && minors.iter().all(|m| m.is_positive());
    Ok(vec![CheckLine {
        name: "leading-minors-positive".into(),
        pass: all_positive,
        detail: format!(
            "dimension {}, {} minors computed",
            im.labels.len(),
            minors.len()
        ),
    }])
}

fn verify_schur_chain(args: &VerifyArgs) -> Result<Vec<CheckLine>, CliError> {
    let im = intersection_matrix(args.n, args.t).map_err(CliError::from_core)?;
    let chain = schur_chain(&im).map_err(CliError::from_core)?;
    let mut mismatches = 0usize;
    let mut entries = 0usize;
    for (i, matrix) in chain.iter().enumerate() {
        let offset = im.labels.len() - matrix.rows();
        let labels = &im.labels[offset..];
        for (r, a) in labels.iter().enumerate() {
            for (c, b) in labels.iter().enumerate() {
                entries += 1;
                if matrix.get(r, c) != &chain_entry_closed_form(args.n, i, a, b) {
                    mismatches += 1;
                }
            }
        }
    }
    Ok(vec![CheckLine {
        name: "closed-form-entries".into(),
        pass: mismatches == 0,
        detail: format!("{entries} entries compared, {mismatches} mismatches"),
    }])
}

fn verify_rank_condition(args: &VerifyArgs) -> Result<Vec<CheckLine>, CliError> {
    use synmom::gf2::BitMatrix;
    // Deterministic xorshift so the suite needs no extra dependencies.
    let mut state = args.seed | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut counterexamples = 0usize;
    let mut identifiable = 0usize;
    for _ in 0..args.count {
        let n = 3 + (next() % 6) as usize;
        let rows = 1 + (next() % n as u64) as usize;
        let mut h = BitMatrix::zeros(rows, n);
        for i in 0..rows {
            for j in 0..n {
                h.set(i, j, next() & 1 == 1);
            }
        }
        let code = Code::classical(h);
        let count = 1 + (next() % 3) as usize;
        let supports: Vec<BitVec> = (0..count)
            .map(|_| {
                let size = 1 + (next() % 3.min(n as u64)) as usize;
                let mut idx = Vec::new();
                while idx.len() < size {
                    let c = (next() % n as u64) as usize;
                    if !idx.contains(&c) {
                        idx.push(c);
                    }
                }
                BitVec::from_indices(n, &idx)
            })
            .collect();
        let labels = gamma_hat(&supports);
        let ms =
            build_coefficient_matrix(&code, &labels, RowSource::FullGroup, LabelOrder::SizeLex)
                .map_err(CliError::from_core)?;
        let cert = certify_full_rank(&ms);
        let condition = check_identifiability(&code, &supports).identifiable;
        let equivalent = check_equivalent_condition(&code, &supports);
        if cert.full_rank != condition || condition != equivalent {
            counterexamples += 1;
        }
        identifiable += usize::from(condition);
    }
    Ok(vec![CheckLine {
        name: "rank-equals-union-condition".into(),
        pass: counterexamples == 0,
        detail: format!(
            "{} instances, {identifiable} identifiable, {counterexamples} counterexamples",
            args.count
        ),
    }])
}

fn verify_symmetries(args: &VerifyArgs) -> Result<Vec<CheckLine>, CliError> {
    let code = load_catalog(args)?;
    let shape = code.shape();
    let supports =
        synmom::noise::make_weight_t_supports(shape, 1, synmom::noise::SupportMetric::Pauli);
    let barred: Vec<BitVec> = supports.iter().map(|s| shape.bar(s)).collect();
    let labels = gamma_hat(&barred);
    let ms = build_coefficient_matrix(&code, &labels, RowSource::FullGroup, LabelOrder::SizeLex)
        .map_err(CliError::from_core)?;
    let basis = sign_symmetries(&ms);
    let mut violations = 0usize;
    for eps in &basis {
        for row in ms.d().row_iter() {
            if row.dot(eps) {
                violations += 1;
            }
        }
    }
    Ok(vec![CheckLine {
        name: "sign-symmetry-basis".into(),
        pass: violations == 0,
        detail: format!(
            "basis dimension {}, {violations} parity violations across {} rows",
            basis.len(),
            ms.rows()
        ),
    }])
}
