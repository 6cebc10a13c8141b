//! Estimation pipeline: measured moments, the log-domain solve of the
//! binomial moment system, and reconstruction of standard moments,
//! marginals, and per-qubit Pauli rates.
//!
//! With full column rank the system is linear in the log domain, so the
//! natural method-of-moments estimator is least squares on `D x = ln E`
//! through the normal equations with the exact integer Gram matrix. Only
//! the all-positive solution branch is returned; the other discrete
//! solutions differ by the sign symmetries and are reported through
//! [`crate::identify::sign_symmetries`], never enumerated.

use serde::Serialize;

use crate::codes::Code;
use crate::fourier::{
    inverse_fourier_transform, moebius_inverse_restricted, DenseFunction, MomentTable,
};
use crate::gf2::BitVec;
use crate::identify::{
    build_coefficient_matrix, certify_full_rank, check_identifiability, gram_matrix, LabelOrder,
    MomentSystem, RowSource,
};
use crate::noise::{SampleBatch, SupportModel};
use crate::{Error, Result};

/// Row weighting for the least-squares solve.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum WeightMode {
    /// Plain normal equations (default).
    #[default]
    Unweighted,
    /// Rows weighted by `K / (1 - E^2)`, a variance heuristic for
    /// sampled moments. Provided as an option; no optimality claimed.
    InverseVariance,
}

/// Options for [`run_estimation`].
#[derive(Clone, Debug)]
pub struct EstimationOptions {
    pub weight_mode: WeightMode,
    /// Clamp non-positive empirical moments to `10 / shots` instead of
    /// failing. Off by default: a non-positive moment usually means too
    /// few shots or a violated positivity assumption, and clamping
    /// silently would hide that.
    pub clamp_nonpositive: bool,
    /// Skip the identifiability gate (a warning is recorded).
    pub skip_identifiability_check: bool,
    /// Largest group log-size for which all rows are used; beyond it a
    /// certified row subset is selected.
    pub max_full_group_log2: usize,
}

impl Default for EstimationOptions {
    fn default() -> Self {
        Self {
            weight_mode: WeightMode::Unweighted,
            clamp_nonpositive: false,
            skip_identifiability_check: false,
            max_full_group_log2: 20,
        }
    }
}

/// Where the measured moments come from.
#[derive(Clone, Copy, Debug)]
pub enum MomentSource<'a> {
    /// Analytic moments of the model itself (oracle runs).
    ExactOracle,
    /// Empirical moments from a syndrome batch.
    Batch(&'a SampleBatch),
}

/// Empirical moments `(1/K) sum_k (-1)^(zeta . sigma_k)`, one per
/// coefficient vector.
pub fn empirical_moments(batch: &SampleBatch, coeffs: &[BitVec]) -> Vec<f64> {
    coeffs
        .iter()
        .map(|zeta| batch.sign_sum(zeta) as f64 / batch.shots() as f64)
        .collect()
}

/// Empirical moments keyed by the stabilizer row labels.
pub fn empirical_moment_table(batch: &SampleBatch, ms: &MomentSystem) -> MomentTable {
    let values = empirical_moments(batch, ms.row_coeffs());
    let mut table = MomentTable::new();
    for (label, value) in ms.row_labels().iter().zip(values) {
        table.insert(label.clone(), value);
    }
    table
}

/// Solves the binomial system in the log domain: given per-row moments,
/// returns the transformed moments `F(b) = exp(x_b)` from the least
/// squares solution of `D x = ln E`, together with the residual norm
/// `|D x - ln E|_2`.
pub fn solve_binomial_system(
    ms: &MomentSystem,
    moments: &[f64],
    weight_mode: WeightMode,
    shots_hint: Option<u64>,
) -> Result<(MomentTable, f64)> {
    if moments.len() != ms.rows() {
        return Err(Error::DimensionMismatch {
            context: "moment vector",
            expected: ms.rows(),
            actual: moments.len(),
        });
    }
    let bad: Vec<String> = ms
        .row_labels()
        .iter()
        .zip(moments)
        .filter(|(_, &m)| m <= 0.0)
        .map(|(label, _)| {
            format!(
                "{:?}",
                label.support().iter().map(|i| i + 1).collect::<Vec<_>>()
            )
        })
        .collect();
    if !bad.is_empty() {
        return Err(Error::NonPositiveMoment { labels: bad });
    }

    let cols = ms.cols();
    let y: Vec<f64> = moments.iter().map(|&m| m.ln()).collect();
    let weights: Vec<f64> = match weight_mode {
        WeightMode::Unweighted => vec![1.0; ms.rows()],
        WeightMode::InverseVariance => {
            let k = shots_hint.unwrap_or(1) as f64;
            moments
                .iter()
                .map(|&m| k / (1.0 - m * m).max(1e-12))
                .collect()
        }
    };

    // Normal equations. Unweighted uses the exact integer Gram matrix.
    let mut a = vec![vec![0.0f64; cols]; cols];
    let mut b = vec![0.0f64; cols];
    match weight_mode {
        WeightMode::Unweighted => {
            for (i, row) in gram_matrix(ms).into_iter().enumerate() {
                for (j, v) in row.into_iter().enumerate() {
                    a[i][j] = v as f64;
                }
            }
            for (r, row) in ms.d().row_iter().enumerate() {
                for j in row.ones() {
                    b[j] += y[r];
                }
            }
        }
        WeightMode::InverseVariance => {
            for (r, row) in ms.d().row_iter().enumerate() {
                let w = weights[r];
                let set = row.support();
                for &i in &set {
                    b[i] += w * y[r];
                    for &j in &set {
                        a[i][j] += w;
                    }
                }
            }
        }
    }

    let x = solve_symmetric(&mut a, &mut b).ok_or(Error::RankDeficient { rank: 0, cols })?;

    let mut residual = 0.0;
    for (r, row) in ms.d().row_iter().enumerate() {
        let fit: f64 = row.ones().map(|j| x[j]).sum();
        residual += (fit - y[r]) * (fit - y[r]);
    }

    let mut table = MomentTable::new();
    for (label, &xi) in ms.col_labels().iter().zip(&x) {
        table.insert(label.clone(), xi.exp());
    }
    Ok((table, residual.sqrt()))
}

/// In-place LDL^T solve of a symmetric positive-definite system.
/// Returns None when a pivot collapses, i.e. the system is rank
/// deficient.
fn solve_symmetric(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let scale: f64 = (0..n).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    for col in 0..n {
        let pivot = a[col][col];
        if pivot.abs() <= 1e-12 * scale.max(1.0) {
            return None;
        }
        for i in (col + 1)..n {
            let factor = a[i][col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[i][j] -= factor * a[col][j];
            }
            b[i] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in (i + 1)..n {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    Some(x)
}

/// Standard moment at `a` reconstructed from transformed moments:
/// the product of stored `F(b)` over `b` inside `a`. Labels absent from
/// the table carry `F = 1` by the support-closure reduction.
pub fn reconstruct_moments(f_table: &MomentTable, a: &BitVec) -> f64 {
    moebius_inverse_restricted(f_table, a)
}

/// Inverts the three single-qubit moment relations into rates
/// `(p_I, p_X, p_Z, p_Y)`. The rates sum to one exactly.
pub fn pauli_rates_from_moments(e_x: f64, e_z: f64, e_y: f64) -> [f64; 4] {
    let p_x = (1.0 + e_x - e_z - e_y) / 4.0;
    let p_z = (1.0 - e_x + e_z - e_y) / 4.0;
    let p_y = (1.0 - e_x - e_z + e_y) / 4.0;
    let p_i = 1.0 - p_x - p_z - p_y;
    [p_i, p_x, p_z, p_y]
}

/// Marginal of the total distribution on `gamma`, reconstructed from
/// the moment table: the inverse transform of `a -> E(bar(a))` over the
/// subsets of `gamma`. Note this is the marginal of the *total* noise,
/// not of an individual channel, when supports overlap.
pub fn reconstruct_marginal(
    e_table: &MomentTable,
    shape: crate::pauli::PhaseShape,
    gamma: &BitVec,
) -> Result<DenseFunction> {
    let positions = gamma.support();
    let k = positions.len();
    if k > crate::fourier::DENSE_CAP_BITS {
        return Err(Error::DomainTooLarge {
            bits: k,
            cap: crate::fourier::DENSE_CAP_BITS,
        });
    }
    let mut transform = DenseFunction::zeros(k)?;
    for local in 0..(1usize << k) {
        let idx: Vec<usize> = positions
            .iter()
            .enumerate()
            .filter(|(bit, _)| (local >> bit) & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        let a = BitVec::from_indices(gamma.len(), &idx);
        let value = if a.is_zero() {
            1.0
        } else {
            let barred = shape.bar(&a);
            e_table.get(&barred).ok_or_else(|| Error::MissingMoment {
                label: format!(
                    "{:?}",
                    barred.support().iter().map(|i| i + 1).collect::<Vec<_>>()
                ),
            })?
        };
        transform.set_value(local, value);
    }
    Ok(inverse_fourier_transform(&transform))
}

/// One reconstructed per-qubit rate quadruple.
#[derive(Clone, Debug, Serialize)]
pub struct QubitRates {
    pub qubit: usize,
    pub p_i: f64,
    pub p_x: f64,
    pub p_z: f64,
    pub p_y: f64,
}

/// Full output of an estimation run.
#[derive(Clone, Debug)]
pub struct EstimationReport {
    /// Transformed moments over the (barred) closure labels.
    pub f_hat: MomentTable,
    /// Standard moments over the same labels.
    pub e_hat: MomentTable,
    /// Marginal of the total distribution on each channel support.
    pub marginals: Vec<(BitVec, DenseFunction)>,
    /// Per-qubit rates, when single-qubit supports are present.
    pub pauli_rates: Vec<QubitRates>,
    pub residual_norm: f64,
    pub rows_used: usize,
    pub shots: u64,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
pub struct MomentRecord {
    pub subset: Vec<usize>,
    pub value: f64,
}

#[derive(Serialize)]
pub struct MarginalRecord {
    pub support: Vec<usize>,
    pub dist: Vec<f64>,
}

/// The report with the stable external field names.
#[derive(Serialize)]
pub struct ReportDocument {
    pub f_moments: Vec<MomentRecord>,
    pub e_moments: Vec<MomentRecord>,
    pub marginals: Vec<MarginalRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pauli_rates: Option<Vec<QubitRates>>,
    pub residual: f64,
    pub rows_used: usize,
    pub shots: u64,
    pub warnings: Vec<String>,
}

impl EstimationReport {
    fn table_records(table: &MomentTable) -> Vec<MomentRecord> {
        table
            .sorted_labels()
            .into_iter()
            .map(|label| MomentRecord {
                subset: label.support().iter().map(|i| i + 1).collect(),
                value: table.get(&label).expect("label from table"),
            })
            .collect()
    }

    /// The serializable document with the stable field names.
    pub fn document(&self) -> ReportDocument {
        ReportDocument {
            f_moments: Self::table_records(&self.f_hat),
            e_moments: Self::table_records(&self.e_hat),
            marginals: self
                .marginals
                .iter()
                .map(|(support, dist)| MarginalRecord {
                    support: support.support().iter().map(|i| i + 1).collect(),
                    dist: dist.values().to_vec(),
                })
                .collect(),
            pauli_rates: if self.pauli_rates.is_empty() {
                None
            } else {
                Some(self.pauli_rates.clone())
            },
            residual: self.residual_norm,
            rows_used: self.rows_used,
            shots: self.shots,
            warnings: self.warnings.clone(),
        }
    }

    /// CSV table of the per-qubit rates.
    pub fn rates_csv(&self) -> String {
        let mut out = String::from("qubit,p_i,p_x,p_z,p_y\n");
        for r in &self.pauli_rates {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.qubit, r.p_i, r.p_x, r.p_z, r.p_y
            ));
        }
        out
    }
}

/// Runs the full pipeline: identifiability gate, coefficient matrix,
/// moments from the chosen source, solve, and reconstruction.
pub fn run_estimation(
    code: &Code,
    model: &SupportModel,
    source: MomentSource,
    options: &EstimationOptions,
) -> Result<EstimationReport> {
    let mut warnings = Vec::new();
    let supports = model.supports();

    if options.skip_identifiability_check {
        warnings.push("identifiability check skipped by request".into());
    } else {
        let verdict = check_identifiability(code, &supports);
        if !verdict.identifiable {
            let w = verdict.witness.expect("failed verdict carries a witness");
            return Err(Error::NotIdentifiable(format!(
                "supports {:?} and {:?} jointly cover the undetectable error {:?}",
                w.support_a, w.support_b, w.error
            )));
        }
    }
    if !model.positivity_ok() {
        warnings.push(
            "a channel has P(0) <= 0.5; moments may be non-positive and the estimate non-unique"
                .into(),
        );
    }

    let labels = model.barred_gamma_hat();
    let (ms, full_rank) = certified_system(code, &labels, options.max_full_group_log2)?;
    if !full_rank {
        let cert = certify_full_rank(&ms);
        return Err(Error::RankDeficient {
            rank: cert.rank,
            cols: cert.cols,
        });
    }

    let (mut moments, shots) = match source {
        MomentSource::ExactOracle => (
            ms.row_labels()
                .iter()
                .map(|s| model.exact_moment(s, true))
                .collect::<Vec<f64>>(),
            0u64,
        ),
        MomentSource::Batch(batch) => {
            if batch.syndrome_bits() != code.check().rows() {
                return Err(Error::DimensionMismatch {
                    context: "batch syndrome length",
                    expected: code.check().rows(),
                    actual: batch.syndrome_bits(),
                });
            }
            (empirical_moments(batch, ms.row_coeffs()), batch.shots())
        }
    };

    if options.clamp_nonpositive && shots > 0 {
        let floor = 10.0 / shots as f64;
        let mut clamped = 0usize;
        for m in &mut moments {
            if *m <= 0.0 {
                *m = floor;
                clamped += 1;
            }
        }
        if clamped > 0 {
            warnings.push(format!(
                "{clamped} non-positive empirical moments clamped to {floor:e}; \
                 estimates on those rows are unreliable"
            ));
        }
    }

    let (f_hat, residual_norm) =
        solve_binomial_system(&ms, &moments, options.weight_mode, Some(shots.max(1)))?;

    let mut e_hat = MomentTable::new();
    for label in ms.col_labels() {
        e_hat.insert(label.clone(), reconstruct_moments(&f_hat, label));
    }

    let shape = model.shape();
    let mut marginals = Vec::new();
    for gamma in &supports {
        let mut q = reconstruct_marginal(&e_hat, shape, gamma)?;
        let total: f64 = q.values().iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            warnings.push(format!(
                "marginal on {:?} renormalized (mass {total})",
                gamma.support().iter().map(|i| i + 1).collect::<Vec<_>>()
            ));
            q.normalize();
        }
        marginals.push((gamma.clone(), q));
    }

    let mut pauli_rates = Vec::new();
    for q in 0..shape.qubits {
        let x_label = BitVec::from_indices(shape.dim(), &[shape.x_bit(q)]);
        let z_label = BitVec::from_indices(shape.dim(), &[shape.z_bit(q)]);
        let y_label = BitVec::from_indices(shape.dim(), &[shape.x_bit(q), shape.z_bit(q)]);
        let (Some(ex), Some(ez), Some(ey)) = (
            e_hat.get(&x_label),
            e_hat.get(&z_label),
            e_hat.get(&y_label),
        ) else {
            continue;
        };
        let [p_i, p_x, p_z, p_y] = pauli_rates_from_moments(ex, ez, ey);
        if [p_i, p_x, p_z, p_y].iter().any(|&p| p < -1e-9) {
            warnings.push(format!("infeasible rate estimate on qubit {}", q + 1));
        }
        pauli_rates.push(QubitRates {
            qubit: q + 1,
            p_i,
            p_x,
            p_z,
            p_y,
        });
    }

    Ok(EstimationReport {
        f_hat,
        e_hat,
        marginals,
        pauli_rates,
        residual_norm,
        rows_used: ms.rows(),
        shots,
        warnings,
    })
}

/// Fixed stream seed for the row-subset selection, so reports stay
/// reproducible without any configuration.
const ROW_SELECTION_SEED: u64 = 0x524f_5753;

/// Builds the moment system with all group rows while the group is
/// small. Beyond `max_log2`, rows are the generators plus uniformly
/// random group elements (deterministic seed), doubled until the exact
/// rank certificate passes or the sample stops growing the rank.
fn certified_system(
    code: &Code,
    labels: &[BitVec],
    max_log2: usize,
) -> Result<(MomentSystem, bool)> {
    let independent = code.check().independent_rows();
    let rank = independent.len();
    if rank <= max_log2 {
        let ms = build_coefficient_matrix(code, labels, RowSource::FullGroup, LabelOrder::SizeLex)?;
        let cert = certify_full_rank(&ms);
        return Ok((ms, cert.full_rank));
    }

    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(ROW_SELECTION_SEED);
    let coeff_len = code.check().rows();
    let mut coeffs: Vec<BitVec> = independent
        .iter()
        .map(|&i| BitVec::from_indices(coeff_len, &[i]))
        .collect();
    let mut target = (4 * labels.len()).max(coeffs.len());
    let mut last_rank = 0;
    loop {
        while coeffs.len() < target {
            let mut zeta = BitVec::zeros(coeff_len);
            for &i in &independent {
                if rng.random_bool(0.5) {
                    zeta.set(i, true);
                }
            }
            if !zeta.is_zero() {
                coeffs.push(zeta);
            }
        }
        let ms = build_coefficient_matrix(
            code,
            labels,
            RowSource::Subset(coeffs.clone()),
            LabelOrder::SizeLex,
        )?;
        let cert = certify_full_rank(&ms);
        if cert.full_rank || cert.rank == last_rank {
            return Ok((ms, cert.full_rank));
        }
        last_rank = cert.rank;
        target *= 2;
    }
}
