//! Channel-support noise models, exact oracles, and syndrome sampling.
//!
//! A [`SupportModel`] is a family of coordinate subsets of the phase
//! space, each carrying an independent error distribution supported on
//! that subset. The total error is the sum of independent draws, so the
//! total distribution is the Boolean convolution of the channels.
//! Everything downstream consumes the model through three routes that
//! deliberately stay independent of each other: the dense total
//! distribution (brute force), analytic per-channel moments, and the
//! Monte-Carlo sampler.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::{for_each_combination, Code};
use crate::fourier::{convolve, for_each_subset, sort_size_lex, DenseFunction};
use crate::gf2::BitVec;
use crate::pauli::PhaseShape;
use crate::{Error, Result};

/// Cap on the ambient dimension for dense total-distribution work.
pub const TOTAL_DIST_CAP_BITS: usize = 20;

/// Shots per deterministic sampling shard. Each shard draws from its own
/// ChaCha stream (stream id = shard index over a fixed seed), so sharded
/// and parallel runs produce bit-identical batches.
const SHARD_SHOTS: u64 = 8192;

/// Metric used when generating weight-`t` support families.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportMetric {
    /// Plain coordinate subsets of size `t`.
    Hamming,
    /// Maximal supports of Pauli weight `t`: both phase-space bits of
    /// each chosen qubit, plus chosen measurement bits.
    Pauli,
}

/// All maximal supports of weight `t` under the chosen metric.
pub fn make_weight_t_supports(shape: PhaseShape, t: usize, metric: SupportMetric) -> Vec<BitVec> {
    assert!(t >= 1, "support weight must be at least 1");
    let dim = shape.dim();
    let mut out = Vec::new();
    match metric {
        SupportMetric::Hamming => {
            for_each_combination(dim, t, |idx| {
                out.push(BitVec::from_indices(dim, idx));
            });
        }
        SupportMetric::Pauli => {
            let n = shape.qubits;
            let m = shape.meas;
            for k in t.saturating_sub(m)..=t.min(n) {
                for_each_combination(n, k, |qubits| {
                    let mut base = BitVec::zeros(dim);
                    for &q in qubits {
                        base.set(shape.x_bit(q), true);
                        base.set(shape.z_bit(q), true);
                    }
                    for_each_combination(m, t - k, |meas| {
                        let mut s = base.clone();
                        for &b in meas {
                            s.set(shape.meas_bit(b), true);
                        }
                        out.push(s);
                    });
                });
            }
            sort_size_lex(&mut out);
        }
    }
    out
}

/// The closure of a support family: every nonempty subset of a member,
/// deduplicated, ordered by (size, lexicographic).
pub fn gamma_hat(supports: &[BitVec]) -> Vec<BitVec> {
    let mut set = BTreeSet::new();
    for gamma in supports {
        for_each_subset(gamma, |b| {
            if !b.is_zero() {
                set.insert(b.clone());
            }
        });
    }
    let mut labels: Vec<BitVec> = set.into_iter().collect();
    sort_size_lex(&mut labels);
    labels
}

/// One independent error channel on a coordinate subset.
#[derive(Clone, Debug)]
pub struct Channel {
    /// Support as an indicator vector over the ambient space.
    pub support: BitVec,
    /// Ascending coordinate indices of the support.
    positions: Vec<usize>,
    /// Distribution over `F_2^|support|`; local bit `k` is coordinate
    /// `positions[k]`.
    pub dist: DenseFunction,
}

/// A family of independent channels over one phase space.
#[derive(Clone, Debug)]
pub struct SupportModel {
    shape: PhaseShape,
    channels: Vec<Channel>,
}

impl SupportModel {
    pub fn new(shape: PhaseShape) -> Self {
        Self {
            shape,
            channels: Vec::new(),
        }
    }

    pub fn shape(&self) -> PhaseShape {
        self.shape
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn supports(&self) -> Vec<BitVec> {
        self.channels.iter().map(|c| c.support.clone()).collect()
    }

    /// Adds a channel with an explicit local distribution.
    pub fn add_channel(&mut self, support: BitVec, dist: DenseFunction) -> Result<()> {
        if support.len() != self.shape.dim() {
            return Err(Error::DimensionMismatch {
                context: "channel support",
                expected: self.shape.dim(),
                actual: support.len(),
            });
        }
        let positions = support.support();
        if dist.domain_bits() != positions.len() {
            return Err(Error::DimensionMismatch {
                context: "channel distribution",
                expected: positions.len(),
                actual: dist.domain_bits(),
            });
        }
        if !dist.is_distribution(1e-12) {
            return Err(Error::InvalidModel(
                "channel values must be a normalized distribution".into(),
            ));
        }
        self.channels.push(Channel {
            support,
            positions,
            dist,
        });
        Ok(())
    }

    /// Adds a single-qubit Pauli channel with rates `(p_I, p_X, p_Z, p_Y)`.
    pub fn add_pauli_channel(&mut self, qubit: usize, rates: [f64; 4]) -> Result<()> {
        if qubit >= self.shape.qubits {
            return Err(Error::InvalidModel(format!(
                "qubit {qubit} out of range (n = {})",
                self.shape.qubits
            )));
        }
        let support = BitVec::from_indices(
            self.shape.dim(),
            &[self.shape.x_bit(qubit), self.shape.z_bit(qubit)],
        );
        // Local bit 0 is the x bit, bit 1 the z bit: I, X, Z, Y in order.
        let dist = DenseFunction::from_values(2, rates.to_vec())?;
        self.add_channel(support, dist)
    }

    /// Adds an independent flip channel on one measurement bit.
    pub fn add_flip_channel(&mut self, meas_bit: usize, flip: f64) -> Result<()> {
        if meas_bit >= self.shape.meas {
            return Err(Error::InvalidModel(format!(
                "measurement bit {meas_bit} out of range (m = {})",
                self.shape.meas
            )));
        }
        let support = BitVec::from_indices(self.shape.dim(), &[self.shape.meas_bit(meas_bit)]);
        let dist = DenseFunction::from_values(1, vec![1.0 - flip, flip])?;
        self.add_channel(support, dist)
    }

    /// True iff every channel satisfies the positivity condition
    /// `P(0) > 0.5`, under which all moments are positive and the
    /// estimate is unique.
    pub fn positivity_ok(&self) -> bool {
        self.channels.iter().all(|c| c.dist.value(0) > 0.5)
    }

    /// Support family with the bar map applied to each member.
    pub fn barred_supports(&self) -> Vec<BitVec> {
        self.channels
            .iter()
            .map(|c| self.shape.bar(&c.support))
            .collect()
    }

    /// Closure of the barred support family: the labels carrying
    /// non-trivial transformed moments.
    pub fn barred_gamma_hat(&self) -> Vec<BitVec> {
        gamma_hat(&self.barred_supports())
    }

    /// The channel distribution embedded into the full space.
    fn embedded(&self, idx: usize) -> Result<DenseFunction> {
        let ch = &self.channels[idx];
        let mut out = DenseFunction::zeros(self.shape.dim())?;
        for lp in 0..ch.dist.values().len() {
            let mut point = 0usize;
            for (k, &pos) in ch.positions.iter().enumerate() {
                if (lp >> k) & 1 == 1 {
                    point |= 1 << pos;
                }
            }
            out.set_value(point, ch.dist.value(lp));
        }
        Ok(out)
    }

    /// Boolean convolution of all channels: the distribution of the
    /// total error. Dense in the ambient dimension, hence capped.
    pub fn total_distribution(&self) -> Result<DenseFunction> {
        let dim = self.shape.dim();
        if dim > TOTAL_DIST_CAP_BITS {
            return Err(Error::DomainTooLarge {
                bits: dim,
                cap: TOTAL_DIST_CAP_BITS,
            });
        }
        let mut total = DenseFunction::point_mass(dim)?;
        for idx in 0..self.channels.len() {
            total = convolve(&total, &self.embedded(idx)?)?;
        }
        Ok(total)
    }

    /// Pushforward of the total distribution through the syndrome map.
    /// Keys are syndrome vectors; values sum to one.
    pub fn exact_syndrome_statistics(
        &self,
        code: &Code,
    ) -> Result<std::collections::BTreeMap<BitVec, f64>> {
        let total = self.total_distribution()?;
        let rows = code.check().rows();
        let barred_rows: Vec<u64> = (0..rows)
            .map(|i| self.shape.bar(code.check().row(i)).as_u64())
            .collect();
        let mut out = std::collections::BTreeMap::new();
        for (e, &p) in total.values().iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut syn = BitVec::zeros(rows);
            for (i, &mask) in barred_rows.iter().enumerate() {
                if (mask & e as u64).count_ones() & 1 == 1 {
                    syn.set(i, true);
                }
            }
            *out.entry(syn).or_insert(0.0) += p;
        }
        Ok(out)
    }

    /// Analytic moment of the total distribution at label `s`, computed
    /// as the product of per-channel moments. Scales with the number of
    /// channels rather than the ambient dimension. With `twist` set the
    /// observable pairing is symplectic.
    pub fn exact_moment(&self, s: &BitVec, twist: bool) -> f64 {
        let mask = if twist { self.shape.bar(s) } else { s.clone() };
        let mut out = 1.0;
        for ch in &self.channels {
            let local = mask.pattern(&ch.positions);
            if local == 0 {
                continue;
            }
            let mut acc = 0.0;
            for (lp, &v) in ch.dist.values().iter().enumerate() {
                if (lp as u64 & local).count_ones() & 1 == 0 {
                    acc += v;
                } else {
                    acc -= v;
                }
            }
            out *= acc;
        }
        out
    }

    /// Draws `shots` independent error/syndrome rounds. Reproducible:
    /// the batch is a pure function of `(seed, shots, model, code)`, and
    /// sharding makes the result independent of thread count.
    pub fn sample(&self, code: &Code, shots: u64, seed: u64) -> Result<SampleBatch> {
        let dim = self.shape.dim();
        if code.ambient_dim() != dim {
            return Err(Error::DimensionMismatch {
                context: "sampling code",
                expected: dim,
                actual: code.ambient_dim(),
            });
        }
        let rows = code.check().rows();
        let barred_rows: Vec<BitVec> = (0..rows)
            .map(|i| self.shape.bar(code.check().row(i)))
            .collect();
        let cdfs: Vec<Vec<f64>> = self
            .channels
            .iter()
            .map(|c| {
                let mut acc = 0.0;
                c.dist
                    .values()
                    .iter()
                    .map(|&v| {
                        acc += v;
                        acc
                    })
                    .collect()
            })
            .collect();

        let words_per = rows.div_ceil(64).max(1);
        let shards = shots.div_ceil(SHARD_SHOTS);
        let chunks: Vec<Vec<u64>> = (0..shards)
            .into_par_iter()
            .map(|shard| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(shard);
                let count = SHARD_SHOTS.min(shots - shard * SHARD_SHOTS);
                let mut out = Vec::with_capacity(count as usize * words_per);
                let mut error = BitVec::zeros(dim);
                for _ in 0..count {
                    error.clear_all();
                    for (ch, cdf) in self.channels.iter().zip(&cdfs) {
                        let u: f64 = rng.random();
                        let lp = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                        for (k, &pos) in ch.positions.iter().enumerate() {
                            if (lp >> k) & 1 == 1 {
                                error.flip(pos);
                            }
                        }
                    }
                    let mut words = vec![0u64; words_per];
                    for (i, row) in barred_rows.iter().enumerate() {
                        if row.dot(&error) {
                            words[i / 64] |= 1 << (i % 64);
                        }
                    }
                    out.extend_from_slice(&words);
                }
                out
            })
            .collect();

        let mut syndromes = Vec::with_capacity(shots as usize * words_per);
        for chunk in chunks {
            syndromes.extend_from_slice(&chunk);
        }
        Ok(SampleBatch {
            syndrome_bits: rows,
            words_per,
            shots,
            seed,
            syndromes,
        })
    }
}

/// A reproducible batch of measured syndromes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleBatch {
    syndrome_bits: usize,
    words_per: usize,
    shots: u64,
    seed: u64,
    /// Packed syndrome words, `words_per` per shot.
    syndromes: Vec<u64>,
}

impl SampleBatch {
    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn syndrome_bits(&self) -> usize {
        self.syndrome_bits
    }

    /// The `k`-th syndrome as a bit vector.
    pub fn syndrome(&self, k: usize) -> BitVec {
        let base = k * self.words_per;
        let mut v = BitVec::zeros(self.syndrome_bits);
        for i in 0..self.syndrome_bits {
            if (self.syndromes[base + i / 64] >> (i % 64)) & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    /// Sum of `(-1)^(zeta . sigma_k)` over all shots, as an exact
    /// integer, so parallel accumulation cannot change the result.
    pub fn sign_sum(&self, zeta: &BitVec) -> i64 {
        assert_eq!(
            zeta.len(),
            self.syndrome_bits,
            "coefficient length mismatch"
        );
        let mut masks = vec![0u64; self.words_per];
        for i in zeta.ones() {
            masks[i / 64] |= 1 << (i % 64);
        }
        let shots = self.shots as usize;
        let words = &self.syndromes;
        let per = self.words_per;
        let negatives: i64 = (0..shots)
            .into_par_iter()
            .map(|k| {
                let mut parity = 0u32;
                for (w, &m) in masks.iter().enumerate() {
                    parity ^= (words[k * per + w] & m).count_ones();
                }
                i64::from(parity & 1)
            })
            .sum();
        self.shots as i64 - 2 * negatives
    }

    /// Histogram of syndromes.
    pub fn histogram(&self) -> std::collections::BTreeMap<BitVec, u64> {
        let mut out = std::collections::BTreeMap::new();
        for k in 0..self.shots as usize {
            *out.entry(self.syndrome(k)).or_insert(0) += 1;
        }
        out
    }
}

// ---------------------------------------------------------------------
// External model configuration
// ---------------------------------------------------------------------

/// One channel in the external model configuration. Coordinates, qubits
/// and measurement bits are 1-based in files.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelConfig {
    /// Single-qubit Pauli channel with rates `(p_I, p_X, p_Z, p_Y)`.
    Qubit { qubit: usize, rates: [f64; 4] },
    /// Independent flip on one measurement bit.
    Meas { meas_bit: usize, flip: f64 },
    /// General channel: explicit support and a dense value table over
    /// `2^|support|` outcomes.
    Table { support: Vec<usize>, dist: Vec<f64> },
}

/// External noise-model description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub channels: Vec<ChannelConfig>,
}

impl ModelConfig {
    /// Instantiates the model on a phase space.
    pub fn build(&self, shape: PhaseShape) -> Result<SupportModel> {
        let mut model = SupportModel::new(shape);
        for ch in &self.channels {
            match ch {
                ChannelConfig::Qubit { qubit, rates } => {
                    if *qubit == 0 {
                        return Err(Error::InvalidModel("qubit indices are 1-based".into()));
                    }
                    model.add_pauli_channel(qubit - 1, *rates)?;
                }
                ChannelConfig::Meas { meas_bit, flip } => {
                    if *meas_bit == 0 {
                        return Err(Error::InvalidModel(
                            "measurement bit indices are 1-based".into(),
                        ));
                    }
                    model.add_flip_channel(meas_bit - 1, *flip)?;
                }
                ChannelConfig::Table { support, dist } => {
                    if support.contains(&0) {
                        return Err(Error::InvalidModel("coordinates are 1-based".into()));
                    }
                    let idx: Vec<usize> = support.iter().map(|&i| i - 1).collect();
                    let sup = BitVec::from_indices(shape.dim(), &idx);
                    if sup.weight() != support.len() {
                        return Err(Error::InvalidModel("duplicate support coordinates".into()));
                    }
                    let bits = idx.len();
                    model.add_channel(sup, DenseFunction::from_values(bits, dist.clone())?)?;
                }
            }
        }
        Ok(model)
    }
}
