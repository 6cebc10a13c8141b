//! Boolean Fourier analysis on `F_2^k` and the Möbius transform between
//! standard and correlation moments.
//!
//! Conventions: the transform is unnormalized, `f~(s) = sum_e f(e)
//! (-1)^(s.e)`, and the inverse carries the `2^-k`. A distribution's
//! transform value at a label `a` is exactly the expectation of the
//! parity observable `a`, which is why transform values are called
//! moments throughout. In the quantum setting the observable pairing is
//! symplectic, which only re-labels the transform by the bar map; see
//! [`moment`].
//!
//! Subsets of coordinates are represented as [`BitVec`] indicator
//! vectors. Dense functions index points of `F_2^k` by integers whose
//! bit `i` is coordinate `i`.

use std::collections::BTreeMap;

use crate::gf2::BitVec;
use crate::pauli::PhaseShape;
use crate::{Error, Result};

/// Cap on dense domain size: `2^DENSE_CAP_BITS` table entries.
pub const DENSE_CAP_BITS: usize = 24;

/// Tolerance below which a moment counts as zero (singular transform).
pub const SINGULAR_TOL: f64 = 1e-12;

/// A real-valued function on `F_2^k`, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseFunction {
    domain_bits: usize,
    values: Vec<f64>,
}

impl DenseFunction {
    pub fn zeros(domain_bits: usize) -> Result<Self> {
        if domain_bits > DENSE_CAP_BITS {
            return Err(Error::DomainTooLarge {
                bits: domain_bits,
                cap: DENSE_CAP_BITS,
            });
        }
        Ok(Self {
            domain_bits,
            values: vec![0.0; 1 << domain_bits],
        })
    }

    pub fn from_values(domain_bits: usize, values: Vec<f64>) -> Result<Self> {
        if domain_bits > DENSE_CAP_BITS {
            return Err(Error::DomainTooLarge {
                bits: domain_bits,
                cap: DENSE_CAP_BITS,
            });
        }
        if values.len() != 1 << domain_bits {
            return Err(Error::DimensionMismatch {
                context: "dense function",
                expected: 1 << domain_bits,
                actual: values.len(),
            });
        }
        Ok(Self {
            domain_bits,
            values,
        })
    }

    /// The point mass at zero.
    pub fn point_mass(domain_bits: usize) -> Result<Self> {
        let mut f = Self::zeros(domain_bits)?;
        f.values[0] = 1.0;
        Ok(f)
    }

    pub fn domain_bits(&self) -> usize {
        self.domain_bits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, point: usize) -> f64 {
        self.values[point]
    }

    pub fn set_value(&mut self, point: usize, v: f64) {
        self.values[point] = v;
    }

    /// True iff non-negative and summing to one within `tol`.
    pub fn is_distribution(&self, tol: f64) -> bool {
        self.values.iter().all(|&v| v >= -tol)
            && (self.values.iter().sum::<f64>() - 1.0).abs() <= tol
    }

    /// Rescales so the values sum to one.
    pub fn normalize(&mut self) {
        let total: f64 = self.values.iter().sum();
        if total != 0.0 {
            for v in &mut self.values {
                *v /= total;
            }
        }
    }
}

/// Unnormalized Walsh transform in place: `out(s) = sum_e f(e) (-1)^(s.e)`.
fn walsh_in_place(values: &mut [f64]) {
    let n = values.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (values[i], values[i + h]);
                values[i] = a + b;
                values[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Boolean Fourier transform: `f~(s) = sum_e f(e) (-1)^(s.e)`.
pub fn fourier_transform(f: &DenseFunction) -> DenseFunction {
    let mut values = f.values.clone();
    walsh_in_place(&mut values);
    DenseFunction {
        domain_bits: f.domain_bits,
        values,
    }
}

/// Inverse transform: `f(e) = 2^-k sum_s g(s) (-1)^(s.e)`.
pub fn inverse_fourier_transform(g: &DenseFunction) -> DenseFunction {
    let mut values = g.values.clone();
    walsh_in_place(&mut values);
    let scale = 1.0 / values.len() as f64;
    for v in &mut values {
        *v *= scale;
    }
    DenseFunction {
        domain_bits: g.domain_bits,
        values,
    }
}

/// Boolean convolution `(f * g)(e) = sum_e' f(e') g(e + e')`, computed by
/// direct summation over the nonzero entries of the sparser argument, so
/// it stays an independent route from the transform-domain product.
pub fn convolve(f: &DenseFunction, g: &DenseFunction) -> Result<DenseFunction> {
    if f.domain_bits != g.domain_bits {
        return Err(Error::DimensionMismatch {
            context: "convolution",
            expected: f.domain_bits,
            actual: g.domain_bits,
        });
    }
    let (dense, sparse) = {
        let nf = f.values.iter().filter(|v| **v != 0.0).count();
        let ng = g.values.iter().filter(|v| **v != 0.0).count();
        if nf <= ng {
            (g, f)
        } else {
            (f, g)
        }
    };
    let mut out = DenseFunction::zeros(f.domain_bits)?;
    for (shift, &w) in sparse.values.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (e, &v) in dense.values.iter().enumerate() {
            out.values[e ^ shift] += w * v;
        }
    }
    Ok(out)
}

/// Converts a subset label to its integer point in the dense domain.
pub fn subset_to_point(a: &BitVec) -> usize {
    debug_assert!(a.len() <= DENSE_CAP_BITS);
    a.ones().fold(0usize, |acc, i| acc | (1 << i))
}

/// Moment of a distribution at label `a`. With `twist` unset this is the
/// plain transform value `P~(a)`; with `twist` set the observable pairing
/// is symplectic, giving `P~(bar(a))`.
pub fn moment(dist: &DenseFunction, a: &BitVec, twist: Option<PhaseShape>) -> f64 {
    let label = match twist {
        Some(shape) => shape.bar(a),
        None => a.clone(),
    };
    let mask = subset_to_point(&label);
    let mut acc = 0.0;
    for (e, &p) in dist.values.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        if (e & mask).count_ones() & 1 == 0 {
            acc += p;
        } else {
            acc -= p;
        }
    }
    acc
}

/// A sparse table of moments, keyed by subset label.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MomentTable {
    entries: BTreeMap<BitVec, f64>,
}

impl MomentTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: BitVec, value: f64) {
        self.entries.insert(label, value);
    }

    pub fn get(&self, label: &BitVec) -> Option<f64> {
        self.entries.get(label).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BitVec, f64)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    /// Labels sorted by (size, lexicographic index list).
    pub fn sorted_labels(&self) -> Vec<BitVec> {
        let mut labels: Vec<BitVec> = self.entries.keys().cloned().collect();
        sort_size_lex(&mut labels);
        labels
    }
}

/// Sorts subset labels by size, then lexicographically by index list.
pub fn sort_size_lex(labels: &mut [BitVec]) {
    labels.sort_by(|a, b| {
        a.weight()
            .cmp(&b.weight())
            .then_with(|| a.support().cmp(&b.support()))
    });
}

/// Visits every subset of `a` (including the empty set and `a` itself).
pub fn for_each_subset(a: &BitVec, mut f: impl FnMut(&BitVec)) {
    let support = a.support();
    for mask in 0u64..(1 << support.len()) {
        let idx: Vec<usize> = support
            .iter()
            .enumerate()
            .filter(|(k, _)| (mask >> k) & 1 == 1)
            .map(|(_, &i)| i)
            .collect();
        f(&BitVec::from_indices(a.len(), &idx));
    }
}

/// Inclusion-exclusion transform at `a`: `F(a) = prod_(b <= a)
/// E(b)^mu(a,b)` with `mu(a,b) = (-1)^(|a|+|b|)`. All subsets of `a` must
/// be present in the table (the empty label defaults to 1) and nonzero.
pub fn inclusion_exclusion_transform(e_table: &MomentTable, a: &BitVec) -> Result<f64> {
    let mut out = 1.0;
    let mut err = None;
    let parity_a = a.weight() & 1;
    for_each_subset(a, |b| {
        if err.is_some() {
            return;
        }
        let eb = if b.is_zero() {
            e_table.get(b).unwrap_or(1.0)
        } else {
            match e_table.get(b) {
                Some(v) => v,
                None => {
                    err = Some(Error::MissingMoment {
                        label: format!("{:?}", b.support()),
                    });
                    return;
                }
            }
        };
        if eb.abs() <= SINGULAR_TOL {
            err = Some(Error::SingularMoment {
                label: format!("{:?}", b.support()),
            });
            return;
        }
        if (b.weight() & 1) == parity_a {
            out *= eb;
        } else {
            out /= eb;
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Möbius inverse at `a`: `E(a) = prod_(b <= a) F(b)` over all nonempty
/// subsets, each of which must be present.
pub fn moebius_inverse(f_table: &MomentTable, a: &BitVec) -> Result<f64> {
    let mut out = 1.0;
    let mut err = None;
    for_each_subset(a, |b| {
        if err.is_some() || b.is_zero() {
            return;
        }
        match f_table.get(b) {
            Some(v) => out *= v,
            None => {
                err = Some(Error::MissingMoment {
                    label: format!("{:?}", b.support()),
                })
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Restricted Möbius inverse: the product of stored `F(b)` over the
/// table entries with `b <= a`. Entries outside the table are treated as
/// exactly 1, which is the content of the support-closure reduction.
pub fn moebius_inverse_restricted(f_table: &MomentTable, a: &BitVec) -> f64 {
    f_table
        .iter()
        .filter(|(b, _)| b.is_subset_of(a))
        .map(|(_, v)| v)
        .product()
}
