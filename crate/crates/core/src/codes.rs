//! Classical, stabilizer, and quantum data-syndrome codes.
//!
//! All three kinds share one interface: a check matrix acting on a phase
//! space (classical codes sit in the degenerate `qubits = 0` corner, so
//! the bar operation is the identity there and every downstream module
//! handles the three kinds through the same code path). The syndrome of
//! an error `e` is `check * bar(e)`; for a data-syndrome check
//! `[F | I_m]` this is the ideal syndrome plus the measurement flips.
//!
//! Distances are found by exhaustive search in order of increasing Pauli
//! weight with an explicit cap, so a truncated search is reported as a
//! lower bound rather than a wrong number.

use std::sync::OnceLock;

use crate::gf2::{BitMatrix, BitVec, SPAN_CAP_LOG2};
use crate::pauli::{PhaseShape, PhaseVector};
use crate::{Error, Result};

/// Work budget for one distance search (number of candidate errors).
const SEARCH_BUDGET: u128 = 200_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CodeKind {
    Classical,
    Stabilizer,
    DataSyndrome,
}

impl CodeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CodeKind::Classical => "classical",
            CodeKind::Stabilizer => "stabilizer",
            CodeKind::DataSyndrome => "data_syndrome",
        }
    }
}

/// Result of a capped distance search.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Distance {
    Exact(usize),
    /// No qualifying error up to the cap; the true value is larger.
    ExceedsCap(usize),
}

impl Distance {
    pub fn exact(&self) -> Option<usize> {
        match self {
            Distance::Exact(d) => Some(*d),
            Distance::ExceedsCap(_) => None,
        }
    }
}

impl std::fmt::Display for Distance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Distance::Exact(d) => write!(f, "{d}"),
            Distance::ExceedsCap(cap) => write!(f, ">{cap}"),
        }
    }
}

/// A code of any of the three kinds, immutable after construction.
#[derive(Debug)]
pub struct Code {
    kind: CodeKind,
    shape: PhaseShape,
    check: BitMatrix,
    span_cache: OnceLock<Vec<BitVec>>,
}

impl Clone for Code {
    fn clone(&self) -> Self {
        Self {
            kind: self.kind,
            shape: self.shape,
            check: self.check.clone(),
            span_cache: OnceLock::new(),
        }
    }
}

impl Code {
    /// A classical code from its parity check matrix.
    pub fn classical(check: BitMatrix) -> Self {
        Self {
            kind: CodeKind::Classical,
            shape: PhaseShape::new(0, check.cols()),
            check,
            span_cache: OnceLock::new(),
        }
    }

    /// A stabilizer code from generator rows in phase space (2n columns).
    /// Generators must pairwise commute.
    pub fn stabilizer(generators: BitMatrix) -> Result<Self> {
        if !generators.cols().is_multiple_of(2) {
            return Err(Error::Parse(
                "stabilizer generator matrix must have an even number of columns".into(),
            ));
        }
        let shape = PhaseShape::new(generators.cols() / 2, 0);
        for i in 0..generators.rows() {
            for j in (i + 1)..generators.rows() {
                if shape.symplectic(generators.row(i), generators.row(j)) {
                    return Err(Error::Parse(format!("generators {i} and {j} anti-commute")));
                }
            }
        }
        Ok(Self {
            kind: CodeKind::Stabilizer,
            shape,
            check: generators,
            span_cache: OnceLock::new(),
        })
    }

    /// A stabilizer code from Pauli strings.
    pub fn stabilizer_from_paulis(strings: &[&str]) -> Result<Self> {
        let vecs: Vec<PhaseVector> = strings
            .iter()
            .map(|s| PhaseVector::parse(s))
            .collect::<Result<_>>()?;
        let Some(first) = vecs.first() else {
            return Err(Error::Parse("no generators given".into()));
        };
        let dim = first.shape().dim();
        let rows = vecs
            .into_iter()
            .map(|v| {
                let bits = v.into_bits();
                if bits.len() != dim {
                    Err(Error::DimensionMismatch {
                        context: "generator",
                        expected: dim,
                        actual: bits.len(),
                    })
                } else {
                    Ok(bits)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::stabilizer(BitMatrix::from_rows(rows, dim)?)
    }

    /// A data-syndrome code from an explicit check matrix `[F | I_m]` on
    /// `n` qubits and `m` measurement bits.
    pub fn data_syndrome(check: BitMatrix, qubits: usize) -> Result<Self> {
        let m = check.rows();
        if check.cols() != 2 * qubits + m {
            return Err(Error::DimensionMismatch {
                context: "data-syndrome check",
                expected: 2 * qubits + m,
                actual: check.cols(),
            });
        }
        for i in 0..m {
            for j in 0..m {
                if check.get(i, 2 * qubits + j) != (i == j) {
                    return Err(Error::Parse(
                        "data-syndrome check must end in an identity block".into(),
                    ));
                }
            }
        }
        let shape = PhaseShape::new(qubits, m);
        let data_cols: Vec<usize> = (0..2 * qubits).collect();
        let data = check.restrict_columns(&data_cols);
        let data_shape = PhaseShape::new(qubits, 0);
        for i in 0..m {
            for j in (i + 1)..m {
                if data_shape.symplectic(data.row(i), data.row(j)) {
                    return Err(Error::Parse(format!(
                        "measured stabilizers {i} and {j} anti-commute"
                    )));
                }
            }
        }
        Ok(Self {
            kind: CodeKind::DataSyndrome,
            shape,
            check,
            span_cache: OnceLock::new(),
        })
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn shape(&self) -> PhaseShape {
        self.shape
    }

    /// Number of data bits (classical) or qubits (quantum).
    pub fn block_size(&self) -> usize {
        match self.kind {
            CodeKind::Classical => self.shape.meas,
            _ => self.shape.qubits,
        }
    }

    /// Number of measurement bits (`0` unless data-syndrome).
    pub fn meas_bits(&self) -> usize {
        match self.kind {
            CodeKind::Classical => 0,
            _ => self.shape.meas,
        }
    }

    /// Ambient phase-space dimension.
    pub fn ambient_dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn check(&self) -> &BitMatrix {
        &self.check
    }

    pub fn generator_count(&self) -> usize {
        self.check.rows()
    }

    pub fn group_rank(&self) -> usize {
        self.check.rank()
    }

    pub fn group_size(&self) -> u64 {
        1u64 << self.group_rank()
    }

    /// Syndrome of an error vector: `check * bar(e)`.
    pub fn syndrome(&self, e: &BitVec) -> Result<BitVec> {
        if e.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                context: "syndrome",
                expected: self.ambient_dim(),
                actual: e.len(),
            });
        }
        self.check.mul_vec(&self.shape.bar(e))
    }

    /// All elements of the measured group (row span of the check matrix),
    /// cached after the first call.
    pub fn stabilizer_span(&self) -> Result<&[BitVec]> {
        if let Some(span) = self.span_cache.get() {
            return Ok(span);
        }
        let span = self.check.row_span(SPAN_CAP_LOG2)?;
        Ok(self.span_cache.get_or_init(|| span))
    }

    /// True iff every nonzero error supported inside `gamma` has a
    /// nonzero syndrome. Implemented as a column-independence test on the
    /// bar image of `gamma`.
    pub fn is_detectable_support(&self, gamma: &BitVec) -> bool {
        debug_assert_eq!(gamma.len(), self.ambient_dim());
        let barred = self.shape.bar(gamma);
        self.check.columns_independent(&barred.support())
    }

    /// Basis rows spanning the exclusion set of the distance search:
    /// pure-stabilizer errors `(h, 0)`.
    fn distance_exclusion_rows(&self) -> Vec<BitVec> {
        match self.kind {
            CodeKind::Classical => Vec::new(),
            CodeKind::Stabilizer => self.check.row_iter().cloned().collect(),
            CodeKind::DataSyndrome => {
                let data_cols: Vec<usize> = (0..2 * self.shape.qubits).collect();
                let data = self.check.restrict_columns(&data_cols);
                data.row_iter()
                    .map(|r| {
                        let mut v = BitVec::zeros(self.ambient_dim());
                        for i in r.ones() {
                            v.set(i, true);
                        }
                        v
                    })
                    .collect()
            }
        }
    }

    /// Smallest Pauli weight of an undetectable error outside the
    /// pure-stabilizer set, searching weights `1..=max_weight`.
    pub fn distance(&self, max_weight: usize) -> Result<Distance> {
        self.search_distance(max_weight, true)
    }

    /// Smallest Pauli weight of any nonzero undetectable error.
    pub fn pure_distance(&self, max_weight: usize) -> Result<Distance> {
        self.search_distance(max_weight, false)
    }

    fn search_distance(&self, max_weight: usize, exclude_stabilizers: bool) -> Result<Distance> {
        assert!(max_weight >= 1, "max_weight must be at least 1");
        let n = self.shape.qubits;
        let m = self.shape.meas;
        let mut budget: u128 = 0;
        for w in 1..=max_weight {
            for k in w.saturating_sub(m)..=w.min(n) {
                budget += binomial(n, k) * 3u128.pow(k as u32) * binomial(m, w - k);
            }
            if budget > SEARCH_BUDGET {
                return Err(Error::WeightCapExceeded { cap: w });
            }
        }

        let exclusion = if exclude_stabilizers {
            let mut basis: Vec<BitVec> = Vec::new();
            for row in self.distance_exclusion_rows() {
                let mut v = row;
                reduce_vec(&mut v, &basis);
                if !v.is_zero() {
                    basis.push(v);
                }
            }
            basis
        } else {
            Vec::new()
        };

        let barred_rows: Vec<BitVec> = self.check.row_iter().map(|r| self.shape.bar(r)).collect();

        let is_undetectable = |e: &BitVec| barred_rows.iter().all(|r| !r.dot(e));
        let excluded = |e: &BitVec| {
            if !exclude_stabilizers {
                return false;
            }
            let mut v = e.clone();
            reduce_vec(&mut v, &exclusion);
            v.is_zero()
        };

        for w in 1..=max_weight {
            let mut found = false;
            self.for_each_weight(w, |e| {
                if !found && is_undetectable(e) && !excluded(e) {
                    found = true;
                }
            });
            if found {
                return Ok(Distance::Exact(w));
            }
        }
        Ok(Distance::ExceedsCap(max_weight))
    }

    /// Calls `f` with every error of Pauli weight exactly `w`, in a
    /// deterministic order.
    fn for_each_weight(&self, w: usize, mut f: impl FnMut(&BitVec)) {
        let n = self.shape.qubits;
        let m = self.shape.meas;
        let dim = self.ambient_dim();
        for k in w.saturating_sub(m)..=w.min(n) {
            let meas_w = w - k;
            for_each_combination(n, k, |qubits| {
                let mut letters = vec![0u8; k];
                loop {
                    let mut e = BitVec::zeros(dim);
                    for (idx, &q) in qubits.iter().enumerate() {
                        match letters[idx] {
                            0 => e.set(q, true),
                            1 => e.set(n + q, true),
                            _ => {
                                e.set(q, true);
                                e.set(n + q, true);
                            }
                        }
                    }
                    for_each_combination(m, meas_w, |meas| {
                        let mut e = e.clone();
                        for &b in meas {
                            e.set(2 * n + b, true);
                        }
                        f(&e);
                    });
                    // Next base-3 letter assignment.
                    let mut carry = true;
                    for digit in letters.iter_mut() {
                        if *digit == 2 {
                            *digit = 0;
                        } else {
                            *digit += 1;
                            carry = false;
                            break;
                        }
                    }
                    if carry {
                        break;
                    }
                }
            });
        }
    }

    /// Parses the code file format: a `kind n m` header, then either a
    /// check matrix in the plain matrix text format, or (stabilizer kind
    /// only) a list of Pauli strings, one per line.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty code file".into()))?;
        let mut parts = header.split_whitespace();
        let kind = parts
            .next()
            .ok_or_else(|| Error::Parse("missing code kind".into()))?;
        let n: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad code header `{header}`")))?;
        let m: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad code header `{header}`")))?;
        let body: Vec<&str> = lines.collect();
        match kind {
            "classical" => {
                let matrix = BitMatrix::from_text(&body.join("\n"))?;
                if matrix.cols() != n {
                    return Err(Error::DimensionMismatch {
                        context: "classical check",
                        expected: n,
                        actual: matrix.cols(),
                    });
                }
                Ok(Self::classical(matrix))
            }
            "stabilizer" => {
                let first = body
                    .first()
                    .ok_or_else(|| Error::Parse("stabilizer code without generators".into()))?;
                if first
                    .trim()
                    .chars()
                    .all(|c| c.is_ascii_digit() || c.is_whitespace())
                {
                    let matrix = BitMatrix::from_text(&body.join("\n"))?;
                    if matrix.cols() != 2 * n {
                        return Err(Error::DimensionMismatch {
                            context: "stabilizer check",
                            expected: 2 * n,
                            actual: matrix.cols(),
                        });
                    }
                    return Self::stabilizer(matrix);
                }
                let strings: Vec<&str> = body.iter().map(|s| s.trim()).collect();
                let code = Self::stabilizer_from_paulis(&strings)?;
                if code.shape.qubits != n {
                    return Err(Error::DimensionMismatch {
                        context: "stabilizer generators",
                        expected: n,
                        actual: code.shape.qubits,
                    });
                }
                Ok(code)
            }
            "data_syndrome" => {
                let matrix = BitMatrix::from_text(&body.join("\n"))?;
                if matrix.rows() != m {
                    return Err(Error::DimensionMismatch {
                        context: "data-syndrome rows",
                        expected: m,
                        actual: matrix.rows(),
                    });
                }
                Self::data_syndrome(matrix, n)
            }
            other => Err(Error::Parse(format!("unknown code kind `{other}`"))),
        }
    }

    /// Writes the file format accepted by [`Code::from_text`].
    pub fn to_text(&self) -> String {
        format!(
            "{} {} {}\n{}",
            self.kind.as_str(),
            self.block_size(),
            self.meas_bits(),
            self.check.to_text()
        )
    }
}

/// Extends a stabilizer code to a data-syndrome code. The classical
/// measurement code has generator matrix `[I_l | A]`, so the first `l`
/// measured stabilizers are the generators themselves and each extra
/// column of `A` appends the corresponding combination of generators.
pub fn build_data_syndrome(base: &Code, a: &BitMatrix) -> Result<Code> {
    if base.kind() != CodeKind::Stabilizer {
        return Err(Error::Parse(
            "data-syndrome base must be a stabilizer code".into(),
        ));
    }
    let l = base.generator_count();
    if a.rows() != l {
        return Err(Error::DimensionMismatch {
            context: "measurement code matrix",
            expected: l,
            actual: a.rows(),
        });
    }
    let m = l + a.cols();
    let n = base.shape().qubits;
    let mut f_rows: Vec<BitVec> = base.check().row_iter().cloned().collect();
    for col in 0..a.cols() {
        let mut row = BitVec::zeros(2 * n);
        for j in 0..l {
            if a.get(j, col) {
                row.xor_assign(base.check().row(j));
            }
        }
        f_rows.push(row);
    }
    let f = BitMatrix::from_rows(f_rows, 2 * n)?;
    let check = f.hstack(&BitMatrix::identity(m))?;
    Code::data_syndrome(check, n)
}

/// Binomial coefficient as u128 (no overflow at desk scale).
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    for i in 0..k {
        num = num * (n - i) as u128 / (i + 1) as u128;
    }
    num
}

/// Visits all size-`k` subsets of `0..n` in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // Advance to the next combination.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn reduce_vec(v: &mut BitVec, basis: &[BitVec]) {
    for b in basis {
        let lead = b.ones().next().expect("basis vectors are nonzero");
        if v.get(lead) {
            v.xor_assign(b);
        }
    }
}

// ---------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------

/// The `n`-bit repetition code: checks on adjacent bit pairs.
pub fn repetition(n: usize) -> Result<Code> {
    if n < 2 {
        return Err(Error::Parse("repetition code needs n >= 2".into()));
    }
    let rows = (0..n - 1)
        .map(|i| BitVec::from_indices(n, &[i, i + 1]))
        .collect();
    Ok(Code::classical(BitMatrix::from_rows(rows, n)?))
}

/// The `[7,4]` Hamming code; column `j` of the check matrix is the binary
/// expansion of `j+1`.
pub fn hamming74() -> Code {
    let mut check = BitMatrix::zeros(3, 7);
    for j in 0..7usize {
        for bit in 0..3 {
            if ((j + 1) >> bit) & 1 == 1 {
                check.set(bit, j, true);
            }
        }
    }
    Code::classical(check)
}

/// Generators of the five-qubit code, in the fixed cyclic convention.
pub const FIVE_QUBIT_GENERATORS: [&str; 4] = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"];

/// The `[[5,1,3]]` five-qubit code.
pub fn five_qubit() -> Code {
    Code::stabilizer_from_paulis(&FIVE_QUBIT_GENERATORS).expect("catalog code is valid")
}

/// The `[[7,1,3]]` Steane code: Hamming checks as X-type and Z-type
/// generators.
pub fn steane() -> Code {
    let hamming = ["IIIXXXX", "IXXIIXX", "XIXIXIX"];
    let mut gens: Vec<String> = hamming.iter().map(|s| s.to_string()).collect();
    gens.extend(hamming.iter().map(|s| s.replace('X', "Z")));
    let refs: Vec<&str> = gens.iter().map(|s| s.as_str()).collect();
    Code::stabilizer_from_paulis(&refs).expect("catalog code is valid")
}

/// The toric code on an `L x L` periodic lattice: X stars on vertices and
/// Z plaquettes on faces, dropping one redundant generator of each type.
/// `n = 2 L^2` qubits and `2 L^2 - 2` independent generators.
pub fn toric(l: usize) -> Result<Code> {
    if l < 2 {
        return Err(Error::Parse("toric code needs L >= 2".into()));
    }
    let n = 2 * l * l;
    let h_edge = |r: usize, c: usize| (r % l) * l + (c % l);
    let v_edge = |r: usize, c: usize| l * l + (r % l) * l + (c % l);
    let mut rows = Vec::new();
    for r in 0..l {
        for c in 0..l {
            if r == l - 1 && c == l - 1 {
                continue;
            }
            // X star at vertex (r, c).
            let mut star = BitVec::zeros(2 * n);
            for e in [
                h_edge(r, c),
                h_edge(r, c + l - 1),
                v_edge(r, c),
                v_edge(r + l - 1, c),
            ] {
                star.set(e, true);
            }
            rows.push(star);
        }
    }
    for r in 0..l {
        for c in 0..l {
            if r == l - 1 && c == l - 1 {
                continue;
            }
            // Z plaquette at face (r, c).
            let mut plaq = BitVec::zeros(2 * n);
            for e in [
                h_edge(r, c),
                h_edge(r + 1, c),
                v_edge(r, c),
                v_edge(r, c + 1),
            ] {
                plaq.set(n + e, true);
            }
            rows.push(plaq);
        }
    }
    Code::stabilizer(BitMatrix::from_rows(rows, 2 * n)?)
}

/// Looks up a catalog code by name. `repetition` takes `n`, `toric`
/// takes `L`; the other names take no parameter.
pub fn catalog(name: &str, param: Option<usize>) -> Result<Code> {
    match name {
        "repetition" => repetition(
            param
                .ok_or_else(|| Error::Parse("repetition requires a block size parameter".into()))?,
        ),
        "hamming74" => Ok(hamming74()),
        "five_qubit" => Ok(five_qubit()),
        "steane" => Ok(steane()),
        "toric" => toric(
            param.ok_or_else(|| Error::Parse("toric requires a lattice size parameter".into()))?,
        ),
        other => Err(Error::UnknownCode(other.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn syndrome_of_zero_is_zero() {
        for code in [five_qubit(), hamming74(), repetition(3).unwrap()] {
            let zero = BitVec::zeros(code.ambient_dim());
            assert!(code.syndrome(&zero).unwrap().is_zero());
        }
    }

    #[test]
    fn stabilizer_elements_have_zero_syndrome() {
        let code = five_qubit();
        for s in code.stabilizer_span().unwrap() {
            assert!(code.syndrome(s).unwrap().is_zero());
        }
    }

    #[test]
    fn syndrome_of_single_x_error() {
        let code = five_qubit();
        let e = crate::pauli::encode_pauli("XIIII", code.shape()).unwrap();
        let syn = code.syndrome(&e).unwrap();
        // Expected bits: commutation of X_1 with each generator.
        let shape = code.shape();
        for (i, gen) in FIVE_QUBIT_GENERATORS.iter().enumerate() {
            let g = crate::pauli::encode_pauli(gen, shape).unwrap();
            assert_eq!(syn.get(i), shape.symplectic(&g, &e), "generator {i}");
        }
        assert!(!syn.is_zero());
    }

    #[test]
    fn syndrome_is_linear() {
        let code = five_qubit();
        let dim = code.ambient_dim();
        for a in 0u32..(1 << 6) {
            for b in 0u32..(1 << 6) {
                let e1 = BitVec::from_indices(
                    dim,
                    &(0..6).filter(|&i| (a >> i) & 1 == 1).collect::<Vec<_>>(),
                );
                let e2 = BitVec::from_indices(
                    dim,
                    &(0..6).filter(|&i| (b >> i) & 1 == 1).collect::<Vec<_>>(),
                );
                let lhs = code.syndrome(&e1.xor(&e2)).unwrap();
                let rhs = code
                    .syndrome(&e1)
                    .unwrap()
                    .xor(&code.syndrome(&e2).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn five_qubit_distances() {
        let code = five_qubit();
        assert_eq!(code.distance(6).unwrap(), Distance::Exact(3));
        assert_eq!(code.pure_distance(6).unwrap(), Distance::Exact(3));
    }

    #[test]
    fn repetition_distance() {
        let code = repetition(3).unwrap();
        assert_eq!(code.distance(6).unwrap(), Distance::Exact(3));
        assert_eq!(code.pure_distance(6).unwrap(), Distance::Exact(3));
    }

    #[test]
    fn hamming_distance() {
        let code = hamming74();
        assert_eq!(code.distance(6).unwrap(), Distance::Exact(3));
    }

    #[test]
    fn steane_distances() {
        let code = steane();
        assert_eq!(code.distance(6).unwrap(), Distance::Exact(3));
        // Weight-4 stabilizers beat the weight-3 logicals? No: the pure
        // distance counts logicals too, so it stays 3.
        assert_eq!(code.pure_distance(6).unwrap(), Distance::Exact(3));
    }

    #[test]
    fn toric_three_distances() {
        let code = toric(3).unwrap();
        assert_eq!(code.block_size(), 18);
        assert_eq!(code.generator_count(), 16);
        assert_eq!(code.group_rank(), 16);
        // Non-contractible loops of length L are undetectable and act on
        // the logical space.
        assert_eq!(code.distance(4).unwrap(), Distance::Exact(3));
        assert_eq!(code.pure_distance(4).unwrap(), Distance::Exact(3));
    }

    #[test]
    fn toric_four_pure_distance_is_four() {
        let code = toric(4).unwrap();
        assert_eq!(code.pure_distance(4).unwrap(), Distance::Exact(4));
    }

    #[test]
    fn distance_cap_reports_lower_bound() {
        let code = five_qubit();
        assert_eq!(code.distance(2).unwrap(), Distance::ExceedsCap(2));
    }

    #[test]
    fn pure_distance_never_exceeds_distance() {
        for code in [
            five_qubit(),
            steane(),
            toric(3).unwrap(),
            hamming74(),
            repetition(4).unwrap(),
        ] {
            let d = code.distance(4).unwrap();
            let dp = code.pure_distance(4).unwrap();
            if let (Some(d), Some(dp)) = (d.exact(), dp.exact()) {
                assert!(dp <= d, "{d} < {dp}");
            }
        }
    }

    #[test]
    fn detectable_support_examples() {
        let code = five_qubit();
        let dim = code.ambient_dim();
        assert!(code.is_detectable_support(&BitVec::zeros(dim)));
        // The support of a generator is not detectable: the generator
        // itself is an undetectable error.
        let g = crate::pauli::encode_pauli("XZZXI", code.shape()).unwrap();
        assert!(!code.is_detectable_support(&g));
        // Both bits of qubits 1 and 2: all sub-errors have Pauli weight
        // at most 2, below the pure distance.
        let gamma = BitVec::from_indices(dim, &[0, 1, 5, 6]);
        assert!(code.is_detectable_support(&gamma));
    }

    #[test]
    fn detectable_support_matches_bruteforce() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(5);
        for code in [five_qubit(), hamming74(), repetition(3).unwrap()] {
            let dim = code.ambient_dim();
            for _ in 0..50 {
                let size = rng.random_range(0..=dim.min(5));
                let mut idx: Vec<usize> = (0..dim).collect();
                for i in (1..idx.len()).rev() {
                    let j = rng.random_range(0..=i);
                    idx.swap(i, j);
                }
                idx.truncate(size);
                let gamma = BitVec::from_indices(dim, &idx);
                let mut brute = true;
                let support = gamma.support();
                for mask in 1u32..(1 << support.len()) {
                    let mut e = BitVec::zeros(dim);
                    for (k, &c) in support.iter().enumerate() {
                        if (mask >> k) & 1 == 1 {
                            e.set(c, true);
                        }
                    }
                    if code.syndrome(&e).unwrap().is_zero() {
                        brute = false;
                        break;
                    }
                }
                assert_eq!(code.is_detectable_support(&gamma), brute);
            }
        }
    }

    #[test]
    fn detectable_set_downward_closed() {
        let code = five_qubit();
        let dim = code.ambient_dim();
        let gamma = BitVec::from_indices(dim, &[0, 1, 5, 6]);
        assert!(code.is_detectable_support(&gamma));
        let support = gamma.support();
        for mask in 0u32..(1 << support.len()) {
            let sub: Vec<usize> = support
                .iter()
                .enumerate()
                .filter(|(k, _)| (mask >> k) & 1 == 1)
                .map(|(_, &c)| c)
                .collect();
            assert!(code.is_detectable_support(&BitVec::from_indices(dim, &sub)));
        }
    }

    #[test]
    fn build_data_syndrome_trivial_measurement_code() {
        let base = five_qubit();
        let ds = build_data_syndrome(&base, &BitMatrix::zeros(4, 0)).unwrap();
        assert_eq!(ds.meas_bits(), 4);
        assert_eq!(ds.kind(), CodeKind::DataSyndrome);
        // f_i = g_i for i <= l.
        for i in 0..4 {
            let data: Vec<usize> = (0..10).collect();
            assert_eq!(ds.check().row(i).restrict(&data), *base.check().row(i));
        }
    }

    #[test]
    fn build_data_syndrome_parity_column() {
        let base = five_qubit();
        let ones = BitMatrix::from_rows(
            vec![
                "1".parse().unwrap(),
                "1".parse().unwrap(),
                "1".parse().unwrap(),
                "1".parse().unwrap(),
            ],
            1,
        )
        .unwrap();
        let ds = build_data_syndrome(&base, &ones).unwrap();
        assert_eq!(ds.meas_bits(), 5);
        let data: Vec<usize> = (0..10).collect();
        let mut sum = BitVec::zeros(10);
        for i in 0..4 {
            sum.xor_assign(base.check().row(i));
        }
        assert_eq!(ds.check().row(4).restrict(&data), sum);
    }

    #[test]
    fn data_syndrome_pure_distance_is_min_rule() {
        let base = five_qubit();
        // One parity measurement appended: every single error flips at
        // least two measurement outcomes.
        let ones = BitMatrix::from_rows(
            vec![
                "1".parse().unwrap(),
                "1".parse().unwrap(),
                "1".parse().unwrap(),
                "1".parse().unwrap(),
            ],
            1,
        )
        .unwrap();
        let ds = build_data_syndrome(&base, &ones).unwrap();
        let d = ds.distance(4).unwrap().exact().unwrap();
        let dp_base = base.pure_distance(4).unwrap().exact().unwrap();
        let dp_ds = ds.pure_distance(4).unwrap().exact().unwrap();
        assert_eq!(dp_ds, d.min(dp_base));
    }

    #[test]
    fn catalog_lookup() {
        assert!(catalog("five_qubit", None).is_ok());
        assert!(catalog("toric", Some(3)).is_ok());
        assert!(catalog("repetition", Some(3)).is_ok());
        assert!(matches!(catalog("nope", None), Err(Error::UnknownCode(_))));
        assert!(catalog("repetition", None).is_err());
    }

    #[test]
    fn catalog_generators_are_independent() {
        for code in [
            five_qubit(),
            steane(),
            toric(3).unwrap(),
            hamming74(),
            repetition(5).unwrap(),
        ] {
            assert_eq!(code.group_rank(), code.generator_count());
        }
    }

    #[test]
    fn repetition_check_matrix() {
        let code = repetition(3).unwrap();
        assert_eq!(code.check().to_text(), "2 3\n110\n011\n");
    }

    #[test]
    fn code_file_round_trip() {
        let code = five_qubit();
        let text = code.to_text();
        let back = Code::from_text(&text).unwrap();
        assert_eq!(back.check(), code.check());
        assert_eq!(back.kind(), CodeKind::Stabilizer);

        let pauli_text = "stabilizer 5 0\nXZZXI\nIXZZX\nXIXZZ\nZXIXZ\n";
        let from_paulis = Code::from_text(pauli_text).unwrap();
        assert_eq!(from_paulis.check(), code.check());

        let rep = repetition(3).unwrap();
        let back = Code::from_text(&rep.to_text()).unwrap();
        assert_eq!(back.check(), rep.check());
        assert_eq!(back.kind(), CodeKind::Classical);

        let ds = build_data_syndrome(&code, &BitMatrix::zeros(4, 0)).unwrap();
        let back = Code::from_text(&ds.to_text()).unwrap();
        assert_eq!(back.check(), ds.check());
        assert_eq!(back.kind(), CodeKind::DataSyndrome);
    }

    #[test]
    fn anticommuting_generators_rejected() {
        assert!(Code::stabilizer_from_paulis(&["XI", "ZI"]).is_err());
    }

    #[test]
    fn combinations_enumerate_lexicographically() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| seen.push(c.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        let mut count = 0;
        for_each_combination(5, 0, |c| {
            assert!(c.is_empty());
            count += 1;
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(8, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(18, 3), 816);
    }
}
