//! Exact linear algebra over the two-element field.
//!
//! [`BitVec`] and [`BitMatrix`] are dense, bit-packed (64 bits per word)
//! and immutable in spirit: every reduction works on a copy and all
//! arithmetic is exact, so rank decisions never depend on floating point.
//! Row reduction always picks the leftmost pivot in the topmost row, which
//! makes span and nullspace output reproducible across runs.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Default cap on span enumeration: at most `2^SPAN_CAP_LOG2` elements.
pub const SPAN_CAP_LOG2: u32 = 24;

/// A vector over GF(2), packed into 64-bit words (bit `i` lives in word
/// `i / 64` at position `i % 64`). Bits past `len` are kept zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    /// The zero vector of a given length.
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// Builds a vector with ones exactly at `indices` (0-based).
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in indices {
            v.set(i, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range (len={})", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range (len={})", self.len);
        if value {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range (len={})", self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Resets every bit to zero without reallocating.
    pub fn clear_all(&mut self) {
        self.words.fill(0);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Component-wise addition modulo 2.
    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(
            self.len, other.len,
            "xor of lengths {} and {}",
            self.len, other.len
        );
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Component-wise or: the union of the indicator sets.
    pub fn or_assign(&mut self, other: &Self) {
        assert_eq!(
            self.len, other.len,
            "or of lengths {} and {}",
            self.len, other.len
        );
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Dot product modulo 2.
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(
            self.len, other.len,
            "dot of lengths {} and {}",
            self.len, other.len
        );
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    /// True iff every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        assert_eq!(
            self.len, other.len,
            "subset test of lengths {} and {}",
            self.len, other.len
        );
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Size of the intersection of the two indicator sets.
    pub fn intersection_weight(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Indices of set bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.ones().collect()
    }

    /// Iterates over indices of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(move |(wi, &word)| {
            let base = wi * 64;
            std::iter::successors(if word == 0 { None } else { Some(word) }, |w| {
                let next = w & (w - 1);
                if next == 0 {
                    None
                } else {
                    Some(next)
                }
            })
            .map(move |w| base + w.trailing_zeros() as usize)
        })
    }

    /// The bits at `positions`, collected into a new vector in order.
    pub fn restrict(&self, positions: &[usize]) -> BitVec {
        let mut out = BitVec::zeros(positions.len());
        for (k, &p) in positions.iter().enumerate() {
            if self.get(p) {
                out.set(k, true);
            }
        }
        out
    }

    /// The bits at `positions` packed into a `u64` (position `k` becomes
    /// bit `k`). At most 64 positions.
    pub fn pattern(&self, positions: &[usize]) -> u64 {
        debug_assert!(positions.len() <= 64);
        let mut out = 0u64;
        for (k, &p) in positions.iter().enumerate() {
            out |= u64::from(self.get(p)) << k;
        }
        out
    }

    /// Low 64 bits as an integer mask (valid when `len <= 64`).
    pub fn as_u64(&self) -> u64 {
        debug_assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }
}

impl Ord for BitVec {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for BitVec {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl FromStr for BitVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut v = BitVec::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => return Err(Error::Parse(format!("invalid bit character `{c}`"))),
            }
        }
        Ok(v)
    }
}

/// A dense matrix over GF(2), stored as bit-packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<BitVec>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows: vec![BitVec::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        m
    }

    /// Builds a matrix from rows of equal length.
    pub fn from_rows(rows: Vec<BitVec>, cols: usize) -> Result<Self> {
        for r in &rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "matrix row",
                    expected: cols,
                    actual: r.len(),
                });
            }
        }
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &BitVec> {
        self.rows.iter()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value);
    }

    /// Matrix-vector product `m * v` over GF(2).
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix-vector product",
                expected: self.cols,
                actual: v.len(),
            });
        }
        let mut out = BitVec::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(v) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.ones() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// Horizontal concatenation `[self | right]`.
    pub fn hstack(&self, right: &BitMatrix) -> Result<BitMatrix> {
        if self.rows() != right.rows() {
            return Err(Error::DimensionMismatch {
                context: "hstack",
                expected: self.rows(),
                actual: right.rows(),
            });
        }
        let cols = self.cols + right.cols;
        let rows = self
            .rows
            .iter()
            .zip(&right.rows)
            .map(|(a, b)| {
                let mut r = BitVec::zeros(cols);
                for j in a.ones() {
                    r.set(j, true);
                }
                for j in b.ones() {
                    r.set(self.cols + j, true);
                }
                r
            })
            .collect();
        Ok(BitMatrix { rows, cols })
    }

    /// The submatrix keeping only `positions` columns, in order.
    pub fn restrict_columns(&self, positions: &[usize]) -> BitMatrix {
        BitMatrix {
            rows: self.rows.iter().map(|r| r.restrict(positions)).collect(),
            cols: positions.len(),
        }
    }

    /// Reduced row echelon form together with the pivot column indices.
    /// Pivoting is deterministic: leftmost column first, topmost row.
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.cols {
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(r, p);
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        (
            BitMatrix {
                rows,
                cols: self.cols,
            },
            pivots,
        )
    }

    /// Dimension of the row space.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of `{ v : m v = 0 }`, one vector per free column, ordered
    /// by free-column index. Basis size is `cols - rank`.
    pub fn nullspace(&self) -> Vec<BitVec> {
        let (rref, pivots) = self.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = BitVec::zeros(self.cols);
            v.set(free, true);
            for (i, &pc) in pivots.iter().enumerate() {
                if rref.rows[i].get(free) {
                    v.set(pc, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// True iff the columns at `positions` are linearly independent.
    /// The empty set is independent.
    pub fn columns_independent(&self, positions: &[usize]) -> bool {
        if positions.is_empty() {
            return true;
        }
        self.restrict_columns(positions).rank() == positions.len()
    }

    /// Indices of a maximal set of linearly independent rows, chosen
    /// greedily in row order.
    pub fn independent_rows(&self) -> Vec<usize> {
        let mut basis: Vec<BitVec> = Vec::new();
        let mut indices = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let mut v = row.clone();
            reduce_against(&mut v, &basis);
            if !v.is_zero() {
                basis.push(v);
                indices.push(i);
            }
        }
        indices
    }

    /// True iff `v` lies in the row space.
    pub fn in_row_span(&self, v: &BitVec) -> bool {
        let mut basis: Vec<BitVec> = Vec::new();
        for row in &self.rows {
            let mut r = row.clone();
            reduce_against(&mut r, &basis);
            if !r.is_zero() {
                basis.push(r);
            }
        }
        let mut w = v.clone();
        reduce_against(&mut w, &basis);
        w.is_zero()
    }

    /// Enumerates all `2^rank` distinct row-space elements (including
    /// zero). Elements are ordered lexicographically by the coefficient
    /// vector over the greedily chosen independent rows, first row most
    /// significant. Errors out when the span would exceed `2^cap` elements.
    pub fn row_span(&self, cap: u32) -> Result<Vec<BitVec>> {
        let gens: Vec<&BitVec> = self
            .independent_rows()
            .into_iter()
            .map(|i| &self.rows[i])
            .collect();
        let rank = gens.len();
        if rank as u32 > cap {
            return Err(Error::SpanTooLarge { rank, cap });
        }
        let mut out = Vec::with_capacity(1 << rank);
        for k in 0u64..(1 << rank) {
            let mut v = BitVec::zeros(self.cols);
            for (j, g) in gens.iter().enumerate() {
                if (k >> (rank - 1 - j)) & 1 == 1 {
                    v.xor_assign(g);
                }
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Parses the plain text format: a `rows cols` header line, then one
    /// line of `0`/`1` characters per row.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let mut parts = header.split_whitespace();
        let rows: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad matrix header `{header}`")))?;
        let cols: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad matrix header `{header}`")))?;
        let mut out = Vec::with_capacity(rows);
        for _ in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("matrix text ended early".into()))?;
            let row: BitVec = line.trim().parse()?;
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "matrix text row",
                    expected: cols,
                    actual: row.len(),
                });
            }
            out.push(row);
        }
        Ok(Self { rows: out, cols })
    }

    /// Writes the plain text format accepted by [`BitMatrix::from_text`].
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows(), self.cols);
        for row in &self.rows {
            s.push_str(&row.to_string());
            s.push('\n');
        }
        s
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows(), self.cols)?;
        for row in &self.rows {
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

/// Reduces `v` against a greedily built basis, in insertion order.
/// Each basis vector's leading bit is unique and absent from earlier
/// vectors, so one left-to-right pass clears every basis lead from `v`;
/// a vector of the span reduces to zero.
fn reduce_against(v: &mut BitVec, basis: &[BitVec]) {
    for b in basis {
        let lead = b.ones().next().expect("basis vectors are nonzero");
        if v.get(lead) {
            v.xor_assign(b);
        }
    }
}
