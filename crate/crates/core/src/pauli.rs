//! Phase-space representation of Pauli strings and measurement errors.
//!
//! An error on `n` qubits plus `m` measurement bits is a vector in
//! `F_2^(2n+m)` laid out as `(x_1..x_n, z_1..z_n, m_1..m_m)`. Per qubit,
//! `X -> (1,0)`, `Z -> (0,1)`, `Y -> (1,1)`. Phases are discarded at this
//! boundary: every quantity downstream is phase-independent, so the
//! effective Pauli group is all that is represented.
//!
//! The bit layout above is a wire-format contract; codes, noise models
//! and moment labels all index into it.

use std::fmt;

use crate::gf2::BitVec;
use crate::{Error, Result};

/// Shape of a phase space: `qubits` data qubits and `meas` measurement
/// bits, for an ambient dimension of `2*qubits + meas`.
///
/// Classical codes use `qubits = 0`, where the bar operation degenerates
/// to the identity and Pauli weight to Hamming weight.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PhaseShape {
    pub qubits: usize,
    pub meas: usize,
}

impl PhaseShape {
    pub fn new(qubits: usize, meas: usize) -> Self {
        Self { qubits, meas }
    }

    /// Ambient dimension `N = 2n + m`.
    pub fn dim(&self) -> usize {
        2 * self.qubits + self.meas
    }

    /// Swaps the X block and the Z block, fixing measurement bits.
    /// An involution.
    pub fn bar(&self, v: &BitVec) -> BitVec {
        debug_assert_eq!(v.len(), self.dim());
        let n = self.qubits;
        let mut out = BitVec::zeros(v.len());
        for i in v.ones() {
            let j = if i < n {
                i + n
            } else if i < 2 * n {
                i - n
            } else {
                i
            };
            out.set(j, true);
        }
        out
    }

    /// Symplectic product `<a, b> = bar(a) . b`: 1 iff the operators
    /// anti-commute. Symmetric and bilinear.
    pub fn symplectic(&self, a: &BitVec, b: &BitVec) -> bool {
        self.bar(a).dot(b)
    }

    /// Number of qubits acted on non-trivially, plus flipped measurement
    /// bits.
    pub fn pauli_weight(&self, v: &BitVec) -> usize {
        debug_assert_eq!(v.len(), self.dim());
        let n = self.qubits;
        let mut w = 0;
        for i in 0..n {
            if v.get(i) || v.get(i + n) {
                w += 1;
            }
        }
        for i in 2 * n..v.len() {
            if v.get(i) {
                w += 1;
            }
        }
        w
    }

    /// Index of the X bit of qubit `q` (0-based).
    pub fn x_bit(&self, q: usize) -> usize {
        debug_assert!(q < self.qubits);
        q
    }

    /// Index of the Z bit of qubit `q` (0-based).
    pub fn z_bit(&self, q: usize) -> usize {
        debug_assert!(q < self.qubits);
        self.qubits + q
    }

    /// Index of measurement bit `k` (0-based).
    pub fn meas_bit(&self, k: usize) -> usize {
        debug_assert!(k < self.meas);
        2 * self.qubits + k
    }
}

/// A phase-space vector together with its shape.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PhaseVector {
    shape: PhaseShape,
    bits: BitVec,
}

impl PhaseVector {
    pub fn new(shape: PhaseShape, bits: BitVec) -> Result<Self> {
        if bits.len() != shape.dim() {
            return Err(Error::DimensionMismatch {
                context: "phase vector",
                expected: shape.dim(),
                actual: bits.len(),
            });
        }
        Ok(Self { shape, bits })
    }

    pub fn zero(shape: PhaseShape) -> Self {
        Self {
            bits: BitVec::zeros(shape.dim()),
            shape,
        }
    }

    pub fn shape(&self) -> PhaseShape {
        self.shape
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    pub fn into_bits(self) -> BitVec {
        self.bits
    }

    pub fn bar(&self) -> PhaseVector {
        Self {
            shape: self.shape,
            bits: self.shape.bar(&self.bits),
        }
    }

    pub fn pauli_weight(&self) -> usize {
        self.shape.pauli_weight(&self.bits)
    }

    /// Symplectic product; errors on shape mismatch.
    pub fn symplectic(&self, other: &PhaseVector) -> Result<bool> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch {
                context: "symplectic product",
                expected: self.shape.dim(),
                actual: other.shape.dim(),
            });
        }
        Ok(self.shape.symplectic(&self.bits, &other.bits))
    }

    /// Parses the text form `IXYZ...` with an optional `|`-separated
    /// block of 0/1 measurement bits, e.g. `XIZY|01`.
    pub fn parse(s: &str) -> Result<Self> {
        let (letters, meas) = match s.split_once('|') {
            Some((l, m)) => (l, m),
            None => (s, ""),
        };
        let shape = PhaseShape::new(letters.chars().count(), meas.chars().count());
        let mut bits = BitVec::zeros(shape.dim());
        for (q, c) in letters.chars().enumerate() {
            let (x, z) = match c {
                'I' => (false, false),
                'X' => (true, false),
                'Z' => (false, true),
                'Y' => (true, true),
                _ => return Err(Error::Parse(format!("invalid Pauli letter `{c}`"))),
            };
            bits.set(shape.x_bit(q), x);
            bits.set(shape.z_bit(q), z);
        }
        for (k, c) in meas.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits.set(shape.meas_bit(k), true),
                _ => return Err(Error::Parse(format!("invalid measurement bit `{c}`"))),
            }
        }
        Ok(Self { shape, bits })
    }

    /// Letter form of the data part; measurement bits appended after `|`
    /// when present.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.shape.qubits + self.shape.meas + 1);
        for q in 0..self.shape.qubits {
            let x = self.bits.get(self.shape.x_bit(q));
            let z = self.bits.get(self.shape.z_bit(q));
            s.push(match (x, z) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            });
        }
        if self.shape.meas > 0 {
            s.push('|');
            for k in 0..self.shape.meas {
                s.push(if self.bits.get(self.shape.meas_bit(k)) {
                    '1'
                } else {
                    '0'
                });
            }
        }
        s
    }
}

impl fmt::Display for PhaseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses a bare Pauli letter string on a known shape with no
/// measurement part.
pub fn encode_pauli(letters: &str, shape: PhaseShape) -> Result<BitVec> {
    let v = PhaseVector::parse(letters)?;
    if v.shape().qubits != shape.qubits || v.shape().meas > shape.meas {
        return Err(Error::DimensionMismatch {
            context: "pauli string",
            expected: shape.qubits,
            actual: v.shape().qubits,
        });
    }
    // Re-embed in case the target shape has more measurement bits.
    let mut bits = BitVec::zeros(shape.dim());
    for i in v.bits().ones() {
        let j = if i < 2 * v.shape().qubits {
            i
        } else {
            2 * shape.qubits + (i - 2 * v.shape().qubits)
        };
        bits.set(j, true);
    }
    Ok(bits)
}
