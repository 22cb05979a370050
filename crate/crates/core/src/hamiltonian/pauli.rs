use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::simcore::StateVector;

/// Largest register for which dense matrices are materialized.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Coefficients with smaller magnitude are dropped when terms are merged.
const DROP_TOL: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Single-qubit product `self·rhs = i^k · P`; returns `(k mod 4, P)`.
    pub fn mul(self, rhs: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, rhs) {
            (I, p) | (p, I) => (0, p),
            (X, X) | (Y, Y) | (Z, Z) => (0, I),
            (X, Y) => (1, Z),
            (Y, X) => (3, Z),
            (Y, Z) => (1, X),
            (Z, Y) => (3, X),
            (Z, X) => (1, Y),
            (X, Z) => (3, Y),
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }
}

/// Tensor product of single-qubit Paulis on `n` qubits, stored as X/Z bit
/// masks (`Y` sets both bits).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self { n, x: 0, z: 0 }
    }

    pub fn from_labels(labels: &[Pauli]) -> Self {
        let mut s = Self::identity(labels.len());
        for (q, &p) in labels.iter().enumerate() {
            s.set(q, p);
        }
        s
    }

    /// Parses a label string such as `"XIZ"`; character `q` acts on qubit `q`.
    pub fn parse(text: &str) -> Result<Self> {
        let labels = text
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Config(format!("invalid Pauli label {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_labels(&labels))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        let (x, z) = p.bits();
        let bit = 1u64 << qubit;
        self.x = if x { self.x | bit } else { self.x & !bit };
        self.z = if z { self.z | bit } else { self.z & !bit };
    }

    pub fn labels(&self) -> Vec<Pauli> {
        (0..self.n).map(|q| self.get(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// `self·rhs = i^k · P` via qubit-wise multiplication; returns `(k mod 4, P)`.
    pub fn mul(&self, rhs: &PauliString) -> (u8, PauliString) {
        debug_assert_eq!(self.n, rhs.n);
        let mut out = PauliString::identity(self.n);
        let mut phase = 0u8;
        for q in 0..self.n {
            let (k, p) = self.get(q).mul(rhs.get(q));
            phase = (phase + k) % 4;
            out.set(q, p);
        }
        (phase, out)
    }

    pub(crate) fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// `i^{#Y}`: the string acts as `|j⟩ ↦ i^{#Y}·(−1)^{popcount(j & z)}·|j ⊕ x⟩`.
    fn y_phase(&self) -> Complex64 {
        match self.y_count() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.labels() {
            let c = match p {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: f64, string: PauliString) -> Self {
        Self {
            coefficient,
            string,
        }
    }
}

/// Hermitian operator `Σ cₖ·Pₖ` with real coefficients on distinct strings.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: Vec::new(),
        }
    }

    /// Builds a sum, merging duplicate strings (first-occurrence order) and
    /// dropping coefficients below `1e-15`.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut index: HashMap<PauliString, usize> = HashMap::new();
        let mut merged: Vec<PauliTerm> = Vec::new();
        for term in terms {
            check_dim(n, term.string.n)?;
            if !term.coefficient.is_finite() {
                return Err(Error::Consistency(format!(
                    "non-finite coefficient on {}",
                    term.string
                )));
            }
            match index.get(&term.string) {
                Some(&i) => merged[i].coefficient += term.coefficient,
                None => {
                    index.insert(term.string, merged.len());
                    merged.push(term);
                }
            }
        }
        merged.retain(|t| t.coefficient.abs() >= DROP_TOL);
        Ok(Self { n, terms: merged })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `out ← H·input`, matrix-free.
    pub(crate) fn apply_into(&self, input: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        for term in &self.terms {
            let s = term.string;
            let base = s.y_phase() * term.coefficient;
            let neg = -base;
            let (x, z) = (s.x as usize, s.z as usize);
            for (j, amp) in input.iter().enumerate() {
                let factor = if (j & z).count_ones() & 1 == 0 {
                    base
                } else {
                    neg
                };
                out[j ^ x] += factor * amp;
            }
        }
    }

    /// `H|ψ⟩`.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        check_dim(self.n, state.num_qubits())?;
        let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
        self.apply_into(state.amplitudes(), &mut out);
        StateVector::from_amplitudes(out)
    }

    /// `Re⟨ψ|H|ψ⟩`; fails if the imaginary part exceeds `1e-10`.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        check_dim(self.n, state.num_qubits())?;
        let value = self.expectation_complex(state.amplitudes());
        if value.im.abs() > 1e-10 {
            return Err(Error::Consistency(format!(
                "expectation has imaginary part {:e}",
                value.im
            )));
        }
        Ok(value.re)
    }

    pub(crate) fn expectation_complex(&self, psi: &[Complex64]) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let s = term.string;
            let (x, z) = (s.x as usize, s.z as usize);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, amp) in psi.iter().enumerate() {
                let v = psi[j ^ x].conj() * amp;
                if (j & z).count_ones() & 1 == 0 {
                    acc += v;
                } else {
                    acc -= v;
                }
            }
            total += acc * s.y_phase() * term.coefficient;
        }
        total
    }

    /// `Tr(H²) = 2^n·Σ cₖ²` by orthogonality of distinct Pauli strings.
    pub fn trace_h_squared(&self) -> f64 {
        let sum: f64 = self
            .terms
            .iter()
            .map(|t| t.coefficient * t.coefficient)
            .sum();
        sum * (1u64 << self.n) as f64
    }

    /// Dense `2^n × 2^n` matrix, only for `n ≤ 12`.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.n > MAX_DENSE_QUBITS {
            return Err(Error::Size(format!(
                "dense matrix requested for {} qubits (limit {MAX_DENSE_QUBITS})",
                self.n
            )));
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for term in &self.terms {
            let s = term.string;
            let base = s.y_phase() * term.coefficient;
            let (x, z) = (s.x as usize, s.z as usize);
            for j in 0..dim {
                let sign = if (j & z).count_ones() & 1 == 0 {
                    1.0
                } else {
                    -1.0
                };
                m[(j ^ x, j)] += base * sign;
            }
        }
        Ok(m)
    }
}

/// `H|ψ⟩` for a state.
pub fn apply_hamiltonian(h: &PauliSum, state: &StateVector) -> Result<StateVector> {
    h.apply(state)
}

/// Mean energy `⟨ψ|H|ψ⟩`.
pub fn expectation(h: &PauliSum, state: &StateVector) -> Result<f64> {
    h.expectation(state)
}

pub fn trace_h_squared(h: &PauliSum) -> f64 {
    h.trace_h_squared()
}

pub(crate) fn energy_of(h: &PauliSum, psi: &[Complex64]) -> f64 {
    h.expectation_complex(psi).re
}
