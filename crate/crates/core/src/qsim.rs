//! Dense statevector simulator.
//!
//! Amplitudes are stored little-endian: bit `j` of a basis index is the
//! state of qubit `j`. Rotations follow `R_a(θ) = exp(-iθσ_a/2)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{Hamiltonian, PauliString};

pub const MAX_QUBITS: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    RotX { qubit: usize, angle: f64 },
    RotY { qubit: usize, angle: f64 },
    RotZ { qubit: usize, angle: f64 },
    Hadamard { qubit: usize },
    Identity { qubit: usize },
    ControlledNot { control: usize, target: usize },
    ControlledZ { control: usize, target: usize },
}

impl Gate {
    pub fn qubits(&self) -> ([usize; 2], usize) {
        match *self {
            Gate::RotX { qubit, .. }
            | Gate::RotY { qubit, .. }
            | Gate::RotZ { qubit, .. }
            | Gate::Hadamard { qubit }
            | Gate::Identity { qubit } => ([qubit, qubit], 1),
            Gate::ControlledNot { control, target } | Gate::ControlledZ { control, target } => {
                ([control, target], 2)
            }
        }
    }

    /// The gate undoing `self`.
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::RotX { qubit, angle } => Gate::RotX { qubit, angle: -angle },
            Gate::RotY { qubit, angle } => Gate::RotY { qubit, angle: -angle },
            Gate::RotZ { qubit, angle } => Gate::RotZ { qubit, angle: -angle },
            other => other,
        }
    }

    /// 2x2 unitary for single-qubit kinds, row-major.
    pub fn single_qubit_matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        let m = match *self {
            Gate::RotX { angle, .. } => {
                let (s, c) = (angle / 2.0).sin_cos();
                [
                    [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                    [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
                ]
            }
            Gate::RotY { angle, .. } => {
                let (s, c) = (angle / 2.0).sin_cos();
                [
                    [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                    [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                ]
            }
            Gate::RotZ { angle, .. } => {
                let (s, c) = (angle / 2.0).sin_cos();
                [
                    [Complex64::new(c, -s), ZERO],
                    [ZERO, Complex64::new(c, s)],
                ]
            }
            Gate::Hadamard { .. } => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            Gate::Identity { .. } => [[ONE, ZERO], [ZERO, ONE]],
            Gate::ControlledNot { .. } | Gate::ControlledZ { .. } => return None,
        };
        Some(m)
    }
}

/// How classical inputs in `[0, 1]` become `Ry` angles on the register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    /// `Ry(2·acos(√x))`, giving `⟨Z⟩ = 2x - 1`.
    SqrtAcos,
    /// `Ry(2·acos(x))`, giving `⟨Z⟩ = 2x² - 1`.
    Acos,
}

impl Encoding {
    pub fn angle(self, x: f64) -> f64 {
        match self {
            Encoding::SqrtAcos => 2.0 * x.sqrt().acos(),
            Encoding::Acos => 2.0 * x.acos(),
        }
    }
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::QubitCount(num_qubits));
        }
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[0] = ONE;
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes; the length must be a power of two. No
    /// normalisation is applied.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Length {
                expected: len.next_power_of_two().max(2),
                actual: len,
            });
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(num_qubits));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn check_qubit(&self, index: usize) -> Result<()> {
        if index >= self.num_qubits {
            return Err(Error::QubitIndex {
                index,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        let (qubits, arity) = gate.qubits();
        for &q in &qubits[..arity] {
            self.check_qubit(q)?;
        }
        if arity == 2 && qubits[0] == qubits[1] {
            return Err(Error::RepeatedQubit(qubits[0]));
        }
        match *gate {
            Gate::Identity { .. } => {}
            Gate::ControlledNot { control, target } => {
                let (c, t) = (1usize << control, 1usize << target);
                for i in 0..self.amplitudes.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amplitudes.swap(i, i | t);
                    }
                }
            }
            Gate::ControlledZ { control, target } => {
                let mask = (1usize << control) | (1usize << target);
                for (i, a) in self.amplitudes.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = -*a;
                    }
                }
            }
            ref g => {
                let m = g.single_qubit_matrix().expect("single-qubit gate");
                self.apply_single(qubits[0], &m);
            }
        }
        Ok(())
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<()> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    fn apply_single(&mut self, qubit: usize, m: &[[Complex64; 2]; 2]) {
        let bit = 1usize << qubit;
        for i0 in 0..self.amplitudes.len() {
            if i0 & bit != 0 {
                continue;
            }
            let i1 = i0 | bit;
            let (a0, a1) = (self.amplitudes[i0], self.amplitudes[i1]);
            self.amplitudes[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amplitudes[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// `⟨Z_q⟩`.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        Ok(self.z_unchecked(qubit))
    }

    pub(crate) fn z_unchecked(&self, qubit: usize) -> f64 {
        let bit = 1usize << qubit;
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| if i & bit == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum()
    }

    pub fn expectation_pauli(&self, p: &PauliString) -> Result<f64> {
        for q in p.qubits() {
            self.check_qubit(q)?;
        }
        Ok(p.masks().expectation(&self.amplitudes))
    }

    pub fn expectation_hamiltonian(&self, h: &Hamiltonian) -> Result<f64> {
        let mut total = 0.0;
        for (coefficient, p) in h.terms() {
            total += coefficient * self.expectation_pauli(p)?;
        }
        Ok(total)
    }
}

pub fn zero_state(num_qubits: usize) -> Result<StateVector> {
    StateVector::zero(num_qubits)
}

pub fn apply_gate(mut state: StateVector, gate: &Gate) -> Result<StateVector> {
    state.apply(gate)?;
    Ok(state)
}

/// Product state `∏_j Ry_j(angle(x[j mod dim]))|0…0⟩`.
///
/// Inputs shorter than the register are repeated cyclically.
pub fn prepare_input_state(x: &[f64], num_qubits: usize, encoding: Encoding) -> Result<StateVector> {
    if x.is_empty() {
        return Err(Error::Empty("input vector"));
    }
    if !(1..=MAX_QUBITS).contains(&num_qubits) {
        return Err(Error::QubitCount(num_qubits));
    }
    check_unit_interval(x)?;
    Ok(product_ry_state(x, num_qubits, encoding))
}

pub(crate) fn check_unit_interval(x: &[f64]) -> Result<()> {
    for (index, &value) in x.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InputRange { index, value });
        }
    }
    Ok(())
}

/// Builds the product state directly from per-qubit `(cos, sin)` factors.
pub(crate) fn product_ry_state(x: &[f64], num_qubits: usize, encoding: Encoding) -> StateVector {
    let factors: Vec<(f64, f64)> = (0..num_qubits)
        .map(|j| {
            let half = encoding.angle(x[j % x.len()]) / 2.0;
            (half.cos(), half.sin())
        })
        .collect();
    let amplitudes = (0..1usize << num_qubits)
        .map(|i| {
            let re = factors
                .iter()
                .enumerate()
                .map(|(j, &(c, s))| if i >> j & 1 == 0 { c } else { s })
                .product::<f64>();
            Complex64::new(re, 0.0)
        })
        .collect();
    StateVector {
        num_qubits,
        amplitudes,
    }
}
