//! Pauli strings, operator pools and the `exp(-iθP)` propagator.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qsim::{Gate, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn letter(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis on distinct qubits, kept sorted by
/// qubit index. Canonical text form is `X0*Y3*Z4`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    factors: Vec<(usize, Axis)>,
}

impl PauliString {
    pub fn new(factors: impl IntoIterator<Item = (usize, Axis)>) -> Result<Self> {
        let mut factors: Vec<_> = factors.into_iter().collect();
        if factors.is_empty() {
            return Err(Error::PauliParse(String::new()));
        }
        factors.sort_by_key(|&(q, _)| q);
        if let Some(w) = factors.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::RepeatedQubit(w[0].0));
        }
        Ok(Self { factors })
    }

    pub fn single(qubit: usize, axis: Axis) -> Self {
        Self {
            factors: vec![(qubit, axis)],
        }
    }

    pub fn factors(&self) -> &[(usize, Axis)] {
        &self.factors
    }

    pub fn weight(&self) -> usize {
        self.factors.len()
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.factors.iter().map(|&(q, _)| q)
    }

    pub fn max_qubit(&self) -> usize {
        self.factors.last().map(|&(q, _)| q).unwrap_or(0)
    }

    /// True when every factor is `Z`.
    pub fn is_diagonal(&self) -> bool {
        self.factors.iter().all(|&(_, a)| a == Axis::Z)
    }

    pub(crate) fn masks(&self) -> PauliMasks {
        let mut m = PauliMasks {
            flip: 0,
            sign: 0,
            num_y: 0,
        };
        for &(q, axis) in &self.factors {
            let bit = 1usize << q;
            match axis {
                Axis::X => m.flip |= bit,
                Axis::Y => {
                    m.flip |= bit;
                    m.sign |= bit;
                    m.num_y += 1;
                }
                Axis::Z => m.sign |= bit,
            }
        }
        m
    }

    fn check_register(&self, num_qubits: usize) -> Result<()> {
        let q = self.max_qubit();
        if q >= num_qubits {
            return Err(Error::QubitIndex {
                index: q,
                num_qubits,
            });
        }
        Ok(())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(q, a)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{}{}", a.letter(), q)?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::PauliParse(s.to_string());
        let mut factors = Vec::new();
        for part in s.split('*') {
            let part = part.trim();
            let mut chars = part.chars();
            let axis = match chars.next().map(|c| c.to_ascii_uppercase()) {
                Some('X') => Axis::X,
                Some('Y') => Axis::Y,
                Some('Z') => Axis::Z,
                _ => return Err(bad()),
            };
            let digits = chars.as_str().trim_start_matches('_');
            let qubit = digits.parse::<usize>().map_err(|_| bad())?;
            factors.push((qubit, axis));
        }
        PauliString::new(factors).map_err(|e| match e {
            Error::RepeatedQubit(_) => bad(),
            other => other,
        })
    }
}

impl serde::Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Bit masks describing `P|b⟩ = i^num_y · (-1)^{|b & sign|} · |b ^ flip⟩`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PauliMasks {
    flip: usize,
    sign: usize,
    num_y: u32,
}

impl PauliMasks {
    fn phase(&self, basis: usize) -> Complex64 {
        let base = match self.num_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        if (basis & self.sign).count_ones() % 2 == 1 {
            -base
        } else {
            base
        }
    }

    pub(crate) fn expectation(&self, amps: &[Complex64]) -> f64 {
        amps.iter()
            .enumerate()
            .map(|(b, &a)| (amps[b ^ self.flip].conj() * self.phase(b) * a).re)
            .sum()
    }

    /// In-place `ψ ← exp(-iθP)ψ = cos θ·ψ − i sin θ·Pψ`.
    pub(crate) fn apply_exponential(&self, amps: &mut [Complex64], theta: f64) {
        let (s, c) = theta.sin_cos();
        let minus_i_sin = Complex64::new(0.0, -s);
        if self.flip == 0 {
            for (b, a) in amps.iter_mut().enumerate() {
                *a *= c + minus_i_sin * self.phase(b);
            }
            return;
        }
        for b in 0..amps.len() {
            let partner = b ^ self.flip;
            if partner < b {
                continue;
            }
            let (ab, ap) = (amps[b], amps[partner]);
            // (Pψ)[partner] = phase(b)·ψ[b], (Pψ)[b] = phase(partner)·ψ[partner].
            amps[b] = c * ab + minus_i_sin * self.phase(partner) * ap;
            amps[partner] = c * ap + minus_i_sin * self.phase(b) * ab;
        }
    }
}

/// `Σ_j θ_j P_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    terms: Vec<(f64, PauliString)>,
}

impl Hamiltonian {
    pub fn new(terms: Vec<(f64, PauliString)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyHamiltonian);
        }
        Ok(Self { terms })
    }

    /// `Z0 Z1 + Z2 Z3`, the readout used by every benchmark.
    pub fn zz_pairs() -> Self {
        let zz = |a, b| PauliString::new([(a, Axis::Z), (b, Axis::Z)]).expect("distinct qubits");
        Self {
            terms: vec![(1.0, zz(0, 1)), (1.0, zz(2, 3))],
        }
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn max_qubit(&self) -> usize {
        self.terms.iter().map(|(_, p)| p.max_qubit()).max().unwrap_or(0)
    }

    /// Upper bound on `|⟨H⟩|`.
    pub fn spectral_bound(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    pub(crate) fn compiled(&self) -> Vec<(f64, PauliMasks)> {
        self.terms.iter().map(|(c, p)| (*c, p.masks())).collect()
    }
}

impl fmt::Display for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, p)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}*{p}")?;
        }
        Ok(())
    }
}

pub(crate) fn expectation_compiled(h: &[(f64, PauliMasks)], amps: &[Complex64]) -> f64 {
    h.iter().map(|(c, m)| c * m.expectation(amps)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoolFlavor {
    /// One-body X/Y/Z plus the two-body labels XX, XY, XZ, YY, YZ, ZZ.
    Restricted,
    /// One-body X/Y/Z plus all nine ordered two-body axis pairs.
    Extended,
}

const RESTRICTED_PAIRS: [(Axis, Axis); 6] = [
    (Axis::X, Axis::X),
    (Axis::X, Axis::Y),
    (Axis::X, Axis::Z),
    (Axis::Y, Axis::Y),
    (Axis::Y, Axis::Z),
    (Axis::Z, Axis::Z),
];

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPool {
    members: Vec<PauliString>,
    flavor: PoolFlavor,
}

impl OperatorPool {
    /// Ordered as: one-body by qubit then axis, then two-body by pair
    /// `(j < k)` then axis pair.
    pub fn generate(num_qubits: usize, flavor: PoolFlavor) -> Result<Self> {
        if num_qubits < 2 {
            return Err(Error::PoolSize(num_qubits));
        }
        let mut members = Vec::new();
        for q in 0..num_qubits {
            for axis in Axis::ALL {
                members.push(PauliString::single(q, axis));
            }
        }
        let pairs: Vec<(Axis, Axis)> = match flavor {
            PoolFlavor::Restricted => RESTRICTED_PAIRS.to_vec(),
            PoolFlavor::Extended => Axis::ALL
                .iter()
                .flat_map(|&a| Axis::ALL.iter().map(move |&b| (a, b)))
                .collect(),
        };
        for j in 0..num_qubits {
            for k in j + 1..num_qubits {
                for &(a, b) in &pairs {
                    members.push(PauliString {
                        factors: vec![(j, a), (k, b)],
                    });
                }
            }
        }
        Ok(Self { members, flavor })
    }

    pub fn from_members(members: Vec<PauliString>, flavor: PoolFlavor) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Empty("operator pool"));
        }
        Ok(Self { members, flavor })
    }

    pub fn members(&self) -> &[PauliString] {
        &self.members
    }

    pub fn flavor(&self) -> PoolFlavor {
        self.flavor
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn generate_pool(num_qubits: usize, flavor: PoolFlavor) -> Result<OperatorPool> {
    OperatorPool::generate(num_qubits, flavor)
}

/// Gate sequence realising `exp(-iθP)`: basis change (H for X, Rx(π/2) for
/// Y), a CNOT ladder onto the highest involved qubit, `Rz(2θ)` there, then
/// the mirrored ladder and basis change.
pub fn pauli_exponential_circuit(p: &PauliString, theta: f64) -> Vec<Gate> {
    let mut into_basis = Vec::new();
    let mut out_of_basis = Vec::new();
    for &(q, axis) in p.factors() {
        match axis {
            Axis::X => {
                into_basis.push(Gate::Hadamard { qubit: q });
                out_of_basis.push(Gate::Hadamard { qubit: q });
            }
            Axis::Y => {
                into_basis.push(Gate::RotX { qubit: q, angle: std::f64::consts::FRAC_PI_2 });
                out_of_basis.push(Gate::RotX { qubit: q, angle: -std::f64::consts::FRAC_PI_2 });
            }
            Axis::Z => {}
        }
    }
    let qubits: Vec<usize> = p.qubits().collect();
    let ladder: Vec<Gate> = qubits
        .windows(2)
        .map(|w| Gate::ControlledNot { control: w[0], target: w[1] })
        .collect();
    let last = *qubits.last().expect("non-empty string");

    let mut gates = into_basis;
    gates.extend(ladder.iter().copied());
    gates.push(Gate::RotZ { qubit: last, angle: 2.0 * theta });
    gates.extend(ladder.iter().rev().copied());
    gates.extend(out_of_basis);
    gates
}

/// Matrix-free `exp(-iθP)|ψ⟩`.
pub fn apply_pauli_exponential(state: &mut StateVector, p: &PauliString, theta: f64) -> Result<()> {
    p.check_register(state.num_qubits())?;
    p.masks().apply_exponential(state.amplitudes_mut(), theta);
    Ok(())
}
