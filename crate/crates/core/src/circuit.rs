//! Exact statevector simulation for the gate set `H, X, Z, CNOT, CZ,
//! Toffoli, CSWAP`.
//!
//! Amplitudes are integers times a global factor `2^(-m/2)`. Every gate but
//! `H` permutes or negates amplitudes; `H` forms sums and differences and
//! raises `m` by one. The factor is pulled back down whenever all amplitudes
//! are even, so the integers stay small.
//!
//! Qubit `q` of an `n`-qubit register is bit `n - 1 - q` of the basis index,
//! which makes index order coincide with lexicographic ket order.

use std::fmt;
use std::str::FromStr;

use crate::state::{Ket, QuantumState};

pub const MAX_QUBITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    #[error("{0} qubits exceed the simulator limit of {MAX_QUBITS}")]
    TooLarge(usize),
    #[error("a circuit needs at least one qubit")]
    NoQubits,
    #[error("gate {gate} acts on qubit {qubit}, register has {qubits}")]
    QubitOutOfRange {
        gate: GateKind,
        qubit: usize,
        qubits: usize,
    },
    #[error("gate {gate} repeats qubit {qubit}")]
    RepeatedQubit { gate: GateKind, qubit: usize },
    #[error("gate {gate} takes {expected} qubits, got {got}")]
    Arity {
        gate: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("amplitude overflow")]
    Overflow,
    #[error("state has no nonzero amplitude")]
    Empty,
    #[error("amplitude ratio {num}/{den} is not an integer")]
    NonInteger { num: i128, den: i128 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    H,
    X,
    Z,
    Cnot,
    Cz,
    Toffoli,
    Cswap,
}

impl GateKind {
    pub const ALL: [GateKind; 7] = [
        GateKind::H,
        GateKind::X,
        GateKind::Z,
        GateKind::Cnot,
        GateKind::Cz,
        GateKind::Toffoli,
        GateKind::Cswap,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Z => 1,
            GateKind::Cnot | GateKind::Cz => 2,
            GateKind::Toffoli | GateKind::Cswap => 3,
        }
    }

    /// Function name in meta-code text.
    pub fn code_name(self) -> &'static str {
        match self {
            GateKind::H => "qH",
            GateKind::X => "qX",
            GateKind::Z => "qZ",
            GateKind::Cnot => "qCNOT",
            GateKind::Cz => "qCZ",
            GateKind::Toffoli => "qToffoli",
            GateKind::Cswap => "qCSWAP",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code_name())
    }
}

impl FromStr for GateKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        GateKind::ALL
            .into_iter()
            .find(|g| g.code_name() == s)
            .ok_or(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    qubits: [usize; 3],
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[usize]) -> Result<Self, CircuitError> {
        if qubits.len() != kind.arity() {
            return Err(CircuitError::Arity {
                gate: kind,
                expected: kind.arity(),
                got: qubits.len(),
            });
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(CircuitError::RepeatedQubit {
                    gate: kind,
                    qubit: *q,
                });
            }
        }
        let mut arr = [0; 3];
        arr[..qubits.len()].copy_from_slice(qubits);
        Ok(Gate { kind, qubits: arr })
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.qubits().iter().map(|q| q.to_string()).collect();
        write!(f, "{}({})", self.kind, args.join(","))
    }
}

/// A gate list on a register initialized to `|0...0>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitProgram {
    qubits: usize,
    gates: Vec<Gate>,
}

impl CircuitProgram {
    pub fn new(qubits: usize) -> Result<Self, CircuitError> {
        if qubits == 0 {
            return Err(CircuitError::NoQubits);
        }
        Ok(CircuitProgram {
            qubits,
            gates: Vec::new(),
        })
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        if let Some(&q) = gate.qubits().iter().find(|&&q| q >= self.qubits) {
            return Err(CircuitError::QubitOutOfRange {
                gate: gate.kind,
                qubit: q,
                qubits: self.qubits,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn gate(&mut self, kind: GateKind, qubits: &[usize]) -> Result<(), CircuitError> {
        self.push(Gate::new(kind, qubits)?)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// One gate call per line.
    pub fn to_text(&self) -> String {
        self.gates.iter().map(|g| format!("{g}\n")).collect()
    }

    pub fn run(&self) -> Result<StateVector, CircuitError> {
        let mut sv = StateVector::zero(self.qubits)?;
        for g in &self.gates {
            sv.apply(g)?;
        }
        Ok(sv)
    }

    /// Floating-point simulation, for cross-checks.
    pub fn run_float(&self) -> Result<Vec<f64>, CircuitError> {
        if self.qubits > MAX_QUBITS {
            return Err(CircuitError::TooLarge(self.qubits));
        }
        let n = self.qubits;
        let mut amps = vec![0.0f64; 1 << n];
        amps[0] = 1.0;
        let bit = |q: usize| 1usize << (n - 1 - q);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for g in &self.gates {
            let q = g.qubits();
            match g.kind {
                GateKind::H => {
                    let b = bit(q[0]);
                    for i in 0..amps.len() {
                        if i & b == 0 {
                            let (a0, a1) = (amps[i], amps[i | b]);
                            amps[i] = h * (a0 + a1);
                            amps[i | b] = h * (a0 - a1);
                        }
                    }
                }
                _ => permute_or_negate(&mut amps, g, n, |a| -a),
            }
        }
        Ok(amps)
    }
}

// Every non-H gate is a signed permutation of basis states.
fn permute_or_negate<T: Copy>(amps: &mut [T], g: &Gate, n: usize, neg: impl Fn(T) -> T) {
    let q = g.qubits();
    let bit = |k: usize| 1usize << (n - 1 - q[k]);
    match g.kind {
        GateKind::H => unreachable!("H is not a permutation"),
        GateKind::X => {
            let b = bit(0);
            for i in 0..amps.len() {
                if i & b == 0 {
                    amps.swap(i, i | b);
                }
            }
        }
        GateKind::Z => {
            let b = bit(0);
            for (i, a) in amps.iter_mut().enumerate() {
                if i & b != 0 {
                    *a = neg(*a);
                }
            }
        }
        GateKind::Cnot => {
            let (c, t) = (bit(0), bit(1));
            for i in 0..amps.len() {
                if i & c != 0 && i & t == 0 {
                    amps.swap(i, i | t);
                }
            }
        }
        GateKind::Cz => {
            let m = bit(0) | bit(1);
            for (i, a) in amps.iter_mut().enumerate() {
                if i & m == m {
                    *a = neg(*a);
                }
            }
        }
        GateKind::Toffoli => {
            let (c, t) = (bit(0) | bit(1), bit(2));
            for i in 0..amps.len() {
                if i & c == c && i & t == 0 {
                    amps.swap(i, i | t);
                }
            }
        }
        GateKind::Cswap => {
            let (c, a, b) = (bit(0), bit(1), bit(2));
            for i in 0..amps.len() {
                if i & c != 0 && i & a != 0 && i & b == 0 {
                    amps.swap(i, (i & !a) | b);
                }
            }
        }
    }
}

/// Exact register state: `amps[i] · 2^(-m/2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<i128>,
    m: u32,
}

impl StateVector {
    pub fn zero(qubits: usize) -> Result<Self, CircuitError> {
        if qubits == 0 {
            return Err(CircuitError::NoQubits);
        }
        if qubits > MAX_QUBITS {
            return Err(CircuitError::TooLarge(qubits));
        }
        let mut amps = vec![0; 1 << qubits];
        amps[0] = 1;
        Ok(StateVector { qubits, amps, m: 0 })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Integer amplitudes; the true amplitudes are these times `2^(-m/2)`.
    pub fn amplitudes(&self) -> &[i128] {
        &self.amps
    }

    pub fn scale_exponent(&self) -> u32 {
        self.m
    }

    pub fn to_f64(&self) -> Vec<f64> {
        let s = 2f64.powf(-(self.m as f64) / 2.0);
        self.amps.iter().map(|&a| a as f64 * s).collect()
    }

    pub fn apply(&mut self, g: &Gate) -> Result<(), CircuitError> {
        if let Some(&q) = g.qubits().iter().find(|&&q| q >= self.qubits) {
            return Err(CircuitError::QubitOutOfRange {
                gate: g.kind,
                qubit: q,
                qubits: self.qubits,
            });
        }
        if g.kind != GateKind::H {
            permute_or_negate(&mut self.amps, g, self.qubits, |a| -a);
            return Ok(());
        }
        let b = 1usize << (self.qubits - 1 - g.qubits()[0]);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | b]);
                self.amps[i] = a0.checked_add(a1).ok_or(CircuitError::Overflow)?;
                self.amps[i | b] = a0.checked_sub(a1).ok_or(CircuitError::Overflow)?;
            }
        }
        self.m += 1;
        while self.m >= 2 && self.amps.iter().all(|a| a % 2 == 0) {
            for a in &mut self.amps {
                *a /= 2;
            }
            self.m -= 2;
        }
        Ok(())
    }

    /// Drops zero terms, divides by the smallest magnitude, and fixes the
    /// global sign so that the first term is positive.
    pub fn postprocess(&self) -> Result<QuantumState, CircuitError> {
        let nonzero: Vec<(usize, i128)> = self
            .amps
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, a)| a != 0)
            .collect();
        let min = nonzero
            .iter()
            .map(|(_, a)| a.abs())
            .min()
            .ok_or(CircuitError::Empty)?;
        let sign = if nonzero[0].1 < 0 { -1 } else { 1 };
        let mut terms = Vec::with_capacity(nonzero.len());
        for (i, a) in nonzero {
            if a % min != 0 {
                return Err(CircuitError::NonInteger { num: a, den: min });
            }
            let c = i64::try_from(sign * a / min).map_err(|_| CircuitError::Overflow)?;
            terms.push((self.ket(i), c));
        }
        QuantumState::from_terms(self.qubits, 2, terms).map_err(|_| CircuitError::Overflow)
    }

    fn ket(&self, index: usize) -> Ket {
        let n = self.qubits;
        Ket::new((0..n).map(|q| ((index >> (n - 1 - q)) & 1) as u8).collect())
    }
}

/// Graph state on `qubits` vertices: `H` on every qubit, then one `CZ` per
/// edge.
pub fn build_graph_state(
    qubits: usize,
    edges: &[(usize, usize)],
) -> Result<CircuitProgram, CircuitError> {
    let mut p = CircuitProgram::new(qubits)?;
    for q in 0..qubits {
        p.gate(GateKind::H, &[q])?;
    }
    for &(a, b) in edges {
        p.gate(GateKind::Cz, &[a, b])?;
    }
    Ok(p)
}
