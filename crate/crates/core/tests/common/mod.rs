//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use metadesign_core::circuit::{CircuitProgram, Gate, GateKind};
use metadesign_core::optics::Edge;

/// Every way to split `vertices` into pairs, found without pruning.
pub fn pairings(vertices: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let Some((&first, rest)) = vertices.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for (i, &partner) in rest.iter().enumerate() {
        let remaining: Vec<usize> = rest
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| v)
            .collect();
        for mut p in pairings(&remaining) {
            p.push((first, partner));
            out.push(p);
        }
    }
    out
}

/// Amplitudes as the sum over pairings of the products of one edge per
/// pair, each edge setting the modes of its two endpoints.
pub fn matching_oracle(vertices: usize, edges: &[Edge]) -> BTreeMap<Vec<u8>, i64> {
    let mut amps: BTreeMap<Vec<u8>, i64> = BTreeMap::new();
    let all: Vec<usize> = (0..vertices).collect();
    for pairing in pairings(&all) {
        let mut partial: Vec<(Vec<u8>, i64)> = vec![(vec![0; vertices], 1)];
        for &(a, b) in &pairing {
            let mut next = Vec::new();
            for (modes, w) in &partial {
                for e in edges.iter().filter(|e| (e.u, e.v) == (a.min(b), a.max(b))) {
                    let mut m = modes.clone();
                    m[e.u] = e.mu;
                    m[e.v] = e.mv;
                    next.push((m, w * e.w));
                }
            }
            partial = next;
        }
        for (m, w) in partial {
            *amps.entry(m).or_insert(0) += w;
        }
    }
    amps.retain(|_, a| *a != 0);
    amps
}

pub type Matrix = Vec<Vec<i128>>;

/// Dense matrix of one gate with the Hadamard scaled by `√2`. Qubit `q`
/// is bit `n - 1 - q` of the basis index.
pub fn gate_matrix(n: usize, g: &Gate) -> Matrix {
    let dim = 1usize << n;
    let bit = |q: usize| 1usize << (n - 1 - q);
    let mut m = vec![vec![0i128; dim]; dim];
    let q = g.qubits();
    for col in 0..dim {
        let set = |k: usize| col & bit(q[k]) != 0;
        match g.kind {
            GateKind::H => {
                m[col & !bit(q[0])][col] += 1;
                m[col | bit(q[0])][col] += if set(0) { -1 } else { 1 };
            }
            GateKind::X => m[col ^ bit(q[0])][col] = 1,
            GateKind::Z => m[col][col] = if set(0) { -1 } else { 1 },
            GateKind::Cnot => m[if set(0) { col ^ bit(q[1]) } else { col }][col] = 1,
            GateKind::Cz => m[col][col] = if set(0) && set(1) { -1 } else { 1 },
            GateKind::Toffoli => {
                m[if set(0) && set(1) {
                    col ^ bit(q[2])
                } else {
                    col
                }][col] = 1
            }
            GateKind::Cswap => {
                let row = if set(0) && set(1) != set(2) {
                    col ^ bit(q[1]) ^ bit(q[2])
                } else {
                    col
                };
                m[row][col] = 1;
            }
        }
    }
    m
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut c = vec![vec![0i128; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] != 0 {
                for j in 0..n {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    c
}

/// Compares `prog.run()` with column 0 of the product of dense gate
/// matrices, undoing the `√2` scaling of each Hadamard.
pub fn check_against_dense(prog: &CircuitProgram) -> Result<(), String> {
    let n = prog.qubits();
    let dim = 1usize << n;
    let mut u: Matrix = (0..dim)
        .map(|i| (0..dim).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut h = 0u32;
    for g in prog.gates() {
        u = matmul(&gate_matrix(n, g), &u);
        h += u32::from(g.kind == GateKind::H);
    }
    let sv = prog.run().map_err(|e| e.to_string())?;
    let m = sv.scale_exponent();
    if m > h || !(h - m).is_multiple_of(2) {
        return Err(format!(
            "scale exponent {m} incompatible with {h} Hadamards"
        ));
    }
    let factor = 1i128 << ((h - m) / 2);
    let oracle: Vec<i128> = u.iter().map(|row| row[0]).collect();
    let scaled: Vec<i128> = sv.amplitudes().iter().map(|a| a * factor).collect();
    if scaled == oracle {
        Ok(())
    } else {
        Err(format!(
            "{}: got {scaled:?}, dense {oracle:?}",
            prog.to_text()
        ))
    }
}

/// A random program of `len` gates on `n` qubits.
pub fn random_program(n: usize, len: usize, rng: &mut impl rand::Rng) -> CircuitProgram {
    use rand::seq::SliceRandom;
    let kinds: Vec<GateKind> = GateKind::ALL
        .into_iter()
        .filter(|k| k.arity() <= n)
        .collect();
    let mut prog = CircuitProgram::new(n).unwrap();
    for _ in 0..len {
        let kind = kinds[rng.random_range(0..kinds.len())];
        let mut qubits: Vec<usize> = (0..n).collect();
        qubits.shuffle(rng);
        prog.push(Gate::new(kind, &qubits[..kind.arity()]).unwrap())
            .unwrap();
    }
    prog
}
