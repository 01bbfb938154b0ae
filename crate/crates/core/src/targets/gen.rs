//! Constructive generators for the target families. Everything here works on
//! words over mode indices; particle counts, ancilla padding and letter
//! choices are applied by the catalog.

use crate::state::{Ket, QuantumState, StateError};

/// Appends `count` trailing mode-0 ancillas to every word.
pub(super) fn pad(words: Vec<Vec<u8>>, count: usize) -> Vec<Vec<u8>> {
    words
        .into_iter()
        .map(|mut w| {
            w.extend(std::iter::repeat_n(0, count));
            w
        })
        .collect()
}

/// Uniform superposition over `words`.
pub(super) fn uniform(words: Vec<Vec<u8>>) -> Result<QuantumState, StateError> {
    weighted(words.into_iter().map(|w| (w, 1)).collect())
}

pub(super) fn weighted(terms: Vec<(Vec<u8>, i64)>) -> Result<QuantumState, StateError> {
    let particles = terms.first().map_or(0, |(w, _)| w.len());
    let dim = terms
        .iter()
        .flat_map(|(w, _)| w.iter().copied())
        .max()
        .unwrap_or(0)
        .max(1)
        + 1;
    QuantumState::from_terms(
        particles,
        dim,
        terms.into_iter().map(|(w, a)| (Ket::new(w), a)),
    )
}

/// All words of length `len` with exactly `k` letters `one` among `zero`s.
pub(super) fn dicke(len: usize, k: usize, one: u8) -> Vec<Vec<u8>> {
    fn rec(len: usize, k: usize, one: u8, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let left = len - prefix.len();
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        if left > k {
            prefix.push(0);
            rec(len, k, one, prefix, out);
            prefix.pop();
        }
        if k > 0 {
            prefix.push(one);
            rec(len, k - 1, one, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k <= len {
        rec(len, k, one, &mut Vec::with_capacity(len), &mut out);
    }
    out
}

/// Words of length `len` with one `a` and one `b` among zeros.
pub(super) fn two_kinds(len: usize, a: u8, b: u8) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for i in 0..len {
        for j in 0..len {
            if i != j {
                let mut w = vec![0; len];
                w[i] = a;
                w[j] = b;
                out.push(w);
            }
        }
    }
    out
}

/// Balanced bracket words of length `len`.
pub(super) fn dyck(len: usize, open: u8, close: u8) -> Vec<Vec<u8>> {
    fn rec(
        len: usize,
        depth: usize,
        open: u8,
        close: u8,
        prefix: &mut Vec<u8>,
        out: &mut Vec<Vec<u8>>,
    ) {
        let left = len - prefix.len();
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        if depth + 1 < left {
            prefix.push(open);
            rec(len, depth + 1, open, close, prefix, out);
            prefix.pop();
        }
        if depth > 0 {
            prefix.push(close);
            rec(len, depth - 1, open, close, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if len.is_multiple_of(2) {
        rec(len, 0, open, close, &mut Vec::with_capacity(len), &mut out);
    }
    out
}

/// Motzkin paths of length `len`: up `x`, down `y`, flat `z`.
pub(super) fn motzkin(len: usize) -> Vec<Vec<u8>> {
    fn rec(len: usize, depth: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let left = len - prefix.len();
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        for (step, next) in [
            (0u8, Some(depth + 1)),
            (1, depth.checked_sub(1)),
            (2, Some(depth)),
        ] {
            let Some(next) = next.filter(|&d| d < left) else {
                continue;
            };
            prefix.push(step);
            rec(len, next, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, 0, &mut Vec::with_capacity(len), &mut out);
    out
}

/// Binary words of length `len` with no two adjacent ones.
pub(super) fn no_adjacent_ones(len: usize) -> Vec<Vec<u8>> {
    fn rec(len: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        prefix.push(0);
        rec(len, prefix, out);
        prefix.pop();
        if prefix.last() != Some(&1) {
            prefix.push(1);
            rec(len, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, &mut Vec::with_capacity(len), &mut out);
    out
}

/// All words of length `len` over `0..k`.
pub(super) fn all_words(len: usize, k: u8) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::with_capacity(len)];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |m| {
                    let mut w = w.clone();
                    w.push(m);
                    w
                })
            })
            .collect();
    }
    out
}

/// Concatenations of one word from each factor.
pub(super) fn tensor(factors: &[Vec<Vec<u8>>]) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for f in factors {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u8>| {
                f.iter().map(move |w| {
                    let mut p = prefix.clone();
                    p.extend_from_slice(w);
                    p
                })
            })
            .collect();
    }
    out
}

/// Signed sum of the two nearest-neighbour dimer coverings of a ring of
/// `len` sites, with singlets `x_a y_b − y_a x_b`.
pub(super) fn majumdar_ghosh_ring(len: usize) -> Vec<(Vec<u8>, i64)> {
    let mut terms = Vec::new();
    for offset in [0, 1] {
        let pairs: Vec<(usize, usize)> = (0..len / 2)
            .map(|k| ((2 * k + offset) % len, (2 * k + offset + 1) % len))
            .collect();
        terms.extend(singlet_product(len, &pairs));
    }
    terms
}

/// Product of singlets on the given disjoint pairs.
pub(super) fn singlet_product(len: usize, pairs: &[(usize, usize)]) -> Vec<(Vec<u8>, i64)> {
    let mut terms = vec![(vec![0u8; len], 1i64)];
    for &(a, b) in pairs {
        terms = terms
            .into_iter()
            .flat_map(|(w, c)| {
                let mut up = w.clone();
                up[a] = 0;
                up[b] = 1;
                let mut down = w;
                down[a] = 1;
                down[b] = 0;
                [(up, c), (down, -c)]
            })
            .collect();
    }
    terms
}

type M2 = [[i64; 2]; 2];

fn mul(a: &M2, b: &M2) -> M2 {
    let mut c = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Periodic valence-bond solid on `len` spin-1 sites with local states
/// `x, y, z`. The matrix product weights are `σ+`, `−σz/√2` and `−σ−`;
/// multiplying the whole state by `√2^len` leaves the integer coefficient
/// `(−1)^#y · 2^#x · Tr(Π M)` with `M ∈ {σ+, σz, −σ−}`.
pub(super) fn aklt_ring(len: usize) -> Vec<(Vec<u8>, i64)> {
    const SP: M2 = [[0, 1], [0, 0]];
    const SZ: M2 = [[1, 0], [0, -1]];
    const SM: M2 = [[0, 0], [-1, 0]];
    fn rec(len: usize, prefix: &mut Vec<u8>, acc: M2, balance: i64, out: &mut Vec<(Vec<u8>, i64)>) {
        let left = (len - prefix.len()) as i64;
        if balance.abs() > left {
            return;
        }
        if left == 0 {
            let tr = acc[0][0] + acc[1][1];
            if tr != 0 {
                let nx = prefix.iter().filter(|&&m| m == 0).count() as u32;
                let ny = prefix.iter().filter(|&&m| m == 1).count();
                let sign = if ny % 2 == 1 { -1 } else { 1 };
                out.push((prefix.clone(), sign * (1i64 << nx) * tr));
            }
            return;
        }
        for (m, mat, db) in [(0u8, &SP, 1i64), (1, &SZ, 0), (2, &SM, -1)] {
            prefix.push(m);
            rec(len, prefix, mul(&acc, mat), balance + db, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(
        len,
        &mut Vec::with_capacity(len),
        [[1, 0], [0, 1]],
        0,
        &mut out,
    );
    out
}

/// Graph state amplitudes: every bit string, signed by the parity of edges
/// with both endpoints set. Repeated edges count each time.
pub(super) fn graph_state(len: usize, edges: &[(usize, usize)]) -> Vec<(Vec<u8>, i64)> {
    all_words(len, 2)
        .into_iter()
        .map(|w| {
            let odd = edges
                .iter()
                .filter(|&&(a, b)| w[a] == 1 && w[b] == 1)
                .count()
                % 2
                == 1;
            (w, if odd { -1 } else { 1 })
        })
        .collect()
}
