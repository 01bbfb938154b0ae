//! Sparse multi-particle states with exact integer amplitudes.
//!
//! States are rays: the normalization factor is never stored, so every state
//! produced by an integer-weight setup or by the circuit post-processing can
//! be held exactly. Rational amplitudes are brought to integer form on entry
//! by multiplying through the common denominator, which leaves the ray
//! unchanged.
//!
//! Two text forms exist. The optics form writes every term with an explicit
//! sign and lowercase mode letters in brackets (`+1[xxxx] +1[yyyy]`); the
//! circuit form uses uppercase letters in `|...>` and writes later terms as
//! `+c` even when `c` is negative (`1|XY> +-1|YX>`).

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::task::Task;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StateError {
    #[error("ket {ket} has {got} particles, expected {expected}")]
    ParticleMismatch {
        ket: String,
        got: usize,
        expected: usize,
    },
    #[error("states have different particle counts ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("mode {mode} out of range for dimensionality {dim}")]
    ModeOutOfRange { mode: u8, dim: u8 },
    #[error("state has no terms")]
    EmptyState,
    #[error("kets must contain at least one particle")]
    EmptyKet,
    #[error("amplitude overflow")]
    Overflow,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// One basis term: the mode of every particle, in particle order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ket(Vec<u8>);

impl Ket {
    pub fn new(modes: Vec<u8>) -> Self {
        Ket(modes)
    }

    pub fn modes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses lowercase optics letters (`x`, `y`, `z`) or uppercase circuit
    /// letters (`X`, `Y`).
    pub fn from_letters(s: &str) -> Option<Ket> {
        s.chars()
            .map(mode_of_letter)
            .collect::<Option<Vec<_>>>()
            .map(Ket)
    }

    pub fn letters(&self, format: StateFormat) -> String {
        self.0.iter().map(|&m| letter_of_mode(m, format)).collect()
    }

    /// Concatenation `self ⊗ other`.
    pub fn concat(&self, other: &Ket) -> Ket {
        let mut modes = self.0.clone();
        modes.extend_from_slice(&other.0);
        Ket(modes)
    }
}

impl fmt::Debug for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.letters(StateFormat::Optics))
    }
}

fn mode_of_letter(c: char) -> Option<u8> {
    match c {
        'x' | 'X' => Some(0),
        'y' | 'Y' => Some(1),
        'z' | 'Z' => Some(2),
        _ => None,
    }
}

fn letter_of_mode(m: u8, format: StateFormat) -> char {
    let lower = match m {
        0 => 'x',
        1 => 'y',
        2 => 'z',
        _ => '?',
    };
    match format {
        StateFormat::Optics => lower,
        StateFormat::Circuit => lower.to_ascii_uppercase(),
    }
}

/// Text form of a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateFormat {
    /// `+1[xxyy] -2[xyxy]`
    Optics,
    /// `1|XY> +-1|YX>`
    Circuit,
}

impl From<Task> for StateFormat {
    fn from(task: Task) -> Self {
        match task {
            Task::Optics => StateFormat::Optics,
            Task::Circuit | Task::Graph => StateFormat::Circuit,
        }
    }
}

/// A superposition of kets with integer amplitudes, kept in lexicographic
/// ket order with no zero terms.
#[derive(Clone, PartialEq, Eq)]
pub struct QuantumState {
    particles: usize,
    dim: u8,
    terms: BTreeMap<Ket, i64>,
}

impl fmt::Debug for QuantumState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuantumState({})", self.to_text(StateFormat::Optics))
    }
}

impl QuantumState {
    pub fn empty(particles: usize, dim: u8) -> Self {
        QuantumState {
            particles,
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a state, summing repeated kets and dropping zero amplitudes.
    pub fn from_terms<I>(particles: usize, dim: u8, terms: I) -> Result<Self, StateError>
    where
        I: IntoIterator<Item = (Ket, i64)>,
    {
        let mut state = QuantumState::empty(particles, dim);
        for (ket, amp) in terms {
            state.add(ket, amp)?;
        }
        Ok(state)
    }

    /// Builds a state from rational amplitudes. The result is the same ray
    /// scaled by the least common denominator.
    pub fn from_rational_terms<I>(particles: usize, dim: u8, terms: I) -> Result<Self, StateError>
    where
        I: IntoIterator<Item = (Ket, Ratio<i64>)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let lcm = terms.iter().fold(1i64, |acc, (_, r)| acc.lcm(r.denom()));
        let scaled = terms.into_iter().map(|(ket, r)| {
            let factor = lcm / r.denom();
            r.numer()
                .checked_mul(factor)
                .map(|a| (ket, a))
                .ok_or(StateError::Overflow)
        });
        let scaled: Result<Vec<_>, _> = scaled.collect();
        QuantumState::from_terms(particles, dim, scaled?)
    }

    pub(crate) fn add(&mut self, ket: Ket, amp: i64) -> Result<(), StateError> {
        if ket.is_empty() {
            return Err(StateError::EmptyKet);
        }
        if ket.len() != self.particles {
            return Err(StateError::ParticleMismatch {
                ket: ket.letters(StateFormat::Optics),
                got: ket.len(),
                expected: self.particles,
            });
        }
        if let Some(&mode) = ket.modes().iter().find(|&&m| m >= self.dim) {
            return Err(StateError::ModeOutOfRange {
                mode,
                dim: self.dim,
            });
        }
        if amp == 0 {
            return Ok(());
        }
        match self.terms.entry(ket) {
            Entry::Occupied(mut e) => {
                let v = e.get().checked_add(amp).ok_or(StateError::Overflow)?;
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                e.insert(amp);
            }
        }
        Ok(())
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Ket, i64)> + '_ {
        self.terms.iter().map(|(k, &a)| (k, a))
    }

    pub fn amplitude(&self, ket: &Ket) -> i64 {
        self.terms.get(ket).copied().unwrap_or(0)
    }

    /// Highest mode index that occurs in any term, if any.
    pub fn max_mode(&self) -> Option<u8> {
        self.terms
            .keys()
            .flat_map(|k| k.modes().iter().copied())
            .max()
    }

    /// Same state with a different declared dimensionality.
    pub fn with_dim(mut self, dim: u8) -> Result<Self, StateError> {
        if let Some(m) = self.max_mode() {
            if m >= dim {
                return Err(StateError::ModeOutOfRange { mode: m, dim });
            }
        }
        self.dim = dim;
        Ok(self)
    }

    pub fn scaled(&self, factor: i64) -> Result<Self, StateError> {
        if factor == 0 {
            return Ok(QuantumState::empty(self.particles, self.dim));
        }
        let mut terms = BTreeMap::new();
        for (k, &a) in &self.terms {
            terms.insert(
                k.clone(),
                a.checked_mul(factor).ok_or(StateError::Overflow)?,
            );
        }
        Ok(QuantumState { terms, ..*self })
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &QuantumState) -> Result<Self, StateError> {
        let mut out =
            QuantumState::empty(self.particles + other.particles, self.dim.max(other.dim));
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add(a.concat(b), x.checked_mul(*y).ok_or(StateError::Overflow)?)?;
            }
        }
        Ok(out)
    }

    /// Divides all amplitudes by the gcd of their absolute values. The
    /// global sign is kept.
    pub fn reduced(&self) -> Self {
        let g = self.terms.values().fold(0i64, |g, &a| g.gcd(&a));
        if g <= 1 {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, &a)| (k.clone(), a / g))
            .collect();
        QuantumState { terms, ..*self }
    }

    /// Canonical representative of the ray: reduced, and with the first
    /// (lexicographically smallest) term positive.
    pub fn canonical(&self) -> Self {
        let reduced = self.reduced();
        match reduced.terms.values().next() {
            Some(&first) if first < 0 => {
                let terms = reduced
                    .terms
                    .iter()
                    .map(|(k, &a)| (k.clone(), -a))
                    .collect();
                QuantumState { terms, ..reduced }
            }
            _ => reduced,
        }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    /// Squared overlap of the normalized states, exactly.
    pub fn fidelity_exact(&self, other: &QuantumState) -> Result<BigRational, StateError> {
        if self.particles != other.particles {
            return Err(StateError::DimensionMismatch(
                self.particles,
                other.particles,
            ));
        }
        if self.is_empty() || other.is_empty() {
            return Err(StateError::EmptyState);
        }
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut overlap = BigInt::zero();
        for (k, &a) in &small.terms {
            if let Some(&b) = large.terms.get(k) {
                overlap += BigInt::from(a) * BigInt::from(b);
            }
        }
        let norm = |s: &QuantumState| -> BigInt {
            s.terms
                .values()
                .map(|&a| BigInt::from(a) * BigInt::from(a))
                .sum()
        };
        Ok(BigRational::new(
            &overlap * &overlap,
            norm(self) * norm(other),
        ))
    }

    /// Squared overlap of the normalized states, in `[0, 1]`.
    pub fn fidelity(&self, other: &QuantumState) -> Result<f64, StateError> {
        self.fidelity_exact(other).map(|f| ratio_to_f64(&f))
    }

    pub fn to_text(&self, format: StateFormat) -> String {
        let mut out = String::new();
        for (i, (ket, &amp)) in self.terms.iter().enumerate() {
            match format {
                StateFormat::Optics => {
                    if i > 0 {
                        out.push(' ');
                    }
                    out.push(if amp < 0 { '-' } else { '+' });
                    out.push_str(&amp.unsigned_abs().to_string());
                    out.push('[');
                    out.push_str(&ket.letters(format));
                    out.push(']');
                }
                StateFormat::Circuit => {
                    if i > 0 {
                        out.push_str(" +");
                    }
                    out.push_str(&amp.to_string());
                    out.push('|');
                    out.push_str(&ket.letters(format));
                    out.push('>');
                }
            }
        }
        out
    }

    /// Parses either text form. Optics states with a `z` letter are
    /// three-dimensional, all others two-dimensional.
    pub fn parse(text: &str, format: StateFormat) -> Result<Self, StateError> {
        let terms = scan(text, format)?;
        let particles = terms[0].1.len();
        let dim = if terms.iter().any(|(_, k, _)| k.modes().contains(&2)) {
            3
        } else {
            2
        };
        let mut state = QuantumState::empty(particles, dim);
        for (pos, ket, amp) in terms {
            if ket.len() != particles {
                return Err(StateError::Parse {
                    pos,
                    msg: format!("ket length {} differs from {}", ket.len(), particles),
                });
            }
            if state.terms.contains_key(&ket) {
                return Err(StateError::Parse {
                    pos,
                    msg: "repeated ket".into(),
                });
            }
            state.add(ket, amp)?;
        }
        Ok(state)
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), StateError> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", b as char)))
        }
    }

    fn error(&self, msg: String) -> StateError {
        StateError::Parse { pos: self.pos, msg }
    }

    fn number(&mut self) -> Result<i64, StateError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected coefficient".into()));
        }
        let value: i64 = self.text[start..self.pos]
            .parse()
            .map_err(|_| StateError::Parse {
                pos: start,
                msg: "coefficient too large".into(),
            })?;
        if value == 0 {
            return Err(StateError::Parse {
                pos: start,
                msg: "zero coefficient".into(),
            });
        }
        Ok(value)
    }

    fn letters(&mut self, upper: bool) -> Result<Ket, StateError> {
        let start = self.pos;
        while let Some(b) = self.peek() {
            let ok = if upper {
                matches!(b, b'X' | b'Y')
            } else {
                matches!(b, b'x' | b'y' | b'z')
            };
            if !ok {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected mode letters".into()));
        }
        Ok(Ket::from_letters(&self.text[start..self.pos]).expect("letters checked"))
    }
}

fn scan(text: &str, format: StateFormat) -> Result<Vec<(usize, Ket, i64)>, StateError> {
    let mut cur = Cursor { text, pos: 0 };
    let mut out = Vec::new();
    loop {
        if !out.is_empty() {
            cur.expect(b' ')?;
        }
        let start = cur.pos;
        let (ket, amp) = match format {
            StateFormat::Optics => {
                let negative = if cur.eat(b'-') {
                    true
                } else if cur.eat(b'+') {
                    false
                } else {
                    return Err(cur.error("expected `+` or `-`".into()));
                };
                let c = cur.number()?;
                cur.expect(b'[')?;
                let ket = cur.letters(false)?;
                cur.expect(b']')?;
                (ket, if negative { -c } else { c })
            }
            StateFormat::Circuit => {
                // first term: `c|..>` or `-c|..>`; later: `+c`, `+-c` or `-c`
                let negative = if out.is_empty() || cur.eat(b'+') {
                    cur.eat(b'-')
                } else if cur.eat(b'-') {
                    true
                } else {
                    return Err(cur.error("expected `+` or `-`".into()));
                };
                let c = cur.number()?;
                cur.expect(b'|')?;
                let ket = cur.letters(true)?;
                cur.expect(b'>')?;
                (ket, if negative { -c } else { c })
            }
        };
        out.push((start, ket, amp));
        if cur.peek().is_none() {
            break;
        }
    }
    Ok(out)
}

/// Fidelity of two states given as floating-point amplitude lists. Repeated
/// kets are summed.
pub fn fidelity_real(a: &[(Ket, f64)], b: &[(Ket, f64)]) -> Result<f64, StateError> {
    let collect = |terms: &[(Ket, f64)]| -> Result<BTreeMap<Ket, f64>, StateError> {
        let mut map = BTreeMap::new();
        let mut len = None;
        for (k, a) in terms {
            match len {
                None => len = Some(k.len()),
                Some(l) if l != k.len() => {
                    return Err(StateError::ParticleMismatch {
                        ket: k.letters(StateFormat::Optics),
                        got: k.len(),
                        expected: l,
                    })
                }
                _ => {}
            }
            *map.entry(k.clone()).or_insert(0.0) += a;
        }
        map.retain(|_, a| *a != 0.0);
        Ok(map)
    };
    let (ma, mb) = (collect(a)?, collect(b)?);
    let (la, lb) = match (ma.keys().next(), mb.keys().next()) {
        (Some(x), Some(y)) => (x.len(), y.len()),
        _ => return Err(StateError::EmptyState),
    };
    if la != lb {
        return Err(StateError::DimensionMismatch(la, lb));
    }
    let overlap: f64 = ma
        .iter()
        .filter_map(|(k, x)| mb.get(k).map(|y| x * y))
        .sum();
    let na: f64 = ma.values().map(|x| x * x).sum();
    let nb: f64 = mb.values().map(|x| x * x).sum();
    Ok((overlap * overlap / (na * nb)).clamp(0.0, 1.0))
}

/// True if an exact fidelity equals one.
pub fn is_unit(f: &BigRational) -> bool {
    f.numer() == f.denom() && f.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> QuantumState {
        QuantumState::parse(s, StateFormat::Optics).unwrap()
    }

    #[test]
    fn canonicalize_divides_gcd_and_fixes_sign() {
        let s = QuantumState::from_terms(
            4,
            2,
            [
                (Ket::from_letters("yyyy").unwrap(), -2),
                (Ket::from_letters("xxxx").unwrap(), -2),
            ],
        )
        .unwrap();
        assert_eq!(
            s.canonical().to_text(StateFormat::Optics),
            "+1[xxxx] +1[yyyy]"
        );
        let fixed = st("+1[xxxx] +1[yyyy]");
        assert_eq!(fixed.canonical(), fixed);
    }

    #[test]
    fn canonicalize_empty() {
        let s = QuantumState::empty(4, 2);
        assert!(s.canonical().is_empty());
    }

    #[test]
    fn majumdar_ghosh_scaled_row() {
        let row = "-1[xxyy] +2[xyxy] -1[xyyx] -1[yxxy] +2[yxyx] -1[yyxx]";
        let raw = st(row);
        let scaled = raw.scaled(-3).unwrap();
        // gcd reduction recovers the row up to global sign
        assert_eq!(scaled.reduced(), raw.scaled(-1).unwrap());
        assert_eq!(scaled.canonical(), raw.canonical());
        assert_eq!(
            scaled.canonical().to_text(StateFormat::Optics),
            "+1[xxyy] -2[xyxy] +1[xyyx] +1[yxxy] -2[yxyx] +1[yyxx]"
        );
    }

    #[test]
    fn single_photon_fidelities() {
        let zero = QuantumState::from_terms(1, 2, [(Ket::new(vec![0]), 1)]).unwrap();
        let one = QuantumState::from_terms(1, 2, [(Ket::new(vec![1]), 1)]).unwrap();
        let plus = QuantumState::from_terms(1, 2, [(Ket::new(vec![0]), 1), (Ket::new(vec![1]), 1)])
            .unwrap();
        assert_eq!(zero.fidelity(&one).unwrap(), 0.0);
        assert_eq!(
            zero.fidelity_exact(&plus).unwrap(),
            BigRational::new(1.into(), 2.into())
        );
        assert!(is_unit(&zero.fidelity_exact(&zero).unwrap()));
    }

    #[test]
    fn ghz_float_fidelity() {
        let k = |s: &str| Ket::from_letters(s).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ghz = [(k("xxxx"), h), (k("yyyy"), h)];
        let psi = [(k("xxxx"), h), (k("yyyy"), 0.5), (k("yyxx"), 0.5)];
        let f = fidelity_real(&ghz, &psi).unwrap();
        let expected = (3.0 + 2.0 * 2f64.sqrt()) / 8.0;
        assert!((f - expected).abs() < 1e-12, "{f}");
    }

    #[test]
    fn fidelity_errors() {
        let a = st("+1[xx]");
        let b = st("+1[xxxx]");
        assert!(matches!(
            a.fidelity(&b),
            Err(StateError::DimensionMismatch(2, 4))
        ));
        let e = QuantumState::empty(2, 2);
        assert!(matches!(a.fidelity(&e), Err(StateError::EmptyState)));
    }

    #[test]
    fn parse_examples() {
        let s = st("+1[xy] -1[yx]");
        assert_eq!(s.len(), 2);
        assert_eq!(s.amplitude(&Ket::from_letters("yx").unwrap()), -1);
        assert_eq!(st("+2[xyxy]").to_text(StateFormat::Optics), "+2[xyxy]");
        let err = QuantumState::parse("+1[xx] +1[xyz]", StateFormat::Optics).unwrap_err();
        assert!(matches!(err, StateError::Parse { pos: 7, .. }), "{err:?}");
        assert!(QuantumState::parse("+0[xx]", StateFormat::Optics).is_err());
        assert!(QuantumState::parse("+1[xx]  +1[yy]", StateFormat::Optics).is_err());
        assert!(QuantumState::parse("1[xx]", StateFormat::Optics).is_err());
        assert!(QuantumState::parse("", StateFormat::Optics).is_err());
    }

    #[test]
    fn parse_circuit_forms() {
        let s = QuantumState::parse("1|XY> +-1|YX>", StateFormat::Circuit).unwrap();
        assert_eq!(s.to_text(StateFormat::Circuit), "1|XY> +-1|YX>");
        assert_eq!(s.to_text(StateFormat::Optics), "+1[xy] -1[yx]");
        let alt = QuantumState::parse("1|XX> +1|XY> +1|YX> -1|YY>", StateFormat::Circuit).unwrap();
        assert_eq!(
            alt.to_text(StateFormat::Circuit),
            "1|XX> +1|XY> +1|YX> +-1|YY>"
        );
        assert!(QuantumState::parse("1|XZ>", StateFormat::Circuit).is_err());
    }

    #[test]
    fn rational_terms_are_integerized() {
        let s = QuantumState::from_rational_terms(
            2,
            2,
            [
                (Ket::from_letters("xx").unwrap(), Ratio::new(1, 2)),
                (Ket::from_letters("yy").unwrap(), Ratio::new(-1, 3)),
            ],
        )
        .unwrap();
        assert_eq!(s.to_text(StateFormat::Optics), "+3[xx] -2[yy]");
    }

    #[test]
    fn mode_range_checked() {
        let err = QuantumState::from_terms(2, 2, [(Ket::new(vec![0, 2]), 1)]).unwrap_err();
        assert_eq!(err, StateError::ModeOutOfRange { mode: 2, dim: 2 });
    }
}
