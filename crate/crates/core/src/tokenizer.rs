//! Fixed vocabularies and the encoding of state triples and meta-codes as
//! token sequences.
//!
//! Optics states are spelled structurally: a sign, the coefficient digits,
//! `[`, one position-mode token per particle (`ax`, `by`, ... up to `hz`)
//! and `]`. States are separated by `|`. Circuit states and all codes are
//! split by greedy longest match over the vocabulary, with the blanks
//! between state terms dropped. Every sequence is framed by `<SOS>` and
//! `<EOS>`.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use crate::dsl::MetaCode;
use crate::state::{QuantumState, StateFormat};
use crate::task::Task;

pub const PAD: u32 = 0;
pub const SOS: u32 = 1;
pub const EOS: u32 = 2;

/// Optics position letters run from `a` to `h`.
pub const MAX_OPTICS_PARTICLES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TokenError {
    #[error("cannot encode: {0}")]
    Unencodable(String),
    #[error("sequence of {len} tokens exceeds the limit of {max}")]
    TooLong { len: usize, max: usize },
    #[error("unknown token id {0}")]
    UnknownId(u32),
    #[error("no token matches the text at byte {pos}: `{snippet}`")]
    UnknownText { pos: usize, snippet: String },
    #[error("malformed sequence: {0}")]
    Malformed(String),
}

/// Which half of a training pair a sequence belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// States (sequence A).
    Source,
    /// Codes (sequence B).
    Target,
}

const OPTICS_TOKENS: [&str; 51] = [
    "<PAD>",
    "<SOS>",
    "<EOS>",
    "0",
    "1",
    "2",
    "3",
    "4",
    "5",
    "6",
    "7",
    "8",
    "9",
    "ax",
    "bx",
    "cx",
    "dx",
    "ex",
    "fx",
    "gx",
    "hx",
    "ay",
    "by",
    "cy",
    "dy",
    "ey",
    "fy",
    "gy",
    "hy",
    "az",
    "bz",
    "cz",
    "dz",
    "ez",
    "fz",
    "gz",
    "hz",
    "[",
    "]",
    "|",
    "+",
    "-",
    "*",
    "for ii in range(N):",
    "\n",
    "    ",
    "e(",
    ")",
    ",",
    "N",
    "ii",
];

const CIRCUIT_SOURCE_TOKENS: [&str; 25] = [
    "<PAD>", "<SOS>", "<EOS>", "0", "1", "2", "3", "4", "5", "6", "7", "8", "9", "X", "Y", "|",
    ">", "+", "-", "sqrt(", "/", "*", "(", ")", "<SEP>",
];

const CIRCUIT_TARGET_TOKENS: [&str; 32] = [
    "<PAD>",
    "<SOS>",
    "<EOS>",
    "0",
    "1",
    "2",
    "3",
    "4",
    "5",
    "6",
    "7",
    "8",
    "9",
    "for ii in range(",
    "):",
    "\n",
    "    ",
    "qH",
    "qCNOT",
    "qX",
    "qZ",
    "+",
    "-",
    "*",
    "NN",
    "ii",
    "(",
    ")",
    ",",
    "qToffoli",
    "qCSWAP",
    "qCZ",
];

/// A token table: ids are positions in the table.
pub struct Vocabulary {
    name: &'static str,
    tokens: &'static [&'static str],
    ids: HashMap<&'static str, u32>,
    // longest first, for greedy matching
    by_length: Vec<u32>,
}

impl fmt::Debug for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vocabulary({}, {} tokens)", self.name, self.tokens.len())
    }
}

impl Vocabulary {
    fn build(name: &'static str, tokens: &'static [&'static str]) -> Self {
        let ids = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (*t, i as u32))
            .collect();
        let mut by_length: Vec<u32> = (3..tokens.len() as u32).collect();
        by_length.sort_by_key(|&i| std::cmp::Reverse(tokens[i as usize].len()));
        Vocabulary {
            name,
            tokens,
            ids,
            by_length,
        }
    }

    /// The shared optics vocabulary (states and codes).
    pub fn optics() -> &'static Vocabulary {
        static V: OnceLock<Vocabulary> = OnceLock::new();
        V.get_or_init(|| Vocabulary::build("optics", &OPTICS_TOKENS))
    }

    pub fn circuit_source() -> &'static Vocabulary {
        static V: OnceLock<Vocabulary> = OnceLock::new();
        V.get_or_init(|| Vocabulary::build("circuit-source", &CIRCUIT_SOURCE_TOKENS))
    }

    pub fn circuit_target() -> &'static Vocabulary {
        static V: OnceLock<Vocabulary> = OnceLock::new();
        V.get_or_init(|| Vocabulary::build("circuit-target", &CIRCUIT_TARGET_TOKENS))
    }

    pub fn for_task(task: Task, side: Side) -> &'static Vocabulary {
        match (task, side) {
            (Task::Optics, _) => Vocabulary::optics(),
            (_, Side::Source) => Vocabulary::circuit_source(),
            (_, Side::Target) => Vocabulary::circuit_target(),
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&'static str> {
        self.tokens.get(id as usize).copied()
    }

    fn need(&self, token: &str) -> u32 {
        self.id(token)
            .unwrap_or_else(|| panic!("`{token}` missing from {}", self.name))
    }

    /// Splits `text` by greedy longest match. Special tokens never match.
    pub fn tokenize(&self, text: &str) -> Result<Vec<u32>, TokenError> {
        let mut out = Vec::new();
        let mut pos = 0;
        while pos < text.len() {
            let rest = &text[pos..];
            let hit = self
                .by_length
                .iter()
                .find(|&&i| rest.starts_with(self.tokens[i as usize]));
            match hit {
                Some(&i) => {
                    out.push(i);
                    pos += self.tokens[i as usize].len();
                }
                None => {
                    let snippet: String = rest.chars().take(12).collect();
                    return Err(TokenError::UnknownText { pos, snippet });
                }
            }
        }
        Ok(out)
    }

    /// The token table as a JSON object in id order.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        for (i, t) in self.tokens.iter().enumerate() {
            let key = serde_json::to_string(t).expect("string serializes");
            let comma = if i + 1 < self.tokens.len() { "," } else { "" };
            out.push_str(&format!("  {key}: {i}{comma}\n"));
        }
        out.push_str("}\n");
        out
    }

    /// Hex SHA-256 of [`Vocabulary::to_json`].
    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

/// Maximum sequence length, framing included.
pub fn max_len(task: Task, side: Side) -> usize {
    match (task, side) {
        (Task::Graph, Side::Source) => 1792,
        _ => 640,
    }
}

/// A framed token sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TokenSeq {
    pub ids: Vec<u32>,
}

impl TokenSeq {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Space-separated ids, as stored in corpus records.
    pub fn to_id_string(&self) -> String {
        self.ids
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_id_string(s: &str) -> Result<Self, TokenError> {
        let ids = s
            .split_whitespace()
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| TokenError::Malformed(format!("bad id `{t}`")))
            })
            .collect::<Result<_, _>>()?;
        Ok(TokenSeq { ids })
    }
}

fn frame(mut body: Vec<u32>, max: usize) -> Result<TokenSeq, TokenError> {
    body.insert(0, SOS);
    body.push(EOS);
    if body.len() > max {
        return Err(TokenError::TooLong {
            len: body.len(),
            max,
        });
    }
    Ok(TokenSeq { ids: body })
}

/// Encodes the states for consecutive sizes as one source sequence.
pub fn encode_states(states: &[QuantumState], task: Task) -> Result<TokenSeq, TokenError> {
    let vocab = Vocabulary::for_task(task, Side::Source);
    let mut ids = Vec::new();
    for (i, s) in states.iter().enumerate() {
        if s.is_empty() {
            return Err(TokenError::Unencodable("empty state".into()));
        }
        match task {
            Task::Optics => {
                if i > 0 {
                    ids.push(vocab.need("|"));
                }
                encode_optics_state(s, vocab, &mut ids)?;
            }
            Task::Circuit | Task::Graph => {
                if i > 0 {
                    ids.push(vocab.need("<SEP>"));
                }
                if s.max_mode().is_some_and(|m| m > 1) {
                    return Err(TokenError::Unencodable(
                        "circuit states are two-level".into(),
                    ));
                }
                let text: String = s
                    .to_text(StateFormat::Circuit)
                    .chars()
                    .filter(|&c| c != ' ')
                    .collect();
                ids.extend(vocab.tokenize(&text)?);
            }
        }
    }
    frame(ids, max_len(task, Side::Source))
}

fn encode_optics_state(
    s: &QuantumState,
    vocab: &Vocabulary,
    ids: &mut Vec<u32>,
) -> Result<(), TokenError> {
    if s.particles() > MAX_OPTICS_PARTICLES {
        return Err(TokenError::Unencodable(format!(
            "{} particles, at most {MAX_OPTICS_PARTICLES} positions are spelled",
            s.particles()
        )));
    }
    for (ket, amp) in s.terms() {
        ids.push(vocab.need(if amp < 0 { "-" } else { "+" }));
        for d in amp.unsigned_abs().to_string().chars() {
            ids.push(vocab.need(&d.to_string()));
        }
        ids.push(vocab.need("["));
        for (pos, &mode) in ket.modes().iter().enumerate() {
            let letter = match mode {
                0 => 'x',
                1 => 'y',
                2 => 'z',
                _ => return Err(TokenError::Unencodable(format!("mode {mode}"))),
            };
            let tok = format!("{}{}", (b'a' + pos as u8) as char, letter);
            ids.push(vocab.need(&tok));
        }
        ids.push(vocab.need("]"));
    }
    Ok(())
}

/// Encodes a code as a target sequence.
pub fn encode_code(code: &MetaCode) -> Result<TokenSeq, TokenError> {
    encode_code_text(&code.to_text(), code.task)
}

pub fn encode_code_text(text: &str, task: Task) -> Result<TokenSeq, TokenError> {
    let vocab = Vocabulary::for_task(task, Side::Target);
    frame(vocab.tokenize(text)?, max_len(task, Side::Target))
}

/// Turns a sequence back into text. Framing and padding tokens are dropped.
/// Source sequences decode to the state texts joined by ` | ` (optics) or
/// ` <SEP> ` (circuit and graph).
pub fn decode(seq: &TokenSeq, task: Task, side: Side) -> Result<String, TokenError> {
    let vocab = Vocabulary::for_task(task, side);
    let mut toks = Vec::with_capacity(seq.len());
    for &id in &seq.ids {
        if matches!(id, PAD | SOS | EOS) {
            continue;
        }
        toks.push(vocab.token(id).ok_or(TokenError::UnknownId(id))?);
    }
    match (task, side) {
        (_, Side::Target) => Ok(toks.concat()),
        (Task::Optics, Side::Source) => decode_optics_states(&toks),
        (_, Side::Source) => {
            let mut out = String::new();
            let mut prev = "";
            for t in toks {
                if t == "<SEP>" {
                    out.push_str(" <SEP> ");
                } else {
                    if t == "+" && prev == ">" {
                        out.push(' ');
                    }
                    out.push_str(t);
                }
                prev = t;
            }
            Ok(out)
        }
    }
}

fn decode_optics_states(toks: &[&str]) -> Result<String, TokenError> {
    let mut out = String::new();
    let mut pos: Option<u8> = None;
    let mut prev = "";
    for &t in toks {
        match t {
            "|" => out.push_str(" | "),
            "[" => {
                pos = Some(0);
                out.push('[');
            }
            "]" => {
                pos = None;
                out.push(']');
            }
            "+" | "-" if prev == "]" => {
                out.push(' ');
                out.push_str(t);
            }
            _ if pos.is_some() => {
                let b = t.as_bytes();
                let p = pos.expect("inside ket");
                if b.len() != 2 || b[0] != b'a' + p || !matches!(b[1], b'x' | b'y' | b'z') {
                    return Err(TokenError::Malformed(format!("`{t}` at ket position {p}")));
                }
                out.push(b[1] as char);
                pos = Some(p + 1);
            }
            _ => out.push_str(t),
        }
        prev = t;
    }
    Ok(out)
}

/// Decodes a source sequence into its states.
pub fn decode_states(seq: &TokenSeq, task: Task) -> Result<Vec<QuantumState>, TokenError> {
    let text = decode(seq, task, Side::Source)?;
    let sep = match task {
        Task::Optics => " | ",
        _ => " <SEP> ",
    };
    text.split(sep)
        .map(|s| {
            QuantumState::parse(s, task.into()).map_err(|e| TokenError::Malformed(e.to_string()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optics(s: &str) -> QuantumState {
        QuantumState::parse(s, StateFormat::Optics).unwrap()
    }

    #[test]
    fn fixed_ids() {
        let o = Vocabulary::optics();
        assert_eq!(o.id("ax"), Some(13));
        assert_eq!(o.id("for ii in range(N):"), Some(43));
        assert_eq!(o.id("N"), Some(49));
        assert_eq!(o.id("ii"), Some(50));
        assert_eq!(o.id("|"), Some(39));
        assert_eq!(Vocabulary::circuit_source().id("<SEP>"), Some(24));
        let t = Vocabulary::circuit_target();
        assert_eq!(t.id("qCNOT"), Some(18));
        assert_eq!(t.id("qCZ"), Some(31));
        assert_eq!(t.id("qToffoli"), Some(29));
        assert_eq!(t.id("NN"), Some(24));
    }

    #[test]
    fn fragment() {
        let mut ids = Vec::new();
        encode_optics_state(&optics("+1[xx]"), Vocabulary::optics(), &mut ids).unwrap();
        assert_eq!(ids, vec![40, 4, 37, 13, 14, 38]);
    }

    #[test]
    fn optics_round_trip() {
        let states = [
            optics("+1[xxxx] +1[yyyy]"),
            optics("-12[xyzxyz] +1[zzzzzz]"),
        ];
        let seq = encode_states(&states, Task::Optics).unwrap();
        assert_eq!(seq.ids[0], SOS);
        assert_eq!(*seq.ids.last().unwrap(), EOS);
        let text = decode(&seq, Task::Optics, Side::Source).unwrap();
        assert_eq!(text, "+1[xxxx] +1[yyyy] | -12[xyzxyz] +1[zzzzzz]");
        assert_eq!(decode_states(&seq, Task::Optics).unwrap(), states);
    }

    #[test]
    fn too_many_particles() {
        let s = optics(&format!("+1[{}]", "x".repeat(10)));
        assert!(matches!(
            encode_states(&[s], Task::Optics),
            Err(TokenError::Unencodable(_))
        ));
    }

    #[test]
    fn circuit_round_trip() {
        let s = QuantumState::parse("1|XX> +1|XY> +1|YX> +-1|YY>", StateFormat::Circuit).unwrap();
        let seq = encode_states(&[s.clone(), s.clone()], Task::Graph).unwrap();
        let text = decode(&seq, Task::Graph, Side::Source).unwrap();
        assert_eq!(
            text,
            "1|XX> +1|XY> +1|YX> +-1|YY> <SEP> 1|XX> +1|XY> +1|YX> +-1|YY>"
        );
        assert_eq!(
            decode_states(&seq, Task::Graph).unwrap(),
            vec![s.clone(), s]
        );
    }

    #[test]
    fn codes() {
        let text = "qH(0)\nfor ii in range(2*NN+1):\n    qCNOT(ii,1+ii)\nqX(0)\n";
        let seq = encode_code_text(text, Task::Circuit).unwrap();
        assert_eq!(&seq.ids[1..4], &[17, 26, 3]);
        assert_eq!(decode(&seq, Task::Circuit, Side::Target).unwrap(), text);
        let text = "e(0,1,0,0,-2)\nfor ii in range(N):\n    e(2*ii,2*ii+1,1,1)\n";
        let seq = encode_code_text(text, Task::Optics).unwrap();
        assert_eq!(decode(&seq, Task::Optics, Side::Target).unwrap(), text);
        assert!(seq.ids.contains(&43));
    }

    #[test]
    fn errors() {
        let seq = TokenSeq {
            ids: vec![1, 999, 2],
        };
        assert_eq!(
            decode(&seq, Task::Optics, Side::Target),
            Err(TokenError::UnknownId(999))
        );
        assert!(matches!(
            encode_code_text("qY(0)\n", Task::Circuit),
            Err(TokenError::UnknownText { pos: 0, .. })
        ));
        let long = "qH(0)\n".repeat(200);
        assert!(matches!(
            encode_code_text(&long, Task::Circuit),
            Err(TokenError::TooLong { .. })
        ));
    }

    #[test]
    fn json_is_ordered_and_stable() {
        let json = Vocabulary::circuit_target().to_json();
        assert!(json.starts_with("{\n  \"<PAD>\": 0,\n  \"<SOS>\": 1,"));
        assert!(json.contains("  \"\\n\": 15,\n"));
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["qCZ"], 31);
        assert_eq!(Vocabulary::optics().sha256(), Vocabulary::optics().sha256());
        assert_eq!(Vocabulary::optics().sha256().len(), 64);
    }
}
