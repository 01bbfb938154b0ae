//! Random training pairs. A sample is a meta-code drawn from a constrained
//! grammar, executed at `N = 0, 1, 2`; the three states form sequence A and
//! the code forms sequence B. Samples that break a constraint are rejected
//! and counted by reason.
//!
//! Every attempt owns a ChaCha8 stream keyed by `(corpus seed, config
//! index, attempt index)`, so a corpus is identical for any thread count and
//! every record can be regenerated from the seed it stores.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::OnceLock;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circuit::GateKind;
use crate::dsl::{DslError, EdgeLine, Formula, GateLine, Line, Loop, MetaCode, Symbol};
use crate::optics::ComputeOptions;
use crate::state::{QuantumState, StateFormat};
use crate::task::Task;
use crate::tokenizer::{self, Side, TokenError, TokenSeq, Vocabulary};

/// Sizes every sample is executed at.
pub const SIZES: [usize; 3] = [0, 1, 2];
/// Formulas must stay in range for every `N` below this.
pub const FORMULA_SIZES: i64 = 8;
const INTS: RangeInclusive<i64> = -4..=4;
const SCALES: [i64; 3] = [0, 1, 2];
const ITS: [i64; 4] = [-1, 0, 1, 2];
const WEIGHTS: [i64; 4] = [1, -1, 2, -2];
const MAX_REDRAWS: usize = 16;

#[derive(Debug, thiserror::Error)]
pub enum DatagenError {
    #[error("unknown config `{0}`")]
    UnknownConfig(String),
    #[error("no configs requested")]
    NoConfigs,
    #[error(
        "{tag}: {accepted} of {quota} records after {attempts} attempts (rejections: {histogram})"
    )]
    Stalled {
        tag: String,
        quota: usize,
        accepted: usize,
        attempts: u64,
        histogram: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One cell of the optics grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpticsConfig {
    pub long_code: bool,
    /// 1 or 2.
    pub min_degree: u8,
    /// 2 or 3.
    pub dim: u8,
    pub weighted: bool,
    pub long_state: bool,
}

/// What kind of sample to draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenConfig {
    Optics(OpticsConfig),
    Circuit,
    Graph,
}

impl GenConfig {
    /// The 32 optics configs in tag order.
    pub fn optics_grid() -> Vec<GenConfig> {
        let mut out = Vec::with_capacity(32);
        for long_code in [true, false] {
            for min_degree in [1, 2] {
                for dim in [2, 3] {
                    for weighted in [true, false] {
                        for long_state in [true, false] {
                            out.push(GenConfig::Optics(OpticsConfig {
                                long_code,
                                min_degree,
                                dim,
                                weighted,
                                long_state,
                            }));
                        }
                    }
                }
            }
        }
        out
    }

    /// Comma-separated tags or the groups `optics`, `circuit`, `graph`.
    pub fn parse_list(list: &str) -> Result<Vec<GenConfig>, DatagenError> {
        let mut out = Vec::new();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.to_ascii_lowercase().as_str() {
                "optics" => out.extend(GenConfig::optics_grid()),
                _ => out.push(item.parse()?),
            }
        }
        if out.is_empty() {
            return Err(DatagenError::NoConfigs);
        }
        Ok(out)
    }

    pub fn task(self) -> Task {
        match self {
            GenConfig::Optics(_) => Task::Optics,
            GenConfig::Circuit => Task::Circuit,
            GenConfig::Graph => Task::Graph,
        }
    }

    pub fn tag(self) -> String {
        match self {
            GenConfig::Optics(c) => format!(
                "{}_DEG{}_DIM{}_{}_{}",
                if c.long_code { "LONGCODE" } else { "SHORTCODE" },
                c.min_degree,
                c.dim,
                if c.weighted { "WEIGHTED" } else { "UNWEIGHTED" },
                if c.long_state {
                    "LONGSTATE"
                } else {
                    "SHORTSTATE"
                },
            ),
            GenConfig::Circuit => "CIRCUIT".into(),
            GenConfig::Graph => "GRAPH".into(),
        }
    }

    /// Allowed line counts before, inside and after the loop.
    pub fn line_bounds(self) -> [RangeInclusive<usize>; 3] {
        match self {
            GenConfig::Optics(c) if c.long_code => [4..=12, 2..=12, 0..=0],
            GenConfig::Optics(_) => [4..=8, 2..=6, 0..=0],
            GenConfig::Circuit | GenConfig::Graph => [1..=5, 1..=5, 1..=5],
        }
    }

    /// Maximum term counts of the three states, if capped.
    pub fn term_caps(self) -> Option<[usize; 3]> {
        match self {
            GenConfig::Optics(c) if c.long_state => Some([8, 16, 32]),
            GenConfig::Optics(_) => Some([6, 6, 6]),
            _ => None,
        }
    }
}

impl fmt::Display for GenConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl FromStr for GenConfig {
    type Err = DatagenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || DatagenError::UnknownConfig(s.to_string());
        match s.to_ascii_uppercase().as_str() {
            "CIRCUIT" => return Ok(GenConfig::Circuit),
            "GRAPH" => return Ok(GenConfig::Graph),
            _ => {}
        }
        let parts: Vec<String> = s.split('_').map(|p| p.to_ascii_uppercase()).collect();
        let [code, deg, dim, weight, state] = parts.as_slice() else {
            return Err(unknown());
        };
        let pick = |v: &str, yes: &str, no: &str| match v {
            _ if v == yes => Ok(true),
            _ if v == no => Ok(false),
            _ => Err(unknown()),
        };
        let c = OpticsConfig {
            long_code: pick(code, "LONGCODE", "SHORTCODE")?,
            min_degree: if pick(deg, "DEG2", "DEG1")? { 2 } else { 1 },
            dim: if pick(dim, "DIM3", "DIM2")? { 3 } else { 2 },
            weighted: pick(weight, "WEIGHTED", "UNWEIGHTED")?,
            long_state: pick(state, "LONGSTATE", "SHORTSTATE")?,
        };
        Ok(GenConfig::Optics(c))
    }
}

/// Why an attempt produced no record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, thiserror::Error)]
pub enum Rejection {
    #[error("no collision-free argument could be drawn")]
    ArgumentCollision,
    #[error("instantiation failed")]
    Instantiation,
    #[error("simulation overflowed")]
    Overflow,
    #[error("a state is empty")]
    EmptyState,
    #[error("a vertex has too few edges")]
    MinDegree,
    #[error("a state has too many terms")]
    TermCap,
    #[error("amplitude ratios are not integers")]
    Postprocess,
    #[error("a state cannot be spelled by the vocabulary")]
    Unencodable,
    #[error("a token sequence is too long")]
    TokenLength,
    #[error("the code was drawn before")]
    Duplicate,
}

impl Rejection {
    pub fn name(self) -> &'static str {
        match self {
            Rejection::ArgumentCollision => "argument_collision",
            Rejection::Instantiation => "instantiation",
            Rejection::Overflow => "overflow",
            Rejection::EmptyState => "empty_state",
            Rejection::MinDegree => "min_degree",
            Rejection::TermCap => "term_cap",
            Rejection::Postprocess => "postprocess",
            Rejection::Unencodable => "unencodable",
            Rejection::TokenLength => "token_length",
            Rejection::Duplicate => "duplicate",
        }
    }
}

impl From<TokenError> for Rejection {
    fn from(e: TokenError) -> Self {
        match e {
            TokenError::TooLong { .. } => Rejection::TokenLength,
            _ => Rejection::Unencodable,
        }
    }
}

/// Formula sets for one task: the pool outside the loop and, per allowed
/// loop range, the pool inside it.
struct Pools {
    outer: Vec<Formula>,
    loops: Vec<(Formula, Vec<Formula>)>,
}

fn pools(task: Task) -> &'static Pools {
    static OPTICS: OnceLock<Pools> = OnceLock::new();
    static GATES: OnceLock<Pools> = OnceLock::new();
    match task {
        Task::Optics => OPTICS.get_or_init(|| build_pools(Task::Optics)),
        Task::Circuit | Task::Graph => GATES.get_or_init(|| build_pools(Task::Circuit)),
    }
}

/// Largest index a formula may reach at size `n`.
fn index_bound(task: Task, n: i64) -> i64 {
    task.particles(n as usize) as i64 - 1
}

/// `(N, ii)` pairs a formula is checked at: every `N < 8`, and inside the
/// loop every `ii` the loop visits.
fn admissible(range: Option<&Formula>) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for n in 0..FORMULA_SIZES {
        match range {
            None => out.push((n, 0)),
            Some(r) => out.extend((0..r.eval(n, 0).max(0)).map(|ii| (n, ii))),
        }
    }
    out
}

fn in_bounds(task: Task, f: &Formula, points: &[(i64, i64)]) -> bool {
    points
        .iter()
        .all(|&(n, ii)| (0..=index_bound(task, n)).contains(&f.eval(n, ii)))
}

fn make_formula(task: Task, c0: i64, cn: i64, cii: i64) -> Formula {
    let terms = [
        (Symbol::Const, c0),
        (Symbol::Size, cn),
        (Symbol::Index, cii),
    ];
    let ordered: Vec<(Symbol, i64)> = match task {
        Task::Optics => terms.into_iter().rev().collect(),
        _ => terms.into_iter().collect(),
    };
    Formula::from_terms(ordered).expect("distinct symbols")
}

fn candidates(task: Task, its: &[i64]) -> Vec<Formula> {
    let mut out = Vec::new();
    for cii in its {
        for cn in SCALES {
            for c0 in INTS {
                out.push(make_formula(task, c0, cn, *cii));
            }
        }
    }
    out
}

fn build_pools(task: Task) -> Pools {
    let outer_points = admissible(None);
    let outer: Vec<Formula> = candidates(task, &[0])
        .into_iter()
        .filter(|f| in_bounds(task, f, &outer_points))
        .collect();
    let ranges: Vec<Formula> = match task {
        Task::Optics => vec![Formula::from_terms([(Symbol::Size, 1)]).expect("one term")],
        _ => candidates(task, &[0])
            .into_iter()
            .filter(|r| {
                let ok = (0..FORMULA_SIZES)
                    .all(|n| (0..=index_bound(task, n) + 1).contains(&r.eval(n, 0)));
                ok && (0..FORMULA_SIZES).any(|n| r.eval(n, 0) > 0)
            })
            .collect(),
    };
    let loops = ranges
        .into_iter()
        .map(|r| {
            let points = admissible(Some(&r));
            let inner = candidates(task, &ITS)
                .into_iter()
                .filter(|f| in_bounds(task, f, &points))
                .collect();
            (r, inner)
        })
        .collect();
    Pools { outer, loops }
}

/// True if two formulas take the same value at some admissible point.
fn collide(a: &Formula, b: &Formula, points: &[(i64, i64)]) -> bool {
    points.iter().any(|&(n, ii)| a.eval(n, ii) == b.eval(n, ii))
}

/// Draws `count` arguments; each later one is redrawn while it collides
/// with an earlier one.
fn draw_args<R: Rng>(
    rng: &mut R,
    pool: &[Formula],
    points: &[(i64, i64)],
    count: usize,
) -> Result<Vec<Formula>, Rejection> {
    let mut args: Vec<Formula> = Vec::with_capacity(count);
    for _ in 0..count {
        let mut tries = 0;
        loop {
            let f = pool.choose(rng).expect("non-empty pool").clone();
            if !args.iter().any(|a| collide(a, &f, points)) {
                args.push(f);
                break;
            }
            tries += 1;
            if tries > MAX_REDRAWS {
                return Err(Rejection::ArgumentCollision);
            }
        }
    }
    Ok(args)
}

fn draw_line<R: Rng>(
    rng: &mut R,
    config: GenConfig,
    pool: &[Formula],
    points: &[(i64, i64)],
) -> Result<Line, Rejection> {
    match config {
        GenConfig::Optics(c) => {
            let mut args = draw_args(rng, pool, points, 2)?.into_iter();
            let (u, v) = (args.next().expect("two"), args.next().expect("two"));
            let mu = rng.random_range(0..c.dim);
            let mv = rng.random_range(0..c.dim);
            let w = if c.weighted {
                *WEIGHTS.choose(rng).expect("non-empty")
            } else {
                1
            };
            Ok(Line::Edge(EdgeLine { u, v, mu, mv, w }))
        }
        GenConfig::Circuit | GenConfig::Graph => {
            let kind = match config {
                GenConfig::Graph => GateKind::Cz,
                _ => *GateKind::ALL.choose(rng).expect("non-empty"),
            };
            let args = draw_args(rng, pool, points, kind.arity())?;
            Ok(Line::Gate(GateLine { kind, args }))
        }
    }
}

/// Draws a random code for `config`. Only argument collisions are checked
/// here; everything else is checked by execution.
pub fn draw_code<R: Rng>(config: GenConfig, rng: &mut R) -> Result<MetaCode, Rejection> {
    let task = config.task();
    let p = pools(task);
    let [pre_n, body_n, post_n] = config.line_bounds().map(|b| rng.random_range(b));
    let (range, inner) = p.loops.choose(rng).expect("at least one loop range");
    let outer_points = admissible(None);
    let inner_points = admissible(Some(range));
    let mut draw =
        |n: usize, pool: &[Formula], points: &[(i64, i64)]| -> Result<Vec<Line>, Rejection> {
            (0..n)
                .map(|_| draw_line(rng, config, pool, points))
                .collect()
        };
    let pre = draw(pre_n, &p.outer, &outer_points)?;
    let lines = draw(body_n, inner, &inner_points)?;
    let post = draw(post_n, &p.outer, &outer_points)?;
    Ok(MetaCode {
        task,
        pre,
        body: Some(Loop {
            range: range.clone(),
            lines,
        }),
        post,
    })
}

/// Runs a code at `N = 0, 1, 2` and applies the state-side constraints of
/// `config`. States come back canonical.
pub fn execute(code: &MetaCode, config: GenConfig) -> Result<Vec<QuantumState>, Rejection> {
    let caps = config.term_caps();
    let mut states = Vec::with_capacity(SIZES.len());
    for (i, &n) in SIZES.iter().enumerate() {
        let state = match config {
            GenConfig::Optics(c) => {
                let setup = code
                    .instantiate_setup(n)
                    .map_err(|_| Rejection::Instantiation)?;
                if setup.min_degree() < usize::from(c.min_degree) {
                    return Err(Rejection::MinDegree);
                }
                setup
                    .compute_state_with(&ComputeOptions::default())
                    .map_err(|_| Rejection::Overflow)?
            }
            GenConfig::Circuit | GenConfig::Graph => {
                let prog = code
                    .instantiate_circuit(n)
                    .map_err(|_| Rejection::Instantiation)?;
                let sv = prog.run().map_err(|_| Rejection::Overflow)?;
                sv.postprocess().map_err(|_| Rejection::Postprocess)?
            }
        };
        if state.is_empty() {
            return Err(Rejection::EmptyState);
        }
        if caps.is_some_and(|c| state.len() > c[i]) {
            return Err(Rejection::TermCap);
        }
        states.push(state.canonical());
    }
    Ok(states)
}

/// The state texts joined the way [`tokenizer::decode`] renders them.
pub fn states_text(states: &[QuantumState], task: Task) -> String {
    let sep = match task {
        Task::Optics => " | ",
        _ => " <SEP> ",
    };
    let format = StateFormat::from(task);
    states
        .iter()
        .map(|s| s.to_text(format))
        .collect::<Vec<_>>()
        .join(sep)
}

/// An accepted sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub config: GenConfig,
    pub seed: u64,
    pub code: MetaCode,
    pub states: Vec<QuantumState>,
    pub a: TokenSeq,
    pub b: TokenSeq,
}

impl Sample {
    pub fn record(&self) -> Record {
        Record {
            a_ids: self.a.to_id_string(),
            b_ids: self.b.to_id_string(),
            a_text: states_text(&self.states, self.config.task()),
            b_text: self.code.to_text(),
            config: self.config.tag(),
            seed: self.seed,
        }
    }
}

/// Checks a code against `config` and tokenizes it with its states.
pub fn finish(code: MetaCode, config: GenConfig, seed: u64) -> Result<Sample, Rejection> {
    let states = execute(&code, config)?;
    let a = tokenizer::encode_states(&states, config.task())?;
    let b = tokenizer::encode_code(&code)?;
    Ok(Sample {
        config,
        seed,
        code,
        states,
        a,
        b,
    })
}

/// Draws and checks one sample from its own seed.
pub fn generate_sample(config: GenConfig, seed: u64) -> Result<Sample, Rejection> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let code = draw_code(config, &mut rng)?;
    finish(code, config, seed)
}

/// Seed of attempt `attempt` for the config at position `config_index`.
pub fn attempt_seed(corpus_seed: u64, config_index: usize, attempt: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(corpus_seed);
    rng.set_stream(config_index as u64);
    rng.set_word_pos(u128::from(attempt) * 2);
    rng.next_u64()
}

/// One corpus line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub a_ids: String,
    pub b_ids: String,
    pub a_text: String,
    pub b_text: String,
    pub config: String,
    pub seed: u64,
}

/// How many records of each config to produce.
#[derive(Clone, Debug)]
pub struct CorpusPlan {
    pub quotas: Vec<(GenConfig, usize)>,
    pub seed: u64,
    /// Attempts evaluated in parallel before results are consumed in order.
    pub batch: usize,
    /// A config fails once its attempts exceed `quota * factor + 10_000`.
    pub attempt_factor: u64,
}

impl CorpusPlan {
    /// Splits `total` evenly; the first `total % len` configs get one more.
    pub fn uniform(configs: &[GenConfig], total: usize, seed: u64) -> Self {
        let k = configs.len().max(1);
        let quotas = configs
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, total / k + usize::from(i < total % k)))
            .collect();
        CorpusPlan {
            quotas,
            seed,
            batch: 512,
            attempt_factor: 2_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigStats {
    pub config: String,
    pub quota: usize,
    pub accepted: usize,
    pub attempts: u64,
    pub rejections: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub total: usize,
    pub configs: Vec<ConfigStats>,
    pub rejections: BTreeMap<String, u64>,
    pub vocab_sha256: BTreeMap<String, String>,
    pub corpus_file: String,
    pub corpus_sha256: String,
}

impl Manifest {
    /// Where the manifest of the corpus at `corpus` lives.
    pub fn path_for(corpus: &Path) -> PathBuf {
        let mut name = corpus.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }
}

/// Records in shuffled order plus per-config statistics.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub seed: u64,
    pub records: Vec<Record>,
    pub stats: Vec<ConfigStats>,
}

impl Corpus {
    /// JSON lines, one record each.
    pub fn to_jsonl(&self) -> Result<Vec<u8>, DatagenError> {
        let mut out = Vec::new();
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.push(b'\n');
        }
        Ok(out)
    }
}

/// Generates every quota of `plan` on the current rayon pool.
pub fn generate(plan: &CorpusPlan) -> Result<Corpus, DatagenError> {
    if plan.quotas.is_empty() {
        return Err(DatagenError::NoConfigs);
    }
    let mut seen: HashSet<String> = HashSet::new();
    let mut records = Vec::new();
    let mut stats = Vec::new();
    let batch = plan.batch.max(1) as u64;
    for (index, &(config, quota)) in plan.quotas.iter().enumerate() {
        let limit = quota as u64 * plan.attempt_factor + 10_000;
        let mut st = ConfigStats {
            config: config.tag(),
            quota,
            accepted: 0,
            attempts: 0,
            rejections: BTreeMap::new(),
        };
        while st.accepted < quota {
            if st.attempts >= limit {
                let histogram = serde_json::to_string(&st.rejections)?;
                return Err(DatagenError::Stalled {
                    tag: st.config,
                    quota,
                    accepted: st.accepted,
                    attempts: st.attempts,
                    histogram,
                });
            }
            let start = st.attempts;
            let results: Vec<Result<Sample, Rejection>> = (start..start + batch)
                .into_par_iter()
                .map(|a| generate_sample(config, attempt_seed(plan.seed, index, a)))
                .collect();
            for result in results {
                if st.accepted == quota {
                    break;
                }
                st.attempts += 1;
                let outcome = result.and_then(|s| {
                    let r = s.record();
                    if seen.insert(r.b_text.clone()) {
                        Ok(r)
                    } else {
                        Err(Rejection::Duplicate)
                    }
                });
                match outcome {
                    Ok(r) => {
                        records.push(r);
                        st.accepted += 1;
                    }
                    Err(why) => *st.rejections.entry(why.name().to_string()).or_insert(0) += 1,
                }
            }
        }
        stats.push(st);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    rng.set_stream(u64::MAX);
    records.shuffle(&mut rng);
    Ok(Corpus {
        seed: plan.seed,
        records,
        stats,
    })
}

/// Generates a corpus, writes it to `out` as JSON lines and writes the
/// manifest next to it.
pub fn generate_corpus(plan: &CorpusPlan, out: &Path) -> Result<Manifest, DatagenError> {
    let corpus = generate(plan)?;
    write_corpus(&corpus, out)
}

pub fn write_corpus(corpus: &Corpus, out: &Path) -> Result<Manifest, DatagenError> {
    let bytes = corpus.to_jsonl()?;
    let mut f = BufWriter::new(File::create(out)?);
    f.write_all(&bytes)?;
    f.flush()?;
    let mut rejections = BTreeMap::new();
    for st in &corpus.stats {
        for (k, v) in &st.rejections {
            *rejections.entry(k.clone()).or_insert(0) += v;
        }
    }
    let vocab_sha256 = [
        Vocabulary::optics(),
        Vocabulary::circuit_source(),
        Vocabulary::circuit_target(),
    ]
    .into_iter()
    .map(|v| (v.name().to_string(), v.sha256()))
    .collect();
    let manifest = Manifest {
        seed: corpus.seed,
        total: corpus.records.len(),
        configs: corpus.stats.clone(),
        rejections,
        vocab_sha256,
        corpus_file: out
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        corpus_sha256: hex::encode(Sha256::digest(&bytes)),
    };
    std::fs::write(
        Manifest::path_for(out),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(manifest)
}

/// A record that fails re-execution or a constraint.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Config(#[from] ConfigParseError),
    #[error("code does not parse: {0}")]
    Code(#[from] DslError),
    #[error("re-execution rejected the code: {0}")]
    Rejected(#[from] Rejection),
    #[error("{0} does not match re-execution")]
    Mismatch(&'static str),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("token sequence: {0}")]
    Token(#[from] TokenError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown config `{0}`")]
pub struct ConfigParseError(pub String);

/// Checks that a record is exactly what its seed and code produce and that
/// it obeys every constraint of its config.
pub fn verify_record(r: &Record) -> Result<(), VerifyError> {
    let config: GenConfig = r
        .config
        .parse()
        .map_err(|_| ConfigParseError(r.config.clone()))?;
    let task = config.task();
    let code = MetaCode::parse(&r.b_text, task)?;
    if code.to_text() != r.b_text {
        return Err(VerifyError::Mismatch("code text"));
    }
    check_code(&code, config)?;
    let sample = finish(code, config, r.seed)?;
    let expected = sample.record();
    if expected.a_text != r.a_text {
        return Err(VerifyError::Mismatch("state text"));
    }
    if expected.a_ids != r.a_ids {
        return Err(VerifyError::Mismatch("state tokens"));
    }
    if expected.b_ids != r.b_ids {
        return Err(VerifyError::Mismatch("code tokens"));
    }
    if tokenizer::decode(&sample.a, task, Side::Source)? != r.a_text {
        return Err(VerifyError::Mismatch("decoded state tokens"));
    }
    if tokenizer::decode(&sample.b, task, Side::Target)? != r.b_text {
        return Err(VerifyError::Mismatch("decoded code tokens"));
    }
    if let GenConfig::Optics(c) = config {
        for s in &sample.states {
            if s.max_mode().is_some_and(|m| m >= c.dim) {
                return Err(VerifyError::Constraint(format!(
                    "mode above dimension {}",
                    c.dim
                )));
            }
            if !c.weighted && s.terms().any(|(_, a)| a < 0) {
                return Err(VerifyError::Constraint(
                    "negative amplitude from an unweighted setup".into(),
                ));
            }
        }
    }
    match generate_sample(config, r.seed) {
        Ok(s) if s.code == sample.code => Ok(()),
        _ => Err(VerifyError::Mismatch("code regenerated from the seed")),
    }
}

/// Grammar-side constraints: line counts, formula pools, modes, weights,
/// gate kinds and argument collisions.
pub fn check_code(code: &MetaCode, config: GenConfig) -> Result<(), VerifyError> {
    let bad = |msg: String| Err(VerifyError::Constraint(msg));
    let p = pools(config.task());
    let [pre_b, body_b, post_b] = config.line_bounds();
    let Some(body) = &code.body else {
        return bad("no loop".into());
    };
    for (name, n, b) in [
        ("pre", code.pre.len(), pre_b),
        ("body", body.lines.len(), body_b),
        ("post", code.post.len(), post_b),
    ] {
        if !b.contains(&n) {
            return bad(format!("{n} {name} lines, allowed {b:?}"));
        }
    }
    let Some((_, inner)) = p.loops.iter().find(|(r, _)| *r == body.range) else {
        return bad(format!("loop range {}", body.range.print(code.task)));
    };
    let outer_points = admissible(None);
    let inner_points = admissible(Some(&body.range));
    let outer = code
        .pre
        .iter()
        .chain(&code.post)
        .map(|l| (l, &p.outer, &outer_points));
    for (line, pool, points) in outer.chain(body.lines.iter().map(|l| (l, inner, &inner_points))) {
        let args: Vec<&Formula> = match line {
            Line::Edge(e) => {
                let GenConfig::Optics(c) = config else {
                    return bad("edge in a gate code".into());
                };
                if e.mu >= c.dim || e.mv >= c.dim {
                    return bad(format!("mode above dimension {}", c.dim));
                }
                let allowed: &[i64] = if c.weighted { &WEIGHTS } else { &[1] };
                if !allowed.contains(&e.w) {
                    return bad(format!("weight {}", e.w));
                }
                vec![&e.u, &e.v]
            }
            Line::Gate(g) => {
                if config == GenConfig::Graph && g.kind != GateKind::Cz {
                    return bad(format!("{} in a graph code", g.kind));
                }
                g.args.iter().collect()
            }
        };
        for (i, a) in args.iter().enumerate() {
            if !pool.contains(a) {
                return bad(format!("formula {} outside its pool", a.print(code.task)));
            }
            if args[..i].iter().any(|b| collide(a, b, points)) {
                return bad(format!(
                    "colliding arguments in `{}`",
                    line.print(code.task)
                ));
            }
        }
    }
    Ok(())
}
