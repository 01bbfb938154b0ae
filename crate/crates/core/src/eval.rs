//! Scoring candidate meta-codes against a target family: one fidelity per
//! size index, the longest fully correct prefix, best-candidate selection,
//! a scan of a corpus for its closest states, and CSV/JSON reports.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::Record;
use crate::dsl::{DslError, MetaCode};
use crate::optics::{ComputeOptions, OpticsError};
use crate::state::{is_unit, ratio_to_f64, QuantumState, StateFormat};
use crate::targets::{self, TargetClass};
use crate::task::Task;

/// Size indices averaged over in the second selection stage.
pub const MEAN_SIZES: usize = 5;
pub const DEFAULT_BUDGET: Duration = Duration::from_secs(60);
/// Bins of the overlap histogram over `[0, 1]`.
pub const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Code { path: String, source: DslError },
    #[error("no `.code` files in {0}")]
    NoCandidates(String),
    #[error(transparent)]
    Target(#[from] targets::TargetError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Where a candidate came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    ModelSample,
    Corpus,
    Handwritten,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub id: String,
    pub origin: Origin,
    pub code: MetaCode,
}

impl Candidate {
    pub fn new(id: impl Into<String>, origin: Origin, code: MetaCode) -> Self {
        Candidate {
            id: id.into(),
            origin,
            code,
        }
    }

    /// Reads one `.code` file; the id is the file stem.
    pub fn load_file(path: &Path, task: Task, origin: Origin) -> Result<Self, EvalError> {
        let shown = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|source| EvalError::Io {
            path: shown.clone(),
            source,
        })?;
        let code = MetaCode::parse(&text, task).map_err(|source| EvalError::Code {
            path: shown,
            source,
        })?;
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(Candidate { id, origin, code })
    }

    /// Reads a file, or every `.code` file of a directory in id order.
    pub fn load(path: &Path, task: Task, origin: Origin) -> Result<Vec<Self>, EvalError> {
        if !path.is_dir() {
            return Ok(vec![Candidate::load_file(path, task, origin)?]);
        }
        let shown = path.display().to_string();
        let io = |source| EvalError::Io {
            path: shown.clone(),
            source,
        };
        let mut paths = Vec::new();
        for entry in fs::read_dir(path).map_err(io)? {
            let p = entry.map_err(io)?.path();
            if p.extension().is_some_and(|e| e == "code") {
                paths.push(p);
            }
        }
        if paths.is_empty() {
            return Err(EvalError::NoCandidates(shown));
        }
        let mut out = paths
            .iter()
            .map(|p| Candidate::load_file(p, task, origin))
            .collect::<Result<Vec<_>, _>>()?;
        out.sort_by(|a, b| id_order(&a.id, &b.id));
        Ok(out)
    }
}

/// Orders ids by their text before a trailing number, then by that number,
/// so `GHZ_2` sorts before `GHZ_10`.
pub fn id_order(a: &str, b: &str) -> Ordering {
    fn split(s: &str) -> (&str, Option<u128>) {
        let digits = s.bytes().rev().take_while(u8::is_ascii_digit).count();
        let (head, tail) = s.split_at(s.len() - digits);
        (head, tail.parse().ok())
    }
    split(a).cmp(&split(b)).then_with(|| a.cmp(b))
}

/// What happened at one size index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    Ok,
    Instantiation,
    EmptyState,
    Postprocess,
    Overflow,
    Timeout,
    /// The target family has no member at this size.
    NoTarget,
}

impl Flag {
    pub fn name(self) -> &'static str {
        match self {
            Flag::Ok => "ok",
            Flag::Instantiation => "instantiation",
            Flag::EmptyState => "empty_state",
            Flag::Postprocess => "postprocess",
            Flag::Overflow => "overflow",
            Flag::Timeout => "timeout",
            Flag::NoTarget => "no_target",
        }
    }
}

/// Fidelity of one candidate at one size index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub n: usize,
    pub fidelity: f64,
    /// Exactly one, decided on the rational value.
    pub exact: bool,
    pub flag: Flag,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub candidate: String,
    pub target: String,
    pub task: Task,
    pub points: Vec<Point>,
    /// Largest `N` with every fidelity up to it exactly one.
    pub max_correct_n: Option<usize>,
    /// Number of leading exact ones, i.e. `max_correct_n + 1`.
    pub correct_states: usize,
}

impl EvalResult {
    pub fn from_points(candidate: &str, target: &str, task: Task, points: Vec<Point>) -> Self {
        let correct_states = points.iter().take_while(|p| p.exact).count();
        EvalResult {
            candidate: candidate.to_string(),
            target: target.to_string(),
            task,
            max_correct_n: correct_states.checked_sub(1),
            correct_states,
            points,
        }
    }

    pub fn fidelities(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.fidelity).collect()
    }

    /// Mean fidelity over `N < MEAN_SIZES`.
    pub fn screening_mean(&self) -> f64 {
        let head: Vec<f64> = self
            .points
            .iter()
            .take(MEAN_SIZES)
            .map(|p| p.fidelity)
            .collect();
        if head.is_empty() {
            0.0
        } else {
            head.iter().sum::<f64>() / head.len() as f64
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EvalOptions {
    pub n_max: usize,
    /// Wall-clock allowance for simulating one size index.
    pub budget: Duration,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            n_max: 4,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// The state a code produces at `n`, canonicalized, or the reason it has
/// none.
pub fn simulate(code: &MetaCode, n: usize, budget: Duration) -> Result<QuantumState, Flag> {
    let state = match code.task {
        Task::Optics => {
            let setup = code.instantiate_setup(n).map_err(|_| Flag::Instantiation)?;
            let opts = ComputeOptions {
                deadline: Some(Instant::now() + budget),
                parallel: false,
            };
            setup.compute_state_with(&opts).map_err(|e| match e {
                OpticsError::Timeout => Flag::Timeout,
                _ => Flag::Overflow,
            })?
        }
        Task::Circuit | Task::Graph => {
            let prog = code
                .instantiate_circuit(n)
                .map_err(|_| Flag::Instantiation)?;
            let sv = prog.run().map_err(|_| Flag::Overflow)?;
            sv.postprocess().map_err(|_| Flag::Postprocess)?
        }
    };
    if state.is_empty() {
        return Err(Flag::EmptyState);
    }
    Ok(state.canonical())
}

fn score(state: Result<QuantumState, Flag>, target: Option<&QuantumState>, n: usize) -> Point {
    let zero = |flag| Point {
        n,
        fidelity: 0.0,
        exact: false,
        flag,
    };
    let Some(target) = target else {
        return zero(Flag::NoTarget);
    };
    match state {
        Err(flag) => zero(flag),
        Ok(s) => match s.fidelity_exact(target) {
            Ok(f) => Point {
                n,
                fidelity: ratio_to_f64(&f),
                exact: is_unit(&f),
                flag: Flag::Ok,
            },
            Err(_) => zero(Flag::Instantiation),
        },
    }
}

/// Target states for `0..=n_max`; sizes the family does not reach are `None`.
pub fn target_states(
    task: Task,
    class: TargetClass,
    n_max: usize,
) -> Result<Vec<Option<QuantumState>>, EvalError> {
    targets::info(task, class)?;
    Ok((0..=n_max)
        .map(|n| targets::target_state(task, class, n).ok())
        .collect())
}

/// Evaluates one candidate at `N = 0..=n_max`.
pub fn evaluate(
    candidate: &Candidate,
    class: TargetClass,
    opts: &EvalOptions,
) -> Result<EvalResult, EvalError> {
    let task = candidate.code.task;
    let targets = target_states(task, class, opts.n_max)?;
    let points = (0..=opts.n_max)
        .map(|n| {
            score(
                simulate(&candidate.code, n, opts.budget),
                targets[n].as_ref(),
                n,
            )
        })
        .collect();
    Ok(EvalResult::from_points(
        &candidate.id,
        class.name(),
        task,
        points,
    ))
}

/// Evaluates every candidate, parallel over candidates and sizes. Results
/// keep the input order.
pub fn evaluate_all(
    candidates: &[Candidate],
    class: TargetClass,
    opts: &EvalOptions,
) -> Result<Vec<EvalResult>, EvalError> {
    let Some(first) = candidates.first() else {
        return Ok(Vec::new());
    };
    let task = first.code.task;
    let targets = target_states(task, class, opts.n_max)?;
    let sizes = opts.n_max + 1;
    let points: Vec<Point> = (0..candidates.len() * sizes)
        .into_par_iter()
        .map(|k| {
            let (c, n) = (&candidates[k / sizes], k % sizes);
            let target = if c.code.task == task {
                targets[n].as_ref()
            } else {
                None
            };
            score(simulate(&c.code, n, opts.budget), target, n)
        })
        .collect();
    Ok(candidates
        .iter()
        .zip(points.chunks(sizes))
        .map(|(c, p)| EvalResult::from_points(&c.id, class.name(), c.code.task, p.to_vec()))
        .collect())
}

/// How the winner was chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub best: String,
    /// Index of the winner in the input.
    pub index: usize,
    /// Longest correct prefix over all candidates, in states.
    pub best_correct_states: usize,
    /// Candidates that reach it.
    pub prefix_leaders: Vec<String>,
    /// Their mean fidelity over `N < MEAN_SIZES`.
    pub means: Vec<(String, f64)>,
    /// Ids still tied after comparing means.
    pub tied: Vec<String>,
}

/// Keeps the candidates with the longest all-ones prefix, then the highest
/// mean fidelity over `N < MEAN_SIZES`, then the lowest id.
pub fn select_best(results: &[EvalResult]) -> Option<Selection> {
    let best_correct_states = results.iter().map(|r| r.correct_states).max()?;
    let leaders: Vec<usize> = (0..results.len())
        .filter(|&i| results[i].correct_states == best_correct_states)
        .collect();
    let means: Vec<(usize, f64)> = leaders
        .iter()
        .map(|&i| (i, results[i].screening_mean()))
        .collect();
    let top = means
        .iter()
        .map(|&(_, m)| m)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut tied: Vec<usize> = means
        .iter()
        .filter(|&&(_, m)| m == top)
        .map(|&(i, _)| i)
        .collect();
    tied.sort_by(|&a, &b| id_order(&results[a].candidate, &results[b].candidate).then(a.cmp(&b)));
    let index = tied[0];
    let id = |i: usize| results[i].candidate.clone();
    Some(Selection {
        best: id(index),
        index,
        best_correct_states,
        prefix_leaders: leaders.iter().map(|&i| id(i)).collect(),
        means: means.iter().map(|&(i, m)| (id(i), m)).collect(),
        tied: tied.iter().map(|&i| id(i)).collect(),
    })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    candidate: &'a str,
    class: &'a str,
    n: usize,
    fidelity: f64,
    exact: bool,
    flag: &'static str,
}

/// One row per candidate and size.
pub fn to_csv(results: &[EvalResult]) -> Result<String, EvalError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in results {
        for p in &r.points {
            w.serialize(CsvRow {
                candidate: &r.candidate,
                class: &r.target,
                n: p.n,
                fidelity: p.fidelity,
                exact: p.exact,
                flag: p.flag.name(),
            })?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateSummary {
    pub id: String,
    pub max_correct_n: Option<usize>,
    pub correct_states: usize,
    pub screening_mean: f64,
    pub fidelities: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub task: Task,
    pub target: String,
    pub n_max: usize,
    pub candidates: Vec<CandidateSummary>,
    pub selection: Option<Selection>,
}

pub fn summarize(task: Task, class: TargetClass, n_max: usize, results: &[EvalResult]) -> Summary {
    Summary {
        task,
        target: class.name().to_string(),
        n_max,
        candidates: results
            .iter()
            .map(|r| CandidateSummary {
                id: r.candidate.clone(),
                max_correct_n: r.max_correct_n,
                correct_states: r.correct_states,
                screening_mean: r.screening_mean(),
                fidelities: r.fidelities(),
            })
            .collect(),
        selection: select_best(results),
    }
}

/// Writes `<slug>.csv` and `<slug>.json` into `dir`.
pub fn write_report(
    dir: &Path,
    class: TargetClass,
    summary: &Summary,
    results: &[EvalResult],
) -> Result<(), EvalError> {
    let io = |source| EvalError::Io {
        path: dir.display().to_string(),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join(format!("{}.csv", class.slug())), to_csv(results)?).map_err(io)?;
    fs::write(
        dir.join(format!("{}.json", class.slug())),
        serde_json::to_string_pretty(summary)? + "\n",
    )
    .map_err(io)?;
    Ok(())
}

/// Closest corpus states to one target family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    pub target: String,
    /// Highest fidelity per size index; `None` if no record reached it.
    pub max: Vec<Option<f64>>,
    /// Index of the first record attaining each maximum.
    pub argmax: Vec<Option<usize>>,
    /// Records with fidelity exactly one, per size index.
    pub exact: Vec<usize>,
    /// Fidelity counts in `HISTOGRAM_BINS` equal bins, per size index.
    pub histogram: Vec<Vec<u64>>,
}

/// Fidelity and exactness of one record at one size, if comparable.
type Scored = Option<(f64, bool)>;

/// Sizes scanned: the three stored states plus a re-executed `N = 3`.
pub const SCAN_SIZES: usize = 4;

/// Compares every record's states with every target. Records of another
/// task, and sizes a record cannot produce, are skipped.
pub fn corpus_overlap_scan(
    records: &[Record],
    task: Task,
    classes: &[TargetClass],
    budget: Duration,
) -> Result<Vec<Overlap>, EvalError> {
    let mut targets = Vec::with_capacity(classes.len());
    for &c in classes {
        targets.push(target_states(task, c, SCAN_SIZES - 1)?);
    }
    let format = StateFormat::from(task);
    let sep = match task {
        Task::Optics => " | ",
        _ => " <SEP> ",
    };
    let per_record: Vec<Vec<Vec<Scored>>> = records
        .par_iter()
        .map(|r| {
            let Ok(config) = r.config.parse::<crate::datagen::GenConfig>() else {
                return Vec::new();
            };
            if config.task() != task {
                return Vec::new();
            }
            let mut states: Vec<Option<QuantumState>> = r
                .a_text
                .split(sep)
                .map(|s| QuantumState::parse(s, format).ok())
                .collect();
            states.resize(SCAN_SIZES - 1, None);
            let n3 = MetaCode::parse(&r.b_text, task)
                .ok()
                .and_then(|c| simulate(&c, SCAN_SIZES - 1, budget).ok());
            states.push(n3);
            targets
                .iter()
                .map(|t| {
                    states
                        .iter()
                        .zip(t)
                        .map(|(s, t)| {
                            let f = s.as_ref()?.fidelity_exact(t.as_ref()?).ok()?;
                            Some((ratio_to_f64(&f), is_unit(&f)))
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut out: Vec<Overlap> = classes
        .iter()
        .map(|c| Overlap {
            target: c.name().to_string(),
            max: vec![None; SCAN_SIZES],
            argmax: vec![None; SCAN_SIZES],
            exact: vec![0; SCAN_SIZES],
            histogram: vec![vec![0; HISTOGRAM_BINS]; SCAN_SIZES],
        })
        .collect();
    for (i, rec) in per_record.iter().enumerate() {
        for (o, fids) in out.iter_mut().zip(rec) {
            for (n, f) in fids.iter().enumerate() {
                let Some((f, exact)) = *f else { continue };
                if o.max[n].is_none_or(|m| f > m) {
                    o.max[n] = Some(f);
                    o.argmax[n] = Some(i);
                }
                o.exact[n] += usize::from(exact);
                let bin = ((f * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
                o.histogram[n][bin] += 1;
            }
        }
    }
    Ok(out)
}

/// Reads a corpus written by [`crate::datagen::write_corpus`].
pub fn read_corpus(path: &Path) -> Result<Vec<Record>, EvalError> {
    let text = fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })?;
    text.lines()
        .filter(|l| !l.is_empty())
        .map(|l| serde_json::from_str(l).map_err(EvalError::from))
        .collect()
}

/// Whether each overlap maximum is non-increasing in `N`, per target.
pub fn maxima_decrease(overlaps: &[Overlap]) -> BTreeMap<String, bool> {
    overlaps
        .iter()
        .map(|o| {
            let m: Vec<f64> = o.max.iter().map(|m| m.unwrap_or(0.0)).collect();
            (o.target.clone(), m.windows(2).all(|w| w[1] <= w[0]))
        })
        .collect()
}
