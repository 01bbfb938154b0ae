//! `metadesign`: corpus generation, simulation, tokenization and evaluation
//! of meta-codes from the command line.
//!
//! Exit status is 0 on success, 1 on a usage error and 2 when input data is
//! missing or invalid. With `--json`, results go to stdout as JSON and
//! errors go to stderr as `{"error": ..., "exit_code": ...}`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use metadesign_core::datagen::{self, CorpusPlan, GenConfig, Manifest};
use metadesign_core::eval::{self, Candidate, EvalOptions, Origin};
use metadesign_core::optics::{flop_estimate, Setup};
use metadesign_core::state::StateFormat;
use metadesign_core::targets::{self, TargetClass};
use metadesign_core::tokenizer::{self, Side, TokenSeq, Vocabulary};
use metadesign_core::{MetaCode, Task};

/// Writes to stdout; a closed pipe ends the process quietly.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if let Err(e) = write!(std::io::stdout().lock(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
        }
    }};
}

macro_rules! outln {
    () => {
        out!("\n")
    };
    ($($arg:tt)*) => {
        out!("{}\n", format_args!($($arg)*))
    };
}

#[derive(Parser, Debug)]
#[command(
    name = "metadesign",
    version,
    about = "Parametric quantum experiment design toolkit"
)]
struct Cli {
    /// Machine-readable output on stdout and error objects on stderr.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a tokenized training corpus and its manifest.
    GenData(GenDataArgs),
    /// Re-execute every corpus record and check all constraints.
    VerifyCorpus(VerifyArgs),
    /// Score candidate codes against a target family.
    Eval(EvalArgs),
    /// Closest corpus states to each target family.
    OverlapScan(OverlapArgs),
    /// Print the state a code or setup file produces.
    Simulate(SimulateArgs),
    /// Turn a code or state triple into token ids.
    Tokenize(TokenizeArgs),
    /// Turn token ids back into text.
    Detokenize(DetokenizeArgs),
    /// Print a vocabulary as JSON.
    Vocab(VocabArgs),
    /// List target families or print one member.
    Targets(TargetsArgs),
    /// Operation count of the brute-force state computation.
    Flops(FlopsArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum TaskArg {
    Optics,
    Circuit,
    Graph,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Task {
        match t {
            TaskArg::Optics => Task::Optics,
            TaskArg::Circuit => Task::Circuit,
            TaskArg::Graph => Task::Graph,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SideArg {
    Source,
    Target,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Source => Side::Source,
            SideArg::Target => Side::Target,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum OriginArg {
    ModelSample,
    Corpus,
    Handwritten,
}

impl From<OriginArg> for Origin {
    fn from(o: OriginArg) -> Origin {
        match o {
            OriginArg::ModelSample => Origin::ModelSample,
            OriginArg::Corpus => Origin::Corpus,
            OriginArg::Handwritten => Origin::Handwritten,
        }
    }
}

#[derive(Args, Debug)]
struct GenDataArgs {
    /// Comma-separated config tags, or the groups `optics`, `circuit`, `graph`.
    #[arg(long, default_value = "optics")]
    config: String,
    /// Records in total, split evenly over the configs.
    #[arg(long)]
    total: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corpus file; the manifest is written to `<out>.manifest.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    corpus: PathBuf,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, value_enum)]
    task: TaskArg,
    /// Family name or slug, e.g. `GHZ` or `bell_pairs_2d`.
    #[arg(long)]
    target: String,
    /// A `.code` file or a directory of them.
    #[arg(long)]
    candidates: PathBuf,
    #[arg(long, default_value_t = 4)]
    nmax: usize,
    /// Seconds allowed for simulating one size.
    #[arg(long, default_value_t = 60)]
    budget: u64,
    #[arg(long, value_enum, default_value = "model-sample")]
    origin: OriginArg,
    /// Directory for `<slug>.csv` and `<slug>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OverlapArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum)]
    task: TaskArg,
    /// Comma-separated families; all of the task's families by default.
    #[arg(long)]
    targets: Option<String>,
    #[arg(long, default_value_t = 60)]
    budget: u64,
    /// Write the scan as JSON here instead of printing a table.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value = "optics")]
    task: TaskArg,
    /// Meta-code file, run at size `--n`.
    #[arg(long, conflicts_with = "setup", required_unless_present = "setup")]
    code: Option<PathBuf>,
    /// Setup file (`vertices=<n> dim=<k>` and `u v mu mv w` lines).
    #[arg(long)]
    setup: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    n: usize,
}

#[derive(Args, Debug)]
struct TokenizeArgs {
    #[arg(long, value_enum)]
    task: TaskArg,
    #[arg(long, value_enum)]
    side: SideArg,
    /// Code text, or state texts joined by ` | ` / ` <SEP> `.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    text: Option<String>,
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DetokenizeArgs {
    #[arg(long, value_enum)]
    task: TaskArg,
    #[arg(long, value_enum)]
    side: SideArg,
    /// Space-separated token ids.
    #[arg(long)]
    ids: String,
}

#[derive(Args, Debug)]
struct VocabArgs {
    #[arg(long, value_enum)]
    task: TaskArg,
    #[arg(long, value_enum)]
    side: SideArg,
}

#[derive(Args, Debug)]
struct TargetsArgs {
    #[arg(long, value_enum, default_value = "optics")]
    task: TaskArg,
    /// List the catalog (the default when no family is given).
    #[arg(long)]
    list: bool,
    /// Print this family's member at `--n`.
    #[arg(long)]
    class: Option<String>,
    #[arg(long, default_value_t = 0)]
    n: usize,
}

#[derive(Args, Debug)]
struct FlopsArgs {
    #[arg(long)]
    dim: u32,
    #[arg(long)]
    particles: u32,
}

/// A request that is well-formed for clap but still unusable.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.json;
    let result = match cli.threads {
        Some(0) => Err(UsageError("--threads must be positive".into()).into()),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .context("building the thread pool")
            .and_then(|pool| pool.install(|| run(cli.command, json))),
        None => run(cli.command, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code: u8 = if e.downcast_ref::<UsageError>().is_some() {
                1
            } else {
                2
            };
            if json {
                eprintln!(
                    "{}",
                    json!({ "error": format!("{e:#}"), "exit_code": code })
                );
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(code)
        }
    }
}

fn run(cmd: Command, json: bool) -> Result<()> {
    match cmd {
        Command::GenData(a) => gen_data(a, json),
        Command::VerifyCorpus(a) => verify_corpus(a, json),
        Command::Eval(a) => eval_cmd(a, json),
        Command::OverlapScan(a) => overlap_scan(a, json),
        Command::Simulate(a) => simulate(a, json),
        Command::Tokenize(a) => tokenize(a, json),
        Command::Detokenize(a) => detokenize(a, json),
        Command::Vocab(a) => {
            outln!(
                "{}",
                Vocabulary::for_task(a.task.into(), a.side.into()).to_json()
            );
            Ok(())
        }
        Command::Targets(a) => targets_cmd(a, json),
        Command::Flops(a) => {
            let f = flop_estimate(a.dim, a.particles).map_err(|e| UsageError(e.to_string()))?;
            if json {
                outln!(
                    "{}",
                    json!({ "dim": a.dim, "particles": a.particles, "flops": f.to_string() })
                );
            } else {
                outln!("{f}");
            }
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_class(task: Task, name: &str) -> Result<TargetClass> {
    let class: TargetClass = name
        .parse()
        .map_err(|e: targets::TargetError| UsageError(e.to_string()))?;
    targets::info(task, class).map_err(|e| UsageError(e.to_string()))?;
    Ok(class)
}

fn gen_data(a: GenDataArgs, json: bool) -> Result<()> {
    let configs = GenConfig::parse_list(&a.config).map_err(|e| UsageError(e.to_string()))?;
    if a.total == 0 {
        return Err(UsageError("--total must be positive".into()).into());
    }
    let plan = CorpusPlan::uniform(&configs, a.total, a.seed);
    let manifest = datagen::generate_corpus(&plan, &a.out)
        .with_context(|| format!("writing {}", a.out.display()))?;
    if json {
        outln!("{}", serde_json::to_string(&manifest)?);
    } else {
        outln!("{} records written to {}", manifest.total, a.out.display());
        outln!("manifest: {}", Manifest::path_for(&a.out).display());
        outln!("corpus sha256: {}", manifest.corpus_sha256);
        for (reason, count) in &manifest.rejections {
            outln!("rejected {reason}: {count}");
        }
    }
    Ok(())
}

fn verify_corpus(a: VerifyArgs, json: bool) -> Result<()> {
    let records = eval::read_corpus(&a.corpus)?;
    let failures: Vec<(usize, String)> = records
        .par_iter()
        .enumerate()
        .filter_map(|(i, r)| {
            datagen::verify_record(r)
                .err()
                .map(|e| (i + 1, e.to_string()))
        })
        .collect();
    if json {
        let lines: Vec<_> = failures
            .iter()
            .map(|(l, e)| json!({ "line": l, "error": e }))
            .collect();
        outln!("{}", json!({ "records": records.len(), "failures": lines }));
    } else {
        for (line, e) in failures.iter().take(20) {
            outln!("line {line}: {e}");
        }
        outln!(
            "{} of {} records verified",
            records.len() - failures.len(),
            records.len()
        );
    }
    if !failures.is_empty() {
        bail!("{} records failed verification", failures.len());
    }
    Ok(())
}

fn eval_cmd(a: EvalArgs, json: bool) -> Result<()> {
    let task: Task = a.task.into();
    let class = parse_class(task, &a.target)?;
    let candidates = Candidate::load(&a.candidates, task, a.origin.into())?;
    let opts = EvalOptions {
        n_max: a.nmax,
        budget: Duration::from_secs(a.budget),
    };
    let results = eval::evaluate_all(&candidates, class, &opts)?;
    let summary = eval::summarize(task, class, a.nmax, &results);
    if let Some(dir) = &a.out {
        eval::write_report(dir, class, &summary, &results)?;
    }
    if json {
        outln!("{}", serde_json::to_string(&summary)?);
        return Ok(());
    }
    for c in &summary.candidates {
        let fids: Vec<String> = c.fidelities.iter().map(|f| format!("{f:.4}")).collect();
        let correct = c.max_correct_n.map_or("-".to_string(), |n| n.to_string());
        outln!("{}\tmax_correct_N={}\t[{}]", c.id, correct, fids.join(", "));
    }
    if let Some(s) = &summary.selection {
        outln!(
            "best: {} ({} correct states)",
            s.best,
            s.best_correct_states
        );
    }
    Ok(())
}

fn overlap_scan(a: OverlapArgs, json: bool) -> Result<()> {
    let task: Task = a.task.into();
    let classes = match &a.targets {
        Some(list) => list
            .split(',')
            .map(|n| parse_class(task, n.trim()))
            .collect::<Result<Vec<_>>>()?,
        None => targets::catalog(task)
            .into_iter()
            .map(|i| i.class)
            .collect(),
    };
    let records = eval::read_corpus(&a.corpus)?;
    let scan = eval::corpus_overlap_scan(&records, task, &classes, Duration::from_secs(a.budget))?;
    let decreasing = eval::maxima_decrease(&scan);
    let report =
        json!({ "records": records.len(), "targets": scan, "maxima_non_increasing": decreasing });
    if let Some(out) = &a.out {
        fs::write(out, serde_json::to_string_pretty(&report)? + "\n")
            .with_context(|| format!("writing {}", out.display()))?;
    }
    if json {
        outln!("{report}");
    } else {
        for o in &scan {
            let cells: Vec<String> = o
                .max
                .iter()
                .map(|m| m.map_or("-".into(), |m| format!("{m:.4}")))
                .collect();
            outln!("{}\t{}", o.target, cells.join("\t"));
        }
    }
    Ok(())
}

fn simulate(a: SimulateArgs, json: bool) -> Result<()> {
    let task: Task = a.task.into();
    let state = if let Some(path) = &a.setup {
        Setup::parse(&read(path)?)?.compute_state()
    } else {
        let path = a.code.as_ref().expect("clap requires --code or --setup");
        let code = MetaCode::parse(&read(path)?, task)
            .with_context(|| format!("parsing {}", path.display()))?;
        match task {
            Task::Optics => code.instantiate_setup(a.n)?.compute_state(),
            Task::Circuit | Task::Graph => code.instantiate_circuit(a.n)?.run()?.postprocess()?,
        }
    };
    let format = if a.setup.is_some() {
        StateFormat::Optics
    } else {
        StateFormat::from(task)
    };
    let text = state.to_text(format);
    if json {
        outln!(
            "{}",
            json!({ "n": a.n, "terms": state.len(), "state": text })
        );
    } else {
        outln!("{text}");
    }
    Ok(())
}

fn tokenize(a: TokenizeArgs, json: bool) -> Result<()> {
    let task: Task = a.task.into();
    let text = match (&a.text, &a.file) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => read(p)?,
        (None, None) => unreachable!("clap requires --text or --file"),
    };
    let seq = match a.side {
        SideArg::Target => tokenizer::encode_code_text(&text, task)?,
        SideArg::Source => {
            let sep = if task == Task::Optics {
                " | "
            } else {
                " <SEP> "
            };
            let states = text
                .trim_end()
                .split(sep)
                .map(|s| metadesign_core::QuantumState::parse(s, task.into()))
                .collect::<Result<Vec<_>, _>>()?;
            tokenizer::encode_states(&states, task)?
        }
    };
    if json {
        outln!("{}", json!({ "ids": seq.ids, "len": seq.len() }));
    } else {
        outln!("{}", seq.to_id_string());
    }
    Ok(())
}

fn detokenize(a: DetokenizeArgs, json: bool) -> Result<()> {
    let seq = TokenSeq::parse_id_string(&a.ids)?;
    let text = tokenizer::decode(&seq, a.task.into(), a.side.into())?;
    if json {
        outln!("{}", json!({ "text": text }));
    } else {
        out!("{text}");
        if !text.ends_with('\n') {
            outln!();
        }
    }
    Ok(())
}

fn targets_cmd(a: TargetsArgs, json: bool) -> Result<()> {
    let task: Task = a.task.into();
    if let (Some(name), false) = (&a.class, a.list) {
        let class = parse_class(task, name)?;
        let state = targets::target_state(task, class, a.n)?;
        let text = state.to_text(task.into());
        if json {
            outln!(
                "{}",
                json!({ "class": class.name(), "n": a.n, "state": text })
            );
        } else {
            outln!("{text}");
        }
        return Ok(());
    }
    let catalog = targets::catalog(task);
    if json {
        outln!("{}", serde_json::to_string(&catalog)?);
        return Ok(());
    }
    for info in &catalog {
        let known = match info.previously_known {
            Some(true) => "known",
            Some(false) => "unknown",
            None => "-",
        };
        outln!(
            "{}\t{}\t{}\t{}",
            info.name,
            info.slug,
            info.reference_correct,
            known
        );
    }
    Ok(())
}
