//! The target catalog: parametric state families `ψ(N)` for each task,
//! with the first three members of every family shipped as fixtures.
//!
//! Many families act on a prefix of the particles only. The remaining
//! particles are ancillas fixed to mode 0 and sit at the end of every ket.
//! Optics states keep the sign produced by their construction; circuit and
//! graph states are canonical (first term positive), matching the
//! post-processing applied to simulated circuits.

mod gen;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::state::{QuantumState, StateError};
use crate::task::Task;

/// Largest optics target, in particles.
pub const MAX_OPTICS_PARTICLES: usize = 24;
/// Largest circuit or graph target, in qubits.
pub const MAX_CIRCUIT_QUBITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TargetError {
    #[error("unknown target `{0}`")]
    Unknown(String),
    #[error("{class} is not a {task} target")]
    WrongTask { class: TargetClass, task: Task },
    #[error("{particles} particles exceed the bound of {max}")]
    TooLarge { particles: usize, max: usize },
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TargetClass {
    Ghz,
    W,
    BellPairs2d,
    BellPairs3d,
    Spin12,
    MajumdarGhosh,
    GhzXW,
    WXW,
    GhzXGhz,
    Ghz3dXGhz3d,
    Dicke1,
    Dicke2,
    Dicke3,
    Dicke4,
    Dicke5,
    Dyck1,
    Dyck2,
    MotzkinSmall,
    Motzkin,
    Aklt,
    Linear,
    Ring,
    Star,
}

impl TargetClass {
    pub const ALL: [TargetClass; 23] = [
        TargetClass::Ghz,
        TargetClass::W,
        TargetClass::BellPairs2d,
        TargetClass::BellPairs3d,
        TargetClass::Spin12,
        TargetClass::MajumdarGhosh,
        TargetClass::GhzXW,
        TargetClass::WXW,
        TargetClass::GhzXGhz,
        TargetClass::Ghz3dXGhz3d,
        TargetClass::Dicke1,
        TargetClass::Dicke2,
        TargetClass::Dicke3,
        TargetClass::Dicke4,
        TargetClass::Dicke5,
        TargetClass::Dyck1,
        TargetClass::Dyck2,
        TargetClass::MotzkinSmall,
        TargetClass::Motzkin,
        TargetClass::Aklt,
        TargetClass::Linear,
        TargetClass::Ring,
        TargetClass::Star,
    ];

    pub fn name(self) -> &'static str {
        use TargetClass::*;
        match self {
            Ghz => "GHZ",
            W => "W",
            BellPairs2d => "Bell pairs 2d",
            BellPairs3d => "Bell pairs 3d",
            Spin12 => "Spin 1/2",
            MajumdarGhosh => "Majumdar-Ghosh",
            GhzXW => "GHZ x W",
            WXW => "W x W",
            GhzXGhz => "GHZ x GHZ",
            Ghz3dXGhz3d => "GHZ 3d x GHZ 3d",
            Dicke1 => "Dicke 1",
            Dicke2 => "Dicke 2",
            Dicke3 => "Dicke 3",
            Dicke4 => "Dicke 4",
            Dicke5 => "Dicke 5",
            Dyck1 => "Dyck 1",
            Dyck2 => "Dyck 2",
            MotzkinSmall => "Motzkin small",
            Motzkin => "Motzkin",
            Aklt => "AKLT",
            Linear => "Linear",
            Ring => "Ring",
            Star => "Star",
        }
    }

    /// File-name form: `Bell pairs 2d` becomes `bell_pairs_2d`.
    pub fn slug(self) -> String {
        let mut out = String::new();
        for c in self.name().chars() {
            match c {
                'a'..='z' | '0'..='9' => out.push(c),
                'A'..='Z' => out.push(c.to_ascii_lowercase()),
                _ => {
                    if !out.ends_with('_') {
                        out.push('_');
                    }
                }
            }
        }
        out.trim_end_matches('_').to_string()
    }
}

impl fmt::Display for TargetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TargetClass {
    type Err = TargetError;

    /// Accepts the display name or the slug, ignoring case.
    fn from_str(s: &str) -> Result<Self, TargetError> {
        let wanted = s.trim().to_ascii_lowercase();
        TargetClass::ALL
            .into_iter()
            .find(|c| c.name().to_ascii_lowercase() == wanted || c.slug() == wanted)
            .ok_or_else(|| TargetError::Unknown(s.to_string()))
    }
}

/// How many consecutive sizes a reference solution reproduces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrectStates {
    Infinite,
    Count(u32),
    /// No figure recorded for this family.
    NotReported,
}

impl CorrectStates {
    /// Largest `N` such that all of `0..=N` are correct; `None` for
    /// unbounded families and for families with no correct state.
    pub fn max_correct_n(self) -> Option<u32> {
        match self {
            CorrectStates::Count(c) if c > 0 => Some(c - 1),
            _ => None,
        }
    }
}

impl fmt::Display for CorrectStates {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorrectStates::Infinite => f.write_str("inf"),
            CorrectStates::Count(c) => write!(f, "{c}"),
            CorrectStates::NotReported => f.write_str("-"),
        }
    }
}

/// Catalog entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TargetInfo {
    pub class: TargetClass,
    pub name: &'static str,
    pub slug: String,
    pub task: Task,
    /// Correct-state count of the best published meta-solution.
    pub reference_correct: CorrectStates,
    /// Whether a general construction was known before that solution.
    pub previously_known: Option<bool>,
    pub fixture: [&'static str; 3],
}

macro_rules! fixture {
    ($task:literal, $slug:literal) => {
        include_str!(concat!(
            "../../fixtures/targets/",
            $task,
            "/",
            $slug,
            ".txt"
        ))
    };
}

fn fixture_text(task: Task, class: TargetClass) -> Option<&'static str> {
    use TargetClass::*;
    let text = match (task, class) {
        (Task::Optics, Ghz) => fixture!("optics", "ghz"),
        (Task::Optics, W) => fixture!("optics", "w"),
        (Task::Optics, BellPairs2d) => fixture!("optics", "bell_pairs_2d"),
        (Task::Optics, BellPairs3d) => fixture!("optics", "bell_pairs_3d"),
        (Task::Optics, Spin12) => fixture!("optics", "spin_1_2"),
        (Task::Optics, MajumdarGhosh) => fixture!("optics", "majumdar_ghosh"),
        (Task::Optics, GhzXW) => fixture!("optics", "ghz_x_w"),
        (Task::Optics, WXW) => fixture!("optics", "w_x_w"),
        (Task::Optics, GhzXGhz) => fixture!("optics", "ghz_x_ghz"),
        (Task::Optics, Ghz3dXGhz3d) => fixture!("optics", "ghz_3d_x_ghz_3d"),
        (Task::Optics, Dicke1) => fixture!("optics", "dicke_1"),
        (Task::Optics, Dicke2) => fixture!("optics", "dicke_2"),
        (Task::Optics, Dicke3) => fixture!("optics", "dicke_3"),
        (Task::Optics, Dicke4) => fixture!("optics", "dicke_4"),
        (Task::Optics, Dicke5) => fixture!("optics", "dicke_5"),
        (Task::Optics, Dyck1) => fixture!("optics", "dyck_1"),
        (Task::Optics, Dyck2) => fixture!("optics", "dyck_2"),
        (Task::Optics, MotzkinSmall) => fixture!("optics", "motzkin_small"),
        (Task::Optics, Motzkin) => fixture!("optics", "motzkin"),
        (Task::Optics, Aklt) => fixture!("optics", "aklt"),
        (Task::Circuit, Ghz) => fixture!("circuit", "ghz"),
        (Task::Circuit, W) => fixture!("circuit", "w"),
        (Task::Circuit, Dicke1) => fixture!("circuit", "dicke_1"),
        (Task::Circuit, Dicke4) => fixture!("circuit", "dicke_4"),
        (Task::Circuit, Dicke2) => fixture!("circuit", "dicke_2"),
        (Task::Circuit, GhzXW) => fixture!("circuit", "ghz_x_w"),
        (Task::Circuit, WXW) => fixture!("circuit", "w_x_w"),
        (Task::Circuit, GhzXGhz) => fixture!("circuit", "ghz_x_ghz"),
        (Task::Circuit, BellPairs2d) => fixture!("circuit", "bell_pairs_2d"),
        (Task::Circuit, Spin12) => fixture!("circuit", "spin_1_2"),
        (Task::Circuit, Dyck2) => fixture!("circuit", "dyck_2"),
        (Task::Circuit, Dyck1) => fixture!("circuit", "dyck_1"),
        (Task::Circuit, MajumdarGhosh) => fixture!("circuit", "majumdar_ghosh"),
        (Task::Circuit, Aklt) => fixture!("circuit", "aklt"),
        (Task::Graph, Linear) => fixture!("graph", "linear"),
        (Task::Graph, Ring) => fixture!("graph", "ring"),
        (Task::Graph, Star) => fixture!("graph", "star"),
        _ => return None,
    };
    Some(text)
}

/// Fixture texts for `N = 0, 1, 2`.
pub fn fixture(task: Task, class: TargetClass) -> Option<[&'static str; 3]> {
    let text = fixture_text(task, class)?;
    let mut lines = text.lines();
    let mut next = || lines.next().expect("fixture has three lines");
    Some([next(), next(), next()])
}

macro_rules! reference_file {
    ($task:literal, $file:literal) => {
        include_str!(concat!("../../fixtures/reference/", $task, "/", $file))
    };
}

/// Handwritten meta-code that reproduces the family for every `N`.
pub fn reference_code(task: Task, class: TargetClass) -> Option<&'static str> {
    use TargetClass::*;
    let text = match (task, class) {
        (Task::Optics, Ghz) => reference_file!("optics", "ghz.code"),
        (Task::Optics, W) => reference_file!("optics", "w.code"),
        (Task::Optics, BellPairs2d) => reference_file!("optics", "bell_pairs_2d.code"),
        (Task::Optics, BellPairs3d) => reference_file!("optics", "bell_pairs_3d.code"),
        (Task::Circuit, Ghz) => reference_file!("circuit", "ghz.code"),
        (Task::Circuit, MajumdarGhosh | Aklt) => reference_file!("circuit", "singlet_pairs.code"),
        (Task::Graph, Linear) => reference_file!("graph", "linear.code"),
        (Task::Graph, Ring) => reference_file!("graph", "ring.code"),
        (Task::Graph, Star) => reference_file!("graph", "star.code"),
        _ => return None,
    };
    Some(text)
}

/// Six-vertex setup, one edge per line, whose eight perfect matchings give
/// the Spin-1/2 member at `N = 1`.
pub const SPIN12_SETUP: &str = reference_file!("optics", "spin_1_2_n1.setup");

fn reference(task: Task, class: TargetClass) -> (CorrectStates, Option<bool>) {
    use CorrectStates::*;
    use TargetClass::*;
    let unknown = Some(false);
    let known = Some(true);
    match (task, class) {
        (Task::Optics, Spin12 | MajumdarGhosh) => (Infinite, unknown),
        (Task::Optics, BellPairs2d | BellPairs3d | Ghz | W) => (Infinite, known),
        (Task::Optics, GhzXW | WXW | Dicke2 | GhzXGhz | Dyck2 | Dyck1) => (Count(3), unknown),
        (Task::Optics, Dicke1 | Dicke5 | Aklt | MotzkinSmall) => (Count(2), unknown),
        (Task::Optics, Dicke3 | Dicke4 | Ghz3dXGhz3d | Motzkin) => (Count(1), unknown),
        (Task::Circuit, Ghz | GhzXGhz | BellPairs2d) => (Infinite, known),
        (Task::Circuit, W) => (Count(1), known),
        (Task::Circuit, Dicke1 | GhzXW | WXW | Dyck2 | Dyck1) => (Count(2), unknown),
        (Task::Circuit, Dicke4 | Dicke2) => (Count(1), unknown),
        (Task::Circuit, Spin12) => (Count(0), unknown),
        (Task::Circuit, MajumdarGhosh | Aklt) => (Infinite, unknown),
        _ => (NotReported, None),
    }
}

/// The families of one task, in table order.
pub fn catalog(task: Task) -> Vec<TargetInfo> {
    use TargetClass::*;
    let order: &[TargetClass] = match task {
        Task::Optics => &[
            Spin12,
            MajumdarGhosh,
            BellPairs2d,
            BellPairs3d,
            Ghz,
            W,
            GhzXW,
            WXW,
            Dicke2,
            GhzXGhz,
            Dyck2,
            Dyck1,
            Dicke1,
            Dicke5,
            Aklt,
            MotzkinSmall,
            Dicke3,
            Dicke4,
            Ghz3dXGhz3d,
            Motzkin,
        ],
        Task::Circuit => &[
            Ghz,
            W,
            Dicke1,
            Dicke4,
            Dicke2,
            GhzXW,
            WXW,
            GhzXGhz,
            BellPairs2d,
            Spin12,
            Dyck2,
            Dyck1,
            MajumdarGhosh,
            Aklt,
        ],
        Task::Graph => &[Linear, Ring, Star],
    };
    order
        .iter()
        .map(|&c| info(task, c).expect("listed classes exist"))
        .collect()
}

pub fn info(task: Task, class: TargetClass) -> Result<TargetInfo, TargetError> {
    let fixture = fixture(task, class).ok_or(TargetError::WrongTask { class, task })?;
    let (reference_correct, previously_known) = reference(task, class);
    Ok(TargetInfo {
        class,
        name: class.name(),
        slug: class.slug(),
        task,
        reference_correct,
        previously_known,
        fixture,
    })
}

/// Number of trailing mode-0 ancillas at `n` particles.
pub fn ancillas(task: Task, class: TargetClass, particles: usize) -> usize {
    use TargetClass::*;
    let half = particles / 2;
    match (task, class) {
        (Task::Optics, BellPairs3d) => 2,
        (_, Spin12 | Dicke2 | Dicke3 | Dicke5 | Motzkin) => half - 1,
        (_, Dicke1 | Dyck1) => 2,
        (Task::Optics, MotzkinSmall | Aklt) => half,
        _ => 0,
    }
}

/// The family member at size index `n`.
pub fn target_state(task: Task, class: TargetClass, n: usize) -> Result<QuantumState, TargetError> {
    if fixture_text(task, class).is_none() {
        return Err(TargetError::WrongTask { class, task });
    }
    let particles = task.particles(n);
    let max = match task {
        Task::Optics => MAX_OPTICS_PARTICLES,
        _ => MAX_CIRCUIT_QUBITS,
    };
    if particles > max {
        return Err(TargetError::TooLarge { particles, max });
    }
    let state = match task {
        Task::Optics => optics_state(class, particles)?.reduced(),
        Task::Circuit | Task::Graph => gate_state(class, particles)?.canonical(),
    };
    Ok(state)
}

fn optics_state(class: TargetClass, n: usize) -> Result<QuantumState, StateError> {
    use gen::*;
    use TargetClass::*;
    let half = n / 2;
    let real = n - ancillas(Task::Optics, class, n);
    let (x, y, z) = (0u8, 1u8, 2u8);
    let ghz = |len: usize, dim: u8| (0..dim).map(|m| vec![m; len]).collect::<Vec<_>>();
    let pairs = |dim: u8, count: usize| tensor(&vec![ghz(2, dim); count]);
    let words = match class {
        Ghz => ghz(n, 2),
        W => dicke(n, 1, y),
        BellPairs2d => pairs(2, half),
        BellPairs3d => pairs(3, real / 2),
        Spin12 => no_adjacent_ones(real),
        MajumdarGhosh => return weighted(majumdar_ghosh_ring(n)),
        GhzXW => tensor(&[ghz(half, 2), dicke(half, 1, y)]),
        WXW => tensor(&[dicke(half, 1, y), dicke(half, 1, y)]),
        GhzXGhz => tensor(&[ghz(half, 2), ghz(half, 2)]),
        Ghz3dXGhz3d => tensor(&[ghz(half, 3), ghz(half, 3)]),
        Dicke1 => dicke(real, real / 2, z),
        Dicke2 => dicke(real, 2, z),
        Dicke3 => two_kinds(real, y, z),
        Dicke4 => dicke(n, 2, y),
        Dicke5 => dicke(real, 3, z),
        Dyck1 | Dyck2 => dyck(real, y, z),
        MotzkinSmall | Motzkin => motzkin(real),
        Aklt => {
            let terms = aklt_ring(real);
            let pad_to = n - real;
            let terms = terms
                .into_iter()
                .map(|(mut w, a)| {
                    w.extend(std::iter::repeat_n(x, pad_to));
                    (w, a)
                })
                .collect();
            return weighted(terms);
        }
        Linear | Ring | Star => unreachable!("graph families have no optics form"),
    };
    uniform(pad(words, n - real))
}

fn gate_state(class: TargetClass, n: usize) -> Result<QuantumState, StateError> {
    use gen::*;
    use TargetClass::*;
    let half = n / 2;
    let real = n - ancillas(Task::Circuit, class, n);
    let (x, y) = (0u8, 1u8);
    let ghz = |len: usize| vec![vec![x; len], vec![y; len]];
    let words = match class {
        Ghz => ghz(n),
        W => dicke(n, 1, y),
        BellPairs2d => tensor(&vec![ghz(2); half]),
        Spin12 => no_adjacent_ones(real),
        GhzXW => tensor(&[ghz(half), dicke(half, 1, y)]),
        WXW => tensor(&[dicke(half, 1, y), dicke(half, 1, y)]),
        GhzXGhz => tensor(&[ghz(half), ghz(half)]),
        Dicke1 => dicke(real, real / 2, y),
        Dicke2 => dicke(real, 2, y),
        Dicke4 => dicke(n, 2, y),
        Dyck2 => dyck(real, y, x),
        Dyck1 => dyck(real, x, y),
        MajumdarGhosh | Aklt => {
            let pairs: Vec<_> = (0..half).map(|k| (2 * k, 2 * k + 1)).collect();
            return weighted(singlet_product(n, &pairs));
        }
        Linear => return weighted(graph_state(n, &path_edges(n))),
        Ring => {
            let mut edges = path_edges(n);
            edges.push((n - 1, 0));
            return weighted(graph_state(n, &edges));
        }
        Star => {
            let edges: Vec<_> = (0..n - 1).map(|i| (i, n - 1)).collect();
            return weighted(graph_state(n, &edges));
        }
        _ => unreachable!("no gate form"),
    };
    let mut state = uniform(pad(words, n - real))?;
    if state.dim() < 2 {
        state = state.with_dim(2)?;
    }
    Ok(state)
}

fn path_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect()
}
