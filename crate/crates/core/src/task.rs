use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The three design tasks. Each has its own code grammar, state text format
/// and vocabulary pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// Pair-source setups on `2N + 4` detectors.
    Optics,
    /// Gate circuits on `2N + 2` qubits starting from `|0...0>`.
    Circuit,
    /// Graph states on `2N + 2` qubits; codes contain only `qCZ` lines.
    Graph,
}

impl Task {
    pub const ALL: [Task; 3] = [Task::Optics, Task::Circuit, Task::Graph];

    /// Number of particles (detectors or qubits) at size index `n`.
    pub fn particles(self, n: usize) -> usize {
        match self {
            Task::Optics => 2 * n + 4,
            Task::Circuit | Task::Graph => 2 * n + 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::Optics => "optics",
            Task::Circuit => "circuit",
            Task::Graph => "graph",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown task `{0}` (expected optics, circuit or graph)")]
pub struct UnknownTask(pub String);

impl FromStr for Task {
    type Err = UnknownTask;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "optics" | "main" => Ok(Task::Optics),
            "circuit" | "circuits" => Ok(Task::Circuit),
            "graph" | "graphs" | "graph-state" => Ok(Task::Graph),
            _ => Err(UnknownTask(s.to_string())),
        }
    }
}
