use crate::circuit::{CircuitProgram, Gate, GateKind};
use crate::optics::{Edge, Setup, MAX_VERTICES};
use crate::task::Task;

use super::{DslError, Line, MetaCode, Part};

/// A meta-code evaluated at one size index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Setup(Setup),
    Circuit(CircuitProgram),
}

impl MetaCode {
    /// Runs the code at size index `n`.
    pub fn instantiate(&self, n: usize) -> Result<Instance, DslError> {
        match self.task {
            Task::Optics => self.instantiate_setup(n).map(Instance::Setup),
            Task::Circuit | Task::Graph => self.instantiate_circuit(n).map(Instance::Circuit),
        }
    }

    /// Edges in execution order, before any merging.
    pub fn edge_list(&self, n: usize) -> Result<Vec<Edge>, DslError> {
        let vertices = Task::Optics.particles(n);
        if vertices > MAX_VERTICES {
            return Err(DslError::TooLarge(n));
        }
        let mut out = Vec::new();
        self.execute(n, vertices, |line, idx, line_no, ii| {
            let Line::Edge(e) = line else {
                return Err(DslError::Parse {
                    line: line_no,
                    msg: "gate call in an optics code".into(),
                });
            };
            if idx[0] == idx[1] {
                return Err(DslError::Collision {
                    line: line_no,
                    value: idx[0] as i64,
                    n,
                    ii,
                });
            }
            out.push(Edge::new(idx[0], idx[1], e.mu, e.mv, e.w));
            Ok(())
        })?;
        Ok(out)
    }

    pub fn instantiate_setup(&self, n: usize) -> Result<Setup, DslError> {
        let edges = self.edge_list(n)?;
        let dim = self.mode_count();
        Setup::from_edges(Task::Optics.particles(n), dim, edges).map_err(|e| DslError::Parse {
            line: 0,
            msg: e.to_string(),
        })
    }

    /// `max(2, highest mode + 1)` over all edge lines.
    pub fn mode_count(&self) -> u8 {
        let lines = self.pre.iter().chain(self.body_lines()).chain(&self.post);
        let max = lines
            .filter_map(|l| match l {
                Line::Edge(e) => Some(e.mu.max(e.mv)),
                Line::Gate(_) => None,
            })
            .max()
            .unwrap_or(0);
        (max + 1).max(2)
    }

    /// Gate list at size index `n`. Graph codes get a Hadamard on every
    /// qubit ahead of their `CZ` lines.
    pub fn instantiate_circuit(&self, n: usize) -> Result<CircuitProgram, DslError> {
        let qubits = self.task.particles(n);
        let mut prog = CircuitProgram::new(qubits).expect("at least two qubits");
        if self.task == Task::Graph {
            for q in 0..qubits {
                prog.gate(GateKind::H, &[q]).expect("qubit in range");
            }
        }
        self.execute(n, qubits, |line, idx, line_no, ii| {
            let Line::Gate(g) = line else {
                return Err(DslError::Parse {
                    line: line_no,
                    msg: "edge call in a circuit code".into(),
                });
            };
            let gate = Gate::new(g.kind, idx).map_err(|_| {
                let dup = idx
                    .iter()
                    .enumerate()
                    .find(|(i, q)| idx[..*i].contains(q))
                    .map(|(_, q)| *q);
                DslError::Collision {
                    line: line_no,
                    value: dup.unwrap_or(0) as i64,
                    n,
                    ii,
                }
            })?;
            prog.push(gate).expect("indices checked");
            Ok(())
        })?;
        Ok(prog)
    }

    /// Walks the lines in execution order, evaluating every formula and
    /// checking it against `0..size`.
    fn execute<F>(&self, n: usize, size: usize, mut emit: F) -> Result<(), DslError>
    where
        F: FnMut(&Line, &[usize], usize, Option<i64>) -> Result<(), DslError>,
    {
        let mut run = |line: &Line, line_no: usize, ii: Option<i64>| -> Result<(), DslError> {
            let mut idx = Vec::with_capacity(3);
            for f in line.formulas() {
                let value = f.eval(n as i64, ii.unwrap_or(0));
                if value < 0 || value as usize >= size {
                    return Err(DslError::OutOfRange {
                        line: line_no,
                        value,
                        max: size - 1,
                        n,
                        ii,
                    });
                }
                idx.push(value as usize);
            }
            emit(line, &idx, line_no, ii)
        };
        for (k, l) in self.pre.iter().enumerate() {
            run(l, self.line_no(Part::Pre, k), None)?;
        }
        if let Some(body) = &self.body {
            let bound = body.range.eval(n as i64, 0).max(0);
            for ii in 0..bound {
                for (k, l) in body.lines.iter().enumerate() {
                    run(l, self.line_no(Part::Body, k), Some(ii))?;
                }
            }
        }
        for (k, l) in self.post.iter().enumerate() {
            run(l, self.line_no(Part::Post, k), None)?;
        }
        Ok(())
    }
}
