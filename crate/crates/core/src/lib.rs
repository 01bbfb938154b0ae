//! Parametric design of quantum experiments.
//!
//! A *meta-code* is a short program in the size index `N` that builds an
//! experimental setup (a photon pair-source graph) or a quantum circuit for
//! every `N`. This crate interprets such programs, simulates the resulting
//! states exactly, produces tokenized training corpora of
//! `(state triple, code)` pairs, and scores candidate meta-codes against a
//! catalog of target state families.
//!
//! Module map:
//!
//! * [`state`]: sparse integer-amplitude states, text formats, fidelity.
//! * [`optics`]: coloured weighted multigraphs and perfect-matching simulation.
//! * [`dsl`]: meta-code AST, parser, printer and interpreter.
//! * [`circuit`]: exact statevector simulation and graph states.
//! * [`tokenizer`]: fixed vocabularies and sequence encoding.
//! * [`targets`]: the target state catalog.
//! * [`datagen`]: constrained random sampling of training pairs.
//! * [`eval`]: fidelity curves, best-sample selection and reports.

pub mod circuit;
pub mod datagen;
pub mod dsl;
pub mod eval;
pub mod optics;
pub mod state;
pub mod surd;
pub mod targets;
pub mod tokenizer;

mod task;

pub use circuit::{CircuitProgram, StateVector};
pub use dsl::{Formula, MetaCode};
pub use optics::{Edge, Setup};
pub use state::{Ket, QuantumState};
pub use targets::TargetClass;
pub use task::{Task, UnknownTask};
pub use tokenizer::{TokenSeq, Vocabulary};
