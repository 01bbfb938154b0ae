//! Meta-codes: short programs in the size index `N` that build a setup or a
//! circuit for every `N`.
//!
//! The language is the fragment the task vocabularies can spell. Optics codes
//! are a list of edge calls `e(u,v,mu,mv[,w])`, then a loop
//! `for ii in range(N):` whose indented body adds more edges. Circuit and
//! graph codes are gate calls such as `qCNOT(ii,1+ii)` before, inside and
//! after a loop `for ii in range(<formula>):`. Every index is an affine
//! [`Formula`] in `N` and `ii`.

mod interp;
mod parse;

use std::fmt;

use crate::circuit::GateKind;
use crate::task::Task;

pub use interp::Instance;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DslError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: index {value} outside 0..={max} at N={n}{}", fmt_ii(*ii))]
    OutOfRange {
        line: usize,
        value: i64,
        max: usize,
        n: usize,
        ii: Option<i64>,
    },
    #[error("line {line}: repeated index {value} at N={n}{}", fmt_ii(*ii))]
    Collision {
        line: usize,
        value: i64,
        n: usize,
        ii: Option<i64>,
    },
    #[error("size index {0} is too large")]
    TooLarge(usize),
}

fn fmt_ii(ii: Option<i64>) -> String {
    ii.map(|i| format!(", ii={i}")).unwrap_or_default()
}

/// The three kinds of term in a formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Const,
    /// The size index `N` (spelled `NN` in circuit and graph codes).
    Size,
    /// The loop variable `ii`.
    Index,
}

impl Symbol {
    fn spelling(self, task: Task) -> &'static str {
        match (self, task) {
            (Symbol::Const, _) => "",
            (Symbol::Size, Task::Optics) => "N",
            (Symbol::Size, _) => "NN",
            (Symbol::Index, _) => "ii",
        }
    }
}

/// `c0 + cN·N + cII·ii`, with its terms kept in the order they are written.
/// No symbol appears twice and no coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Formula {
    terms: Vec<(Symbol, i64)>,
}

impl Formula {
    /// Builds a formula from terms in print order, skipping zero
    /// coefficients. Returns `None` if a symbol repeats.
    pub fn from_terms(terms: impl IntoIterator<Item = (Symbol, i64)>) -> Option<Self> {
        let mut out: Vec<(Symbol, i64)> = Vec::new();
        for (s, c) in terms {
            if out.iter().any(|(t, _)| *t == s) {
                return None;
            }
            if c != 0 {
                out.push((s, c));
            }
        }
        Some(Formula { terms: out })
    }

    pub fn constant(c: i64) -> Self {
        Formula::from_terms([(Symbol::Const, c)]).expect("single term")
    }

    /// `c0 + cn·N + cii·ii`, written in that order.
    pub fn affine(c0: i64, cn: i64, cii: i64) -> Self {
        Formula::from_terms([
            (Symbol::Const, c0),
            (Symbol::Size, cn),
            (Symbol::Index, cii),
        ])
        .expect("distinct symbols")
    }

    pub fn terms(&self) -> &[(Symbol, i64)] {
        &self.terms
    }

    pub fn coeff(&self, s: Symbol) -> i64 {
        self.terms
            .iter()
            .find(|(t, _)| *t == s)
            .map_or(0, |(_, c)| *c)
    }

    pub fn uses_index(&self) -> bool {
        self.coeff(Symbol::Index) != 0
    }

    pub fn eval(&self, n: i64, ii: i64) -> i64 {
        self.coeff(Symbol::Const) + self.coeff(Symbol::Size) * n + self.coeff(Symbol::Index) * ii
    }

    /// Text in the given task's spelling, e.g. `2*ii+1` or `1+2*NN`.
    pub fn print(&self, task: Task) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, &(s, c)) in self.terms.iter().enumerate() {
            if c < 0 {
                out.push('-');
            } else if i > 0 {
                out.push('+');
            }
            let mag = c.unsigned_abs();
            match s {
                Symbol::Const => out.push_str(&mag.to_string()),
                _ => {
                    if mag != 1 {
                        out.push_str(&format!("{mag}*"));
                    }
                    out.push_str(s.spelling(task));
                }
            }
        }
        out
    }
}

/// `e(u,v,mu,mv[,w])`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeLine {
    pub u: Formula,
    pub v: Formula,
    pub mu: u8,
    pub mv: u8,
    /// Omitted from the text when 1.
    pub w: i64,
}

/// `qName(arg,...)`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GateLine {
    pub kind: GateKind,
    pub args: Vec<Formula>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Line {
    Edge(EdgeLine),
    Gate(GateLine),
}

impl Line {
    pub fn print(&self, task: Task) -> String {
        match self {
            Line::Edge(e) => {
                let mut s = format!(
                    "e({},{},{},{}",
                    e.u.print(task),
                    e.v.print(task),
                    e.mu,
                    e.mv
                );
                if e.w != 1 {
                    s.push_str(&format!(",{}", e.w));
                }
                s.push(')');
                s
            }
            Line::Gate(g) => {
                let args: Vec<String> = g.args.iter().map(|a| a.print(task)).collect();
                format!("{}({})", g.kind, args.join(","))
            }
        }
    }

    fn formulas(&self) -> Vec<&Formula> {
        match self {
            Line::Edge(e) => vec![&e.u, &e.v],
            Line::Gate(g) => g.args.iter().collect(),
        }
    }
}

/// `for ii in range(<range>):` and its indented lines. Optics loops always
/// run to `N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Loop {
    pub range: Formula,
    pub lines: Vec<Line>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MetaCode {
    pub task: Task,
    pub pre: Vec<Line>,
    pub body: Option<Loop>,
    pub post: Vec<Line>,
}

impl fmt::Debug for MetaCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MetaCode[{}]\n{}", self.task, self.to_text())
    }
}

pub const INDENT: &str = "    ";

impl MetaCode {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for l in &self.pre {
            out.push_str(&l.print(self.task));
            out.push('\n');
        }
        if let Some(body) = &self.body {
            out.push_str(&format!(
                "for ii in range({}):\n",
                body.range.print(self.task)
            ));
            for l in &body.lines {
                out.push_str(INDENT);
                out.push_str(&l.print(self.task));
                out.push('\n');
            }
        }
        for l in &self.post {
            out.push_str(&l.print(self.task));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, task: Task) -> Result<Self, DslError> {
        parse::parse_code(text, task)
    }

    pub fn body_lines(&self) -> &[Line] {
        self.body.as_ref().map_or(&[], |b| &b.lines)
    }

    /// Every formula in the code with a flag telling whether it sits inside
    /// the loop.
    pub fn formulas(&self) -> impl Iterator<Item = (&Formula, bool)> + '_ {
        let outer = self
            .pre
            .iter()
            .chain(&self.post)
            .flat_map(|l| l.formulas())
            .map(|f| (f, false));
        let inner = self
            .body_lines()
            .iter()
            .flat_map(|l| l.formulas())
            .map(|f| (f, true));
        outer.chain(inner)
    }

    /// 1-based text line of the `k`-th pre line, loop body line, or post line.
    fn line_no(&self, part: Part, k: usize) -> usize {
        let header = usize::from(self.body.is_some());
        match part {
            Part::Pre => k + 1,
            Part::Body => self.pre.len() + 2 + k,
            Part::Post => self.pre.len() + header + self.body_lines().len() + k + 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Part {
    Pre,
    Body,
    Post,
}
