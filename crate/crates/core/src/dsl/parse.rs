use crate::circuit::GateKind;
use crate::optics::MAX_DIM;
use crate::task::Task;

use super::{DslError, EdgeLine, Formula, GateLine, Line, Loop, MetaCode, Symbol, INDENT};

const OPTICS_HEADER: &str = "for ii in range(N):";

pub(super) fn parse_code(text: &str, task: Task) -> Result<MetaCode, DslError> {
    let text = text.strip_suffix('\n').unwrap_or(text);
    if text.is_empty() {
        return Err(DslError::Parse {
            line: 1,
            msg: "empty code".into(),
        });
    }
    let mut code = MetaCode {
        task,
        pre: Vec::new(),
        body: None,
        post: Vec::new(),
    };
    let mut in_loop = false;
    for (i, raw) in text.split('\n').enumerate() {
        let line_no = i + 1;
        let err = |msg: String| DslError::Parse { line: line_no, msg };
        let (indented, content) = match raw.strip_prefix(INDENT) {
            Some(rest) => (true, rest),
            None => (false, raw),
        };
        if content.starts_with(' ') || content.starts_with('\t') {
            return Err(err("indentation must be exactly four spaces".into()));
        }
        if content.is_empty() {
            return Err(err("empty line".into()));
        }
        if indented {
            if !in_loop {
                return Err(err("indented line outside a loop".into()));
            }
            let l = parse_line(content, task, true).map_err(err)?;
            code.body.as_mut().expect("in loop").lines.push(l);
            continue;
        }
        if in_loop && code.body_lines().is_empty() {
            return Err(err("loop body is empty".into()));
        }
        in_loop = false;
        if content.starts_with("for ") {
            if code.body.is_some() {
                return Err(err("only one loop is allowed".into()));
            }
            let range = parse_header(content, task).map_err(err)?;
            code.body = Some(Loop {
                range,
                lines: Vec::new(),
            });
            in_loop = true;
            continue;
        }
        let l = parse_line(content, task, false).map_err(err)?;
        if code.body.is_some() {
            if task == Task::Optics {
                return Err(err("optics codes have no lines after the loop".into()));
            }
            code.post.push(l);
        } else {
            code.pre.push(l);
        }
    }
    if in_loop && code.body_lines().is_empty() {
        let line = text.split('\n').count();
        return Err(DslError::Parse {
            line,
            msg: "loop body is empty".into(),
        });
    }
    Ok(code)
}

fn parse_header(s: &str, task: Task) -> Result<Formula, String> {
    if task == Task::Optics {
        return if s == OPTICS_HEADER {
            Ok(Formula::from_terms([(Symbol::Size, 1)]).expect("one term"))
        } else {
            Err(format!("expected `{OPTICS_HEADER}`"))
        };
    }
    let inner = s
        .strip_prefix("for ii in range(")
        .and_then(|r| r.strip_suffix("):"))
        .ok_or_else(|| "expected `for ii in range(<formula>):`".to_string())?;
    let f = parse_formula(inner, task)?;
    if f.uses_index() {
        return Err("loop range cannot use `ii`".into());
    }
    Ok(f)
}

fn parse_line(s: &str, task: Task, in_loop: bool) -> Result<Line, String> {
    let open = s
        .find('(')
        .ok_or_else(|| format!("expected a call, got `{s}`"))?;
    let name = &s[..open];
    let args = s[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| "missing `)`".to_string())?;
    let args: Vec<&str> = args.split(',').collect();
    let formula = |a: &str| -> Result<Formula, String> {
        let f = parse_formula(a, task)?;
        if f.uses_index() && !in_loop {
            return Err("`ii` used outside the loop".into());
        }
        Ok(f)
    };
    match task {
        Task::Optics => {
            if name != "e" {
                return Err(format!("unknown function `{name}`"));
            }
            if args.len() != 4 && args.len() != 5 {
                return Err(format!("e() takes 4 or 5 arguments, got {}", args.len()));
            }
            let mode = |a: &str| -> Result<u8, String> {
                match parse_uint(a) {
                    Some(m) if m < MAX_DIM as u64 => Ok(m as u8),
                    _ => Err(format!("bad mode `{a}`")),
                }
            };
            let w = match args.get(4) {
                None => 1,
                Some(a) => parse_weight(a).ok_or_else(|| format!("bad weight `{a}`"))?,
            };
            Ok(Line::Edge(EdgeLine {
                u: formula(args[0])?,
                v: formula(args[1])?,
                mu: mode(args[2])?,
                mv: mode(args[3])?,
                w,
            }))
        }
        Task::Circuit | Task::Graph => {
            let kind: GateKind = name.parse().map_err(|_| format!("unknown gate `{name}`"))?;
            if task == Task::Graph && kind != GateKind::Cz {
                return Err(format!("graph codes allow only qCZ, got `{name}`"));
            }
            if args.len() != kind.arity() {
                return Err(format!(
                    "{name} takes {} arguments, got {}",
                    kind.arity(),
                    args.len()
                ));
            }
            let args = args
                .into_iter()
                .map(formula)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Line::Gate(GateLine { kind, args }))
        }
    }
}

fn parse_uint(s: &str) -> Option<u64> {
    let canonical =
        !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'));
    if canonical {
        s.parse().ok()
    } else {
        None
    }
}

fn parse_weight(s: &str) -> Option<i64> {
    let (neg, digits) = match s.strip_prefix('-') {
        Some(d) => (true, d),
        None => (false, s),
    };
    let v = parse_uint(digits)? as i64;
    match (v, neg) {
        (0, _) => None,
        (v, true) => Some(-v),
        (v, false) => Some(v),
    }
}

/// Parses the printed form of a formula. Only the form the printer produces
/// is accepted: no leading `+`, no `1*` and no zero coefficients.
pub(super) fn parse_formula(s: &str, task: Task) -> Result<Formula, String> {
    if s == "0" {
        return Ok(Formula::default());
    }
    let bad = || format!("malformed formula `{s}`");
    if s.is_empty() {
        return Err(bad());
    }
    let size = Symbol::Size.spelling(task);
    let mut terms = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        let negative = if let Some(r) = rest.strip_prefix('-') {
            rest = r;
            true
        } else if let Some(r) = rest.strip_prefix('+') {
            if terms.is_empty() {
                return Err(bad());
            }
            rest = r;
            false
        } else if terms.is_empty() {
            false
        } else {
            return Err(bad());
        };
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let term = &rest[..end];
        rest = &rest[end..];
        let (mag, sym) = match term.split_once('*') {
            Some((num, sym)) => {
                let mag = parse_uint(num).filter(|&m| m > 1).ok_or_else(bad)?;
                (
                    mag,
                    symbol_of(sym, size)
                        .filter(|s| *s != Symbol::Const)
                        .ok_or_else(bad)?,
                )
            }
            None => match parse_uint(term) {
                Some(m) if m > 0 => (m, Symbol::Const),
                Some(_) => return Err(bad()),
                None => (1, symbol_of(term, size).ok_or_else(bad)?),
            },
        };
        let mag = i64::try_from(mag).map_err(|_| bad())?;
        terms.push((sym, if negative { -mag } else { mag }));
    }
    Formula::from_terms(terms).ok_or_else(|| format!("repeated symbol in `{s}`"))
}

fn symbol_of(s: &str, size: &str) -> Option<Symbol> {
    if s == size {
        Some(Symbol::Size)
    } else if s == "ii" {
        Some(Symbol::Index)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optics_example() {
        let text = "e(0,1,0,0)\nfor ii in range(N):\n    e(2*ii,2*ii+1,1,1)\n";
        let code = MetaCode::parse(text, Task::Optics).unwrap();
        assert_eq!(code.pre.len(), 1);
        assert_eq!(code.body_lines().len(), 1);
        assert_eq!(code.to_text(), text);
    }

    #[test]
    fn circuit_example() {
        let text = "qH(0)\nfor ii in range(2*NN+1):\n    qCNOT(ii,1+ii)\nqX(0)\n";
        let code = MetaCode::parse(text, Task::Circuit).unwrap();
        assert_eq!(code.post.len(), 1);
        assert_eq!(code.to_text(), text);
    }

    #[test]
    fn weights() {
        let code = MetaCode::parse("e(0,1,0,0,-2)\ne(0,1,1,1,1)\n", Task::Optics).unwrap();
        assert_eq!(code.to_text(), "e(0,1,0,0,-2)\ne(0,1,1,1)\n");
        assert!(MetaCode::parse("e(0,1,0,0,0)\n", Task::Optics).is_err());
        assert!(MetaCode::parse("e(0,1,3,0)\n", Task::Optics).is_err());
    }

    #[test]
    fn errors_carry_lines() {
        let three = "e(0,1,0,0)\nfor ii in range(N):\n   e(ii,1,0,0)\n";
        assert!(matches!(
            MetaCode::parse(three, Task::Optics),
            Err(DslError::Parse { line: 3, .. })
        ));
        let unknown = "qH(0)\nqY(1)\n";
        assert!(matches!(
            MetaCode::parse(unknown, Task::Circuit),
            Err(DslError::Parse { line: 2, .. })
        ));
        let outside = "qH(ii)\n";
        assert!(MetaCode::parse(outside, Task::Circuit).is_err());
        let graph = "qH(0)\n";
        assert!(MetaCode::parse(graph, Task::Graph).is_err());
        let post = "e(0,1,0,0)\nfor ii in range(N):\n    e(ii,1,0,0)\ne(0,1,1,1)\n";
        assert!(matches!(
            MetaCode::parse(post, Task::Optics),
            Err(DslError::Parse { line: 4, .. })
        ));
        let empty_body = "qH(0)\nfor ii in range(NN):\nqX(0)\n";
        assert!(matches!(
            MetaCode::parse(empty_body, Task::Circuit),
            Err(DslError::Parse { line: 3, .. })
        ));
        assert!(MetaCode::parse("", Task::Circuit).is_err());
    }

    #[test]
    fn formulas() {
        let ok = [
            "0",
            "1",
            "-4",
            "N",
            "-N",
            "2*N+3",
            "ii",
            "2*ii+1",
            "-1+2*N-ii",
            "3-ii",
        ];
        for s in ok {
            assert_eq!(
                parse_formula(s, Task::Optics).unwrap().print(Task::Optics),
                s
            );
        }
        let bad = [
            "", "+1", "1*N", "0*N", "N+N", "2*", "*N", "01", "1+0", "NN", "N--1", "2*3",
        ];
        for s in bad {
            assert!(parse_formula(s, Task::Optics).is_err(), "{s}");
        }
        assert!(parse_formula("NN+1", Task::Circuit).is_ok());
        assert!(parse_formula("N+1", Task::Circuit).is_err());
    }
}
