//! Problem-instance and model files.
//!
//! Problem files are line-oriented text:
//!
//! ```text
//! n 3
//! offset 1.5000000000000000e0
//! lin 0 -2.0000000000000000e0
//! quad 0 2 4.0000000000000000e0
//! cube 0 1 2 1.0000000000000000e0
//! quart 0 1 2 3 1.0000000000000000e0
//! ```
//!
//! Indices are 0-based and strictly increasing within a line. Blank lines
//! and lines starting with `#` are ignored. Values are written with 17
//! significant digits, so a write/read round trip is exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::boosting::StrongClassifier;
use crate::qubo::{PseudoBooleanProblem, QuboProblem};
use crate::{Error, Result};

const TERM_KEYWORDS: [&str; 4] = ["lin", "quad", "cube", "quart"];

fn header(out: &mut String, n: usize, offset: f64) {
    let _ = writeln!(out, "n {n}");
    let _ = writeln!(out, "offset {offset:.16e}");
}

fn term_line(out: &mut String, key: &[usize], value: f64) {
    out.push_str(TERM_KEYWORDS[key.len() - 1]);
    for i in key {
        let _ = write!(out, " {i}");
    }
    let _ = writeln!(out, " {value:.16e}");
}

/// Every linear entry and every stored quadratic entry, zeros included.
pub fn format_qubo(problem: &QuboProblem) -> String {
    let mut out = String::new();
    header(&mut out, problem.n(), problem.offset());
    for (i, v) in problem.linear().iter().enumerate() {
        term_line(&mut out, &[i], *v);
    }
    for (&(i, j), v) in problem.quadratic() {
        term_line(&mut out, &[i, j], *v);
    }
    out
}

pub fn format_pseudo_boolean(problem: &PseudoBooleanProblem) -> String {
    let mut out = String::new();
    header(&mut out, problem.n(), problem.offset());
    // lower degrees first, lexicographic within a degree
    let mut keys: Vec<&Vec<usize>> = problem.terms().keys().collect();
    keys.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    for key in keys {
        term_line(&mut out, key, problem.terms()[key]);
    }
    out
}

struct Parsed {
    n: usize,
    offset: f64,
    terms: BTreeMap<Vec<usize>, f64>,
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse(text: &str) -> Result<Parsed> {
    let mut n = None;
    let mut offset = None;
    let mut terms = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let keyword = fields.next().expect("non-empty line");
        let rest: Vec<&str> = fields.collect();
        let number = |s: &str| -> Result<f64> {
            let v: f64 = s.parse().map_err(|_| parse_error(line, format!("invalid number {s:?}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_error(line, format!("non-finite value {s:?}")))
            }
        };
        match keyword {
            "n" => {
                if n.is_some() {
                    return Err(parse_error(line, "duplicate n line"));
                }
                let [v] = rest[..] else {
                    return Err(parse_error(line, "expected `n <count>`"));
                };
                n = Some(v.parse::<usize>().map_err(|_| parse_error(line, format!("invalid count {v:?}")))?);
            }
            "offset" => {
                if offset.is_some() {
                    return Err(parse_error(line, "duplicate offset line"));
                }
                let [v] = rest[..] else {
                    return Err(parse_error(line, "expected `offset <value>`"));
                };
                offset = Some(number(v)?);
            }
            kw => {
                let Some(degree) = TERM_KEYWORDS.iter().position(|k| *k == kw).map(|p| p + 1) else {
                    return Err(parse_error(line, format!("unknown keyword {kw:?}")));
                };
                if rest.len() != degree + 1 {
                    return Err(parse_error(line, format!("`{kw}` takes {degree} indices and a value")));
                }
                let Some(count) = n else {
                    return Err(parse_error(line, "term before the n line"));
                };
                let key = rest[..degree]
                    .iter()
                    .map(|s| s.parse::<usize>().map_err(|_| parse_error(line, format!("invalid index {s:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                if !key.windows(2).all(|w| w[0] < w[1]) {
                    return Err(parse_error(line, "indices must be strictly increasing"));
                }
                if key[degree - 1] >= count {
                    return Err(parse_error(line, format!("index {} out of range for n = {count}", key[degree - 1])));
                }
                let value = number(rest[degree])?;
                if terms.insert(key, value).is_some() {
                    return Err(parse_error(line, "duplicate term"));
                }
            }
        }
    }
    Ok(Parsed {
        n: n.ok_or_else(|| parse_error(0, "missing n line"))?,
        offset: offset.unwrap_or(0.0),
        terms,
    })
}

/// Accepts terms up to degree 4.
pub fn parse_pseudo_boolean(text: &str) -> Result<PseudoBooleanProblem> {
    let p = parse(text)?;
    PseudoBooleanProblem::new(p.n, p.terms, p.offset)
}

/// Rejects `cube` and `quart` lines.
pub fn parse_qubo(text: &str) -> Result<QuboProblem> {
    let p = parse(text)?;
    let mut linear = vec![0.0; p.n];
    let mut quadratic = BTreeMap::new();
    for (key, v) in p.terms {
        match key[..] {
            [i] => linear[i] = v,
            [i, j] => {
                quadratic.insert((i, j), v);
            }
            _ => return Err(Error::invalid(format!("term {key:?} has degree above 2"))),
        }
    }
    QuboProblem::new(linear, quadratic, p.offset)
}

pub fn write_qubo(problem: &QuboProblem, path: impl AsRef<Path>) -> Result<()> {
    Ok(std::fs::write(path, format_qubo(problem))?)
}

pub fn read_qubo(path: impl AsRef<Path>) -> Result<QuboProblem> {
    parse_qubo(&std::fs::read_to_string(path)?)
}

pub fn write_pseudo_boolean(problem: &PseudoBooleanProblem, path: impl AsRef<Path>) -> Result<()> {
    Ok(std::fs::write(path, format_pseudo_boolean(problem))?)
}

pub fn read_pseudo_boolean(path: impl AsRef<Path>) -> Result<PseudoBooleanProblem> {
    parse_pseudo_boolean(&std::fs::read_to_string(path)?)
}

/// Model file: pretty-printed JSON holding `kappa`, `theta` and the stump
/// list with multipliers.
pub fn format_model(classifier: &StrongClassifier) -> String {
    let mut s = serde_json::to_string_pretty(classifier).expect("classifier serializes");
    s.push('\n');
    s
}

pub fn parse_model(text: &str) -> Result<StrongClassifier> {
    let c: StrongClassifier = serde_json::from_str(text).map_err(|e| parse_error(e.line(), e.to_string()))?;
    if !c.kappa.is_finite() || !c.theta.is_finite() || c.terms.iter().any(|t| !t.alpha.is_finite()) {
        return Err(Error::invalid("model values must be finite"));
    }
    for t in &c.terms {
        crate::stumps::Stump::new(t.stump.projection, t.stump.polarity, t.stump.threshold)?;
    }
    Ok(c)
}

pub fn write_model(classifier: &StrongClassifier, path: impl AsRef<Path>) -> Result<()> {
    Ok(std::fs::write(path, format_model(classifier))?)
}

pub fn read_model(path: impl AsRef<Path>) -> Result<StrongClassifier> {
    parse_model(&std::fs::read_to_string(path)?)
}
