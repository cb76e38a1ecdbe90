//! Problem files: a line-oriented text format and a JSON equivalent.
//!
//! Text:
//!
//! ```text
//! # comments and blank lines are ignored
//! pep <n> <d> <structure> [name...]
//! <n rows of n entries `re,im` for A_0>
//! ...
//! <n rows for A_d>
//! ```
//!
//! JSON: `{"n": .., "d": .., "structure": "..", "name": .., "coefficients": [A_0, .., A_d]}`
//! where each `A_i` is a list of rows and each entry a `[re, im]` pair.

use std::fmt;
use std::path::Path;

use polyeig::{CMatrix, MatrixPolynomial, PolyError, Structure, C64};
use serde::{Deserialize, Serialize};

/// A parsed problem with its optional display name.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub poly: MatrixPolynomial,
    pub name: Option<String>,
}

/// A parse diagnostic. `line`/`column` are 1-based; `None` for errors that
/// have no single position (JSON semantic errors carry a path instead).
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub location: Option<(usize, usize)>,
    pub message: String,
}

impl ParseError {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            location: Some((line, column)),
            message: message.into(),
        }
    }

    fn general(message: impl Into<String>) -> Self {
        Self {
            location: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.location {
            Some((l, c)) => write!(f, "line {l}, column {c}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl Format {
    /// `.json` means JSON; anything else is text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Text,
        }
    }
}

pub fn parse_problem(source: &str, format: Format) -> Result<Problem, ParseError> {
    match format {
        Format::Text => parse_text(source),
        Format::Json => parse_json(source),
    }
}

pub fn emit_problem(p: &Problem, format: Format) -> String {
    match format {
        Format::Text => emit_text(p),
        Format::Json => emit_json(p),
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let line = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &line[s..i],
                    column: line[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: line[..s].chars().count() + 1,
        });
    }
    out
}

fn parse_real(s: &str) -> Option<f64> {
    let v: f64 = s.parse().ok()?;
    v.is_finite().then_some(v)
}

fn parse_entry(tok: &Token, line: usize) -> Result<C64, ParseError> {
    let mut parts = tok.text.split(',');
    let re = parts.next().unwrap_or("");
    let im = parts.next();
    if parts.next().is_some() {
        return Err(ParseError::at(line, tok.column, format!("expected `re,im`, found `{}`", tok.text)));
    }
    let bad = |what: &str| ParseError::at(line, tok.column, format!("{what} in `{}` is not a finite number", tok.text));
    let re = parse_real(re).ok_or_else(|| bad("real part"))?;
    let im = match im {
        Some(s) => parse_real(s).ok_or_else(|| bad("imaginary part"))?,
        None => 0.0,
    };
    Ok(C64::new(re, im))
}

/// Parse one complex literal `re,im` (or a bare real).
pub fn parse_complex(s: &str) -> Result<C64, ParseError> {
    parse_entry(&Token { text: s, column: 1 }, 1).map_err(|e| ParseError::general(e.message))
}

fn parse_count(tok: Option<&Token>, line: usize, what: &str, end: usize) -> Result<usize, ParseError> {
    let tok = tok.ok_or_else(|| ParseError::at(line, end, format!("missing {what}")))?;
    match tok.text.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(ParseError::at(line, tok.column, format!("{what} must be a positive integer, found `{}`", tok.text))),
    }
}

fn parse_text(source: &str) -> Result<Problem, ParseError> {
    let mut lines = source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l, tokens(l)))
        .filter(|(_, _, t)| !t.is_empty());

    let (hline, htext, header) = lines
        .next()
        .ok_or_else(|| ParseError::at(1, 1, "empty file: expected header `pep n d structure`"))?;
    if header[0].text != "pep" {
        return Err(ParseError::at(hline, header[0].column, format!("expected `pep`, found `{}`", header[0].text)));
    }
    let end = htext.chars().count() + 1;
    let n = parse_count(header.get(1), hline, "dimension n", end)?;
    let d = parse_count(header.get(2), hline, "degree d", end)?;
    let stok = header.get(3).ok_or_else(|| ParseError::at(hline, end, "missing structure tag"))?;
    let structure = Structure::from_name(stok.text)
        .ok_or_else(|| ParseError::at(hline, stok.column, format!("unknown structure `{}`", stok.text)))?;
    if structure == Structure::Scalar && n != 1 {
        return Err(ParseError::at(hline, header[1].column, format!("scalar structure requires n = 1, got {n}")));
    }
    let name = (header.len() > 4).then(|| header[4..].iter().map(|t| t.text).collect::<Vec<_>>().join(" "));

    let total_rows = n
        .checked_mul(d + 1)
        .ok_or_else(|| ParseError::at(hline, header[1].column, "problem size overflows"))?;
    let mut coeffs = Vec::new();
    let mut data: Vec<C64> = Vec::new();
    // (line, column) of each entry, indexed [block][row][col] flattened
    let mut positions: Vec<(usize, usize)> = Vec::new();
    let mut block_lines = Vec::new();
    let mut last = (hline, end);
    for r in 0..total_rows {
        let (line, text, toks) = lines.next().ok_or_else(|| {
            ParseError::at(
                last.0 + 1,
                1,
                format!("expected row {} of coefficient A_{}, found end of file", r % n + 1, r / n),
            )
        })?;
        if toks.len() != n {
            let col = toks.get(n).map_or(text.chars().count() + 1, |t| t.column);
            return Err(ParseError::at(
                line,
                col,
                format!("row {} of A_{} has {} entries, expected {n}", r % n + 1, r / n, toks.len()),
            ));
        }
        if r % n == 0 {
            block_lines.push(line);
        }
        for t in &toks {
            data.push(parse_entry(t, line)?);
            positions.push((line, t.column));
        }
        if r % n == n - 1 {
            coeffs.push(CMatrix::from_row_major(n, n, std::mem::take(&mut data)));
        }
        last = (line, 1);
    }
    if let Some((line, _, toks)) = lines.next() {
        return Err(ParseError::at(line, toks[0].column, "unexpected data after the last coefficient block"));
    }

    let poly = MatrixPolynomial::new(coeffs, structure).map_err(|e| match e {
        PolyError::StructureViolation { index, row, col, .. } => {
            let (l, c) = positions[(index * n + row) * n + col];
            ParseError::at(l, c, format!("entry ({}, {}) of A_{index} must be zero for {} structure", row + 1, col + 1, structure.name()))
        }
        PolyError::ZeroLeadingCoefficient => ParseError::at(block_lines[d], 1, format!("leading coefficient A_{d} is zero")),
        other => ParseError::at(hline, 1, other.to_string()),
    })?;
    Ok(Problem { poly, name })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonProblem {
    n: usize,
    d: usize,
    structure: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    coefficients: Vec<Vec<Vec<[f64; 2]>>>,
}

fn parse_json(source: &str) -> Result<Problem, ParseError> {
    let jp: JsonProblem =
        serde_json::from_str(source).map_err(|e| ParseError::at(e.line(), e.column(), e.to_string()))?;
    let structure =
        Structure::from_name(&jp.structure).ok_or_else(|| ParseError::general(format!("structure: unknown tag `{}`", jp.structure)))?;
    if jp.n == 0 || jp.d == 0 {
        return Err(ParseError::general("n and d must be positive"));
    }
    if jp.coefficients.len() != jp.d + 1 {
        return Err(ParseError::general(format!(
            "coefficients: expected {} matrices, found {}",
            jp.d + 1,
            jp.coefficients.len()
        )));
    }
    let n = jp.n;
    let mut coeffs = Vec::with_capacity(jp.d + 1);
    for (k, m) in jp.coefficients.iter().enumerate() {
        if m.len() != n {
            return Err(ParseError::general(format!("coefficients[{k}]: expected {n} rows, found {}", m.len())));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in m.iter().enumerate() {
            if row.len() != n {
                return Err(ParseError::general(format!(
                    "coefficients[{k}][{i}]: expected {n} entries, found {}",
                    row.len()
                )));
            }
            for (j, [re, im]) in row.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(ParseError::general(format!("coefficients[{k}][{i}][{j}]: not finite")));
                }
                data.push(C64::new(*re, *im));
            }
        }
        coeffs.push(CMatrix::from_row_major(n, n, data));
    }
    let poly = MatrixPolynomial::new(coeffs, structure).map_err(|e| match e {
        PolyError::StructureViolation { index, row, col, structure } => ParseError::general(format!(
            "coefficients[{index}][{row}][{col}]: must be zero for {structure} structure"
        )),
        other => ParseError::general(other.to_string()),
    })?;
    Ok(Problem { poly, name: jp.name })
}

fn fmt_real(x: f64) -> String {
    // Debug formatting is the shortest string that parses back to `x`
    format!("{x:?}")
}

fn emit_text(p: &Problem) -> String {
    let poly = &p.poly;
    let n = poly.n();
    let mut out = format!("pep {} {} {}", n, poly.degree(), poly.structure().name());
    if let Some(name) = &p.name {
        let clean: Vec<&str> = name.split_whitespace().filter(|s| !s.contains('#')).collect();
        if !clean.is_empty() {
            out.push(' ');
            out.push_str(&clean.join(" "));
        }
    }
    out.push('\n');
    for (k, a) in poly.coeffs().iter().enumerate() {
        out.push_str(&format!("# A_{k}\n"));
        for i in 0..n {
            let row: Vec<String> = a
                .row(i)
                .iter()
                .map(|z| format!("{},{}", fmt_real(z.re), fmt_real(z.im)))
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

fn emit_json(p: &Problem) -> String {
    let poly = &p.poly;
    let n = poly.n();
    let jp = JsonProblem {
        n,
        d: poly.degree(),
        structure: poly.structure().name().to_string(),
        name: p.name.clone(),
        coefficients: poly
            .coeffs()
            .iter()
            .map(|a| (0..n).map(|i| a.row(i).iter().map(|z| [z.re, z.im]).collect()).collect())
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&jp).expect("problem serializes");
    s.push('\n');
    s
}
