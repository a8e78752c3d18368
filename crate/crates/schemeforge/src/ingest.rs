//! Plain-text inputs: permutation generator lists and loop multiplication
//! tables.

use schemeforge_core::loopcore::TableLoop;
use schemeforge_core::permgroup::Permutation;

use crate::error::{CliError, ParseError};

enum Line {
    Images(Vec<u32>),
    Cycles(Vec<Vec<usize>>),
}

/// Strips a `#` comment; `None` for lines with nothing left.
fn content(raw: &str) -> Option<&str> {
    let body = raw.split('#').next().unwrap_or("").trim();
    (!body.is_empty()).then_some(body)
}

fn column_of(raw: &str, needle: &str) -> usize {
    raw.find(needle).map_or(1, |i| raw[..i].chars().count() + 1)
}

fn parse_cycles(raw: &str, body: &str, line: usize) -> Result<Vec<Vec<usize>>, ParseError> {
    let mut cycles = Vec::new();
    let mut rest = body;
    while !rest.is_empty() {
        let open = rest.strip_prefix('(').ok_or_else(|| {
            ParseError::new(line, column_of(raw, rest), "expected '(' to start a cycle")
        })?;
        let close = open
            .find(')')
            .ok_or_else(|| ParseError::new(line, raw.chars().count() + 1, "unterminated cycle"))?;
        let mut cycle = Vec::new();
        for tok in open[..close].split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let v = tok
                .parse()
                .map_err(|_| ParseError::new(line, column_of(raw, tok), format!("bad point {tok:?}")))?;
            cycle.push(v);
        }
        cycles.push(cycle);
        rest = open[close + 1..].trim_start();
    }
    Ok(cycles)
}

/// Reads one permutation per line, as an image list `2 0 1` or in cycle
/// notation `(0 1 2)(3 4)`. Cycle lines are padded to the common degree,
/// which is `degree` when given and otherwise the largest point seen plus
/// one (or the image-list length).
pub fn parse_generators(text: &str, degree: Option<usize>) -> Result<Vec<Permutation>, ParseError> {
    let mut lines = Vec::new();
    let mut max_point = 0usize;
    let mut list_len: Option<(usize, usize)> = None;
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let Some(body) = content(raw) else { continue };
        if body.starts_with('(') {
            let cycles = parse_cycles(raw, body, no)?;
            max_point = max_point.max(cycles.iter().flatten().map(|&x| x + 1).max().unwrap_or(0));
            lines.push((no, Line::Cycles(cycles)));
        } else {
            let mut images = Vec::new();
            for tok in body.split_whitespace() {
                images.push(
                    tok.parse()
                        .map_err(|_| ParseError::new(no, column_of(raw, tok), format!("bad image {tok:?}")))?,
                );
            }
            match list_len {
                Some((len, first)) if len != images.len() => {
                    return Err(ParseError::new(
                        no,
                        1,
                        format!("image list has {} entries but line {first} has {len}", images.len()),
                    ))
                }
                None => list_len = Some((images.len(), no)),
                _ => {}
            }
            lines.push((no, Line::Images(images)));
        }
    }
    if lines.is_empty() {
        return Err(ParseError::new(text.lines().count().max(1), 1, "no generators"));
    }
    let n = match (degree, list_len) {
        (Some(d), Some((len, no))) if d != len => {
            return Err(ParseError::new(no, 1, format!("image list has {len} entries, degree is {d}")))
        }
        (Some(d), _) => d,
        (None, Some((len, _))) => len,
        (None, None) => max_point,
    };
    if max_point > n {
        let no = lines.iter().find(|(_, l)| matches!(l, Line::Cycles(_))).map_or(1, |(no, _)| *no);
        return Err(ParseError::new(no, 1, format!("cycle point {} is outside degree {n}", max_point - 1)));
    }
    lines
        .into_iter()
        .map(|(no, l)| {
            let p = match l {
                Line::Images(images) => Permutation::new(images),
                Line::Cycles(cycles) => Permutation::from_cycles(n, &cycles),
            };
            p.map_err(|e| ParseError::new(no, 1, e.to_string()))
        })
        .collect()
}

/// Reads `n` on the first line and then `n` rows of `n` indices; row `x`
/// holds the products `x·y`.
pub fn parse_loop_table(text: &str) -> Result<TableLoop, CliError> {
    let mut lines = text.lines().enumerate().filter_map(|(i, raw)| content(raw).map(|b| (i + 1, raw, b)));
    let (no, raw, first) = lines.next().ok_or_else(|| ParseError::new(1, 1, "empty loop table"))?;
    let n: usize = first
        .parse()
        .map_err(|_| ParseError::new(no, column_of(raw, first), format!("expected the order, got {first:?}")))?;
    let mut table = Vec::with_capacity(n * n);
    let mut last_line = no;
    for x in 0..n {
        let (no, raw, body) =
            lines.next().ok_or_else(|| ParseError::new(last_line + 1, 1, format!("missing row {x} of {n}")))?;
        last_line = no;
        let row: Vec<&str> = body.split_whitespace().collect();
        if row.len() != n {
            return Err(ParseError::new(no, 1, format!("row {x} has {} entries, expected {n}", row.len())).into());
        }
        for tok in row {
            let v: u32 =
                tok.parse().map_err(|_| ParseError::new(no, column_of(raw, tok), format!("bad index {tok:?}")))?;
            table.push(v);
        }
    }
    if let Some((no, _, _)) = lines.next() {
        return Err(ParseError::new(no, 1, "trailing data after the last row").into());
    }
    TableLoop::new(n, table).map_err(|e| ParseError::new(no, 1, e.to_string()).into())
}
