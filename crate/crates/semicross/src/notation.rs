//! Text notation for IS_n elements.
//!
//! Grammar (UTF-8):
//!   element ::= "e" | "0" | term+
//!   term    ::= "(" points ")" | "[" points "]"
//!   points  ::= integer (ws integer)*
//!
//! "(…)" is a cycle, "[…]" a chain, "e" the identity, "0" the empty map at
//! the ambient rank. Terms must have pairwise disjoint point sets.
//!
//! Canonical output: "0" for the empty map, "e" for the identity, otherwise
//! the chain decomposition: cycles first (sorted by minimal point), then
//! chains (sorted by first point), points separated by single spaces.

use std::fmt;

use thiserror::Error;

use crate::isn::{ChainDecomposition, PartialBijection, Point};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NotationError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("point {point} out of range 1..={rank} at byte {pos}")]
    PointOutOfRange { pos: usize, point: u64, rank: u8 },
    #[error("point {point} appears in more than one term (at byte {pos})")]
    OverlappingPoint { pos: usize, point: Point },
    #[error("duplicate point {point} inside a term (at byte {pos})")]
    DuplicateInTerm { pos: usize, point: Point },
}

fn syntax(pos: usize, msg: impl Into<String>) -> NotationError {
    NotationError::Syntax {
        pos,
        msg: msg.into(),
    }
}

/// Parses element notation at ambient rank `n`.
pub fn parse_element(text: &str, n: u8) -> Result<PartialBijection, NotationError> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    skip_ws(bytes, &mut pos);

    if pos >= bytes.len() {
        return Err(syntax(pos, "empty input"));
    }

    // The two atomic forms.
    if bytes[pos] == b'e' || bytes[pos] == b'0' {
        let atom = bytes[pos];
        let mut end = pos + 1;
        skip_ws(bytes, &mut end);
        if end != bytes.len() {
            return Err(syntax(end, "unexpected trailing input"));
        }
        return Ok(if atom == b'e' {
            PartialBijection::identity(n)
        } else {
            PartialBijection::empty(n)
        });
    }

    let mut result = PartialBijection::identity(n);
    let mut used = vec![false; n as usize + 1];
    let mut any_term = false;

    while pos < bytes.len() {
        let open = bytes[pos];
        let (close, is_cycle) = match open {
            b'(' => (b')', true),
            b'[' => (b']', false),
            _ => return Err(syntax(pos, "expected '(' or '['")),
        };
        let term_start = pos;
        pos += 1;
        let points = parse_points(bytes, &mut pos, n)?;
        if pos >= bytes.len() || bytes[pos] != close {
            return Err(syntax(pos, format!("expected '{}'", close as char)));
        }
        pos += 1;
        if points.is_empty() {
            return Err(syntax(term_start, "term must contain at least one point"));
        }
        let mut seen_in_term = vec![false; n as usize + 1];
        for &p in &points {
            if seen_in_term[p as usize] {
                return Err(NotationError::DuplicateInTerm {
                    pos: term_start,
                    point: p,
                });
            }
            seen_in_term[p as usize] = true;
            if used[p as usize] {
                return Err(NotationError::OverlappingPoint {
                    pos: term_start,
                    point: p,
                });
            }
            used[p as usize] = true;
        }
        let term = if is_cycle {
            PartialBijection::cycle(n, &points)
        } else {
            PartialBijection::chain(n, &points)
        }
        .expect("points validated");
        result = result.compose(&term).expect("same rank");
        any_term = true;
        skip_ws(bytes, &mut pos);
    }

    if !any_term {
        return Err(syntax(pos, "expected an element"));
    }
    Ok(result)
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_points(bytes: &[u8], pos: &mut usize, n: u8) -> Result<Vec<Point>, NotationError> {
    let mut points = Vec::new();
    loop {
        skip_ws(bytes, pos);
        if *pos >= bytes.len() || !bytes[*pos].is_ascii_digit() {
            return Ok(points);
        }
        let start = *pos;
        let mut value: u64 = 0;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            value = value * 10 + (bytes[*pos] - b'0') as u64;
            if value > 1_000 {
                return Err(syntax(start, "point literal too large"));
            }
            *pos += 1;
        }
        if value == 0 || value > n as u64 {
            return Err(NotationError::PointOutOfRange {
                pos: start,
                point: value,
                rank: n,
            });
        }
        points.push(value as Point);
    }
}

/// Canonical text form of an element.
pub fn format_element(a: &PartialBijection) -> String {
    if a.is_empty_map() {
        return "0".to_string();
    }
    let d = a.chain_decomposition();
    if d.is_empty() {
        return "e".to_string();
    }
    format_decomposition(&d)
}

/// Text form of a decomposition's parts; "e" when there are none.
pub fn format_decomposition(d: &ChainDecomposition) -> String {
    if d.is_empty() {
        return "e".to_string();
    }
    let mut out = String::new();
    for cyc in &d.cycles {
        out.push('(');
        push_points(&mut out, cyc);
        out.push(')');
    }
    for ch in &d.chains {
        out.push('[');
        push_points(&mut out, ch);
        out.push(']');
    }
    out
}

fn push_points(out: &mut String, points: &[Point]) {
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&p.to_string());
    }
}

impl fmt::Display for PartialBijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_element(self))
    }
}

impl fmt::Display for ChainDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_decomposition(self))
    }
}
