//! Text forms of queries.
//!
//! * probability: `P(<target>)` or `P(<target> | <e1>; <e2>; ...)`
//! * entailment: `<p1>; <p2>; ... |- <conclusion>` (premises may be empty)
//!
//! The first `|` at parenthesis depth zero inside `P(...)` separates the
//! target from the evidence, so a top-level disjunction in the target must
//! be parenthesised: `P((!rain | wet))`.

use crate::formula::{parse_formula, AtomUniverse, Formula, FormulaError};

use super::EngineError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub target: Formula,
    pub evidence: Vec<Formula>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entailment {
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

fn syntax(position: usize, message: &str) -> EngineError {
    EngineError::QuerySyntax {
        position,
        message: message.to_string(),
    }
}

/// Parses `text[start..end]` as a formula, shifting error offsets so they
/// point into `text`.
fn parse_span(
    text: &str,
    start: usize,
    end: usize,
    universe: &mut AtomUniverse,
) -> Result<Formula, EngineError> {
    let piece = &text[start..end];
    if piece.trim().is_empty() {
        return Err(syntax(start, "expected a formula"));
    }
    parse_formula(piece, universe).map_err(|e| match e {
        FormulaError::Syntax { position, expected } => FormulaError::Syntax {
            position: position + start,
            expected,
        }
        .into(),
        other => other.into(),
    })
}

/// Byte offsets of `sep` at parenthesis depth zero within `text[start..end]`.
fn top_level(text: &str, start: usize, end: usize, sep: u8) -> Vec<usize> {
    let mut depth = 0i32;
    let mut hits = Vec::new();
    for (i, &b) in text.as_bytes()[start..end].iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            _ if b == sep && depth == 0 => hits.push(start + i),
            _ => {}
        }
    }
    hits
}

fn parse_list(
    text: &str,
    start: usize,
    end: usize,
    universe: &mut AtomUniverse,
) -> Result<Vec<Formula>, EngineError> {
    let mut out = Vec::new();
    let mut from = start;
    for cut in top_level(text, start, end, b';').into_iter().chain([end]) {
        out.push(parse_span(text, from, cut, universe)?);
        from = cut + 1;
    }
    Ok(out)
}

pub fn parse_query(text: &str, universe: &mut AtomUniverse) -> Result<Query, EngineError> {
    let lead = text.len() - text.trim_start().len();
    let body = text.trim();
    let rest = body
        .strip_prefix('P')
        .ok_or_else(|| syntax(lead, "query must start with `P(`"))?;
    let open = lead + 1 + (rest.len() - rest.trim_start().len());
    if text.as_bytes().get(open) != Some(&b'(') {
        return Err(syntax(open, "expected `(` after `P`"));
    }
    let close = lead + body.len() - 1;
    if close <= open || text.as_bytes()[close] != b')' {
        return Err(syntax(lead + body.len(), "query must end with `)`"));
    }
    // The outer parenthesis must enclose everything.
    let mut depth = 0i32;
    for (i, &b) in text.as_bytes()[open..=close].iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth == 0 && open + i != close {
                    return Err(syntax(open + i + 1, "unexpected text after `P(...)`"));
                }
                if depth < 0 {
                    return Err(syntax(open + i, "unbalanced `)`"));
                }
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(syntax(close, "unbalanced parentheses"));
    }
    let (inner_start, inner_end) = (open + 1, close);
    match top_level(text, inner_start, inner_end, b'|').first() {
        None => Ok(Query {
            target: parse_span(text, inner_start, inner_end, universe)?,
            evidence: Vec::new(),
        }),
        Some(&bar) => Ok(Query {
            target: parse_span(text, inner_start, bar, universe)?,
            evidence: parse_list(text, bar + 1, inner_end, universe)?,
        }),
    }
}

pub fn parse_entailment(
    text: &str,
    universe: &mut AtomUniverse,
) -> Result<Entailment, EngineError> {
    let turnstile = text
        .find("|-")
        .ok_or_else(|| syntax(text.len(), "expected `|-`"))?;
    let premises = if text[..turnstile].trim().is_empty() {
        Vec::new()
    } else {
        parse_list(text, 0, turnstile, universe)?
    };
    let conclusion = parse_span(text, turnstile + 2, text.len(), universe)?;
    Ok(Entailment {
        premises,
        conclusion,
    })
}
