//! Textual grammar shared by the library and the command line.
//!
//! * system: `A2`, `G2`, `A1xA1` (factors joined by `x`)
//! * weight: `[1,0,-2]`
//! * marking: `xo` strings (`x` = crossed node) or 1-based sets `{1,3}`
//! * bundle pieces: `2*[1,0]+[-1,1]`
//!
//! Parse errors carry the byte offset and the offending token.

use crate::error::{Error, Result};
use crate::rootsys::{RootSystem, Series, SimpleType, Weight};

fn token_at(s: &str, pos: usize) -> String {
    let rest = &s[pos.min(s.len())..];
    let tok: String = rest
        .chars()
        .take_while(|c| !c.is_whitespace() && *c != ',' && *c != ']')
        .collect();
    if tok.is_empty() {
        rest.chars().next().map(String::from).unwrap_or_else(|| "<end>".into())
    } else {
        tok
    }
}

pub(crate) fn parse_system_at(s: &str, base: usize) -> Result<RootSystem> {
    let mut comps = Vec::new();
    for (offset, part) in split_with_offsets(s, 'x') {
        let pos = base + offset;
        let mut chars = part.chars();
        let Some(letter) = chars.next() else {
            return Err(Error::parse(pos, "<empty>", "expected a series letter A-G"));
        };
        let Some(series) = Series::from_letter(letter) else {
            return Err(Error::parse(pos, part, "expected a series letter A-G"));
        };
        let digits = &part[letter.len_utf8()..];
        let rank: usize = digits.parse().map_err(|_| {
            Error::parse(pos + 1, if digits.is_empty() { "<end>" } else { digits }, "expected a rank")
        })?;
        comps.push(SimpleType::new(series, rank)?);
    }
    RootSystem::from_components(comps)
}

fn split_with_offsets(s: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in s.char_indices() {
        if c == sep {
            out.push((start, &s[start..i]));
            start = i + c.len_utf8();
        }
    }
    out.push((start, &s[start..]));
    out
}

pub(crate) fn parse_weight_at(s: &str, base: usize) -> Result<Weight> {
    let trimmed_start = s.len() - s.trim_start().len();
    let body = s.trim();
    if !body.starts_with('[') {
        return Err(Error::parse(
            base + trimmed_start,
            token_at(s, trimmed_start),
            "weights are written as [a,b,...]",
        ));
    }
    if !body.ends_with(']') || body.len() < 2 {
        return Err(Error::parse(
            base + trimmed_start + body.len(),
            "<end>",
            "missing closing `]`",
        ));
    }
    let inner = &body[1..body.len() - 1];
    let inner_base = base + trimmed_start + 1;
    if inner.trim().is_empty() {
        return Err(Error::parse(inner_base, "]", "a weight needs at least one coordinate"));
    }
    let mut coords = Vec::new();
    for (offset, entry) in split_with_offsets(inner, ',') {
        let lead = entry.len() - entry.trim_start().len();
        let t = entry.trim();
        let v: i64 = t.parse().map_err(|_| {
            Error::parse(
                inner_base + offset + lead,
                if t.is_empty() { "<empty>" } else { t },
                "expected an integer coordinate",
            )
        })?;
        coords.push(v);
    }
    Ok(Weight::new(coords))
}

/// Parses a weight and checks it against the system rank.
pub fn parse_weight_for(system: &RootSystem, s: &str) -> Result<Weight> {
    let w = parse_weight_at(s, 0)?;
    if w.rank() != system.rank() {
        return Err(Error::parse(
            0,
            s,
            format!(
                "weight has {} coordinates but {} has rank {}",
                w.rank(),
                system.label(),
                system.rank()
            ),
        ));
    }
    Ok(w)
}

/// Parses a crossed-node marking: `xo...` or a 1-based set `{1,3}`.
pub fn parse_marking_mask(rank: usize, s: &str) -> Result<Vec<bool>> {
    let t = s.trim();
    if t.starts_with('{') {
        if !t.ends_with('}') {
            return Err(Error::parse(t.len(), "<end>", "missing closing `}`"));
        }
        let mut mask = vec![false; rank];
        let inner = &t[1..t.len() - 1];
        if inner.trim().is_empty() {
            return Ok(mask);
        }
        for (offset, entry) in split_with_offsets(inner, ',') {
            let e = entry.trim();
            let pos = 1 + offset + (entry.len() - entry.trim_start().len());
            let node: usize = e
                .parse()
                .map_err(|_| Error::parse(pos, e, "expected a node number"))?;
            if node == 0 || node > rank {
                return Err(Error::parse(pos, e, format!("node must lie in 1..={rank}")));
            }
            mask[node - 1] = true;
        }
        Ok(mask)
    } else {
        if t.chars().count() != rank {
            return Err(Error::parse(
                0,
                t,
                format!("marking string must have exactly {rank} characters"),
            ));
        }
        t.char_indices()
            .map(|(i, c)| match c {
                'x' | 'X' => Ok(true),
                'o' | 'O' => Ok(false),
                _ => Err(Error::parse(i, c.to_string(), "marking characters are `x` or `o`")),
            })
            .collect()
    }
}

/// Prints a marking mask as an `xo` string.
pub fn format_marking_mask(mask: &[bool]) -> String {
    mask.iter().map(|&c| if c { 'x' } else { 'o' }).collect()
}

/// Parses `2*[1,0]+[-1,1]` into weighted pieces.
pub fn parse_pieces(system: &RootSystem, s: &str) -> Result<Vec<(Weight, u64)>> {
    let mut out = Vec::new();
    for (offset, part) in split_top_level_plus(s) {
        let lead = part.len() - part.trim_start().len();
        let p = part.trim();
        let pos = offset + lead;
        if p.is_empty() {
            return Err(Error::parse(pos, "+", "empty bundle piece"));
        }
        let (mult, wtext, wpos) = match p.find('*') {
            Some(star) => {
                let m = p[..star].trim();
                let mult: u64 = m
                    .parse()
                    .map_err(|_| Error::parse(pos, m, "expected a positive multiplicity"))?;
                if mult == 0 {
                    return Err(Error::parse(pos, m, "multiplicity must be positive"));
                }
                (mult, &p[star + 1..], pos + star + 1)
            }
            None => (1, p, pos),
        };
        let w = parse_weight_at(wtext, wpos)?;
        if w.rank() != system.rank() {
            return Err(Error::parse(
                wpos,
                wtext.trim(),
                format!("weight must have {} coordinates", system.rank()),
            ));
        }
        out.push((w, mult));
    }
    Ok(out)
}

fn split_top_level_plus(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            '+' if depth == 0 => {
                out.push((start, &s[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &s[start..]));
    out
}
