//! Text format for mechanism descriptions.
//!
//! ```text
//! # comment
//! mechanism tricept
//! leg 1:
//!   8 2 0
//!   2 8 0
//!   0 0 9
//! leg 2: R _|_ R _|_ P
//! relations:
//!   1 3 _|_
//! platform moving:
//!   9 0
//!   0 9
//! platform fixed:
//!   8 0
//!   0 8
//! ```
//!
//! A leg is either a joint string or an integer matrix on the following
//! lines. Joint strings use `||` parallel, `_|_` perpendicular, `/` coaxial,
//! `*` common point, `#` coplanar and `-` arbitrary between adjacent joints;
//! other pairs come from an optional `relations:` block and are otherwise
//! arbitrary. Platform blocks may be omitted, in which case every relation is
//! arbitrary.

use std::fmt;

use thiserror::Error;

use crate::topology::{
    decode_labeled_leg, validate_mechanism, JointKind, LegTopology, MechanismTopology,
    PlatformRelations, PlatformSide, RelationCode, RelationMatrix, Violation, MAX_SIDE,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone)]
pub struct ParsedFile {
    pub mechanism: MechanismTopology,
    pub warnings: Vec<Warning>,
}

#[derive(Clone, Copy)]
struct Word<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    /// Column of the first non-blank character.
    indent: usize,
    text: &'a str,
}

impl<'a> Line<'a> {
    fn words(&self) -> Vec<Word<'a>> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, c) in self.text.char_indices() {
            match (c.is_whitespace(), start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    out.push(Word {
                        text: &self.text[s..i],
                        column: self.indent + self.text[..s].chars().count(),
                    });
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push(Word {
                text: &self.text[s..],
                column: self.indent + self.text[..s].chars().count(),
            });
        }
        out
    }

    fn err(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.number,
            column,
            message: message.into(),
        }
    }

    fn is_matrix_row(&self) -> bool {
        self.text.chars().next().is_some_and(|c| c.is_ascii_digit())
    }
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let trimmed = raw.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                return None;
            }
            Some(Line {
                number: i + 1,
                indent: raw.chars().count() - trimmed.chars().count() + 1,
                text: trimmed.trim_end(),
            })
        })
        .collect()
}

fn read_matrix(rows: &[Line<'_>]) -> Result<Vec<Vec<u8>>, ParseError> {
    let mut out = Vec::new();
    for line in rows {
        let mut row = Vec::new();
        for w in line.words() {
            let v: u8 = w
                .text
                .parse()
                .map_err(|_| line.err(w.column, format!("expected an integer, found '{}'", w.text)))?;
            row.push(v);
        }
        out.push(row);
    }
    Ok(out)
}

/// A parsed joint string: joints plus adjacent relations.
fn read_chain(line: &Line<'_>, src: &str, column: usize) -> Result<(Vec<JointKind>, Vec<RelationCode>), ParseError> {
    let mut joints = Vec::new();
    let mut rels = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut expect_joint = true;
    while i < bytes.len() {
        let c = bytes[i];
        let col = column + i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if expect_joint {
            let kind = match c {
                'R' => JointKind::Revolute,
                'P' => JointKind::Prismatic,
                _ => return Err(line.err(col, format!("expected joint 'R' or 'P', found '{c}'"))),
            };
            joints.push(kind);
            i += 1;
        } else {
            let rest: String = bytes[i..].iter().collect();
            let token = ["_|_", "||", "/", "*", "#", "-"]
                .into_iter()
                .find(|t| rest.starts_with(t))
                .ok_or_else(|| line.err(col, format!("expected a relation token, found '{c}'")))?;
            rels.push(RelationCode::from_token(token).expect("known token"));
            i += token.len();
        }
        expect_joint = !expect_joint;
    }
    if expect_joint {
        return Err(line.err(column + bytes.len(), "expected joint 'R' or 'P' at end of joint string"));
    }
    if joints.len() > MAX_SIDE {
        return Err(line.err(column, format!("a leg has at most {MAX_SIDE} joints, found {}", joints.len())));
    }
    Ok((joints, rels))
}

fn read_code(w: Word<'_>, line: &Line<'_>) -> Result<RelationCode, ParseError> {
    RelationCode::from_token(w.text)
        .or_else(|| w.text.parse::<u8>().ok().and_then(RelationCode::from_code))
        .ok_or_else(|| line.err(w.column, format!("unknown relation '{}'", w.text)))
}

struct LegBlock {
    line: usize,
    leg: LegTopology,
}

struct PlatformBlock {
    line: usize,
    matrix: PlatformRelations,
}

pub fn parse_file(text: &str) -> Result<ParsedFile, ParseError> {
    let lines = lines(text);
    let mut warnings = Vec::new();
    let mut pos = 0;

    let first = lines.first().ok_or(ParseError {
        line: 1,
        column: 1,
        message: "expected 'mechanism'".into(),
    })?;
    let words = first.words();
    if words[0].text != "mechanism" {
        return Err(first.err(words[0].column, "expected 'mechanism'"));
    }
    if words.len() < 2 {
        return Err(first.err(first.indent + first.text.len(), "expected a mechanism name"));
    }
    let name = first.text[words[1].column - first.indent..].trim().to_string();
    pos += 1;

    let mut legs: Vec<LegBlock> = Vec::new();
    let mut moving: Option<PlatformBlock> = None;
    let mut fixed: Option<PlatformBlock> = None;

    while pos < lines.len() {
        let line = &lines[pos];
        let words = line.words();
        let head = words[0];
        pos += 1;
        let block_end = |from: usize| {
            let mut end = from;
            while end < lines.len() && lines[end].is_matrix_row() {
                end += 1;
            }
            end
        };
        match head.text {
            "leg" => {
                let label_word = words
                    .get(1)
                    .ok_or_else(|| line.err(line.indent + line.text.len(), "expected a leg number"))?;
                let label_text = label_word.text.trim_end_matches(':');
                let label: u8 = label_text
                    .parse()
                    .ok()
                    .filter(|l| (1..=MAX_SIDE as u8).contains(l))
                    .ok_or_else(|| line.err(label_word.column, format!("invalid leg number '{label_text}'")))?;
                let colon = line
                    .text
                    .find(':')
                    .ok_or_else(|| line.err(line.indent + line.text.len(), "expected ':' after leg number"))?;
                let chain = line.text[colon + 1..].trim();
                let leg = if chain.is_empty() {
                    let end = block_end(pos);
                    if end == pos {
                        return Err(line.err(line.indent + colon + 1, "expected a joint string or matrix rows"));
                    }
                    let m = read_matrix(&lines[pos..end])?;
                    pos = end;
                    decode_labeled_leg(label, &m).map_err(|e| line.err(head.column, format!("leg {label}: {e}")))?
                } else {
                    let chain_col = line.indent + colon + 1 + (line.text[colon + 1..].len() - line.text[colon + 1..].trim_start().len());
                    let (joints, rels) = read_chain(line, chain, chain_col)?;
                    let mut matrix = RelationMatrix::new(joints.len());
                    for (i, r) in rels.iter().enumerate() {
                        matrix.set(i, i + 1, *r);
                    }
                    let mut given = vec![vec![false; joints.len()]; joints.len()];
                    if pos < lines.len() && lines[pos].text == "relations:" {
                        pos += 1;
                        while pos < lines.len() && lines[pos].is_matrix_row() {
                            let rl = &lines[pos];
                            let w = rl.words();
                            if w.len() != 3 {
                                return Err(rl.err(rl.indent, "expected 'i j relation'"));
                            }
                            let idx = |x: Word<'_>| -> Result<usize, ParseError> {
                                x.text
                                    .parse::<usize>()
                                    .ok()
                                    .filter(|v| (1..=joints.len()).contains(v))
                                    .ok_or_else(|| rl.err(x.column, format!("joint index '{}' out of range", x.text)))
                            };
                            let (i, j) = (idx(w[0])?, idx(w[1])?);
                            if i == j {
                                return Err(rl.err(w[1].column, "a joint has no relation to itself"));
                            }
                            matrix.set(i - 1, j - 1, read_code(w[2], rl)?);
                            given[i - 1][j - 1] = true;
                            given[j - 1][i - 1] = true;
                            pos += 1;
                        }
                    }
                    for i in 0..joints.len() {
                        for j in (i + 2)..joints.len() {
                            if !given[i][j] {
                                warnings.push(Warning {
                                    line: line.number,
                                    message: format!(
                                        "leg {label}: relation of joints {} and {} not given, taken as arbitrary",
                                        i + 1,
                                        j + 1
                                    ),
                                });
                            }
                        }
                    }
                    LegTopology::new(label, joints, matrix)
                };
                if legs.iter().any(|b| b.leg.label == label) {
                    return Err(line.err(label_word.column, format!("leg {label} defined twice")));
                }
                legs.push(LegBlock { line: line.number, leg });
            }
            "platform" => {
                let side = match words.get(1).map(|w| w.text) {
                    Some("moving:") => PlatformSide::Moving,
                    Some("fixed:") => PlatformSide::Fixed,
                    _ => {
                        let col = words.get(1).map_or(line.indent + line.text.len(), |w| w.column);
                        return Err(line.err(col, "expected 'moving:' or 'fixed:'"));
                    }
                };
                let end = block_end(pos);
                let m = read_matrix(&lines[pos..end])?;
                pos = end;
                let matrix = PlatformRelations::decode(side, &m)
                    .map_err(|e| line.err(head.column, format!("{side} platform: {e}")))?;
                let slot = match side {
                    PlatformSide::Moving => &mut moving,
                    PlatformSide::Fixed => &mut fixed,
                };
                if slot.is_some() {
                    return Err(line.err(head.column, format!("{side} platform defined twice")));
                }
                *slot = Some(PlatformBlock { line: line.number, matrix });
            }
            "relations:" => return Err(line.err(head.column, "'relations:' must follow a joint-string leg")),
            other => {
                return Err(line.err(
                    head.column,
                    format!("expected 'leg' or 'platform', found '{other}'"),
                ))
            }
        }
    }

    if legs.is_empty() {
        let last = lines.last().map_or(1, |l| l.number);
        return Err(ParseError {
            line: last,
            column: 1,
            message: "expected at least one 'leg'".into(),
        });
    }
    legs.sort_by_key(|b| b.leg.label);
    let leg_values: Vec<LegTopology> = legs.iter().map(|b| b.leg.clone()).collect();
    let mut mechanism = MechanismTopology::with_arbitrary_platforms(name, leg_values);
    for (block, side) in [(&moving, PlatformSide::Moving), (&fixed, PlatformSide::Fixed)] {
        match block {
            Some(b) => match side {
                PlatformSide::Moving => mechanism.moving = b.matrix.clone(),
                PlatformSide::Fixed => mechanism.fixed = b.matrix.clone(),
            },
            None => warnings.push(Warning {
                line: first.number,
                message: format!("no {side} platform block, relations taken as arbitrary"),
            }),
        }
    }

    if let Some(v) = validate_mechanism(&mechanism).into_iter().next() {
        let line = match &v {
            Violation::Leg { label, .. } | Violation::LegLabel { label, .. } => {
                legs.iter().find(|b| b.leg.label == *label).map_or(first.number, |b| b.line)
            }
            Violation::PlatformSize { side, .. } | Violation::PlatformDiagonal { side, .. } => {
                let b = if *side == PlatformSide::Moving { &moving } else { &fixed };
                b.as_ref().map_or(first.number, |b| b.line)
            }
            _ => first.number,
        };
        return Err(ParseError {
            line,
            column: 1,
            message: v.to_string(),
        });
    }
    Ok(ParsedFile { mechanism, warnings })
}

/// Render a mechanism in matrix form; `parse_file` reads it back unchanged.
pub fn to_text(mech: &MechanismTopology) -> String {
    let mut out = format!("mechanism {}\n", mech.name);
    let rows = |m: Vec<Vec<u8>>, out: &mut String| {
        for r in m {
            let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
            out.push_str("  ");
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
    };
    for leg in &mech.legs {
        out.push_str(&format!("leg {}:\n", leg.label));
        rows(crate::topology::encode_leg(leg), &mut out);
    }
    out.push_str("platform moving:\n");
    rows(mech.moving.encode(), &mut out);
    out.push_str("platform fixed:\n");
    rows(mech.fixed.encode(), &mut out);
    out
}
