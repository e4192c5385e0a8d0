//! CPLEX LP text format.
//!
//! The writer emits `Minimize`, `Subject To`, `Binaries` and `End` sections.
//! All continuous variables use the format's default bounds `[0, +inf)`, so
//! no `Bounds` section is needed. Each constraint starts on a new line as
//! `name: terms sense rhs`; long rows continue on indented lines. Numbers
//! use the shortest decimal form that reads back to the same `f64`.

use std::fmt::Write as _;
use std::path::Path;

use super::model::{MilpModel, Sense};
use crate::error::{Error, Result};

const TERMS_PER_LINE: usize = 6;

fn write_terms(out: &mut String, terms: impl Iterator<Item = (String, f64)>) {
    for (j, (name, coef)) in terms.enumerate() {
        if j > 0 && j % TERMS_PER_LINE == 0 {
            out.push_str("\n  ");
        }
        let (sign, mag) = if coef < 0.0 { ("-", -coef) } else { ("+", coef) };
        if j == 0 {
            if sign == "-" {
                out.push_str("- ");
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        if mag == 1.0 {
            out.push_str(&name);
        } else {
            let _ = write!(out, "{mag} {name}");
        }
    }
}

/// Renders the model in LP format; identical models give identical bytes.
pub fn write_lp(model: &MilpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ edge-cloud traffic allocation, instance {}", model.instance_id);
    let _ = writeln!(
        out,
        "\\ {} variables ({} binary), {} constraints",
        model.variables.len(),
        model.n_binaries(),
        model.constraints.len()
    );
    out.push_str("Minimize\n obj: ");
    write_terms(&mut out, model.objective.iter().map(|&(v, c)| (model.variables[v].name.clone(), c)));
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}: ", c.name);
        write_terms(&mut out, c.terms.iter().map(|&(v, a)| (model.variables[v].name.clone(), a)));
        let _ = writeln!(out, " {} {}", c.sense.symbol(), c.rhs);
    }
    out.push_str("Binaries\n");
    for v in model.variables.iter().filter(|v| v.kind == super::model::VarKind::Binary) {
        let _ = writeln!(out, " {}", v.name);
    }
    out.push_str("End\n");
    out
}

pub fn write_lp_file(model: &MilpModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_lp(model)).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConstraint {
    pub name: String,
    pub terms: Vec<(String, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Structure recovered from an LP file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedLp {
    pub objective: Vec<(String, f64)>,
    pub constraints: Vec<ParsedConstraint>,
    pub binaries: Vec<String>,
}

#[derive(PartialEq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    End,
}

/// Linear terms of an expression and, for constraints, its sense and right-hand side.
type Expression = (Vec<(String, f64)>, Option<(Sense, f64)>);

fn parse_expression(text: &str, line: usize) -> Result<Expression> {
    let err = |m: String| Error::format(format!("LP line {line}"), m);
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    let mut tokens = text.split_whitespace();
    while let Some(tok) = tokens.next() {
        let sense = match tok {
            "<=" | "=<" | "<" => Some(Sense::Le),
            ">=" | "=>" | ">" => Some(Sense::Ge),
            "=" => Some(Sense::Eq),
            _ => None,
        };
        if let Some(sense) = sense {
            let rhs_tok = tokens.next().ok_or_else(|| err("missing right-hand side".into()))?;
            let rhs = rhs_tok.parse::<f64>().map_err(|_| err(format!("bad right-hand side {rhs_tok:?}")))?;
            if tokens.next().is_some() {
                return Err(err("trailing tokens after right-hand side".into()));
            }
            return Ok((terms, Some((sense, rhs))));
        }
        match tok {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            _ => {
                if let Ok(v) = tok.parse::<f64>() {
                    coef = Some(coef.unwrap_or(1.0) * v);
                } else {
                    terms.push((tok.to_string(), sign * coef.take().unwrap_or(1.0)));
                    sign = 1.0;
                }
            }
        }
    }
    Ok((terms, None))
}

/// Parses the LP subset produced by [`write_lp`].
pub fn parse_lp(text: &str) -> Result<ParsedLp> {
    let mut parsed = ParsedLp::default();
    let mut section = Section::Preamble;
    // Pending statement text and the line it started on.
    let mut pending: Option<(String, String, usize)> = None;
    let flush =
        |parsed: &mut ParsedLp, section: &Section, pending: &mut Option<(String, String, usize)>| -> Result<()> {
            if let Some((name, body, line)) = pending.take() {
                let (terms, rel) = parse_expression(&body, line)?;
                match section {
                    Section::Objective => parsed.objective = terms,
                    Section::Constraints => {
                        let (sense, rhs) =
                            rel.ok_or_else(|| Error::format(format!("LP line {line}"), "constraint without relation"))?;
                        parsed.constraints.push(ParsedConstraint { name, terms, sense, rhs });
                    }
                    _ => {}
                }
            }
            Ok(())
        };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        let next = match line.to_ascii_lowercase().as_str() {
            "minimize" | "minimum" | "min" => Some(Section::Objective),
            "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
            "bounds" => Some(Section::Bounds),
            "binaries" | "binary" | "bin" => Some(Section::Binaries),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(next) = next {
            flush(&mut parsed, &section, &mut pending)?;
            section = next;
            continue;
        }
        match section {
            Section::Objective | Section::Constraints => {
                if let Some((name, body)) = line.split_once(':') {
                    flush(&mut parsed, &section, &mut pending)?;
                    pending = Some((name.trim().to_string(), body.to_string(), lineno + 1));
                } else if let Some((_, body, _)) = pending.as_mut() {
                    body.push(' ');
                    body.push_str(line);
                } else {
                    pending = Some((String::new(), line.to_string(), lineno + 1));
                }
            }
            Section::Binaries => parsed.binaries.extend(line.split_whitespace().map(str::to_string)),
            Section::Bounds => {}
            Section::Preamble | Section::End => {
                return Err(Error::format(format!("LP line {}", lineno + 1), "content outside any section"));
            }
        }
    }
    flush(&mut parsed, &section, &mut pending)?;
    if section != Section::End {
        return Err(Error::format("LP file", "missing End section"));
    }
    Ok(parsed)
}
