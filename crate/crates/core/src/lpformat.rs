//! A small subset of the CPLEX LP text format.
//!
//! Written files have a placeholder objective, one constraint per `r{i}`
//! name, and an explicit bound line for every variable in declaration
//! order (so parsing restores the variable order exactly). Certificate
//! fields and an optional problem document travel in `\ fvx key: value`
//! comment lines. No ranges, no integrality sections.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{FvxError, Result};
use crate::geometry::Relation;
use crate::rational::{format_decimal, parse_decimal, Rational};
use crate::system::{Certificate, LinearSystem, Row, Variable};

const WRAP: usize = 100;

/// Parsed LP file: the system and the embedded problem document, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpFile {
    pub system: LinearSystem,
    pub problem: Option<String>,
}

fn term(first: bool, a: &BigInt, name: &str) -> String {
    let sign = match (first, a.is_negative()) {
        (true, false) => "",
        (true, true) => "-",
        (false, false) => "+ ",
        (false, true) => "- ",
    };
    let mag = a.abs();
    if mag.is_one() {
        format!("{sign}{name}")
    } else {
        format!("{sign}{mag} {name}")
    }
}

fn render_row(name: &str, row: &Row, vars: &[Variable]) -> String {
    let mut parts: Vec<String> = Vec::new();
    if row.terms.is_empty() {
        parts.push(format!("0 {}", vars.first().map_or("x1", |v| v.name.as_str())));
    }
    for (k, (v, a)) in row.terms.iter().enumerate() {
        parts.push(term(k == 0, a, &vars[*v].name));
    }
    parts.push(format!("{} {}", row.rel.symbol(), row.rhs));
    let mut out = format!(" {name}:");
    let mut width = out.len();
    for p in parts {
        if width + p.len() + 1 > WRAP {
            out.push_str("\n   ");
            width = 3;
        }
        out.push(' ');
        out.push_str(&p);
        width += p.len() + 1;
    }
    out
}

fn render_bound(v: &Variable) -> String {
    let name = &v.name;
    match (&v.lower, &v.upper) {
        (None, None) => format!(" {name} free"),
        (Some(l), None) => format!(" {name} >= {}", format_decimal(l)),
        (None, Some(u)) => format!(" -inf <= {name} <= {}", format_decimal(u)),
        (Some(l), Some(u)) if l == u => format!(" {name} = {}", format_decimal(l)),
        (Some(l), Some(u)) => format!(" {} <= {name} <= {}", format_decimal(l), format_decimal(u)),
    }
}

/// Renders `system`; `problem` is embedded as a single comment line.
pub fn write_lp(system: &LinearSystem, problem: Option<&str>) -> String {
    let m = &system.meta;
    let mut out = String::new();
    let _ = writeln!(out, "\\ fvx method: {}", m.method);
    let _ = writeln!(out, "\\ fvx original: {}", system.original);
    let _ = writeln!(out, "\\ fvx inequalities: {}", m.inequalities);
    let _ = writeln!(out, "\\ fvx bound: {}", m.bound);
    let _ = writeln!(out, "\\ fvx bound_formula: {}", m.bound_formula);
    let _ = writeln!(out, "\\ fvx blocks: {}", m.blocks);
    let _ = writeln!(out, "\\ fvx dropped_blocks: {}", m.dropped_blocks);
    if let Some(p) = problem {
        let _ = writeln!(out, "\\ fvx problem: {}", p.replace('\n', " "));
    }
    out.push_str("Minimize\n");
    let placeholder = system.variables.first().map_or("x1", |v| v.name.as_str());
    let _ = writeln!(out, " obj: 0 {placeholder}");
    out.push_str("Subject To\n");
    for (i, row) in system.rows.iter().enumerate() {
        out.push_str(&render_row(&format!("r{}", i + 1), row, &system.variables));
        out.push('\n');
    }
    out.push_str("Bounds\n");
    for v in &system.variables {
        out.push_str(&render_bound(v));
        out.push('\n');
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Head,
    Objective,
    Constraints,
    Bounds,
    End,
}

struct Parser {
    vars: Vec<Variable>,
    index: HashMap<String, usize>,
}

impl Parser {
    fn var(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.vars.push(Variable::bounded(name, Some(Rational::zero()), None));
        self.index.insert(name.to_string(), self.vars.len() - 1);
        self.vars.len() - 1
    }
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || "_.[]".contains(c))
}

fn parse_number(s: &str, line: usize) -> Result<Rational> {
    parse_decimal(s).map_err(|_| FvxError::LpParse {
        line,
        message: format!("expected a number, found {s:?}"),
    })
}

fn parse_relation(s: &str) -> Option<Relation> {
    match s {
        "<=" | "=<" | "<" => Some(Relation::Le),
        ">=" | "=>" | ">" => Some(Relation::Ge),
        "=" => Some(Relation::Eq),
        _ => None,
    }
}

/// Splits a linear expression into tokens, separating signs.
fn tokens(expr: &str) -> Vec<String> {
    let spaced = expr
        .replace("<=", " <= ")
        .replace(">=", " >= ")
        .replace("=<", " <= ")
        .replace("=>", " >= ");
    let mut out = Vec::new();
    for raw in spaced.split_whitespace() {
        if raw == "<=" || raw == ">=" {
            out.push(raw.to_string());
            continue;
        }
        let mut cur = String::new();
        for ch in raw.chars() {
            if ch == '=' {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push("=".into());
                continue;
            }
            if (ch == '+' || ch == '-') && !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        if !cur.is_empty() {
            out.push(cur);
        }
    }
    out
}

/// Parses `[coef] name` terms from `toks`; returns the terms.
fn parse_terms(p: &mut Parser, toks: &[String], line: usize) -> Result<Vec<(usize, Rational)>> {
    let mut terms = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        let mut sign = Rational::one();
        let mut tok = toks[i].as_str();
        if tok == "+" || tok == "-" {
            if tok == "-" {
                sign = -sign;
            }
            i += 1;
            tok = toks.get(i).map(String::as_str).ok_or(FvxError::LpParse {
                line,
                message: "dangling sign".into(),
            })?;
        } else if let Some(rest) = tok.strip_prefix('-') {
            sign = -sign;
            tok = rest;
        } else if let Some(rest) = tok.strip_prefix('+') {
            tok = rest;
        }
        let (coef, name) = if is_name(tok) {
            (Rational::one(), tok.to_string())
        } else {
            let c = parse_number(tok, line)?;
            i += 1;
            let name = toks.get(i).filter(|t| is_name(t)).ok_or(FvxError::LpParse {
                line,
                message: format!("expected a variable after {tok}"),
            })?;
            (c, name.clone())
        };
        terms.push((p.var(&name), sign * coef));
        i += 1;
    }
    Ok(terms)
}

fn integer_row(terms: Vec<(usize, Rational)>, rel: Relation, rhs: Rational) -> Row {
    if terms.iter().all(|(_, a)| a.is_integer()) && rhs.is_integer() {
        Row {
            terms: terms
                .into_iter()
                .filter(|(_, a)| !a.is_zero())
                .map(|(v, a)| (v, a.to_integer()))
                .collect(),
            rel,
            rhs: rhs.to_integer(),
        }
    } else {
        Row::from_rationals(terms, rel, rhs)
    }
}

fn parse_bound(p: &mut Parser, text: &str, line: usize) -> Result<()> {
    let err = |m: &str| FvxError::LpParse {
        line,
        message: format!("{m}: {text:?}"),
    };
    let toks: Vec<&str> = text.split_whitespace().collect();
    let num = |s: &str| -> Result<Option<Rational>> {
        match s.to_ascii_lowercase().as_str() {
            "-inf" | "-infinity" | "+inf" | "inf" | "infinity" => Ok(None),
            _ => parse_number(s, line).map(Some),
        }
    };
    match toks.as_slice() {
        [name, free] if free.eq_ignore_ascii_case("free") => {
            let v = p.var(name);
            p.vars[v].lower = None;
            p.vars[v].upper = None;
        }
        [lo, r1, name, r2, hi] if is_name(name) => {
            let (Some(Relation::Le), Some(Relation::Le)) = (parse_relation(r1), parse_relation(r2)) else {
                return Err(err("expected l <= x <= u"));
            };
            let v = p.var(name);
            p.vars[v].lower = num(lo)?;
            p.vars[v].upper = num(hi)?;
        }
        [name, rel, value] if is_name(name) => {
            let v = p.var(name);
            let value = num(value)?;
            match parse_relation(rel).ok_or_else(|| err("bad relation"))? {
                Relation::Le => p.vars[v].upper = value,
                Relation::Ge => p.vars[v].lower = value,
                Relation::Eq => {
                    p.vars[v].lower = value.clone();
                    p.vars[v].upper = value;
                }
            }
        }
        [value, rel, name] if is_name(name) => {
            let v = p.var(name);
            let value = num(value)?;
            match parse_relation(rel).ok_or_else(|| err("bad relation"))? {
                Relation::Le => p.vars[v].lower = value,
                Relation::Ge => p.vars[v].upper = value,
                Relation::Eq => {
                    p.vars[v].lower = value.clone();
                    p.vars[v].upper = value;
                }
            }
        }
        _ => return Err(err("unrecognised bound")),
    }
    Ok(())
}

/// Parses LP text produced by [`write_lp`] (or a compatible hand-written
/// file). Variables are ordered by first appearance in the Bounds section,
/// then by first appearance elsewhere.
pub fn parse_lp(text: &str) -> Result<LpFile> {
    let mut meta = Certificate::default();
    let mut original: Option<usize> = None;
    let mut problem = None;
    let mut section = Section::Head;
    let mut pending: Vec<(usize, String)> = Vec::new();
    let mut bounds: Vec<(usize, String)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if let Some(comment) = trimmed.strip_prefix('\\') {
            if let Some((key, value)) = comment.trim().strip_prefix("fvx ").and_then(|c| c.split_once(':')) {
                let value = value.trim();
                let count = || {
                    value.parse::<usize>().map_err(|_| FvxError::LpParse {
                        line,
                        message: format!("bad {key} value {value:?}"),
                    })
                };
                match key.trim() {
                    "method" => meta.method = value.to_string(),
                    "original" => original = Some(count()?),
                    "inequalities" => meta.inequalities = count()?,
                    "bound" => meta.bound = count()?,
                    "bound_formula" => meta.bound_formula = value.to_string(),
                    "blocks" => meta.blocks = count()?,
                    "dropped_blocks" => meta.dropped_blocks = count()?,
                    "problem" => problem = Some(value.to_string()),
                    _ => {}
                }
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        let lower = trimmed.to_ascii_lowercase();
        let next = match lower.as_str() {
            "minimize" | "minimum" | "min" | "maximize" | "maximum" | "max" => Some(Section::Objective),
            "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
            "bounds" | "bound" => Some(Section::Bounds),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(s) = next {
            section = s;
            continue;
        }
        match section {
            Section::Head => {
                return Err(FvxError::LpParse {
                    line,
                    message: "content before the objective section".into(),
                })
            }
            Section::Objective => {}
            Section::Constraints => {
                let continues = raw.starts_with(char::is_whitespace) && !trimmed.contains(':');
                match pending.last_mut() {
                    Some((_, text)) if continues => {
                        text.push(' ');
                        text.push_str(trimmed);
                    }
                    _ => pending.push((line, trimmed.to_string())),
                }
            }
            Section::Bounds => bounds.push((line, trimmed.to_string())),
            Section::End => {
                return Err(FvxError::LpParse {
                    line,
                    message: "content after End".into(),
                })
            }
        }
    }
    if section != Section::End {
        return Err(FvxError::LpParse {
            line: text.lines().count(),
            message: "missing End".into(),
        });
    }
    let mut p = Parser {
        vars: Vec::new(),
        index: HashMap::new(),
    };
    for (line, b) in &bounds {
        parse_bound(&mut p, b, *line)?;
    }
    let mut rows = Vec::with_capacity(pending.len());
    for (line, c) in &pending {
        let body = c.split_once(':').map_or(c.as_str(), |(_, b)| b);
        let toks = tokens(body);
        let at = toks
            .iter()
            .position(|t| parse_relation(t).is_some())
            .ok_or(FvxError::LpParse {
                line: *line,
                message: "constraint without a relation".into(),
            })?;
        let rel = parse_relation(&toks[at]).expect("checked");
        let rhs_text = toks[at + 1..].concat();
        let rhs = parse_number(&rhs_text, *line)?;
        let terms = parse_terms(&mut p, &toks[..at], *line)?;
        rows.push(integer_row(terms, rel, rhs));
    }
    let original = original.unwrap_or_else(|| {
        p.vars
            .iter()
            .enumerate()
            .take_while(|(j, v)| v.name == crate::system::original_name(*j))
            .count()
    });
    let system = LinearSystem {
        variables: p.vars,
        original,
        rows,
        meta,
    };
    system.validate().map_err(|e| FvxError::LpParse {
        line: 0,
        message: e.to_string(),
    })?;
    Ok(LpFile { system, problem })
}
