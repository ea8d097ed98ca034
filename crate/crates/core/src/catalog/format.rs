//! Text format for metrics:
//!
//! ```text
//! # comment
//! dim 2 coords r theta signature riemannian
//! param m=1
//! box r 3 10
//! 0 0 := 1 - 2*m/r
//! 1 1 := r^2
//! ```
//!
//! Components are given on or below the diagonal (`i >= j`); omitted ones are
//! zero. Lorentzian metrics use `signature lorentzian time=<index>`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Chart, MetricSpec, Signature};
use crate::symexpr::{parse, Expr};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Format {
        line,
        msg: msg.into(),
    }
}

struct Header {
    coords: Vec<String>,
    signature: Signature,
}

fn parse_header(words: &[&str], line: usize) -> Result<Header> {
    let mut it = words.iter().copied();
    let n: usize = match (it.next(), it.next()) {
        (Some("dim"), Some(n)) => n.parse().map_err(|_| err(line, "dimension is not an integer"))?,
        _ => return Err(err(line, "header must start with `dim <n>`")),
    };
    if it.next() != Some("coords") {
        return Err(err(line, "expected `coords` after the dimension"));
    }
    let coords: Vec<String> = it.by_ref().take(n).map(str::to_string).collect();
    if coords.len() != n {
        return Err(err(line, format!("expected {} coordinate names", n)));
    }
    if it.next() != Some("signature") {
        return Err(err(line, "expected `signature` after the coordinates"));
    }
    let signature = match (it.next(), it.next()) {
        (Some("riemannian"), None) => Signature::Riemannian,
        (Some("lorentzian"), Some(t)) => {
            let idx = t
                .strip_prefix("time=")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err(line, "expected `time=<index>`"))?;
            if it.next().is_some() {
                return Err(err(line, "trailing words after the time index"));
            }
            Signature::Lorentzian { time: idx }
        }
        _ => return Err(err(line, "signature must be `riemannian` or `lorentzian time=<i>`")),
    };
    Ok(Header { coords, signature })
}

/// Parses the text format.
pub fn parse_metric(text: &str) -> Result<MetricSpec> {
    let mut header: Option<(Header, usize)> = None;
    let mut params: Vec<(String, f64)> = Vec::new();
    let mut boxes: Vec<(String, f64, f64, usize)> = Vec::new();
    let mut entries: Vec<(usize, usize, Expr, usize)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some((lhs, rhs)) = content.split_once(":=") {
            let idx: Vec<&str> = lhs.split_whitespace().collect();
            let (i, j) = match idx.as_slice() {
                [i, j] => (
                    i.parse::<usize>().map_err(|_| err(line, "bad row index"))?,
                    j.parse::<usize>().map_err(|_| err(line, "bad column index"))?,
                ),
                _ => return Err(err(line, "component lines look like `i j := <expr>`")),
            };
            if i < j {
                return Err(err(line, "components must be on or below the diagonal (i >= j)"));
            }
            let e = parse(rhs.trim()).map_err(|e| err(line, e.to_string()))?;
            entries.push((i, j, e, line));
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        match words[0] {
            "dim" => {
                if header.is_some() {
                    return Err(err(line, "duplicate header"));
                }
                header = Some((parse_header(&words, line)?, line));
            }
            "param" => {
                let spec = words[1..].join("");
                let (name, val) = spec
                    .split_once('=')
                    .ok_or_else(|| err(line, "expected `param name=value`"))?;
                let v: f64 = val.parse().map_err(|_| err(line, "parameter value is not a number"))?;
                params.push((name.to_string(), v));
            }
            "box" => {
                if words.len() != 4 {
                    return Err(err(line, "expected `box <coord> <lo> <hi>`"));
                }
                let lo: f64 = words[2].parse().map_err(|_| err(line, "bad lower bound"))?;
                let hi: f64 = words[3].parse().map_err(|_| err(line, "bad upper bound"))?;
                boxes.push((words[1].to_string(), lo, hi, line));
            }
            w => return Err(err(line, format!("unrecognised directive `{}`", w))),
        }
    }
    let (header, hline) = header.ok_or_else(|| err(0, "missing `dim` header"))?;
    let names: Vec<&str> = header.coords.iter().map(String::as_str).collect();
    let mut chart = Chart::new(&names).map_err(|e| err(hline, e.to_string()))?;
    for (name, v) in &params {
        chart = chart.with_param(name, *v).map_err(|e| err(hline, e.to_string()))?;
    }
    for (c, lo, hi, line) in &boxes {
        chart = chart.with_box(c, *lo, *hi).map_err(|e| err(*line, e.to_string()))?;
    }
    let known: Vec<String> = chart.input_names();
    let n = chart.dim();
    let mut lower = Vec::new();
    for (i, j, e, line) in entries {
        if i >= n {
            return Err(err(line, format!("index {} out of range for dimension {}", i, n)));
        }
        if let Some(s) = e.symbols().into_iter().find(|s| !known.contains(s)) {
            return Err(err(line, format!("undeclared symbol `{}`", s)));
        }
        if lower.iter().any(|(a, b, _)| (*a, *b) == (i, j)) {
            return Err(err(line, format!("component ({}, {}) given twice", i, j)));
        }
        lower.push((i, j, e));
    }
    MetricSpec::from_lower(chart, &lower, header.signature)
}

/// Canonical text for `m`: header, parameters, boxes, then nonzero lower
/// components row by row.
pub fn write_metric(m: &MetricSpec) -> String {
    let chart = m.chart();
    let mut out = String::new();
    let _ = write!(out, "dim {} coords {} signature ", m.dim(), chart.coords().join(" "));
    match m.signature() {
        Signature::Riemannian => out.push_str("riemannian\n"),
        Signature::Lorentzian { time } => {
            let _ = writeln!(out, "lorentzian time={}", time);
        }
    }
    for (name, v) in chart.params() {
        let _ = writeln!(out, "param {}={}", name, v);
    }
    for (c, (lo, hi)) in chart.coords().iter().zip(chart.boxes()) {
        let _ = writeln!(out, "box {} {} {}", c, lo, hi);
    }
    for i in 0..m.dim() {
        for j in 0..=i {
            let e = m.get(i, j);
            if !e.is_zero_literal() {
                let _ = writeln!(out, "{} {} := {}", i, j, e);
            }
        }
    }
    out
}

pub fn load_metric(path: &Path) -> Result<MetricSpec> {
    parse_metric(&std::fs::read_to_string(path)?)
}

pub fn save_metric(m: &MetricSpec, path: &Path) -> Result<()> {
    std::fs::write(path, write_metric(m))?;
    Ok(())
}
