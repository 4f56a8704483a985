//! Text formats: instance files, solution files and result CSVs.
//!
//! Instance files are TSPLIB-flavoured with 1-based vertex ids:
//!
//! ```text
//! NAME: 4rand12-2x2
//! TYPE: CLUSTP
//! DIMENSION: 12
//! CLUSTERS: 4
//! SOURCE_VERTEX: 3
//! EDGE_WEIGHT_TYPE: EUC_2D
//! NODE_COORD_SECTION
//! 1 12.5 40
//! ...
//! CLUSTER_SECTION
//! 1 1 5 9 -1
//! ...
//! EOF
//! ```
//!
//! `EXPLICIT` instances replace the coordinate section with
//! `EDGE_WEIGHT_SECTION`: the strict upper triangle, one row per vertex
//! `1..n-1`, `INF` for a missing edge. The reader is token based, so row
//! layout is not significant.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bench::TrialReport;
use crate::instance::{ClusteredInstance, EdgeRef, InstanceError, Point, WeightKind, WeightMatrix};
use crate::objective::SolutionTree;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing section or keyword {0}")]
    MissingSection(&'static str),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

/// Shortest representation that parses back to the same `f64`.
fn fmt_num(x: f64) -> String {
    if x.is_infinite() && x > 0.0 {
        "INF".to_string()
    } else {
        format!("{x}")
    }
}

fn parse_num(tok: &str, line: usize) -> Result<f64, ParseError> {
    match tok {
        "INF" | "inf" | "Infinity" => Ok(f64::INFINITY),
        _ => tok
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| syntax(line, format!("invalid number {tok:?}"))),
    }
}

fn parse_id(tok: &str, n: usize, line: usize) -> Result<usize, ParseError> {
    let id: usize = tok.parse().map_err(|_| syntax(line, format!("invalid vertex id {tok:?}")))?;
    if id == 0 || id > n {
        return Err(syntax(line, format!("vertex id {id} outside 1..={n}")));
    }
    Ok(id - 1)
}

pub fn write_instance(inst: &ClusteredInstance) -> String {
    let n = inst.num_vertices();
    let mut out = String::new();
    writeln!(out, "NAME: {}", inst.name()).unwrap();
    writeln!(out, "TYPE: CLUSTP").unwrap();
    writeln!(out, "DIMENSION: {n}").unwrap();
    writeln!(out, "CLUSTERS: {}", inst.num_clusters()).unwrap();
    writeln!(out, "SOURCE_VERTEX: {}", inst.source() + 1).unwrap();
    match inst.weight_kind() {
        WeightKind::Euclidean2D => {
            writeln!(out, "EDGE_WEIGHT_TYPE: EUC_2D").unwrap();
            writeln!(out, "NODE_COORD_SECTION").unwrap();
            for (i, p) in inst.coords().unwrap().iter().enumerate() {
                writeln!(out, "{} {} {}", i + 1, fmt_num(p.x), fmt_num(p.y)).unwrap();
            }
        }
        WeightKind::Explicit => {
            writeln!(out, "EDGE_WEIGHT_TYPE: EXPLICIT").unwrap();
            writeln!(out, "EDGE_WEIGHT_SECTION").unwrap();
            let m = inst.explicit_weights().unwrap();
            for u in 0..n.saturating_sub(1) {
                let row: Vec<String> = ((u + 1)..n).map(|v| fmt_num(m.get(u, v))).collect();
                writeln!(out, "{}", row.join(" ")).unwrap();
            }
        }
    }
    writeln!(out, "CLUSTER_SECTION").unwrap();
    for (i, members) in inst.clusters().iter().enumerate() {
        write!(out, "{}", i + 1).unwrap();
        for v in members {
            write!(out, " {}", v + 1).unwrap();
        }
        writeln!(out, " -1").unwrap();
    }
    writeln!(out, "EOF").unwrap();
    out
}

/// Tokens of non-empty lines with their 1-based line numbers.
fn lines(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, t)| !t.is_empty())
        .collect()
}

/// Splits `KEY: value` / `KEY : value` / `KEY value`.
fn keyword(line: &str) -> Option<(&str, &str)> {
    let line = line.trim();
    if let Some((k, v)) = line.split_once(':') {
        return Some((k.trim(), v.trim()));
    }
    line.split_once(char::is_whitespace).map(|(k, v)| (k.trim(), v.trim()))
}

pub fn parse_instance(text: &str) -> Result<ClusteredInstance, ParseError> {
    let mut name = None;
    let mut dimension = None;
    let mut clusters_declared = None;
    let mut source = None;
    let mut kind = None;
    let mut coords: Option<Vec<Point>> = None;
    let mut upper: Option<Vec<f64>> = None;
    let mut clusters: Option<Vec<Vec<usize>>> = None;
    let mut saw_eof = false;

    let raw: Vec<&str> = text.lines().collect();
    let body = lines(text);
    let mut idx = 0;
    while idx < body.len() {
        let (line, ref toks) = body[idx];
        let head = toks[0];
        idx += 1;
        match head {
            "NODE_COORD_SECTION" => {
                let n = dimension.ok_or(ParseError::MissingSection("DIMENSION"))?;
                let mut pts = vec![None; n];
                for _ in 0..n {
                    let (line, ref t) = *body.get(idx).ok_or_else(|| syntax(line, "truncated NODE_COORD_SECTION"))?;
                    idx += 1;
                    if t.len() != 3 {
                        return Err(syntax(line, "expected `<id> <x> <y>`"));
                    }
                    let id = parse_id(t[0], n, line)?;
                    let x = parse_num(t[1], line)?;
                    let y = parse_num(t[2], line)?;
                    if !x.is_finite() || !y.is_finite() {
                        return Err(syntax(line, "coordinates must be finite"));
                    }
                    if pts[id].replace(Point::new(x, y)).is_some() {
                        return Err(syntax(line, format!("duplicate coordinates for vertex {}", id + 1)));
                    }
                }
                coords = Some(pts.into_iter().map(|p| p.expect("n distinct ids fill n slots")).collect());
            }
            "EDGE_WEIGHT_SECTION" => {
                let n = dimension.ok_or(ParseError::MissingSection("DIMENSION"))?;
                let expected = n * n.saturating_sub(1) / 2;
                let mut values = Vec::with_capacity(expected);
                while values.len() < expected {
                    let (line, ref t) = *body.get(idx).ok_or_else(|| syntax(line, "truncated EDGE_WEIGHT_SECTION"))?;
                    idx += 1;
                    for tok in t {
                        if values.len() == expected {
                            return Err(syntax(line, "too many weights"));
                        }
                        values.push(parse_num(tok, line)?);
                    }
                }
                upper = Some(values);
            }
            "CLUSTER_SECTION" => {
                let n = dimension.ok_or(ParseError::MissingSection("DIMENSION"))?;
                let k = clusters_declared.ok_or(ParseError::MissingSection("CLUSTERS"))?;
                let mut out = vec![None; k];
                for _ in 0..k {
                    let (line, ref t) = *body.get(idx).ok_or_else(|| syntax(line, "truncated CLUSTER_SECTION"))?;
                    idx += 1;
                    if t.last() != Some(&"-1") {
                        return Err(syntax(line, "cluster line must end with -1"));
                    }
                    let cid: usize = t[0].parse().map_err(|_| syntax(line, "invalid cluster id"))?;
                    if cid == 0 || cid > k {
                        return Err(syntax(line, format!("cluster id {cid} outside 1..={k}")));
                    }
                    let members = t[1..t.len() - 1]
                        .iter()
                        .map(|tok| parse_id(tok, n, line))
                        .collect::<Result<Vec<_>, _>>()?;
                    if out[cid - 1].replace(members).is_some() {
                        return Err(syntax(line, format!("cluster {cid} listed twice")));
                    }
                }
                clusters = Some(out.into_iter().map(|c| c.expect("k distinct ids fill k slots")).collect());
            }
            "EOF" => {
                saw_eof = true;
                break;
            }
            _ => {
                let (key, value) = keyword(raw[line - 1]).ok_or_else(|| syntax(line, "expected `KEY: value`"))?;
                let as_usize = |v: &str| v.parse::<usize>().map_err(|_| syntax(line, format!("invalid {key} value {v:?}")));
                match key {
                    "NAME" => name = Some(value.to_string()),
                    "TYPE" => {
                        if value != "CLUSTP" {
                            return Err(syntax(line, format!("unsupported TYPE {value:?}")));
                        }
                    }
                    "COMMENT" => {}
                    "DIMENSION" => dimension = Some(as_usize(value)?),
                    "CLUSTERS" => clusters_declared = Some(as_usize(value)?),
                    "SOURCE_VERTEX" => source = Some((value.to_string(), line)),
                    "EDGE_WEIGHT_TYPE" => {
                        kind = Some(match value {
                            "EUC_2D" => WeightKind::Euclidean2D,
                            "EXPLICIT" => WeightKind::Explicit,
                            other => return Err(syntax(line, format!("unsupported EDGE_WEIGHT_TYPE {other:?}"))),
                        })
                    }
                    _ => return Err(syntax(line, format!("unknown keyword {key:?}"))),
                }
            }
        }
    }

    let name = name.ok_or(ParseError::MissingSection("NAME"))?;
    let n = dimension.ok_or(ParseError::MissingSection("DIMENSION"))?;
    let (source, source_line) = source.ok_or(ParseError::MissingSection("SOURCE_VERTEX"))?;
    let source = parse_id(&source, n, source_line)?;
    let kind = kind.ok_or(ParseError::MissingSection("EDGE_WEIGHT_TYPE"))?;
    let clusters = clusters.ok_or(ParseError::MissingSection("CLUSTER_SECTION"))?;
    if !saw_eof {
        return Err(ParseError::MissingSection("EOF"));
    }
    match kind {
        WeightKind::Euclidean2D => {
            let coords = coords.ok_or(ParseError::MissingSection("NODE_COORD_SECTION"))?;
            Ok(ClusteredInstance::euclidean(name, coords, clusters, source)?)
        }
        WeightKind::Explicit => {
            let upper = upper.ok_or(ParseError::MissingSection("EDGE_WEIGHT_SECTION"))?;
            let m = WeightMatrix::from_upper_triangle(n, &upper)?;
            Ok(ClusteredInstance::explicit(name, m, clusters, source)?)
        }
    }
}

/// Solution file: header, `EDGE_SECTION` with one 1-based edge per line, `EOF`.
pub fn write_solution(inst: &ClusteredInstance, tree: &SolutionTree, cost: f64) -> String {
    let mut out = String::new();
    writeln!(out, "NAME: {}", inst.name()).unwrap();
    writeln!(out, "TYPE: CLUSTP_SOLUTION").unwrap();
    writeln!(out, "DIMENSION: {}", inst.num_vertices()).unwrap();
    writeln!(out, "COST: {}", fmt_num(cost)).unwrap();
    writeln!(out, "EDGE_SECTION").unwrap();
    for e in tree.edges() {
        writeln!(out, "{} {}", e.u + 1, e.v + 1).unwrap();
    }
    writeln!(out, "EOF").unwrap();
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSolution {
    pub name: String,
    pub dimension: usize,
    pub cost: Option<f64>,
    pub tree: SolutionTree,
}

pub fn parse_solution(text: &str) -> Result<ParsedSolution, ParseError> {
    let mut name = None;
    let mut dimension = None;
    let mut cost = None;
    let mut edges = None;
    let mut saw_eof = false;
    let raw: Vec<&str> = text.lines().collect();
    let body = lines(text);
    let mut idx = 0;
    while idx < body.len() {
        let (line, ref toks) = body[idx];
        idx += 1;
        match toks[0] {
            "EDGE_SECTION" => {
                let n = dimension.ok_or(ParseError::MissingSection("DIMENSION"))?;
                let mut list = Vec::new();
                while let Some((line, t)) = body.get(idx) {
                    if t[0] == "EOF" {
                        break;
                    }
                    idx += 1;
                    if t.len() != 2 {
                        return Err(syntax(*line, "expected `<u> <v>`"));
                    }
                    list.push(EdgeRef::new(parse_id(t[0], n, *line)?, parse_id(t[1], n, *line)?));
                }
                edges = Some(list);
            }
            "EOF" => {
                saw_eof = true;
                break;
            }
            _ => {
                let (key, value) = keyword(raw[line - 1]).ok_or_else(|| syntax(line, "expected `KEY: value`"))?;
                match key {
                    "NAME" => name = Some(value.to_string()),
                    "TYPE" => {
                        if value != "CLUSTP_SOLUTION" {
                            return Err(syntax(line, format!("unsupported TYPE {value:?}")));
                        }
                    }
                    "DIMENSION" => {
                        dimension = Some(value.parse().map_err(|_| syntax(line, "invalid DIMENSION"))?)
                    }
                    "COST" => cost = Some(parse_num(value, line)?),
                    _ => return Err(syntax(line, format!("unknown keyword {key:?}"))),
                }
            }
        }
    }
    if !saw_eof {
        return Err(ParseError::MissingSection("EOF"));
    }
    Ok(ParsedSolution {
        name: name.ok_or(ParseError::MissingSection("NAME"))?,
        dimension: dimension.ok_or(ParseError::MissingSection("DIMENSION"))?,
        cost,
        tree: SolutionTree::new(edges.ok_or(ParseError::MissingSection("EDGE_SECTION"))?),
    })
}

/// One line of the results CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance: String,
    pub gamma: f64,
    pub runs: usize,
    pub best_found: f64,
    pub average: f64,
    pub seconds_per_run: f64,
    pub master_seed: u64,
}

/// One line of a published-baseline CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub instance: String,
    pub algorithm: String,
    pub best_found: f64,
    pub average: f64,
}

pub const RESULTS_HEADER: [&str; 7] =
    ["instance", "gamma", "runs", "best_found", "average", "seconds_per_run", "master_seed"];

/// Results CSV; costs with 6 decimals, time with 2.
pub fn write_results_csv(reports: &[TrialReport]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(RESULTS_HEADER).unwrap();
    for r in reports {
        w.write_record([
            r.instance.clone(),
            format!("{}", r.gamma),
            r.runs.to_string(),
            format!("{:.6}", r.best_found),
            format!("{:.6}", r.average),
            format!("{:.2}", r.seconds_per_run),
            r.master_seed.to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).expect("csv output is UTF-8")
}

fn read_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>, ParseError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    rdr.deserialize().map(|r| r.map_err(ParseError::from)).collect()
}

pub fn parse_results_csv(text: &str) -> Result<Vec<ResultRow>, ParseError> {
    read_csv(text)
}

pub fn parse_baselines_csv(text: &str) -> Result<Vec<BaselineRow>, ParseError> {
    read_csv(text)
}
