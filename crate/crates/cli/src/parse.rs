//! Instance grammar: degree specs, left sets and subgraph files.
//!
//! Vertex indices on the command line and in subgraph files are 1-based.

use bgraph::{Bipartition, DegreeSequence, InducedSubgraphSpec};

use crate::error::CliError;

/// Parses `spec := term (',' term)* ; term := INT | INT '^' INT`.
pub fn parse_degrees(spec: &str) -> Result<DegreeSequence, CliError> {
    let mut degrees = Vec::new();
    let mut column = 1;
    for raw in spec.split(',') {
        let term = raw.trim();
        let at = column + (raw.len() - raw.trim_start().len());
        let bad = |msg: String| CliError::Usage(format!("degree spec, column {at}: {msg}"));
        if term.is_empty() {
            return Err(bad("empty term".into()));
        }
        let (d, count) = match term.split_once('^') {
            Some((d, c)) => (d.trim(), c.trim()),
            None => (term, "1"),
        };
        if d.starts_with('-') {
            return Err(bad(format!("negative degree {d}")));
        }
        let d: u32 = d
            .parse()
            .map_err(|_| bad(format!("expected INT or INT^INT, found {term:?}")))?;
        let count: usize = count
            .parse()
            .map_err(|_| bad(format!("bad repeat count in {term:?}")))?;
        if count == 0 {
            return Err(bad(format!("repeat count in {term:?} must be positive")));
        }
        degrees.extend(std::iter::repeat_n(d, count));
        column += raw.len() + 1;
    }
    Ok(DegreeSequence::new(degrees))
}

/// Parses a comma list of 1-based vertex indices, or `none`.
pub fn parse_vertex_list(spec: &str, n: usize, what: &str) -> Result<Vec<usize>, CliError> {
    let spec = spec.trim();
    if spec.eq_ignore_ascii_case("none") || spec.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for term in spec.split(',') {
        let v =
            parse_vertex(term.trim(), n).map_err(|e| CliError::Usage(format!("{what}: {e}")))?;
        if out.contains(&v) {
            return Err(CliError::Usage(format!(
                "{what}: vertex {} listed twice",
                v + 1
            )));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn parse_left(spec: &str, n: usize) -> Result<Bipartition, CliError> {
    let left = parse_vertex_list(spec, n, "left set")?;
    Ok(Bipartition::new(n, left)?)
}

fn parse_vertex(token: &str, n: usize) -> Result<usize, String> {
    let v: usize = token
        .parse()
        .map_err(|_| format!("expected a vertex index, found {token:?}"))?;
    if v == 0 || v > n {
        return Err(format!("vertex {v} outside 1..={n}"));
    }
    Ok(v - 1)
}

/// Parses a subgraph file: a header `S: i1 i2 ... is`, then one `u v` edge
/// per line. Blank lines and `#` comments are ignored.
pub fn parse_subgraph(text: &str, n: usize) -> Result<InducedSubgraphSpec, CliError> {
    let mut subset: Option<Vec<usize>> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let bad = |msg: String| CliError::Usage(format!("subgraph file, line {lineno}: {msg}"));
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some(s) = &subset else {
            let rest = line
                .strip_prefix("S:")
                .ok_or_else(|| bad("expected the header `S: i1 ... is`".into()))?;
            let mut s = Vec::new();
            for tok in rest.split_whitespace() {
                let v = parse_vertex(tok, n).map_err(bad)?;
                if s.contains(&v) {
                    return Err(bad(format!("vertex {} listed twice in S", v + 1)));
                }
                s.push(v);
            }
            subset = Some(s);
            continue;
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [u, v] = toks[..] else {
            return Err(bad(format!("expected `u v`, found {line:?}")));
        };
        let (u, v) = (
            parse_vertex(u, n).map_err(bad)?,
            parse_vertex(v, n).map_err(bad)?,
        );
        if !s.contains(&u) || !s.contains(&v) {
            return Err(bad(format!(
                "edge {} {} has an endpoint outside S",
                u + 1,
                v + 1
            )));
        }
        if u == v {
            return Err(bad(format!("loop at vertex {}", u + 1)));
        }
        if edges
            .iter()
            .any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))
        {
            return Err(bad(format!("edge {} {} listed twice", u + 1, v + 1)));
        }
        edges.push((u, v));
    }
    let subset =
        subset.ok_or_else(|| CliError::Usage("subgraph file: missing `S:` header".into()))?;
    Ok(InducedSubgraphSpec::new(n, subset, edges)?)
}

/// Parses `INT`, `A..B` or `A..B:STEP` terms separated by commas.
pub fn parse_range_list(spec: &str, what: &str) -> Result<Vec<u64>, CliError> {
    let bad = |t: &str| CliError::Usage(format!("{what}: cannot parse {t:?}"));
    let mut out = Vec::new();
    for term in spec.split(',').map(str::trim) {
        let (range, step) = match term.split_once(':') {
            Some((r, s)) => (r, s.parse::<u64>().map_err(|_| bad(term))?),
            None => (term, 1),
        };
        if step == 0 {
            return Err(bad(term));
        }
        match range.split_once("..") {
            Some((a, b)) => {
                let a: u64 = a.parse().map_err(|_| bad(term))?;
                let b: u64 = b.parse().map_err(|_| bad(term))?;
                out.extend((a..=b).step_by(step as usize));
            }
            None => out.push(range.parse().map_err(|_| bad(term))?),
        }
    }
    Ok(out)
}
