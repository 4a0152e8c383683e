// SPDX-License-Identifier: Apache-2.0

//! Edge-list text format: a header line `n m`, then `m` lines `u v` with
//! `0 <= u < v < n`, ASCII decimal, each terminated by `\n`.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use super::Graph;
use crate::error::{Error, Result};

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_ascii_whitespace();
    let mut next = |what: &str| -> Result<usize> {
        let tok = it.next().ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("missing {what}"),
        })?;
        tok.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("invalid {what} `{tok}`"),
        })
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if it.next().is_some() {
        return Err(Error::Parse {
            line: lineno,
            msg: "trailing fields".into(),
        });
    }
    Ok((a, b))
}

/// Reads a graph in edge-list format.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut lines = reader.lines();
    let header = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        msg: "empty input".into(),
    })??;
    let (n, m) = parse_pair(&header, 1)?;
    let mut edges = Vec::with_capacity(m);
    let mut seen = HashSet::with_capacity(m);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (u, v) = parse_pair(&line, lineno)?;
        let err = |msg: String| Error::Parse { line: lineno, msg };
        if u == v {
            return Err(err(format!("self-loop at vertex {u}")));
        }
        if u >= n || v >= n {
            return Err(err(format!("vertex id out of range for n = {n}")));
        }
        if u > v {
            return Err(err(format!("edge `{u} {v}` not written with u < v")));
        }
        if !seen.insert((u, v)) {
            return Err(err(format!("duplicate edge `{u} {v}`")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Ok(Graph::build(n, &edges))
}

/// Writes `g` in edge-list format, edges in lexicographic order.
pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", g.n(), g.m())?;
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()?;
    Ok(())
}
