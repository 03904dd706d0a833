//! Plain-text graph and labelling files.
//!
//! Graph: a header line `num_nodes num_edges`, then one `u v` line per edge
//! with `u < v`, 0-based, LF-terminated. Labelling: one `+1` or `-1` per
//! line. Writers emit edges in lexicographic order, so writing a graph that
//! was read from a canonical file reproduces it byte for byte.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{Graph, Labelling};
use crate::{Error, Result};

pub fn write_graph<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "{} {}", g.num_nodes(), g.num_edges())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_graph<R: BufRead>(input: R) -> Result<Graph> {
    let mut lines = input.lines();
    let header = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header".into(),
    })??;
    let (num_nodes, num_edges) = parse_pair(&header, 1)?;
    let mut edges = Vec::with_capacity(num_edges);
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        let (u, v) = parse_pair(&line, lineno)?;
        if u >= v {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("edge ({u}, {v}) must have u < v"),
            });
        }
        edges.push((u, v));
    }
    if edges.len() != num_edges {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header promises {num_edges} edges, found {}", edges.len()),
        });
    }
    Graph::from_edges(num_nodes, &edges)
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split(' ');
    let mut next = || -> Result<usize> {
        it.next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("expected two integers, got {line:?}"),
            })
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(Error::Parse {
            line: lineno,
            msg: format!("trailing fields in {line:?}"),
        });
    }
    Ok((a, b))
}

pub fn write_labelling<W: Write>(lab: &Labelling, mut out: W) -> Result<()> {
    for &s in lab.signs() {
        out.write_all(if s == 1 { b"+1\n" } else { b"-1\n" })?;
    }
    Ok(())
}

pub fn read_labelling<R: BufRead>(input: R) -> Result<Labelling> {
    let mut signs = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        signs.push(match line.as_str() {
            "+1" => 1,
            "-1" => -1,
            other => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected +1 or -1, got {other:?}"),
                })
            }
        });
    }
    Labelling::new(signs)
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_graph(g, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    read_graph(BufReader::new(File::open(path)?))
}

pub fn save_labelling(lab: &Labelling, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_labelling(lab, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_labelling(path: impl AsRef<Path>) -> Result<Labelling> {
    read_labelling(BufReader::new(File::open(path)?))
}
