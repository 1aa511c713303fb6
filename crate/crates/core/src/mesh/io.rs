//! Plain-text mesh format.
//!
//! ```text
//! # comment
//! V 4
//! 0 0
//! 1 0
//! 1 1 1        # third column 1 marks a constrained vertex
//! 0 1
//! C 1
//! 0 1 2 3
//! E 1          # optional constrained edges
//! 0 1
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{build_mesh, PolygonalMesh, Vertex};
use crate::error::{Error, Result};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { inner: text.lines().enumerate(), last: 0 }
    }

    /// Next non-empty line with comments stripped, as (1-based number, tokens).
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            let body = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = body.split_whitespace().collect();
            if !toks.is_empty() {
                self.last = i + 1;
                return Some((i + 1, toks));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        self.next_tokens().ok_or_else(|| Error::Parse {
            line: self.last + 1,
            message: format!("unexpected end of file, expected {what}"),
        })
    }
}

fn parse<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse { line, message: format!("invalid {what} '{tok}'") })
}

fn header(lines: &mut Lines<'_>, tag: &str) -> Result<usize> {
    let (line, toks) = lines.expect(&format!("'{tag} <count>' header"))?;
    if toks.len() != 2 || toks[0] != tag {
        return Err(Error::Parse { line, message: format!("expected '{tag} <count>'") });
    }
    parse(toks[1], line, "count")
}

pub fn parse_mesh(text: &str) -> Result<PolygonalMesh> {
    let mut lines = Lines::new(text);
    let nv = header(&mut lines, "V")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, t) = lines.expect("vertex line")?;
        if t.len() != 2 && t.len() != 3 {
            return Err(Error::Parse { line, message: "vertex line needs 'x y [c]'".into() });
        }
        let x: f64 = parse(t[0], line, "coordinate")?;
        let y: f64 = parse(t[1], line, "coordinate")?;
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Parse { line, message: "non-finite coordinate".into() });
        }
        let constrained = match t.get(2) {
            None => false,
            Some(c) => parse::<u8>(c, line, "constraint flag")? != 0,
        };
        vertices.push(Vertex { position: super::Point::new(x, y), constrained });
    }
    let nc = header(&mut lines, "C")?;
    if nc == 0 {
        return Err(Error::Parse { line: lines.last, message: "mesh has no cells".into() });
    }
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (line, t) = lines.expect("cell line")?;
        let ids = t.iter().map(|s| parse::<usize>(s, line, "vertex index")).collect::<Result<Vec<_>>>()?;
        if let Some(&bad) = ids.iter().find(|&&v| v >= nv) {
            return Err(Error::Parse { line, message: format!("vertex index {bad} out of range (have {nv})") });
        }
        cells.push(ids);
    }
    let mut constrained = Vec::new();
    if let Some((line, t)) = lines.next_tokens() {
        if t.len() != 2 || t[0] != "E" {
            return Err(Error::Parse { line, message: "expected 'E <count>' or end of file".into() });
        }
        let ne: usize = parse(t[1], line, "count")?;
        for _ in 0..ne {
            let (line, t) = lines.expect("constrained edge line")?;
            if t.len() != 2 {
                return Err(Error::Parse { line, message: "edge line needs two indices".into() });
            }
            constrained.push((parse(t[0], line, "vertex index")?, parse(t[1], line, "vertex index")?));
        }
        if let Some((line, _)) = lines.next_tokens() {
            return Err(Error::Parse { line, message: "trailing content".into() });
        }
    }
    build_mesh(vertices, cells, &constrained)
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<PolygonalMesh> {
    parse_mesh(&std::fs::read_to_string(path)?)
}

pub fn format_mesh(mesh: &PolygonalMesh) -> String {
    let mut s = String::new();
    writeln!(s, "V {}", mesh.num_vertices()).unwrap();
    for v in &mesh.vertices {
        if v.constrained {
            writeln!(s, "{:?} {:?} 1", v.position.x, v.position.y).unwrap();
        } else {
            writeln!(s, "{:?} {:?}", v.position.x, v.position.y).unwrap();
        }
    }
    writeln!(s, "C {}", mesh.num_cells()).unwrap();
    for c in &mesh.cells {
        let ids: Vec<String> = c.boundary.iter().map(usize::to_string).collect();
        writeln!(s, "{}", ids.join(" ")).unwrap();
    }
    let ce = mesh.constrained_edges();
    if !ce.is_empty() {
        writeln!(s, "E {}", ce.len()).unwrap();
        for (a, b) in ce {
            writeln!(s, "{a} {b}").unwrap();
        }
    }
    s
}

pub fn write_mesh(mesh: &PolygonalMesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_mesh(mesh))?;
    Ok(())
}
