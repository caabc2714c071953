//! `tmesh` ASCII format.
//!
//! ```text
//! tmesh 1
//! radii <r1> <r2> <r3> <r4>
//! nv <N>
//! <x> <y> <z>                      (N lines)
//! nt <M>
//! <v0> <v1> <v2> <v3> <region>     (M lines, 0-based, region 1..4)
//! ```
//!
//! Coordinates are written with the shortest decimal form that parses back
//! to the same `f64`, so save/load round trips are bit exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{Mesh, Point3, Radii, Region, Tet};
use crate::error::{Error, Result};

pub fn write_mesh<W: Write>(mesh: &Mesh, mut w: W) -> std::io::Result<()> {
    let r = mesh.radii().as_array();
    writeln!(w, "tmesh 1")?;
    writeln!(w, "radii {} {} {} {}", r[0], r[1], r[2], r[3])?;
    writeln!(w, "nv {}", mesh.num_vertices())?;
    for v in mesh.vertices() {
        writeln!(w, "{} {} {}", v.x, v.y, v.z)?;
    }
    writeln!(w, "nt {}", mesh.num_tets())?;
    for t in mesh.tets() {
        let [a, b, c, d] = t.vertices;
        writeln!(w, "{a} {b} {c} {d} {}", t.region)?;
    }
    w.flush()
}

pub fn save_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_mesh(mesh, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_mesh(BufReader::new(file))
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    /// Next non-blank line, split into tokens.
    fn next_tokens(&mut self) -> Result<Vec<String>> {
        loop {
            self.line += 1;
            match self.inner.next() {
                None => return Err(self.err("unexpected end of file")),
                Some(Err(e)) => return Err(self.err(e.to_string())),
                Some(Ok(l)) if l.trim().is_empty() => continue,
                Some(Ok(l)) => return Ok(l.split_whitespace().map(str::to_owned).collect()),
            }
        }
    }

    fn keyword(&mut self, key: &str, n: usize) -> Result<Vec<String>> {
        let mut tok = self.next_tokens()?;
        if tok[0] != key || tok.len() != n + 1 {
            return Err(self.err(format!("expected `{key}` followed by {n} value(s)")));
        }
        tok.remove(0);
        Ok(tok)
    }

    fn parse<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse()
            .map_err(|_| self.err(format!("cannot parse `{s}`")))
    }
}

pub fn read_mesh<R: BufRead>(reader: R) -> Result<Mesh> {
    let mut lines = Lines {
        inner: reader.lines(),
        line: 0,
    };
    let version = lines.keyword("tmesh", 1)?;
    if version[0] != "1" {
        return Err(lines.err(format!("unsupported tmesh version {}", version[0])));
    }
    let r = lines.keyword("radii", 4)?;
    let mut radii = [0.0; 4];
    for (dst, s) in radii.iter_mut().zip(&r) {
        *dst = lines.parse(s)?;
    }
    let radii = Radii::new(radii).map_err(|e| lines.err(e.to_string()))?;

    let nv: usize = {
        let tok = lines.keyword("nv", 1)?;
        lines.parse(&tok[0])?
    };
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let tok = lines.next_tokens()?;
        if tok.len() != 3 {
            return Err(lines.err("expected 3 coordinates"));
        }
        let x: f64 = lines.parse(&tok[0])?;
        let y: f64 = lines.parse(&tok[1])?;
        let z: f64 = lines.parse(&tok[2])?;
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(lines.err("non-finite coordinate"));
        }
        vertices.push(Point3::new(x, y, z));
    }

    let nt: usize = {
        let tok = lines.keyword("nt", 1)?;
        lines.parse(&tok[0])?
    };
    let mut tets = Vec::with_capacity(nt);
    for t in 0..nt {
        let tok = lines.next_tokens()?;
        if tok.len() != 5 {
            return Err(lines.err("expected 4 vertex indices and a region tag"));
        }
        let mut v = [0usize; 4];
        for (dst, s) in v.iter_mut().zip(&tok) {
            *dst = lines.parse(s)?;
        }
        let tag: i64 = lines.parse(&tok[4])?;
        let region = Region::new(tag).ok_or(Error::RegionOutOfRange { tet: t, tag })?;
        tets.push(Tet {
            vertices: v,
            region,
        });
    }
    Mesh::new(vertices, tets, radii)
}
