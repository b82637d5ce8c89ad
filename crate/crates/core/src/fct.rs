//! Plain-text facet lists (`FCT v1`).
//!
//! ```text
//! dim 2
//! vertices 4
//! # comment
//! 0 1 2
//! 0 1 3
//! ```

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{AkError, Result};
use crate::simplicial::{Simplex, SimplicialComplex, Vertex};

pub fn to_string(k: &SimplicialComplex) -> String {
    let mut out = String::new();
    writeln!(out, "dim {}", k.dim()).unwrap();
    writeln!(out, "vertices {}", k.num_vertices()).unwrap();
    for s in k.facets() {
        let mut first = true;
        for v in s.vertices() {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write<W: Write>(k: &SimplicialComplex, mut w: W) -> Result<()> {
    w.write_all(to_string(k).as_bytes())?;
    Ok(())
}

pub fn write_file(k: &SimplicialComplex, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, to_string(k))?;
    Ok(())
}

fn header(line: Option<(usize, String)>, key: &str) -> Result<(usize, i64)> {
    let (no, text) = line.ok_or(AkError::Parse {
        line: 0,
        msg: format!("missing `{key}` header"),
    })?;
    let mut parts = text.split_whitespace();
    match (
        parts.next(),
        parts.next().map(str::parse::<i64>),
        parts.next(),
    ) {
        (Some(k), Some(Ok(n)), None) if k == key => Ok((no, n)),
        _ => Err(AkError::Parse {
            line: no,
            msg: format!("expected `{key} <n>`"),
        }),
    }
}

pub fn read<R: BufRead>(r: R) -> Result<SimplicialComplex> {
    let mut lines = r.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(l) => {
            let body = l.split('#').next().unwrap_or("").trim().to_string();
            (!body.is_empty()).then_some(Ok((i + 1, body)))
        }
        Err(e) => Some(Err(e)),
    });
    let mut next = || lines.next().transpose();
    let (_, dim) = header(next()?, "dim")?;
    let (vno, nverts) = header(next()?, "vertices")?;
    let mut facets = Vec::new();
    while let Some((no, text)) = next()? {
        let verts: std::result::Result<Vec<Vertex>, _> =
            text.split_whitespace().map(str::parse::<Vertex>).collect();
        let verts = verts.map_err(|e| AkError::Parse {
            line: no,
            msg: e.to_string(),
        })?;
        if !verts.windows(2).all(|w| w[0] < w[1]) {
            return Err(AkError::Parse {
                line: no,
                msg: "facet ids not strictly increasing".into(),
            });
        }
        facets.push(Simplex::from_sorted(verts));
    }
    let k = SimplicialComplex::new(facets);
    if k.dim() != dim as isize {
        return Err(AkError::Parse {
            line: 1,
            msg: format!("declared dim {dim}, found {}", k.dim()),
        });
    }
    if k.num_vertices() as i64 != nverts {
        return Err(AkError::Parse {
            line: vno,
            msg: format!("declared {nverts} vertices, found {}", k.num_vertices()),
        });
    }
    Ok(k)
}

pub fn read_file(path: &std::path::Path) -> Result<SimplicialComplex> {
    let f = std::fs::File::open(path)?;
    read(std::io::BufReader::new(f))
}

pub fn from_str(s: &str) -> Result<SimplicialComplex> {
    read(s.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let k = SimplicialComplex::boundary_of_simplex(4);
        let text = to_string(&k);
        assert!(text.starts_with("dim 3\nvertices 5\n"));
        assert_eq!(from_str(&text).unwrap(), k);
    }

    #[test]
    fn comments_and_errors() {
        let k = from_str("# hi\ndim 1\nvertices 3\n0 1 # edge\n1 2\n").unwrap();
        assert_eq!(k.num_facets(), 2);
        assert!(from_str("dim 1\nvertices 2\n1 0\n").is_err());
        assert!(from_str("dim 2\nvertices 2\n0 1\n").is_err());
        assert!(from_str("vertices 2\n0 1\n").is_err());
        assert!(from_str("dim 1\nvertices 5\n0 1\n").is_err());
    }

    #[test]
    fn empty_complex() {
        let e = SimplicialComplex::empty();
        assert_eq!(from_str(&to_string(&e)).unwrap(), e);
    }
}
