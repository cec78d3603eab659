//! ASCII OFF and STL readers.

use crate::error::{Error, Result};
use crate::surfaces::mesh::{Triangle, TriangulatedSurface};
use crate::vector::Vec3;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::MeshParse {
        line,
        message: message.into(),
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("expected a number, found '{tok}'")))
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| {
        parse_err(
            line,
            format!("expected a non-negative integer, found '{tok}'"),
        )
    })
}

/// Reads an ASCII OFF file. Polygons with more than three vertices are
/// split into triangle fans around their first vertex.
pub fn read_off(text: &str) -> Result<TriangulatedSurface> {
    // Non-empty, comment-stripped lines with their 1-based numbers.
    let mut lines = text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    });

    let (mut ln, mut head) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut counts_line = head;
    if let Some(rest) = head.strip_prefix("OFF") {
        let rest = rest.trim();
        if rest.is_empty() {
            (ln, head) = lines
                .next()
                .ok_or_else(|| parse_err(ln, "missing counts"))?;
            counts_line = head;
        } else {
            counts_line = rest;
        }
    }
    let counts: Vec<&str> = counts_line.split_whitespace().collect();
    if counts.len() < 2 {
        return Err(parse_err(ln, "expected vertex and face counts"));
    }
    let nv = parse_usize(counts[0], ln)?;
    let nf = parse_usize(counts[1], ln)?;

    let mut verts = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(ln, "unexpected end of file in vertex list"))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(parse_err(ln, "vertex needs three coordinates"));
        }
        verts.push(Vec3::new(
            parse_f64(toks[0], ln)?,
            parse_f64(toks[1], ln)?,
            parse_f64(toks[2], ln)?,
        ));
    }

    let mut tris = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(ln, "unexpected end of file in face list"))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        let k = parse_usize(toks[0], ln)?;
        if k < 3 || toks.len() < k + 1 {
            return Err(parse_err(
                ln,
                format!("face needs at least 3 indices, has {k}"),
            ));
        }
        let mut idx = Vec::with_capacity(k);
        for t in &toks[1..=k] {
            let i = parse_usize(t, ln)?;
            if i >= nv {
                return Err(parse_err(
                    ln,
                    format!("vertex index {i} out of range (have {nv})"),
                ));
            }
            idx.push(i);
        }
        for w in 1..k - 1 {
            tris.push(Triangle::new(
                verts[idx[0]],
                verts[idx[w]],
                verts[idx[w + 1]],
            ));
        }
    }
    TriangulatedSurface::new(tris)
}

/// Reads an ASCII STL file (`solid` / `facet` / `outer loop` / `vertex`).
pub fn read_stl(text: &str) -> Result<TriangulatedSurface> {
    let mut tris = Vec::new();
    let mut pending: Vec<Vec3> = Vec::with_capacity(3);
    let mut in_facet = false;
    let mut saw_solid = false;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        last_line = ln;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let Some(&kw) = toks.first() else { continue };
        match kw {
            "solid" => saw_solid = true,
            "endsolid" | "outer" | "endloop" => {}
            "facet" => {
                if in_facet {
                    return Err(parse_err(ln, "nested facet"));
                }
                in_facet = true;
                pending.clear();
            }
            "vertex" => {
                if !in_facet {
                    return Err(parse_err(ln, "vertex outside facet"));
                }
                if toks.len() < 4 {
                    return Err(parse_err(ln, "vertex needs three coordinates"));
                }
                pending.push(Vec3::new(
                    parse_f64(toks[1], ln)?,
                    parse_f64(toks[2], ln)?,
                    parse_f64(toks[3], ln)?,
                ));
            }
            "endfacet" => {
                if pending.len() != 3 {
                    return Err(parse_err(
                        ln,
                        format!("facet has {} vertices, expected 3", pending.len()),
                    ));
                }
                tris.push(Triangle::new(pending[0], pending[1], pending[2]));
                in_facet = false;
            }
            other => return Err(parse_err(ln, format!("unexpected keyword '{other}'"))),
        }
    }
    if !saw_solid {
        return Err(parse_err(1, "missing 'solid' header"));
    }
    if in_facet {
        return Err(parse_err(last_line, "unterminated facet"));
    }
    TriangulatedSurface::new(tris)
}

/// Dispatches on the file extension (`.off` or `.stl`).
pub fn read_mesh_file(path: &std::path::Path) -> std::io::Result<Result<TriangulatedSurface>> {
    let text = std::fs::read_to_string(path)?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    Ok(match ext.as_deref() {
        Some("stl") => read_stl(&text),
        _ => read_off(&text),
    })
}
