//! Point-cloud files: XYZ text and PLY in ASCII or little-endian binary.
//!
//! Every file carries a header of `key value` entries (`# key value` lines
//! in XYZ, `comment key value` lines in PLY). Coordinates are written with
//! the shortest representation that parses back to the same `f64`, so text
//! files round-trip bit-exactly. When any point has a normal, all points get
//! normal columns and a missing normal is written as `0 0 0`.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crofton_core::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Xyz,
    Ply,
    PlyBinary,
}

impl Format {
    /// Format implied by a file extension, if any.
    pub fn from_extension(path: &std::path::Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "xyz" | "txt" => Some(Format::Xyz),
            "ply" => Some(Format::Ply),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilePoint {
    pub position: Vec3,
    pub normal: Option<Vec3>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CloudFile {
    /// Header entries in file order.
    pub header: Vec<(String, String)>,
    pub points: Vec<FilePoint>,
}

impl CloudFile {
    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.points.iter().map(|p| p.position).collect()
    }

    fn has_normals(&self) -> bool {
        self.points.iter().any(|p| p.normal.is_some())
    }
}

/// Where a malformed file went wrong.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    Line(usize),
    ByteOffset(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormatError {
    pub location: Location,
    pub message: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.location {
            Location::Line(l) => write!(f, "parse error at line {l}: {}", self.message),
            Location::ByteOffset(b) => {
                write!(f, "parse error at byte offset {b}: {}", self.message)
            }
        }
    }
}

impl std::error::Error for FormatError {}

fn at_line(line: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        location: Location::Line(line),
        message: message.into(),
    }
}

pub fn write_cloud<W: Write>(w: &mut W, format: Format, cloud: &CloudFile) -> io::Result<()> {
    match format {
        Format::Xyz => write_xyz(w, cloud),
        Format::Ply => write_ply(w, cloud, false),
        Format::PlyBinary => write_ply(w, cloud, true),
    }
}

fn check_header(cloud: &CloudFile) -> io::Result<()> {
    for (k, v) in &cloud.header {
        if k.is_empty() || k.contains(char::is_whitespace) || v.contains('\n') {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!("bad header entry {k:?}"),
            ));
        }
    }
    Ok(())
}

fn normal_or_zero(p: &FilePoint) -> Vec3 {
    p.normal.unwrap_or(Vec3::ZERO)
}

fn write_xyz<W: Write>(w: &mut W, cloud: &CloudFile) -> io::Result<()> {
    check_header(cloud)?;
    for (k, v) in &cloud.header {
        writeln!(w, "# {k} {v}")?;
    }
    let normals = cloud.has_normals();
    for p in &cloud.points {
        let x = p.position;
        if normals {
            let n = normal_or_zero(p);
            writeln!(w, "{} {} {} {} {} {}", x.x, x.y, x.z, n.x, n.y, n.z)?;
        } else {
            writeln!(w, "{} {} {}", x.x, x.y, x.z)?;
        }
    }
    Ok(())
}

fn write_ply<W: Write>(w: &mut W, cloud: &CloudFile, binary: bool) -> io::Result<()> {
    check_header(cloud)?;
    let normals = cloud.has_normals();
    writeln!(w, "ply")?;
    writeln!(
        w,
        "format {} 1.0",
        if binary {
            "binary_little_endian"
        } else {
            "ascii"
        }
    )?;
    for (k, v) in &cloud.header {
        writeln!(w, "comment {k} {v}")?;
    }
    writeln!(w, "element vertex {}", cloud.points.len())?;
    let props: &[&str] = if normals {
        &["x", "y", "z", "nx", "ny", "nz"]
    } else {
        &["x", "y", "z"]
    };
    for p in props {
        writeln!(w, "property double {p}")?;
    }
    writeln!(w, "end_header")?;
    for p in &cloud.points {
        let x = p.position;
        let mut vals = vec![x.x, x.y, x.z];
        if normals {
            let n = normal_or_zero(p);
            vals.extend([n.x, n.y, n.z]);
        }
        if binary {
            for v in vals {
                w.write_all(&v.to_le_bytes())?;
            }
        } else {
            let text: Vec<String> = vals.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", text.join(" "))?;
        }
    }
    Ok(())
}

fn to_point(vals: &[f64]) -> FilePoint {
    let position = Vec3::new(vals[0], vals[1], vals[2]);
    let normal = (vals.len() == 6)
        .then(|| Vec3::new(vals[3], vals[4], vals[5]))
        .filter(|n| *n != Vec3::ZERO);
    FilePoint { position, normal }
}

/// Parses a cloud file, detecting PLY by its magic line.
pub fn read_cloud(bytes: &[u8]) -> Result<CloudFile, FormatError> {
    if bytes.starts_with(b"ply\n") || bytes.starts_with(b"ply\r\n") {
        read_ply(bytes)
    } else {
        let text = std::str::from_utf8(bytes).map_err(|e| FormatError {
            location: Location::ByteOffset(e.valid_up_to()),
            message: "file is not valid UTF-8 text".into(),
        })?;
        read_xyz(text)
    }
}

fn parse_floats(line: &str, lineno: usize) -> Result<Vec<f64>, FormatError> {
    line.split_whitespace()
        .map(|tok| f64::from_str(tok).map_err(|_| at_line(lineno, format!("bad number '{tok}'"))))
        .collect()
}

fn read_xyz(text: &str) -> Result<CloudFile, FormatError> {
    let mut cloud = CloudFile::default();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some((k, v)) = rest.split_once(' ') {
                cloud.header.push((k.to_string(), v.trim().to_string()));
            } else if !rest.is_empty() {
                cloud.header.push((rest.to_string(), String::new()));
            }
            continue;
        }
        let vals = parse_floats(line, lineno)?;
        if vals.len() != 3 && vals.len() != 6 {
            return Err(at_line(
                lineno,
                format!("expected 3 or 6 values, found {}", vals.len()),
            ));
        }
        cloud.points.push(to_point(&vals));
    }
    Ok(cloud)
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Scalar {
    F32,
    F64,
}

impl Scalar {
    fn size(self) -> usize {
        match self {
            Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }
}

fn read_ply(bytes: &[u8]) -> Result<CloudFile, FormatError> {
    let mut cloud = CloudFile::default();
    let mut pos = 0usize;
    let mut lineno = 0usize;
    let mut binary = None;
    let mut count = None;
    let mut props: Vec<(String, Scalar)> = Vec::new();
    loop {
        let Some(end) = bytes[pos..].iter().position(|&b| b == b'\n') else {
            return Err(FormatError {
                location: Location::ByteOffset(bytes.len()),
                message: "header ends before end_header".into(),
            });
        };
        lineno += 1;
        let line = std::str::from_utf8(&bytes[pos..pos + end])
            .map_err(|_| at_line(lineno, "header is not valid UTF-8"))?
            .trim_end_matches('\r');
        pos += end + 1;
        let mut words = line.split_whitespace();
        match words.next() {
            Some("ply") if lineno == 1 => {}
            Some("format") => {
                binary = Some(match (words.next(), words.next()) {
                    (Some("ascii"), Some("1.0")) => false,
                    (Some("binary_little_endian"), Some("1.0")) => true,
                    _ => return Err(at_line(lineno, format!("unsupported format '{line}'"))),
                });
            }
            Some("comment") => {
                let rest = line["comment".len()..].trim();
                match rest.split_once(' ') {
                    Some((k, v)) => cloud.header.push((k.to_string(), v.trim().to_string())),
                    None if !rest.is_empty() => {
                        cloud.header.push((rest.to_string(), String::new()))
                    }
                    None => {}
                }
            }
            Some("obj_info") => {}
            Some("element") => {
                if count.is_some() {
                    return Err(at_line(lineno, "only a single vertex element is supported"));
                }
                match (words.next(), words.next().map(usize::from_str)) {
                    (Some("vertex"), Some(Ok(n))) => count = Some(n),
                    _ => return Err(at_line(lineno, format!("unsupported element '{line}'"))),
                }
            }
            Some("property") => {
                let ty = match words.next() {
                    Some("double" | "float64") => Scalar::F64,
                    Some("float" | "float32") => Scalar::F32,
                    other => {
                        return Err(at_line(
                            lineno,
                            format!("unsupported property type {other:?}"),
                        ))
                    }
                };
                let name = words
                    .next()
                    .ok_or_else(|| at_line(lineno, "property without a name"))?;
                props.push((name.to_string(), ty));
            }
            Some("end_header") => break,
            _ => return Err(at_line(lineno, format!("unexpected header line '{line}'"))),
        }
    }
    let binary = binary.ok_or_else(|| at_line(lineno, "missing format line"))?;
    let count = count.ok_or_else(|| at_line(lineno, "missing vertex element"))?;
    let names: Vec<&str> = props.iter().map(|(n, _)| n.as_str()).collect();
    if !matches!(
        names.as_slice(),
        ["x", "y", "z"] | ["x", "y", "z", "nx", "ny", "nz"]
    ) {
        return Err(at_line(
            lineno,
            format!("unsupported vertex properties {names:?}"),
        ));
    }
    let width = props.len();
    cloud.points.reserve(count);
    if binary {
        let stride: usize = props.iter().map(|(_, t)| t.size()).sum();
        let need = count * stride;
        if bytes.len() - pos < need {
            let whole = (bytes.len() - pos) / stride;
            return Err(FormatError {
                location: Location::ByteOffset(pos + whole * stride),
                message: format!("truncated vertex data: vertex {whole} of {count} is incomplete"),
            });
        }
        let mut vals = vec![0.0; width];
        for _ in 0..count {
            for (v, (_, ty)) in vals.iter_mut().zip(&props) {
                *v = match ty {
                    Scalar::F64 => {
                        f64::from_le_bytes(bytes[pos..pos + 8].try_into().expect("8 bytes"))
                    }
                    Scalar::F32 => {
                        f32::from_le_bytes(bytes[pos..pos + 4].try_into().expect("4 bytes")) as f64
                    }
                };
                pos += ty.size();
            }
            cloud.points.push(to_point(&vals));
        }
        if pos != bytes.len() {
            return Err(FormatError {
                location: Location::ByteOffset(pos),
                message: "trailing bytes after vertex data".into(),
            });
        }
    } else {
        let text = std::str::from_utf8(&bytes[pos..]).map_err(|e| FormatError {
            location: Location::ByteOffset(pos + e.valid_up_to()),
            message: "vertex data is not valid UTF-8".into(),
        })?;
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (lineno + 1 + i, l.trim()));
        for k in 0..count {
            let (ln, line) = loop {
                match lines.next() {
                    Some((_, "")) => continue,
                    Some(x) => break x,
                    None => {
                        return Err(at_line(
                            lineno + 1 + text.lines().count(),
                            format!("file ends after {k} of {count} vertices"),
                        ))
                    }
                }
            };
            let vals = parse_floats(line, ln)?;
            if vals.len() != width {
                return Err(at_line(
                    ln,
                    format!("expected {width} values, found {}", vals.len()),
                ));
            }
            cloud.points.push(to_point(&vals));
        }
        if let Some((ln, _)) = lines.find(|(_, l)| !l.is_empty()) {
            return Err(at_line(ln, "data after the last vertex"));
        }
    }
    Ok(cloud)
}
