//! Readers and writers for curves (CSV, JSON) and meshes (OFF, OBJ).
//!
//! Curve CSV holds one `x,y` pair per line; curve JSON is an array of `[x, y]`
//! pairs. Floats are written in shortest round-trip form, so saving and
//! reloading a curve reproduces its points bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Curve2D, TriMesh};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl CurveFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match extension(path).as_deref() {
            Some("csv") | Some("txt") => Ok(CurveFormat::Csv),
            Some("json") => Ok(CurveFormat::Json),
            _ => Err(Error::Parse(format!("unknown curve format for {}", path.display()))),
        }
    }
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match extension(path).as_deref() {
            Some("off") => Ok(MeshFormat::Off),
            Some("obj") => Ok(MeshFormat::Obj),
            _ => Err(Error::Parse(format!("unknown mesh format for {}", path.display()))),
        }
    }
}

fn extension(path: &Path) -> Option<String> {
    path.extension().map(|e| e.to_string_lossy().to_ascii_lowercase())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn load_curve(path: impl AsRef<Path>, format: Option<CurveFormat>) -> Result<Curve2D> {
    let path = path.as_ref();
    let format = match format {
        Some(f) => f,
        None => CurveFormat::from_path(path)?,
    };
    let text = read(path)?;
    match format {
        CurveFormat::Csv => parse_curve_csv(&text),
        CurveFormat::Json => parse_curve_json(&text),
    }
}

pub fn save_curve(curve: &Curve2D, path: impl AsRef<Path>, format: Option<CurveFormat>) -> Result<()> {
    let path = path.as_ref();
    let format = match format {
        Some(f) => f,
        None => CurveFormat::from_path(path)?,
    };
    let text = match format {
        CurveFormat::Csv => curve_to_csv(curve),
        CurveFormat::Json => curve_to_json(curve),
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn parse_curve_csv(text: &str) -> Result<Curve2D> {
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let parse = |s: Option<&str>| -> Result<f64> {
            s.ok_or_else(|| Error::Parse(format!("line {}: expected x,y", lineno + 1)))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
        };
        let x = parse(fields.next())?;
        let y = parse(fields.next())?;
        if fields.next().is_some() {
            return Err(Error::Parse(format!("line {}: expected exactly two fields", lineno + 1)));
        }
        points.push([x, y]);
    }
    Curve2D::new(points)
}

pub fn parse_curve_json(text: &str) -> Result<Curve2D> {
    let points: Vec<[f64; 2]> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Curve2D::new(points)
}

pub fn curve_to_csv(curve: &Curve2D) -> String {
    let mut out = String::new();
    for p in curve.points() {
        writeln!(out, "{:?},{:?}", p[0], p[1]).unwrap();
    }
    out
}

pub fn curve_to_json(curve: &Curve2D) -> String {
    serde_json::to_string(curve.points()).expect("finite floats serialize")
}

pub fn load_mesh(path: impl AsRef<Path>, format: Option<MeshFormat>) -> Result<TriMesh> {
    let path = path.as_ref();
    let format = match format {
        Some(f) => f,
        None => MeshFormat::from_path(path)?,
    };
    let text = read(path)?;
    match format {
        MeshFormat::Off => parse_off(&text),
        MeshFormat::Obj => parse_obj(&text),
    }
}

pub fn save_mesh(mesh: &TriMesh, path: impl AsRef<Path>, format: Option<MeshFormat>) -> Result<()> {
    let path = path.as_ref();
    let format = match format {
        Some(f) => f,
        None => MeshFormat::from_path(path)?,
    };
    let text = match format {
        MeshFormat::Off => mesh_to_off(mesh),
        MeshFormat::Obj => mesh_to_obj(mesh),
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn fan(poly: &[usize], faces: &mut Vec<[usize; 3]>) {
    for k in 1..poly.len() - 1 {
        faces.push([poly[0], poly[k], poly[k + 1]]);
    }
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let tok = tok.ok_or_else(|| Error::Parse(format!("missing {what}")))?;
    tok.parse::<T>().map_err(|e| Error::Parse(format!("bad {what} {tok:?}: {e}")))
}

pub fn parse_off(text: &str) -> Result<TriMesh> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty OFF file".into()))?;
    let rest = header
        .strip_prefix("OFF")
        .ok_or_else(|| Error::Parse(format!("expected OFF header, found {header:?}")))?
        .trim();
    let counts_line = if rest.is_empty() {
        lines.next().ok_or_else(|| Error::Parse("missing OFF counts".into()))?
    } else {
        rest
    };
    let mut counts = counts_line.split_whitespace();
    let nv: usize = parse_num(counts.next(), "vertex count")?;
    let nf: usize = parse_num(counts.next(), "face count")?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let line = lines.next().ok_or_else(|| Error::Parse("OFF file truncated in vertices".into()))?;
        let mut it = line.split_whitespace();
        let x = parse_num(it.next(), "vertex coordinate")?;
        let y = parse_num(it.next(), "vertex coordinate")?;
        let z = parse_num(it.next(), "vertex coordinate")?;
        vertices.push([x, y, z]);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let line = lines.next().ok_or_else(|| Error::Parse("OFF file truncated in faces".into()))?;
        let mut it = line.split_whitespace();
        let k: usize = parse_num(it.next(), "face size")?;
        if k < 3 {
            return Err(Error::Parse(format!("face with {k} vertices")));
        }
        // Anything after the k indices (e.g. a color) is ignored.
        let poly = (0..k)
            .map(|_| parse_num::<usize>(it.next(), "face index"))
            .collect::<Result<Vec<_>>>()?;
        fan(&poly, &mut faces);
    }
    TriMesh::new(vertices, faces)
}

pub fn parse_obj(text: &str) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let x = parse_num(it.next(), "vertex coordinate")?;
                let y = parse_num(it.next(), "vertex coordinate")?;
                let z = parse_num(it.next(), "vertex coordinate")?;
                vertices.push([x, y, z]);
            }
            Some("f") => {
                let nv = vertices.len() as i64;
                let poly = it
                    .map(|tok| {
                        let idx: i64 = parse_num(tok.split('/').next(), "face index")?;
                        let resolved = if idx < 0 { nv + idx } else { idx - 1 };
                        if resolved < 0 || resolved >= nv {
                            return Err(Error::Parse(format!(
                                "line {}: face index {idx} out of range",
                                lineno + 1
                            )));
                        }
                        Ok(resolved as usize)
                    })
                    .collect::<Result<Vec<_>>>()?;
                if poly.len() < 3 {
                    return Err(Error::Parse(format!("line {}: face with {} vertices", lineno + 1, poly.len())));
                }
                fan(&poly, &mut faces);
            }
            _ => {}
        }
    }
    TriMesh::new(vertices, faces)
}

pub fn mesh_to_off(mesh: &TriMesh) -> String {
    let mut out = String::new();
    writeln!(out, "OFF\n{} {} {}", mesh.n_vertices(), mesh.n_faces(), mesh.n_edges()).unwrap();
    for v in mesh.vertices() {
        writeln!(out, "{:?} {:?} {:?}", v[0], v[1], v[2]).unwrap();
    }
    for f in mesh.faces() {
        writeln!(out, "3 {} {} {}", f[0], f[1], f[2]).unwrap();
    }
    out
}

pub fn mesh_to_obj(mesh: &TriMesh) -> String {
    let mut out = String::new();
    for v in mesh.vertices() {
        writeln!(out, "v {:?} {:?} {:?}", v[0], v[1], v[2]).unwrap();
    }
    for f in mesh.faces() {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
    }
    out
}
