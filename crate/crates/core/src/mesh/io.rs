//! OFF, OBJ and JSON mesh formats.
//!
//! Polygons with more than three corners are fan-triangulated on input.
//! Vertices may carry three or four coordinates; a missing fourth is zero.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::TriangleMesh;
use crate::ambient::{AlphaSign, AmbientSpace, Lattice};
use crate::error::{Error, Result};
use crate::vecn::V4;

fn coords(vals: &[f64], line: usize) -> Result<V4> {
    match vals.len() {
        3 => Ok([vals[0], vals[1], vals[2], 0.0]),
        4 => Ok([vals[0], vals[1], vals[2], vals[3]]),
        n => Err(Error::Parse(format!("line {line}: vertex has {n} coordinates"))),
    }
}

fn fan(poly: &[usize], out: &mut Vec<[usize; 3]>) {
    for k in 1..poly.len().saturating_sub(1) {
        out.push([poly[0], poly[k], poly[k + 1]]);
    }
}

fn num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse(format!("line {line}: bad number `{tok}`")))
}

pub fn parse_off(text: &str) -> Result<(Vec<V4>, Vec<[usize; 3]>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, header) = lines.next().ok_or_else(|| Error::Parse("empty OFF file".into()))?;
    let four = header.starts_with("4OFF");
    let mut rest: Vec<&str> = Vec::new();
    if let Some(tail) = header.strip_prefix("4OFF").or_else(|| header.strip_prefix("OFF")) {
        rest.extend(tail.split_whitespace());
    } else {
        return Err(Error::Parse(format!("line {ln}: missing OFF header")));
    }
    let (ln, counts) = if rest.is_empty() {
        let (ln, l) = lines.next().ok_or_else(|| Error::Parse("missing OFF counts".into()))?;
        (ln, l.split_whitespace().collect::<Vec<_>>())
    } else {
        (ln, rest)
    };
    if counts.len() < 2 {
        return Err(Error::Parse(format!("line {ln}: bad OFF counts")));
    }
    let nv: usize = num(counts[0], ln)?;
    let nf: usize = num(counts[1], ln)?;
    let dim = if four { 4 } else { 3 };
    let mut verts = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| Error::Parse("truncated OFF vertices".into()))?;
        let vals = l.split_whitespace().take(dim).map(|t| num::<f64>(t, ln)).collect::<Result<Vec<_>>>()?;
        verts.push(coords(&vals, ln)?);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines.next().ok_or_else(|| Error::Parse("truncated OFF faces".into()))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        let k: usize = num(toks.first().copied().unwrap_or(""), ln)?;
        if k < 3 || toks.len() < k + 1 {
            return Err(Error::Parse(format!("line {ln}: bad polygon")));
        }
        let poly = toks[1..=k].iter().map(|t| num::<usize>(t, ln)).collect::<Result<Vec<_>>>()?;
        fan(&poly, &mut faces);
    }
    Ok((verts, faces))
}

pub fn parse_obj(text: &str) -> Result<(Vec<V4>, Vec<[usize; 3]>)> {
    let mut verts = Vec::new();
    let mut faces = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        let mut toks = l.split_whitespace();
        match toks.next() {
            Some("v") => {
                let vals = toks.map(|t| num::<f64>(t, ln)).collect::<Result<Vec<_>>>()?;
                verts.push(coords(&vals, ln)?);
            }
            Some("f") => {
                let mut poly = Vec::new();
                for t in toks {
                    let head = t.split('/').next().unwrap_or("");
                    let k: i64 = num(head, ln)?;
                    let idx = if k > 0 {
                        k - 1
                    } else if k < 0 {
                        verts.len() as i64 + k
                    } else {
                        return Err(Error::Parse(format!("line {ln}: zero face index")));
                    };
                    if idx < 0 {
                        return Err(Error::Parse(format!("line {ln}: face index out of range")));
                    }
                    poly.push(idx as usize);
                }
                if poly.len() < 3 {
                    return Err(Error::Parse(format!("line {ln}: face with fewer than 3 corners")));
                }
                fan(&poly, &mut faces);
            }
            _ => {}
        }
    }
    Ok((verts, faces))
}

fn fmt_coords(p: &V4) -> String {
    if p[3] == 0.0 {
        format!("{:?} {:?} {:?}", p[0], p[1], p[2])
    } else {
        format!("{:?} {:?} {:?} {:?}", p[0], p[1], p[2], p[3])
    }
}

fn four_d(mesh: &TriangleMesh) -> bool {
    mesh.positions().iter().any(|p| p[3] != 0.0)
}

pub fn to_off(mesh: &TriangleMesh) -> String {
    let mut s = String::new();
    let four = four_d(mesh);
    let _ = writeln!(s, "{}", if four { "4OFF" } else { "OFF" });
    let _ = writeln!(s, "{} {} {}", mesh.n_vertices(), mesh.n_faces(), mesh.n_edges());
    for p in mesh.positions() {
        if four {
            let _ = writeln!(s, "{:?} {:?} {:?} {:?}", p[0], p[1], p[2], p[3]);
        } else {
            let _ = writeln!(s, "{:?} {:?} {:?}", p[0], p[1], p[2]);
        }
    }
    for [a, b, c] in mesh.faces() {
        let _ = writeln!(s, "3 {a} {b} {c}");
    }
    s
}

pub fn to_obj(mesh: &TriangleMesh) -> String {
    let mut s = String::new();
    for p in mesh.positions() {
        let _ = writeln!(s, "v {}", fmt_coords(p));
    }
    for [a, b, c] in mesh.faces() {
        let _ = writeln!(s, "f {} {} {}", a + 1, b + 1, c + 1);
    }
    s
}

/// JSON mesh document. The per-vertex surface fields are optional; when
/// present, `shape_op` is expressed in the vertex frame given by `frame`,
/// or in the canonical vertex frame without it.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vertices: Vec<Vec<f64>>,
    pub faces: Vec<[usize; 3]>,
    #[serde(default = "default_ambient")]
    pub ambient: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<[[f64; 3]; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_sign: Option<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal: Option<Vec<Vec<f64>>>,
    /// First vector of each vertex frame; `shape_op` is expressed in it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape_op: Option<Vec<[[f64; 2]; 2]>>,
    #[serde(default, rename = "H", skip_serializing_if = "Option::is_none")]
    pub mean_curvature: Option<Vec<f64>>,
    #[serde(default, rename = "K", skip_serializing_if = "Option::is_none")]
    pub gauss_curvature: Option<Vec<f64>>,
}

fn default_ambient() -> String {
    "R3".into()
}

impl MeshDocument {
    pub fn from_mesh(mesh: &TriangleMesh, space: &AmbientSpace) -> Self {
        let four = matches!(space, AmbientSpace::Sphere3 { .. });
        Self {
            vertices: mesh
                .positions()
                .iter()
                .map(|p| if four { p.to_vec() } else { p[..3].to_vec() })
                .collect(),
            faces: mesh.faces().to_vec(),
            ambient: space.tag().into(),
            lattice: space.lattice().map(|l| *l.basis()),
            alpha_sign: match space {
                AmbientSpace::Sphere3 { alpha_sign } => Some(alpha_sign.value() as i8),
                _ => None,
            },
            ..Default::default()
        }
    }

    pub fn ambient_space(&self) -> Result<AmbientSpace> {
        match self.ambient.as_str() {
            "R3" => Ok(AmbientSpace::Euclidean3),
            "T3" => {
                let basis = self.lattice.ok_or_else(|| Error::Parse("T3 mesh without lattice".into()))?;
                Ok(AmbientSpace::FlatTorus3(Lattice::new(basis)?))
            }
            "S3" => {
                let sign = match self.alpha_sign {
                    None | Some(1) => AlphaSign::Plus,
                    Some(-1) => AlphaSign::Minus,
                    Some(s) => return Err(Error::Parse(format!("alpha_sign {s}"))),
                };
                Ok(AmbientSpace::sphere(sign))
            }
            other => Err(Error::Parse(format!("unknown ambient `{other}`"))),
        }
    }

    pub fn mesh(&self) -> Result<TriangleMesh> {
        let verts = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| coords(v, i))
            .collect::<Result<Vec<_>>>()?;
        let space = self.ambient_space()?;
        TriangleMesh::new(verts, self.faces.clone(), space.lattice().cloned())
    }
}

pub fn parse_json(text: &str) -> Result<MeshDocument> {
    Ok(serde_json::from_str(text)?)
}

pub fn to_json(mesh: &TriangleMesh, space: &AmbientSpace) -> String {
    serde_json::to_string_pretty(&MeshDocument::from_mesh(mesh, space)).expect("serializable")
}

/// Loads a mesh by extension (`.off`, `.obj`, `.json`). Non-JSON formats
/// carry no ambient information and default to Euclidean space.
pub fn load(path: &Path) -> Result<(TriangleMesh, AmbientSpace, MeshDocument)> {
    let text = std::fs::read_to_string(path)?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let doc = match ext.as_str() {
        "json" => parse_json(&text)?,
        "off" | "obj" => {
            let (v, f) = if ext == "off" { parse_off(&text)? } else { parse_obj(&text)? };
            let four = v.iter().any(|p| p[3] != 0.0);
            MeshDocument {
                vertices: v.iter().map(|p| if four { p.to_vec() } else { p[..3].to_vec() }).collect(),
                faces: f,
                ambient: if four { "S3".into() } else { "R3".into() },
                ..Default::default()
            }
        }
        other => return Err(Error::Parse(format!("unsupported mesh extension `{other}`"))),
    };
    let mesh = doc.mesh()?;
    let space = doc.ambient_space()?;
    Ok((mesh, space, doc))
}

pub fn save(path: &Path, mesh: &TriangleMesh, space: &AmbientSpace) -> Result<()> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let text = match ext.as_str() {
        "off" => to_off(mesh),
        "obj" => to_obj(mesh),
        "json" => to_json(mesh, space),
        other => return Err(Error::Parse(format!("unsupported mesh extension `{other}`"))),
    };
    std::fs::write(path, text)?;
    Ok(())
}
