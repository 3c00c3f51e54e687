//! Immersed surfaces with per-vertex normal, tangent frame and shape
//! operator, plus the analytic CMC generators.
//!
//! Conventions: `A = -d eta` projected to the tangent plane, `H = tr A / 2`,
//! and the vertex frame `(e1, e2)` is oriented so that `(e1, e2, eta)` is
//! positive (on the sphere, `det(p, e1, e2, eta) > 0`).

mod fit;
mod generators;

pub use fit::{estimate_normals, fit_shape_operator};
pub use generators::*;

use serde::{Deserialize, Serialize};

use crate::ambient::{self, AlphaSign, AmbientSpace};
use crate::error::{Error, Result};
use crate::mesh::io::MeshDocument;
use crate::mesh::{metric_quantities, MetricData, TriangleMesh};
use crate::tangent::{Mat2, Vec2};
use crate::vecn::{self, V3, V4};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Analytic,
    Fitted,
}

#[derive(Clone, Debug)]
pub struct ImmersedSurface {
    pub name: String,
    pub mesh: TriangleMesh,
    pub space: AmbientSpace,
    /// Unit normal `eta` in ambient coordinates.
    pub normals: Vec<V4>,
    pub frames: Vec<[V4; 2]>,
    /// Shape operator in the vertex frame.
    pub shape_op: Vec<Mat2>,
    /// Intrinsic Gauss curvature.
    pub k_sigma: Vec<f64>,
    pub provenance: Provenance,
    /// Closed-form area where the generator knows it.
    pub exact_area: Option<f64>,
}

/// Oriented orthonormal tangent frame at `p` for the unit normal `eta`.
///
/// The first vector is the coordinate axis of the Lie algebra least aligned
/// with the Gauss map, projected; the second completes a positive triple.
/// Axes within `1e-9` of the minimum count as tied and the lowest index
/// wins, so the choice is stable under roundoff.
pub fn canonical_frame(space: &AmbientSpace, p: &V4, eta: &V4, vertex: usize) -> Result<[V4; 2]> {
    let eta = vecn::normalize(eta).ok_or(Error::ZeroNormal(vertex))?;
    let n = ambient::to_algebra(space, p, &eta);
    let least = n.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
    let k = (0..3).find(|&a| n[a].abs() <= least + 1e-9).unwrap_or(0);
    let mut axis = [0.0; 3];
    axis[k] = 1.0;
    frame_from_first(space, p, &eta, &ambient::from_algebra(space, p, &axis), vertex)
}

/// Oriented orthonormal frame whose first vector is the tangential part of
/// `first`.
pub fn frame_from_first(space: &AmbientSpace, p: &V4, eta: &V4, first: &V4, vertex: usize) -> Result<[V4; 2]> {
    let eta = vecn::normalize(eta).ok_or(Error::ZeroNormal(vertex))?;
    let n = ambient::to_algebra(space, p, &eta);
    let u = ambient::to_algebra(space, p, first);
    let e1 = vecn::normalize(&vecn::axpy(&u, -vecn::dot(&u, &n), &n)).ok_or(Error::ZeroNormal(vertex))?;
    let e2 = vecn::cross(&n, &e1);
    Ok([ambient::from_algebra(space, p, &e1), ambient::from_algebra(space, p, &e2)])
}

pub fn vertex_tangent_frames(mesh: &TriangleMesh, space: &AmbientSpace, normals: &[V4]) -> Result<Vec<[V4; 2]>> {
    (0..mesh.n_vertices())
        .map(|v| canonical_frame(space, mesh.position(v), &normals[v], v))
        .collect()
}

/// Shape operator in `frame` from principal directions and curvatures.
pub fn shape_from_principal(frame: &[V4; 2], principal: &[(V4, f64); 2]) -> Mat2 {
    let mut a = Mat2::zero();
    for (d, k) in principal {
        let c = [vecn::dot(&frame[0], d), vecn::dot(&frame[1], d)];
        for i in 0..2 {
            for j in 0..2 {
                a.0[i][j] += k * c[i] * c[j];
            }
        }
    }
    a
}

/// Flips the mesh when the majority of faces disagree with the normals.
fn align_orientation(mesh: TriangleMesh, space: &AmbientSpace, normals: &[V4]) -> Result<TriangleMesh> {
    let mut score = 0.0;
    for f in 0..mesh.n_faces() {
        let (p, a, b) = mesh.face_frame(f);
        let n = normals[mesh.faces()[f][0]];
        score += space.orientation(&p, &a, &b, &n).signum();
    }
    if score < 0.0 {
        mesh.flipped()
    } else {
        Ok(mesh)
    }
}

impl ImmersedSurface {
    /// Surface with analytic data. `shape` maps a vertex and its frame to
    /// the shape operator in that frame.
    pub fn analytic(
        name: impl Into<String>,
        mesh: TriangleMesh,
        space: AmbientSpace,
        normals: Vec<V4>,
        shape: impl Fn(usize, &[V4; 2]) -> Mat2,
        k_sigma: Vec<f64>,
    ) -> Result<Self> {
        let frames = vertex_tangent_frames(&mesh, &space, &normals)?;
        let shape_op = frames.iter().enumerate().map(|(v, f)| shape(v, f)).collect();
        Self::framed(name, mesh, space, normals, frames, shape_op, k_sigma)
    }

    /// Surface with analytic data in explicitly given vertex frames.
    pub fn framed(
        name: impl Into<String>,
        mesh: TriangleMesh,
        space: AmbientSpace,
        normals: Vec<V4>,
        frames: Vec<[V4; 2]>,
        shape_op: Vec<Mat2>,
        k_sigma: Vec<f64>,
    ) -> Result<Self> {
        let mesh = align_orientation(mesh, &space, &normals)?;
        Ok(Self {
            name: name.into(),
            mesh,
            space,
            normals,
            frames,
            shape_op,
            k_sigma,
            provenance: Provenance::Analytic,
            exact_area: None,
        })
    }

    /// Surface whose shape operator is fitted from positions and normals;
    /// `K` follows from the Gauss equation.
    pub fn fitted(name: impl Into<String>, mesh: TriangleMesh, space: AmbientSpace, normals: Vec<V4>) -> Result<Self> {
        let mesh = align_orientation(mesh, &space, &normals)?;
        let frames = vertex_tangent_frames(&mesh, &space, &normals)?;
        let shape_op = fit_shape_operator(&mesh, &space, &normals, &frames)?;
        let c = space.c();
        let k_sigma = shape_op.iter().map(|a| a.det() + c).collect();
        Ok(Self {
            name: name.into(),
            mesh,
            space,
            normals,
            frames,
            shape_op,
            k_sigma,
            provenance: Provenance::Fitted,
            exact_area: None,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.mesh.n_vertices()
    }

    pub fn metric(&self) -> Result<MetricData> {
        metric_quantities(&self.mesh)
    }

    pub fn with_alpha_sign(&self, sign: AlphaSign) -> Self {
        Self { space: self.space.with_alpha_sign(sign), ..self.clone() }
    }

    pub fn mean_curvature(&self, v: usize) -> f64 {
        0.5 * self.shape_op[v].trace()
    }

    pub fn extrinsic_curvature(&self, v: usize) -> f64 {
        self.shape_op[v].det()
    }

    pub fn gauss_map(&self, v: usize) -> Result<V3> {
        ambient::gauss_map(&self.space, self.mesh.position(v), &self.normals[v])
    }

    /// Frame vectors left-translated to the Lie algebra.
    pub fn algebra_frame(&self, v: usize) -> [V3; 2] {
        let p = self.mesh.position(v);
        self.frames[v].map(|e| ambient::to_algebra(&self.space, p, &e))
    }

    /// Tangent vector at `v` in ambient coordinates.
    pub fn to_ambient(&self, v: usize, xi: Vec2) -> V4 {
        let [e1, e2] = &self.frames[v];
        std::array::from_fn(|i| xi.0[0] * e1[i] + xi.0[1] * e2[i])
    }

    /// Frame coordinates of the tangential part of an ambient vector.
    pub fn to_frame(&self, v: usize, x: &V4) -> Vec2 {
        let [e1, e2] = &self.frames[v];
        Vec2::new(vecn::dot(x, e1), vecn::dot(x, e2))
    }

    /// `max_v |K_sigma - (det A + c)|`.
    pub fn gauss_equation_residual(&self) -> f64 {
        let c = self.space.c();
        self.shape_op
            .iter()
            .zip(&self.k_sigma)
            .map(|(a, k)| (k - (a.det() + c)).abs())
            .fold(0.0, f64::max)
    }

    /// `max_v |A_12 - A_21|`.
    pub fn symmetry_residual(&self) -> f64 {
        self.shape_op.iter().map(|a| a.asymmetry()).fold(0.0, f64::max)
    }

    /// Mean and population standard deviation of `H` over vertices.
    pub fn mean_curvature_stats(&self) -> (f64, f64) {
        let n = self.n_vertices() as f64;
        let h: Vec<f64> = (0..self.n_vertices()).map(|v| self.mean_curvature(v)).collect();
        let mean = h.iter().sum::<f64>() / n;
        let var = h.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    }

    /// Nominal mean curvature: the vertex mean, snapped to zero when it is
    /// below `1e-12`.
    pub fn nominal_mean_curvature(&self) -> f64 {
        let (m, _) = self.mean_curvature_stats();
        if m.abs() < 1e-12 {
            0.0
        } else {
            m
        }
    }

    /// Rotates every frame by the given angle and re-expresses `A`.
    pub fn rotate_frames(&self, thetas: &[f64]) -> Self {
        let mut out = self.clone();
        for (v, &t) in thetas.iter().enumerate() {
            let [e1, e2] = self.frames[v];
            let (s, c) = t.sin_cos();
            out.frames[v] = [
                std::array::from_fn(|i| c * e1[i] + s * e2[i]),
                std::array::from_fn(|i| -s * e1[i] + c * e2[i]),
            ];
            out.shape_op[v] = self.shape_op[v].in_rotated_frame(t);
        }
        out
    }

    pub fn to_document(&self) -> MeshDocument {
        let mut doc = MeshDocument::from_mesh(&self.mesh, &self.space);
        let four = matches!(self.space, AmbientSpace::Sphere3 { .. });
        doc.name = Some(self.name.clone());
        doc.normal = Some(
            self.normals
                .iter()
                .map(|n| if four { n.to_vec() } else { n[..3].to_vec() })
                .collect(),
        );
        doc.frame = Some(
            self.frames
                .iter()
                .map(|[e1, _]| if four { e1.to_vec() } else { e1[..3].to_vec() })
                .collect(),
        );
        doc.shape_op = Some(self.shape_op.iter().map(|a| a.0).collect());
        doc.mean_curvature = Some((0..self.n_vertices()).map(|v| self.mean_curvature(v)).collect());
        doc.gauss_curvature = Some(self.k_sigma.clone());
        doc
    }

    /// Rebuilds a surface from a mesh document. Missing normals are
    /// estimated and a missing shape operator is fitted.
    pub fn from_document(doc: &MeshDocument) -> Result<Self> {
        let mesh = doc.mesh()?;
        let space = doc.ambient_space()?;
        let name = doc.name.clone().unwrap_or_else(|| "mesh".into());
        let normals = match &doc.normal {
            Some(ns) => {
                if ns.len() != mesh.n_vertices() {
                    return Err(Error::Parse("normal count differs from vertex count".into()));
                }
                ns.iter()
                    .enumerate()
                    .map(|(v, n)| vecn::normalize(&vec4(n, "normal", v)?).ok_or(Error::ZeroNormal(v)))
                    .collect::<Result<Vec<_>>>()?
            }
            None => estimate_normals(&mesh, &space)?,
        };
        match &doc.shape_op {
            Some(ops) => {
                if ops.len() != mesh.n_vertices() {
                    return Err(Error::Parse("shape_op count differs from vertex count".into()));
                }
                let c = space.c();
                let k = match &doc.gauss_curvature {
                    Some(k) if k.len() == ops.len() => k.clone(),
                    _ => ops.iter().map(|a| Mat2(*a).det() + c).collect(),
                };
                let frames = match &doc.frame {
                    Some(fs) => {
                        if fs.len() != mesh.n_vertices() {
                            return Err(Error::Parse("frame count differs from vertex count".into()));
                        }
                        fs.iter()
                            .enumerate()
                            .map(|(v, f)| {
                                let f4 = vec4(f, "frame", v)?;
                                frame_from_first(&space, mesh.position(v), &normals[v], &f4, v)
                            })
                            .collect::<Result<Vec<_>>>()?
                    }
                    None => vertex_tangent_frames(&mesh, &space, &normals)?,
                };
                let ops = ops.iter().map(|a| Mat2(*a)).collect();
                ImmersedSurface::framed(name, mesh, space, normals, frames, ops, k)
            }
            None if doc.frame.is_some() => Err(Error::Parse("frame given without shape_op".into())),
            None => ImmersedSurface::fitted(name, mesh, space, normals),
        }
    }
}

fn vec4(x: &[f64], what: &str, v: usize) -> Result<V4> {
    match x.len() {
        3 => Ok([x[0], x[1], x[2], 0.0]),
        4 => Ok([x[0], x[1], x[2], x[3]]),
        n => Err(Error::Parse(format!("{what} {v} has {n} entries"))),
    }
}

#[cfg(test)]
mod tests;
