//! Cut-off test fields `phi xi` on bordered meshes.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use faer::Mat;
use serde::Serialize;

use super::{IndexForm, Variant};
use crate::error::{Error, Result};
use crate::hodge::{barycentric_gradients, OneForm, TangentField};
use crate::linalg::generalized_eigen_dense;
use crate::mesh::TriangleMesh;
use crate::tangent::Mat2;
use crate::vecn;
use crate::zoo::ImmersedSurface;

#[derive(Clone, Copy, Debug, PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Dist {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&o.0)
    }
}

/// Edge-graph distance from `seed`.
pub fn graph_distance(mesh: &TriangleMesh, seed: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; mesh.n_vertices()];
    let mut heap = BinaryHeap::new();
    dist[seed] = 0.0;
    heap.push(Reverse((Dist(0.0), seed)));
    while let Some(Reverse((Dist(d), v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for q in mesh.neighbors(v) {
            let nd = d + vecn::norm(&mesh.edge_vector(v, q));
            if nd < dist[q] {
                dist[q] = nd;
                heap.push(Reverse((Dist(nd), q)));
            }
        }
    }
    dist
}

/// Radial tent `max(0, 1 - d / rho)` in graph distance from `seed`.
pub fn tent_cutoff(mesh: &TriangleMesh, seed: usize, rho: f64) -> Result<Vec<f64>> {
    if !(rho > 0.0) || seed >= mesh.n_vertices() {
        return Err(Error::BadParameter(format!("tent cut-off needs rho > 0 and a valid seed, got {rho}, {seed}")));
    }
    Ok(graph_distance(mesh, seed).iter().map(|d| (1.0 - d / rho).max(0.0)).collect())
}

/// `phi` must vanish on boundary vertices and their one-rings.
pub fn check_compact_support(mesh: &TriangleMesh, phi: &[f64]) -> Result<()> {
    for (v, b) in mesh.boundary_vertices().into_iter().enumerate() {
        if !b {
            continue;
        }
        if phi[v] != 0.0 {
            return Err(Error::NotCompactlySupported(v));
        }
        if let Some(q) = mesh.neighbors(v).into_iter().find(|q| phi[*q] != 0.0) {
            return Err(Error::NotCompactlySupported(q));
        }
    }
    Ok(())
}

/// Weak-form value of `D2` along `phi xi` beside the terms of its
/// product-rule decomposition for harmonic `xi`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CutoffTerms {
    pub weak: f64,
    /// `int |grad phi|^2 |xi|^2`.
    pub gradient: f64,
    /// `-int 4H^2 phi^2 |xi|^2`.
    pub mean_curvature: f64,
    /// `-int c phi^2 |xi|^2`.
    pub ambient: f64,
    /// `int phi^2 2H <A xi, xi>`.
    pub shape: f64,
    /// `-int phi^2 <A xi, alpha xi>`.
    pub alpha: f64,
}

impl CutoffTerms {
    pub fn decomposition(&self, v: Variant) -> f64 {
        let k = match v {
            Variant::Single => 1.0,
            Variant::Double => 2.0,
        };
        self.gradient + self.mean_curvature + k * self.ambient + self.shape + k * self.alpha
    }

    pub fn relative_error(&self, v: Variant) -> f64 {
        let d = self.decomposition(v);
        (self.weak - d).abs() / d.abs().max(f64::MIN_POSITIVE)
    }
}

fn scaled(phi: &[f64], xi: &TangentField) -> TangentField {
    TangentField(xi.0.iter().zip(phi).map(|(x, p)| *x * *p).collect())
}

fn decompose(form: &IndexForm<'_>, xi: &TangentField, phi: &[f64]) -> Result<CutoffTerms> {
    let surface = form.surface;
    let mesh = &surface.mesh;
    let mut gradient = 0.0;
    for (f, tri) in mesh.faces().iter().enumerate() {
        let g = barycentric_gradients(mesh, f)?;
        let grad = (0..3).fold([0.0; 4], |acc, k| vecn::axpy(&acc, phi[tri[k]], &g[k]));
        let xi2 = tri.iter().map(|v| xi.0[*v].norm_sq()).sum::<f64>() / 3.0;
        gradient += form.metric.face_area[f] * vecn::dot(&grad, &grad) * xi2;
    }
    let c = surface.space.c();
    let alpha = Mat2::j() * form.gm.lambda;
    let mut t = CutoffTerms { gradient, ..Default::default() };
    for (v, x) in xi.0.iter().enumerate() {
        let w = form.area(v) * phi[v] * phi[v];
        let a = surface.shape_op[v];
        let h = 0.5 * a.trace();
        let ax = a.apply(*x);
        t.mean_curvature -= w * 4.0 * h * h * x.norm_sq();
        t.ambient -= w * c * x.norm_sq();
        t.shape += w * 2.0 * h * ax.dot(*x);
        t.alpha -= w * ax.dot(alpha.apply(*x));
    }
    Ok(t)
}

pub fn cutoff_second_variation(surface: &ImmersedSurface, w: &OneForm, phi: &[f64]) -> Result<CutoffTerms> {
    check_compact_support(&surface.mesh, phi)?;
    let form = IndexForm::new(surface)?;
    let xi = form.sharp(w);
    let mut t = decompose(&form, &xi, phi)?;
    t.weak = form.value(&form.flat(&scaled(phi, &xi)));
    Ok(t)
}

/// `D2(phi xi) + D2(phi J xi)` against
/// `-k int phi^2 |xi|^2 + 2 int |grad phi|^2 |xi|^2` for both variants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CutoffPairing {
    pub d2_xi: f64,
    pub d2_perp: f64,
    pub sum: f64,
    pub predicted_single: f64,
    pub predicted_double: f64,
}

impl CutoffPairing {
    pub fn relative_error(&self, v: Variant) -> f64 {
        let p = match v {
            Variant::Single => self.predicted_single,
            Variant::Double => self.predicted_double,
        };
        (self.sum - p).abs() / p.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn cutoff_pairing(surface: &ImmersedSurface, w: &OneForm, phi: &[f64]) -> Result<CutoffPairing> {
    check_compact_support(&surface.mesh, phi)?;
    let form = IndexForm::new(surface)?;
    let xi = form.sharp(w);
    let perp = TangentField(xi.0.iter().map(|x| x.rot90()).collect());
    let d2_xi = form.value(&form.flat(&scaled(phi, &xi)));
    let d2_perp = form.value(&form.flat(&scaled(phi, &perp)));
    let t = decompose(&form, &xi, phi)?;
    let h_part = -t.mean_curvature;
    let c_part = -t.ambient;
    Ok(CutoffPairing {
        d2_xi,
        d2_perp,
        sum: d2_xi + d2_perp,
        predicted_single: -(h_part + 2.0 * c_part) + 2.0 * t.gradient,
        predicted_double: -(h_part + 4.0 * c_part) + 2.0 * t.gradient,
    })
}

/// Negative directions of the form restricted to `span{phi xi_i}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutoffIndexCount {
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
    pub negative: usize,
    pub bound_required: bool,
    /// `2 * negative >= dim`, or the bound does not apply.
    pub satisfied: bool,
}

pub fn cutoff_index_count(surface: &ImmersedSurface, forms: &[OneForm], phi: &[f64]) -> Result<CutoffIndexCount> {
    check_compact_support(&surface.mesh, phi)?;
    let form = IndexForm::new(surface)?;
    let tests: Vec<OneForm> = forms.iter().map(|w| form.flat(&scaled(phi, &form.sharp(w)))).collect();
    let fields: Vec<TangentField> = forms.iter().map(|w| scaled(phi, &form.sharp(w))).collect();
    let n = tests.len();
    let diag: Vec<f64> = tests.iter().map(|w| form.value(w)).collect();
    let q = Mat::from_fn(n, n, |i, j| {
        if i == j {
            diag[i]
        } else {
            0.5 * (form.value(&tests[i].axpy(1.0, &tests[j])) - diag[i] - diag[j])
        }
    });
    let m = Mat::from_fn(n, n, |i, j| form.field_inner(&fields[i], &fields[j]));
    let eigenvalues = if n == 0 { vec![] } else { generalized_eigen_dense(q.as_ref(), m.as_ref())?.values };
    let scale = eigenvalues.iter().fold(0.0, |a: f64, e| a.max(e.abs()));
    let eps = super::negative_tolerance(scale, form.metric.total_area());
    let negative = eigenvalues.iter().filter(|e| **e < -eps).count();
    let bound_required = surface.space.c() > 0.0 || surface.nominal_mean_curvature() != 0.0;
    Ok(CutoffIndexCount { dim: n, eigenvalues, negative, bound_required, satisfied: !bound_required || 2 * negative >= n })
}
