//! Discrete exterior calculus on a triangle mesh: the incidence operators,
//! the diagonal Hodge stars, Whitney sharp and midpoint flat, and the space
//! of discrete harmonic 1-forms.
//!
//! Edge `e = [a, b]` is oriented from `a` to `b` with `a < b`. Stars are
//! `star0 = vertex area`, `star1 = cotan weight`, `star2 = 1 / face area`.
//! The codifferential is `delta = star0^-1 d0^T star1`, the adjoint of `d0`
//! in the star inner products.

mod harmonic;

pub use harmonic::{harmonic_basis, harmonic_basis_on, HarmonicBasis, HARMONIC_TOL};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{SparseMat, TripletBuilder};
use crate::mesh::{MetricData, TriangleMesh};
use crate::tangent::Vec2;
use crate::vecn::{self, V4};
use crate::zoo::ImmersedSurface;

/// Edge values of a primal 1-form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneForm(pub Vec<f64>);

/// Tangent vectors in the vertex frames.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentField(pub Vec<Vec2>);

impl OneForm {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.iter().map(|x| s * x).collect())
    }

    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }
}

/// Incidence data and diagonal stars for one mesh.
#[derive(Clone, Debug)]
pub struct Dec {
    pub edges: Vec<[usize; 2]>,
    /// Per face: edge index and orientation sign of each side.
    pub face_edges: Vec<[(usize, f64); 3]>,
    /// Per vertex: incident edges with the `d0^T` sign (+1 at the head).
    pub vertex_edges: Vec<Vec<(usize, f64)>>,
    pub star0: Vec<f64>,
    pub star1: Vec<f64>,
    pub star2: Vec<f64>,
    /// Lumped Whitney mass: `sum over adjacent faces of 2 A_f / (3 |e|^2)`.
    pub edge_mass: Vec<f64>,
    pub mean_edge_length: f64,
}

impl Dec {
    pub fn new(mesh: &TriangleMesh, metric: &MetricData) -> Self {
        let edges = mesh.edges().to_vec();
        let face_edges = (0..mesh.n_faces())
            .map(|f| std::array::from_fn(|k| (mesh.he_edge(3 * f + k), mesh.he_sign(3 * f + k))))
            .collect();
        let mut vertex_edges = vec![Vec::new(); mesh.n_vertices()];
        for (e, [a, b]) in edges.iter().enumerate() {
            vertex_edges[*a].push((e, -1.0));
            vertex_edges[*b].push((e, 1.0));
        }
        let mut edge_mass = vec![0.0; edges.len()];
        for (f, &area) in metric.face_area.iter().enumerate() {
            for k in 0..3 {
                let e = mesh.he_edge(3 * f + k);
                let l = metric.edge_length[e];
                edge_mass[e] += 2.0 * area / (3.0 * l * l);
            }
        }
        Self {
            edges,
            face_edges,
            vertex_edges,
            star0: metric.vertex_area.clone(),
            star1: metric.cot_weight.clone(),
            star2: metric.face_area.iter().map(|a| 1.0 / a).collect(),
            edge_mass,
            mean_edge_length: metric.mean_edge_length,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.star0.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_faces(&self) -> usize {
        self.star2.len()
    }

    pub fn d0(&self, phi: &[f64]) -> OneForm {
        OneForm(self.edges.iter().map(|[a, b]| phi[*b] - phi[*a]).collect())
    }

    pub fn d1(&self, w: &OneForm) -> Vec<f64> {
        self.face_edges
            .iter()
            .map(|fe| fe.iter().map(|(e, s)| s * w.0[*e]).sum())
            .collect()
    }

    /// `d0^T` applied to edge values.
    pub fn d0_transpose(&self, y: &[f64]) -> Vec<f64> {
        self.vertex_edges
            .iter()
            .map(|ve| ve.iter().map(|(e, s)| s * y[*e]).sum())
            .collect()
    }

    pub fn delta(&self, w: &OneForm) -> Vec<f64> {
        let y: Vec<f64> = w.0.iter().zip(&self.star1).map(|(x, s)| x * s).collect();
        self.d0_transpose(&y).iter().zip(&self.star0).map(|(x, a)| x / a).collect()
    }

    pub fn inner0(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).zip(&self.star0).map(|((x, y), s)| x * y * s).sum()
    }

    /// Star-1 pairing; indefinite when some cotan weights are negative.
    pub fn inner1(&self, a: &OneForm, b: &OneForm) -> f64 {
        a.0.iter().zip(&b.0).zip(&self.star1).map(|((x, y), s)| x * y * s).sum()
    }

    pub fn inner2(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).zip(&self.star2).map(|((x, y), s)| x * y * s).sum()
    }

    /// Lumped Whitney norm squared.
    pub fn mass_norm2(&self, w: &OneForm) -> f64 {
        w.0.iter().zip(&self.edge_mass).map(|(x, m)| x * x * m).sum()
    }

    pub fn d1_norm2(&self, w: &OneForm) -> f64 {
        let c = self.d1(w);
        self.inner2(&c, &c)
    }

    pub fn delta_norm2(&self, w: &OneForm) -> f64 {
        let c = self.delta(w);
        self.inner0(&c, &c)
    }

    /// Symmetric 1-form Laplacian
    /// `d1^T star2 d1 + star1 d0 star0^-1 d0^T star1`, positive semidefinite
    /// for any sign of the cotan weights.
    pub fn laplacian1(&self) -> Result<SparseMat> {
        let mut t = TripletBuilder::new(self.n_edges());
        for (fe, s2) in self.face_edges.iter().zip(&self.star2) {
            let idx = fe.map(|(e, _)| e);
            let sg = fe.map(|(_, s)| s);
            t.push_outer(&idx, &sg, &sg, *s2);
        }
        for (ve, a) in self.vertex_edges.iter().zip(&self.star0) {
            let idx: Vec<usize> = ve.iter().map(|(e, _)| *e).collect();
            let c: Vec<f64> = ve.iter().map(|(e, s)| s * self.star1[*e]).collect();
            t.push_outer(&idx, &c, &c, 1.0 / a);
        }
        t.build()
    }

    /// Scale-free harmonicity residual `hbar (|d1 w| + |delta w|) / |w|`
    /// with `hbar` the mean edge length.
    pub fn harmonic_residual(&self, w: &OneForm) -> f64 {
        let n = self.mass_norm2(w).sqrt();
        if n == 0.0 {
            return 0.0;
        }
        self.mean_edge_length * (self.d1_norm2(w).sqrt() + self.delta_norm2(w).sqrt()) / n
    }
}

/// Barycentric coordinate gradients of face `f` in ambient coordinates, in
/// corner order. They lie in the span of the face edges.
pub fn barycentric_gradients(mesh: &TriangleMesh, f: usize) -> Result<[V4; 3]> {
    let (_, u, w) = mesh.face_frame(f);
    let (uu, uw, ww) = (vecn::dot(&u, &u), vecn::dot(&u, &w), vecn::dot(&w, &w));
    let det = uu * ww - uw * uw;
    if !(det > 1e-28 * uu.max(ww).powi(2)) {
        return Err(Error::DegenerateFace { face: f, area: 0.5 * det.max(0.0).sqrt() });
    }
    let g1: V4 = std::array::from_fn(|i| (ww * u[i] - uw * w[i]) / det);
    let g2: V4 = std::array::from_fn(|i| (uu * w[i] - uw * u[i]) / det);
    let g0 = std::array::from_fn(|i| -g1[i] - g2[i]);
    Ok([g0, g1, g2])
}

/// Linear map from edge values to ambient vertex vectors: the Whitney field
/// at each face barycenter, averaged over the vertex star with weights
/// `A_f / 3`.
#[derive(Clone, Debug)]
pub struct Sharp {
    rows: Vec<Vec<(usize, V4)>>,
}

impl Sharp {
    pub fn new(mesh: &TriangleMesh, metric: &MetricData) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, V4)>> = vec![Vec::new(); mesh.n_vertices()];
        let mut weight = vec![0.0; mesh.n_vertices()];
        for (f, tri) in mesh.faces().iter().enumerate() {
            let g = barycentric_gradients(mesh, f)?;
            let wf = metric.face_area[f] / 3.0;
            // face field = sum_k s_k w_e (g_{k+1} - g_k) / 3
            let coeffs: [(usize, V4); 3] = std::array::from_fn(|k| {
                let h = 3 * f + k;
                let s = mesh.he_sign(h) / 3.0;
                (mesh.he_edge(h), vecn::scale(&vecn::sub(&g[(k + 1) % 3], &g[k]), s))
            });
            for &v in tri {
                weight[v] += wf;
                for (e, c) in &coeffs {
                    rows[v].push((*e, vecn::scale(c, wf)));
                }
            }
        }
        for (row, w) in rows.iter_mut().zip(&weight) {
            row.sort_by_key(|(e, _)| *e);
            let mut merged: Vec<(usize, V4)> = Vec::with_capacity(row.len());
            for (e, c) in row.drain(..) {
                match merged.last_mut() {
                    Some((last, acc)) if *last == e => *acc = vecn::add(acc, &c),
                    _ => merged.push((e, c)),
                }
            }
            *row = merged.into_iter().map(|(e, c)| (e, vecn::scale(&c, 1.0 / w))).collect();
        }
        Ok(Self { rows })
    }

    /// Sparse stencil of vertex `v`: `(edge, ambient coefficient)`.
    pub fn row(&self, v: usize) -> &[(usize, V4)] {
        &self.rows[v]
    }

    pub fn apply_ambient(&self, w: &OneForm) -> Vec<V4> {
        self.rows
            .iter()
            .map(|row| row.iter().fold([0.0; 4], |acc, (e, c)| vecn::axpy(&acc, w.0[*e], c)))
            .collect()
    }

    /// Stencils projected onto the vertex frames of `surface`.
    pub fn framed_rows(&self, surface: &ImmersedSurface) -> Vec<Vec<(usize, Vec2)>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(v, row)| row.iter().map(|(e, c)| (*e, surface.to_frame(v, c))).collect())
            .collect()
    }
}

/// Frame components of the Whitney sharp of `w`.
pub fn sharp(surface: &ImmersedSurface, metric: &MetricData, w: &OneForm) -> Result<TangentField> {
    let amb = Sharp::new(&surface.mesh, metric)?.apply_ambient(w);
    Ok(TangentField(amb.iter().enumerate().map(|(v, x)| surface.to_frame(v, x)).collect()))
}

/// Midpoint flat of an ambient vertex field: `<(X_a + X_b) / 2, b - a>`.
pub fn flat_ambient(mesh: &TriangleMesh, field: &[V4]) -> OneForm {
    OneForm(
        mesh.edges()
            .iter()
            .map(|[a, b]| 0.5 * vecn::dot(&vecn::add(&field[*a], &field[*b]), &mesh.edge_vector(*a, *b)))
            .collect(),
    )
}

pub fn flat(surface: &ImmersedSurface, field: &TangentField) -> OneForm {
    let amb: Vec<V4> = field.0.iter().enumerate().map(|(v, x)| surface.to_ambient(v, *x)).collect();
    flat_ambient(&surface.mesh, &amb)
}

/// Pointwise rotation by `J`: `(a, b) -> (-b, a)` in each frame.
pub fn j_rotate(field: &TangentField) -> TangentField {
    TangentField(field.0.iter().map(|x| x.rot90()).collect())
}

/// Dual-edge values of the flat of a tangent field: the field averaged at
/// the edge, paired with the dual edge vector `w_e J e`.
pub fn flat_dual(surface: &ImmersedSurface, metric: &MetricData, field: &TangentField) -> Vec<f64> {
    let mesh = &surface.mesh;
    mesh.edges()
        .iter()
        .enumerate()
        .map(|(e, [a, b])| {
            let d = mesh.edge_vector(*a, *b);
            let ja = surface.to_ambient(*a, surface.to_frame(*a, &d).rot90());
            let jb = surface.to_ambient(*b, surface.to_frame(*b, &d).rot90());
            let xa = surface.to_ambient(*a, field.0[*a]);
            let xb = surface.to_ambient(*b, field.0[*b]);
            0.25 * metric.cot_weight[e] * vecn::dot(&vecn::add(&xa, &xb), &vecn::add(&ja, &jb))
        })
        .collect()
}
