use faer::linalg::solvers::SolveLstsq;
use faer::Mat;

use crate::ambient::AmbientSpace;
use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;
use crate::tangent::Mat2;
use crate::vecn::{self, V4};

/// Oriented face normal at `p` for edge vectors `a`, `b`: the vector `n`
/// with `<n, x> = orientation(p, a, b, x)`. Its length is twice the face
/// area for tangent edges.
pub fn face_normal(space: &AmbientSpace, p: &V4, a: &V4, b: &V4) -> V4 {
    std::array::from_fn(|i| {
        let mut e = [0.0; 4];
        e[i] = 1.0;
        space.orientation(p, a, b, &e)
    })
}

/// Area-weighted vertex normals consistent with the mesh orientation.
pub fn estimate_normals(mesh: &TriangleMesh, space: &AmbientSpace) -> Result<Vec<V4>> {
    let mut acc = vec![[0.0; 4]; mesh.n_vertices()];
    for (f, tri) in mesh.faces().iter().enumerate() {
        let (_, a, b) = mesh.face_frame(f);
        for &v in tri {
            let n = face_normal(space, mesh.position(v), &a, &b);
            acc[v] = vecn::add(&acc[v], &n);
        }
    }
    acc.iter()
        .enumerate()
        .map(|(v, n)| {
            let n = match space {
                AmbientSpace::Sphere3 { .. } => {
                    let p = mesh.position(v);
                    vecn::axpy(n, -vecn::dot(n, p), p)
                }
                _ => *n,
            };
            vecn::normalize(&n).ok_or(Error::ZeroNormal(v))
        })
        .collect()
}

/// Per-vertex shape operator from a least-squares quadratic height fit
/// `h = a x^2/2 + b x y + c y^2/2 + d x + e y` over the one-ring, with
/// `(x, y)` frame coordinates and `h` the offset along the normal.
pub fn fit_shape_operator(
    mesh: &TriangleMesh,
    _space: &AmbientSpace,
    normals: &[V4],
    frames: &[[V4; 2]],
) -> Result<Vec<Mat2>> {
    (0..mesh.n_vertices())
        .map(|v| {
            let nb = mesh.neighbors(v);
            let [e1, e2] = frames[v];
            let mut pts: Vec<[f64; 3]> = Vec::with_capacity(nb.len());
            let mut dirs: Vec<f64> = Vec::new();
            for q in nb {
                let d = mesh.edge_vector(v, q);
                let (x, y, h) = (vecn::dot(&d, &e1), vecn::dot(&d, &e2), vecn::dot(&d, &normals[v]));
                let ang = y.atan2(x);
                if !dirs.iter().any(|a| {
                    let diff = (a - ang).abs();
                    diff.min(std::f64::consts::TAU - diff) < 1e-6
                }) {
                    dirs.push(ang);
                }
                pts.push([x, y, h]);
            }
            if dirs.len() < 5 {
                return Err(Error::InsufficientNeighbors { vertex: v, directions: dirs.len() });
            }
            let m = Mat::from_fn(pts.len(), 5, |i, j| {
                let [x, y, _] = pts[i];
                [0.5 * x * x, x * y, 0.5 * y * y, x, y][j]
            });
            let rhs = Mat::from_fn(pts.len(), 1, |i, _| pts[i][2]);
            let sol = m.qr().solve_lstsq(&rhs);
            let (a, b, c) = (sol[(0, 0)], sol[(1, 0)], sol[(2, 0)]);
            if !(a.is_finite() && b.is_finite() && c.is_finite()) {
                return Err(Error::InsufficientNeighbors { vertex: v, directions: dirs.len() });
            }
            Ok(Mat2::new(a, b, b, c))
        })
        .collect()
}
