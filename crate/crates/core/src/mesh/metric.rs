use super::TriangleMesh;
use crate::error::{Error, Result};
use crate::vecn;

/// Intrinsic discrete metric of a triangle mesh. Everything is computed from
/// edge vectors, so it works unchanged for meshes in R^4 and on flat tori.
#[derive(Clone, Debug)]
pub struct MetricData {
    pub face_area: Vec<f64>,
    /// Interior angle at corner `k` of face `f`, stored at index `3f + k`.
    pub corner_angle: Vec<f64>,
    /// Cotangent of the corner angle, same layout.
    pub corner_cot: Vec<f64>,
    pub edge_length: Vec<f64>,
    /// `(cot a + cot b) / 2` over the corners opposite each edge.
    pub cot_weight: Vec<f64>,
    /// Mixed Voronoi area; the areas sum to the total face area.
    pub vertex_area: Vec<f64>,
    /// `2 pi - sum of angles` at interior vertices, `pi - sum` on the boundary.
    pub angle_defect: Vec<f64>,
    pub mean_edge_length: f64,
}

impl MetricData {
    pub fn total_area(&self) -> f64 {
        self.face_area.iter().sum()
    }
}

pub fn metric_quantities(mesh: &TriangleMesh) -> Result<MetricData> {
    let nf = mesh.n_faces();
    let mut face_area = vec![0.0; nf];
    let mut corner_angle = vec![0.0; 3 * nf];
    let mut corner_cot = vec![0.0; 3 * nf];
    let mut vertex_area = vec![0.0; mesh.n_vertices()];

    let mut lengths = 0.0;
    for (f, tri) in mesh.faces().iter().enumerate() {
        let ev = [
            mesh.edge_vector(tri[0], tri[1]),
            mesh.edge_vector(tri[1], tri[2]),
            mesh.edge_vector(tri[2], tri[0]),
        ];
        let l2 = ev.map(|e| vecn::dot(&e, &e));
        lengths += l2.iter().map(|x| x.sqrt()).sum::<f64>();
        // Gram determinant of two edges from corner 0
        let g = vecn::dot(&ev[0], &ev[2]);
        let twice = (l2[0] * l2[2] - g * g).max(0.0).sqrt();
        let area = 0.5 * twice;
        let scale = l2.iter().cloned().fold(0.0, f64::max);
        if !(area > 1e-14 * scale) {
            return Err(Error::DegenerateFace { face: f, area });
        }
        face_area[f] = area;
        for k in 0..3 {
            // corner k sits between the outgoing edge k and incoming edge k+2
            let a = ev[k];
            let b = ev[(k + 2) % 3];
            let d = -vecn::dot(&a, &b);
            corner_angle[3 * f + k] = twice.atan2(d);
            corner_cot[3 * f + k] = d / twice;
        }
        let obtuse = (0..3).find(|&k| corner_angle[3 * f + k] > std::f64::consts::FRAC_PI_2);
        for k in 0..3 {
            let v = tri[k];
            vertex_area[v] += match obtuse {
                None => {
                    // Voronoi part: edges k (to k+1) and k+2 (from k+2)
                    0.125 * (l2[k] * corner_cot[3 * f + (k + 2) % 3] + l2[(k + 2) % 3] * corner_cot[3 * f + (k + 1) % 3])
                }
                Some(o) if o == k => 0.5 * area,
                Some(_) => 0.25 * area,
            };
        }
    }

    let ne = mesh.n_edges();
    let mut cot_weight = vec![0.0; ne];
    let mut edge_length = vec![0.0; ne];
    for h in 0..mesh.n_halfedges() {
        let e = mesh.he_edge(h);
        // the corner opposite halfedge k is corner k+2
        let f = h / 3;
        let k = h % 3;
        cot_weight[e] += 0.5 * corner_cot[3 * f + (k + 2) % 3];
    }
    for (e, [a, b]) in mesh.edges().iter().enumerate() {
        edge_length[e] = vecn::norm(&mesh.edge_vector(*a, *b));
    }

    let boundary = mesh.boundary_vertices();
    let mut angle_defect: Vec<f64> = boundary
        .iter()
        .map(|&b| if b { std::f64::consts::PI } else { std::f64::consts::TAU })
        .collect();
    for (f, tri) in mesh.faces().iter().enumerate() {
        for k in 0..3 {
            angle_defect[tri[k]] -= corner_angle[3 * f + k];
        }
    }

    Ok(MetricData {
        face_area,
        corner_angle,
        corner_cot,
        edge_length,
        cot_weight,
        vertex_area,
        angle_defect,
        mean_edge_length: lengths / (3 * nf).max(1) as f64,
    })
}
