//! Small reference meshes and grid connectivity.

use std::collections::HashMap;

use super::TriangleMesh;
use crate::vecn::{self, V4};

/// Triangles of an `nu x nv` vertex grid with vertex `(i, j)` at index
/// `i * nv + j`. Each quad is split along the `(i, j) - (i+1, j+1)` diagonal.
pub fn grid_faces(nu: usize, nv: usize, wrap_u: bool, wrap_v: bool) -> Vec<[usize; 3]> {
    let qu = if wrap_u { nu } else { nu - 1 };
    let qv = if wrap_v { nv } else { nv - 1 };
    let idx = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut faces = Vec::with_capacity(2 * qu * qv);
    for i in 0..qu {
        for j in 0..qv {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    faces
}

pub fn octahedron() -> TriangleMesh {
    let p = vec![
        [1.0, 0.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, -1.0, 0.0],
    ];
    let f = vec![[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4], [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]];
    TriangleMesh::new(p, f, None).expect("octahedron")
}

pub fn icosahedron() -> TriangleMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let p = raw.iter().map(|v| vecn::to4(&vecn::normalize(v).unwrap())).collect();
    let f = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    TriangleMesh::new(p, f, None).expect("icosahedron")
}

/// Unit icosphere after `levels` midpoint subdivisions.
pub fn icosphere(levels: usize) -> TriangleMesh {
    let mut m = icosahedron();
    for _ in 0..levels {
        let s = m.subdivide_midpoint().expect("subdivision");
        let p = s.positions().iter().map(|v| vecn::normalize(v).unwrap()).collect();
        m = s.with_positions(p);
    }
    m
}

/// Torus of revolution (radii 2 and 1) on an `nu x nv` grid.
pub fn torus_grid_combinatorial(nu: usize, nv: usize) -> TriangleMesh {
    let mut p = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = std::f64::consts::TAU * i as f64 / nu as f64;
        for j in 0..nv {
            let v = std::f64::consts::TAU * j as f64 / nv as f64;
            let r = 2.0 + v.cos();
            p.push([r * u.cos(), r * u.sin(), v.sin(), 0.0]);
        }
    }
    TriangleMesh::new(p, grid_faces(nu, nv, true, true), None).expect("torus grid")
}

/// Open unit cylinder with `nu` vertices around and `nv` rings.
pub fn cylinder_grid_combinatorial(nu: usize, nv: usize) -> TriangleMesh {
    let mut p = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = std::f64::consts::TAU * i as f64 / nu as f64;
        for j in 0..nv {
            p.push([u.cos(), u.sin(), j as f64 / (nv - 1).max(1) as f64, 0.0]);
        }
    }
    TriangleMesh::new(p, grid_faces(nu, nv, true, false), None).expect("cylinder grid")
}

/// Boundary of a 5 x 3 x 1 slab of unit cubes with cubes `(1, 1)` and `(3, 1)`
/// removed: a closed genus-2 surface. `levels - 1` midpoint subdivisions are
/// applied after the base triangulation.
pub fn double_torus(levels: usize) -> TriangleMesh {
    let present = |x: i64, y: i64, z: i64| {
        (0..5).contains(&x) && (0..3).contains(&y) && z == 0 && !(y == 1 && (x == 1 || x == 3))
    };
    let mut index: HashMap<[i64; 3], usize> = HashMap::new();
    let mut positions: Vec<V4> = Vec::new();
    let mut faces = Vec::new();
    let mut vid = |c: [i64; 3], positions: &mut Vec<V4>| {
        *index.entry(c).or_insert_with(|| {
            positions.push([c[0] as f64, c[1] as f64, c[2] as f64, 0.0]);
            positions.len() - 1
        })
    };
    for x in 0..5 {
        for y in 0..3 {
            let z = 0;
            if !present(x, y, z) {
                continue;
            }
            for ax in 0..3 {
                for s in [-1i64, 1] {
                    let mut nb = [x, y, z];
                    nb[ax] += s;
                    if present(nb[0], nb[1], nb[2]) {
                        continue;
                    }
                    let (u, v) = ((ax + 1) % 3, (ax + 2) % 3);
                    let mut base = [x, y, z];
                    if s > 0 {
                        base[ax] += 1;
                    }
                    let mut bu = base;
                    bu[u] += 1;
                    let mut buv = bu;
                    buv[v] += 1;
                    let mut bv = base;
                    bv[v] += 1;
                    let mut q = [base, bu, buv, bv].map(|c| vid(c, &mut positions));
                    if s < 0 {
                        q.reverse();
                    }
                    faces.push([q[0], q[1], q[2]]);
                    faces.push([q[0], q[2], q[3]]);
                }
            }
        }
    }
    let mut m = TriangleMesh::new(positions, faces, None).expect("double torus");
    for _ in 1..levels.max(1) {
        m = m.subdivide_midpoint().expect("subdivision");
    }
    m
}
