//! Oriented manifold triangle meshes with halfedge connectivity.
//!
//! Halfedge `3f + k` runs from `faces[f][k]` to `faces[f][(k + 1) % 3]`, so
//! `next` and `prev` are arithmetic and only the twin map is stored.
//! Undirected edges are stored once with canonical orientation `a < b`;
//! discrete 1-forms are indexed by these edges.

pub mod builders;
pub mod io;
mod metric;

pub use metric::{metric_quantities, MetricData};

use std::collections::HashMap;

use crate::ambient::Lattice;
use crate::error::{Error, Result};
use crate::vecn::{self, V4};

const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct TriangleMesh {
    positions: Vec<V4>,
    faces: Vec<[usize; 3]>,
    lattice: Option<Lattice>,
    twin: Vec<usize>,
    he_edge: Vec<usize>,
    edges: Vec<[usize; 2]>,
    edge_he: Vec<[usize; 2]>,
    vertex_out: Vec<usize>,
}

impl TriangleMesh {
    /// Builds connectivity, propagating a consistent orientation from the
    /// first face of every connected component.
    pub fn new(positions: Vec<V4>, faces: Vec<[usize; 3]>, lattice: Option<Lattice>) -> Result<Self> {
        let nv = positions.len();
        for (f, tri) in faces.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::Parse(format!("face {f} references a vertex out of range")));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::Parse(format!("face {f} repeats a vertex")));
            }
        }
        if positions.iter().any(|p| p.iter().any(|x| !x.is_finite())) {
            return Err(Error::Parse("non-finite vertex coordinate".into()));
        }
        let faces = orient_faces(faces)?;

        let nh = 3 * faces.len();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(nh);
        for h in 0..nh {
            let (a, b) = (faces[h / 3][h % 3], faces[h / 3][(h % 3 + 1) % 3]);
            if directed.insert((a, b), h).is_some() {
                return Err(Error::NonManifold(format!("directed edge ({a}, {b}) used twice")));
            }
        }
        let mut twin = vec![NONE; nh];
        let mut he_edge = vec![NONE; nh];
        let mut edges = Vec::with_capacity(nh / 2 + 1);
        let mut edge_he = Vec::with_capacity(nh / 2 + 1);
        for h in 0..nh {
            let (a, b) = (faces[h / 3][h % 3], faces[h / 3][(h % 3 + 1) % 3]);
            if let Some(&t) = directed.get(&(b, a)) {
                twin[h] = t;
            }
            if he_edge[h] != NONE {
                continue;
            }
            let e = edges.len();
            edges.push([a.min(b), a.max(b)]);
            he_edge[h] = e;
            if twin[h] != NONE {
                he_edge[twin[h]] = e;
                edge_he.push([h, twin[h]]);
            } else {
                edge_he.push([h, NONE]);
            }
        }

        let mut mesh = Self {
            positions,
            faces,
            lattice,
            twin,
            he_edge,
            edges,
            edge_he,
            vertex_out: vec![NONE; nv],
        };
        mesh.check_vertex_fans()?;
        Ok(mesh)
    }

    fn check_vertex_fans(&mut self) -> Result<()> {
        let mut incident = vec![0usize; self.n_vertices()];
        for h in 0..self.n_halfedges() {
            let v = self.he_from(h);
            incident[v] += 1;
            // prefer the boundary halfedge as the vertex handle
            if self.vertex_out[v] == NONE || self.twin[h] == NONE {
                self.vertex_out[v] = h;
            }
        }
        for v in 0..self.n_vertices() {
            if incident[v] == 0 {
                return Err(Error::NonManifold(format!("isolated vertex {v}")));
            }
            let start = self.vertex_out[v];
            let mut count = 1;
            // rotate one way until the fan closes or hits the boundary
            let mut h = start;
            let mut closed = false;
            loop {
                let t = self.twin[self.prev(h)];
                if t == NONE {
                    break;
                }
                if t == start {
                    closed = true;
                    break;
                }
                h = t;
                count += 1;
                if count > incident[v] {
                    break;
                }
            }
            if !closed {
                let mut h = start;
                while self.twin[h] != NONE {
                    h = self.next(self.twin[h]);
                    if h == start {
                        break;
                    }
                    count += 1;
                    if count > incident[v] {
                        break;
                    }
                }
            }
            if count != incident[v] {
                return Err(Error::NonManifold(format!(
                    "vertex {v}: fan reaches {count} of {} incident faces",
                    incident[v]
                )));
            }
        }
        Ok(())
    }

    pub fn n_vertices(&self) -> usize {
        self.positions.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_halfedges(&self) -> usize {
        self.twin.len()
    }

    pub fn positions(&self) -> &[V4] {
        &self.positions
    }

    pub fn position(&self, v: usize) -> &V4 {
        &self.positions[v]
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        self.lattice.as_ref()
    }

    #[inline]
    pub fn next(&self, h: usize) -> usize {
        3 * (h / 3) + (h % 3 + 1) % 3
    }

    #[inline]
    pub fn prev(&self, h: usize) -> usize {
        3 * (h / 3) + (h % 3 + 2) % 3
    }

    #[inline]
    pub fn twin(&self, h: usize) -> Option<usize> {
        let t = self.twin[h];
        (t != NONE).then_some(t)
    }

    #[inline]
    pub fn he_from(&self, h: usize) -> usize {
        self.faces[h / 3][h % 3]
    }

    #[inline]
    pub fn he_to(&self, h: usize) -> usize {
        self.faces[h / 3][(h % 3 + 1) % 3]
    }

    #[inline]
    pub fn he_face(&self, h: usize) -> usize {
        h / 3
    }

    #[inline]
    pub fn he_edge(&self, h: usize) -> usize {
        self.he_edge[h]
    }

    /// +1 when the halfedge runs along its edge's canonical orientation.
    #[inline]
    pub fn he_sign(&self, h: usize) -> f64 {
        if self.he_from(h) < self.he_to(h) {
            1.0
        } else {
            -1.0
        }
    }

    /// Halfedges of an edge; the second is `None` on the boundary.
    pub fn edge_halfedges(&self, e: usize) -> (usize, Option<usize>) {
        let [a, b] = self.edge_he[e];
        (a, (b != NONE).then_some(b))
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_he[e][1] == NONE
    }

    pub fn boundary_edge_count(&self) -> usize {
        self.edge_he.iter().filter(|h| h[1] == NONE).count()
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_edge_count() == 0
    }

    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut b = vec![false; self.n_vertices()];
        for (e, [x, y]) in self.edges.iter().enumerate() {
            if self.is_boundary_edge(e) {
                b[*x] = true;
                b[*y] = true;
            }
        }
        b
    }

    /// Outgoing halfedges of `v` in rotation order.
    pub fn vertex_halfedges(&self, v: usize) -> Vec<usize> {
        let start = self.vertex_out[v];
        let mut out = vec![start];
        let mut h = start;
        loop {
            match self.twin(self.prev(h)) {
                Some(t) if t != start => {
                    out.push(t);
                    h = t;
                }
                _ => break,
            }
        }
        if self.twin(self.prev(h)).is_none() {
            // half-fan: walk the other way from the start
            let mut h = start;
            while let Some(t) = self.twin(h) {
                h = self.next(t);
                if h == start {
                    break;
                }
                out.insert(0, h);
            }
        }
        out
    }

    /// One-ring neighbour vertices.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let hs = self.vertex_halfedges(v);
        let mut n: Vec<usize> = hs.iter().map(|&h| self.he_to(h)).collect();
        // half-fans also reach the vertex across the last face
        if let Some(&last) = hs.last() {
            let w = self.he_from(self.prev(last));
            if !n.contains(&w) {
                n.push(w);
            }
        }
        n
    }

    /// Difference `p_j - p_i`, using the nearest lattice image on a torus.
    pub fn edge_vector(&self, i: usize, j: usize) -> V4 {
        let d = vecn::sub(&self.positions[j], &self.positions[i]);
        match &self.lattice {
            Some(l) => vecn::to4(&l.min_image(&vecn::to3(&d))),
            None => d,
        }
    }

    /// Corner position of face `f` and its two edge vectors from that corner.
    pub fn face_frame(&self, f: usize) -> (V4, V4, V4) {
        let [a, b, c] = self.faces[f];
        (self.positions[a], self.edge_vector(a, b), self.edge_vector(a, c))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices() as i64 - self.n_edges() as i64 + self.n_faces() as i64
    }

    pub fn boundary_loops(&self) -> usize {
        let mut from_vertex: HashMap<usize, usize> = HashMap::new();
        for h in 0..self.n_halfedges() {
            if self.twin[h] == NONE {
                from_vertex.insert(self.he_from(h), h);
            }
        }
        let mut seen: HashMap<usize, bool> = HashMap::new();
        let mut loops = 0;
        for (&v0, _) in from_vertex.iter() {
            if seen.contains_key(&v0) {
                continue;
            }
            loops += 1;
            let mut v = v0;
            while seen.insert(v, true).is_none() {
                match from_vertex.get(&v) {
                    Some(&h) => v = self.he_to(h),
                    None => break,
                }
            }
        }
        loops
    }

    pub fn connected_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.n_vertices()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for [a, b] in &self.edges {
            let (ra, rb) = (find(&mut parent, *a), find(&mut parent, *b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        (0..self.n_vertices()).filter(|&v| find(&mut parent, v) == v).count()
    }

    /// Genus `(2 - chi) / 2` of a closed connected mesh.
    pub fn genus(&self) -> Result<usize> {
        let nb = self.boundary_edge_count();
        if nb > 0 {
            return Err(Error::HasBoundary(nb));
        }
        let comps = self.connected_components();
        if comps != 1 {
            return Err(Error::Disconnected(comps));
        }
        let twice = 2 - self.euler_characteristic();
        Ok((twice / 2).max(0) as usize)
    }

    /// Genus of a connected surface with boundary: `(2 - chi - b) / 2`.
    pub fn genus_with_boundary(&self) -> Result<usize> {
        let comps = self.connected_components();
        if comps != 1 {
            return Err(Error::Disconnected(comps));
        }
        let twice = 2 - self.euler_characteristic() - self.boundary_loops() as i64;
        Ok((twice / 2).max(0) as usize)
    }

    /// 1-to-4 midpoint subdivision. Positions of the new vertices are edge
    /// midpoints; callers that need them on a curved surface project them.
    pub fn subdivide_midpoint(&self) -> Result<Self> {
        let nv = self.n_vertices();
        let mut positions = self.positions.clone();
        for [a, b] in &self.edges {
            let mid = vecn::axpy(&self.positions[*a], 0.5, &self.edge_vector(*a, *b));
            positions.push(match &self.lattice {
                Some(l) => vecn::to4(&l.wrap(&vecn::to3(&mid))),
                None => mid,
            });
        }
        let mut faces = Vec::with_capacity(4 * self.n_faces());
        for f in 0..self.n_faces() {
            let [a, b, c] = self.faces[f];
            let m = |k: usize| nv + self.he_edge[3 * f + k];
            let (ab, bc, ca) = (m(0), m(1), m(2));
            faces.extend_from_slice(&[[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        Self::new(positions, faces, self.lattice.clone())
    }

    /// Copy with the given positions (same connectivity).
    pub fn with_positions(&self, positions: Vec<V4>) -> Self {
        assert_eq!(positions.len(), self.n_vertices());
        Self { positions, ..self.clone() }
    }

    /// Copy with every face winding reversed.
    pub fn flipped(&self) -> Result<Self> {
        let faces = self.faces.iter().map(|&[a, b, c]| [a, c, b]).collect();
        Self::new(self.positions.clone(), faces, self.lattice.clone())
    }
}

/// Re-orients faces so that neighbours traverse shared edges in opposite
/// directions. Fails when an edge has more than two faces or when the
/// propagation meets a contradiction.
fn orient_faces(mut faces: Vec<[usize; 3]>) -> Result<Vec<[usize; 3]>> {
    let mut edge_faces: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (f, t) in faces.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let list = edge_faces.entry((a.min(b), a.max(b))).or_default();
            list.push(f);
            if list.len() > 2 {
                return Err(Error::NonManifold(format!("edge ({}, {}) has more than two faces", a.min(b), a.max(b))));
            }
        }
    }
    // does face f traverse a -> b?
    let runs = |t: &[usize; 3], a: usize, b: usize| (0..3).any(|k| t[k] == a && t[(k + 1) % 3] == b);

    let mut state = vec![0u8; faces.len()]; // 0 unvisited, 1 visited
    let mut stack = Vec::new();
    for seed in 0..faces.len() {
        if state[seed] != 0 {
            continue;
        }
        state[seed] = 1;
        stack.push(seed);
        while let Some(f) = stack.pop() {
            let t = faces[f];
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                for &g in &edge_faces[&(a.min(b), a.max(b))] {
                    if g == f {
                        continue;
                    }
                    let same = runs(&faces[g], a, b);
                    if state[g] == 0 {
                        if same {
                            let [x, y, z] = faces[g];
                            faces[g] = [x, z, y];
                        }
                        state[g] = 1;
                        stack.push(g);
                    } else if same {
                        return Err(Error::NonOrientable);
                    }
                }
            }
        }
    }
    Ok(faces)
}

#[cfg(test)]
mod tests {
    use super::builders::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn octahedron_topology() {
        let m = octahedron();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_faces()), (6, 12, 8));
        assert_eq!(m.euler_characteristic(), 2);
        assert_eq!(m.genus().unwrap(), 0);
    }

    #[test]
    fn torus_grid_topology() {
        let m = torus_grid_combinatorial(4, 4);
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_faces()), (16, 48, 32));
        assert_eq!(m.euler_characteristic(), 0);
        assert_eq!(m.genus().unwrap(), 1);
        assert_eq!(torus_grid_combinatorial(32, 32).genus().unwrap(), 1);
    }

    #[test]
    fn icosphere_genus() {
        assert_eq!(icosphere(3).genus().unwrap(), 0);
    }

    #[test]
    fn double_torus_genus() {
        let m = double_torus(1);
        // counted from the construction: a 5x3 slab of unit cubes with two
        // cubes removed
        assert_eq!(m.euler_characteristic(), -2);
        assert_eq!(m.genus().unwrap(), 2);
        assert_eq!(double_torus(2).genus().unwrap(), 2);
    }

    #[test]
    fn halfedge_round_trip() {
        for m in [octahedron(), torus_grid_combinatorial(5, 3), double_torus(1), cylinder_grid_combinatorial(6, 4)] {
            for h in 0..m.n_halfedges() {
                assert_eq!(m.next(m.next(m.next(h))), h);
                if let Some(t) = m.twin(h) {
                    assert_eq!(m.twin(t), Some(h));
                    assert_eq!(m.he_from(t), m.he_to(h));
                    assert_eq!(m.he_edge(t), m.he_edge(h));
                }
            }
        }
    }

    #[test]
    fn three_face_edge_is_non_manifold() {
        let p = vec![[0.0; 4]; 5];
        let faces = vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]];
        assert!(matches!(TriangleMesh::new(p, faces, None), Err(Error::NonManifold(_))));
    }

    #[test]
    fn bowtie_vertex_is_non_manifold() {
        let p = vec![[0.0; 4]; 5];
        let faces = vec![[0, 1, 2], [0, 3, 4]];
        assert!(matches!(TriangleMesh::new(p, faces, None), Err(Error::NonManifold(_))));
    }

    #[test]
    fn mobius_strip_is_non_orientable() {
        // 3-quad Moebius band on a 6-vertex loop
        let n = 3;
        let p = vec![[0.0; 4]; 2 * n];
        let mut faces = Vec::new();
        for i in 0..n {
            let (a, b) = (2 * i, 2 * i + 1);
            let (c, d) = if i + 1 < n { (2 * i + 2, 2 * i + 3) } else { (1, 0) };
            faces.push([a, c, b]);
            faces.push([b, c, d]);
        }
        assert!(matches!(TriangleMesh::new(p, faces, None), Err(Error::NonOrientable)));
    }

    #[test]
    fn inconsistent_input_orientation_is_repaired() {
        let m = octahedron();
        let mut faces = m.faces().to_vec();
        faces[3] = [faces[3][0], faces[3][2], faces[3][1]];
        let fixed = TriangleMesh::new(m.positions().to_vec(), faces, None).unwrap();
        assert_eq!(fixed.genus().unwrap(), 0);
    }

    #[test]
    fn genus_errors() {
        let cyl = cylinder_grid_combinatorial(8, 3);
        assert!(matches!(cyl.genus(), Err(Error::HasBoundary(_))));
        assert_eq!(cyl.boundary_loops(), 2);
        assert_eq!(cyl.genus_with_boundary().unwrap(), 0);
        let a = octahedron();
        let mut p = a.positions().to_vec();
        p.extend(a.positions().iter().map(|x| vecn::add(x, &[5.0, 0.0, 0.0, 0.0])));
        let mut f = a.faces().to_vec();
        f.extend(a.faces().iter().map(|t| t.map(|v| v + 6)));
        let two = TriangleMesh::new(p, f, None).unwrap();
        assert!(matches!(two.genus(), Err(Error::Disconnected(2))));
    }

    #[test]
    fn neighbors_of_boundary_vertex() {
        let cyl = cylinder_grid_combinatorial(6, 3);
        for v in 0..cyl.n_vertices() {
            let n = cyl.neighbors(v);
            let mut dedup = n.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), n.len());
            let deg = cyl.edges().iter().filter(|e| e.contains(&v)).count();
            assert_eq!(n.len(), deg, "vertex {v}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn genus_invariant_under_subdivision(nu in 3usize..7, nv in 3usize..7, which in 0usize..3) {
            let m = match which {
                0 => torus_grid_combinatorial(nu, nv),
                1 => octahedron(),
                _ => double_torus(1),
            };
            let g = m.genus().unwrap();
            prop_assert_eq!(m.subdivide_midpoint().unwrap().genus().unwrap(), g);
        }
    }
}
