use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI, TAU};

use super::*;
use crate::ambient::{gauss_map, Lattice};
use crate::mesh::builders::grid_faces;
use proptest::prelude::*;

fn frame_checks(s: &ImmersedSurface) {
    for v in 0..s.n_vertices() {
        let [e1, e2] = s.frames[v];
        let n = s.normals[v];
        assert!((vecn::norm(&e1) - 1.0).abs() < 1e-12);
        assert!((vecn::norm(&e2) - 1.0).abs() < 1e-12);
        assert!(vecn::dot(&e1, &e2).abs() < 1e-12);
        assert!(vecn::dot(&e1, &n).abs() < 1e-12 && vecn::dot(&e2, &n).abs() < 1e-12);
        let p = s.mesh.position(v);
        assert!(s.space.orientation(p, &e1, &e2, &n) > 0.0);
        if let AmbientSpace::Sphere3 { .. } = s.space {
            assert!(vecn::dot(&e1, p).abs() < 1e-12 && vecn::dot(&e2, p).abs() < 1e-12);
        }
    }
}

#[test]
fn frame_for_vertical_normal() {
    let f = canonical_frame(&AmbientSpace::Euclidean3, &[0.0; 4], &[0.0, 0.0, 1.0, 0.0], 0).unwrap();
    assert!(f[0][2].abs() < 1e-15 && f[1][2].abs() < 1e-15);
    assert!(vecn::dot(&f[0], &f[1]).abs() < 1e-15);
    let d = vecn::det3(&vecn::to3(&f[0]), &vecn::to3(&f[1]), &[0.0, 0.0, 1.0]);
    assert!((d - 1.0).abs() < 1e-15);
    assert!(matches!(
        canonical_frame(&AmbientSpace::Euclidean3, &[0.0; 4], &[0.0; 4], 7),
        Err(Error::ZeroNormal(7))
    ));
}

#[test]
fn zoo_frames_are_oriented_and_tangent() {
    frame_checks(&sphere_r3(1.0, 2, false).unwrap());
    frame_checks(&geodesic_sphere_s3(0.6, 2, AlphaSign::Plus).unwrap());
    frame_checks(&flat_torus_s3(0.5, 12, 10, AlphaSign::Minus).unwrap());
    frame_checks(&flat_torus_t3(&Lattice::cubic(1.0), 8, 8, [0.0, 0.0, 0.3]).unwrap());
    frame_checks(&cylinder_r3(1.0, 12, 8, 3.0).unwrap());
}

#[test]
fn mesh_orientation_follows_normals() {
    for s in [
        sphere_r3(1.0, 1, false).unwrap(),
        sphere_r3(1.0, 1, true).unwrap(),
        flat_torus_s3(0.3, 8, 8, AlphaSign::Plus).unwrap(),
    ] {
        for f in 0..s.mesh.n_faces() {
            let (p, a, b) = s.mesh.face_frame(f);
            let n = s.normals[s.mesh.faces()[f][0]];
            assert!(s.space.orientation(&p, &a, &b, &n) > 0.0);
        }
    }
}

#[test]
fn round_sphere_data() {
    let s = sphere_r3(1.0, 2, false).unwrap();
    for v in 0..s.n_vertices() {
        assert!((s.mean_curvature(v) - 1.0).abs() < 1e-14);
        assert!((s.k_sigma[v] - 1.0).abs() < 1e-14);
        assert!((s.extrinsic_curvature(v) - 1.0).abs() < 1e-14);
    }
    let s2 = sphere_r3(2.0, 1, false).unwrap();
    assert!((s2.mean_curvature(0) - 0.5).abs() < 1e-14 && (s2.k_sigma[0] - 0.25).abs() < 1e-14);
    // outward normal flips the sign of A
    let out = sphere_r3(1.0, 1, true).unwrap();
    assert!((out.mean_curvature(3) + 1.0).abs() < 1e-14);
    assert_eq!(s.mesh.genus().unwrap(), 0);
    assert!(matches!(sphere_r3(0.0, 1, false), Err(Error::Domain(_))));
}

/// Closed-form curvatures checked against a finite-difference second
/// fundamental form of the parametrization.
fn fd_principal_curvatures(r: f64, u: f64, v: f64) -> (f64, f64) {
    let s = (1.0 - r * r).sqrt();
    let p = |u: f64, v: f64| [r * u.cos(), r * u.sin(), s * v.cos(), s * v.sin()];
    let eta = [-s * u.cos(), -s * u.sin(), r * v.cos(), r * v.sin()];
    let h = 1e-4;
    let second = |du: f64, dv: f64| {
        let a = p(u + du, v + dv);
        let b = p(u, v);
        let c = p(u - du, v - dv);
        let d2: V4 = std::array::from_fn(|i| (a[i] - 2.0 * b[i] + c[i]) / (h * h));
        vecn::dot(&d2, &eta)
    };
    // |p_u| = r and |p_v| = s
    (second(h, 0.0) / (r * r), second(0.0, h) / (s * s))
}

#[test]
fn flat_torus_curvatures_match_finite_differences() {
    for (r, k1, k2) in [(FRAC_1_SQRT_2, 1.0, -1.0), (0.5, 3f64.sqrt(), -1.0 / 3f64.sqrt())] {
        let (f1, f2) = fd_principal_curvatures(r, 0.7, -1.3);
        assert!((f1 - k1).abs() < 1e-6 && (f2 - k2).abs() < 1e-6, "{f1} {f2}");
        let t = flat_torus_s3(r, 16, 16, AlphaSign::Plus).unwrap();
        let (mean, std) = t.mean_curvature_stats();
        assert!((mean - 0.5 * (k1 + k2)).abs() < 1e-12 && std < 1e-12);
        for v in 0..t.n_vertices() {
            let a = t.shape_op[v];
            assert!((a.det() - k1 * k2).abs() < 1e-12);
            assert!(t.k_sigma[v].abs() < 1e-15);
        }
        assert!(t.gauss_equation_residual() < 1e-10);
        assert_eq!(t.mesh.genus().unwrap(), 1);
    }
    assert!(matches!(flat_torus_s3(1.5, 8, 8, AlphaSign::Plus), Err(Error::Domain(_))));
    assert!(matches!(flat_torus_s3(0.5, 2, 8, AlphaSign::Plus), Err(Error::BadParameter(_))));
}

#[test]
fn geodesic_sphere_curvatures() {
    let s = geodesic_sphere_s3(FRAC_PI_4, 2, AlphaSign::Plus).unwrap();
    assert!((s.mean_curvature(5) - 1.0).abs() < 1e-12);
    assert!((s.extrinsic_curvature(5) - 1.0).abs() < 1e-12);
    assert!((s.k_sigma[5] - 2.0).abs() < 1e-12);
    assert!(s.gauss_equation_residual() < 1e-10);
    let near = geodesic_sphere_s3(PI / 2.0 - 1e-3, 1, AlphaSign::Minus).unwrap();
    assert!((near.mean_curvature(0) - 1e-3).abs() < 1e-9);
    assert_eq!(s.mesh.genus().unwrap(), 0);
    // the Gauss map of a distance sphere about the identity is -u
    for v in 0..s.n_vertices() {
        let n = s.gauss_map(v).unwrap();
        let p = s.mesh.position(v);
        let u = vecn::scale(&[p[1], p[2], p[3]], 1.0 / FRAC_PI_4.sin());
        assert!(vecn::norm(&vecn::add(&n, &u)) < 1e-12);
    }
}

#[test]
fn flat_torus_in_t3() {
    let l = Lattice::cubic(1.0);
    let t = flat_torus_t3(&l, 8, 8, [0.0, 0.0, 0.25]).unwrap();
    assert_eq!(t.mesh.genus().unwrap(), 1);
    let n0 = t.gauss_map(0).unwrap();
    for v in 0..t.n_vertices() {
        assert_eq!(t.shape_op[v], Mat2::zero());
        assert_eq!(t.mean_curvature(v), 0.0);
        assert_eq!(t.gauss_map(v).unwrap(), n0);
    }
    let md = t.metric().unwrap();
    assert!((md.total_area() - 1.0).abs() < 1e-12);
    // a skew lattice works the same way
    let skew = Lattice::new([[1.0, 0.0, 0.0], [0.3, 1.2, 0.0], [0.1, 0.2, 0.9]]).unwrap();
    let t2 = flat_torus_t3(&skew, 10, 12, [0.0; 3]).unwrap();
    assert_eq!(t2.mesh.genus().unwrap(), 1);
    assert!((t2.metric().unwrap().total_area() - 1.2).abs() < 1e-12);
}

#[test]
fn gauss_map_differential_matches_finite_differences() {
    // d N = -(A + lambda J) with lambda = +1 for the quaternionic Gauss map
    let r: f64 = 0.6;
    let s = (1.0 - r * r).sqrt();
    let p = |u: f64, v: f64| [r * u.cos(), r * u.sin(), s * v.cos(), s * v.sin()];
    let eta = |u: f64, v: f64| [-s * u.cos(), -s * u.sin(), r * v.cos(), r * v.sin()];
    let space = AmbientSpace::sphere(AlphaSign::Plus);
    let nmap = |u: f64, v: f64| gauss_map(&space, &p(u, v), &eta(u, v)).unwrap();
    let h = 1e-5;
    for &(u, v) in &[(0.3, 1.1), (2.0, -0.4), (4.4, 5.9)] {
        let frame = canonical_frame(&space, &p(u, v), &eta(u, v), 0).unwrap();
        let alg = frame.map(|e| crate::ambient::to_algebra(&space, &p(u, v), &e));
        let dn_u: V3 = std::array::from_fn(|i| (nmap(u + h, v)[i] - nmap(u - h, v)[i]) / (2.0 * h * r));
        let dn_v: V3 = std::array::from_fn(|i| (nmap(u, v + h)[i] - nmap(u, v - h)[i]) / (2.0 * h * s));
        let eu = [-u.sin(), u.cos(), 0.0, 0.0];
        let ev = [0.0, 0.0, -v.sin(), v.cos()];
        let principal = [(eu, s / r), (ev, -r / s)];
        let a = shape_from_principal(&frame, &principal);
        let dn = -(a + Mat2::j());
        for (dir, d) in [(eu, dn_u), (ev, dn_v)] {
            let x = Vec2::new(vecn::dot(&dir, &frame[0]), vecn::dot(&dir, &frame[1]));
            let predicted = dn.apply(x);
            let measured = Vec2::new(vecn::dot(&d, &alg[0]), vecn::dot(&d, &alg[1]));
            assert!((predicted - measured).norm_sq().sqrt() < 1e-8, "{predicted:?} vs {measured:?}");
        }
    }
}

#[test]
fn area_converges_at_second_order() {
    let errs: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| {
            let t = flat_torus_s3(0.5, n, n, AlphaSign::Plus).unwrap();
            (t.metric().unwrap().total_area() - t.exact_area.unwrap()).abs()
        })
        .collect();
    assert!(errs[0] / errs[1] > 3.5 && errs[1] / errs[2] > 3.5, "{errs:?}");
}

#[test]
fn fitted_shape_operator_on_icosphere() {
    let exact = sphere_r3(1.0, 3, false).unwrap();
    let fitted = ImmersedSurface::fitted("fit", exact.mesh.clone(), exact.space.clone(), exact.normals.clone()).unwrap();
    assert_eq!(fitted.provenance, Provenance::Fitted);
    for v in 0..fitted.n_vertices() {
        assert!((fitted.mean_curvature(v) - 1.0).abs() < 0.02, "vertex {v}: {}", fitted.mean_curvature(v));
        assert!(fitted.shape_op[v].asymmetry() == 0.0);
    }
}

#[test]
fn fitted_shape_operator_on_plane_is_zero() {
    let n = 6;
    let mut p = Vec::new();
    for i in 0..n {
        for j in 0..n {
            p.push([i as f64 * 0.3, j as f64 * 0.2 + 0.05 * i as f64, 0.0, 0.0]);
        }
    }
    let mesh = TriangleMesh::new(p, grid_faces(n, n, false, false), None).unwrap();
    let normals = vec![[0.0, 0.0, 1.0, 0.0]; mesh.n_vertices()];
    let frames = vertex_tangent_frames(&mesh, &AmbientSpace::Euclidean3, &normals).unwrap();
    // corner vertices of an open grid have too few neighbour directions
    let full = fit_shape_operator(&mesh, &AmbientSpace::Euclidean3, &normals, &frames);
    assert!(matches!(full, Err(Error::InsufficientNeighbors { .. })));
    let t = flat_torus_t3(&Lattice::cubic(1.0), 10, 10, [0.0; 3]).unwrap();
    let a = fit_shape_operator(&t.mesh, &t.space, &t.normals, &t.frames).unwrap();
    for m in a {
        assert!(m.norm_sq().sqrt() <= 1e-8);
    }
}

#[test]
fn fitted_clifford_torus_principal_curvatures() {
    let t = clifford_torus(64, AlphaSign::Plus).unwrap();
    let f = ImmersedSurface::fitted("fit", t.mesh.clone(), t.space.clone(), t.normals.clone()).unwrap();
    for v in 0..f.n_vertices() {
        let a = f.shape_op[v];
        let h = 0.5 * a.trace();
        let disc = (h * h - a.det()).max(0.0).sqrt();
        let (k1, k2) = (h + disc, h - disc);
        assert!((k1 - 1.0).abs() < 0.02 && (k2 + 1.0).abs() < 0.02, "{k1} {k2}");
    }
}

#[test]
fn document_round_trip_preserves_data() {
    let t = flat_torus_s3(0.5, 10, 9, AlphaSign::Minus).unwrap();
    let text = serde_json::to_string(&t.to_document()).unwrap();
    let doc: MeshDocument = serde_json::from_str(&text).unwrap();
    let back = ImmersedSurface::from_document(&doc).unwrap();
    assert_eq!(back.space, t.space);
    assert_eq!(back.provenance, Provenance::Analytic);
    for v in 0..t.n_vertices() {
        assert!((back.shape_op[v] - t.shape_op[v]).norm_sq() < 1e-24);
        assert!((back.k_sigma[v] - t.k_sigma[v]).abs() < 1e-15);
    }
    // without normals and shape data the surface is estimated and fitted
    let s = sphere_r3(1.0, 3, false).unwrap();
    let bare = MeshDocument::from_mesh(&s.mesh, &s.space);
    let est = ImmersedSurface::from_document(&bare).unwrap();
    assert_eq!(est.provenance, Provenance::Fitted);
    let (h, _) = est.mean_curvature_stats();
    assert!((h.abs() - 1.0).abs() < 0.02);
}

#[test]
fn estimated_normals_on_s3_are_tangent() {
    let t = flat_torus_s3(0.5, 24, 24, AlphaSign::Plus).unwrap();
    let est = estimate_normals(&t.mesh, &t.space).unwrap();
    for v in 0..t.n_vertices() {
        assert!(vecn::dot(&est[v], t.mesh.position(v)).abs() < 1e-12);
        assert!(vecn::dot(&est[v], &t.normals[v]) > 0.99);
    }
}

#[test]
fn cylinder_forms_are_periods() {
    let c = cylinder_r3(1.0, 16, 6, 2.0).unwrap();
    assert!((c.mean_curvature(0) - 0.5).abs() < 1e-14);
    let [around, along] = cylinder_harmonic_forms(&c);
    // d of the around form vanishes on every face
    for (f, tri) in c.mesh.faces().iter().enumerate() {
        let mut s = [0.0, 0.0];
        for k in 0..3 {
            let h = 3 * f + k;
            let e = c.mesh.he_edge(h);
            s[0] += c.mesh.he_sign(h) * around[e];
            s[1] += c.mesh.he_sign(h) * along[e];
        }
        assert!(s[0].abs() < 1e-12 && s[1].abs() < 1e-12, "face {tri:?}");
    }
    // one ring of 16 edges carries the full period 2 pi R
    let ring: f64 = c
        .mesh
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, [a, b])| c.mesh.position(*a)[2] == 0.0 && c.mesh.position(*b)[2] == 0.0)
        .map(|(e, _)| around[e].abs())
        .sum();
    assert!((ring - TAU).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn rotated_frames_keep_invariants(seed in 0u64..1000, r in 0.2f64..0.9) {
        use rand::{Rng, SeedableRng};
        let t = flat_torus_s3(r, 8, 8, AlphaSign::Plus).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let th: Vec<f64> = (0..t.n_vertices()).map(|_| rng.gen_range(-PI..PI)).collect();
        let rot = t.rotate_frames(&th);
        frame_checks(&rot);
        prop_assert!(rot.gauss_equation_residual() < 1e-10);
        prop_assert!(rot.symmetry_residual() < 1e-12);
        for v in 0..t.n_vertices() {
            prop_assert!((rot.mean_curvature(v) - t.mean_curvature(v)).abs() < 1e-12);
        }
    }
}
