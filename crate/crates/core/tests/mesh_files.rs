use cmc_index::ambient::{AlphaSign, AmbientSpace, Lattice};
use cmc_index::index_form::{index_on_harmonic_span, IndexOptions};
use cmc_index::mesh::builders::{double_torus, icosphere};
use cmc_index::mesh::io::{self, MeshDocument};
use cmc_index::zoo::{clifford_torus, flat_torus_t3, geodesic_sphere_s3, ImmersedSurface};
use cmc_index::Error;

fn reload(doc: &MeshDocument) -> ImmersedSurface {
    let text = serde_json::to_string(doc).unwrap();
    ImmersedSurface::from_document(&serde_json::from_str(&text).unwrap()).unwrap()
}

#[test]
fn files_round_trip_through_every_format() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = double_torus(1);
    for ext in ["off", "obj", "json"] {
        let path = dir.path().join(format!("m.{ext}"));
        io::save(&path, &mesh, &AmbientSpace::Euclidean3).unwrap();
        let (back, space, _) = io::load(&path).unwrap();
        assert_eq!(back.faces(), mesh.faces());
        assert_eq!(back.genus().unwrap(), 2);
        assert_eq!(space, AmbientSpace::Euclidean3);
        let drift = back
            .positions()
            .iter()
            .zip(mesh.positions())
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        assert!(drift <= 1e-15, "{ext}: {drift:e}");
    }
}

#[test]
fn four_coordinate_off_is_read_as_s3() {
    let dir = tempfile::tempdir().unwrap();
    let s = geodesic_sphere_s3(0.7, 2, AlphaSign::Plus).unwrap();
    let path = dir.path().join("g.off");
    io::save(&path, &s.mesh, &s.space).unwrap();
    let (_, space, _) = io::load(&path).unwrap();
    assert!(matches!(space, AmbientSpace::Sphere3 { .. }));
}

#[test]
fn zoo_documents_preserve_the_index_spectrum() {
    let opts = IndexOptions::default();
    for s in [
        clifford_torus(24, AlphaSign::Plus).unwrap(),
        clifford_torus(24, AlphaSign::Minus).unwrap(),
        flat_torus_t3(&Lattice::cubic(1.0), 16, 16, [0.2, 0.0, 0.1]).unwrap(),
    ] {
        let before = index_on_harmonic_span(&s, &opts).unwrap();
        let mut doc = s.to_document();
        let after = index_on_harmonic_span(&reload(&doc), &opts).unwrap();
        // without stored frames the canonical frame is recomputed
        doc.frame = None;
        let canonical = index_on_harmonic_span(&reload(&doc), &opts).unwrap();
        for r in [&after, &canonical] {
            assert_eq!(r.index_estimate, before.index_estimate, "{}", s.name);
            for (a, b) in r.eigenvalues.iter().zip(&before.eigenvalues) {
                assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{}: {a} vs {b}", s.name);
            }
        }
    }
}

#[test]
fn bare_meshes_are_fitted() {
    let mesh = icosphere(3);
    let doc = MeshDocument::from_mesh(&mesh, &AmbientSpace::Euclidean3);
    let s = ImmersedSurface::from_document(&doc).unwrap();
    let (h, _) = s.mean_curvature_stats();
    assert!((h.abs() - 1.0).abs() < 0.02, "{h}");
}

#[test]
fn inconsistent_documents_are_rejected() {
    let s = clifford_torus(8, AlphaSign::Plus).unwrap();
    let mut doc = s.to_document();
    doc.shape_op.as_mut().unwrap().pop();
    assert!(matches!(ImmersedSurface::from_document(&doc), Err(Error::Parse(_))));
    let mut doc = s.to_document();
    doc.shape_op = None;
    assert!(matches!(ImmersedSurface::from_document(&doc), Err(Error::Parse(_))));
    assert!(matches!(io::parse_json(r#"{"vertices": [], "faces": [], "colour": 1}"#), Err(Error::Parse(_))));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.ply");
    std::fs::write(&path, "ply").unwrap();
    assert!(matches!(io::load(&path), Err(Error::Parse(_))));
}
