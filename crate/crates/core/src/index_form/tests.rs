use std::f64::consts::{FRAC_1_SQRT_2, PI};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::ambient::{AlphaSign, Lattice};
use crate::hodge::harmonic_basis_on;
use crate::linalg::quadratic;
use crate::zoo::{
    clifford_torus, cylinder_harmonic_forms, cylinder_r3, flat_torus_s3, flat_torus_t3, geodesic_sphere_s3,
    perturbed_sphere_r3, sphere_r3,
};

fn flat_t3(n: usize) -> ImmersedSurface {
    flat_torus_t3(&Lattice::cubic(1.0), n, n, [0.1, 0.2, 0.3]).unwrap()
}

fn assert_close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

#[test]
fn gauss_map_differential_examples() {
    let t = flat_t3(6);
    assert!(dN_operator(&t).unwrap().dn.iter().all(|d| d.norm_sq() == 0.0));

    let s = sphere_r3(1.0, 1, false).unwrap();
    for d in dN_operator(&s).unwrap().dn {
        assert_close((d + Mat2::identity()).norm_sq(), 0.0, 1e-24);
    }

    // in a principal frame the Clifford differential is -(diag(1,-1) + J)
    let c = clifford_torus(8, AlphaSign::Plus).unwrap();
    let gm = dN_operator(&c).unwrap();
    for (v, d) in gm.dn.iter().enumerate() {
        assert_close((*d + c.shape_op[v] + Mat2::j()).norm_sq(), 0.0, 1e-24);
    }
    let principal = (Mat2::diag(1.0, -1.0) + Mat2::j()) * -1.0;
    assert_eq!(principal.0, [[-1.0, -1.0], [1.0, 1.0]]);
}

#[test]
fn gauss_map_is_unit_and_hs_norm_splits() {
    for s in [
        clifford_torus(12, AlphaSign::Minus).unwrap(),
        flat_torus_s3(0.5, 10, 12, AlphaSign::Plus).unwrap(),
        geodesic_sphere_s3(0.9, 1, AlphaSign::Plus).unwrap(),
        sphere_r3(2.0, 1, true).unwrap(),
    ] {
        let gm = dN_operator(&s).unwrap();
        let c = s.space.c();
        for (v, d) in gm.dn.iter().enumerate() {
            assert_close(vecn::norm(&gm.n[v]), 1.0, 1e-12);
            assert_close(d.norm_sq(), s.shape_op[v].norm_sq() + 2.0 * c, 1e-10);
        }
        assert!(antisymmetry_residual(&s) <= 1e-12);
    }
}

#[test]
fn energy_matches_closed_forms() {
    assert_eq!(energy(&flat_t3(8)).unwrap(), 0.0);
    let errs: Vec<f64> = [3, 4]
        .iter()
        .map(|&l| (energy(&sphere_r3(1.0, l, false).unwrap()).unwrap() - 4.0 * PI).abs())
        .collect();
    assert!(errs[1] < errs[0] && errs[1] < 0.01 * 4.0 * PI, "{errs:?}");
    let c = clifford_torus(64, AlphaSign::Plus).unwrap();
    let exact = 2.0 * c.exact_area.unwrap();
    assert_close(energy(&c).unwrap(), exact, 2e-3 * exact);
}

#[test]
fn f_expansion_oracle_on_random_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for s in [
        clifford_torus(16, AlphaSign::Plus).unwrap(),
        clifford_torus(16, AlphaSign::Minus).unwrap(),
        flat_torus_s3(0.8, 12, 12, AlphaSign::Minus).unwrap(),
        sphere_r3(1.5, 2, false).unwrap(),
        flat_t3(8),
    ] {
        let gm = dN_operator(&s).unwrap();
        let samples: Vec<(usize, Vec2)> = (0..1000)
            .map(|_| {
                let v = rng.gen_range(0..s.n_vertices());
                (v, Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            })
            .collect();
        assert!(f_expansion_residual(&s, &gm, &samples) <= 1e-10);
        let field = TangentField(samples.iter().map(|(_, x)| *x).collect());
        let sub = GaussMapData { dn: samples.iter().map(|(v, _)| gm.dn[*v]).collect(), ..gm.clone() };
        assert!(F_direct(&sub, &field).iter().all(|f| *f >= -1e-12));
    }
}

#[test]
fn assembled_matrix_reproduces_the_weak_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for s in [clifford_torus(10, AlphaSign::Plus).unwrap(), sphere_r3(1.0, 1, false).unwrap()] {
        let form = IndexForm::new(&s).unwrap();
        let q = form.assemble().unwrap();
        for _ in 0..3 {
            let w = OneForm((0..form.dec.n_edges()).map(|_| rng.gen_range(-1.0..1.0)).collect());
            let direct = form.value(&w);
            let scale = form.terms(&w).d_norm2 + form.terms(&w).delta_norm2 + form.terms(&w).f_term;
            assert_close(quadratic(&q, &w.0), direct, 1e-10 * scale);
        }
    }
}

#[test]
fn direct_and_closed_forms_on_harmonic_fields() {
    let t = flat_t3(12);
    let basis = harmonic_basis_on(&t).unwrap();
    for w in &basis.forms {
        assert!(second_variation_direct(&t, w).unwrap().abs() < 1e-10);
        for v in Variant::ALL {
            assert_eq!(second_variation_closed_form(&t, w, v).unwrap(), 0.0);
        }
    }

    let c = clifford_torus(32, AlphaSign::Plus).unwrap();
    let basis = harmonic_basis_on(&c).unwrap();
    for w in &basis.forms {
        let direct = second_variation_direct(&c, w).unwrap();
        let re = second_variation_closed_form(&c, w, Variant::Double).unwrap();
        let pa = second_variation_closed_form(&c, w, Variant::Single).unwrap();
        assert!((direct - re).abs() < 1e-6 * direct.abs(), "{direct} {re}");
        assert!((direct - pa).abs() > 0.1 * direct.abs(), "{direct} {pa}");
    }
}

#[test]
fn closed_form_rejects_gradient_fields() {
    let s = geodesic_sphere_s3(1.0, 2, AlphaSign::Plus).unwrap();
    let form = IndexForm::new(&s).unwrap();
    let phi: Vec<f64> = s.mesh.positions().iter().map(|p| p[1]).collect();
    let w = form.dec.d0(&phi);
    assert!(matches!(second_variation_closed_form(&s, &w, Variant::Single), Err(Error::NotHarmonic(_))));
    let direct = second_variation_direct(&s, &w).unwrap();
    let t = form.terms(&w);
    assert!(t.delta_norm2 > 0.0);
    assert_close(direct, t.total(), 0.0);
}

#[test]
fn pairing_sum_follows_the_doubled_constant() {
    let c = clifford_torus(32, AlphaSign::Plus).unwrap();
    for w in harmonic_basis_on(&c).unwrap().forms {
        let p = pairing_sum(&c, &w).unwrap();
        assert!(p.sum < 0.0);
        assert!(p.relative_error(Variant::Double) < 0.02, "{p:?}");
        assert_eq!(p.closest(), Some(Variant::Double));
    }
    let t = flat_t3(10);
    for w in harmonic_basis_on(&t).unwrap().forms {
        let p = pairing_sum(&t, &w).unwrap();
        assert!(p.sum.abs() < 1e-10 && p.closest().is_none());
    }
    let half = flat_torus_s3(0.5, 32, 32, AlphaSign::Minus).unwrap();
    for w in harmonic_basis_on(&half).unwrap().forms {
        let p = pairing_sum(&half, &w).unwrap();
        assert!(p.sum < 0.0 && p.sum <= p.predicted_single + 0.02 * p.mass, "{p:?}");
    }
}

#[test]
fn harmonic_span_index_examples() {
    let opts = IndexOptions::default();
    let g = index_on_harmonic_span(&geodesic_sphere_s3(0.8, 2, AlphaSign::Plus).unwrap(), &opts).unwrap();
    assert_eq!((g.harmonic_dim, g.index_estimate), (0, 0));
    assert!(g.bound_required && g.bound_satisfied && g.matching_variant.is_none());

    let c = index_on_harmonic_span(&clifford_torus(24, AlphaSign::Plus).unwrap(), &opts).unwrap();
    assert_eq!(c.harmonic_dim, 2);
    assert!(c.index_estimate >= 1 && c.bound_satisfied);
    assert_eq!(c.matching_variant, Some(Variant::Double));

    let t = index_on_harmonic_span(&flat_t3(12), &opts).unwrap();
    assert!(!t.bound_required && t.bound_satisfied);
    assert_eq!(t.index_estimate, 0);
    assert!(t.eigenvalues.iter().all(|e| e.abs() <= t.eps_neg));
    let csv = t.to_csv();
    assert!(csv.starts_with("space,k,eigenvalue\n") && csv.lines().count() == 3);
}

#[test]
fn full_space_count_dominates_the_harmonic_span() {
    for s in [
        clifford_torus(16, AlphaSign::Plus).unwrap(),
        flat_torus_s3(0.5, 14, 14, AlphaSign::Minus).unwrap(),
        sphere_r3(1.0, 2, false).unwrap(),
        flat_t3(10),
    ] {
        let r = index_full_space(&s, 12, &IndexOptions::default()).unwrap();
        let f = r.full_space.as_ref().unwrap();
        assert_eq!(f.solver, "dense");
        assert!(f.negative_count >= r.index_estimate, "{}: {} < {}", s.name, f.negative_count, r.index_estimate);
        assert!(f.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn shift_invert_path_agrees_with_dense() {
    let s = clifford_torus(20, AlphaSign::Plus).unwrap();
    let form = IndexForm::new(&s).unwrap();
    let basis = harmonic_basis_on(&s).unwrap();
    let dense = spectrum::full_spectrum(&form, 10, &basis.forms, &IndexOptions::default()).unwrap();
    let opts = IndexOptions { dense_limit: Some(0), seed: 5, ..Default::default() };
    let sparse = spectrum::full_spectrum(&form, 10, &basis.forms, &opts).unwrap();
    assert_eq!((dense.solver.as_str(), sparse.solver.as_str()), ("dense", "shift-invert"));
    for (a, b) in dense.eigenvalues.iter().zip(&sparse.eigenvalues).take(6) {
        assert!((a - b).abs() < 1e-8 * a.abs().max(1.0), "{a} {b}");
    }
    assert_eq!(dense.negative_count.min(sparse.eigenvalues.len()), sparse.negative_count);
}

#[test]
fn cutoff_on_the_cylinder() {
    let s = cylinder_r3(1.0, 32, 96, 4.0 * PI).unwrap();
    let [around, along] = cylinder_harmonic_forms(&s);
    let seed = 16 * 96 + 48;
    let phi = tent_cutoff(&s.mesh, seed, 5.0).unwrap();
    for w in [&around, &along] {
        let t = cutoff_second_variation(&s, &OneForm(w.clone()), &phi).unwrap();
        assert!(t.relative_error(Variant::Double) < 0.05);
    }
    let zero = vec![0.0; s.n_vertices()];
    assert_eq!(cutoff_second_variation(&s, &OneForm(around.clone()), &zero).unwrap().weak, 0.0);
    let p = cutoff_pairing(&s, &OneForm(around.clone()), &phi).unwrap();
    assert!(p.sum < 0.0);
    let wide = tent_cutoff(&s.mesh, seed, 50.0).unwrap();
    assert!(matches!(
        cutoff_second_variation(&s, &OneForm(around.clone()), &wide),
        Err(Error::NotCompactlySupported(_))
    ));
    let count = cutoff_index_count(&s, &[OneForm(around), OneForm(along)], &phi).unwrap();
    assert!(count.bound_required && count.satisfied && count.negative >= 1, "{count:?}");
}

#[test]
fn direct_form_needs_a_closed_surface() {
    let s = cylinder_r3(1.0, 8, 8, 2.0).unwrap();
    let w = OneForm::zeros(s.mesh.n_edges());
    assert!(matches!(second_variation_direct(&s, &w), Err(Error::HasBoundary(_))));
}

#[test]
fn harmonicity_residual_under_refinement() {
    assert_eq!(harmonicity_residual(&flat_t3(8)).unwrap(), 0.0);
    let check = |a: ImmersedSurface, b: ImmersedSurface| {
        let scale = (2.0 * energy(&b).unwrap()).sqrt();
        refinement_converges(harmonicity_residual(&a).unwrap(), harmonicity_residual(&b).unwrap(), scale)
    };
    assert!(check(clifford_torus(32, AlphaSign::Plus).unwrap(), clifford_torus(64, AlphaSign::Plus).unwrap()));
    assert!(check(
        flat_torus_s3(0.5, 32, 32, AlphaSign::Minus).unwrap(),
        flat_torus_s3(0.5, 64, 64, AlphaSign::Minus).unwrap()
    ));
    for l in [2, 3] {
        assert!(check(sphere_r3(1.0, l, false).unwrap(), sphere_r3(1.0, l + 1, false).unwrap()));
        assert!(check(
            geodesic_sphere_s3(0.7, l, AlphaSign::Plus).unwrap(),
            geodesic_sphere_s3(0.7, l + 1, AlphaSign::Plus).unwrap()
        ));
    }
    let p = |l| perturbed_sphere_r3(0.2, l).unwrap();
    assert!(!check(p(3), p(4)));
    assert!(harmonicity_residual(&p(4)).unwrap() > 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn weak_form_is_quadratic(seed in 0u64..1000, s in -3.0f64..3.0) {
        let c = flat_torus_s3(FRAC_1_SQRT_2, 6, 7, AlphaSign::Plus).unwrap();
        let form = IndexForm::new(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = OneForm((0..form.dec.n_edges()).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let a = form.value(&w);
        prop_assert!((form.value(&w.scaled(s)) - s * s * a).abs() <= 1e-10 * (1.0 + a.abs()) * (1.0 + s * s));
    }
}
