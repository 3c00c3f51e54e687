//! Invariant suite over the analytic surface set: a pass/fail matrix of
//! pointwise identities, topology, pairing, tension refinement and the
//! cut-off decomposition.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ambient::{AlphaSign, Lattice};
use crate::error::Result;
use crate::hodge::{harmonic_basis, harmonic_basis_on, OneForm};
use crate::index_form::{
    antisymmetry_residual, cutoff_pairing, cutoff_second_variation, dN_operator, energy, f_expansion_residual,
    harmonicity_residual, pairing_sum, refinement_converges, tent_cutoff, Variant,
};
use crate::mesh::builders::{double_torus, icosphere, torus_grid_combinatorial};
use crate::mesh::{metric_quantities, TriangleMesh};
use crate::tangent::{identities, Mat2, Vec2};
use crate::zoo::{
    clifford_torus, cylinder_harmonic_forms, cylinder_r3, flat_torus_s3, flat_torus_t3, geodesic_sphere_s3,
    perturbed_sphere_r3, sphere_r3, ImmersedSurface,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteOptions {
    /// Signs of the invariant shape operator to exercise on the sphere.
    pub alpha_signs: Vec<AlphaSign>,
    /// Grid size of the tori; spheres use a comparable icosphere level.
    /// The 2% pairing tolerance holds from 64 up.
    pub resolution: usize,
    /// Adds the non-CMC control surface, whose tension check must fail.
    pub control: bool,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { alpha_signs: vec![AlphaSign::Plus, AlphaSign::Minus], resolution: 64, control: false, seed: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub surface: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
    pub matching_variant: Option<Variant>,
    pub all_passed: bool,
}

impl SuiteReport {
    /// One line per check: `PASS name [surface] value <= tolerance`.
    pub fn matrix(&self) -> String {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{} {:<22} {:<40} {:.3e} (tol {:.1e})\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.surface,
                    c.value,
                    c.tolerance
                )
            })
            .collect()
    }
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn at_most(&mut self, name: &str, surface: &str, value: f64, tolerance: f64) {
        let passed = value <= tolerance;
        self.push(name, surface, value, tolerance, passed);
    }

    fn push(&mut self, name: &str, surface: &str, value: f64, tolerance: f64, passed: bool) {
        self.checks.push(Check { name: name.into(), surface: surface.into(), value, tolerance, passed });
    }
}

fn closed_zoo(n: usize, level: usize, sign: AlphaSign) -> Result<Vec<ImmersedSurface>> {
    Ok(vec![
        clifford_torus(n, sign)?,
        flat_torus_s3(0.5, n, n, sign)?,
        flat_torus_s3(0.8, n, n, sign)?,
        geodesic_sphere_s3(0.8, level, sign)?,
    ])
}

fn level_for(n: usize) -> usize {
    if n <= 32 {
        3
    } else {
        4
    }
}

pub fn run_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let n = opts.resolution.max(8);
    let level = level_for(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut s = Suite { checks: vec![] };

    let mut surfaces = vec![
        sphere_r3(1.0, level, false)?,
        flat_torus_t3(&Lattice::cubic(1.0), n, n, [0.0; 3])?,
        cylinder_r3(1.0, n, n, 4.0)?,
    ];
    for &sign in &opts.alpha_signs {
        surfaces.extend(closed_zoo(n, level, sign)?);
    }

    // pointwise identities
    for surf in &surfaces {
        let name = format!("{} {}", surf.name, surf.space.label());
        s.at_most("antisymmetry", &name, antisymmetry_residual(surf), 1e-12);
        s.at_most("gauss_equation", &name, surf.gauss_equation_residual(), 1e-10);
        let gm = dN_operator(surf)?;
        let samples: Vec<(usize, Vec2)> = (0..1000)
            .map(|_| (rng.gen_range(0..surf.n_vertices()), Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        s.at_most("f_expansion", &name, f_expansion_residual(surf, &gm, &samples), 1e-10);
        let alpha = Mat2::j() * gm.lambda;
        let frame = samples
            .iter()
            .map(|(v, x)| {
                let a = surf.shape_op[*v];
                identities::trace_pairing_defect(a, *x)
                    .abs()
                    .max(identities::alpha_pairing_defect(a, alpha, *x).abs())
            })
            .fold(0.0, f64::max);
        s.at_most("frame_pairing", &name, frame, 1e-12);
    }

    // topology
    for (label, mesh, g) in [
        ("icosphere", icosphere(3), 0usize),
        ("torus", torus_grid_combinatorial(24, 32), 1),
        ("double_torus", double_torus(2), 2),
    ] {
        let dim = harmonic_basis(&mesh)?.dim();
        s.push("harmonic_dimension", label, dim as f64, (2 * g) as f64, dim == 2 * g);
        s.at_most("gauss_bonnet", label, gauss_bonnet_defect(&mesh)?, 1e-9);
    }

    // pairing sums: the variant must be unique and shared
    let mut variants = vec![];
    for surf in surfaces.iter().filter(|x| x.mesh.is_closed() && x.mesh.genus().ok() == Some(1)) {
        let name = format!("{} {}", surf.name, surf.space.label());
        for w in harmonic_basis_on(surf)?.forms {
            let p = pairing_sum(surf, &w)?;
            match p.closest() {
                Some(v) => {
                    variants.push(v);
                    let other = if v == Variant::Single { Variant::Double } else { Variant::Single };
                    s.at_most(&format!("pairing[{}]", v.name()), &name, p.relative_error(v), 0.02);
                    s.push(
                        "pairing_unique",
                        &name,
                        p.relative_error(other),
                        0.02,
                        p.relative_error(other) > 0.02,
                    );
                }
                None => s.at_most("pairing[both]", &name, p.sum.abs(), 1e-10 * p.mass.max(1.0)),
            }
        }
    }
    let matching_variant = variants.first().copied().filter(|v| variants.iter().all(|x| x == v));
    s.push(
        "pairing_variant_shared",
        "all",
        variants.len() as f64,
        0.0,
        matching_variant.is_some() || variants.is_empty(),
    );

    // tension refinement
    let mut pairs: Vec<(ImmersedSurface, ImmersedSurface)> = vec![
        (sphere_r3(1.0, level - 1, false)?, sphere_r3(1.0, level, false)?),
        (flat_torus_t3(&Lattice::cubic(1.0), n / 2, n / 2, [0.0; 3])?, flat_torus_t3(&Lattice::cubic(1.0), n, n, [0.0; 3])?),
    ];
    for &sign in &opts.alpha_signs {
        pairs.push((geodesic_sphere_s3(0.8, level - 1, sign)?, geodesic_sphere_s3(0.8, level, sign)?));
        pairs.push((clifford_torus(n / 2, sign)?, clifford_torus(n, sign)?));
    }
    if opts.control {
        pairs.push((perturbed_sphere_r3(0.2, level - 1)?, perturbed_sphere_r3(0.2, level)?));
    }
    for (coarse, fine) in &pairs {
        let (a, b) = (harmonicity_residual(coarse)?, harmonicity_residual(fine)?);
        let scale = (2.0 * energy(fine)?).sqrt();
        let ratio = if b > 0.0 { a / b } else { f64::INFINITY };
        s.push("tension_refinement", &fine.name, ratio, 2.0, refinement_converges(a, b, scale));
    }

    // cut-off decomposition on a bordered cylinder
    let (around, along) = (64, 256);
    let cyl = cylinder_r3(1.0, around, along, 8.0 * PI)?;
    let seed = (around / 2) * along + along / 2;
    let phi = tent_cutoff(&cyl.mesh, seed, 10.0)?;
    let v = matching_variant.unwrap_or(Variant::Double);
    for (label, w) in ["dtheta", "dz"].iter().zip(cylinder_harmonic_forms(&cyl)) {
        let t = cutoff_second_variation(&cyl, &OneForm(w), &phi)?;
        s.at_most("cutoff_decomposition", &format!("{} {label}", cyl.name), t.relative_error(v), 0.03);
    }
    let [w, _] = cylinder_harmonic_forms(&cyl);
    let p = cutoff_pairing(&cyl, &OneForm(w), &phi)?;
    s.push("cutoff_pairing_negative", &cyl.name, p.sum, 0.0, p.sum < 0.0);

    let all_passed = s.checks.iter().all(|c| c.passed);
    Ok(SuiteReport { checks: s.checks, matching_variant, all_passed })
}

/// `|sum of angle defects - 2 pi chi|`.
pub fn gauss_bonnet_defect(mesh: &TriangleMesh) -> Result<f64> {
    let m = metric_quantities(mesh)?;
    let total: f64 = m.angle_defect.iter().sum();
    Ok((total - TAU * mesh.euler_characteristic() as f64).abs())
}
