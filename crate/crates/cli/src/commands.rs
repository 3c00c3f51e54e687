use std::f64::consts::FRAC_1_SQRT_2;
use std::io::Write;

use cmc_index::ambient::{AlphaSign, Lattice};
use cmc_index::hodge::harmonic_basis_on;
use cmc_index::index_form::{antisymmetry_residual, energy, harmonicity_residual, index_on_harmonic_span};
use cmc_index::mesh::io;
use cmc_index::verify::{gauss_bonnet_defect, run_suite, SuiteOptions};
use cmc_index::zoo::{
    clifford_torus, cylinder_r3, flat_torus_s3, flat_torus_t3, geodesic_sphere_s3, perturbed_sphere_r3, sphere_r3,
    ImmersedSurface, Provenance,
};
use cmc_index::{Error, IndexOptions, IndexReport, Result};
use serde::Serialize;

use crate::config::{Format, RunConfig};

pub const GENERATORS: [&str; 7] = [
    "sphere_r3",
    "geodesic_sphere_s3",
    "flat_torus_s3",
    "flat_torus_t3",
    "clifford_torus",
    "cylinder_r3",
    "perturbed_sphere_r3",
];

/// Outcome of a command: whether its certification held.
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Serialize)]
struct Version {
    package: &'static str,
    git: &'static str,
}

const VERSION: Version = Version { package: env!("CARGO_PKG_VERSION"), git: env!("CMC_INDEX_GIT_HASH") };

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: Version,
    config: &'a RunConfig,
    result: T,
}

fn envelope<T: Serialize>(cfg: &RunConfig, result: T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope { version: VERSION, config: cfg, result })?;
    s.push('\n');
    Ok(s)
}

/// Writes the document to `--out`, or to stdout without one.
fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn sign(cfg: &RunConfig) -> AlphaSign {
    if cfg.alpha_sign == Some(-1) {
        AlphaSign::Minus
    } else {
        AlphaSign::Plus
    }
}

fn lattice(cfg: &RunConfig) -> Result<Lattice> {
    match &cfg.lattice {
        Some(l) => Lattice::new([[l[0], l[1], l[2]], [l[3], l[4], l[5]], [l[6], l[7], l[8]]])
            .map_err(|_| Error::BadParameter("lattice matrix is singular".into())),
        None => Ok(Lattice::cubic(1.0)),
    }
}

/// Builds a zoo surface. Out-of-range parameters are reported as
/// `BadParameter`.
pub fn generate(name: &str, cfg: &RunConfig) -> Result<ImmersedSurface> {
    let (nu, nv) = (cfg.nu.unwrap_or(32), cfg.nv.unwrap_or(32));
    let level = cfg.level.unwrap_or(3);
    let surface = match name {
        "sphere_r3" => sphere_r3(cfg.radius.unwrap_or(1.0), level, cfg.outward.unwrap_or(false)),
        "geodesic_sphere_s3" => geodesic_sphere_s3(cfg.rho.unwrap_or(0.8), level, sign(cfg)),
        "flat_torus_s3" => flat_torus_s3(cfg.r.unwrap_or(FRAC_1_SQRT_2), nu, nv, sign(cfg)),
        "flat_torus_t3" => {
            let o = cfg.offset.clone().unwrap_or_else(|| vec![0.0; 3]);
            flat_torus_t3(&lattice(cfg)?, nu, nv, [o[0], o[1], o[2]])
        }
        "clifford_torus" => clifford_torus(nu, sign(cfg)),
        "cylinder_r3" => cylinder_r3(cfg.radius.unwrap_or(1.0), nu, nv, cfg.length.unwrap_or(4.0)),
        "perturbed_sphere_r3" => perturbed_sphere_r3(cfg.amplitude.unwrap_or(0.2), level),
        other => return Err(Error::UnknownGenerator(other.into())),
    };
    surface.map_err(|e| match e {
        Error::Domain(m) => Error::BadParameter(m),
        other => other,
    })
}

/// The surface named by `--mesh` or `--generator`, with the ambient and
/// sign overrides applied.
pub fn load_surface(cfg: &RunConfig) -> Result<ImmersedSurface> {
    let surface = match (&cfg.mesh, &cfg.generator) {
        (Some(path), _) => {
            let (_, _, mut doc) = io::load(path)?;
            if let Some(a) = cfg.ambient {
                doc.ambient = a.tag().into();
            }
            if cfg.lattice.is_some() {
                doc.lattice = Some(*lattice(cfg)?.basis());
            }
            if cfg.alpha_sign.is_some() && doc.ambient == "S3" {
                doc.alpha_sign = cfg.alpha_sign;
            }
            if doc.name.is_none() {
                doc.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
            }
            ImmersedSurface::from_document(&doc)?
        }
        (None, Some(name)) => generate(name, cfg)?,
        (None, None) => return Err(Error::BadParameter("no surface: pass --mesh or --generator".into())),
    };
    Ok(surface)
}

fn index_options(cfg: &RunConfig) -> IndexOptions {
    IndexOptions {
        eps_neg: cfg.eps_neg,
        full_spectrum: cfg.full_spectrum,
        seed: cfg.seed.unwrap_or(0),
        dense_limit: cfg.dense_limit,
    }
}

pub fn zoo(cfg: &RunConfig) -> Result<Verdict> {
    let name = cfg.generator.as_deref().ok_or_else(|| Error::BadParameter("zoo needs a generator name".into()))?;
    if cfg.format() == Format::Csv {
        return Err(Error::BadParameter("zoo writes JSON meshes only".into()));
    }
    let s = generate(name, cfg)?;
    let mut doc = serde_json::to_string_pretty(&s.to_document())?;
    doc.push('\n');
    let genus = if s.mesh.is_closed() { s.mesh.genus()? } else { s.mesh.genus_with_boundary()? };
    let (h, h_std) = s.mean_curvature_stats();
    let area = s.metric()?.total_area();
    let summary = format!(
        "{}: {} vertices, {} faces, genus {genus}, H = {h:.6} (std {h_std:.1e}), area {area:.6}{}",
        s.name,
        s.n_vertices(),
        s.mesh.n_faces(),
        s.exact_area.map(|a| format!(" (exact {a:.6})")).unwrap_or_default(),
    );
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &doc)?;
            println!("{summary}");
        }
        None => {
            emit(cfg, &doc)?;
            eprintln!("{summary}");
        }
    }
    Ok(Verdict::Pass)
}

#[derive(Serialize)]
pub struct Analysis {
    surface: String,
    ambient: String,
    provenance: Provenance,
    vertices: usize,
    edges: usize,
    faces: usize,
    euler_characteristic: i64,
    boundary_loops: usize,
    genus: usize,
    area: f64,
    exact_area: Option<f64>,
    mean_curvature: f64,
    mean_curvature_std: f64,
    gauss_curvature_min: f64,
    gauss_curvature_max: f64,
    energy: f64,
    residuals: AnalysisResiduals,
}

#[derive(Serialize)]
struct AnalysisResiduals {
    gauss_equation: f64,
    antisymmetry: f64,
    shape_symmetry: f64,
    tension: f64,
    /// Null on bordered meshes.
    gauss_bonnet: Option<f64>,
}

pub fn analysis(s: &ImmersedSurface) -> Result<Analysis> {
    let mesh = &s.mesh;
    let closed = mesh.is_closed();
    let (h, h_std) = s.mean_curvature_stats();
    let k = |f: fn(f64, f64) -> f64, init: f64| s.k_sigma.iter().copied().fold(init, f);
    Ok(Analysis {
        surface: s.name.clone(),
        ambient: s.space.label(),
        provenance: s.provenance,
        vertices: mesh.n_vertices(),
        edges: mesh.n_edges(),
        faces: mesh.n_faces(),
        euler_characteristic: mesh.euler_characteristic(),
        boundary_loops: mesh.boundary_loops(),
        genus: if closed { mesh.genus()? } else { mesh.genus_with_boundary()? },
        area: s.metric()?.total_area(),
        exact_area: s.exact_area,
        mean_curvature: h,
        mean_curvature_std: h_std,
        gauss_curvature_min: k(f64::min, f64::INFINITY),
        gauss_curvature_max: k(f64::max, f64::NEG_INFINITY),
        energy: energy(s)?,
        residuals: AnalysisResiduals {
            gauss_equation: s.gauss_equation_residual(),
            antisymmetry: antisymmetry_residual(s),
            shape_symmetry: s.symmetry_residual(),
            tension: harmonicity_residual(s)?,
            gauss_bonnet: if closed { Some(gauss_bonnet_defect(mesh)?) } else { None },
        },
    })
}

pub fn analyze(cfg: &RunConfig) -> Result<Verdict> {
    let s = load_surface(cfg)?;
    let text = match cfg.format() {
        Format::Json => envelope(cfg, analysis(&s)?)?,
        Format::Csv => {
            let mut out = String::from("vertex,H,K\n");
            for v in 0..s.n_vertices() {
                out.push_str(&format!("{v},{:.17e},{:.17e}\n", s.mean_curvature(v), s.k_sigma[v]));
            }
            out
        }
    };
    emit(cfg, &text)?;
    Ok(Verdict::Pass)
}

pub fn harmonic(cfg: &RunConfig) -> Result<Verdict> {
    let s = load_surface(cfg)?;
    let basis = harmonic_basis_on(&s)?;
    let text = match cfg.format() {
        Format::Json => basis.to_json()? + "\n",
        Format::Csv => {
            let mut out = String::from("edge");
            for k in 0..basis.dim() {
                out.push_str(&format!(",form_{k}"));
            }
            out.push('\n');
            for e in 0..s.mesh.n_edges() {
                out.push_str(&e.to_string());
                for w in &basis.forms {
                    out.push_str(&format!(",{:.17e}", w.0[e]));
                }
                out.push('\n');
            }
            out
        }
    };
    emit(cfg, &text)?;
    Ok(Verdict::Pass)
}

fn verdict(r: &IndexReport) -> Verdict {
    if r.bound_satisfied {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn index_summary(r: &IndexReport) -> String {
    let bound = match (r.bound_required, r.bound_satisfied) {
        (false, _) => "not applicable",
        (true, true) => "satisfied",
        (true, false) => "VIOLATED",
    };
    let full = r
        .full_space
        .as_ref()
        .map(|f| format!(", full-space count {} ({})", f.negative_count, f.solver))
        .unwrap_or_default();
    format!(
        "{} [{}]: genus {}, index estimate {}{full}, bound {bound}",
        r.surface, r.ambient, r.genus, r.index_estimate
    )
}

pub fn index(cfg: &RunConfig) -> Result<Verdict> {
    let s = load_surface(cfg)?;
    let report = index_on_harmonic_span(&s, &index_options(cfg))?;
    let text = match cfg.format() {
        Format::Json => envelope(cfg, &report)?,
        Format::Csv => report.to_csv(),
    };
    emit(cfg, &text)?;
    if cfg.out.is_some() {
        println!("{}", index_summary(&report));
    }
    Ok(verdict(&report))
}

pub fn verify(cfg: &RunConfig) -> Result<Verdict> {
    let defaults = SuiteOptions::default();
    let opts = SuiteOptions {
        alpha_signs: match cfg.alpha_sign {
            Some(_) => vec![sign(cfg)],
            None => defaults.alpha_signs,
        },
        resolution: cfg.resolution.unwrap_or(defaults.resolution),
        control: cfg.control.unwrap_or(defaults.control),
        seed: cfg.seed.unwrap_or(defaults.seed),
    };
    let report = run_suite(&opts)?;
    print!("{}", report.matrix());
    println!(
        "{} of {} checks passed; matching variant: {}",
        report.checks.iter().filter(|c| c.passed).count(),
        report.checks.len(),
        report.matching_variant.map(|v| v.name()).unwrap_or("none")
    );
    if let Some(path) = &cfg.out {
        let text = match cfg.format() {
            Format::Json => envelope(cfg, &report)?,
            Format::Csv => {
                let mut out = String::from("name,surface,value,tolerance,passed\n");
                for c in &report.checks {
                    out.push_str(&format!(
                        "{},\"{}\",{:.17e},{:.17e},{}\n",
                        c.name, c.surface, c.value, c.tolerance, c.passed
                    ));
                }
                out
            }
        };
        std::fs::write(path, &text)?;
    }
    Ok(if report.all_passed { Verdict::Pass } else { Verdict::Fail })
}

#[derive(Serialize)]
struct FullReport {
    analysis: Analysis,
    index: IndexReport,
}

pub fn report(cfg: &RunConfig) -> Result<Verdict> {
    let s = load_surface(cfg)?;
    let index = index_on_harmonic_span(&s, &index_options(cfg))?;
    let v = verdict(&index);
    let summary = index_summary(&index);
    let text = match cfg.format() {
        Format::Json => envelope(cfg, FullReport { analysis: analysis(&s)?, index })?,
        Format::Csv => index.to_csv(),
    };
    emit(cfg, &text)?;
    if cfg.out.is_some() {
        println!("{summary}");
    }
    Ok(v)
}
