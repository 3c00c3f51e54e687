use serde::Serialize;

use super::{Dec, OneForm, Sharp};
use crate::error::{Error, Result};
use crate::linalg::{shift_invert_lowest, SubspaceOptions};
use crate::mesh::{metric_quantities, MetricData, TriangleMesh};
use crate::vecn::{self, V4};
use crate::zoo::ImmersedSurface;

/// Largest admissible scale-free harmonicity residual of a basis form.
pub const HARMONIC_TOL: f64 = 1e-8;

/// Orthonormal basis of discrete harmonic 1-forms on a closed surface.
#[derive(Clone, Debug, Serialize)]
pub struct HarmonicBasis {
    pub forms: Vec<OneForm>,
    /// Gram matrix of the sharped fields after orthonormalization.
    pub gram: Vec<Vec<f64>>,
    #[serde(skip)]
    pub genus: usize,
    /// Generalized eigenvalues of the kernel directions.
    #[serde(skip)]
    pub kernel_values: Vec<f64>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl HarmonicBasis {
    pub fn dim(&self) -> usize {
        self.forms.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Harmonic basis orthonormalized in the lumped L2 product of the ambient
/// sharped fields.
pub fn harmonic_basis(mesh: &TriangleMesh) -> Result<HarmonicBasis> {
    let metric = metric_quantities(mesh)?;
    let sharp = Sharp::new(mesh, &metric)?;
    let area = metric.vertex_area.clone();
    build(mesh, &metric, |w| sharp.apply_ambient(w), &area)
}

/// Harmonic basis orthonormalized with the sharped fields projected onto
/// the vertex frames of `surface`.
pub fn harmonic_basis_on(surface: &ImmersedSurface) -> Result<HarmonicBasis> {
    let metric = surface.metric()?;
    let sharp = Sharp::new(&surface.mesh, &metric)?;
    let area = metric.vertex_area.clone();
    let project = |w: &OneForm| -> Vec<V4> {
        sharp
            .apply_ambient(w)
            .iter()
            .enumerate()
            .map(|(v, x)| surface.to_ambient(v, surface.to_frame(v, x)))
            .collect()
    };
    build(&surface.mesh, &metric, project, &area)
}

fn build(
    mesh: &TriangleMesh,
    metric: &MetricData,
    field: impl Fn(&OneForm) -> Vec<V4>,
    area: &[f64],
) -> Result<HarmonicBasis> {
    let genus = mesh.genus()?;
    let dec = Dec::new(mesh, metric);
    let (values, raw) = kernel(&dec, 2 * genus)?;
    let ip = |a: &[V4], b: &[V4]| -> f64 { a.iter().zip(b).zip(area).map(|((x, y), w)| w * vecn::dot(x, y)).sum() };

    // modified Gram-Schmidt in the sharped product
    let mut forms: Vec<OneForm> = Vec::with_capacity(raw.len());
    let mut fields: Vec<Vec<V4>> = Vec::with_capacity(raw.len());
    for w in raw {
        let mut w = w;
        for _ in 0..2 {
            let f = field(&w);
            for (q, fq) in forms.iter().zip(&fields) {
                w = w.axpy(-ip(&f, fq), q);
            }
        }
        let f = field(&w);
        let n = ip(&f, &f).sqrt();
        if !(n > 0.0) {
            return Err(Error::SolverFailure("harmonic form with vanishing sharp".into()));
        }
        let w = w.scaled(1.0 / n);
        fields.push(field(&w));
        forms.push(w);
    }
    let gram = fields.iter().map(|a| fields.iter().map(|b| ip(a, b)).collect()).collect();
    let residuals: Vec<f64> = forms.iter().map(|w| dec.harmonic_residual(w)).collect();
    if let Some(r) = residuals.iter().copied().find(|r| !(*r <= HARMONIC_TOL)) {
        return Err(Error::NotHarmonic(r));
    }
    Ok(HarmonicBasis { forms, gram, genus, kernel_values: values, residuals })
}

/// Kernel of the symmetric 1-form Laplacian with the lumped Whitney mass,
/// by shifted inverse iteration. Fails unless exactly `expected` Ritz
/// values fall below `1e-9` of the spectral scale.
fn kernel(dec: &Dec, expected: usize) -> Result<(Vec<f64>, Vec<OneForm>)> {
    let l = dec.laplacian1()?;
    let m = &dec.edge_mass;
    let mut rows = vec![0.0; dec.n_edges()];
    let lr = l.as_ref();
    for j in 0..dec.n_edges() {
        for (i, v) in lr.row_idx_of_col(j).zip(lr.val_of_col(j)) {
            rows[i] += v.abs();
        }
    }
    let scale = rows.iter().zip(m).map(|(r, mi)| r / mi).fold(0.0, f64::max);
    let thresh = 1e-9 * scale;
    let opts = SubspaceOptions { block: expected + 12, tol: 1e-12, ..Default::default() };
    let pairs = shift_invert_lowest(&l, m, 1e-10 * scale, expected, &opts, None)?;
    let found = pairs.values.iter().filter(|&&v| v.abs() <= thresh).count();
    if found != expected {
        return Err(Error::KernelDimensionMismatch { found, expected });
    }
    let n = dec.n_edges();
    let forms = (0..expected)
        .map(|j| OneForm((0..n).map(|i| pairs.vectors[(i, j)]).collect()))
        .collect();
    Ok((pairs.values[..expected].to_vec(), forms))
}
