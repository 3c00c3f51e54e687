use faer::Mat;
use serde::{Deserialize, Serialize};

use super::{antisymmetry_residual, f_expansion_residual, pairing_with, require_closed, IndexForm, Variant};
use crate::error::{Error, Result};
use crate::hodge::{harmonic_basis_on, OneForm};
use crate::linalg::{generalized_eigen_dense, generalized_eigen_diag, shift_invert_lowest, SubspaceOptions, DENSE_LIMIT};
use crate::tangent::Vec2;
use crate::zoo::ImmersedSurface;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexOptions {
    /// Negative-eigenvalue tolerance; derived from the spectrum when unset.
    pub eps_neg: Option<f64>,
    /// Number of lowest full-space eigenpairs to compute.
    pub full_spectrum: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Largest DOF count sent to the dense solver; defaults to `DENSE_LIMIT`.
    #[serde(default)]
    pub dense_limit: Option<usize>,
}

/// `1e-8` times the spectral scale, floored at `1e-8 / area`.
pub fn negative_tolerance(scale: f64, area: f64) -> f64 {
    1e-8 * scale.abs().max(1.0 / area)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Residuals {
    /// Relative error of the pairing sum against the matching prediction.
    pub pairing: f64,
    pub antisym: f64,
    pub gauss_eq: f64,
    pub f_variant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FullSpectrum {
    pub dof: usize,
    pub solver: String,
    /// Lowest eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub eps_neg: f64,
    /// Certified lower bound on the number of negative eigenvalues.
    pub negative_count: usize,
    /// True when every computed eigenvalue is negative, so the count may
    /// be truncated.
    pub saturated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexReport {
    pub surface: String,
    pub ambient: String,
    pub genus: usize,
    pub harmonic_dim: usize,
    /// Eigenvalues of the form restricted to the harmonic span.
    pub eigenvalues: Vec<f64>,
    pub eps_neg: f64,
    pub index_estimate: usize,
    pub bound_required: bool,
    pub bound_satisfied: bool,
    pub residuals: Residuals,
    /// `single`, `double`, or null when the predictions coincide or
    /// there is no harmonic field.
    pub matching_variant: Option<Variant>,
    pub full_space: Option<FullSpectrum>,
}

impl IndexReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Eigenvalue table with columns `space,k,eigenvalue`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("space,k,eigenvalue\n");
        for (k, e) in self.eigenvalues.iter().enumerate() {
            out.push_str(&format!("harmonic,{k},{e:.17e}\n"));
        }
        if let Some(f) = &self.full_space {
            for (k, e) in f.eigenvalues.iter().enumerate() {
                out.push_str(&format!("full,{k},{e:.17e}\n"));
            }
        }
        out
    }
}

fn dense(n: usize, f: impl Fn(usize, usize) -> f64) -> Mat<f64> {
    Mat::from_fn(n, n, f)
}

/// Restricted form on the harmonic span, by polarization of the weak form.
fn restricted(form: &IndexForm<'_>, forms: &[OneForm]) -> Result<Vec<f64>> {
    let n = forms.len();
    if n == 0 {
        return Ok(vec![]);
    }
    let diag: Vec<f64> = forms.iter().map(|w| form.value(w)).collect();
    let mut q = dense(n, |_, _| 0.0);
    for i in 0..n {
        q[(i, i)] = diag[i];
        for j in i + 1..n {
            let v = 0.5 * (form.value(&forms[i].axpy(1.0, &forms[j])) - diag[i] - diag[j]);
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
    }
    let fields: Vec<_> = forms.iter().map(|w| form.sharp(w)).collect();
    let m = dense(n, |i, j| form.field_inner(&fields[i], &fields[j]));
    Ok(generalized_eigen_dense(q.as_ref(), m.as_ref())?.values)
}

/// Lowest `n_eigs` eigenvalues of the full weak form against the lumped
/// Whitney mass. Above the dense limit the Rayleigh-Ritz space is
/// augmented with `augment`, so the count dominates theirs.
pub fn full_spectrum(
    form: &IndexForm<'_>,
    n_eigs: usize,
    augment: &[OneForm],
    opts: &IndexOptions,
) -> Result<FullSpectrum> {
    let q = form.assemble()?;
    let m = &form.dec.edge_mass;
    let n = q.nrows();
    let area = form.metric.total_area();
    let row_scale = |a: &crate::linalg::SparseMat| -> f64 {
        let mut rows = vec![0.0; n];
        let r = a.as_ref();
        for j in 0..n {
            for (i, v) in r.row_idx_of_col(j).zip(r.val_of_col(j)) {
                rows[i] += v.abs();
            }
        }
        rows.iter().zip(m).map(|(s, mi)| s / mi).fold(0.0, f64::max)
    };
    let eps = opts.eps_neg.unwrap_or_else(|| negative_tolerance(row_scale(&q), area));
    let (solver, values) = if n <= opts.dense_limit.unwrap_or(DENSE_LIMIT) {
        ("dense", generalized_eigen_diag(crate::linalg::to_dense(&q).as_ref(), m)?.values)
    } else {
        // the Laplacian part is semidefinite, so the last shift makes Q + tau M
        // definite; smaller shifts converge faster and are kept when they factor
        let safe = 1.05 * row_scale(&form.assemble_potential()?) + 1.0 / area;
        let aug = Mat::from_fn(n, augment.len(), |i, j| augment[j].0[i]);
        let opts = SubspaceOptions { block: 2 * n_eigs + 8, seed: opts.seed, ..Default::default() };
        let mut result = Err(Error::NotDefinite(safe));
        for tau in [safe / 16.0, safe / 8.0, safe / 4.0, safe / 2.0, safe] {
            result = shift_invert_lowest(&q, m, tau, n_eigs, &opts, Some(aug.as_ref()));
            if !matches!(result, Err(Error::NotDefinite(_))) {
                break;
            }
        }
        ("shift-invert", result?.values)
    };
    let negative_count = values.iter().filter(|v| **v < -eps).count();
    Ok(FullSpectrum {
        dof: n,
        solver: solver.into(),
        eigenvalues: values.iter().take(n_eigs).copied().collect(),
        eps_neg: eps,
        negative_count,
        saturated: negative_count == values.len(),
    })
}

/// Index lower bound from the harmonic span, with the identity residuals
/// and, when requested, the low end of the full spectrum.
pub fn index_on_harmonic_span(surface: &ImmersedSurface, opts: &IndexOptions) -> Result<IndexReport> {
    require_closed(surface)?;
    let basis = harmonic_basis_on(surface)?;
    let form = IndexForm::new(surface)?;
    let eigenvalues = restricted(&form, &basis.forms)?;
    let area = form.metric.total_area();
    let scale = eigenvalues.iter().fold(0.0, |m: f64, e| m.max(e.abs()));
    let eps_neg = opts.eps_neg.unwrap_or_else(|| negative_tolerance(scale, area));
    let index_estimate = eigenvalues.iter().filter(|e| **e < -eps_neg).count();

    let pairings: Vec<_> = basis.forms.iter().map(|w| pairing_with(&form, w)).collect();
    let votes: Vec<Option<Variant>> = pairings.iter().map(|p| p.closest()).collect();
    let matching_variant = match votes.first() {
        Some(Some(v)) if votes.iter().all(|x| *x == Some(*v)) => Some(*v),
        _ => None,
    };
    let pairing = pairings
        .iter()
        .map(|p| p.relative_error(matching_variant.unwrap_or(Variant::Double)))
        .fold(0.0, f64::max);

    let samples: Vec<(usize, Vec2)> = (0..surface.n_vertices())
        .flat_map(|v| [Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(0.8, -0.6)].map(|x| (v, x)))
        .collect();
    let residuals = Residuals {
        pairing,
        antisym: antisymmetry_residual(surface),
        gauss_eq: surface.gauss_equation_residual(),
        f_variant: f_expansion_residual(surface, &form.gm, &samples),
    };

    let bound_required = surface.space.c() > 0.0 || surface.nominal_mean_curvature() != 0.0;
    let bound_satisfied = !bound_required || index_estimate >= basis.genus;
    let full_space = match opts.full_spectrum {
        Some(k) => Some(full_spectrum(&form, k, &basis.forms, opts)?),
        None => None,
    };
    Ok(IndexReport {
        surface: surface.name.clone(),
        ambient: surface.space.tag().into(),
        genus: basis.genus,
        harmonic_dim: basis.dim(),
        eigenvalues,
        eps_neg,
        index_estimate,
        bound_required,
        bound_satisfied,
        residuals,
        matching_variant,
        full_space,
    })
}

/// Harmonic-span report together with the lowest `n_eigs` full-space
/// eigenvalues.
pub fn index_full_space(surface: &ImmersedSurface, n_eigs: usize, opts: &IndexOptions) -> Result<IndexReport> {
    let opts = IndexOptions { full_spectrum: Some(n_eigs), ..opts.clone() };
    index_on_harmonic_span(surface, &opts)
}
