//! Second variation of the Dirichlet energy of the generalized Gauss map,
//! evaluated on tangent test fields.
//!
//! The ground truth is the weak form
//! `D2(w) = |d w|^2 + |delta w|^2 - int K |xi|^2 - int F(xi)` with
//! `xi = sharp(w)` and `F(xi) = |dN|^2 |xi|^2 - |dN^T xi|^2`. The closed
//! forms for harmonic fields are cross-checks in two coefficient variants.

mod cutoff;
pub mod spectrum;

pub use cutoff::{
    check_compact_support, cutoff_pairing, graph_distance, cutoff_second_variation, tent_cutoff, cutoff_index_count, CutoffPairing,
    CutoffTerms, CutoffIndexCount,
};
pub use spectrum::{
    index_full_space, index_on_harmonic_span, negative_tolerance, FullSpectrum, IndexOptions, IndexReport,
    Residuals,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hodge::{flat_ambient, Dec, OneForm, Sharp, TangentField, HARMONIC_TOL};
use crate::linalg::{SparseMat, TripletBuilder};
use crate::mesh::MetricData;
use crate::tangent::{identities, Mat2, Vec2};
use crate::vecn::{self, V3, V4};
use crate::zoo::ImmersedSurface;

/// Coefficient variant of the closed forms for harmonic fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `-(4H^2 + c)|xi|^2 + 2H<A xi, xi> - <A xi, alpha xi>`.
    Single,
    /// `-(4H^2 + 2c)|xi|^2 + 2H<A xi, xi> - 2<A xi, alpha xi>`.
    Double,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Single, Variant::Double];

    /// `(curvature coefficient, alpha coefficient)` of the pointwise density.
    fn coefficients(self, h: f64, c: f64) -> (f64, f64) {
        match self {
            Variant::Single => (4.0 * h * h + c, 1.0),
            Variant::Double => (4.0 * h * h + 2.0 * c, 2.0),
        }
    }

    /// Predicted `D2(xi) + D2(J xi)` per unit `|xi|^2`.
    pub fn pairing_constant(self, h: f64, c: f64) -> f64 {
        match self {
            Variant::Single => -(4.0 * h * h + 2.0 * c),
            Variant::Double => -(4.0 * h * h + 4.0 * c),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Single => "single",
            Variant::Double => "double",
        }
    }
}

/// Per-vertex Gauss map and its differential `-(A + lambda J)` in the
/// vertex frame.
#[derive(Clone, Debug)]
pub struct GaussMapData {
    pub n: Vec<V3>,
    pub dn: Vec<Mat2>,
    pub lambda: f64,
}

#[allow(non_snake_case)]
pub fn dN_operator(surface: &ImmersedSurface) -> Result<GaussMapData> {
    let lambda = surface.space.lambda();
    let alpha = Mat2::j() * lambda;
    let n = (0..surface.n_vertices()).map(|v| surface.gauss_map(v)).collect::<Result<Vec<_>>>()?;
    let dn = surface.shape_op.iter().map(|a| (*a + alpha) * -1.0).collect();
    Ok(GaussMapData { n, dn, lambda })
}

/// `E = 1/2 sum_v area_v |dN_v|^2`.
pub fn energy(surface: &ImmersedSurface) -> Result<f64> {
    let gm = dN_operator(surface)?;
    let metric = surface.metric()?;
    Ok(0.5 * gm.dn.iter().zip(&metric.vertex_area).map(|(d, a)| a * d.norm_sq()).sum::<f64>())
}

/// Pointwise `F(xi)` from the columns of `dN`.
#[allow(non_snake_case)]
pub fn F_direct(gm: &GaussMapData, xi: &TangentField) -> Vec<f64> {
    gm.dn.iter().zip(&xi.0).map(|(d, x)| identities::f_direct(*d, *x)).collect()
}

/// Split of the weak form into its four terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct WeakTerms {
    pub d_norm2: f64,
    pub delta_norm2: f64,
    pub curvature: f64,
    pub f_term: f64,
}

impl WeakTerms {
    pub fn total(&self) -> f64 {
        self.d_norm2 + self.delta_norm2 - self.curvature - self.f_term
    }
}

/// Precomputed operators for repeated evaluation of the weak form. Works on
/// bordered meshes too; the public closed-surface entry points check
/// closedness themselves.
#[derive(Clone, Debug)]
pub struct IndexForm<'a> {
    pub surface: &'a ImmersedSurface,
    pub metric: MetricData,
    pub dec: Dec,
    pub gm: GaussMapData,
    sharp: Sharp,
    framed: Vec<Vec<(usize, Vec2)>>,
    /// `K I + F_v` per vertex: the pointwise potential.
    potential: Vec<Mat2>,
}

impl<'a> IndexForm<'a> {
    pub fn new(surface: &'a ImmersedSurface) -> Result<Self> {
        let metric = surface.metric()?;
        let dec = Dec::new(&surface.mesh, &metric);
        let gm = dN_operator(surface)?;
        let sharp = Sharp::new(&surface.mesh, &metric)?;
        let framed = sharp.framed_rows(surface);
        let potential = gm
            .dn
            .iter()
            .zip(&surface.k_sigma)
            .map(|(d, k)| Mat2::identity() * (k + d.norm_sq()) - *d * d.transpose())
            .collect();
        Ok(Self { surface, metric, dec, gm, sharp, framed, potential })
    }

    pub fn area(&self, v: usize) -> f64 {
        self.metric.vertex_area[v]
    }

    pub fn sharp(&self, w: &OneForm) -> TangentField {
        TangentField(
            self.framed
                .iter()
                .map(|row| row.iter().fold(Vec2::zero(), |acc, (e, c)| acc + *c * w.0[*e]))
                .collect(),
        )
    }

    pub fn sharp_ambient(&self, w: &OneForm) -> Vec<V4> {
        self.sharp.apply_ambient(w)
    }

    pub fn flat(&self, field: &TangentField) -> OneForm {
        let amb: Vec<V4> = field.0.iter().enumerate().map(|(v, x)| self.surface.to_ambient(v, *x)).collect();
        flat_ambient(&self.surface.mesh, &amb)
    }

    /// Lumped `int |xi|^2`.
    pub fn field_mass(&self, xi: &TangentField) -> f64 {
        xi.0.iter().enumerate().map(|(v, x)| self.area(v) * x.norm_sq()).sum()
    }

    pub fn field_inner(&self, a: &TangentField, b: &TangentField) -> f64 {
        a.0.iter().zip(&b.0).enumerate().map(|(v, (x, y))| self.area(v) * x.dot(*y)).sum()
    }

    pub fn terms(&self, w: &OneForm) -> WeakTerms {
        let xi = self.sharp(w);
        let mut curvature = 0.0;
        let mut f_term = 0.0;
        for (v, x) in xi.0.iter().enumerate() {
            let a = self.area(v);
            curvature += a * self.surface.k_sigma[v] * x.norm_sq();
            f_term += a * identities::f_direct(self.gm.dn[v], *x);
        }
        WeakTerms { d_norm2: self.dec.d1_norm2(w), delta_norm2: self.dec.delta_norm2(w), curvature, f_term }
    }

    pub fn value(&self, w: &OneForm) -> f64 {
        self.terms(w).total()
    }

    /// Closed-form value for a harmonic field, pointwise `H` and `A`.
    pub fn closed_form(&self, xi: &TangentField, variant: Variant) -> f64 {
        let c = self.surface.space.c();
        let alpha = Mat2::j() * self.gm.lambda;
        xi.0.iter()
            .enumerate()
            .map(|(v, x)| {
                let a = self.surface.shape_op[v];
                let h = 0.5 * a.trace();
                let (k0, k1) = variant.coefficients(h, c);
                let ax = a.apply(*x);
                self.area(v) * (-k0 * x.norm_sq() + 2.0 * h * ax.dot(*x) - k1 * ax.dot(alpha.apply(*x)))
            })
            .sum()
    }

    /// `int (4H^2 + c)|xi|^2`-type weight with pointwise `H`: returns
    /// `sum_v area_v (4 H_v^2 |xi_v|^2, c |xi_v|^2)`.
    fn curvature_masses(&self, xi: &TangentField, weight: impl Fn(usize) -> f64) -> (f64, f64) {
        let c = self.surface.space.c();
        let mut h_part = 0.0;
        let mut c_part = 0.0;
        for (v, x) in xi.0.iter().enumerate() {
            let h = self.surface.mean_curvature(v);
            let m = self.area(v) * weight(v) * x.norm_sq();
            h_part += 4.0 * h * h * m;
            c_part += c * m;
        }
        (h_part, c_part)
    }

    /// The symmetric matrix of the weak form over all edge values.
    pub fn assemble(&self) -> Result<SparseMat> {
        let n = self.dec.n_edges();
        let mut t = TripletBuilder::new(n);
        self.push_laplacian(&mut t);
        self.push_potential(&mut t, -1.0);
        t.build()
    }

    /// The potential part `sum_v area_v S_v^T (K + F_v) S_v` alone.
    pub fn assemble_potential(&self) -> Result<SparseMat> {
        let mut t = TripletBuilder::new(self.dec.n_edges());
        self.push_potential(&mut t, 1.0);
        t.build()
    }

    fn push_laplacian(&self, t: &mut TripletBuilder) {
        let dec = &self.dec;
        for (fe, s2) in dec.face_edges.iter().zip(&dec.star2) {
            let idx = fe.map(|(e, _)| e);
            let sg = fe.map(|(_, s)| s);
            t.push_outer(&idx, &sg, &sg, *s2);
        }
        for (ve, a) in dec.vertex_edges.iter().zip(&dec.star0) {
            let idx: Vec<usize> = ve.iter().map(|(e, _)| *e).collect();
            let c: Vec<f64> = ve.iter().map(|(e, s)| s * dec.star1[*e]).collect();
            t.push_outer(&idx, &c, &c, 1.0 / a);
        }
    }

    fn push_potential(&self, t: &mut TripletBuilder, sign: f64) {
        for (v, row) in self.framed.iter().enumerate() {
            let p = self.potential[v];
            let s = sign * self.area(v);
            for (e, ce) in row {
                let pc = p.apply(*ce);
                for (f, cf) in row {
                    t.push(*e, *f, s * pc.dot(*cf));
                }
            }
        }
    }
}

fn require_closed(surface: &ImmersedSurface) -> Result<()> {
    let b = surface.mesh.boundary_edge_count();
    if b > 0 {
        return Err(Error::HasBoundary(b));
    }
    Ok(())
}

fn require_harmonic(form: &IndexForm<'_>, w: &OneForm) -> Result<()> {
    let r = form.dec.harmonic_residual(w);
    if r <= HARMONIC_TOL {
        Ok(())
    } else {
        Err(Error::NotHarmonic(r))
    }
}

/// Weak-form second variation in the direction `sharp(w)` on a closed
/// surface.
pub fn second_variation_direct(surface: &ImmersedSurface, w: &OneForm) -> Result<f64> {
    require_closed(surface)?;
    Ok(IndexForm::new(surface)?.value(w))
}

/// Closed-form second variation for a discrete harmonic `w`.
pub fn second_variation_closed_form(surface: &ImmersedSurface, w: &OneForm, variant: Variant) -> Result<f64> {
    require_closed(surface)?;
    let form = IndexForm::new(surface)?;
    require_harmonic(&form, w)?;
    Ok(form.closed_form(&form.sharp(w), variant))
}

/// `D2(xi) + D2(J xi)` for a harmonic field against both predictions.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Pairing {
    pub d2_xi: f64,
    pub d2_perp: f64,
    pub sum: f64,
    /// `int |xi|^2`.
    pub mass: f64,
    pub predicted_single: f64,
    pub predicted_double: f64,
}

impl Pairing {
    pub fn predicted(&self, v: Variant) -> f64 {
        match v {
            Variant::Single => self.predicted_single,
            Variant::Double => self.predicted_double,
        }
    }

    pub fn relative_error(&self, v: Variant) -> f64 {
        let p = self.predicted(v);
        let scale = if p != 0.0 { p.abs() } else { self.mass.max(f64::MIN_POSITIVE) };
        (self.sum - p).abs() / scale
    }

    /// The variant closest to the measured sum, if the two predictions
    /// differ.
    pub fn closest(&self) -> Option<Variant> {
        if (self.predicted_single - self.predicted_double).abs() <= 1e-12 * self.mass {
            return None;
        }
        Variant::ALL
            .into_iter()
            .min_by(|a, b| self.relative_error(*a).partial_cmp(&self.relative_error(*b)).unwrap())
    }
}

/// Pairing identity for harmonic `w` with `xi_perp = J xi` realized as the
/// flat of the rotated field.
pub fn pairing_sum(surface: &ImmersedSurface, w: &OneForm) -> Result<Pairing> {
    require_closed(surface)?;
    let form = IndexForm::new(surface)?;
    require_harmonic(&form, w)?;
    Ok(pairing_with(&form, w))
}

pub(crate) fn pairing_with(form: &IndexForm<'_>, w: &OneForm) -> Pairing {
    let xi = form.sharp(w);
    let perp = form.flat(&TangentField(xi.0.iter().map(|x| x.rot90()).collect()));
    let d2_xi = form.value(w);
    let d2_perp = form.value(&perp);
    let (h_part, c_part) = form.curvature_masses(&xi, |_| 1.0);
    Pairing {
        d2_xi,
        d2_perp,
        sum: d2_xi + d2_perp,
        mass: form.field_mass(&xi),
        predicted_single: -(h_part + 2.0 * c_part),
        predicted_double: -(h_part + 4.0 * c_part),
    }
}

/// `L2` norm of the tangential part of the cotan Laplacian of the Gauss
/// map, per unit vertex area. Boundary vertices are skipped.
pub fn harmonicity_residual(surface: &ImmersedSurface) -> Result<f64> {
    let metric = surface.metric()?;
    let gm = dN_operator(surface)?;
    let mesh = &surface.mesh;
    let mut lap = vec![[0.0; 3]; mesh.n_vertices()];
    for (e, [a, b]) in mesh.edges().iter().enumerate() {
        let w = metric.cot_weight[e];
        let d = vecn::sub(&gm.n[*b], &gm.n[*a]);
        lap[*a] = vecn::axpy(&lap[*a], w, &d);
        lap[*b] = vecn::axpy(&lap[*b], -w, &d);
    }
    let boundary = mesh.boundary_vertices();
    let mut total = 0.0;
    for v in 0..mesh.n_vertices() {
        if boundary[v] {
            continue;
        }
        let a = metric.vertex_area[v];
        let t = vecn::scale(&lap[v], 1.0 / a);
        let n = &gm.n[v];
        let tan = vecn::axpy(&t, -vecn::dot(&t, n), n);
        total += a * vecn::dot(&tan, &tan);
    }
    Ok(total.sqrt())
}

/// Refinement check for the tension: the finer residual is at most half the
/// coarser, or both sit at roundoff relative to `scale` (the `L2` norm of
/// `dN`), where a ratio carries no information.
pub fn refinement_converges(coarse: f64, fine: f64, scale: f64) -> bool {
    let floor = 1e-10 * scale.max(1.0);
    2.0 * fine <= coarse || (coarse <= floor && fine <= floor)
}

/// `max_v |<A_v, lambda J>_HS|`.
pub fn antisymmetry_residual(surface: &ImmersedSurface) -> f64 {
    let alpha = Mat2::j() * surface.space.lambda();
    surface.shape_op.iter().map(|a| a.hs(alpha).abs()).fold(0.0, f64::max)
}

/// Largest `|F_direct - F_expanded|` over the given samples, relative to
/// `max(1, |F|)`.
pub fn f_expansion_residual(surface: &ImmersedSurface, gm: &GaussMapData, samples: &[(usize, Vec2)]) -> f64 {
    samples
        .iter()
        .map(|(v, x)| {
            let direct = identities::f_direct(gm.dn[*v], *x);
            let expanded = identities::f_expanded(surface.shape_op[*v], gm.lambda, *x);
            (direct - expanded).abs() / direct.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests;
