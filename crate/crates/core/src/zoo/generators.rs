use std::f64::consts::{PI, TAU};

use super::{shape_from_principal, ImmersedSurface};
use crate::ambient::{AlphaSign, AmbientSpace, Lattice};
use crate::error::{Error, Result};
use crate::mesh::builders::{grid_faces, icosphere};
use crate::mesh::TriangleMesh;
use crate::tangent::Mat2;
use crate::vecn::{self, V3, V4};

fn check_grid(nu: usize, nv: usize) -> Result<()> {
    if nu < 3 || nv < 3 {
        return Err(Error::BadParameter(format!("grid {nu}x{nv}: both sizes must be at least 3")));
    }
    Ok(())
}

/// Round sphere of radius `r` in R^3 on an icosphere of the given level.
/// The default inward normal gives `A = I / r` and `H = 1 / r`; the outward
/// normal flips both signs.
pub fn sphere_r3(radius: f64, level: usize, outward: bool) -> Result<ImmersedSurface> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("sphere radius {radius} must be positive")));
    }
    let unit = icosphere(level);
    let sign = if outward { 1.0 } else { -1.0 };
    let normals: Vec<V4> = unit.positions().iter().map(|u| vecn::scale(u, sign)).collect();
    let mesh = unit.with_positions(unit.positions().iter().map(|u| vecn::scale(u, radius)).collect());
    let k = vec![1.0 / (radius * radius); mesh.n_vertices()];
    let a = -sign / radius;
    let mut s = ImmersedSurface::analytic(
        format!("sphere_r3(r={radius}, level={level})"),
        mesh,
        AmbientSpace::Euclidean3,
        normals,
        |_, _| Mat2::diag(a, a),
        k,
    )?;
    s.exact_area = Some(4.0 * PI * radius * radius);
    Ok(s)
}

/// Distance sphere of radius `rho` about the identity of the 3-sphere:
/// `p = cos(rho) + sin(rho) u` with the inward normal
/// `eta = sin(rho) - cos(rho) u`, so `A = cot(rho) I`.
pub fn geodesic_sphere_s3(rho: f64, level: usize, sign: AlphaSign) -> Result<ImmersedSurface> {
    if !(rho > 0.0 && rho < PI / 2.0) {
        return Err(Error::Domain(format!("geodesic radius {rho} must lie in (0, pi/2)")));
    }
    let unit = icosphere(level);
    let (s, c) = rho.sin_cos();
    let pos = unit.positions().iter().map(|u| [c, s * u[0], s * u[1], s * u[2]]).collect();
    let normals = unit.positions().iter().map(|u| [s, -c * u[0], -c * u[1], -c * u[2]]).collect();
    let mesh = unit.with_positions(pos);
    let cot = c / s;
    let k = vec![1.0 + cot * cot; mesh.n_vertices()];
    let mut surf = ImmersedSurface::analytic(
        format!("geodesic_sphere_s3(rho={rho}, level={level})"),
        mesh,
        AmbientSpace::sphere(sign),
        normals,
        |_, _| Mat2::diag(cot, cot),
        k,
    )?;
    surf.exact_area = Some(4.0 * PI * s * s);
    Ok(surf)
}

/// Product torus `S^1(r) x S^1(s)` in the 3-sphere, `s = sqrt(1 - r^2)`,
/// with principal curvatures `s / r` along `u` and `-r / s` along `v`.
pub fn flat_torus_s3(r: f64, nu: usize, nv: usize, sign: AlphaSign) -> Result<ImmersedSurface> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("torus radius {r} must lie in (0, 1)")));
    }
    check_grid(nu, nv)?;
    let s = (1.0 - r * r).sqrt();
    let mut pos = Vec::with_capacity(nu * nv);
    let mut normals = Vec::with_capacity(nu * nv);
    let mut principal = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = TAU * i as f64 / nu as f64;
        let (su, cu) = u.sin_cos();
        for j in 0..nv {
            let v = TAU * j as f64 / nv as f64;
            let (sv, cv) = v.sin_cos();
            pos.push([r * cu, r * su, s * cv, s * sv]);
            normals.push([-s * cu, -s * su, r * cv, r * sv]);
            principal.push([([-su, cu, 0.0, 0.0], s / r), ([0.0, 0.0, -sv, cv], -r / s)]);
        }
    }
    let mesh = TriangleMesh::new(pos, grid_faces(nu, nv, true, true), None)?;
    let k = vec![0.0; mesh.n_vertices()];
    let mut surf = ImmersedSurface::analytic(
        format!("flat_torus_s3(r={r}, {nu}x{nv})"),
        mesh,
        AmbientSpace::sphere(sign),
        normals,
        |v, f| shape_from_principal(f, &principal[v]),
        k,
    )?;
    surf.exact_area = Some(TAU * TAU * r * s);
    Ok(surf)
}

pub fn clifford_torus(n: usize, sign: AlphaSign) -> Result<ImmersedSurface> {
    flat_torus_s3(std::f64::consts::FRAC_1_SQRT_2, n, n, sign)
}

/// Totally geodesic torus in `R^3 / lattice` spanned by the first two
/// lattice generators through `offset`.
pub fn flat_torus_t3(lattice: &Lattice, nu: usize, nv: usize, offset: V3) -> Result<ImmersedSurface> {
    check_grid(nu, nv)?;
    let [a, b, _] = *lattice.basis();
    let n = vecn::normalize(&vecn::cross(&a, &b)).ok_or(Error::SingularLattice)?;
    let mut pos = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let (s, t) = (i as f64 / nu as f64, j as f64 / nv as f64);
            let p: V3 = std::array::from_fn(|k| offset[k] + s * a[k] + t * b[k]);
            pos.push(vecn::to4(&lattice.wrap(&p)));
        }
    }
    let mesh = TriangleMesh::new(pos, grid_faces(nu, nv, true, true), Some(lattice.clone()))?;
    let normals = vec![vecn::to4(&n); mesh.n_vertices()];
    let k = vec![0.0; mesh.n_vertices()];
    let mut surf = ImmersedSurface::analytic(
        format!("flat_torus_t3({nu}x{nv})"),
        mesh,
        AmbientSpace::FlatTorus3(lattice.clone()),
        normals,
        |_, _| Mat2::zero(),
        k,
    )?;
    surf.exact_area = Some(vecn::norm(&vecn::cross(&a, &b)));
    Ok(surf)
}

/// Open cylinder of radius `R` and given length around the z-axis, with
/// the inward normal: `H = 1 / (2R)`.
pub fn cylinder_r3(radius: f64, n_around: usize, n_along: usize, length: f64) -> Result<ImmersedSurface> {
    if !(radius > 0.0 && length > 0.0) {
        return Err(Error::Domain("cylinder radius and length must be positive".into()));
    }
    check_grid(n_around, n_along)?;
    let mut pos = Vec::new();
    let mut normals = Vec::new();
    let mut principal = Vec::new();
    for i in 0..n_around {
        let t = TAU * i as f64 / n_around as f64;
        let (st, ct) = t.sin_cos();
        for j in 0..n_along {
            let z = length * j as f64 / (n_along - 1) as f64;
            pos.push([radius * ct, radius * st, z, 0.0]);
            normals.push([-ct, -st, 0.0, 0.0]);
            principal.push([([-st, ct, 0.0, 0.0], 1.0 / radius), ([0.0, 0.0, 1.0, 0.0], 0.0)]);
        }
    }
    let mesh = TriangleMesh::new(pos, grid_faces(n_around, n_along, true, false), None)?;
    let k = vec![0.0; mesh.n_vertices()];
    let mut surf = ImmersedSurface::analytic(
        format!("cylinder_r3(R={radius}, {n_around}x{n_along})"),
        mesh,
        AmbientSpace::Euclidean3,
        normals,
        |v, f| shape_from_principal(f, &principal[v]),
        k,
    )?;
    surf.exact_area = Some(TAU * radius * length);
    Ok(surf)
}

/// Edge values of the harmonic forms `R dtheta` and `dz` on a cylinder
/// about the z-axis.
pub fn cylinder_harmonic_forms(surface: &ImmersedSurface) -> [Vec<f64>; 2] {
    let mesh = &surface.mesh;
    let mut around = Vec::with_capacity(mesh.n_edges());
    let mut along = Vec::with_capacity(mesh.n_edges());
    for [a, b] in mesh.edges() {
        let (pa, pb) = (mesh.position(*a), mesh.position(*b));
        let radius = pa[0].hypot(pa[1]);
        let mut dt = pb[1].atan2(pb[0]) - pa[1].atan2(pa[0]);
        if dt > PI {
            dt -= TAU;
        } else if dt < -PI {
            dt += TAU;
        }
        around.push(radius * dt);
        along.push(pb[2] - pa[2]);
    }
    [around, along]
}

/// Non-CMC control surface: the radial graph `(1 + eps u_z^2) u` over the
/// unit sphere, with its exact inward normal and a fitted shape operator.
pub fn perturbed_sphere_r3(eps: f64, level: usize) -> Result<ImmersedSurface> {
    let unit = icosphere(level);
    let mut pos = Vec::with_capacity(unit.n_vertices());
    let mut normals = Vec::with_capacity(unit.n_vertices());
    for u in unit.positions() {
        let rad = 1.0 + eps * u[2] * u[2];
        pos.push(vecn::scale(u, rad));
        // tangential gradient of the radius function on the unit sphere
        let g = [0.0, 0.0, 2.0 * eps * u[2], 0.0];
        let gt = vecn::axpy(&g, -vecn::dot(&g, u), u);
        let outward = vecn::axpy(u, -1.0 / rad, &gt);
        normals.push(vecn::scale(&vecn::normalize(&outward).unwrap(), -1.0));
    }
    let mesh = unit.with_positions(pos);
    ImmersedSurface::fitted(format!("perturbed_sphere_r3(eps={eps}, level={level})"), mesh, AmbientSpace::Euclidean3, normals)
}
