//! The bi-invariant model spaces: Euclidean 3-space, flat 3-tori and the
//! round 3-sphere (unit quaternions), together with the generalized Gauss
//! map and the invariant shape operator.

mod quaternion;

pub use quaternion::{quaternion_conj, quaternion_mul, Quaternion};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tangent::Mat2;
use crate::vecn::{self, V3, V4};

/// Sign `lambda` of the invariant shape operator `alpha = lambda J` on the
/// non-commutative groups. Both signs occur (the sphere and the projective
/// space), so it is a per-run choice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlphaSign {
    #[default]
    Plus,
    Minus,
}

impl AlphaSign {
    pub fn value(self) -> f64 {
        match self {
            AlphaSign::Plus => 1.0,
            AlphaSign::Minus => -1.0,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "+1" | "1" | "+" => Ok(AlphaSign::Plus),
            "-1" | "-" => Ok(AlphaSign::Minus),
            other => Err(Error::BadParameter(format!("alpha sign `{other}` (expected +1 or -1)"))),
        }
    }
}

/// A lattice `Lambda` of R^3; the flat torus is `R^3 / Lambda`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    /// `basis[k]` is the k-th generator.
    basis: [V3; 3],
    /// Inverse of the column matrix `[b0 b1 b2]`, row-major.
    inverse: [V3; 3],
}

impl Lattice {
    pub fn new(basis: [V3; 3]) -> Result<Self> {
        let [a, b, c] = basis;
        let det = vecn::det3(&a, &b, &c);
        let scale = vecn::norm(&a) * vecn::norm(&b) * vecn::norm(&c);
        if !(det.abs() > 1e-12 * scale) || !det.is_finite() {
            return Err(Error::SingularLattice);
        }
        // rows of the inverse of [a b c] are the dual basis vectors
        let inverse = [
            vecn::scale(&vecn::cross(&b, &c), 1.0 / det),
            vecn::scale(&vecn::cross(&c, &a), 1.0 / det),
            vecn::scale(&vecn::cross(&a, &b), 1.0 / det),
        ];
        Ok(Self { basis, inverse })
    }

    pub fn cubic(side: f64) -> Self {
        Self::new([[side, 0.0, 0.0], [0.0, side, 0.0], [0.0, 0.0, side]]).expect("cubic lattice")
    }

    pub fn basis(&self) -> &[V3; 3] {
        &self.basis
    }

    pub fn to_lattice_coords(&self, p: &V3) -> V3 {
        std::array::from_fn(|k| vecn::dot(&self.inverse[k], p))
    }

    pub fn from_lattice_coords(&self, s: &V3) -> V3 {
        std::array::from_fn(|i| (0..3).map(|k| s[k] * self.basis[k][i]).sum())
    }

    /// Canonical representative with lattice coordinates in `[0, 1)`.
    pub fn wrap(&self, p: &V3) -> V3 {
        let s = self.to_lattice_coords(p).map(|x| {
            let f = x - x.floor();
            if f >= 1.0 {
                0.0
            } else {
                f
            }
        });
        self.from_lattice_coords(&s)
    }

    /// Shortest representative of a difference vector (nearest-image
    /// convention in lattice coordinates).
    pub fn min_image(&self, d: &V3) -> V3 {
        let s = self.to_lattice_coords(d).map(|x| x - x.round());
        self.from_lattice_coords(&s)
    }
}

pub fn torus_wrap(lattice: &Lattice, p: &V3) -> V3 {
    lattice.wrap(p)
}

#[derive(Clone, Debug, PartialEq)]
pub enum AmbientSpace {
    Euclidean3,
    FlatTorus3(Lattice),
    Sphere3 { alpha_sign: AlphaSign },
}

impl AmbientSpace {
    pub fn sphere(alpha_sign: AlphaSign) -> Self {
        AmbientSpace::Sphere3 { alpha_sign }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            AmbientSpace::Euclidean3 => "R3",
            AmbientSpace::FlatTorus3(_) => "T3",
            AmbientSpace::Sphere3 { .. } => "S3",
        }
    }

    /// Tag with the alpha sign on the sphere, e.g. `S3(-1)`.
    pub fn label(&self) -> String {
        match self {
            AmbientSpace::Sphere3 { alpha_sign } => format!("S3({:+})", alpha_sign.value() as i8),
            other => other.tag().into(),
        }
    }

    /// Curvature constant `c`: 0 for the abelian groups, 1 for the sphere.
    pub fn c(&self) -> f64 {
        match self {
            AmbientSpace::Sphere3 { .. } => 1.0,
            _ => 0.0,
        }
    }

    /// `lambda` in `alpha = lambda J`.
    pub fn lambda(&self) -> f64 {
        match self {
            AmbientSpace::Sphere3 { alpha_sign } => alpha_sign.value(),
            _ => 0.0,
        }
    }

    pub fn is_abelian(&self) -> bool {
        !matches!(self, AmbientSpace::Sphere3 { .. })
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        match self {
            AmbientSpace::FlatTorus3(l) => Some(l),
            _ => None,
        }
    }

    pub fn with_alpha_sign(&self, sign: AlphaSign) -> Self {
        match self {
            AmbientSpace::Sphere3 { .. } => AmbientSpace::Sphere3 { alpha_sign: sign },
            other => other.clone(),
        }
    }

    /// Sign of the oriented volume spanned by the tangent vectors `a, b` and
    /// the normal `n` at `p`. On the sphere the tangent space is oriented by
    /// left translation from the Lie algebra, i.e. by `det(p, a, b, n)`.
    pub fn orientation(&self, p: &V4, a: &V4, b: &V4, n: &V4) -> f64 {
        match self {
            AmbientSpace::Sphere3 { .. } => vecn::det4([*p, *a, *b, *n]),
            _ => vecn::det3(&vecn::to3(a), &vecn::to3(b), &vecn::to3(n)),
        }
    }
}

/// Left-translate a tangent vector at `p` to the Lie algebra.
pub fn to_algebra<T: Real>(space: &AmbientSpace, p: &V4<T>, v: &V4<T>) -> V3<T> {
    match space {
        AmbientSpace::Sphere3 { .. } => {
            (Quaternion::from_array(*p).conj() * Quaternion::from_array(*v)).imag()
        }
        _ => [v[0], v[1], v[2]],
    }
}

/// Left-translate a Lie algebra vector to the tangent space at `p`.
pub fn from_algebra<T: Real>(space: &AmbientSpace, p: &V4<T>, x: &V3<T>) -> V4<T> {
    match space {
        AmbientSpace::Sphere3 { .. } => {
            (Quaternion::from_array(*p) * Quaternion::pure(*x)).to_array()
        }
        _ => [x[0], x[1], x[2], T::zero()],
    }
}

fn unit_tolerance<T: Real>() -> T {
    T::lit(1e-10).max(T::epsilon() * T::lit(1e4))
}

/// Generalized Gauss map `N(p) = d(L_{p^-1})_p (eta)`, a unit vector of the
/// Lie algebra. For the abelian groups left translation is the identity on
/// coordinates; on the sphere it is `Im(conj(p) eta)`.
pub fn gauss_map<T: Real>(space: &AmbientSpace, p: &V4<T>, eta: &V4<T>) -> Result<V3<T>> {
    let tol = unit_tolerance::<T>();
    let en = vecn::norm(eta);
    if (en - T::one()).abs() > tol {
        return Err(Error::NotUnit(en.to_f64().unwrap_or(f64::NAN)));
    }
    match space {
        AmbientSpace::Sphere3 { .. } => {
            let pn = vecn::norm(p);
            if (pn - T::one()).abs() > tol {
                return Err(Error::NotUnit(pn.to_f64().unwrap_or(f64::NAN)));
            }
            let t = vecn::dot(p, eta);
            if t.abs() > tol {
                return Err(Error::NotTangent(t.to_f64().unwrap_or(f64::NAN)));
            }
            Ok(to_algebra(space, p, eta))
        }
        _ => {
            if eta[3] != T::zero() {
                return Err(Error::NotTangent(eta[3].to_f64().unwrap_or(f64::NAN)));
            }
            Ok([eta[0], eta[1], eta[2]])
        }
    }
}

/// Invariant shape operator in an oriented orthonormal tangent frame: zero on
/// the abelian groups, `lambda J` otherwise.
pub fn invariant_shape_operator<T: Real>(space: &AmbientSpace) -> Mat2<T> {
    Mat2::j() * T::lit(space.lambda())
}
