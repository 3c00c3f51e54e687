//! 2x2 algebra in an oriented orthonormal tangent frame.
//!
//! Every per-vertex operator (shape operator, invariant shape operator,
//! differential of the Gauss map) is a [`Mat2`] acting on tangent vectors
//! expressed as [`Vec2`] coordinates in the vertex frame `(e1, e2)`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2<T = f64>(pub [T; 2]);

/// Row-major 2x2 matrix: `m[row][col]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Mat2<T = f64>(pub [[T; 2]; 2]);

impl<T: Real> Vec2<T> {
    pub fn new(a: T, b: T) -> Self {
        Self([a, b])
    }

    pub fn zero() -> Self {
        Self([T::zero(); 2])
    }

    pub fn dot(self, o: Self) -> T {
        self.0[0] * o.0[0] + self.0[1] * o.0[1]
    }

    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    /// Rotation by +90 degrees in the oriented plane: `(a, b) -> (-b, a)`.
    pub fn rot90(self) -> Self {
        Self([-self.0[1], self.0[0]])
    }

    pub fn rotate(self, theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Self([c * self.0[0] - s * self.0[1], s * self.0[0] + c * self.0[1]])
    }
}

impl<T: Real> Add for Vec2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl<T: Real> Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1]])
    }
}

impl<T: Real> Neg for Vec2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self([-self.0[0], -self.0[1]])
    }
}

impl<T: Real> Mul<T> for Vec2<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self([self.0[0] * s, self.0[1] * s])
    }
}

impl<T: Real> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self([[a, b], [c, d]])
    }

    pub fn zero() -> Self {
        Self([[T::zero(); 2]; 2])
    }

    pub fn identity() -> Self {
        Self::diag(T::one(), T::one())
    }

    pub fn diag(a: T, d: T) -> Self {
        Self::new(a, T::zero(), T::zero(), d)
    }

    /// The matrix `((0, 1), (-1, 0))`: the invariant shape operator of the
    /// non-commutative bi-invariant groups, up to sign.
    pub fn j() -> Self {
        Self::new(T::zero(), T::one(), -T::one(), T::zero())
    }

    pub fn rotation(theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, -s, s, c)
    }

    pub fn transpose(self) -> Self {
        let m = self.0;
        Self([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn trace(self) -> T {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(self) -> T {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Hilbert-Schmidt (Frobenius) inner product `tr(self^T o)`.
    pub fn hs(self, o: Self) -> T {
        let (a, b) = (self.0, o.0);
        a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
    }

    pub fn norm_sq(self) -> T {
        self.hs(self)
    }

    pub fn col(self, j: usize) -> Vec2<T> {
        Vec2([self.0[0][j], self.0[1][j]])
    }

    pub fn apply(self, v: Vec2<T>) -> Vec2<T> {
        let m = self.0;
        Vec2([
            m[0][0] * v.0[0] + m[0][1] * v.0[1],
            m[1][0] * v.0[0] + m[1][1] * v.0[1],
        ])
    }

    /// Antisymmetry defect `|m01 - m10|` for a matrix that should be symmetric.
    pub fn asymmetry(self) -> T {
        (self.0[0][1] - self.0[1][0]).abs()
    }

    /// Re-express an operator after the frame is rotated by `theta`:
    /// new coordinates are `R^T v`, so the matrix becomes `R^T M R`.
    pub fn in_rotated_frame(self, theta: T) -> Self {
        let r = Self::rotation(theta);
        r.transpose() * self * r
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (a, b) = (self.0, o.0);
        Self([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Neg for Mat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self * -T::one()
    }
}

impl<T: Real> Mul<T> for Mat2<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        let a = self.0;
        Self([[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]])
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self.0, o.0);
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j])
        }))
    }
}

/// Pointwise quadratic forms of the index-form integrand.
pub mod identities {
    use super::*;

    /// `F(xi) = sum_i |xi|^2 |dN e_i|^2 - <xi, dN e_i>^2` evaluated straight
    /// from the columns of `dn`.
    pub fn f_direct<T: Real>(dn: Mat2<T>, xi: Vec2<T>) -> T {
        let n2 = xi.norm_sq();
        (0..2).fold(T::zero(), |acc, i| {
            let c = dn.col(i);
            acc + n2 * c.norm_sq() - xi.dot(c).powi(2)
        })
    }

    /// Expanded form `(|A|^2 + 2c)|xi|^2 - |(A - lambda J) xi|^2`, valid when
    /// `dN = -(A + lambda J)` with `c = lambda^2`.
    pub fn f_expanded<T: Real>(a: Mat2<T>, lambda: T, xi: Vec2<T>) -> T {
        let c = lambda * lambda;
        let m = a - Mat2::j() * lambda;
        (a.norm_sq() + T::two() * c) * xi.norm_sq() - m.apply(xi).norm_sq()
    }

    /// `<A xi, xi> + <A Jxi, Jxi> - tr(A) |xi|^2`, zero for symmetric `A`.
    pub fn trace_pairing_defect<T: Real>(a: Mat2<T>, xi: Vec2<T>) -> T {
        let p = xi.rot90();
        a.apply(xi).dot(xi) + a.apply(p).dot(p) - a.trace() * xi.norm_sq()
    }

    /// `<A xi, alpha xi> + <A Jxi, alpha Jxi>`, zero for symmetric `A` and
    /// anti-symmetric `alpha`.
    pub fn alpha_pairing_defect<T: Real>(a: Mat2<T>, alpha: Mat2<T>, xi: Vec2<T>) -> T {
        let p = xi.rot90();
        a.apply(xi).dot(alpha.apply(xi)) + a.apply(p).dot(alpha.apply(p))
    }
}
