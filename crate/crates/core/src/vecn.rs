//! Fixed-size ambient vector helpers.
//!
//! Ambient points live in R^4 for every model space: Euclidean and flat-torus
//! coordinates leave the last slot at zero, the 3-sphere uses all four.

use crate::scalar::Real;

pub type V4<T = f64> = [T; 4];
pub type V3<T = f64> = [T; 3];

#[inline]
pub fn dot<T: Real, const N: usize>(a: &[T; N], b: &[T; N]) -> T {
    let mut s = T::zero();
    for i in 0..N {
        s += a[i] * b[i];
    }
    s
}

#[inline]
pub fn norm<T: Real, const N: usize>(a: &[T; N]) -> T {
    dot(a, a).sqrt()
}

#[inline]
pub fn add<T: Real, const N: usize>(a: &[T; N], b: &[T; N]) -> [T; N] {
    std::array::from_fn(|i| a[i] + b[i])
}

#[inline]
pub fn sub<T: Real, const N: usize>(a: &[T; N], b: &[T; N]) -> [T; N] {
    std::array::from_fn(|i| a[i] - b[i])
}

#[inline]
pub fn scale<T: Real, const N: usize>(a: &[T; N], s: T) -> [T; N] {
    std::array::from_fn(|i| a[i] * s)
}

/// `a + s * b`
#[inline]
pub fn axpy<T: Real, const N: usize>(a: &[T; N], s: T, b: &[T; N]) -> [T; N] {
    std::array::from_fn(|i| a[i] + s * b[i])
}

pub fn normalize<T: Real, const N: usize>(a: &[T; N]) -> Option<[T; N]> {
    let n = norm(a);
    if n > T::zero() && n.is_finite() {
        Some(scale(a, T::one() / n))
    } else {
        None
    }
}

#[inline]
pub fn cross<T: Real>(a: &V3<T>, b: &V3<T>) -> V3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn det3<T: Real>(a: &V3<T>, b: &V3<T>, c: &V3<T>) -> T {
    dot(&cross(a, b), c)
}

pub fn det4(m: [V4; 4]) -> f64 {
    // cofactor expansion along the first row
    let minor = |skip: usize| -> f64 {
        let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
        let r = |i: usize| -> V3 { [m[i][cols[0]], m[i][cols[1]], m[i][cols[2]]] };
        det3(&r(1), &r(2), &r(3))
    };
    m[0][0] * minor(0) - m[0][1] * minor(1) + m[0][2] * minor(2) - m[0][3] * minor(3)
}

#[inline]
pub fn to3<T: Copy>(a: &V4<T>) -> V3<T> {
    [a[0], a[1], a[2]]
}

#[inline]
pub fn to4<T: Real>(a: &V3<T>) -> V4<T> {
    [a[0], a[1], a[2], T::zero()]
}
