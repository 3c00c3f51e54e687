//! Energy index of the generalized Gauss map of CMC surfaces in
//! three-dimensional Lie groups with bi-invariant metric: `R^3`, the flat
//! 3-torus and the unit 3-sphere.
//!
//! Pointwise algebra (`vecn`, `tangent`, `ambient`) is generic over
//! [`scalar::Real`]; meshes, exterior calculus and eigensolvers run in
//! `f64`.

pub mod ambient;
pub mod error;
pub mod hodge;
pub mod index_form;
pub mod linalg;
pub mod mesh;
pub mod scalar;
pub mod tangent;
pub mod vecn;
pub mod verify;
pub mod zoo;

pub use error::{Error, Result};
pub use hodge::{harmonic_basis, HarmonicBasis, OneForm, TangentField};
pub use index_form::{index_full_space, index_on_harmonic_span, IndexOptions, IndexReport, Variant};
pub use mesh::TriangleMesh;
pub use zoo::ImmersedSurface;

pub type Vec2d = tangent::Vec2<f64>;
pub type Vec2f = tangent::Vec2<f32>;
pub type Mat2d = tangent::Mat2<f64>;
pub type Mat2f = tangent::Mat2<f32>;
pub type Quatd = ambient::Quaternion<f64>;
pub type Quatf = ambient::Quaternion<f32>;
