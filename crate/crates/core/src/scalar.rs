use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar used by the pointwise algebra (quaternions,
/// tangent-frame 2x2 matrices, Gauss-map evaluation).
pub trait Real: Float + FloatConst + FromPrimitive + NumAssign + Debug + Default + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl Real for f32 {}
impl Real for f64 {}
