use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type the risk model and solvers are generic over.
///
/// Implemented for `f32` and `f64`. The relative tolerance is the one used for
/// objective comparisons (ties, pruning, equality checks); `f32` gets a
/// looser value because 1e-9 is below its resolution.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + Serialize + DeserializeOwned + 'static
{
    /// Relative tolerance for comparing objective values.
    fn rel_tol() -> Self;

    /// Lossy conversion from an `f64` literal.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn rel_tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn rel_tol() -> Self {
        1e-5
    }
}

/// `a` and `b` agree within `T::rel_tol()` relative to the larger magnitude.
pub fn approx_eq<T: Scalar>(a: T, b: T) -> bool {
    (a - b).abs() <= tolerance(a, b)
}

/// Absolute tolerance for comparing `a` against `b`.
pub fn tolerance<T: Scalar>(a: T, b: T) -> T {
    T::rel_tol() * a.abs().max(b.abs())
}
