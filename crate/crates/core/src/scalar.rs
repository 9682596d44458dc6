//! Scalar abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the simulation core is generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance on the total probability mass of a distribution.
    const NORM_TOL: Self;
    /// Tolerance used for value/derivative continuity checks.
    const SMOOTH_TOL: Self;
    /// Coefficients with magnitude below this are stored as exact zeros.
    const COEFF_ZERO: Self;

    /// Lossless-enough conversion from `f64` literals.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize is representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }
}

impl Real for f64 {
    const NORM_TOL: Self = 1e-12;
    const SMOOTH_TOL: Self = 1e-9;
    const COEFF_ZERO: Self = 1e-14;
}

impl Real for f32 {
    const NORM_TOL: Self = 1e-5;
    const SMOOTH_TOL: Self = 1e-3;
    const COEFF_ZERO: Self = 1e-7;
}
