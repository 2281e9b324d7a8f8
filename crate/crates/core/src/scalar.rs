//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
///
/// The associated tolerances scale the structural checks (Hermiticity, unit
/// norm) to the precision of the type.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Sum + Default + Send + Sync + 'static
{
    /// Entrywise tolerance for Hermiticity and unit-norm checks.
    const STRUCTURAL_TOL: Self;
    /// Smallest outcome density for which a conditioned state is defined.
    const DENSITY_FLOOR: Self;
    /// Smallest meter-readout weight whose conditioned signal is resolved
    /// above the rounding noise of a joint state.
    const RESOLVABLE_WEIGHT: Self;

    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count or index into `Self`.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }
}

impl Real for f64 {
    const STRUCTURAL_TOL: Self = 1e-12;
    const DENSITY_FLOOR: Self = 1e-300;
    const RESOLVABLE_WEIGHT: Self = 1e-12;
}

impl Real for f32 {
    const STRUCTURAL_TOL: Self = 1e-5;
    const DENSITY_FLOOR: Self = 1e-37;
    const RESOLVABLE_WEIGHT: Self = 1e-6;
}

/// Complex amplitude over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

pub(crate) fn czero<T: Real>() -> Cplx<T> {
    Complex::new(T::zero(), T::zero())
}

pub(crate) fn creal<T: Real>(re: T) -> Cplx<T> {
    Complex::new(re, T::zero())
}
