//! Scalar abstraction shared by the numerical modules.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point type the dense algebra, Pauli and noise code is generic over.
///
/// The associated tolerances are the precision-dependent thresholds used by
/// input validation and by the eigensolver's convergence test.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Largest accepted `max |A - A^H|` for an input declared Hermitian.
    const HERMITIAN_TOL: Self;
    /// Largest accepted imaginary part of a quantity that must be real.
    const IMAG_TOL: Self;
    /// Off-diagonal Frobenius norm (relative to `max(1, ‖A‖_F)`) at which Jacobi stops.
    const JACOBI_TOL: Self;
    /// Slack for state-level invariants (trace, Hermiticity of prepared states).
    const STATE_TOL: Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl Real for f64 {
    const HERMITIAN_TOL: f64 = 1e-9;
    const IMAG_TOL: f64 = 1e-10;
    const JACOBI_TOL: f64 = 1e-12;
    const STATE_TOL: f64 = 1e-10;
}

impl Real for f32 {
    const HERMITIAN_TOL: f32 = 1e-4;
    const IMAG_TOL: f32 = 1e-4;
    const JACOBI_TOL: f32 = 1e-6;
    const STATE_TOL: f32 = 1e-4;
}

pub type C<T> = Complex<T>;

#[inline]
pub fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}
