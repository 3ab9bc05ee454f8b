use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, Zero};

/// Field element a [`Mat`](super::Mat) can carry: a real float or a complex
/// number over one.
pub trait Scalar:
    Copy + PartialEq + Debug + Send + Sync + 'static + NumAssign + std::ops::Neg<Output = Self> + Sum
{
    type Real: Real;

    const IS_COMPLEX: bool;

    fn from_real(r: Self::Real) -> Self;
    /// `None` for real scalars when `im != 0`.
    fn from_parts(re: Self::Real, im: Self::Real) -> Option<Self>;
    fn conj(self) -> Self;
    fn re(self) -> Self::Real;
    fn im(self) -> Self::Real;
    fn modulus(self) -> Self::Real;
    fn modulus_sqr(self) -> Self::Real;
    fn mul_real(self, r: Self::Real) -> Self;
    fn principal_sqrt(self) -> Self;

    /// `z / |z|`, or one for zero.
    fn phase(self) -> Self {
        let m = self.modulus();
        if m == Self::Real::zero() {
            Self::one()
        } else {
            self.mul_real(m.recip())
        }
    }

    fn from_f64(x: f64) -> Self {
        Self::from_real(real(x))
    }
}

/// Real floating-point scalar.
pub trait Real: Scalar<Real = Self> + Float + FloatConst + FromPrimitive + Display + LowerExp + Default {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into any [`Real`].
#[inline]
pub fn real<R: Real>(x: f64) -> R {
    <R as FromPrimitive>::from_f64(x).expect("f64 literal representable")
}

macro_rules! impl_real_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type Real = $t;
            const IS_COMPLEX: bool = false;

            #[inline]
            fn from_real(r: $t) -> Self {
                r
            }
            #[inline]
            fn from_parts(re: $t, im: $t) -> Option<Self> {
                (im == 0.0).then_some(re)
            }
            #[inline]
            fn conj(self) -> Self {
                self
            }
            #[inline]
            fn re(self) -> $t {
                self
            }
            #[inline]
            fn im(self) -> $t {
                0.0
            }
            #[inline]
            fn modulus(self) -> $t {
                self.abs()
            }
            #[inline]
            fn modulus_sqr(self) -> $t {
                self * self
            }
            #[inline]
            fn mul_real(self, r: $t) -> Self {
                self * r
            }
            #[inline]
            fn principal_sqrt(self) -> Self {
                self.sqrt()
            }
        }
    };
}

impl_real_scalar!(f32);
impl_real_scalar!(f64);

impl<R: Real> Scalar for Complex<R> {
    type Real = R;
    const IS_COMPLEX: bool = true;

    #[inline]
    fn from_real(r: R) -> Self {
        Complex::new(r, R::zero())
    }
    #[inline]
    fn from_parts(re: R, im: R) -> Option<Self> {
        Some(Complex::new(re, im))
    }
    #[inline]
    fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }
    #[inline]
    fn re(self) -> R {
        self.re
    }
    #[inline]
    fn im(self) -> R {
        self.im
    }
    #[inline]
    fn modulus(self) -> R {
        self.re.hypot(self.im)
    }
    #[inline]
    fn modulus_sqr(self) -> R {
        self.re * self.re + self.im * self.im
    }
    #[inline]
    fn mul_real(self, r: R) -> Self {
        Complex::new(self.re * r, self.im * r)
    }
    fn principal_sqrt(self) -> Self {
        // Real non-negative inputs stay exactly real.
        if self.im == R::zero() && self.re >= R::zero() {
            return Complex::new(self.re.sqrt(), R::zero());
        }
        let m = self.modulus();
        let two = R::one() + R::one();
        let re = ((m + self.re) / two).sqrt();
        let im = ((m - self.re) / two).sqrt();
        Complex::new(re, if self.im < R::zero() { -im } else { im })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn complex_sqrt_branch() {
        let z = Complex64::new(-4.0, 0.0).principal_sqrt();
        assert!((z - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        let w = Complex64::new(3.0, -4.0);
        let s = w.principal_sqrt();
        assert!((s * s - w).norm() < 1e-14);
        assert!(s.re > 0.0);
    }

    #[test]
    fn phase_of_zero_is_one() {
        assert_eq!(Complex64::new(0.0, 0.0).phase(), Complex64::new(1.0, 0.0));
        assert_eq!((-2.0f64).phase(), -1.0);
    }
}
