//! Coefficient types shared by the basis expansions.
//!
//! Exact work (pairings, eigenvalue extraction) runs over
//! [`ExactComplex`]; numeric evaluation runs over [`C64`].

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type C64 = Complex<f64>;
pub type ExactComplex = Complex<BigRational>;

/// Field of coefficients for [`BasisExpansion`](crate::tbasis::BasisExpansion)
/// and [`MultiPolynomial`](crate::tbasis::MultiPolynomial).
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(r: &BigRational) -> Self;
    fn conj(&self) -> Self;
    fn to_c64(&self) -> C64;
    /// Multiplicative inverse; `None` for zero.
    fn recip(&self) -> Option<Self>;

    fn from_int(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)))
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator or denominator too large for a direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

impl Scalar for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn to_c64(&self) -> C64 {
        C64::new(rational_to_f64(self), 0.0)
    }
    fn recip(&self) -> Option<Self> {
        (!self.is_zero()).then(|| BigRational::one() / self)
    }
}

impl Scalar for ExactComplex {
    fn from_rational(r: &BigRational) -> Self {
        Complex::new(r.clone(), BigRational::zero())
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn to_c64(&self) -> C64 {
        C64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
    fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let den = self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone();
        Some(Complex::new(
            self.re.clone() / den.clone(),
            -self.im.clone() / den,
        ))
    }
}

impl Scalar for C64 {
    fn from_rational(r: &BigRational) -> Self {
        C64::new(rational_to_f64(r), 0.0)
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn recip(&self) -> Option<Self> {
        (*self != C64::zero()).then(|| self.inv())
    }
}

/// Exact rational from an integer ratio; panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
