use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num::complex::{Complex, Complex64};
use num::{BigInt, BigRational, One, Zero};

/// Complex numbers with exact rational parts.
pub type ExactComplex = Complex<BigRational>;

/// Scalars the algebra computations run over.
pub trait Coefficient:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
{
    fn from_integer(value: i64) -> Self;

    /// Converts a finite double; exact types keep its exact binary value.
    fn from_real(value: f64) -> Self;

    fn imaginary(value: f64) -> Self;

    /// Exactly zero for exact types, below `1e-12` in modulus otherwise.
    fn is_negligible(&self) -> bool;

    fn modulus(&self) -> f64;
}

fn exact_rational(value: f64) -> BigRational {
    BigRational::from_float(value).expect("finite value")
}

impl Coefficient for ExactComplex {
    fn from_integer(value: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(value)), BigRational::zero())
    }

    fn from_real(value: f64) -> Self {
        Complex::new(exact_rational(value), BigRational::zero())
    }

    fn imaginary(value: f64) -> Self {
        Complex::new(BigRational::zero(), exact_rational(value))
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn modulus(&self) -> f64 {
        use num::ToPrimitive;
        let re = self.re.to_f64().unwrap_or(f64::NAN);
        let im = self.im.to_f64().unwrap_or(f64::NAN);
        re.hypot(im)
    }
}

impl Coefficient for Complex64 {
    fn from_integer(value: i64) -> Self {
        Complex64::new(value as f64, 0.0)
    }

    fn from_real(value: f64) -> Self {
        Complex64::new(value, 0.0)
    }

    fn imaginary(value: f64) -> Self {
        Complex64::new(0.0, value)
    }

    fn is_negligible(&self) -> bool {
        self.norm() < 1e-12
    }

    fn modulus(&self) -> f64 {
        self.norm()
    }
}
