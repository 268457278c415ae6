//! Entry rings for matrices: exact integers, exact rationals, and f64.
//!
//! Algorithm coefficients are always exact rationals ([`Coeff`]); a ring
//! decides whether such a coefficient embeds into it. Integer rings reject
//! non-integral coefficients, which is how "coefficient not representable"
//! errors surface.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Exact rational coefficient, the scalar domain of every algorithm.
pub type Coeff = BigRational;

/// Build a coefficient from a numerator/denominator pair.
pub fn coeff(num: i64, den: i64) -> Coeff {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Integer coefficient shorthand.
pub fn coeff_int(num: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(num))
}

/// Ring of matrix entries.
///
/// `add`/`sub`/`mul` take references so arbitrary-precision instances never
/// clone implicitly. `from_coeff` embeds an algorithm coefficient, returning
/// `None` when the coefficient does not exist in the ring.
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_coeff(c: &Coeff) -> Option<Self>;
    fn from_i64(v: i64) -> Self;
}

impl Ring for BigInt {
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn one() -> Self {
        <BigInt as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_coeff(c: &Coeff) -> Option<Self> {
        if c.denom().is_one() {
            Some(c.numer().clone())
        } else {
            None
        }
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
}

impl Ring for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_coeff(c: &Coeff) -> Option<Self> {
        Some(c.clone())
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

/// Double precision, used only for the numeric APA mode and wall-clock
/// benchmarking. Exactness tests never run on this instance.
impl Ring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_coeff(c: &Coeff) -> Option<Self> {
        c.to_f64()
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

/// True when the coefficient is +1 or -1, i.e. costs no multiplication.
pub fn is_unit_coeff(c: &Coeff) -> bool {
    c.is_one() || (-c).is_one()
}

/// True when the coefficient is negative (used to canonicalize printing).
pub fn is_negative_coeff(c: &Coeff) -> bool {
    c.is_negative()
}
