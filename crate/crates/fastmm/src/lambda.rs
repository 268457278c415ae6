//! Integer-coefficient polynomials in the formal approximation parameter.

use crate::ring::Coeff;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// Polynomial in the parameter with integer coefficients, ascending order,
/// normalized so the leading coefficient is nonzero (empty = zero).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LambdaPoly {
    coeffs: Vec<BigInt>,
}

impl LambdaPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: i64) -> Self {
        Self::from_coeffs(vec![BigInt::from(c)])
    }

    /// c * lambda^deg
    pub fn monomial(c: i64, deg: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); deg + 1];
        coeffs[deg] = BigInt::from(c);
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coefficient(&self, deg: usize) -> BigInt {
        self.coeffs.get(deg).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|i| self.coefficient(i) + rhs.coefficient(i))
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn eval_rational(&self, x: &Coeff) -> Coeff {
        let mut acc = Coeff::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Coeff::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::coeff;

    #[test]
    fn arithmetic_and_eval() {
        let p = LambdaPoly::monomial(2, 2).add(&LambdaPoly::constant(-3)); // 2x^2 - 3
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.eval_f64(2.0), 5.0);
        assert_eq!(p.eval_rational(&coeff(1, 2)), coeff(-5, 2));
        let q = p.mul(&p); // 4x^4 - 12x^2 + 9
        assert_eq!(q.coefficient(4), 4.into());
        assert_eq!(q.coefficient(2), (-12).into());
        assert_eq!(q.coefficient(0), 9.into());
        assert!(p.add(&p.neg()).is_zero());
    }

    #[test]
    fn normalization_strips_leading_zeros() {
        let p = LambdaPoly::from_coeffs(vec![1.into(), 0.into(), 0.into()]);
        assert_eq!(p.degree(), Some(0));
        assert_eq!(LambdaPoly::from_coeffs(vec![0.into()]), LambdaPoly::zero());
    }
}
