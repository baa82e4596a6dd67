//! Dense univariate polynomials.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::{Field, Scalar};

/// Polynomial with coefficients stored from the constant term upwards.
/// The coefficient vector never ends in a zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<F> {
    coeffs: Vec<F>,
}

impl<F: Scalar> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// `a + b x`.
    pub fn linear(a: F, b: F) -> Self {
        Self::new(vec![a, b])
    }

    pub fn x() -> Self {
        Self::linear(F::zero(), F::one())
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(F::zero)
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    /// Order of vanishing at zero; `None` for the zero polynomial.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, at: &F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * at + c;
        }
        acc
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self;
        }
        acc
    }

    fn add_impl(&self, rhs: &Self, negate: bool) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i);
            let b = rhs.coeffs.get(i);
            let v = match (a, b) {
                (Some(a), Some(b)) => {
                    if negate {
                        a.clone() - b
                    } else {
                        a.clone() + b
                    }
                }
                (Some(a), None) => a.clone(),
                (None, Some(b)) => {
                    if negate {
                        -b.clone()
                    } else {
                        b.clone()
                    }
                }
                (None, None) => unreachable!(),
            };
            out.push(v);
        }
        Self::new(out)
    }

    fn mul_impl(&self, rhs: &Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a.clone() * b);
            }
        }
        Self::new(out)
    }
}

impl<F: Field> Poly<F> {
    /// Euclidean division.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.coeffs[dd].inv();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![F::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd].clone() * &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i + j] -= &(c.clone() * dc);
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Scales to a monic polynomial (zero stays zero).
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => {
                let inv = l.inv();
                Self::new(self.coeffs.iter().map(|c| c.clone() * &inv).collect())
            }
        }
    }
}

impl<F: Scalar> Zero for Poly<F> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<F: Scalar> One for Poly<F> {
    fn one() -> Self {
        Self::constant(F::one())
    }
}

impl<F: Scalar> Neg for Poly<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Poly { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<F: Scalar> Add for Poly<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.add_impl(&rhs, false)
    }
}

impl<'a, F: Scalar> Add<&'a Poly<F>> for Poly<F> {
    type Output = Self;
    fn add(self, rhs: &'a Self) -> Self {
        self.add_impl(rhs, false)
    }
}

impl<F: Scalar> Sub for Poly<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.add_impl(&rhs, true)
    }
}

impl<'a, F: Scalar> Sub<&'a Poly<F>> for Poly<F> {
    type Output = Self;
    fn sub(self, rhs: &'a Self) -> Self {
        self.add_impl(rhs, true)
    }
}

impl<F: Scalar> Mul for Poly<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_impl(&rhs)
    }
}

impl<'a, F: Scalar> Mul<&'a Poly<F>> for Poly<F> {
    type Output = Self;
    fn mul(self, rhs: &'a Self) -> Self {
        self.mul_impl(rhs)
    }
}

impl<'a, F: Scalar> AddAssign<&'a Poly<F>> for Poly<F> {
    fn add_assign(&mut self, rhs: &'a Self) {
        *self = self.add_impl(rhs, false);
    }
}

impl<'a, F: Scalar> SubAssign<&'a Poly<F>> for Poly<F> {
    fn sub_assign(&mut self, rhs: &'a Self) {
        *self = self.add_impl(rhs, true);
    }
}

impl<F: Scalar> Scalar for Poly<F> {
    fn from_rational(q: &BigRational) -> Self {
        Self::constant(F::from_rational(q))
    }

    fn scale(&self, q: &BigRational) -> Self {
        let c = F::from_rational(q);
        Self::new(self.coeffs.iter().map(|a| a.clone() * &c).collect())
    }
}

impl<F: Scalar> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;

    type P = Poly<BigRational>;

    fn p(c: &[i64]) -> P {
        P::new(c.iter().map(|&v| qi(v)).collect())
    }

    #[test]
    fn arithmetic_and_trimming() {
        let a = p(&[1, 2, 3]);
        let b = p(&[0, 0, -3]);
        assert_eq!((a.clone() + &b).degree(), Some(1));
        assert_eq!(a.clone() * &p(&[1, 1]), p(&[1, 3, 5, 3]));
        assert!((a.clone() - &a).is_zero());
        assert_eq!(p(&[0, 0, 5]).valuation(), Some(2));
        assert_eq!(a.eval(&qi(2)), qi(17));
    }

    #[test]
    fn division() {
        let a = p(&[-1, 0, 1]);
        let (qq, r) = a.div_rem(&p(&[-1, 1]));
        assert_eq!(qq, p(&[1, 1]));
        assert!(r.is_zero());
    }
}
