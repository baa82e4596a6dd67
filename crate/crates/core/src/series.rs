//! The local ring at `x = 0`.
//!
//! Elements are power series known modulo `x^prec`. Values coming from
//! polynomial data are exact (`prec == None`); precision is only lost when
//! dividing, either by a unit (the inverse is truncated at a caller-chosen cap)
//! or by a power of `x`. Precision is carried through every operation, so a
//! result that claims `k` known coefficients really has them.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::poly::Poly;
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug)]
pub struct LocalSeries<F> {
    coeffs: Vec<F>,
    prec: Option<usize>,
}

fn min_prec(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (None, p) | (p, None) => p,
        (Some(a), Some(b)) => Some(a.min(b)),
    }
}

impl<F: Field> LocalSeries<F> {
    fn build(mut coeffs: Vec<F>, prec: Option<usize>) -> Self {
        if let Some(p) = prec {
            coeffs.truncate(p);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        LocalSeries { coeffs, prec }
    }

    pub fn exact(coeffs: Vec<F>) -> Self {
        Self::build(coeffs, None)
    }

    pub fn constant(c: F) -> Self {
        Self::exact(vec![c])
    }

    pub fn linear(a: F, b: F) -> Self {
        Self::exact(vec![a, b])
    }

    pub fn from_poly(p: &Poly<F>) -> Self {
        Self::exact(p.coeffs().to_vec())
    }

    /// Number of known coefficients; `None` when exact.
    pub fn precision(&self) -> Option<usize> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(F::zero)
    }

    /// Index of the first known nonzero coefficient. `None` when the element
    /// is zero to the known precision.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Valuation lower bound usable in precision bookkeeping.
    fn val_bound(&self) -> Option<usize> {
        match self.valuation() {
            Some(v) => Some(v),
            None => self.prec,
        }
    }

    /// Value at `x = 0`; `None` if not even the constant term is known.
    pub fn eval0(&self) -> Option<F> {
        match self.prec {
            Some(0) => None,
            _ => Some(self.coeff(0)),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.eval0().is_some_and(|c| !c.is_zero())
    }

    pub fn truncate(&self, cap: usize) -> Self {
        Self::build(self.coeffs.clone(), min_prec(self.prec, Some(cap)))
    }

    /// Division by `x^d`; the first `d` coefficients must be zero.
    pub fn shift_down(&self, d: usize) -> Self {
        debug_assert!(self.coeffs.iter().take(d).all(|c| c.is_zero()));
        let coeffs = self.coeffs.iter().skip(d).cloned().collect();
        Self::build(coeffs, self.prec.map(|p| p.saturating_sub(d)))
    }

    /// Inverse of a unit, truncated to at most `cap` coefficients.
    pub fn inv_unit(&self, cap: usize) -> Self {
        let c0 = self.coeff(0);
        assert!(!c0.is_zero() && self.prec != Some(0), "inverse of a non-unit");
        let n = self.prec.map_or(cap, |p| p.min(cap));
        let inv0 = c0.inv();
        let mut out: Vec<F> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                out.push(inv0.clone());
                continue;
            }
            let mut acc = F::zero();
            for j in 1..=k.min(self.coeffs.len().saturating_sub(1)) {
                acc += &(self.coeffs[j].clone() * &out[k - j]);
            }
            out.push(-(acc * &inv0));
        }
        Self::build(out, Some(n))
    }

    pub fn div_unit(&self, unit: &Self, cap: usize) -> Self {
        self.clone() * &unit.inv_unit(cap)
    }

    /// Division when the quotient lies in the local ring: `val(self) >= val(d)`.
    pub fn div_local(&self, d: &Self, cap: usize) -> Option<Self> {
        let vd = d.valuation()?;
        match self.valuation() {
            Some(v) if v < vd => return None,
            None if self.prec.is_some_and(|p| p < vd) => return None,
            _ => {}
        }
        if self.is_zero() && self.prec.is_none() {
            return Some(Self::zero());
        }
        Some(self.shift_down(vd).div_unit(&d.shift_down(vd), cap))
    }

    fn add_impl(&self, rhs: &Self, negate: bool) -> Self {
        let prec = min_prec(self.prec, rhs.prec);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let n = prec.map_or(n, |p| p.min(n));
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeff(i);
            let b = rhs.coeff(i);
            out.push(if negate { a - b } else { a + b });
        }
        Self::build(out, prec)
    }

    fn mul_impl(&self, rhs: &Self) -> Self {
        if (self.prec.is_none() && self.coeffs.is_empty())
            || (rhs.prec.is_none() && rhs.coeffs.is_empty())
        {
            return Self::zero();
        }
        let prec = match (self.prec, rhs.prec) {
            (None, None) => None,
            (Some(pa), None) => Some(pa + rhs.val_bound().unwrap_or(0)),
            (None, Some(pb)) => Some(pb + self.val_bound().unwrap_or(0)),
            (Some(pa), Some(pb)) => Some(
                (pa + rhs.val_bound().unwrap_or(0)).min(pb + self.val_bound().unwrap_or(0)),
            ),
        };
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Self::build(Vec::new(), prec);
        }
        let full = self.coeffs.len() + rhs.coeffs.len() - 1;
        let n = prec.map_or(full, |p| p.min(full));
        let mut out = vec![F::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= n {
                break;
            }
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                out[i + j] += &(a.clone() * b);
            }
        }
        Self::build(out, prec)
    }
}

impl<F: Field> PartialEq for LocalSeries<F> {
    fn eq(&self, other: &Self) -> bool {
        self.add_impl(other, true).is_zero()
    }
}

impl<F: Field> Zero for LocalSeries<F> {
    fn zero() -> Self {
        LocalSeries { coeffs: Vec::new(), prec: None }
    }
    /// True when no known coefficient is nonzero.
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<F: Field> One for LocalSeries<F> {
    fn one() -> Self {
        Self::constant(F::one())
    }
}

impl<F: Field> Neg for LocalSeries<F> {
    type Output = Self;
    fn neg(self) -> Self {
        LocalSeries { coeffs: self.coeffs.into_iter().map(|c| -c).collect(), prec: self.prec }
    }
}

impl<F: Field> Add for LocalSeries<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.add_impl(&rhs, false)
    }
}

impl<'a, F: Field> Add<&'a LocalSeries<F>> for LocalSeries<F> {
    type Output = Self;
    fn add(self, rhs: &'a Self) -> Self {
        self.add_impl(rhs, false)
    }
}

impl<F: Field> Sub for LocalSeries<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.add_impl(&rhs, true)
    }
}

impl<'a, F: Field> Sub<&'a LocalSeries<F>> for LocalSeries<F> {
    type Output = Self;
    fn sub(self, rhs: &'a Self) -> Self {
        self.add_impl(rhs, true)
    }
}

impl<F: Field> Mul for LocalSeries<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_impl(&rhs)
    }
}

impl<'a, F: Field> Mul<&'a LocalSeries<F>> for LocalSeries<F> {
    type Output = Self;
    fn mul(self, rhs: &'a Self) -> Self {
        self.mul_impl(rhs)
    }
}

impl<'a, F: Field> AddAssign<&'a LocalSeries<F>> for LocalSeries<F> {
    fn add_assign(&mut self, rhs: &'a Self) {
        *self = self.add_impl(rhs, false);
    }
}

impl<'a, F: Field> SubAssign<&'a LocalSeries<F>> for LocalSeries<F> {
    fn sub_assign(&mut self, rhs: &'a Self) {
        *self = self.add_impl(rhs, true);
    }
}

impl<F: Field> Scalar for LocalSeries<F> {
    fn from_rational(q: &BigRational) -> Self {
        Self::constant(F::from_rational(q))
    }
}

impl<F: Field> fmt::Display for LocalSeries<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
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
        if first && self.prec.is_none() {
            write!(f, "0")?;
        }
        if let Some(p) = self.prec {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "O(x^{p})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;

    type S = LocalSeries<BigRational>;

    fn s(c: &[i64]) -> S {
        S::exact(c.iter().map(|&v| qi(v)).collect())
    }

    #[test]
    fn unit_inverse_is_truncated_geometric_series() {
        let u = s(&[1, -1]);
        let inv = u.inv_unit(5);
        assert_eq!(inv.precision(), Some(5));
        for k in 0..5 {
            assert_eq!(inv.coeff(k), qi(1));
        }
        let back = inv * &u;
        assert_eq!(back.precision(), Some(5));
        assert_eq!(back, S::one().truncate(5));
    }

    #[test]
    fn precision_tracks_valuation() {
        let a = s(&[0, 0, 3]).truncate(4);
        let b = s(&[0, 1]).truncate(3);
        // a known mod x^4 with valuation 2, b mod x^3 with valuation 1
        let p = a * &b;
        assert_eq!(p.precision(), Some(5));
        assert_eq!(p.valuation(), Some(3));
    }

    #[test]
    fn local_division() {
        let a = s(&[0, 2, 2]);
        let d = s(&[0, 1]);
        let q = a.div_local(&d, 6).unwrap();
        assert_eq!(q, s(&[2, 2]));
        assert!(s(&[1]).div_local(&d, 6).is_none());
    }
}
