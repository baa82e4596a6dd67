//! Coefficient rings.
//!
//! Everything above this module is generic over [`Scalar`]. The concrete
//! rings used by the verification suites are exact: [`crate::Rational`],
//! polynomials over it ([`crate::QPoly`]) and the local ring of power series
//! at `x = 0` ([`crate::QSeries`]). `f64` is accepted for quick exploratory
//! work but none of the exactness guarantees hold for it.

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + Send
    + Sync
    + 'static
{
    /// Embeds an exact rational.
    fn from_rational(q: &BigRational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    /// `self * q` for a rational constant.
    fn scale(&self, q: &BigRational) -> Self {
        self.clone() * &Self::from_rational(q)
    }
}

/// A [`Scalar`] in which every nonzero element is invertible.
pub trait Field: Scalar + Div<Output = Self> + for<'a> Div<&'a Self, Output = Self> {
    fn inv(&self) -> Self {
        Self::one() / self
    }
}

impl Scalar for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn scale(&self, q: &BigRational) -> Self {
        self * q
    }
}

impl Field for BigRational {
    fn inv(&self) -> Self {
        self.recip()
    }
}

impl Scalar for f64 {
    fn from_rational(q: &BigRational) -> Self {
        q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
    }
}

impl Field for f64 {}

/// Shorthand for building rationals in tables and tests.
pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `(-1)^k` as a rational sign.
pub fn sign(odd: bool) -> BigRational {
    if odd {
        -BigRational::one()
    } else {
        BigRational::one()
    }
}

/// A rational that serializes as `{"n": "..", "d": ".."}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JsonQ(pub BigRational);

impl serde::Serialize for JsonQ {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Rational", 2)?;
        st.serialize_field("n", &self.0.numer().to_string())?;
        st.serialize_field("d", &self.0.denom().to_string())?;
        st.end()
    }
}

impl<'de> serde::Deserialize<'de> for JsonQ {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct Raw {
            n: String,
            d: String,
        }
        let raw = Raw::deserialize(d)?;
        let n: BigInt = raw.n.parse().map_err(serde::de::Error::custom)?;
        let den: BigInt = raw.d.parse().map_err(serde::de::Error::custom)?;
        if den.is_zero() {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(JsonQ(BigRational::new(n, den)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let big = BigRational::new(BigInt::from(10).pow(30) + 1, BigInt::from(-7));
        let s = serde_json::to_string(&JsonQ(big.clone())).unwrap();
        assert!(s.contains("\"d\":\"7\""));
        let back: JsonQ = serde_json::from_str(&s).unwrap();
        assert_eq!(back.0, big);
        assert!(serde_json::from_str::<JsonQ>(r#"{"n":"1","d":"0"}"#).is_err());
    }
}
