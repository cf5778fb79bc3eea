//! Numeric plumbing: exact/float probabilities and JSON-safe reals.

use std::fmt::Debug;
use std::ops::{Add, Mul};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serializer;

/// Writes finite reals as numbers and non-finite ones as the strings
/// `"-inf"`, `"inf"` or `"nan"` (JSON has no such numbers).
pub fn serialize_real<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub fn serialize_opt_real<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(x) => serialize_real(x, s),
        None => s.serialize_none(),
    }
}

/// `1/n` as an exact rational.
pub fn reciprocal(n: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(n))
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale both down by the same power of two first
            let shift = q.denom().bits().max(q.numer().bits()).saturating_sub(1000);
            let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            n / d
        }
    }
}

pub fn biguint_to_rational(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}

/// Arithmetic for transition probabilities: `f64` for speed, `BigRational`
/// when identities must hold exactly.
pub trait Probability:
    Clone + Debug + PartialOrd + Zero + One + Add<Output = Self> + Mul<Output = Self> + Send + Sync
{
    const EXACT: bool;
    fn from_exact(q: &BigRational) -> Self;
    /// `None` when a float cannot be represented faithfully.
    fn from_float(x: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
}

impl Probability for f64 {
    const EXACT: bool = false;

    fn from_exact(q: &BigRational) -> Self {
        rational_to_f64(q)
    }

    fn from_float(x: f64) -> Option<Self> {
        Some(x)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Probability for BigRational {
    const EXACT: bool = true;

    fn from_exact(q: &BigRational) -> Self {
        q.clone()
    }

    fn from_float(_: f64) -> Option<Self> {
        None
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_convert_even_when_huge() {
        let q = reciprocal(4);
        assert_eq!(rational_to_f64(&q), 0.25);
        let big = BigInt::from(2u32).pow(3000);
        let q = BigRational::new(big.clone(), big * BigInt::from(3));
        assert!((rational_to_f64(&q) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn non_finite_reals_serialize_as_strings() {
        #[derive(serde::Serialize)]
        struct W {
            #[serde(serialize_with = "serialize_real")]
            x: f64,
        }
        assert_eq!(
            serde_json::to_string(&W {
                x: f64::NEG_INFINITY
            })
            .unwrap(),
            r#"{"x":"-inf"}"#
        );
        assert_eq!(
            serde_json::to_string(&W { x: 0.5 }).unwrap(),
            r#"{"x":0.5}"#
        );
    }
}
