//! Arithmetic modes shared by the step-function and witness code.
//!
//! Witness constructions run over [`Exact`] (arbitrary precision rationals)
//! so that identities such as `A∘V∘B = Id` are checked bit-for-bit; searches
//! run over `f64`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Exact = BigRational;

/// Arithmetic mode recorded in every result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Float => write!(f, "float"),
        }
    }
}

/// A real field usable by [`crate::step::StepFunction`].
pub trait Scalar:
    Clone + Debug + PartialOrd + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    const MODE: Mode;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// String form used by the JSON schema: decimal for floats, `p/q` for rationals.
    fn to_json_string(&self) -> String;

    fn parse_json(s: &str) -> Option<Self>;
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_json_string(&self) -> String {
        format!("{self:?}")
    }

    fn parse_json(s: &str) -> Option<Self> {
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().ok()?;
            let q: f64 = q.trim().parse().ok()?;
            Some(p / q)
        } else {
            s.trim().parse().ok()
        }
    }
}

impl Scalar for Exact {
    const MODE: Mode = Mode::Exact;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_json_string(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn parse_json(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        } else if let Ok(i) = s.parse::<BigInt>() {
            Some(BigRational::from_integer(i))
        } else {
            // decimals are accepted and converted exactly from their binary value
            let v: f64 = s.parse().ok()?;
            BigRational::from_float(v)
        }
    }
}

/// Exact rational `num/den`.
pub fn q(num: i64, den: i64) -> Exact {
    Exact::from_ratio(num, den)
}

/// The rational with the shortest decimal expansion that rounds to `v`
/// (`0.05` becomes `1/20`, not the binary value).
pub fn decimal(v: f64) -> Option<Exact> {
    if !v.is_finite() {
        return None;
    }
    let text = format!("{v:e}");
    let (mantissa, exp) = text.split_once('e')?;
    let exp: i32 = exp.parse().ok()?;
    let frac_digits = mantissa.split_once('.').map_or(0, |(_, f)| f.len()) as i32;
    let digits: BigInt = mantissa.replace('.', "").parse().ok()?;
    let shift = exp - frac_digits;
    let ten = BigInt::from(10);
    Some(if shift >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-shift) as usize))
    })
}

/// `2^e` as an exact rational, `e` may be negative.
pub fn pow2(e: i32) -> Exact {
    let two = BigInt::from(2);
    if e >= 0 {
        BigRational::from_integer(num_traits::pow(two, e as usize))
    } else {
        BigRational::new(BigInt::one(), num_traits::pow(two, (-e) as usize))
    }
}

pub fn max_of<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}

pub fn min_of<S: Scalar>(a: S, b: S) -> S {
    if b < a {
        b
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_decimals() {
        assert_eq!(decimal(0.05), Some(q(1, 20)));
        assert_eq!(decimal(-1.25e3), Some(q(-1250, 1)));
        assert_eq!(decimal(1e-3), Some(q(1, 1000)));
        assert_eq!(decimal(0.0), Some(q(0, 1)));
        assert_eq!(decimal(f64::NAN), None);
    }
}
