use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use alloc::string::ToString;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Reduced rational with arbitrary-precision numerator and positive denominator.
///
/// Displays and parses as `num/den` (the denominator is always written).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRatio(BigRational);

impl ExactRatio {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(ExactRatio(BigRational::new(num.into(), den)))
    }

    /// `num/den` for callers that guarantee `den != 0`.
    pub(crate) fn frac(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        ExactRatio(BigRational::new(num.into(), den.into()))
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        ExactRatio(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        ExactRatio(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRatio(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn pow(&self, e: i32) -> Self {
        ExactRatio(num_traits::Pow::pow(&self.0, e))
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    /// Lossy, for human-readable summaries only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<BigRational> for ExactRatio {
    fn from(r: BigRational) -> Self {
        ExactRatio(r)
    }
}

macro_rules! from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for ExactRatio {
            fn from(n: $t) -> Self {
                ExactRatio::integer(n)
            }
        }
    )*};
}
from_int!(i32, i64, u32, u64, u128, i128, usize);

impl fmt::Display for ExactRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for ExactRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExactRatio {
    type Err = Error;

    /// Accepts `n`, `n/d` (either sign on the numerator).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedRatio(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(ExactRatio(BigRational::new(n, d)))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&ExactRatio> for &ExactRatio {
            type Output = ExactRatio;
            fn $m(self, rhs: &ExactRatio) -> ExactRatio {
                ExactRatio((&self.0).$m(&rhs.0))
            }
        }
        impl $tr for ExactRatio {
            type Output = ExactRatio;
            fn $m(self, rhs: ExactRatio) -> ExactRatio {
                ExactRatio(self.0.$m(rhs.0))
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for ExactRatio {
    type Output = ExactRatio;
    fn neg(self) -> ExactRatio {
        ExactRatio(-self.0)
    }
}

impl PartialEq<i64> for ExactRatio {
    fn eq(&self, other: &i64) -> bool {
        self.0 == BigRational::from_integer(BigInt::from(*other))
    }
}

impl PartialOrd<i64> for ExactRatio {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.0.cmp(&BigRational::from_integer(BigInt::from(*other))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_reduce() {
        let r: ExactRatio = "6/8".parse().unwrap();
        assert_eq!(r.to_string(), "3/4");
        assert_eq!("5".parse::<ExactRatio>().unwrap().to_string(), "5/1");
        assert_eq!("-2/-4".parse::<ExactRatio>().unwrap().to_string(), "1/2");
        assert!("1/0".parse::<ExactRatio>().is_err());
        assert!("x/2".parse::<ExactRatio>().is_err());
    }

    #[test]
    fn exact_comparison() {
        let a = ExactRatio::frac(1, 3);
        let b = ExactRatio::frac(333_333_333, 1_000_000_000);
        assert!(a > b);
        assert_eq!(&a * &ExactRatio::from(3), ExactRatio::one());
    }
}
