//! Scalar abstraction shared by all spaces and solvers.
//!
//! Continuous spaces run on `f64`/`f32`; the lattice runs on exact
//! rationals so that midpoint coordinates and solved values come out
//! with zero rounding error. Everything downstream (solvers, convexity
//! checks, structure checks) is generic over [`Scalar`].

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Rem, Sub, SubAssign};

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational scalar used by the lattice space.
///
/// `i128` components are far beyond anything the bounded lattice
/// experiments can produce, so arithmetic never overflows in practice.
pub type Rat = Ratio<i128>;

/// Ordered field operations the geometry and the solvers need.
///
/// `EXACT` distinguishes the rational instantiation (margins compared
/// with tolerance zero) from floating-point ones.
pub trait Scalar:
    Copy
    + Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + serde::Serialize
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Rem<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Lossy view used for report output and coarse prefilters only.
    fn to_f64(self) -> f64;
    /// Conversion from a float; exact binary expansion for rationals
    /// (floats are dyadic by construction).
    fn from_f64_lossy(x: f64) -> Self;
    fn abs(self) -> Self;
    /// Floor as an exact integer (valid over the magnitudes we use).
    fn floor_int(self) -> i64;
    fn is_integer(self) -> bool;
    /// Total order; domain values never contain NaN.
    fn total_cmp(&self, other: &Self) -> std::cmp::Ordering;
    /// Canonical string used for hashing/ordering sample points.
    fn key(self) -> String;

    fn is_zero(self) -> bool {
        self == Self::zero()
    }
    fn half(self) -> Self {
        self / Self::from_int(2)
    }
    fn min_s(self, other: Self) -> Self {
        if other.total_cmp(&self) == std::cmp::Ordering::Less {
            other
        } else {
            self
        }
    }
    fn max_s(self, other: Self) -> Self {
        if other.total_cmp(&self) == std::cmp::Ordering::Greater {
            other
        } else {
            self
        }
    }
    fn ceil_int(self) -> i64 {
        -((-self).floor_int())
    }
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn zero() -> Self {
                0.0
            }
            fn one() -> Self {
                1.0
            }
            fn from_int(n: i64) -> Self {
                n as $t
            }
            fn from_ratio(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }
            fn to_f64(self) -> f64 {
                self as f64
            }
            fn from_f64_lossy(x: f64) -> Self {
                x as $t
            }
            fn abs(self) -> Self {
                <$t>::abs(self)
            }
            fn floor_int(self) -> i64 {
                <$t>::floor(self) as i64
            }
            fn is_integer(self) -> bool {
                self.fract() == 0.0
            }
            fn total_cmp(&self, other: &Self) -> std::cmp::Ordering {
                self.partial_cmp(other)
                    .expect("NaN is never a domain value")
            }
            fn key(self) -> String {
                // `{:?}` round-trips floats exactly; negative zero is
                // canonicalized so equal points share one key.
                let v = if self == 0.0 { 0.0 } else { self };
                format!("{:?}", v)
            }
        }

        impl RealScalar for $t {
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            fn powf(self, e: Self) -> Self {
                <$t>::powf(self, e)
            }
            fn pi() -> Self {
                std::f64::consts::PI as $t
            }
            fn infinity() -> Self {
                <$t>::INFINITY
            }
        }
    };
}

impl_float_scalar!(f64);
impl_float_scalar!(f32);

impl Scalar for Rat {
    const EXACT: bool = true;

    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn one() -> Self {
        Ratio::from_integer(1)
    }
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(n as i128)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num as i128, den as i128)
    }
    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("rational fits in f64 range")
    }
    fn from_f64_lossy(x: f64) -> Self {
        if x == 0.0 {
            return <Rat as Zero>::zero();
        }
        assert!(x.is_finite(), "cannot convert {x} to a rational");
        let (mantissa, exp, sign) = num_traits::Float::integer_decode(x);
        let m = mantissa as i128 * sign as i128;
        if exp >= 0 {
            assert!(exp < 70, "{x} too large for exact rational conversion");
            Ratio::from_integer(m << exp)
        } else {
            assert!(exp > -100, "{x} too small for exact rational conversion");
            Ratio::new(m, 1i128 << (-exp))
        }
    }
    fn abs(self) -> Self {
        Signed::abs(&self)
    }
    fn floor_int(self) -> i64 {
        self.floor().to_integer() as i64
    }
    fn is_integer(self) -> bool {
        Ratio::is_integer(&self)
    }
    fn total_cmp(&self, other: &Self) -> std::cmp::Ordering {
        Ord::cmp(self, other)
    }
    fn key(self) -> String {
        format!("{}", self)
    }
}

/// Scalars supporting the transcendental operations required by the
/// Euclidean p-norm and cylinder spaces.
pub trait RealScalar: Scalar {
    fn sqrt(self) -> Self;
    fn powf(self, e: Self) -> Self;
    fn pi() -> Self;
    fn infinity() -> Self;
}

/// Parses "n", "n/d" or decimal text into a scalar, exactly for rationals.
pub fn parse_scalar<S: Scalar>(text: &str) -> Result<S, String> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let n: i64 = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in {text:?}"))?;
        let d: i64 = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in {text:?}"))?;
        if d == 0 {
            return Err(format!("zero denominator in {text:?}"));
        }
        return Ok(S::from_ratio(n, d));
    }
    if let Ok(n) = text.parse::<i64>() {
        return Ok(S::from_int(n));
    }
    // Decimal form: mantissa digits over a power of ten.
    if let Some((int_part, frac_part)) = text.split_once('.') {
        let digits = format!("{}{}", int_part.trim_start_matches('-'), frac_part);
        let n: i64 = digits
            .parse()
            .map_err(|_| format!("cannot parse scalar {text:?}"))?;
        let mut den: i64 = 1;
        for _ in 0..frac_part.len() {
            den = den
                .checked_mul(10)
                .ok_or_else(|| format!("scalar {text:?} has too many digits"))?;
        }
        let sign = if text.trim_start().starts_with('-') {
            -1
        } else {
            1
        };
        return Ok(S::from_ratio(sign * n, den));
    }
    Err(format!("cannot parse scalar {text:?}"))
}

/// True when `x` is of the form `2^-m` for some `m >= 0` (lattice step sizes).
pub fn is_inverse_power_of_two(x: Rat) -> bool {
    *x.numer() == 1 && x.denom().count_ones() == 1
}

/// True when the denominator of `x` (lowest terms) is a power of two.
pub fn is_dyadic(x: Rat) -> bool {
    x.denom().count_ones() == 1
}

/// Formats a rational as the lattice wire form: integers bare, other
/// dyadics (and general rationals) as "num/den".
pub fn dyadic_string(x: Rat) -> String {
    if Ratio::is_integer(&x) {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
