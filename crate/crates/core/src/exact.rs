//! Exact scalar arithmetic: unbounded rationals and Gaussian rationals.
//!
//! Every symbolic computation in this crate runs over the field of Gaussian
//! rationals (complex numbers with rational real and imaginary parts).
//! Values are always kept in lowest terms with a positive denominator, so
//! the text rendering is canonical and byte-stable.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, stored in lowest terms.
pub type Rational = num_rational::BigRational;

/// Complex number with rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GaussianRational {
            re: Rational::from_integer(BigInt::from(n)),
            im: Rational::zero(),
        }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussianRational {
            re: Rational::from_integer(BigInt::from(re)),
            im: Rational::from_integer(BigInt::from(im)),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussianRational {
            re: Rational::new(BigInt::from(num), BigInt::from(den)),
            im: Rational::zero(),
        }
    }

    pub fn from_real(re: Rational) -> Self {
        GaussianRational {
            re,
            im: Rational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Squared modulus, a nonnegative rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; errors on zero.
    pub fn checked_recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(GaussianRational {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.checked_recip()?)
    }

    /// Componentwise conversion to binary floating point, correctly rounded.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}i", self.re, sign, self.im.abs())
    }
}

impl FromStr for GaussianRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_gaussian(s)
    }
}

impl serde::Serialize for GaussianRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for GaussianRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &GaussianRational) -> GaussianRational {
                (&self).$method(rhs)
            }
        }
        impl $trait<GaussianRational> for &GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}
forward_binop!(Add, add);

impl Sub<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}
forward_binop!(Sub, sub);

impl Mul<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}
forward_binop!(Mul, mul);

impl Div<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self.checked_div(rhs).expect("division by zero")
    }
}
forward_binop!(Div, div);

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

/// Parses the canonical whitespace-free grammar: `int`, `int/int`, with an
/// optional `±(int|int/int)i` suffix, or a bare imaginary like `i`, `-i`, `2/3i`.
fn parse_gaussian(s: &str) -> Result<GaussianRational> {
    let err = || Error::Parse(format!("invalid exact scalar: {s:?}"));
    if s.is_empty() {
        return Err(err());
    }
    if let Some(body) = s.strip_suffix('i') {
        // Split off the imaginary coefficient at the last interior sign.
        let split = body
            .char_indices()
            .rev()
            .find(|&(pos, c)| (c == '+' || c == '-') && pos > 0 && body.as_bytes()[pos - 1] != b'/')
            .map(|(pos, _)| pos);
        let (re_str, im_str) = match split {
            Some(pos) => (&body[..pos], &body[pos..]),
            None => ("", body),
        };
        let re = if re_str.is_empty() {
            Rational::zero()
        } else {
            parse_rational(re_str).ok_or_else(err)?
        };
        let im = match im_str {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            other => parse_rational(other).ok_or_else(err)?,
        };
        Ok(GaussianRational { re, im })
    } else {
        let re = parse_rational(s).ok_or_else(err)?;
        Ok(GaussianRational::from_real(re))
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let (sign, rest) = match s.as_bytes().first()? {
        b'+' => (1, &s[1..]),
        b'-' => (-1, &s[1..]),
        _ => (1, s),
    };
    let (num_str, den_str) = match rest.split_once('/') {
        Some((n, d)) => (n, d),
        None => (rest, "1"),
    };
    if num_str.is_empty() || den_str.is_empty() {
        return None;
    }
    if !num_str.bytes().all(|b| b.is_ascii_digit()) || !den_str.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let num = BigInt::parse_bytes(num_str.as_bytes(), 10)?;
    let den = BigInt::parse_bytes(den_str.as_bytes(), 10)?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num * BigInt::from(sign), den))
}

/// Correctly rounded conversion of an arbitrary rational to `f64`.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let negative = r.is_negative();
    let a = r.numer().abs();
    let b = r.denom().clone();
    // Shift the numerator so the integer quotient carries at least 55 bits,
    // then round to 53 with ties to even using the division remainder.
    let e = a.bits() as i64 - b.bits() as i64;
    let s = 55 - e;
    let (q, rem) = if s >= 0 {
        (&a << s as u64).div_rem(&b)
    } else {
        a.div_rem(&(&b << (-s) as u64))
    };
    let mut q = q;
    let mut exp = -s;
    let qb = q.bits() as i64;
    let drop = qb - 53;
    if drop > 0 {
        let low = &q & ((BigInt::one() << drop as u64) - BigInt::one());
        q >>= drop as u64;
        exp += drop;
        let half = BigInt::one() << (drop - 1) as u64;
        let sticky = !rem.is_zero();
        let round_up = low > half || (low == half && (sticky || q.bit(0)));
        if round_up {
            q += BigInt::one();
            if q.bits() as i64 > 53 {
                q >>= 1u64;
                exp += 1;
            }
        }
    }
    let mantissa = q.to_f64().expect("53-bit mantissa fits f64");
    let value = mantissa * (exp as f64).exp2();
    if negative {
        -value
    } else {
        value
    }
}

use num_integer::Integer;

/// Best rational approximation of `x` via continued fractions, with
/// denominator bounded by `max_den`. Returns `None` for non-finite input.
pub fn rational_from_f64(x: f64, max_den: u64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let mut x = x.abs();
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let bound = BigInt::from(max_den);
    for _ in 0..64 {
        let a = x.floor();
        if a > 1e18 {
            break;
        }
        let ai = BigInt::from(a as i64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        if q2 > bound {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = x - a;
        if frac < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    if q1.is_zero() {
        return None;
    }
    Some(Rational::new(p1 * BigInt::from(sign), q1))
}

/// Rational helper: exact integer value when the rational is integral.
pub fn rational_as_i64(r: &Rational) -> Option<i64> {
    if r.denom().is_one() {
        r.numer().to_i64()
    } else {
        None
    }
}

pub fn rational_sign(r: &Rational) -> i8 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}
