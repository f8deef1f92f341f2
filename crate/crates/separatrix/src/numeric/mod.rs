//! Scalar types: a `Real` abstraction over `f64`, double-double and
//! quad-double, plus complex helpers built on `num_complex::Complex`.

mod dd;
mod elementary;
pub mod linalg;
pub mod quadrature;
mod qd;

pub use dd::Dd;
pub use qd::Qd;

use std::fmt;
use std::ops::Neg;

use num_bigint::{BigInt, Sign};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{NumAssign, One, ToPrimitive, Zero};

pub type C<T> = Complex<T>;

/// Real scalar used by every numerical routine in the crate.
pub trait Real:
    Copy
    + Send
    + Sync
    + 'static
    + fmt::Debug
    + fmt::Display
    + PartialOrd
    + NumAssign
    + Neg<Output = Self>
{
    /// Significand bits carried by the type.
    const BITS: u32;
    const NAME: &'static str;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    /// Unit roundoff.
    fn epsilon() -> Self;
    fn pi() -> Self;
    fn ln2() -> Self;
    /// Multiply by `2^e` exactly.
    fn ldexp(self, e: i32) -> Self;
    fn floor(self) -> Self;

    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin_cos(self) -> (Self, Self);

    fn from_i64(n: i64) -> Self {
        let hi = (n >> 26) as f64 * 67_108_864.0;
        let lo = (n & ((1 << 26) - 1)) as f64;
        Self::from_f64(hi) + Self::from_f64(lo)
    }

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    fn is_finite(self) -> bool {
        self.to_f64().is_finite()
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn round(self) -> Self {
        (self + Self::from_f64(0.5)).floor()
    }

    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut k = n.unsigned_abs();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base *= base;
            k >>= 1;
        }
        acc
    }

    fn sin(self) -> Self {
        self.sin_cos().0
    }

    fn cos(self) -> Self {
        self.sin_cos().1
    }

    fn atan2(self, x: Self) -> Self {
        elementary::atan2(self, x)
    }

    fn from_bigint(n: &BigInt) -> Self {
        let (sign, digits) = n.to_u32_digits();
        let radix = Self::from_f64(4_294_967_296.0);
        let mut acc = Self::zero();
        for d in digits.iter().rev() {
            acc = acc * radix + Self::from_f64(*d as f64);
        }
        if sign == Sign::Minus {
            -acc
        } else {
            acc
        }
    }

    fn from_rational(r: &BigRational) -> Self {
        let num = r.numer();
        let den = r.denom();
        // keep both parts inside the exponent range of f64
        let shift = num.bits().max(den.bits()) as i64 - 900;
        if shift > 0 {
            let s = shift as usize;
            let n = Self::from_bigint(&(num >> s));
            let d = Self::from_bigint(&(den >> s));
            return n / d;
        }
        Self::from_bigint(num) / Self::from_bigint(den)
    }

    /// Parse a decimal or `p/q` literal exactly, then round once.
    fn parse(s: &str) -> Option<Self> {
        parse_rational(s).map(|r| Self::from_rational(&r))
    }

    /// Fixed count of significant decimal digits in scientific notation.
    fn to_sci(self, digits: usize) -> String {
        elementary::to_sci(self, digits)
    }
}

/// Decimal digits a type carries, for formatting.
pub fn digits_of<T: Real>() -> usize {
    ((T::BITS as f64) * std::f64::consts::LOG10_2).floor() as usize
}

/// Parse `p/q`, an integer, or a decimal with optional exponent into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    if neg {
        n = -n;
    }
    let e10 = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if e10 >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, e10 as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-e10) as usize))
    };
    Some(r)
}

/// Best-effort conversion of a rational to `f64`.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn cre<T: Real>(x: T) -> C<T> {
    C::new(x, T::zero())
}

pub fn cf64<T: Real>(re: f64, im: f64) -> C<T> {
    C::new(T::from_f64(re), T::from_f64(im))
}

pub fn cabs<T: Real>(z: C<T>) -> T {
    let (a, b) = (z.re.abs(), z.im.abs());
    let (big, small) = if a > b { (a, b) } else { (b, a) };
    if big.is_zero() {
        return T::zero();
    }
    let r = small / big;
    big * (T::one() + r * r).sqrt()
}

pub fn cexp<T: Real>(z: C<T>) -> C<T> {
    let m = z.re.exp();
    let (s, c) = z.im.sin_cos();
    C::new(m * c, m * s)
}

pub fn csqrt<T: Real>(z: C<T>) -> C<T> {
    if z.re.is_zero() && z.im.is_zero() {
        return z;
    }
    let r = cabs(z);
    let half = T::from_f64(0.5);
    let a = ((r + z.re.abs()) * half).sqrt();
    if z.re >= T::zero() {
        C::new(a, z.im / (a + a))
    } else {
        let b = if z.im < T::zero() { -a } else { a };
        C::new(z.im.abs() / (a + a), b)
    }
}

pub fn ccosh<T: Real>(z: C<T>) -> C<T> {
    let e = z.re.exp();
    let ei = T::one() / e;
    let half = T::from_f64(0.5);
    let (s, c) = z.im.sin_cos();
    C::new((e + ei) * half * c, (e - ei) * half * s)
}

pub fn csinh<T: Real>(z: C<T>) -> C<T> {
    let e = z.re.exp();
    let ei = T::one() / e;
    let half = T::from_f64(0.5);
    let (s, c) = z.im.sin_cos();
    C::new((e - ei) * half * c, (e + ei) * half * s)
}

pub fn cpowi<T: Real>(z: C<T>, n: i32) -> C<T> {
    let mut base = if n < 0 { C::<T>::one() / z } else { z };
    let mut k = n.unsigned_abs();
    let mut acc = C::<T>::one();
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base = base * base;
        k >>= 1;
    }
    acc
}

pub fn cto_f64<T: Real>(z: C<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn cconv<S: Real, T: Real>(z: C<S>) -> C<T> {
    C::new(convert(z.re), convert(z.im))
}

/// Convert between precisions through the decimal-free component path.
pub fn convert<S: Real, T: Real>(x: S) -> T {
    let mut acc = T::zero();
    let mut rest = x;
    for _ in 0..6 {
        let h = rest.to_f64();
        if h == 0.0 || !h.is_finite() {
            break;
        }
        acc += T::from_f64(h);
        rest -= S::from_f64(h);
    }
    acc
}

impl Real for f64 {
    const BITS: u32 = 53;
    const NAME: &'static str = "f64";

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn epsilon() -> Self {
        f64::EPSILON / 2.0
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn ln2() -> Self {
        std::f64::consts::LN_2
    }
    fn ldexp(self, e: i32) -> Self {
        self * 2f64.powi(e)
    }
    fn floor(self) -> Self {
        f64::floor(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
}

/// Working precision chosen from a requested bit count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Precision {
    F64,
    DoubleDouble,
    QuadDouble,
}

impl Precision {
    /// Smallest supported type carrying at least `bits` significand bits.
    pub fn for_bits(bits: u32) -> Option<Precision> {
        match bits {
            0..=53 => Some(Precision::F64),
            54..=106 => Some(Precision::DoubleDouble),
            107..=212 => Some(Precision::QuadDouble),
            _ => None,
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            Precision::F64 => <f64 as Real>::BITS,
            Precision::DoubleDouble => Dd::BITS,
            Precision::QuadDouble => Qd::BITS,
        }
    }
}
