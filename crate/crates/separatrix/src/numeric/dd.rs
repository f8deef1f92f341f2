//! Double-double arithmetic (about 106 significand bits).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};
use std::sync::OnceLock;

use num_traits::{Num, One, Zero};

use super::elementary;
use super::Real;

#[inline]
pub(super) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
pub(super) fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
pub(super) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[derive(Clone, Copy, Default)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Dd {
        Dd { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::new(q1, 0.0);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::new(q2, 0.0);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd::new(q1, q2) + Dd::new(q3, 0.0)
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, b: Dd) -> Dd {
        let q = self / b;
        let t = if q.hi < 0.0 { -((-q).floor()) } else { q.floor() };
        self - t * b
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}
impl SubAssign for Dd {
    fn sub_assign(&mut self, b: Dd) {
        *self = *self - b;
    }
}
impl MulAssign for Dd {
    fn mul_assign(&mut self, b: Dd) {
        *self = *self * b;
    }
}
impl DivAssign for Dd {
    fn div_assign(&mut self, b: Dd) {
        *self = *self / b;
    }
}

impl RemAssign for Dd {
    fn rem_assign(&mut self, b: Dd) {
        *self = *self % b;
    }
}

impl PartialEq for Dd {
    fn eq(&self, o: &Dd) -> bool {
        self.hi == o.hi && self.lo == o.lo
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, o: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&o.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&o.lo),
            other => other,
        }
    }
}

impl Zero for Dd {
    fn zero() -> Dd {
        Dd::new(0.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for Dd {
    fn one() -> Dd {
        Dd::new(1.0, 0.0)
    }
}

impl Num for Dd {
    type FromStrRadixErr = &'static str;
    fn from_str_radix(s: &str, radix: u32) -> Result<Dd, Self::FromStrRadixErr> {
        if radix != 10 {
            return Err("only radix 10 is supported");
        }
        <Dd as Real>::parse(s).ok_or("malformed number")
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e}, {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&elementary::to_sci(*self, 32))
    }
}

impl Real for Dd {
    const BITS: u32 = 106;
    const NAME: &'static str = "double-double";

    fn from_f64(x: f64) -> Dd {
        Dd::new(x, 0.0)
    }
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    fn epsilon() -> Dd {
        Dd::new(2f64.powi(-104), 0.0)
    }
    fn pi() -> Dd {
        static PI: OnceLock<Dd> = OnceLock::new();
        *PI.get_or_init(elementary::machin_pi)
    }
    fn ln2() -> Dd {
        static LN2: OnceLock<Dd> = OnceLock::new();
        *LN2.get_or_init(elementary::series_ln2)
    }
    fn ldexp(self, e: i32) -> Dd {
        let s = 2f64.powi(e);
        Dd::new(self.hi * s, self.lo * s)
    }
    fn floor(self) -> Dd {
        let hi = self.hi.floor();
        if hi == self.hi {
            let (a, b) = quick_two_sum(hi, self.lo.floor());
            Dd::new(a, b)
        } else {
            Dd::new(hi, 0.0)
        }
    }
    fn sqrt(self) -> Dd {
        elementary::sqrt_newton(self, 2)
    }
    fn exp(self) -> Dd {
        elementary::exp(self)
    }
    fn ln(self) -> Dd {
        elementary::ln(self, 2)
    }
    fn sin_cos(self) -> (Dd, Dd) {
        elementary::sin_cos(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, b: Dd, tol: f64) -> bool {
        (a - b).abs().to_f64() <= tol * b.abs().to_f64().max(1e-300)
    }

    #[test]
    fn arithmetic_identities() {
        let third = Dd::one() / Dd::from_f64(3.0);
        let back = third * Dd::from_f64(3.0);
        assert!((back - Dd::one()).abs().to_f64() < 1e-31);
        let x = Dd::parse("1.2345678901234567890123456789").unwrap();
        let y = Dd::parse("9.8765432109876543210987654321").unwrap();
        assert!(close((x * y) / y, x, 1e-31));
        assert!(close((x + y) - y, x, 1e-31));
    }

    #[test]
    fn constants() {
        let pi = Dd::pi();
        assert_eq!(pi.hi(), std::f64::consts::PI);
        assert!((pi.lo() - 1.2246467991473532e-16).abs() < 1e-31);
        let ln2 = Dd::ln2();
        assert_eq!(ln2.hi(), std::f64::consts::LN_2);
        assert!((ln2.lo() - 2.3190468138462996e-17).abs() < 1e-31);
    }

    #[test]
    fn elementary_functions() {
        let two = Dd::from_f64(2.0);
        let r = two.sqrt();
        assert!((r * r - two).abs().to_f64() < 1e-31);
        let e = Dd::one().exp();
        let want = Dd::parse("2.71828182845904523536028747135266249775724709").unwrap();
        assert!(close(e, want, 1e-31));
        assert!(close(e.ln(), Dd::one(), 1e-31));
        let (s, c) = Dd::from_f64(1.0).sin_cos();
        let ws = Dd::parse("0.841470984807896506652502321630298999622563061").unwrap();
        let wc = Dd::parse("0.540302305868139717400936607442976603732310421").unwrap();
        assert!(close(s, ws, 1e-31));
        assert!(close(c, wc, 1e-31));
        let (s, _) = (Dd::pi() * Dd::from_f64(100.5)).sin_cos();
        assert!(close(s, Dd::one(), 1e-29));
    }
}
