//! Quad-double arithmetic (about 212 significand bits).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};
use std::sync::OnceLock;

use num_traits::{Num, One, Zero};

use super::dd::{quick_two_sum, two_prod, two_sum};
use super::elementary;
use super::Real;

#[derive(Clone, Copy, Default)]
pub struct Qd([f64; 4]);

#[inline]
fn three_sum(a: &mut f64, b: &mut f64, c: &mut f64) {
    let (t1, t2) = two_sum(*a, *b);
    let (s, t3) = two_sum(*c, t1);
    *a = s;
    let (s, e) = two_sum(t2, t3);
    *b = s;
    *c = e;
}

fn renorm(c: [f64; 5]) -> Qd {
    let [mut c0, mut c1, mut c2, mut c3, c4] = c;
    if !c0.is_finite() {
        return Qd([c0, c1, c2, c3]);
    }
    let (s, c4) = quick_two_sum(c3, c4);
    let (s, e) = quick_two_sum(c2, s);
    c3 = e;
    let (s, e) = quick_two_sum(c1, s);
    c2 = e;
    let (s, e) = quick_two_sum(c0, s);
    c0 = s;
    c1 = e;

    let mut s0 = c0;
    let mut s1 = c1;
    let mut s2 = 0.0;
    let mut s3 = 0.0;
    if s1 != 0.0 {
        (s1, s2) = quick_two_sum(s1, c2);
        if s2 != 0.0 {
            (s2, s3) = quick_two_sum(s2, c3);
            if s3 != 0.0 {
                s3 += c4;
            } else {
                (s2, s3) = quick_two_sum(s2, c4);
            }
        } else {
            (s1, s2) = quick_two_sum(s1, c3);
            if s2 != 0.0 {
                (s2, s3) = quick_two_sum(s2, c4);
            } else {
                (s1, s2) = quick_two_sum(s1, c4);
            }
        }
    } else {
        (s0, s1) = quick_two_sum(s0, c2);
        if s1 != 0.0 {
            (s1, s2) = quick_two_sum(s1, c3);
            if s2 != 0.0 {
                (s2, s3) = quick_two_sum(s2, c4);
            } else {
                (s1, s2) = quick_two_sum(s1, c4);
            }
        } else {
            (s0, s1) = quick_two_sum(s0, c3);
            if s1 != 0.0 {
                (s1, s2) = quick_two_sum(s1, c4);
            } else {
                (s0, s1) = quick_two_sum(s0, c4);
            }
        }
    }
    Qd([s0, s1, s2, s3])
}

/// Accumulate `c` into the running pair `(a, b)`; returns a finished component or zero.
#[inline]
fn quick_three_accum(a: &mut f64, b: &mut f64, c: f64) -> f64 {
    let (s, nb) = two_sum(*b, c);
    let (s, na) = two_sum(*a, s);
    *a = na;
    *b = nb;
    let za = *a != 0.0;
    let zb = *b != 0.0;
    if za && zb {
        return s;
    }
    if !zb {
        *b = *a;
        *a = s;
    } else {
        *a = s;
    }
    0.0
}

impl Qd {
    pub const fn from_parts(p: [f64; 4]) -> Qd {
        Qd(p)
    }

    pub fn parts(self) -> [f64; 4] {
        self.0
    }
}

impl Add for Qd {
    type Output = Qd;
    fn add(self, rhs: Qd) -> Qd {
        // accurate addition: merge components by magnitude, then accumulate
        let a = self.0;
        let b = rhs.0;
        let (mut i, mut j, mut k) = (0usize, 0usize, 0usize);
        let mut x = [0.0f64; 4];
        let mut u;
        let mut v;
        if a[i].abs() > b[j].abs() {
            u = a[i];
            i += 1;
        } else {
            u = b[j];
            j += 1;
        }
        if a[i].abs() > b[j].abs() {
            v = a[i];
            i += 1;
        } else {
            v = b[j];
            j += 1;
        }
        (u, v) = quick_two_sum(u, v);
        while k < 4 {
            if i >= 4 && j >= 4 {
                x[k] = u;
                if k < 3 {
                    k += 1;
                    x[k] = v;
                }
                break;
            }
            let t = if i >= 4 {
                j += 1;
                b[j - 1]
            } else if j >= 4 || a[i].abs() > b[j].abs() {
                i += 1;
                a[i - 1]
            } else {
                j += 1;
                b[j - 1]
            };
            let s = quick_three_accum(&mut u, &mut v, t);
            if s != 0.0 {
                x[k] = s;
                k += 1;
            }
        }
        for &ai in &a[i..] {
            x[3] += ai;
        }
        for &bj in &b[j..] {
            x[3] += bj;
        }
        renorm([x[0], x[1], x[2], x[3], 0.0])
    }
}

impl Neg for Qd {
    type Output = Qd;
    fn neg(self) -> Qd {
        let [a, b, c, d] = self.0;
        Qd([-a, -b, -c, -d])
    }
}

impl Sub for Qd {
    type Output = Qd;
    fn sub(self, b: Qd) -> Qd {
        self + (-b)
    }
}

impl Mul for Qd {
    type Output = Qd;
    fn mul(self, rhs: Qd) -> Qd {
        let a = self.0;
        let b = rhs.0;
        let (p0, q0) = two_prod(a[0], b[0]);
        let (mut p1, mut q1) = two_prod(a[0], b[1]);
        let (mut p2, mut q2) = two_prod(a[1], b[0]);
        let (mut p3, q3) = two_prod(a[0], b[2]);
        let (mut p4, q4) = two_prod(a[1], b[1]);
        let (mut p5, q5) = two_prod(a[2], b[0]);
        let mut q0 = q0;

        three_sum(&mut p1, &mut p2, &mut q0);
        three_sum(&mut p2, &mut q1, &mut q2);
        three_sum(&mut p3, &mut p4, &mut p5);

        let (s0, t0) = two_sum(p2, p3);
        let (s1, t1) = two_sum(q1, p4);
        let mut s2 = q2 + p5;
        let (mut s1, t0) = two_sum(s1, t0);
        s2 += t0 + t1;
        s1 += a[0] * b[3] + a[1] * b[2] + a[2] * b[1] + a[3] * b[0] + q0 + q3 + q4 + q5;
        renorm([p0, p1, s0, s1, s2])
    }
}

impl Div for Qd {
    type Output = Qd;
    fn div(self, b: Qd) -> Qd {
        let d = b.0[0];
        let q0 = self.0[0] / d;
        let mut r = self - b * Qd::from_f64(q0);
        let q1 = r.0[0] / d;
        r -= b * Qd::from_f64(q1);
        let q2 = r.0[0] / d;
        r -= b * Qd::from_f64(q2);
        let q3 = r.0[0] / d;
        r -= b * Qd::from_f64(q3);
        let q4 = r.0[0] / d;
        renorm([q0, q1, q2, q3, q4])
    }
}

impl Rem for Qd {
    type Output = Qd;
    fn rem(self, b: Qd) -> Qd {
        let q = self / b;
        let t = if q.0[0] < 0.0 { -((-q).floor()) } else { q.floor() };
        self - t * b
    }
}

impl AddAssign for Qd {
    fn add_assign(&mut self, b: Qd) {
        *self = *self + b;
    }
}
impl SubAssign for Qd {
    fn sub_assign(&mut self, b: Qd) {
        *self = *self - b;
    }
}
impl MulAssign for Qd {
    fn mul_assign(&mut self, b: Qd) {
        *self = *self * b;
    }
}
impl DivAssign for Qd {
    fn div_assign(&mut self, b: Qd) {
        *self = *self / b;
    }
}

impl RemAssign for Qd {
    fn rem_assign(&mut self, b: Qd) {
        *self = *self % b;
    }
}

impl PartialEq for Qd {
    fn eq(&self, o: &Qd) -> bool {
        self.0 == o.0
    }
}

impl PartialOrd for Qd {
    fn partial_cmp(&self, o: &Qd) -> Option<Ordering> {
        for k in 0..4 {
            match self.0[k].partial_cmp(&o.0[k]) {
                Some(Ordering::Equal) => continue,
                other => return other,
            }
        }
        Some(Ordering::Equal)
    }
}

impl Zero for Qd {
    fn zero() -> Qd {
        Qd([0.0; 4])
    }
    fn is_zero(&self) -> bool {
        self.0[0] == 0.0
    }
}

impl One for Qd {
    fn one() -> Qd {
        Qd([1.0, 0.0, 0.0, 0.0])
    }
}

impl Num for Qd {
    type FromStrRadixErr = &'static str;
    fn from_str_radix(s: &str, radix: u32) -> Result<Qd, Self::FromStrRadixErr> {
        if radix != 10 {
            return Err("only radix 10 is supported");
        }
        <Qd as Real>::parse(s).ok_or("malformed number")
    }
}

impl fmt::Debug for Qd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "Qd({a:e}, {b:e}, {c:e}, {d:e})")
    }
}

impl fmt::Display for Qd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&elementary::to_sci(*self, 64))
    }
}

impl Real for Qd {
    const BITS: u32 = 212;
    const NAME: &'static str = "quad-double";

    fn from_f64(x: f64) -> Qd {
        Qd([x, 0.0, 0.0, 0.0])
    }
    fn to_f64(self) -> f64 {
        self.0[0] + self.0[1]
    }
    fn epsilon() -> Qd {
        Qd::from_f64(2f64.powi(-209))
    }
    fn pi() -> Qd {
        static PI: OnceLock<Qd> = OnceLock::new();
        *PI.get_or_init(elementary::machin_pi)
    }
    fn ln2() -> Qd {
        static LN2: OnceLock<Qd> = OnceLock::new();
        *LN2.get_or_init(elementary::series_ln2)
    }
    fn ldexp(self, e: i32) -> Qd {
        let s = 2f64.powi(e);
        let [a, b, c, d] = self.0;
        Qd([a * s, b * s, c * s, d * s])
    }
    fn floor(self) -> Qd {
        let a = self.0;
        let mut x = [a[0].floor(), 0.0, 0.0, 0.0];
        if x[0] == a[0] {
            x[1] = a[1].floor();
            if x[1] == a[1] {
                x[2] = a[2].floor();
                if x[2] == a[2] {
                    x[3] = a[3].floor();
                }
            }
            return renorm([x[0], x[1], x[2], x[3], 0.0]);
        }
        Qd(x)
    }
    fn sqrt(self) -> Qd {
        elementary::sqrt_newton(self, 3)
    }
    fn exp(self) -> Qd {
        elementary::exp(self)
    }
    fn ln(self) -> Qd {
        elementary::ln(self, 2)
    }
    fn sin_cos(self) -> (Qd, Qd) {
        elementary::sin_cos(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI_DIGITS: &str =
        "3.14159265358979323846264338327950288419716939937510582097494459230781640628620899862803482534211706798";
    const E_DIGITS: &str =
        "2.71828182845904523536028747135266249775724709369995957496696762772407663035354759457138217852516642743";

    fn rel(a: Qd, b: Qd) -> f64 {
        ((a - b) / b).abs().to_f64()
    }

    #[test]
    fn arithmetic_identities() {
        let third = Qd::one() / Qd::from_f64(3.0);
        assert!((third * Qd::from_f64(3.0) - Qd::one()).abs().to_f64() < 1e-63);
        let x = Qd::parse("1.234567890123456789012345678901234567890123456789012345678901234").unwrap();
        let y = Qd::parse("-0.98765432109876543210987654321098765432109876543210987654321").unwrap();
        assert!(rel((x * y) / y, x) < 1e-62);
        assert!(rel((x + y) - y, x) < 1e-62);
        // cancellation keeps the low-order parts
        let tiny = Qd::parse("1e-50").unwrap();
        let z = (x + tiny) - x;
        assert!(rel(z, tiny) < 1e-12);
    }

    #[test]
    fn constants_match_reference_digits() {
        assert!(rel(Qd::pi(), Qd::parse(PI_DIGITS).unwrap()) < 1e-63);
        let ln2 = Qd::parse(
            "0.693147180559945309417232121458176568075500134360255254120680009493393621969694715605863326996418688",
        )
        .unwrap();
        assert!(rel(Qd::ln2(), ln2) < 1e-63);
    }

    #[test]
    fn elementary_functions() {
        let e = Qd::one().exp();
        assert!(rel(e, Qd::parse(E_DIGITS).unwrap()) < 1e-62);
        assert!((e.ln() - Qd::one()).abs().to_f64() < 1e-62);
        let two = Qd::from_f64(2.0);
        let r = two.sqrt();
        assert!((r * r - two).abs().to_f64() < 1e-62);
        let (s, c) = (Qd::pi() / Qd::from_f64(6.0)).sin_cos();
        assert!((s - Qd::from_f64(0.5)).abs().to_f64() < 1e-62);
        assert!((c * c - Qd::from_f64(0.75)).abs().to_f64() < 1e-62);
        let t = Qd::one().atan2(Qd::one());
        assert!(rel(t * Qd::from_f64(4.0), Qd::pi()) < 1e-62);
    }

    #[test]
    fn formatting() {
        assert_eq!(Qd::pi().to_sci(20), "3.1415926535897932385e0");
        assert_eq!(Qd::from_f64(-0.00125).to_sci(3), "-1.25e-3");
        assert_eq!(Qd::from_f64(9.9999).to_sci(2), "1.0e1");
    }
}
