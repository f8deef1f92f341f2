//! Elementary functions for the multi-component float types, built from
//! arithmetic alone and seeded from `f64` where Newton iteration applies.

use super::Real;

fn tiny<T: Real>() -> T {
    T::epsilon() * T::epsilon().ldexp(-8)
}

pub(super) fn sqrt_newton<T: Real>(x: T, iters: usize) -> T {
    if x.is_zero() {
        return x;
    }
    if x < T::zero() {
        return T::from_f64(f64::NAN);
    }
    let mut y = T::from_f64(x.to_f64().sqrt());
    let half = T::from_f64(0.5);
    for _ in 0..iters {
        y = y + (x - y * y) / y * half;
    }
    y
}

pub(super) fn exp<T: Real>(x: T) -> T {
    let xf = x.to_f64();
    if xf > 709.0 {
        return T::from_f64(f64::INFINITY);
    }
    if xf < -745.0 {
        return T::zero();
    }
    let k = (xf / std::f64::consts::LN_2).round();
    let halvings = 12;
    let r = (x - T::ln2() * T::from_f64(k)).ldexp(-halvings);
    // expm1 by Taylor, then undo the halvings through s -> 2s + s^2
    let eps = tiny::<T>();
    let mut term = r;
    let mut s = r;
    let mut n = 1.0;
    loop {
        n += 1.0;
        term = term * r / T::from_f64(n);
        s += term;
        if term.abs() <= eps {
            break;
        }
    }
    for _ in 0..halvings {
        s = s.ldexp(1) + s * s;
    }
    (s + T::one()).ldexp(k as i32)
}

pub(super) fn ln<T: Real>(x: T, iters: usize) -> T {
    if x <= T::zero() {
        return T::from_f64(f64::NAN);
    }
    let mut y = T::from_f64(x.to_f64().ln());
    for _ in 0..iters {
        let e = y.exp();
        y += ((x - e) / (x + e)).ldexp(1);
    }
    y
}

fn taylor_sin_cos<T: Real>(r: T) -> (T, T) {
    let eps = tiny::<T>();
    let r2 = r * r;
    let mut s = r;
    let mut term = r;
    let mut n = 1.0;
    while term.abs() > eps {
        term = -term * r2 / T::from_f64((n + 1.0) * (n + 2.0));
        s += term;
        n += 2.0;
    }
    let mut c = T::one();
    let mut term = T::one();
    let mut n = 0.0;
    while term.abs() > eps {
        term = -term * r2 / T::from_f64((n + 1.0) * (n + 2.0));
        c += term;
        n += 2.0;
    }
    (s, c)
}

pub(super) fn sin_cos<T: Real>(x: T) -> (T, T) {
    if x.is_zero() {
        return (T::zero(), T::one());
    }
    let half_pi = T::pi().ldexp(-1);
    let q = (x / half_pi).round();
    let r = x - q * half_pi;
    let (s, c) = taylor_sin_cos(r);
    let quadrant = (q.to_f64().rem_euclid(4.0)) as i32;
    match quadrant {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

pub(super) fn atan2<T: Real>(y: T, x: T) -> T {
    if x.is_zero() && y.is_zero() {
        return T::zero();
    }
    let r = (x * x + y * y).sqrt();
    let xx = x / r;
    let yy = y / r;
    let mut z = T::from_f64(y.to_f64().atan2(x.to_f64()));
    for _ in 0..3 {
        let (s, c) = z.sin_cos();
        if xx.abs() > yy.abs() {
            z += (yy - s) / c;
        } else {
            z -= (xx - c) / s;
        }
    }
    z
}

/// `atan(1/n)` by its alternating series.
fn atan_inv<T: Real>(n: f64) -> T {
    let eps = tiny::<T>();
    let x = T::one() / T::from_f64(n);
    let x2 = x * x;
    let mut power = x;
    let mut sum = x;
    let mut k = 1.0;
    loop {
        power = -power * x2;
        k += 2.0;
        let term = power / T::from_f64(k);
        sum += term;
        if term.abs() <= eps {
            return sum;
        }
    }
}

pub(super) fn machin_pi<T: Real>() -> T {
    atan_inv::<T>(5.0).ldexp(4) - atan_inv::<T>(239.0).ldexp(2)
}

pub(super) fn series_ln2<T: Real>() -> T {
    // 2 atanh(1/3)
    let eps = tiny::<T>();
    let x = T::one() / T::from_f64(3.0);
    let x2 = x * x;
    let mut power = x;
    let mut sum = x;
    let mut k = 1.0;
    loop {
        power *= x2;
        k += 2.0;
        let term = power / T::from_f64(k);
        sum += term;
        if term <= eps {
            return sum.ldexp(1);
        }
    }
}

/// Scientific notation with `digits` significant digits, e.g. `1.25e-3`.
pub(super) fn to_sci<T: Real>(x: T, digits: usize) -> String {
    let xf = x.to_f64();
    if xf.is_nan() {
        return "NaN".into();
    }
    if xf.is_infinite() {
        return if xf > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let digits = digits.max(1);
    if x.is_zero() {
        return format!("{}e0", pad_mantissa(&[0], digits));
    }
    let neg = x < T::zero();
    let mut y = x.abs();
    let mut e = xf.abs().log10().floor() as i32;
    let ten = T::from_f64(10.0);
    y /= ten.powi(e);
    if y >= ten {
        y /= ten;
        e += 1;
    } else if y < T::one() {
        y *= ten;
        e -= 1;
    }
    let mut ds: Vec<i64> = Vec::with_capacity(digits + 1);
    for _ in 0..=digits {
        let d = y.floor();
        ds.push(d.to_f64() as i64);
        y = (y - d) * ten;
    }
    // round on the guard digit, then normalise carries and borrows
    let guard = ds.pop().unwrap_or(0);
    if guard >= 5 {
        *ds.last_mut().unwrap() += 1;
    }
    for i in (1..ds.len()).rev() {
        while ds[i] > 9 {
            ds[i] -= 10;
            ds[i - 1] += 1;
        }
        while ds[i] < 0 {
            ds[i] += 10;
            ds[i - 1] -= 1;
        }
    }
    if ds[0] > 9 {
        ds[0] -= 10;
        ds.insert(0, 1);
        ds.pop();
        e += 1;
    }
    let mantissa = pad_mantissa(&ds, digits);
    format!("{}{}e{}", if neg { "-" } else { "" }, mantissa, e)
}

fn pad_mantissa(ds: &[i64], digits: usize) -> String {
    let mut s = String::with_capacity(digits + 1);
    for (i, d) in ds.iter().chain(std::iter::repeat(&0)).take(digits).enumerate() {
        if i == 1 {
            s.push('.');
        }
        s.push(char::from(b'0' + *d as u8));
    }
    s
}
