use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::numeric::{Real, C};

pub(crate) fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn qi(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Polynomial in `z = 1/cosh^2(s/2)` with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZPoly {
    coeffs: Vec<BigRational>,
}

impl ZPoly {
    pub fn zero() -> Self {
        ZPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        ZPoly::from_coeffs(vec![c])
    }

    pub fn monomial(power: usize, c: BigRational) -> Self {
        let mut coeffs = vec![BigRational::zero(); power + 1];
        coeffs[power] = c;
        ZPoly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `z^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn scale(&self, c: &BigRational) -> ZPoly {
        ZPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiply by `z^k`.
    pub fn shift(&self, k: usize) -> ZPoly {
        if self.is_zero() {
            return ZPoly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        ZPoly { coeffs }
    }

    /// `d/dz`.
    pub fn dz(&self) -> ZPoly {
        ZPoly::from_coeffs(
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * qi(k as i64)).collect(),
        )
    }

    /// Antiderivative in `z` with zero constant.
    pub fn integrate_z(&self) -> ZPoly {
        let mut coeffs = vec![BigRational::zero()];
        coeffs.extend(self.coeffs.iter().enumerate().map(|(k, c)| c / qi(k as i64 + 1)));
        ZPoly::from_coeffs(coeffs)
    }

    pub fn at_zero(&self) -> BigRational {
        self.coeff(0)
    }

    pub fn eval<T: Real>(&self, z: C<T>) -> C<T> {
        let mut acc = C::<T>::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + C::new(T::from_rational(c), T::zero());
        }
        acc
    }

    pub fn pow(&self, n: u32) -> ZPoly {
        let mut acc = ZPoly::constant(BigRational::one());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Second `s`-derivative rule pieces: `(z')^2 = z^2 - z^3`.
    pub fn zprime_squared() -> ZPoly {
        ZPoly::from_coeffs(vec![qi(0), qi(0), qi(1), qi(-1)])
    }

    /// `z'' = z - (3/2) z^2`.
    pub fn zsecond() -> ZPoly {
        ZPoly::from_coeffs(vec![qi(0), qi(1), q(-3, 2)])
    }

    /// `d^2/ds^2` of `P(z(s))`.
    pub fn d2s(&self) -> ZPoly {
        &(&self.dz().dz() * &ZPoly::zprime_squared()) + &(&self.dz() * &ZPoly::zsecond())
    }
}

impl<'a> Add<&'a ZPoly> for &'a ZPoly {
    type Output = ZPoly;
    fn add(self, o: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        ZPoly::from_coeffs((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a ZPoly> for &'a ZPoly {
    type Output = ZPoly;
    fn sub(self, o: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        ZPoly::from_coeffs((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Neg for &ZPoly {
    type Output = ZPoly;
    fn neg(self) -> ZPoly {
        ZPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl<'a> Mul<&'a ZPoly> for &'a ZPoly {
    type Output = ZPoly;
    fn mul(self, o: &ZPoly) -> ZPoly {
        if self.is_zero() || o.is_zero() {
            return ZPoly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        ZPoly::from_coeffs(coeffs)
    }
}

/// Series in `eps^2` whose coefficients are `z`-polynomials, truncated at a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsSeries {
    pub terms: Vec<ZPoly>,
}

impl EpsSeries {
    pub fn zero(order: usize) -> Self {
        EpsSeries { terms: vec![ZPoly::zero(); order + 1] }
    }

    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn constant(order: usize, c: BigRational) -> Self {
        let mut s = EpsSeries::zero(order);
        s.terms[0] = ZPoly::constant(c);
        s
    }

    pub fn add(&self, o: &EpsSeries) -> EpsSeries {
        EpsSeries { terms: self.terms.iter().zip(&o.terms).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> EpsSeries {
        EpsSeries { terms: self.terms.iter().map(|a| a.scale(c)).collect() }
    }

    pub fn mul(&self, o: &EpsSeries) -> EpsSeries {
        let n = self.order();
        let mut out = EpsSeries::zero(n);
        for (i, a) in self.terms.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.terms.iter().enumerate().take(n + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                out.terms[i + j] = &out.terms[i + j] + &(a * b);
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(&ZPoly) -> ZPoly) -> EpsSeries {
        EpsSeries { terms: self.terms.iter().map(f).collect() }
    }
}

/// Exact power series in one variable, truncated after `len` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    pub coeffs: Vec<BigRational>,
}

impl PowerSeries {
    pub fn new(mut coeffs: Vec<BigRational>, len: usize) -> Self {
        coeffs.resize(len, BigRational::zero());
        PowerSeries { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn one(len: usize) -> Self {
        PowerSeries::new(vec![BigRational::one()], len)
    }

    pub fn mul(&self, o: &PowerSeries) -> PowerSeries {
        let n = self.len();
        let mut c = vec![BigRational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n - i) {
                c[i + j] += a * b;
            }
        }
        PowerSeries { coeffs: c }
    }

    /// Reciprocal; the constant coefficient must be nonzero.
    pub fn inv(&self) -> PowerSeries {
        let n = self.len();
        let a0 = self.coeffs[0].clone();
        assert!(!a0.is_zero(), "series reciprocal needs a nonzero constant term");
        let mut b = vec![BigRational::zero(); n];
        b[0] = a0.recip();
        for k in 1..n {
            let mut acc = BigRational::zero();
            for j in 1..=k {
                acc += &self.coeffs[j] * &b[k - j];
            }
            b[k] = -acc / &a0;
        }
        PowerSeries { coeffs: b }
    }

    pub fn powi(&self, n: i32) -> PowerSeries {
        let base = if n < 0 { self.inv() } else { self.clone() };
        let mut acc = PowerSeries::one(self.len());
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }
}
