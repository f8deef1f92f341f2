use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::zpoly::{qi, EpsSeries, ZPoly};
use crate::error::{Error, Result};
use crate::numeric::{ccosh, Real, C};

/// Coefficients `v[(k, l)]` of `mu^k x^l`.
pub type CoeffTable = BTreeMap<(u32, u32), BigRational>;

/// Formal separatrix: `x = sum eps^{2k} p_k(z)`, `y = sum eps^{2k+1} q_k(s)`,
/// `mu = sum mu_k eps^{2k}` and the energy constant `C = sum C_n eps^{2n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalSeparatrix {
    /// `p[k]` for `k = 0..=N`; `p[0]` is zero.
    pub p: Vec<ZPoly>,
    /// `q[k][l]`: coefficient of `sinh(s/2)/cosh^{2l+1}(s/2)` in `q_k`.
    pub q: Vec<Vec<BigRational>>,
    /// `mu[k]` for `k = 0..=N+1`.
    pub mu: Vec<BigRational>,
    /// `c[n]` for `n = 0..=N+2`.
    pub c: Vec<BigRational>,
    pub order: usize,
}

/// How the linear system at each order is eliminated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elimination {
    /// Highest power of `z` first, as a triangular recursion.
    TopDown,
    /// Dense Gaussian elimination with the unknowns taken in reverse order.
    DenseReversed,
}

fn coeff(v: &CoeffTable, k: u32, l: u32) -> BigRational {
    v.get(&(k, l)).cloned().unwrap_or_else(BigRational::zero)
}

/// Check the hypotheses `v00 = v01 = v02 = 0`, `v03 v11 != 0`.
pub fn check_potential(v: &CoeffTable) -> Result<()> {
    for l in 0..3 {
        if !coeff(v, 0, l).is_zero() {
            return Err(Error::Precondition(format!("v0{l} must vanish")));
        }
    }
    if coeff(v, 0, 3).is_zero() || coeff(v, 1, 1).is_zero() {
        return Err(Error::Precondition("v03 * v11 must be nonzero".into()));
    }
    Ok(())
}

/// `sum v_kl mu^k x^l` over terms with `l >= 1`, as an eps-series truncated at `order`.
pub(crate) fn compose(v: &CoeffTable, x: &EpsSeries, mu: &[BigRational], order: usize) -> EpsSeries {
    compose_terms(v, x, mu, order, false)
}

/// Same as [`compose`] but keeping the `x`-independent terms.
pub(crate) fn compose_with_constant(v: &CoeffTable, x: &EpsSeries, mu: &[BigRational], order: usize) -> EpsSeries {
    compose_terms(v, x, mu, order, true)
}

fn compose_terms(v: &CoeffTable, x: &EpsSeries, mu: &[BigRational], order: usize, keep_constant: bool) -> EpsSeries {
    let mut mu_series = EpsSeries::zero(order);
    for (k, m) in mu.iter().enumerate().take(order + 1) {
        mu_series.terms[k] = ZPoly::constant(m.clone());
    }
    let max_l = v.keys().map(|&(_, l)| l).max().unwrap_or(0);
    let max_k = v.keys().map(|&(k, _)| k).max().unwrap_or(0);
    let mut xpow = vec![EpsSeries::constant(order, BigRational::one())];
    for l in 1..=max_l as usize {
        xpow.push(xpow[l - 1].mul(x));
    }
    let mut mupow = vec![EpsSeries::constant(order, BigRational::one())];
    for k in 1..=max_k as usize {
        mupow.push(mupow[k - 1].mul(&mu_series));
    }
    let mut out = EpsSeries::zero(order);
    for (&(k, l), c) in v {
        if (l == 0 && !keep_constant) || c.is_zero() {
            continue;
        }
        let term = mupow[k as usize].mul(&xpow[l as usize]).scale(c);
        out = out.add(&term);
    }
    out
}

/// Order-`n` coefficient of `eps^2 (x')^2 + 2 V(x)`, without the constant `C`.
fn energy_coefficient(v: &CoeffTable, p: &[ZPoly], mu: &[BigRational], n: usize) -> ZPoly {
    let mut x = EpsSeries::zero(n);
    for (k, pk) in p.iter().enumerate().take(n + 1) {
        x.terms[k] = pk.clone();
    }
    let d = x.map(|a| a.dz());
    let d2 = d.mul(&d);
    let kinetic = &d2.terms[n - 1] * &ZPoly::zprime_squared();
    let pot = compose(v, &x, mu, n);
    &kinetic + &pot.terms[n].scale(&qi(2))
}

pub(crate) fn solve_dense(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
            let t = &f * &b[col];
            b[r] -= t;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

impl FormalSeparatrix {
    pub fn p11(&self) -> BigRational {
        self.p[1].coeff(1)
    }

    /// Truncated `mu` series through `eps^{2 n}`.
    pub fn mu_sum<T: Real>(&self, eps: T, n: usize) -> T {
        let e2 = eps * eps;
        let mut acc = T::zero();
        for k in (0..=n.min(self.mu.len() - 1)).rev() {
            acc = acc * e2 + T::from_rational(&self.mu[k]);
        }
        acc
    }

    /// Positive root `eps` of `mu = sum_{k<=n} mu_k eps^{2k}`, by Newton in `eps^2`.
    pub fn eps_for_mu<T: Real>(&self, mu: T, n: usize) -> Result<T> {
        if !(mu > T::zero()) {
            return Err(Error::Precondition("mu must be positive".into()));
        }
        let coeffs: Vec<T> = self.mu.iter().take(n + 1).map(T::from_rational).collect();
        let Some((k0, c0)) = coeffs.iter().enumerate().find(|(_, c)| !c.is_zero()) else {
            return Err(Error::Precondition("the mu series vanishes".into()));
        };
        if k0 == 0 {
            return Err(Error::Precondition("the mu series has a constant term".into()));
        }
        let mut e2 = ((mu / *c0).abs().ln() / T::from_f64(k0 as f64)).exp();
        for _ in 0..200 {
            let mut f = -mu;
            let mut df = T::zero();
            for (k, c) in coeffs.iter().enumerate() {
                f += *c * e2.powi(k as i32);
                if k > 0 {
                    df += *c * T::from_f64(k as f64) * e2.powi(k as i32 - 1);
                }
            }
            let step = f / df;
            e2 -= step;
            if step.abs() <= e2.abs() * T::epsilon() * T::from_f64(4.0) {
                break;
            }
        }
        if !(e2 > T::zero()) || !e2.is_finite() {
            return Err(Error::NewtonFailed { residual: e2.to_f64() });
        }
        Ok(e2.sqrt())
    }

    /// `sum_{k<=n} eps^{2k} p_k(z)` at a fixed profile value `z`.
    pub fn x_at_profile<T: Real>(&self, eps: T, z: T, n: usize) -> T {
        let e2 = eps * eps;
        let zc = C::new(z, T::zero());
        let mut acc = T::zero();
        for pk in self.p.iter().take(n + 1).rev() {
            acc = acc * e2 + pk.eval(zc).re;
        }
        acc
    }

    /// Coefficient `K` of the tail `x - x(saddle) ~ K e^{-|s|}`.
    pub fn tail_amplitude<T: Real>(&self, eps: T, n: usize) -> T {
        let e2 = eps * eps;
        let mut acc = T::zero();
        for pk in self.p.iter().take(n + 1).rev() {
            acc = acc * e2 + T::from_rational(&pk.coeff(1));
        }
        acc * T::from_f64(4.0)
    }

    /// `x = sum_{k<=n} eps^{2k} p_k` and its first two `s`-derivatives at `s`.
    pub fn x_and_derivatives<T: Real>(&self, eps: T, s: C<T>, n: usize) -> [C<T>; 3] {
        let z = z_of(s);
        let zp2 = z * z - z * z * z;
        let zpp = z - z * z * C::new(T::from_f64(1.5), T::zero());
        let zp = zprime(s);
        let e2 = C::new(eps * eps, T::zero());
        let mut out = [C::<T>::zero(); 3];
        let mut scale = e2;
        for pk in self.p.iter().take(n + 1).skip(1) {
            let d1 = pk.dz();
            let d2 = d1.dz();
            out[0] += scale * pk.eval(z);
            out[1] += scale * d1.eval(z) * zp;
            out[2] += scale * (d2.eval(z) * zp2 + d1.eval(z) * zpp);
            scale *= e2;
        }
        out
    }

    /// Residual of `eps^2 x'' + V'(x) = 0` for the truncation at `n`,
    /// with `mu` truncated at the same order.
    pub fn ode_residual<T: Real>(&self, v: &CoeffTable, eps: T, s: C<T>, n: usize) -> C<T> {
        let [x, _, xpp] = self.x_and_derivatives(eps, s, n);
        let mu = C::new(self.mu_sum(eps, n), T::zero());
        let mut dv = C::<T>::zero();
        for (&(k, l), c) in v {
            if l == 0 {
                continue;
            }
            let mut term = C::new(T::from_rational(c) * T::from_f64(l as f64), T::zero());
            for _ in 0..k {
                term *= mu;
            }
            for _ in 1..l {
                term *= x;
            }
            dv += term;
        }
        C::new(eps * eps, T::zero()) * xpp + dv
    }
}

/// `z(s) = 1/cosh^2(s/2)`.
pub fn z_of<T: Real>(s: C<T>) -> C<T> {
    let c = ccosh(s * C::new(T::from_f64(0.5), T::zero()));
    C::new(T::one(), T::zero()) / (c * c)
}

/// `z'(s) = -sinh(s/2)/cosh^3(s/2)`.
pub fn zprime<T: Real>(s: C<T>) -> C<T> {
    let h = s * C::new(T::from_f64(0.5), T::zero());
    let c = ccosh(h);
    -crate::numeric::csinh(h) / (c * c * c)
}

/// Solve the energy equation order by order through `eps^{2(order+2)}`.
pub fn formal_separatrix(v: &CoeffTable, order: usize) -> Result<FormalSeparatrix> {
    formal_separatrix_with(v, order, Elimination::TopDown)
}

pub fn formal_separatrix_with(v: &CoeffTable, order: usize, elim: Elimination) -> Result<FormalSeparatrix> {
    check_potential(v)?;
    if order == 0 {
        return Err(Error::Precondition("order must be at least 1".into()));
    }
    let v03 = coeff(v, 0, 3);
    let v11 = coeff(v, 1, 1);
    let p11 = (qi(2) * &v03).recip();
    let p10 = -(qi(6) * &v03).recip();
    let mu2 = -(qi(12) * &v03 * &v11).recip();

    let mut p = vec![ZPoly::zero(); order + 1];
    let mut mu = vec![BigRational::zero(); order + 2];
    let mut c = vec![BigRational::zero(); order + 3];
    p[1] = ZPoly::from_coeffs(vec![p10.clone(), p11.clone()]);
    mu[2] = mu2;

    let lead = energy_coefficient(v, &p, &mu, 3);
    c[3] = -lead.at_zero();
    assert!(
        lead.coeffs().iter().skip(1).all(|a| a.is_zero()),
        "leading-order balance must hold identically"
    );

    for n in 4..=order + 2 {
        let f = energy_coefficient(v, &p, &mu, n);
        let deg = n - 2;
        let (a, mu_new, c_new) = match elim {
            Elimination::TopDown => {
                let mut a = vec![BigRational::zero(); deg + 2];
                for m in (2..=n).rev() {
                    let l = m - 2;
                    let upper = &a[l + 1] * (&p11 * qi(2 * (m as i64 - 2)));
                    let diag = &p11 * qi(7 - 2 * m as i64);
                    a[l] = -(f.coeff(m) + upper) / diag;
                }
                let mu_new = (qi(2) * &p11 * &a[0] - f.coeff(1)) / (qi(2) * &v11 * &p11);
                let c_new = -(qi(2) * &v11 * &p10 * &mu_new + f.coeff(0));
                a.truncate(deg + 1);
                (a, mu_new, c_new)
            }
            Elimination::DenseReversed => {
                // unknowns: a_0..a_deg, mu, C; equations z^0..z^n; reversed column order
                let nu = deg + 3;
                let col = |j: usize| nu - 1 - j;
                let mut mat = vec![vec![BigRational::zero(); nu]; n + 1];
                for l in 0..=deg {
                    mat[l + 1][col(l)] += &p11 * qi(2 * (l as i64 - 1));
                    mat[l + 2][col(l)] += &p11 * qi(3 - 2 * l as i64);
                }
                mat[0][col(deg + 1)] += qi(2) * &v11 * &p10;
                mat[1][col(deg + 1)] += qi(2) * &v11 * &p11;
                mat[0][col(deg + 2)] += BigRational::one();
                let rhs: Vec<BigRational> = (0..=n).map(|m| -f.coeff(m)).collect();
                let sol = solve_dense(mat, rhs).ok_or_else(|| Error::Precondition("degenerate triangular solve".into()))?;
                let a = (0..=deg).map(|l| sol[col(l)].clone()).collect();
                (a, sol[col(deg + 1)].clone(), sol[col(deg + 2)].clone())
            }
        };
        if deg <= order {
            p[deg] = ZPoly::from_coeffs(a);
        }
        mu[n - 1] = mu_new;
        c[n] = c_new;
        debug_assert!({
            let check = energy_coefficient(v, &p, &mu, n);
            (&check + &ZPoly::constant(c[n].clone())).is_zero()
        });
    }

    let q = p
        .iter()
        .map(|pk| {
            (0..=pk.degree().max(1))
                .map(|l| if l == 0 { BigRational::zero() } else { -pk.coeff(l) * qi(l as i64) })
                .collect()
        })
        .collect();
    Ok(FormalSeparatrix { p, q, mu, c, order })
}
