//! Melnikov predictions: the first-order splitting integral along the
//! integrable separatrix, and the first-order Stokes constant of the inner
//! problem. Both serve as independent oracles for the direct measurements.

mod series;

use std::collections::BTreeMap;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formal::{formal_separatrix, formal_u, z_laurent, CoeffTable, FormalSeparatrix, FormalU};
use crate::hamiltonian::PolyHamiltonian;
use crate::numeric::quadrature::{exp_sinh, tanh_sinh, QuadTol};
use crate::numeric::{cabs, cexp, cre, cto_f64, Real, C};
use series::Series;

/// Series order used for the closed-form separatrix; the series must vanish
/// identically well before it.
const CLOSED_ORDER: usize = 10;

/// Coordinates in which the perturbation `R` is written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Frame {
    /// Same variables as the model; the saddle sits at `x1 = x1(saddle)`.
    Original,
    /// `x1` already measured from the saddle.
    Translated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MelnikovMethod {
    Quadrature,
    Residue,
}

#[derive(Clone, Debug)]
pub struct MelnikovResult<T> {
    pub m: C<T>,
    pub method: MelnikovMethod,
    pub mu: T,
    pub eps: T,
    pub error: f64,
    /// `dR/dx2 - i dR/dy2` on the plane `x2 = y2 = 0` as a polynomial in the
    /// shifted coordinate `X1 = x1 - x1(saddle)` and `y1`, keyed by powers.
    pub integrand: Vec<((u32, u32), Complex<f64>)>,
}

#[derive(Clone, Debug)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub max_levels: usize,
    /// Half-width of the time window; `40/eps` when unset.
    pub half_width: Option<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { rel_tol: 1e-13, max_levels: 16, half_width: None }
    }
}

/// Integrable separatrix in closed form plus the perturbation to integrate.
#[derive(Clone, Debug)]
pub struct MelnikovProblem {
    coupling: CoeffTable,
    perturbation: PolyHamiltonian,
    frame: Frame,
    sep: FormalSeparatrix,
    angle: FormalU,
}

/// `c0 x1^m x2`.
pub fn monomial_perturbation(m: u32, c0: BigRational) -> PolyHamiltonian {
    let mut r = PolyHamiltonian::new();
    r.accumulate([m, 0, 1, 0, 0, 0], c0);
    r
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

impl MelnikovProblem {
    /// Split a model with `nu` terms into its integrable part and the `nu^1` coefficient.
    pub fn from_model(h: &PolyHamiltonian, frame: Frame) -> Result<Self> {
        Self::new(&h.integrable_part(), &h.perturbation(), frame)
    }

    pub fn new(h0: &PolyHamiltonian, r: &PolyHamiltonian, frame: Frame) -> Result<Self> {
        h0.check_mechanical()?;
        if let Some((e, _)) = r.terms().find(|(e, _)| e[5] != 0) {
            return Err(Error::Precondition(format!("perturbation term {e:?} carries nu")));
        }
        let coupling = h0.action_coupling()?;
        let sep = formal_separatrix(&h0.potential_coeffs(), CLOSED_ORDER)?;
        let angle = formal_u(&coupling, &sep);
        let tail = CLOSED_ORDER - 2..=CLOSED_ORDER;
        let open = tail.clone().any(|k| !sep.p[k].is_zero())
            || sep.mu[CLOSED_ORDER - 1..].iter().any(|m| !m.is_zero())
            || angle.u[CLOSED_ORDER - 3..].iter().flatten().any(|c| !c.is_zero());
        if open {
            return Err(Error::Precondition(
                "the formal separatrix of this potential does not terminate, so no closed form is available".into(),
            ));
        }
        Ok(MelnikovProblem { coupling, perturbation: r.clone(), frame, sep, angle })
    }

    pub fn mu_for_eps<T: Real>(&self, eps: T) -> T {
        self.sep.mu_sum(eps, CLOSED_ORDER + 1)
    }

    pub fn eps_for_mu<T: Real>(&self, mu: T) -> Result<T> {
        self.sep.eps_for_mu(mu, CLOSED_ORDER + 1)
    }

    fn saddle_x<T: Real>(&self, eps: T) -> T {
        self.sep.x_at_profile(eps, T::zero(), CLOSED_ORDER)
    }

    /// `d_I V(x1, 0)` as a polynomial in `X1 = x1 - x1(saddle)`.
    fn frequency_poly<T: Real>(&self, mu: T, xs: T) -> Vec<T> {
        let mut w = Vec::new();
        for (&(k, l), c) in &self.coupling {
            let base = T::from_rational(c) * mu.powi(k as i32);
            for j in 0..=l {
                if w.len() <= j as usize {
                    w.resize(j as usize + 1, T::zero());
                }
                w[j as usize] += base * T::from_f64(binomial(l, j)) * xs.powi((l - j) as i32);
            }
        }
        w
    }

    /// Integrand polynomial `dR/dx2 - i dR/dy2` in `(X1, y1)`, including the
    /// correction from the equilibrium's first-order shift in the original frame.
    fn integrand_poly<T: Real>(&self, eps: T) -> BTreeMap<(u32, u32), C<T>> {
        let mu = self.mu_for_eps(eps);
        let mut raw: BTreeMap<(u32, u32), C<T>> = BTreeMap::new();
        for (e, c) in self.perturbation.terms() {
            let weight = match (e[2], e[3]) {
                (1, 0) => C::new(T::one(), T::zero()),
                (0, 1) => C::new(T::zero(), -T::one()),
                _ => continue,
            };
            let v = weight * cre(T::from_rational(c) * mu.powi(e[4] as i32));
            *raw.entry((e[0], e[1])).or_insert_with(C::zero) += v;
        }
        if self.frame == Frame::Translated {
            return raw;
        }
        let xs = self.saddle_x(eps);
        let mut out: BTreeMap<(u32, u32), C<T>> = BTreeMap::new();
        let mut at_saddle = C::<T>::zero();
        for (&(a, b), v) in &raw {
            if b == 0 {
                at_saddle += *v * cre(xs.powi(a as i32));
            }
            for j in 0..=a {
                let k = cre(T::from_f64(binomial(a, j)) * xs.powi((a - j) as i32));
                *out.entry((j, b)).or_insert_with(C::zero) += *v * k;
            }
        }
        // the equilibrium moves by O(nu); shifting to it adds -R_z(saddle) omega(x1)/omega(saddle)
        let w = self.frequency_poly(mu, xs);
        if let Some(w0) = w.first().copied().filter(|w0| !w0.is_zero()) {
            for (j, wj) in w.iter().enumerate() {
                *out.entry((j as u32, 0)).or_insert_with(C::zero) -= at_saddle * cre(*wj / w0);
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    fn report<T: Real>(poly: &BTreeMap<(u32, u32), C<T>>) -> Vec<((u32, u32), Complex<f64>)> {
        poly.iter().map(|(k, v)| (*k, cto_f64(*v))).collect()
    }

    fn has_constant_frequency(&self) -> bool {
        self.coupling.keys().all(|&(_, l)| l == 0)
    }
}

fn eval_poly<T: Real>(poly: &BTreeMap<(u32, u32), C<T>>, x: C<T>, y: C<T>) -> C<T> {
    let mut acc = C::<T>::zero();
    for (&(a, b), c) in poly {
        let mut m = *c;
        for _ in 0..a {
            m *= x;
        }
        for _ in 0..b {
            m *= y;
        }
        acc += m;
    }
    acc
}

/// `M = i integral e^{i u(t)} (dR/dx2 - i dR/dy2)(x0(t)) dt` by tanh-sinh on `[-T, T]`.
pub fn melnikov_quadrature<T: Real>(
    p: &MelnikovProblem,
    mu: T,
    cfg: &QuadratureConfig,
) -> Result<MelnikovResult<T>> {
    let eps = p.eps_for_mu(mu)?;
    let poly = p.integrand_poly(eps);
    let integrand = MelnikovProblem::report(&poly);
    if poly.is_empty() {
        return Ok(MelnikovResult { m: C::zero(), method: MelnikovMethod::Quadrature, mu, eps, error: 0.0, integrand });
    }
    let omega = p.angle.omega_sum(eps, CLOSED_ORDER);
    let decay = std::f64::consts::PI * omega.to_f64() / eps.to_f64();
    if (-decay).exp() < T::epsilon().to_f64() * 1e4 {
        let bits = (decay / std::f64::consts::LN_2).ceil() as u32 + 50;
        return Err(Error::Precision(format!(
            "the integral is about e^-{decay:.1} of its integrand; about {bits} bits are needed"
        )));
    }
    let xs = p.saddle_x(eps);
    let half = T::from_f64(cfg.half_width.unwrap_or(40.0 / eps.to_f64()));
    let integrand_at = |t: T| -> C<T> {
        let s = cre(eps * t);
        let [x, xd, _] = p.sep.x_and_derivatives(eps, s, CLOSED_ORDER);
        let g = eval_poly(&poly, x - cre(xs), xd * cre(eps));
        let phase = p.angle.eval(eps, cre(t), CLOSED_ORDER);
        cexp(C::new(-phase.im, phase.re)) * g
    };
    let tol = QuadTol { rel: cfg.rel_tol, abs: T::epsilon().to_f64() * 1e3 };
    let q = tanh_sinh(integrand_at, -half, half, tol, cfg.max_levels);
    // exponential tails beyond the window
    let tail = (cabs(integrand_at(half)) + cabs(integrand_at(-half))).to_f64() / eps.to_f64();
    let m = C::new(-q.value.im, q.value.re);
    Ok(MelnikovResult { m, method: MelnikovMethod::Quadrature, mu, eps, error: q.error + tail, integrand })
}

/// Exact evaluation by the residue at `s = i pi`, shifting the contour by the
/// period `2 pi i`. Needs a frequency independent of `x1`.
pub fn melnikov_exact_residue<T: Real>(p: &MelnikovProblem, mu: T) -> Result<MelnikovResult<T>> {
    if !p.has_constant_frequency() {
        return Err(Error::Precondition(
            "the residue evaluation needs d_I V independent of x1 (the phase has an essential singularity otherwise)"
                .into(),
        ));
    }
    let eps = p.eps_for_mu(mu)?;
    let poly = p.integrand_poly(eps);
    let integrand = MelnikovProblem::report(&poly);
    let pole = poly.keys().map(|&(a, b)| 2 * a as i32 + 3 * b as i32).max().unwrap_or(0);
    if pole == 0 {
        return Ok(MelnikovResult { m: C::zero(), method: MelnikovMethod::Residue, mu, eps, error: 0.0, integrand });
    }
    let high = pole + 2;
    let zc = z_laurent((high as usize + 2) / 2 + 2);
    let mut zs = vec![C::<T>::zero(); 2 * zc.len()];
    for (i, c) in zc.iter().enumerate() {
        zs[2 * i] = cre(T::from_rational(c));
    }
    let z = Series { low: -2, c: zs, high };
    let e2 = eps * eps;
    let mut x = Series::constant(C::zero(), high);
    let mut scale = e2;
    for pk in p.sep.p.iter().skip(1) {
        let mut acc = Series::constant(C::zero(), high);
        for c in pk.coeffs().iter().rev() {
            acc = acc.mul(&z).add(&Series::constant(cre(T::from_rational(c)), high));
        }
        acc = acc.add(&Series::constant(cre(-T::from_rational(&pk.at_zero())), high));
        x = x.add(&acc.scale(cre(scale)));
        scale *= e2;
    }
    let y = x.derivative().scale(cre(eps));
    let mut g = Series::constant(C::zero(), high - 1);
    for (&(a, b), c) in &poly {
        let mut m = Series::constant(*c, high - 1);
        for _ in 0..a {
            m = m.mul(&x);
        }
        for _ in 0..b {
            m = m.mul(&y);
        }
        g = g.add(&m);
    }
    let omega = p.angle.omega_sum(eps, CLOSED_ORDER);
    let rho = g.residue_with_exp(C::new(T::zero(), omega / eps));
    let a = T::pi() * omega / eps;
    let two_sinh = a.exp() - (-a).exp();
    let m = rho * cre(-(T::pi() + T::pi()) / (eps * two_sinh));
    Ok(MelnikovResult { m, method: MelnikovMethod::Residue, mu, eps, error: 0.0, integrand })
}

/// Displayed closed form for `R = c0 x1^m x2`, implemented verbatim:
/// `2 pi (-1)^{m-1} c0 omega^{2m-1} 2^{2m} / ((2m-1)! (e^{pi omega/eps} + e^{-pi omega/eps}))`.
pub fn melnikov_residue<T: Real>(m: u32, c0: T, omega: T, eps: T) -> C<T> {
    assert!(m >= 1);
    let sign = if m % 2 == 1 { T::one() } else { -T::one() };
    let fact = (1..2 * m).fold(T::one(), |acc, k| acc * T::from_f64(k as f64));
    let a = T::pi() * omega / eps;
    let num = (T::pi() + T::pi()) * sign * c0 * omega.powi(2 * m as i32 - 1) * T::from_f64(2.0).powi(2 * m as i32);
    cre(num / (fact * (a.exp() + (-a).exp())))
}

#[derive(Clone, Debug)]
pub struct StokesDerivative<T> {
    /// `2 pi i Res_{s=0}` of the defining integrand.
    pub residue: C<T>,
    /// Quadrature along `Im s = -1`.
    pub quadrature: C<T>,
    pub quadrature_error: f64,
    /// The same derivative expressed for the pairing `lim Omega(delta0, eta0)`.
    pub pairing_per_nu: C<T>,
    pub note: Option<String>,
}

/// Derivative in `nu` of the Stokes constant at `nu = 0` for the inner model
/// `y1^2/2 + omega0 I - x1^3 + nu R0`.
pub fn stokes_derivative<T: Real>(r0: &PolyHamiltonian, omega0: T) -> Result<StokesDerivative<T>> {
    stokes_derivative_with(r0, omega0, T::from_f64(2.0))
}

/// As [`stokes_derivative`] with inner separatrix `(k s^-2, -2k s^-3, 0, 0)`.
pub fn stokes_derivative_with<T: Real>(r0: &PolyHamiltonian, omega0: T, kappa: T) -> Result<StokesDerivative<T>> {
    let inv_sqrt2 = T::one() / T::from_f64(2.0).sqrt();
    // d/d conj(z2) = (d/dx2 + i d/dy2)/sqrt 2 with z2 = (x2 + i y2)/sqrt 2
    let mut poles: BTreeMap<i32, C<T>> = BTreeMap::new();
    for (e, c) in r0.terms() {
        if e[4] != 0 || e[5] != 0 {
            continue;
        }
        let weight = match (e[2], e[3]) {
            (1, 0) => C::new(T::one(), T::zero()),
            (0, 1) => C::new(T::zero(), T::one()),
            _ => continue,
        };
        let n = 2 * e[0] as i32 + 3 * e[1] as i32;
        if n == 0 {
            return Err(Error::Precondition(
                "R0 is linear in (x2, y2) at the origin; move the equilibrium to the origin first".into(),
            ));
        }
        let v = T::from_rational(c) * kappa.powi(e[0] as i32) * (-(kappa + kappa)).powi(e[1] as i32) * inv_sqrt2;
        *poles.entry(n).or_insert_with(C::zero) += weight * cre(v);
    }
    poles.retain(|_, v| !v.is_zero());
    if poles.is_empty() {
        return Ok(StokesDerivative {
            residue: C::zero(),
            quadrature: C::zero(),
            quadrature_error: 0.0,
            pairing_per_nu: C::zero(),
            note: Some("R0 does not depend on conj(z2); the derivative vanishes".into()),
        });
    }
    let iw = C::new(T::zero(), omega0);
    let mut res = C::<T>::zero();
    for (&n, w) in &poles {
        let fact = (1..n).fold(T::one(), |acc, k| acc * T::from_f64(k as f64));
        res += *w * crate::numeric::cpowi(iw, n - 1) / cre(fact);
    }
    let two_pi_i = C::new(T::zero(), T::pi() + T::pi());
    let residue = two_pi_i * res;

    let f = |s: C<T>| -> C<T> {
        let mut acc = C::<T>::zero();
        for (&n, w) in &poles {
            acc += *w * crate::numeric::cpowi(s, -n);
        }
        cexp(iw * s) * acc
    };
    let big_l = T::from_f64(8.0);
    let tol = QuadTol { rel: (T::epsilon().to_f64() * 1e4).max(1e-28), abs: 0.0 };
    let main = tanh_sinh(|x: T| f(C::new(x, -T::one())), -big_l, big_l, tol, 16);
    // the tails are rotated onto vertical rays into the upper half plane
    let tails = exp_sinh(
        |y: T| f(C::new(big_l, y - T::one())) - f(C::new(-big_l, y - T::one())),
        T::zero(),
        tol,
        16,
    );
    let quadrature = main.value + C::new(T::zero(), T::one()) * tails.value;
    let pairing_per_nu = residue * cre(-T::from_f64(2.0).sqrt());
    Ok(StokesDerivative {
        residue,
        quadrature,
        quadrature_error: main.error + tails.error,
        pairing_per_nu,
        note: None,
    })
}

#[cfg(test)]
mod tests;
