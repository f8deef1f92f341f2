use num_rational::BigRational;
use num_traits::Zero;

use super::separatrix::{compose_with_constant, CoeffTable, FormalSeparatrix};
use super::zpoly::{qi, EpsSeries, ZPoly};
use crate::numeric::{ccosh, csinh, Real, C};

/// Formal angle `u = omega t + sum eps^{2k+1} u_k(eps t)` with
/// `u_k = sum_l u[k][l] sinh(s/2)/cosh^{2l+1}(s/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalU {
    /// `omega[k]` for `k = 0..=N`.
    pub omega: Vec<BigRational>,
    /// `u[k]` for `k = 0..N`, each of length `k + 1`.
    pub u: Vec<Vec<BigRational>>,
}

/// Coefficients of `integral_0^x sech^{2j}` on the odd profiles
/// `sinh/cosh^{2l+1}`, `l = 0..j`.
pub fn sech_power_integral(j: usize) -> Vec<BigRational> {
    assert!(j >= 1);
    let mut w = vec![qi(1)];
    for i in 2..=j {
        let den = qi(2 * i as i64 - 1);
        let mut next: Vec<BigRational> = w.iter().map(|c| c * qi(2 * i as i64 - 2) / &den).collect();
        next.push(den.recip());
        w = next;
    }
    w
}

/// `integral_0^s P(z(s')) ds'` for a `z`-polynomial without constant term,
/// on odd profiles.
pub fn integrate_odd_profile(p: &ZPoly) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); p.degree().max(1)];
    for j in 1..=p.degree() {
        let c = p.coeff(j);
        if c.is_zero() {
            continue;
        }
        // integral_0^s z^j = 2 integral_0^{s/2} sech^{2j}
        for (l, w) in sech_power_integral(j).iter().enumerate() {
            out[l] += &c * w * qi(2);
        }
    }
    out
}

/// `sum_l c[l] sinh(s/2)/cosh^{2l+1}(s/2)`.
pub fn eval_odd_profile<T: Real>(c: &[BigRational], s: C<T>) -> C<T> {
    let h = s * C::new(T::from_f64(0.5), T::zero());
    let ch = ccosh(h);
    let z = C::new(T::one(), T::zero()) / (ch * ch);
    let mut acc = C::<T>::zero();
    for a in c.iter().rev() {
        acc = acc * z + C::new(T::from_rational(a), T::zero());
    }
    acc * csinh(h) / ch
}

/// Integrate `d_I V(x, mu)` at `I = 0` along the formal separatrix.
/// `coupling[(k, l)]` is the coefficient of `mu^k x^l` in `d_I V`.
pub fn formal_u(coupling: &CoeffTable, sep: &FormalSeparatrix) -> FormalU {
    let n = sep.order;
    let mut x = EpsSeries::zero(n);
    for (k, pk) in sep.p.iter().enumerate() {
        x.terms[k] = pk.clone();
    }
    let g = compose_with_constant(coupling, &x, &sep.mu, n);
    let omega: Vec<BigRational> = g.terms.iter().map(|t| t.at_zero()).collect();
    let u = (0..n)
        .map(|k| {
            let gk = &g.terms[k + 1];
            let centered = gk - &ZPoly::constant(gk.at_zero());
            let mut prof = integrate_odd_profile(&centered);
            prof.resize(k + 1, BigRational::zero());
            prof
        })
        .collect();
    FormalU { omega, u }
}

impl FormalU {
    pub fn omega_sum<T: Real>(&self, eps: T, n: usize) -> T {
        let e2 = eps * eps;
        let mut acc = T::zero();
        for w in self.omega.iter().take(n + 1).rev() {
            acc = acc * e2 + T::from_rational(w);
        }
        acc
    }

    /// `u(t)` truncated at `eps^{2n+1}`.
    pub fn eval<T: Real>(&self, eps: T, t: C<T>, n: usize) -> C<T> {
        let e = C::new(eps, T::zero());
        let s = e * t;
        let mut acc = C::new(self.omega_sum(eps, n), T::zero()) * t;
        let mut scale = e;
        for uk in self.u.iter().take(n) {
            acc += scale * eval_odd_profile(uk, s);
            scale = scale * e * e;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal::separatrix::formal_separatrix;
    use crate::formal::zpoly::q;
    use crate::numeric::cre;

    fn cubic_v() -> CoeffTable {
        [((1, 1), qi(-1)), ((0, 3), q(1, 3))].into_iter().collect()
    }

    #[test]
    fn sech_integrals() {
        // integral sech^2 = tanh; integral sech^4 = tanh - tanh^3/3 = (2/3) tanh + (1/3) sech^2 tanh
        assert_eq!(sech_power_integral(1), vec![qi(1)]);
        assert_eq!(sech_power_integral(2), vec![q(2, 3), q(1, 3)]);
        let w = sech_power_integral(3);
        let x = 0.7f64;
        let exact: f64 = {
            let n = 2000;
            let h = x / n as f64;
            (0..n)
                .map(|i| {
                    let a = i as f64 * h;
                    let f = |t: f64| t.cosh().powi(-6);
                    h / 6.0 * (f(a) + 4.0 * f(a + h / 2.0) + f(a + h))
                })
                .sum()
        };
        let got: f64 = w
            .iter()
            .enumerate()
            .map(|(l, c)| crate::numeric::rational_to_f64(c) * x.sinh() / x.cosh().powi(2 * l as i32 + 1))
            .sum();
        assert!((got - exact).abs() < 1e-13);
    }

    #[test]
    fn constant_coupling_gives_linear_angle() {
        let sep = formal_separatrix(&cubic_v(), 5).unwrap();
        let coupling: CoeffTable = [((0, 0), qi(1))].into_iter().collect();
        let u = formal_u(&coupling, &sep);
        assert_eq!(u.omega[0], qi(1));
        assert!(u.omega[1..].iter().all(|w| w.is_zero()));
        assert!(u.u.iter().flatten().all(|c| c.is_zero()));
    }

    #[test]
    fn derivative_matches_integrand() {
        let sep = formal_separatrix(&cubic_v(), 5).unwrap();
        let coupling: CoeffTable = [((0, 0), qi(1)), ((0, 1), qi(1)), ((1, 0), q(1, 2))].into_iter().collect();
        let u = formal_u(&coupling, &sep);
        // omega_mu = 1 + x_saddle + mu/2 with x_saddle = -eps^2/2 and mu = eps^4/4
        assert_eq!(u.omega[1], q(-1, 2));
        assert_eq!(u.omega[2], q(1, 8));
        // u_0' = p_1 - p_1(0) = (3/2) z, so u_0 = 3 tanh(s/2)
        assert_eq!(u.u[0], vec![qi(3)]);
        let eps = 0.3f64;
        let t = cre(1.1f64);
        let h = 1e-5;
        let du = (u.eval(eps, t + h, 5) - u.eval(eps, t - h, 5)) / (2.0 * h);
        let [x, _, _] = sep.x_and_derivatives(eps, eps * t, 5);
        let mu = sep.mu_sum(eps, 5);
        assert!((du - (1.0 + x + mu / 2.0)).norm() < 1e-9);
    }
}
