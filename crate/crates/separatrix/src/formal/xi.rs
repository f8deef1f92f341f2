use num_rational::BigRational;
use num_traits::{One, Zero};

use super::angle::FormalU;
use super::separatrix::{solve_dense, z_of, zprime, FormalSeparatrix};
use super::zpoly::{q, qi, ZPoly};
use crate::error::{Error, Result};
use crate::hamiltonian::PhasePoint;
use crate::numeric::{cexp, Real, C};

/// `xi2 = (0, 0, 1, i) exp(i u)` along the formal separatrix.
#[derive(Clone, Debug)]
pub struct FormalXi2 {
    pub u: FormalU,
}

pub fn formal_xi2(u: &FormalU) -> FormalXi2 {
    FormalXi2 { u: u.clone() }
}

impl FormalXi2 {
    pub fn direction<T: Real>() -> PhasePoint<T> {
        [C::zero(), C::zero(), C::new(T::one(), T::zero()), C::new(T::zero(), T::one())]
    }

    pub fn eval<T: Real>(&self, eps: T, t: C<T>, n: usize) -> PhasePoint<T> {
        let phase = cexp(C::new(T::zero(), T::one()) * self.u.eval(eps, t, n));
        Self::direction::<T>().map(|d| d * phase)
    }

    /// Real-symmetric partner `conj(xi2(conj t))`.
    pub fn eval_partner<T: Real>(&self, eps: T, t: C<T>, n: usize) -> PhasePoint<T> {
        self.eval(eps, t.conj(), n).map(|z| z.conj())
    }
}

/// One term `v_k = c_k(z) s z' + z^{-1} d_{k+2}(z)` of the formal `xi4` amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct Xi4Term {
    pub c: ZPoly,
    pub d: ZPoly,
}

impl Xi4Term {
    /// Carries a term growing linearly in `s`.
    pub fn secular(&self) -> bool {
        !self.c.is_zero()
    }

    /// `v_k(s)` and `dv_k/ds`.
    pub fn eval<T: Real>(&self, s: C<T>) -> (C<T>, C<T>) {
        let z = z_of(s);
        let zp = zprime(s);
        let zp2 = z * z - z * z * z;
        let zpp = z - z * z * C::new(T::from_f64(1.5), T::zero());
        let c = self.c.eval(z);
        let cz = self.c.dz().eval(z);
        let d = self.d.eval(z);
        let dz = self.d.dz().eval(z);
        let w = d / z;
        let wz = dz / z - d / (z * z);
        let v = c * s * zp + w;
        let dv = cz * zp2 * s + c * (zp + s * zpp) + wz * zp;
        (v, dv)
    }
}

/// Solutions of `x' v' - x'' v = 1` with `x` the formal separatrix,
/// `v = sum eps^{2k-4} v_k(eps t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalXi4 {
    pub v: Vec<Xi4Term>,
}

/// `s`-proportional part of `P' v' - P'' v`, divided by `s z' (z^2 - z^3)`.
fn secular_part(p: &ZPoly, c: &ZPoly) -> ZPoly {
    &(&p.dz() * &c.dz()) - &(&p.dz().dz() * c)
}

/// Remaining part of `P' v' - P'' v`, a polynomial in `z`.
fn regular_part(p: &ZPoly, c: &ZPoly, d: &ZPoly) -> ZPoly {
    let pz = p.dz();
    let pzz = pz.dz();
    let z_minus_z2 = ZPoly::from_coeffs(vec![qi(0), qi(1), qi(-1)]);
    let two_minus = ZPoly::from_coeffs(vec![qi(2), q(-5, 2)]);
    let a = &(&pz * &ZPoly::zprime_squared()) * c;
    let b = &(&pz * &z_minus_z2) * &d.dz();
    let e = &(&pzz * &z_minus_z2) * d;
    let f = &(&pz * &two_minus) * d;
    &(&(&a + &b) - &e) - &f
}

/// Solve the `xi4` hierarchy for `v_0..v_{N-1}`.
pub fn formal_xi4(sep: &FormalSeparatrix) -> Result<FormalXi4> {
    let p11 = sep.p11();
    let mut v: Vec<Xi4Term> = Vec::new();
    for n in 0..sep.order {
        let mut sec = ZPoly::zero();
        let mut reg = ZPoly::zero();
        for j in 2..=n + 1 {
            let prev = &v[n + 1 - j];
            sec = &sec + &secular_part(&sep.p[j], &prev.c);
            reg = &reg + &regular_part(&sep.p[j], &prev.c, &prev.d);
        }
        if n == 0 {
            reg = &reg - &ZPoly::constant(BigRational::one());
        }
        // p11 c_n' + sec = 0, so c_n = kappa - integral(sec)/p11
        let c_tilde = sec.integrate_z().scale(&-p11.recip());
        let reg = &reg + &regular_part(&sep.p[1], &c_tilde, &ZPoly::zero());
        // unknowns d_0..d_{n+2}, kappa; equations z^0..z^{n+3}
        let dim = n + 4;
        let mut mat = vec![vec![BigRational::zero(); dim]; dim];
        for j in 0..=n + 2 {
            let col = regular_part(&sep.p[1], &ZPoly::zero(), &ZPoly::monomial(j, qi(1)));
            for (m, a) in col.coeffs().iter().enumerate() {
                mat[m][j] += a;
            }
        }
        let col = regular_part(&sep.p[1], &ZPoly::constant(qi(1)), &ZPoly::zero());
        for (m, a) in col.coeffs().iter().enumerate() {
            mat[m][n + 3] += a;
        }
        if reg.degree() > n + 3 {
            return Err(Error::Precondition(format!("xi4 forcing at order {n} exceeds the expected degree")));
        }
        let rhs: Vec<BigRational> = (0..dim).map(|m| -reg.coeff(m)).collect();
        let sol = solve_dense(mat, rhs)
            .ok_or_else(|| Error::Precondition(format!("singular xi4 system at order {n}")))?;
        let d = ZPoly::from_coeffs(sol[..n + 3].to_vec());
        let c = &c_tilde + &ZPoly::constant(sol[n + 3].clone());
        v.push(Xi4Term { c, d });
    }
    Ok(FormalXi4 { v })
}

impl FormalXi4 {
    /// `(v, dv/dt)` at time `t`, truncated after `n` terms.
    pub fn eval<T: Real>(&self, eps: T, t: C<T>, n: usize) -> (C<T>, C<T>) {
        let e = C::new(eps, T::zero());
        let s = e * t;
        let mut v = C::<T>::zero();
        let mut dv = C::<T>::zero();
        let mut scale = C::new(T::one(), T::zero()) / (e * e * e * e);
        for term in self.v.iter().take(n) {
            let (a, b) = term.eval(s);
            v += scale * a;
            dv += scale * e * b;
            scale = scale * e * e;
        }
        (v, dv)
    }

    /// `xi4 = (v, dv/dt, 0, 0)`.
    pub fn eval_vector<T: Real>(&self, eps: T, t: C<T>, n: usize) -> PhasePoint<T> {
        let (v, dv) = self.eval(eps, t, n);
        [v, dv, C::zero(), C::zero()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal::angle::formal_u;
    use crate::formal::separatrix::{formal_separatrix, CoeffTable};
    use crate::hamiltonian::symplectic_pair;
    use crate::numeric::{cf64, cre, Qd};

    fn cubic_v() -> CoeffTable {
        [((1, 1), qi(-1)), ((0, 3), q(1, 3))].into_iter().collect()
    }

    fn quartic_v() -> CoeffTable {
        [((1, 1), qi(-1)), ((0, 3), q(1, 3)), ((0, 4), q(1, 4)), ((1, 2), q(1, 2))].into_iter().collect()
    }

    #[test]
    fn leading_term_closed_form() {
        let sep = formal_separatrix(&cubic_v(), 3).unwrap();
        let xi = formal_xi4(&sep).unwrap();
        let inv = sep.p11().recip();
        assert_eq!(xi.v[0].c, ZPoly::constant(q(15, 8) * &inv));
        let d = ZPoly::from_coeffs(vec![q(-1, 2), q(-5, 4), q(15, 4)]).scale(&inv);
        assert_eq!(xi.v[0].d, d);
        assert!(xi.v[0].secular());
    }

    #[test]
    fn wronskian_is_one() {
        for v in [cubic_v(), quartic_v()] {
            let sep = formal_separatrix(&v, 6).unwrap();
            let xi = formal_xi4(&sep).unwrap();
            let eps = Qd::from_f64(0.05);
            for t in [cf64::<Qd>(3.0, 0.0), cf64(-7.0, 0.0), cf64(11.0, 4.0)] {
                let s = C::new(eps, Qd::zero()) * t;
                let [_, x1, x2] = sep.x_and_derivatives(eps, s, 6);
                // t-derivatives of x
                let xt = x1 * cre(eps);
                let xtt = x2 * cre(eps * eps);
                let (vv, dv) = xi.eval(eps, t, 5);
                let w = xt * dv - xtt * vv;
                let err = (w - cre(Qd::one())).norm_sqr().sqrt().to_f64();
                assert!(err < 1e-11, "wronskian error {err}");
                let x3 = [xt, xtt, C::zero(), C::zero()];
                let pair = symplectic_pair(&x3, &xi.eval_vector(eps, t, 5));
                assert!((pair - cre(Qd::one())).norm_sqr().sqrt().to_f64() < 1e-11);
            }
        }
    }

    #[test]
    fn shape_excludes_homogeneous_multiple() {
        // the shape is even in s; the homogeneous solution z' is odd
        let sep = formal_separatrix(&quartic_v(), 5).unwrap();
        let xi = formal_xi4(&sep).unwrap();
        for term in &xi.v {
            let (a, _) = term.eval(cf64::<f64>(0.8, 0.0));
            let (b, _) = term.eval(cf64::<f64>(-0.8, 0.0));
            assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
        }
        let zp = zprime(cf64::<f64>(0.8, 0.0));
        assert!((zp + zprime(cf64::<f64>(-0.8, 0.0))).norm() < 1e-15 && zp.norm() > 0.1);
    }

    #[test]
    fn xi2_pairing() {
        let sep = formal_separatrix(&cubic_v(), 4).unwrap();
        let coupling: CoeffTable = [((0, 0), qi(1)), ((0, 1), q(1, 3))].into_iter().collect();
        let xi2 = formal_xi2(&formal_u(&coupling, &sep));
        let t = cf64::<f64>(0.4, 0.2);
        let a = xi2.eval_partner(0.3, t, 4);
        let b = xi2.eval(0.3, t, 4);
        assert!((symplectic_pair(&a, &b) - cf64(0.0, 2.0)).norm() < 1e-12);
        let trivial = formal_xi2(&formal_u(&[((0, 0), qi(2))].into_iter().collect(), &sep));
        let e = trivial.eval(0.3, cf64::<f64>(0.25, 0.0), 4);
        let want = cexp(cf64::<f64>(0.0, 0.5));
        assert!((e[2] - want).norm() < 1e-15 && (e[3] - want * cf64(0.0, 1.0)).norm() < 1e-15);
    }
}
