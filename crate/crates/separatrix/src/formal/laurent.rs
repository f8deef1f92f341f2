use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::angle::FormalU;
use super::separatrix::FormalSeparatrix;
use super::zpoly::{qi, PowerSeries};
use crate::error::{Error, Result};
use crate::numeric::{Real, C};

/// Laurent polynomial in `tau`, keyed by exponent.
pub type Laurent = BTreeMap<i32, BigRational>;

/// Formal series regrouped by powers of `eps` near `s = i pi`, with `tau = t - i pi/eps`:
/// `x = sum eps^{2m} A_m(tau)`, `y = sum eps^{2m} B_m(tau)` and
/// `u = i pi omega/eps + sum eps^{2m} (omega_m tau + U_m(tau))`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentExpansion {
    pub a: Vec<Laurent>,
    pub b: Vec<Laurent>,
    /// Odd part of `U_m`, without the `omega_m tau` term.
    pub u: Vec<Laurent>,
    pub omega: Vec<BigRational>,
    pub depth: usize,
}

/// Series of `sinh(x/2)/(x/2)` and `cosh(x/2)` in powers of `x^2`.
fn shape_series(len: usize) -> (PowerSeries, PowerSeries) {
    let mut sh = Vec::with_capacity(len);
    let mut ch = Vec::with_capacity(len);
    // running (2i)! 4^i
    let mut den = BigRational::one();
    for i in 0..len {
        if i > 0 {
            den *= qi((2 * i - 1) as i64) * qi(2 * i as i64) * qi(4);
        }
        ch.push(den.recip());
        sh.push((&den * qi(2 * i as i64 + 1)).recip());
    }
    (PowerSeries::new(sh, len), PowerSeries::new(ch, len))
}

/// Expansions at `sigma = s - i pi` of the two profile families:
/// `z^l = (-4)^l sigma^{-2l} sum phi[l][i] sigma^{2i}` and
/// `sinh/cosh^{2l+1} = (-1)^l 2^{2l+1} sigma^{-2l-1} sum psi[l][i] sigma^{2i}`.
struct ProfileTables {
    even: Vec<PowerSeries>,
    odd: Vec<PowerSeries>,
}

impl ProfileTables {
    fn new(max_l: usize, len: usize) -> Self {
        let (f, g) = shape_series(len);
        let finv = f.inv();
        let mut even = vec![PowerSeries::one(len)];
        for l in 1..=max_l {
            let next = even[l - 1].mul(&finv).mul(&finv);
            even.push(next);
        }
        let mut odd = Vec::new();
        let mut acc = g.mul(&finv);
        for _ in 0..=max_l {
            odd.push(acc.clone());
            acc = acc.mul(&finv).mul(&finv);
        }
        ProfileTables { even, odd }
    }

    /// Coefficient of `sigma^{2L}` in `z^l`.
    fn even_coeff(&self, l: usize, big_l: i64) -> BigRational {
        let i = big_l + l as i64;
        if i < 0 || i as usize >= self.even[l].len() {
            return BigRational::zero();
        }
        let sign = if l.is_multiple_of(2) { qi(1) } else { qi(-1) };
        sign * pow4(l) * &self.even[l].coeffs[i as usize]
    }

    /// Coefficient of `sigma^{2L-1}` in `sinh/cosh^{2l+1}`.
    fn odd_coeff(&self, l: usize, big_l: i64) -> BigRational {
        let i = big_l + l as i64;
        if i < 0 || i as usize >= self.odd[l].len() {
            return BigRational::zero();
        }
        let sign = if l.is_multiple_of(2) { qi(1) } else { qi(-1) };
        sign * pow4(l) * qi(2) * &self.odd[l].coeffs[i as usize]
    }
}

/// Coefficients `c[i]` of `z(i pi + sigma) = sum c[i] sigma^{2i-2}`, `i < len`.
pub(crate) fn z_laurent(len: usize) -> Vec<BigRational> {
    let (f, _) = shape_series(len);
    let finv = f.inv();
    finv.mul(&finv).coeffs.iter().map(|c| c * qi(-4)).collect()
}

fn pow4(l: usize) -> BigRational {
    (0..l).fold(BigRational::one(), |acc, _| acc * qi(4))
}

/// Re-expand the formal series at `s = i pi` for `m = 0..=max_m`, keeping
/// `tau`-powers down to `tau^{-2 depth}` (`tau^{-2 depth - 1}` for odd series).
pub fn reexpand_at_singularity(
    sep: &FormalSeparatrix,
    u: &FormalU,
    max_m: usize,
    depth: usize,
) -> Result<LaurentExpansion> {
    let need = max_m + depth;
    if sep.order < need || u.u.len() < need + 1 {
        return Err(Error::Precondition(format!(
            "Laurent data for m <= {max_m} at depth {depth} needs series order {}",
            need + 1
        )));
    }
    let len = need + max_m + 3;
    let tables = ProfileTables::new(need + 1, len);
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut uu = Vec::new();
    for m in 0..=max_m as i64 {
        let mut am = Laurent::new();
        let mut bm = Laurent::new();
        for big_l in -(depth as i64)..=m - 1 {
            let k = (m - big_l) as usize;
            let mut pa = BigRational::zero();
            for (l, c) in sep.p[k].coeffs().iter().enumerate() {
                pa += c * tables.even_coeff(l, big_l);
            }
            let mut qb = BigRational::zero();
            for (l, c) in sep.q[k].iter().enumerate() {
                qb += c * tables.odd_coeff(l, big_l);
            }
            if !pa.is_zero() {
                am.insert(2 * big_l as i32, pa);
            }
            if !qb.is_zero() {
                bm.insert(2 * big_l as i32 - 1, qb);
            }
        }
        let mut um = Laurent::new();
        for big_l in -(depth as i64)..=m {
            let k = (m - big_l) as usize;
            let mut c = BigRational::zero();
            for (l, w) in u.u[k].iter().enumerate() {
                c += w * tables.odd_coeff(l, big_l);
            }
            if !c.is_zero() {
                um.insert(2 * big_l as i32 - 1, c);
            }
        }
        a.push(am);
        b.push(bm);
        uu.push(um);
    }
    Ok(LaurentExpansion { a, b, u: uu, omega: u.omega.clone(), depth })
}

/// Formal `tau`-derivative.
pub fn derivative(p: &Laurent) -> Laurent {
    p.iter()
        .filter(|(&e, _)| e != 0)
        .map(|(&e, c)| (e - 1, c * qi(e as i64)))
        .collect()
}

pub fn eval_laurent<T: Real>(p: &Laurent, tau: C<T>) -> C<T> {
    let mut acc = C::<T>::zero();
    for (&e, c) in p {
        acc += crate::numeric::cpowi(tau, e) * C::new(T::from_rational(c), T::zero());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal::angle::formal_u;
    use crate::formal::separatrix::{formal_separatrix, CoeffTable};
    use crate::formal::zpoly::q;

    fn cubic_v() -> CoeffTable {
        [((1, 1), qi(-1)), ((0, 3), q(1, 3))].into_iter().collect()
    }

    fn quartic_v() -> CoeffTable {
        [((1, 1), qi(-1)), ((0, 3), q(1, 3)), ((0, 4), q(1, 4)), ((1, 2), q(1, 2))].into_iter().collect()
    }

    #[test]
    fn shape_series_values() {
        let (f, g) = shape_series(4);
        assert_eq!(f.coeffs, vec![qi(1), q(1, 24), q(1, 1920), q(1, 322560)]);
        assert_eq!(g.coeffs, vec![qi(1), q(1, 8), q(1, 384), q(1, 46080)]);
    }

    #[test]
    fn leading_terms() {
        let sep = formal_separatrix(&cubic_v(), 14).unwrap();
        let coupling: CoeffTable = [((0, 0), qi(1)), ((0, 1), q(1, 2))].into_iter().collect();
        let u = formal_u(&coupling, &sep);
        let lx = reexpand_at_singularity(&sep, &u, 1, 12).unwrap();
        assert_eq!(lx.a[0].get(&-2), Some(&(qi(-4) * sep.p11())));
        assert!(lx.a[1].is_empty(), "A_1 = {:?}", lx.a[1]);
        assert!(lx.b[1].is_empty());
        for m in 0..2 {
            assert_eq!(derivative(&lx.a[m]), lx.b[m]);
            assert!(lx.a[m].keys().all(|e| e % 2 == 0));
            assert!(lx.b[m].keys().all(|e| e % 2 != 0));
            assert!(lx.u[m].keys().all(|e| e % 2 != 0));
        }
        assert_eq!(lx.omega[0], qi(1));
    }

    #[test]
    fn quartic_first_order_vanishes() {
        let sep = formal_separatrix(&quartic_v(), 14).unwrap();
        let coupling: CoeffTable = [((0, 0), qi(1)), ((0, 1), q(1, 2)), ((0, 2), q(1, 3))].into_iter().collect();
        let u = formal_u(&coupling, &sep);
        let lx = reexpand_at_singularity(&sep, &u, 1, 12).unwrap();
        assert!(lx.a[1].is_empty());
        assert!(lx.b[1].is_empty());
    }

    #[test]
    fn matches_direct_evaluation_near_pole() {
        // sum over m of eps^{2m} A_m(tau) approximates x near s = i pi
        let sep = formal_separatrix(&cubic_v(), 14).unwrap();
        let coupling: CoeffTable = [((0, 0), qi(1))].into_iter().collect();
        let u = formal_u(&coupling, &sep);
        let lx = reexpand_at_singularity(&sep, &u, 1, 12).unwrap();
        let eps = 0.001f64;
        let tau = C::new(6.0f64, -8.0);
        let t = tau + C::new(0.0, std::f64::consts::PI / eps);
        let [x, y, _] = sep.x_and_derivatives(eps, t * eps, 14);
        let approx = eval_laurent(&lx.a[0], tau) + eval_laurent(&lx.a[1], tau) * eps * eps;
        assert!((x - approx).norm() < 1e-6 * x.norm(), "{x} vs {approx}");
        let yb = eval_laurent(&lx.b[0], tau);
        assert!((y * eps - yb).norm() < 1e-6 * yb.norm());
    }

    #[test]
    fn insufficient_order_is_rejected() {
        let sep = formal_separatrix(&cubic_v(), 5).unwrap();
        let u = formal_u(&[((0, 0), qi(1))].into_iter().collect(), &sep);
        assert!(reexpand_at_singularity(&sep, &u, 1, 12).is_err());
    }
}
