use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{symplectic_pair, PhasePoint, PhasePoly, PolyHamiltonian};
use crate::error::{Error, Result};
use crate::numeric::linalg::{null_vector, solve};
use crate::numeric::{cabs, cre, Real, C};

#[derive(Clone, Debug)]
pub struct EquilibriumData<T> {
    pub location: [T; 4],
    /// Hyperbolic exponent.
    pub lambda: T,
    /// Elliptic frequency.
    pub omega: T,
    /// Eigenvector for `+i omega`, normalized by `Omega(v, conj v) = -2i`
    /// with real positive `x2` component.
    pub v: PhasePoint<T>,
    /// Unit eigenvectors for `+lambda` and `-lambda`, pointing into the loop.
    pub w_unstable: [T; 4],
    pub w_stable: [T; 4],
    /// Norm of the gradient at the returned location.
    pub residual: T,
}

impl<T: Real> EquilibriumData<T> {
    pub fn point(&self) -> PhasePoint<T> {
        self.location.map(cre)
    }
}

/// Saddle location of the truncated cubic potential `v11 mu x + v03 x^3`.
pub fn default_guess<T: Real>(h: &PolyHamiltonian, mu: T) -> Result<[T; 4]> {
    let v = h.potential_coeffs();
    let v11 = v.get(&(1, 1)).cloned().unwrap_or_else(BigRational::zero);
    let v03 = v.get(&(0, 3)).cloned().unwrap_or_else(BigRational::zero);
    if v11.is_zero() || v03.is_zero() {
        return Err(Error::Precondition("need v11 and v03 nonzero to seed the saddle".into()));
    }
    // V' = v11 mu + 3 v03 x^2 = 0, saddle where V'' = 6 v03 x < 0
    let r = -T::from_rational(&v11) * mu / (T::from_f64(3.0) * T::from_rational(&v03));
    if r < T::zero() {
        return Err(Error::NotSaddleCenter("no real critical point of the cubic potential".into()));
    }
    let x = r.sqrt();
    let x = if v03.is_positive() { -x } else { x };
    Ok([x, T::zero(), T::zero(), T::zero()])
}

/// Newton solve for a critical point, followed by the linear analysis.
pub fn find_equilibrium<T: Real>(
    h: &PolyHamiltonian,
    mu: T,
    nu: T,
    guess: [T; 4],
    tol: T,
) -> Result<EquilibriumData<T>> {
    let poly = h.specialize(mu, nu);
    let mut x: PhasePoint<T> = guess.map(cre);
    let mut converged = false;
    let mut last = f64::INFINITY;
    for _ in 0..100 {
        let g = poly.gradient(&x);
        let hess = poly.hessian(&x);
        let m: Vec<Vec<C<T>>> = hess.iter().map(|r| r.to_vec()).collect();
        let step = solve(m, g.iter().map(|v| -*v).collect())
            .ok_or_else(|| Error::NotSaddleCenter("singular Hessian".into()))?;
        let mut size = T::zero();
        for k in 0..4 {
            x[k] += step[k];
            x[k].im = T::zero();
            size = size.max(cabs(step[k]));
        }
        last = size.to_f64();
        if size <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NewtonFailed { residual: last });
    }
    let g = poly.gradient(&x);
    let residual = g.iter().fold(T::zero(), |a, v| a.max(cabs(*v)));
    analyse(&poly, x, residual)
}

fn analyse<T: Real>(poly: &PhasePoly<T>, x: PhasePoint<T>, residual: T) -> Result<EquilibriumData<T>> {
    let a = poly.hamiltonian_matrix(&x);
    // characteristic polynomial k^4 + c2 k^2 + c0 of a Hamiltonian matrix
    let mut tr_a2 = C::<T>::zero();
    for i in 0..4 {
        for j in 0..4 {
            tr_a2 += a[i][j] * a[j][i];
        }
    }
    let c2 = -tr_a2.re * T::from_f64(0.5);
    let c0 = det4(&a).re;
    if c0 >= T::zero() {
        return Err(Error::NotSaddleCenter(format!(
            "det(JH'') = {:e} is not negative",
            c0.to_f64()
        )));
    }
    let disc = c2 * c2 - T::from_f64(4.0) * c0;
    let r_neg = (-c2 - disc.sqrt()) * T::from_f64(0.5);
    let r_pos = c0 / r_neg;
    let lambda = r_pos.sqrt();
    let omega = (-r_neg).sqrt();

    let shifted = |k: C<T>| -> Vec<Vec<C<T>>> {
        (0..4)
            .map(|i| (0..4).map(|j| if i == j { a[i][j] - k } else { a[i][j] }).collect())
            .collect()
    };
    let mut v: Vec<C<T>> = null_vector(shifted(C::new(T::zero(), omega)));
    let v_arr: PhasePoint<T> = [v[0], v[1], v[2], v[3]];
    let conj: PhasePoint<T> = v_arr.map(|z| z.conj());
    let s = symplectic_pair(&v_arr, &conj);
    // s is purely imaginary; normalize to -2i
    let k = -s.im * T::from_f64(0.5);
    if k <= T::zero() {
        return Err(Error::NotSaddleCenter("elliptic block has negative definite energy".into()));
    }
    let scale = T::one() / k.sqrt();
    // phase: make the x2 component real and positive
    let anchor = if cabs(v[2]) > T::zero() { v[2] } else { v[3] };
    let rot = anchor.conj() / cre(cabs(anchor));
    for z in v.iter_mut() {
        *z = *z * rot * cre(scale);
    }

    let side = loop_side(poly, &x);
    let real_unit = |w: Vec<C<T>>| -> [T; 4] {
        let mut n = T::zero();
        for z in &w {
            n += z.re * z.re;
        }
        let n = n.sqrt();
        let sign = if (w[0].re < T::zero()) == (side > T::zero()) { -T::one() } else { T::one() };
        [w[0].re / n * sign, w[1].re / n * sign, w[2].re / n * sign, w[3].re / n * sign]
    };
    let w_unstable = real_unit(null_vector(shifted(cre(lambda))));
    let w_stable = real_unit(null_vector(shifted(cre(-lambda))));

    Ok(EquilibriumData {
        location: x.map(|z| z.re),
        lambda,
        omega,
        v: [v[0], v[1], v[2], v[3]],
        w_unstable,
        w_stable,
        residual,
    })
}

/// Sign of `d^3 H / dx1^3`: the side of the saddle on which the loop closes.
fn loop_side<T: Real>(poly: &PhasePoly<T>, x: &PhasePoint<T>) -> T {
    let d3 = poly.derivative(0).derivative(0).derivative(0).eval(x).re;
    if d3 < T::zero() {
        -T::one()
    } else {
        T::one()
    }
}

fn det4<T: Real>(a: &[[C<T>; 4]; 4]) -> C<T> {
    let mut m: Vec<Vec<C<T>>> = a.iter().map(|r| r.to_vec()).collect();
    let mut det = C::new(T::one(), T::zero());
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&p, &q| cabs(m[p][col]).partial_cmp(&cabs(m[q][col])).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(col);
        if cabs(m[piv][col]).is_zero() {
            return C::zero();
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..4 {
            let f = m[r][col] / m[col][col];
            for c in col..4 {
                let v = m[col][c];
                m[r][c] -= f * v;
            }
        }
    }
    det
}
