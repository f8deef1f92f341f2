//! Double-exponential quadrature for complex-valued integrands.

use num_traits::Zero;

use super::{cabs, Real, C};

#[derive(Clone, Copy, Debug)]
pub struct QuadResult<T> {
    pub value: C<T>,
    /// Difference between the last two refinement levels.
    pub error: f64,
    pub levels: usize,
}

/// Nodes `(1 - x, w)` of one refinement level on `(-1, 1)` with spacing `h`;
/// odd multiples only when `odd_only`.
fn tanh_sinh_level<T: Real>(h: T, odd_only: bool, cutoff: f64) -> Vec<(T, T)> {
    let half_pi = T::pi() * T::from_f64(0.5);
    let mut out = Vec::new();
    let mut k = if odd_only { 1i64 } else { 0 };
    let stride = if odd_only { 2 } else { 1 };
    loop {
        let u = h * T::from_i64(k);
        let e = u.exp();
        let sinh = (e - T::one() / e) * T::from_f64(0.5);
        let cosh = (e + T::one() / e) * T::from_f64(0.5);
        let q = (half_pi * sinh).exp();
        let qi = T::one() / q;
        let ch = (q + qi) * T::from_f64(0.5);
        // 1 - tanh = 2/(1 + q^2), kept exact near the endpoints
        let one_minus = T::from_f64(2.0) / (T::one() + q * q);
        let w = half_pi * cosh / (ch * ch);
        if w.to_f64() < cutoff || one_minus.to_f64() == 0.0 {
            break;
        }
        out.push((one_minus, w));
        k += stride;
        if k > 100_000 {
            break;
        }
    }
    out
}

/// Convergence target: successive levels must agree to `abs + rel * |value|`.
#[derive(Clone, Copy, Debug)]
pub struct QuadTol {
    pub rel: f64,
    pub abs: f64,
}

impl QuadTol {
    pub fn rel(rel: f64) -> Self {
        QuadTol { rel, abs: 0.0 }
    }

    pub fn abs(abs: f64) -> Self {
        QuadTol { rel: 0.0, abs }
    }

    fn met<T: Real>(&self, error: f64, value: C<T>) -> bool {
        error <= self.abs + self.rel * cabs(value).to_f64()
    }
}

/// Integral of `f` over `[a, b]` by tanh-sinh with level halving until two
/// successive levels agree to `tol` or `max_levels` is reached.
pub fn tanh_sinh<T: Real>(f: impl Fn(T) -> C<T>, a: T, b: T, tol: QuadTol, max_levels: usize) -> QuadResult<T> {
    let mid = (a + b) * T::from_f64(0.5);
    let half = (b - a) * T::from_f64(0.5);
    let cutoff = T::epsilon().to_f64() * 1e-3;
    let mut h = T::one();
    let mut sum = C::<T>::zero();
    // nodes are placed by their distance to the endpoints to keep endpoint singularities resolved
    let eval_pair = |om: T, w: T| -> C<T> {
        let d = half * om;
        let v = f(a + d) + f(b - d);
        v * C::new(w, T::zero())
    };
    for (om, w) in tanh_sinh_level(h, false, cutoff) {
        if om == T::one() {
            sum += f(mid) * C::new(w, T::zero());
        } else {
            sum += eval_pair(om, w);
        }
    }
    let mut prev = sum * C::new(h * half, T::zero());
    let mut error = f64::INFINITY;
    for level in 1..=max_levels {
        h *= T::from_f64(0.5);
        for (om, w) in tanh_sinh_level(h, true, cutoff) {
            sum += eval_pair(om, w);
        }
        let cur = sum * C::new(h * half, T::zero());
        error = cabs(cur - prev).to_f64();
        prev = cur;
        if level >= 3 && tol.met(error, cur) {
            return QuadResult { value: cur, error, levels: level };
        }
    }
    QuadResult { value: prev, error, levels: max_levels }
}

/// Integral over `[a, infinity)` of an exponentially decaying `f`, via the
/// map `x = a + exp(pi/2 sinh u)`.
pub fn exp_sinh<T: Real>(f: impl Fn(T) -> C<T>, a: T, tol: QuadTol, max_levels: usize) -> QuadResult<T> {
    let half_pi = T::pi() * T::from_f64(0.5);
    let cutoff = T::epsilon().to_f64() * 1e-3;
    let node = |u: T| -> Option<(T, T)> {
        let e = u.exp();
        let sinh = (e - T::one() / e) * T::from_f64(0.5);
        let cosh = (e + T::one() / e) * T::from_f64(0.5);
        let x = (half_pi * sinh).exp();
        let w = half_pi * cosh * x;
        if !x.to_f64().is_finite() || x.to_f64() > 1e200 {
            return None;
        }
        Some((x, w))
    };
    let sweep = |h: T, odd_only: bool| -> C<T> {
        let mut acc = C::<T>::zero();
        let stride = if odd_only { 2 } else { 1 };
        for dir in [1i64, -1] {
            let mut k = if odd_only { 1 } else if dir == 1 { 0 } else { 1 };
            loop {
                let Some((x, w)) = node(h * T::from_i64(dir * k)) else { break };
                let term = f(a + x) * C::new(w, T::zero());
                acc += term;
                if (cabs(term).to_f64() < cutoff * 1e-30 && dir == 1) || (w.to_f64() < cutoff && dir == -1) {
                    break;
                }
                k += stride;
                if k > 100_000 {
                    break;
                }
            }
        }
        acc
    };
    let mut h = T::one();
    let mut sum = sweep(h, false);
    let mut prev = sum * C::new(h, T::zero());
    let mut error = f64::INFINITY;
    for level in 1..=max_levels {
        h *= T::from_f64(0.5);
        sum += sweep(h, true);
        let cur = sum * C::new(h, T::zero());
        error = cabs(cur - prev).to_f64();
        prev = cur;
        if level >= 3 && tol.met(error, cur) {
            return QuadResult { value: cur, error, levels: level };
        }
    }
    QuadResult { value: prev, error, levels: max_levels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{cexp, cre, Dd};

    #[test]
    fn polynomial_and_endpoint_singularity() {
        let r = tanh_sinh(|x: f64| cre(x * x), 0.0, 3.0, QuadTol::abs(1e-14), 10);
        assert!((r.value.re - 9.0).abs() < 1e-13);
        // integral_0^1 1/sqrt(x) = 2
        let r = tanh_sinh(|x: f64| cre(1.0 / x.sqrt()), 0.0, 1.0, QuadTol::abs(1e-12), 12);
        assert!((r.value.re - 2.0).abs() < 1e-10, "{:?}", r.value);
    }

    #[test]
    fn oscillatory_fourier_transform() {
        // integral sech^2(t/2) e^{i w t} dt = 4 pi w / sinh(pi w), truncated to |t| <= 80
        let w = 3.0;
        let f = |t: Dd| {
            let c = (t * Dd::from_f64(0.5)).exp();
            let sech = Dd::from_f64(2.0) / (c + Dd::from_f64(1.0) / c);
            cexp(C::new(Dd::zero(), Dd::from_f64(w) * t)) * cre(sech * sech)
        };
        let r = tanh_sinh(f, Dd::from_f64(-80.0), Dd::from_f64(80.0), QuadTol::abs(1e-22), 14);
        let exact = 4.0 * std::f64::consts::PI * w / (std::f64::consts::PI * w).sinh();
        assert!((r.value.re.to_f64() - exact).abs() < 1e-14 * exact.max(1e-3), "{} vs {exact}", r.value.re);
        assert!(r.value.im.abs().to_f64() < 1e-20);
    }

    #[test]
    fn half_line() {
        let r = exp_sinh(|x: f64| cre((-x).exp()), 0.0, QuadTol::abs(1e-13), 10);
        assert!((r.value.re - 1.0).abs() < 1e-12);
        let r = exp_sinh(|x: f64| cexp(C::new(-x, 2.0 * x)), 1.0, QuadTol::abs(1e-13), 10);
        let exact = cexp(C::new(-1.0, 2.0)) / C::new(1.0, -2.0);
        assert!((r.value - exact).norm() < 1e-12);
    }
}
