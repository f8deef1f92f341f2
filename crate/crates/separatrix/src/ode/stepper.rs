use num_traits::Zero;

use super::field::PolyField;
use super::{IntegratorConfig, Method};
use crate::error::{Error, Result};
use crate::numeric::{cabs, Real, C};

/// One Taylor step: the local polynomial `sum a_k (t - t0)^k`.
#[derive(Clone, Debug)]
pub struct Step<T> {
    pub coeffs: Vec<Vec<C<T>>>,
}

impl<T: Real> Step<T> {
    /// Evaluate at complex offset `dt` from the step origin.
    pub fn eval(&self, dt: C<T>) -> Vec<C<T>> {
        let n = self.coeffs[0].len();
        let mut acc = vec![C::<T>::zero(); n];
        for a in self.coeffs.iter().rev() {
            for i in 0..n {
                acc[i] = acc[i] * dt + a[i];
            }
        }
        acc
    }

    /// Derivative with respect to time at offset `dt`.
    pub fn eval_derivative(&self, dt: C<T>) -> Vec<C<T>> {
        let n = self.coeffs[0].len();
        let mut acc = vec![C::<T>::zero(); n];
        for (k, a) in self.coeffs.iter().enumerate().skip(1).rev() {
            let kk = C::new(T::from_f64(k as f64), T::zero());
            for i in 0..n {
                acc[i] = acc[i] * dt + a[i] * kk;
            }
        }
        acc
    }
}

pub(super) struct Advance<T> {
    pub length: T,
    pub end: Vec<C<T>>,
}

/// Single-step driver shared by the path integrator and event searches.
pub struct Stepper<'a, T> {
    field: &'a PolyField<T>,
    cfg: &'a IntegratorConfig,
    /// Suggested next step for the extrapolation method.
    next_h: f64,
}

fn max_norm<T: Real>(v: &[C<T>]) -> f64 {
    v.iter().fold(0.0f64, |m, z| m.max(cabs(*z).to_f64()))
}

impl<'a, T: Real> Stepper<'a, T> {
    pub fn new(field: &'a PolyField<T>, cfg: &'a IntegratorConfig) -> Self {
        Stepper { field, cfg, next_h: cfg.max_step.min(0.1) }
    }

    pub fn taylor_order(&self) -> usize {
        let tol = self.cfg.abs_tol.min(self.cfg.rel_tol);
        self.cfg.taylor_order.unwrap_or_else(|| ((-tol.ln() / 2.0).ceil() as usize + 2).clamp(8, 80))
    }

    /// Taylor polynomial at `x` and the step length it supports.
    pub fn taylor(&self, x: &[C<T>]) -> (Step<T>, f64) {
        let order = self.taylor_order();
        let coeffs = self.field.taylor(x, order);
        let tol = self.cfg.abs_tol + self.cfg.rel_tol * max_norm(x);
        let mut h = f64::INFINITY;
        for j in [order - 1, order] {
            let n = max_norm(&coeffs[j]);
            if n > 0.0 {
                h = h.min((tol / n).powf(1.0 / j as f64));
            }
        }
        (Step { coeffs }, h)
    }

    pub(super) fn advance(&mut self, x: &[C<T>], dir: C<T>, remaining: T, t: C<T>) -> Result<Advance<T>> {
        let cap = self.cfg.max_step.min(remaining.to_f64());
        match self.cfg.method {
            Method::Taylor => {
                let (step, h_est) = self.taylor(x);
                let h = match self.cfg.fixed_step {
                    Some(f) => f.min(cap),
                    None => h_est.min(cap),
                };
                self.check_underflow(h, remaining, t)?;
                let length = if h >= remaining.to_f64() { remaining } else { T::from_f64(h) };
                let end = step.eval(dir * C::new(length, T::zero()));
                Ok(Advance { length, end })
            }
            Method::Extrapolation => {
                if let Some(f) = self.cfg.fixed_step {
                    let h = f.min(cap);
                    let length = if h >= remaining.to_f64() { remaining } else { T::from_f64(h) };
                    let (end, _) = self.gbs(x, dir * C::new(length, T::zero()));
                    return Ok(Advance { length, end });
                }
                let tol = self.cfg.abs_tol + self.cfg.rel_tol * max_norm(x);
                let mut h = self.next_h.min(cap);
                // a step cut short by the segment end says nothing about the step size
                let mut clipped = self.next_h > cap;
                loop {
                    self.check_underflow(h, remaining, t)?;
                    let length = if h >= remaining.to_f64() { remaining } else { T::from_f64(h) };
                    let (end, err) = self.gbs(x, dir * C::new(length, T::zero()));
                    let ratio = err / tol;
                    let factor = if ratio > 0.0 { (0.9 * ratio.powf(-1.0 / 7.0)).clamp(0.2, 4.0) } else { 4.0 };
                    if ratio.is_finite() && ratio <= 1.0 {
                        let proposed = (h * factor).min(self.cfg.max_step);
                        self.next_h = if clipped { self.next_h.max(proposed) } else { proposed };
                        return Ok(Advance { length, end });
                    }
                    clipped = false;
                    h *= if ratio.is_finite() { factor.min(0.9) } else { 0.25 };
                }
            }
        }
    }

    fn check_underflow(&self, h: f64, remaining: T, t: C<T>) -> Result<()> {
        if h < self.cfg.min_step && remaining.to_f64() > h {
            return Err(Error::Singularity { re: t.re.to_f64(), im: t.im.to_f64() });
        }
        Ok(())
    }

    /// Modified-midpoint extrapolation over the complex step `big_h`;
    /// returns the order-8 value and the distance to the order-6 column.
    fn gbs(&self, x: &[C<T>], big_h: C<T>) -> (Vec<C<T>>, f64) {
        const SEQ: [usize; 4] = [2, 4, 6, 8];
        let n = x.len();
        let mut table: Vec<Vec<Vec<C<T>>>> = Vec::new();
        for (j, &steps) in SEQ.iter().enumerate() {
            let h = big_h / C::new(T::from_f64(steps as f64), T::zero());
            let two_h = h + h;
            let mut prev = x.to_vec();
            let f0 = self.field.eval(&prev);
            let mut cur: Vec<C<T>> = (0..n).map(|i| prev[i] + h * f0[i]).collect();
            for _ in 1..steps {
                let f = self.field.eval(&cur);
                let next: Vec<C<T>> = (0..n).map(|i| prev[i] + two_h * f[i]).collect();
                prev = cur;
                cur = next;
            }
            let f = self.field.eval(&cur);
            let half = C::new(T::from_f64(0.5), T::zero());
            let first: Vec<C<T>> = (0..n).map(|i| (cur[i] + prev[i] + h * f[i]) * half).collect();
            let mut row = vec![first];
            for k in 1..=j {
                let ratio = (steps as f64) / (SEQ[j - k] as f64);
                let den = C::new(T::from_f64(ratio * ratio - 1.0), T::zero());
                let val: Vec<C<T>> = (0..n)
                    .map(|i| row[k - 1][i] + (row[k - 1][i] - table[j - 1][k - 1][i]) / den)
                    .collect();
                row.push(val);
            }
            table.push(row);
        }
        let last = &table[SEQ.len() - 1];
        let best = last[SEQ.len() - 1].clone();
        let err = best
            .iter()
            .zip(&last[SEQ.len() - 2])
            .fold(0.0f64, |m, (a, b)| m.max(cabs(*a - *b).to_f64()));
        (best, err)
    }
}
