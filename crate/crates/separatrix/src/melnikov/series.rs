use num_traits::Zero;

use crate::numeric::{Real, C};

/// Truncated numeric Laurent series `sum c[i] sigma^{low + i}`, keeping
/// powers up to `high`.
#[derive(Clone, Debug)]
pub(super) struct Series<T> {
    pub low: i32,
    pub c: Vec<C<T>>,
    pub high: i32,
}

impl<T: Real> Series<T> {
    pub fn constant(v: C<T>, high: i32) -> Self {
        Series { low: 0, c: vec![v], high }.trimmed()
    }

    pub fn get(&self, p: i32) -> C<T> {
        if p < self.low {
            return C::zero();
        }
        self.c.get((p - self.low) as usize).copied().unwrap_or_else(C::zero)
    }

    fn trimmed(mut self) -> Self {
        let keep = (self.high - self.low + 1).max(0) as usize;
        self.c.truncate(keep);
        self
    }

    pub fn add(&self, o: &Series<T>) -> Series<T> {
        let low = self.low.min(o.low);
        let top = (self.low + self.c.len() as i32).max(o.low + o.c.len() as i32);
        let c = (low..top).map(|p| self.get(p) + o.get(p)).collect();
        Series { low, c, high: self.high.min(o.high) }.trimmed()
    }

    pub fn scale(&self, k: C<T>) -> Series<T> {
        Series { low: self.low, c: self.c.iter().map(|v| *v * k).collect(), high: self.high }
    }

    pub fn mul(&self, o: &Series<T>) -> Series<T> {
        let low = self.low + o.low;
        let high = self.high.min(o.high);
        let len = (high - low + 1).max(0) as usize;
        let mut c = vec![C::<T>::zero(); len];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                c[i + j] += *a * *b;
            }
        }
        Series { low, c, high }
    }

    pub fn derivative(&self) -> Series<T> {
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(i, v)| *v * C::new(T::from_f64((self.low + i as i32) as f64), T::zero()))
            .collect();
        Series { low: self.low - 1, c, high: self.high - 1 }.trimmed()
    }

    /// Residue of `exp(k sigma) * self` at `sigma = 0`.
    pub fn residue_with_exp(&self, k: C<T>) -> C<T> {
        let mut acc = C::<T>::zero();
        let mut factor = C::new(T::one(), T::zero());
        let mut j = 0i32;
        while -1 - j >= self.low {
            acc += self.get(-1 - j) * factor;
            j += 1;
            factor = factor * k / C::new(T::from_f64(j as f64), T::zero());
        }
        acc
    }
}
