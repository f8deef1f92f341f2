use num_traits::Zero;

use super::PhasePoint;
use crate::error::{Error, Result};
use crate::numeric::{Real, C};

/// Polynomial in `(x1, y1, x2, y2)` with fixed numeric coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoly<T> {
    terms: Vec<([u32; 4], T)>,
}

impl<T: Real> PhasePoly<T> {
    pub fn from_terms(terms: Vec<([u32; 4], T)>) -> Self {
        PhasePoly { terms }
    }

    pub fn terms(&self) -> &[([u32; 4], T)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    fn max_powers(&self) -> [u32; 4] {
        let mut m = [0; 4];
        for (e, _) in &self.terms {
            for k in 0..4 {
                m[k] = m[k].max(e[k]);
            }
        }
        m
    }

    pub fn eval(&self, p: &PhasePoint<T>) -> C<T> {
        let maxp = self.max_powers();
        let powers: Vec<Vec<C<T>>> = (0..4)
            .map(|k| {
                let mut v = Vec::with_capacity(maxp[k] as usize + 1);
                v.push(C::new(T::one(), T::zero()));
                for j in 1..=maxp[k] as usize {
                    let next = v[j - 1] * p[k];
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = C::zero();
        for (e, c) in &self.terms {
            let mut m = C::new(*c, T::zero());
            for k in 0..4 {
                if e[k] > 0 {
                    m *= powers[k][e[k] as usize];
                }
            }
            acc += m;
        }
        acc
    }

    /// Evaluation that reports overflow instead of returning a non-finite value.
    pub fn try_eval(&self, p: &PhasePoint<T>) -> Result<C<T>> {
        let v = self.eval(p);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation("non-finite Hamiltonian value".into()))
        }
    }

    pub fn derivative(&self, var: usize) -> PhasePoly<T> {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[var] > 0)
            .map(|(e, c)| {
                let mut e2 = *e;
                e2[var] -= 1;
                (e2, *c * T::from_f64(e[var] as f64))
            })
            .collect();
        PhasePoly { terms }
    }

    pub fn gradient(&self, p: &PhasePoint<T>) -> PhasePoint<T> {
        std::array::from_fn(|k| self.derivative(k).eval(p))
    }

    pub fn hessian(&self, p: &PhasePoint<T>) -> [[C<T>; 4]; 4] {
        let first: Vec<PhasePoly<T>> = (0..4).map(|k| self.derivative(k)).collect();
        std::array::from_fn(|i| std::array::from_fn(|j| first[i].derivative(j).eval(p)))
    }

    /// Components of `J grad H`, ordered `(x1', y1', x2', y2')`.
    pub fn field_polys(&self) -> [PhasePoly<T>; 4] {
        let neg = |q: PhasePoly<T>| PhasePoly { terms: q.terms.into_iter().map(|(e, c)| (e, -c)).collect() };
        [self.derivative(1), neg(self.derivative(0)), self.derivative(3), neg(self.derivative(2))]
    }

    pub fn vector_field(&self, p: &PhasePoint<T>) -> PhasePoint<T> {
        let g = self.gradient(p);
        [g[1], -g[0], g[3], -g[2]]
    }

    /// The Hamiltonian matrix `J H''` at `p`.
    pub fn hamiltonian_matrix(&self, p: &PhasePoint<T>) -> [[C<T>; 4]; 4] {
        let h = self.hessian(p);
        [h[1], h[0].map(|v| -v), h[3], h[2].map(|v| -v)]
    }
}
