//! Taylor and extrapolation integrators for polynomial fields along
//! piecewise-linear paths in complex time, with co-integrated variational
//! equations.

mod field;
mod path;
mod stepper;

pub use field::PolyField;
pub use path::ComplexPath;
pub use stepper::{Step, Stepper};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hamiltonian::{PhasePoint, PhasePoly, PolyHamiltonian};
use crate::numeric::{cabs, Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Method {
    /// Taylor series of adaptive order from automatic differentiation.
    Taylor,
    /// Gragg-Bulirsch-Stoer extrapolation, order 8 with an order-6 error estimate.
    Extrapolation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub precision_bits: u32,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
    pub method: Method,
    /// State norm treated as escape to infinity.
    pub blowup: f64,
    pub min_step: f64,
    pub max_steps: usize,
    /// Keep every accepted step, not only the path vertices.
    pub record_steps: bool,
    /// Constant step length, disabling step control.
    pub fixed_step: Option<f64>,
    /// Override the Taylor order chosen from the tolerance.
    pub taylor_order: Option<usize>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            precision_bits: 128,
            abs_tol: 1e-30,
            rel_tol: 1e-30,
            max_step: 2.0,
            method: Method::Taylor,
            blowup: 1e6,
            min_step: 1e-12,
            max_steps: 2_000_000,
            record_steps: false,
            fixed_step: None,
            taylor_order: None,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tol(tol: f64) -> Self {
        IntegratorConfig { abs_tol: tol, rel_tol: tol, ..Default::default() }
    }

    /// Reject tolerances below what `bits` of precision can resolve.
    pub fn validate<T: Real>(&self) -> Result<()> {
        if self.precision_bits > T::BITS {
            return Err(Error::Precision(format!(
                "{} bits requested but the working type carries {}",
                self.precision_bits,
                T::BITS
            )));
        }
        let floor = 2f64.powi(16 - self.precision_bits as i32);
        let tol = self.abs_tol.min(self.rel_tol);
        if !(tol > floor) {
            return Err(Error::Precision(format!(
                "tolerance {tol:e} not above 2^(16-{}) = {floor:e}",
                self.precision_bits
            )));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::Precondition("max_step must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Sample<T> {
    pub t: C<T>,
    /// Base state followed by the variational vectors.
    pub state: Vec<C<T>>,
    pub energy: C<T>,
}

impl<T: Real> Sample<T> {
    pub fn point(&self) -> PhasePoint<T> {
        [self.state[0], self.state[1], self.state[2], self.state[3]]
    }

    pub fn variation(&self, k: usize) -> PhasePoint<T> {
        let b = 4 * (k + 1);
        [self.state[b], self.state[b + 1], self.state[b + 2], self.state[b + 3]]
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub samples: Vec<Sample<T>>,
    pub energy_reference: C<T>,
    pub path: ComplexPath<T>,
    pub steps: usize,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &Sample<T> {
        self.samples.last().expect("trajectory has samples")
    }

    pub fn final_point(&self) -> PhasePoint<T> {
        self.last().point()
    }
}

/// `max |H(sample) - H_ref|` over the samples.
pub fn energy_drift<T: Real>(traj: &Trajectory<T>) -> T {
    traj.samples.iter().fold(T::zero(), |m, s| m.max(cabs(s.energy - traj.energy_reference)))
}

/// Integrate a field along a path; `energy` is evaluated on the first four components.
pub fn integrate_field<T: Real>(
    field: &PolyField<T>,
    energy: Option<&PhasePoly<T>>,
    start: Vec<C<T>>,
    path: &ComplexPath<T>,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<T>> {
    cfg.validate::<T>()?;
    let h_of = |x: &[C<T>]| -> C<T> {
        match energy {
            Some(h) => h.eval(&[x[0], x[1], x[2], x[3]]),
            None => C::zero(),
        }
    };
    let mut stepper = Stepper::new(field, cfg);
    let mut x = start;
    let mut t = path.start();
    let reference = h_of(&x);
    let mut samples = vec![Sample { t, state: x.clone(), energy: reference }];
    let mut steps = 0usize;
    for (a, b) in path.segments() {
        let len = cabs(b - a);
        let dir = (b - a) / C::new(len, T::zero());
        let mut done = T::zero();
        while done < len {
            let remaining = len - done;
            let step = stepper.advance(&x, dir, remaining, t)?;
            steps += 1;
            if steps > cfg.max_steps {
                return Err(Error::Unreliable(format!("step budget {} exhausted", cfg.max_steps)));
            }
            done += step.length;
            x = step.end;
            t = if step.length >= remaining { b } else { a + dir * C::new(done, T::zero()) };
            let norm = x.iter().fold(0.0f64, |m, z| m.max(cabs(*z).to_f64()));
            if !norm.is_finite() || norm > cfg.blowup {
                return Err(Error::BlowUp { norm, re: t.re.to_f64(), im: t.im.to_f64() });
            }
            if cfg.record_steps && t != b {
                samples.push(Sample { t, state: x.clone(), energy: h_of(&x) });
            }
        }
        samples.push(Sample { t: b, state: x.clone(), energy: h_of(&x) });
    }
    Ok(Trajectory { samples, energy_reference: reference, path: path.clone(), steps })
}

/// Integrate `x' = J grad H` along `path`.
pub fn integrate_flow<T: Real>(
    h: &PolyHamiltonian,
    mu: T,
    nu: T,
    start: PhasePoint<T>,
    path: &ComplexPath<T>,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<T>> {
    let poly = h.specialize(mu, nu);
    let field = PolyField::hamiltonian(&poly, 0);
    integrate_field(&field, Some(&poly), start.to_vec(), path, cfg)
}

/// Re-run the base trajectory with the linearized flow of each `xi` co-integrated.
pub fn integrate_variational<T: Real>(
    h: &PolyHamiltonian,
    mu: T,
    nu: T,
    base: &Trajectory<T>,
    xi: &[PhasePoint<T>],
    cfg: &IntegratorConfig,
) -> Result<Trajectory<T>> {
    let poly = h.specialize(mu, nu);
    let field = PolyField::hamiltonian(&poly, xi.len());
    let mut start = base.samples[0].point().to_vec();
    for v in xi {
        start.extend_from_slice(v);
    }
    integrate_field(&field, Some(&poly), start, &base.path, cfg)
}

#[cfg(test)]
mod tests;
