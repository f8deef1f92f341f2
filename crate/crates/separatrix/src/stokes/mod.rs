//! Inner problem near the complex singularity of the separatrix and the
//! Stokes constant `b0 = lim Omega(delta0, eta0)` down the imaginary axis.
//!
//! `X0-` and `X0+` are seeded from the formal inner series at `-R - iT_max`
//! and `+R - iT_max`, carried to the imaginary axis and then up through the
//! sampling depths. `eta0` is transported along `X0-`. The pairing samples are
//! extrapolated with the fit `v(T) = b0 + A T^k e^{-r T}` done on successive
//! differences.

mod series;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formal::formal_separatrix;
use crate::hamiltonian::{symplectic_pair, PhasePoint, PhasePoly, PolyHamiltonian};
use crate::manifolds::Side;
use crate::numeric::{cabs, cre, Real, C};
use crate::ode::{energy_drift, integrate_field, ComplexPath, IntegratorConfig, PolyField};

pub use series::{DoubleSeries, InnerSeries, Shape};

#[derive(Clone, Debug)]
pub struct StokesConfig {
    pub integrator: IntegratorConfig,
    /// Highest power of `nu` kept in the inner series.
    pub nu_order: usize,
    /// Highest power of `1/tau` computed.
    pub series_terms: i32,
    /// `|Re tau|` of the two seeds.
    pub tau_match: f64,
    /// Digits wanted in `b0`; sets the default descent depth.
    pub target_digits: f64,
    /// Sampling depths `T` (positive, ascending); derived when unset.
    pub t_list: Option<Vec<f64>>,
    pub t_min: f64,
    pub t_step: f64,
    /// Re-run `X0+-` at half the tolerance to estimate the noise floor.
    pub noise_rerun: bool,
}

impl Default for StokesConfig {
    fn default() -> Self {
        let integrator = IntegratorConfig {
            precision_bits: 106,
            abs_tol: 1e-26,
            rel_tol: 1e-26,
            blowup: 1e40,
            ..IntegratorConfig::default()
        };
        StokesConfig {
            integrator,
            nu_order: 5,
            series_terms: 72,
            tau_match: 30.0,
            target_digits: 2.0,
            t_list: None,
            t_min: 4.0,
            t_step: 1.0,
            noise_rerun: true,
        }
    }
}

impl StokesConfig {
    pub fn with_integrator(mut self, integrator: IntegratorConfig) -> Self {
        self.integrator = integrator;
        self
    }

    /// Sampling depths, checked against the precision headroom of `T`.
    pub fn depths<T: Real>(&self, omega0: f64) -> Result<Vec<f64>> {
        let list = match &self.t_list {
            Some(l) => {
                let mut l = l.clone();
                l.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
                l.dedup();
                l
            }
            None => {
                let deepest = 3.0 * self.target_digits * std::f64::consts::LN_10 / omega0;
                let mut l = Vec::new();
                let mut t = self.t_min;
                while t <= deepest + 1e-12 {
                    l.push(t);
                    t += self.t_step;
                }
                l
            }
        };
        if list.len() < 4 || list[0] <= 0.0 {
            return Err(Error::Precondition("need at least four positive sampling depths".into()));
        }
        let deepest = *list.last().unwrap_or(&0.0);
        let needed = (omega0 * deepest / std::f64::consts::LN_2).ceil() as u32 + 48;
        if needed > T::BITS {
            return Err(Error::Precision(format!(
                "descent to Im tau = -{deepest} needs about {needed} bits, have {}",
                T::BITS
            )));
        }
        Ok(list)
    }
}

/// One inner solution sampled at `tau = -iT` for the sampling depths.
#[derive(Clone, Debug)]
pub struct InnerSolution<T> {
    pub side: Side,
    /// Power of `eps^2` in the inner hierarchy; only the leading one is built.
    pub order: usize,
    pub seed_tau: C<T>,
    pub seed: PhasePoint<T>,
    /// Last index of `1/tau` used in the optimally truncated seed.
    pub truncation: i32,
    /// `|X' - f(X)|` of the truncated series at the seed.
    pub matching_residual: f64,
    pub depths: Vec<f64>,
    pub states: Vec<PhasePoint<T>>,
    pub energy_drift: f64,
}

#[derive(Clone, Debug)]
pub struct EtaSolution<T> {
    pub seed: PhasePoint<T>,
    pub depths: Vec<f64>,
    pub states: Vec<PhasePoint<T>>,
    /// Relative change of `Omega(eta0, partner)` along the path; the partner
    /// starts from the conjugate of the seed.
    pub partner_drift: f64,
    /// `|eta0 - series|` at the seed relative to `|eta0|`.
    pub matching_residual: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct StokesFit {
    /// Exponential rate `r` of `|v(T+1) - v(T)| ~ A T^k e^{-rT}`.
    pub rate: f64,
    pub power: f64,
    /// `ln A`.
    pub amplitude: f64,
    /// Root mean square of the log-space fit.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct StokesResult<T> {
    pub nu: T,
    pub omega0: T,
    /// `(Im tau, Omega(delta0, eta0))` with `Im tau = -T`.
    pub pairing_samples: Vec<(f64, C<T>)>,
    pub b0: C<T>,
    pub fit: Option<StokesFit>,
    /// Largest change of `b0` when the shallowest or deepest sample is dropped.
    pub sensitivity: f64,
    /// Change of the samples under the halved-tolerance rerun.
    pub noise: f64,
    /// `b0` is at the noise floor and only bounds the constant.
    pub upper_bound: bool,
    pub reliable: bool,
    /// `b0, b1`; `b1` is present only when its hierarchy terms vanish.
    pub bn: Vec<C<T>>,
    /// `a_n = 1/2 sum b_k conj(b_{n-k})` for the available `b_n`.
    pub an: Vec<T>,
    pub delta_norms: Vec<f64>,
    pub eta_norms: Vec<f64>,
    pub series_resonance: f64,
    pub series_solvability: f64,
    pub matching_residual: f64,
    pub eta_partner_drift: f64,
}

/// `H0`: the model with `mu = 0`, in the original variables.
pub fn inner_hamiltonian(h: &PolyHamiltonian) -> PolyHamiltonian {
    h.at_mu_zero()
}

/// Build the double series for `H0` and the working `nu`.
pub fn inner_series<T: Real>(h0: &PolyHamiltonian, nu: T, cfg: &StokesConfig) -> Result<InnerSeries<T>> {
    let lo = -2 * (cfg.nu_order as i32) - 2;
    if cfg.nu_order > 5 {
        return Err(Error::Precondition("nu order above 5 meets the resonance at tau^4".into()));
    }
    InnerSeries::solve(h0, nu, Shape { lo, hi: cfg.series_terms, nu_order: cfg.nu_order })
}

fn seed_tau<T: Real>(side: Side, cfg: &StokesConfig, deepest: f64) -> C<T> {
    let re = match side {
        Side::Unstable => -cfg.tau_match,
        Side::Stable => cfg.tau_match,
    };
    C::new(T::from_f64(re), T::from_f64(-deepest))
}

fn descent_path<T: Real>(seed: C<T>, depths: &[f64]) -> Result<ComplexPath<T>> {
    let mut v = vec![seed];
    for t in depths.iter().rev() {
        v.push(C::new(T::zero(), T::from_f64(-t)));
    }
    ComplexPath::new(v)
}

fn norm<T: Real>(p: &PhasePoint<T>) -> f64 {
    p.iter().fold(0.0f64, |m, z| m.max(cabs(*z).to_f64()))
}

fn trace<T: Real>(
    series: &InnerSeries<T>,
    poly: &PhasePoly<T>,
    side: Side,
    depths: &[f64],
    cfg: &StokesConfig,
    integrator: &IntegratorConfig,
    with_eta: bool,
) -> Result<(InnerSolution<T>, Option<EtaSolution<T>>)> {
    let tau = seed_tau::<T>(side, cfg, *depths.last().unwrap_or(&0.0));
    let (x, truncation) = series.eval_x(tau);
    let dx = series.eval_x_derivative_to(tau, truncation);
    let f = poly.vector_field(&x);
    let matching_residual = (0..4).fold(0.0f64, |m, k| m.max(cabs(dx[k] - f[k]).to_f64()));
    let path = descent_path(tau, depths)?;
    let mut start = x.to_vec();
    let mut eta_seed = None;
    if with_eta {
        let (eta, _) = series.eval_eta(tau);
        start.extend_from_slice(&eta);
        start.extend(eta.iter().map(|c| c.conj()));
        eta_seed = Some(eta);
    }
    let field = PolyField::hamiltonian(poly, if with_eta { 2 } else { 0 });
    let run = integrate_field(&field, Some(poly), start, &path, integrator)?;
    // samples: seed, then the depths from the deepest up
    let mut states: Vec<PhasePoint<T>> = run.samples[1..].iter().rev().map(|s| s.point()).collect();
    states.truncate(depths.len());
    let inner = InnerSolution {
        side,
        order: 0,
        seed_tau: tau,
        seed: x,
        truncation,
        matching_residual,
        depths: depths.to_vec(),
        states,
        energy_drift: energy_drift(&run).to_f64(),
    };
    let eta = eta_seed.map(|seed| {
        let first = &run.samples[0];
        let reference = symplectic_pair(&first.variation(0), &first.variation(1));
        let partner_drift = run.samples.iter().fold(0.0f64, |m, s| {
            let v = symplectic_pair(&s.variation(0), &s.variation(1));
            m.max((cabs(v - reference) / cabs(reference)).to_f64())
        });
        // the series at the deepest sample, against the integrated value
        let deep = C::new(T::zero(), T::from_f64(-depths.last().copied().unwrap_or(0.0)));
        let (eta_series, _) = series.eval_eta(deep);
        let got = run.samples[1].variation(0);
        let matching_residual = norm(&std::array::from_fn(|k| got[k] - eta_series[k])) / norm(&got);
        EtaSolution {
            seed,
            depths: depths.to_vec(),
            states: run.samples[1..].iter().rev().map(|s| s.variation(0)).take(depths.len()).collect(),
            partner_drift,
            matching_residual,
        }
    });
    Ok((inner, eta))
}

/// `X0` on one side, from its seed down to the sampling depths.
pub fn solve_inner<T: Real>(
    h0: &PolyHamiltonian,
    nu: T,
    side: Side,
    series: &InnerSeries<T>,
    cfg: &StokesConfig,
) -> Result<InnerSolution<T>> {
    let depths = cfg.depths::<T>(series.omega0.to_f64())?;
    let poly = h0.specialize(T::zero(), nu);
    trace(series, &poly, side, &depths, cfg, &cfg.integrator, false).map(|r| r.0)
}

/// `eta0` transported along `X0-`, with `X0-` itself.
pub fn solve_eta0<T: Real>(
    h0: &PolyHamiltonian,
    nu: T,
    series: &InnerSeries<T>,
    cfg: &StokesConfig,
) -> Result<(InnerSolution<T>, EtaSolution<T>)> {
    let depths = cfg.depths::<T>(series.omega0.to_f64())?;
    let poly = h0.specialize(T::zero(), nu);
    let (x, eta) = trace(series, &poly, Side::Unstable, &depths, cfg, &cfg.integrator, true)?;
    Ok((x, eta.expect("eta requested")))
}

/// Least squares for `ln|d| = c + k ln T - r T`.
pub fn fit_differences(depths: &[f64], diffs: &[f64]) -> Option<StokesFit> {
    let pts: Vec<(f64, f64)> =
        depths.iter().zip(diffs).filter(|(_, d)| **d > 0.0 && d.is_finite()).map(|(t, d)| (*t, d.ln())).collect();
    if pts.len() < 3 || pts.len() < diffs.len() {
        return None;
    }
    let rows: Vec<[f64; 3]> = pts.iter().map(|(t, _)| [1.0, t.ln(), -t]).collect();
    let mut m = vec![vec![C::<f64>::zero(); 3]; 3];
    let mut rhs = vec![C::<f64>::zero(); 3];
    for (row, (_, y)) in rows.iter().zip(&pts) {
        for a in 0..3 {
            for b in 0..3 {
                m[a][b] += cre(row[a] * row[b]);
            }
            rhs[a] += cre(row[a] * y);
        }
    }
    let sol = crate::numeric::linalg::solve(m, rhs)?;
    let (c, k, r) = (sol[0].re, sol[1].re, sol[2].re);
    let ss: f64 = rows.iter().zip(&pts).map(|(row, (_, y))| (c + k * row[1] + r * row[2] - y).powi(2)).sum();
    Some(StokesFit { rate: r, power: k, amplitude: c, residual: (ss / pts.len() as f64).sqrt() })
}

/// Extrapolate ascending-depth samples to `T -> infinity`.
fn extrapolate<T: Real>(depths: &[f64], values: &[C<T>]) -> (C<T>, Option<StokesFit>) {
    let n = values.len();
    let last = values[n - 1];
    let diffs: Vec<C<T>> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let sizes: Vec<f64> = diffs.iter().map(|d| cabs(*d).to_f64()).collect();
    let Some(fit) = fit_differences(&depths[..n - 1], &sizes) else {
        return (last, None);
    };
    if !(fit.rate > 0.0) {
        return (last, Some(fit));
    }
    // the remaining increments continue the last one with the fitted decay
    let t0 = depths[n - 2];
    let step = depths[n - 1] - depths[n - 2];
    let d_last = diffs[n - 2];
    let mut tail = C::<T>::zero();
    for m in 1..100_000 {
        let w = ((t0 + m as f64 * step) / t0).powf(fit.power) * (-fit.rate * m as f64 * step).exp();
        if !w.is_finite() {
            break;
        }
        tail += d_last * cre(T::from_f64(w));
        if w < 1e-40 {
            break;
        }
    }
    (last + tail, Some(fit))
}

fn pairing_samples<T: Real>(plus: &InnerSolution<T>, minus: &InnerSolution<T>, eta: &EtaSolution<T>) -> Vec<C<T>> {
    (0..eta.states.len())
        .map(|k| {
            let delta: PhasePoint<T> = std::array::from_fn(|i| plus.states[k][i] - minus.states[k][i]);
            symplectic_pair(&delta, &eta.states[k])
        })
        .collect()
}

/// `a_n = 1/2 sum_{k=0}^n b_k conj(b_{n-k})`, real by symmetry.
pub fn assemble_an<T: Real>(bn: &[C<T>]) -> Vec<T> {
    (0..bn.len())
        .map(|n| {
            let s = (0..=n).fold(C::<T>::zero(), |acc, k| acc + bn[k] * bn[n - k].conj());
            s.re * T::from_f64(0.5)
        })
        .collect()
}

/// Extrapolate `b0` from the two inner solutions and `eta0`; `noise` is the
/// separately estimated integration noise on the samples.
pub fn stokes_b0<T: Real>(
    plus: &InnerSolution<T>,
    minus: &InnerSolution<T>,
    eta: &EtaSolution<T>,
    nu: T,
    omega0: T,
    noise: f64,
) -> Result<StokesResult<T>> {
    if plus.depths != eta.depths || minus.depths != eta.depths {
        return Err(Error::Precondition("inner and eta solutions sampled at different depths".into()));
    }
    let depths = &eta.depths;
    let values = pairing_samples(plus, minus, eta);
    let (b0, fit) = extrapolate(depths, &values);
    let drop_first = extrapolate(&depths[1..], &values[1..]).0;
    let drop_last = extrapolate(&depths[..depths.len() - 1], &values[..values.len() - 1]).0;
    let sensitivity = cabs(drop_first - b0).to_f64().max(cabs(drop_last - b0).to_f64());
    let sizes: Vec<f64> = values.windows(2).map(|w| cabs(w[1] - w[0]).to_f64()).collect();
    let monotone = sizes.windows(2).all(|w| w[1] < w[0]);
    let size = cabs(b0).to_f64();
    let upper_bound = size <= 1e3 * noise;
    let reliable = upper_bound
        || (monotone
            && fit.is_some_and(|f| f.residual < 0.5 && (f.rate / omega0.to_f64() - 1.0).abs() < 0.5)
            && sensitivity <= 1e-2 * size);
    let delta_norms = (0..depths.len())
        .map(|k| norm(&std::array::from_fn(|i| plus.states[k][i] - minus.states[k][i])))
        .collect();
    let eta_norms = eta.states.iter().map(norm).collect();
    let bn = vec![b0];
    let an = assemble_an(&bn);
    Ok(StokesResult {
        nu,
        omega0,
        pairing_samples: depths.iter().zip(&values).map(|(t, v)| (-t, *v)).collect(),
        b0,
        fit,
        sensitivity,
        noise,
        upper_bound,
        reliable,
        bn,
        an,
        delta_norms,
        eta_norms,
        series_resonance: 0.0,
        series_solvability: 0.0,
        matching_residual: plus.matching_residual.max(minus.matching_residual),
        eta_partner_drift: eta.partner_drift,
    })
}

/// `b1` vanishes when the `eps^2` layer of the inner hierarchy is empty:
/// with no `mu` at order `eps^2` the first correction of both `X0` and `eta0`
/// is identically zero. Otherwise the hierarchy is not built.
pub fn stokes_b1<T: Real>(h: &PolyHamiltonian) -> Result<C<T>> {
    let sep = formal_separatrix(&h.potential_coeffs(), 2)?;
    if sep.mu.get(1).is_none_or(num_traits::Zero::is_zero) {
        Ok(C::zero())
    } else {
        Err(Error::Precondition("first inner correction is nonzero; b1 needs the forced hierarchy".into()))
    }
}

/// Full pipeline: series, both inner solutions, `eta0`, noise rerun, fit, `a_n`.
pub fn stokes<T: Real>(h: &PolyHamiltonian, nu: T, cfg: &StokesConfig) -> Result<StokesResult<T>> {
    let h0 = inner_hamiltonian(h);
    let series = inner_series(&h0, nu, cfg)?;
    let depths = cfg.depths::<T>(series.omega0.to_f64())?;
    let poly = h0.specialize(T::zero(), nu);
    let integrator = &cfg.integrator;
    let (minus, plus) = crate::sweep::join(
        || trace(&series, &poly, Side::Unstable, &depths, cfg, integrator, true),
        || trace(&series, &poly, Side::Stable, &depths, cfg, integrator, false),
    );
    let (minus, eta) = minus?;
    let eta = eta.expect("eta requested");
    let plus = plus?.0;
    let mut noise = 0.0;
    if cfg.noise_rerun && !nu.is_zero() {
        let fine = IntegratorConfig { abs_tol: integrator.abs_tol * 0.5, rel_tol: integrator.rel_tol * 0.5, ..integrator.clone() };
        let (m2, p2) = crate::sweep::join(
            || trace(&series, &poly, Side::Unstable, &depths, cfg, &fine, false),
            || trace(&series, &poly, Side::Stable, &depths, cfg, &fine, false),
        );
        let (m2, p2) = (m2?.0, p2?.0);
        let a = pairing_samples(&plus, &minus, &eta);
        let b = pairing_samples(&p2, &m2, &eta);
        noise = a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max(cabs(*x - *y).to_f64()));
    }
    let mut result = stokes_b0(&plus, &minus, &eta, nu, series.omega0, noise)?;
    result.series_resonance = series.resonance;
    result.series_solvability = series.solvability;
    if let Ok(b1) = stokes_b1::<T>(h) {
        result.bn.push(b1);
        result.an = assemble_an(&result.bn);
    }
    Ok(result)
}

#[cfg(test)]
mod tests;
