//! Stable and unstable separatrix solutions, the variational basis along the
//! unstable one, and the splitting measured on the section `y1 = 0`.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formal::{formal_separatrix, FormalSeparatrix};
use crate::hamiltonian::{
    default_guess, find_equilibrium, symplectic_pair, EquilibriumData, PhasePoint, PhasePoly, PolyHamiltonian,
};
use crate::numeric::linalg::solve;
use crate::numeric::{cabs, cexp, cre, Real, C};
use crate::ode::{integrate_field, ComplexPath, IntegratorConfig, PolyField, Sample, Stepper, Trajectory};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Stable,
    Unstable,
}

impl Side {
    /// Direction of integration from the seed towards the section.
    fn direction<T: Real>(self) -> T {
        match self {
            Side::Unstable => T::one(),
            Side::Stable => -T::one(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ManifoldConfig {
    pub integrator: IntegratorConfig,
    /// Distance of the seed from the equilibrium along the eigenvector.
    pub offset: f64,
    /// Seeding time; derived from `offset` and the formal tail when unset,
    /// otherwise the offset is derived from it.
    pub t_seed: Option<f64>,
    /// Truncation order of the formal separatrix behind the seed cross-check.
    pub series_order: usize,
    /// Sample points on each half of the theta drift window.
    pub window_points: usize,
    /// Relative seed disagreement above which the seed is refused.
    pub max_seed_mismatch: f64,
    /// Section search gives up after this multiple of the seeding time.
    pub search_factor: f64,
}

impl Default for ManifoldConfig {
    fn default() -> Self {
        ManifoldConfig {
            integrator: IntegratorConfig::default(),
            offset: 1e-10,
            t_seed: None,
            series_order: 6,
            window_points: 8,
            max_seed_mismatch: 1e-2,
            search_factor: 3.0,
        }
    }
}

impl ManifoldConfig {
    pub fn with_integrator(integrator: IntegratorConfig) -> Self {
        ManifoldConfig { integrator, ..Default::default() }
    }
}

#[derive(Clone, Debug)]
pub struct Seed<T> {
    pub state: PhasePoint<T>,
    pub t_seed: T,
    pub offset: T,
    /// Distance to the formal-series point at the same time, relative to the offset.
    pub mismatch: f64,
}

#[derive(Clone, Debug)]
pub struct SeparatrixSolution<T> {
    pub side: Side,
    /// Time of the seed relative to the section crossing; negative on the unstable side.
    pub seed_time: T,
    pub seed_state: PhasePoint<T>,
    /// State at `t = 0`: the section crossing, shifted along the flow on the stable side.
    pub origin_state: PhasePoint<T>,
    /// `|y1|` at the refined crossing.
    pub section_residual: T,
    pub seed_mismatch: f64,
    /// Shift applied to the stable origin to remove the tangential splitting component.
    pub time_shift: T,
    /// `max |H - H(seed)|` along the run.
    pub energy_drift: T,
    /// Seed-to-section samples, in integration order.
    pub trajectory: Trajectory<T>,
}

#[derive(Clone, Debug)]
pub struct VariationalBasis<T> {
    /// `xi1..xi4` at `t = 0`.
    pub xi: [PhasePoint<T>; 4],
    /// Base point the basis is attached to, from the transport run.
    pub base: PhasePoint<T>,
    /// Pairings of the real basis `(Re xi2, Im xi2, xi3, xi4)` in the order
    /// `(1,2) (1,3) (1,4) (2,3) (2,4) (3,4)`.
    pub pairings: [T; 6],
    /// Condition number of the linear solve fixing `xi4`.
    pub condition: f64,
    pub energy_drift: T,
}

/// Pairings of a normalized real basis.
pub const PAIRING_TARGET: [f64; 6] = [1.0, 0.0, 0.0, 0.0, 0.0, 1.0];

impl<T: Real> VariationalBasis<T> {
    pub fn real_basis(&self) -> [PhasePoint<T>; 4] {
        let re = self.xi[1].map(|z| cre(z.re));
        let im = self.xi[1].map(|z| cre(z.im));
        [re, im, self.xi[2], self.xi[3]]
    }

    pub fn normalization_error(&self) -> T {
        pairing_error(&self.pairings)
    }
}

fn six_pairings<T: Real>(b: &[PhasePoint<T>; 4]) -> [T; 6] {
    let p = |i: usize, j: usize| symplectic_pair(&b[i], &b[j]).re;
    [p(0, 1), p(0, 2), p(0, 3), p(1, 2), p(1, 3), p(2, 3)]
}

fn pairing_error<T: Real>(p: &[T; 6]) -> T {
    p.iter().zip(PAIRING_TARGET).fold(T::zero(), |m, (v, t)| m.max((*v - T::from_f64(t)).abs()))
}

#[derive(Clone, Debug)]
pub struct SplittingMeasurement<T> {
    pub mu: T,
    pub nu: T,
    pub lambda: T,
    pub omega: T,
    pub delta0: PhasePoint<T>,
    pub theta: [C<T>; 4],
    pub e_e1: T,
    /// Error bar on `e_e1`: integration noise plus the `O(|delta|^2)` left out
    /// of the linear projection, both carried through `4 |theta1| dtheta`.
    pub e_e1_error: T,
    pub delta_norm: T,
    /// `max |theta1(t) - theta1(0)|` over `|t| <= 1/lambda`.
    pub theta1_drift: T,
    pub energy_drift: T,
    /// `|H(x+(0)) - H(x-(0))|`.
    pub energy_mismatch: T,
    /// Integration noise level; `e_e1` below `1e3 noise^2` is only an upper bound.
    pub noise: T,
    pub upper_bound: bool,
    pub time_shift: T,
    pub t_seed: T,
    pub seed_mismatch: f64,
    pub section_residual: T,
}

impl<T: Real> SplittingMeasurement<T> {
    /// `ln E + 2 pi omega/lambda`, which tends to `ln a0` in the limit.
    pub fn scaled_log(&self) -> f64 {
        self.e_e1.ln().to_f64() + (T::pi() * T::from_f64(2.0) * self.omega / self.lambda).to_f64()
    }
}

#[derive(Clone, Debug)]
pub struct SplitRun<T> {
    pub equilibrium: EquilibriumData<T>,
    pub eps: T,
    pub unstable: SeparatrixSolution<T>,
    pub stable: SeparatrixSolution<T>,
    pub basis: VariationalBasis<T>,
    pub measurement: SplittingMeasurement<T>,
}

/// Formal separatrix of the integrable potential and its `eps` at this `mu`.
pub fn formal_context<T: Real>(h: &PolyHamiltonian, mu: T, order: usize) -> Result<(FormalSeparatrix, T)> {
    let sep = formal_separatrix(&h.potential_coeffs(), order)?;
    let eps = sep.eps_for_mu(mu, order + 1)?;
    Ok((sep, eps))
}

/// `(x1 - x1(saddle), y1)` on the formal separatrix at time `t`, apex at `t = 0`.
fn formal_displacement<T: Real>(sep: &FormalSeparatrix, eps: T, t: T, order: usize) -> [T; 2] {
    let s = cre(eps * t);
    let [x, xs, _] = sep.x_and_derivatives(eps, s, order);
    let saddle = sep.x_at_profile(eps, T::zero(), order);
    [x.re - saddle, eps * xs.re]
}

/// Seed `p + offset w` on the linear manifold of `side`, cross-checked against
/// the formal separatrix at time `-T_seed` (`+T_seed` on the stable side).
pub fn seed_separatrix<T: Real>(
    h: &PolyHamiltonian,
    mu: T,
    eq: &EquilibriumData<T>,
    side: Side,
    t_seed: Option<T>,
    offset: T,
    order: usize,
) -> Result<Seed<T>> {
    let (sep, eps) = formal_context(h, mu, order)?;
    let w = match side {
        Side::Unstable => eq.w_unstable,
        Side::Stable => eq.w_stable,
    };
    let tail = sep.tail_amplitude(eps, order);
    if !(w[0].abs() > T::zero()) || !(tail > T::zero()) {
        return Err(Error::Precondition("the eigenvector has no x1 component to match the formal tail".into()));
    }
    let (t_seed, offset) = match t_seed {
        Some(t) => {
            if !(t > T::zero()) {
                return Err(Error::Precondition("T_seed must be positive".into()));
            }
            let d = formal_displacement(&sep, eps, -t, order);
            (t, d[0] / w[0].abs())
        }
        None => {
            if !(offset > T::zero()) {
                return Err(Error::Precondition("offset must be positive".into()));
            }
            let ratio = tail / (offset * w[0].abs());
            if !(ratio > T::one()) {
                return Err(Error::OffsetTooLarge(ratio.to_f64()));
            }
            (ratio.ln() / eps, offset)
        }
    };
    let t_formal = -t_seed * side.direction::<T>();
    let formal = formal_displacement(&sep, eps, t_formal, order);
    let seed = [w[0] * offset, w[1] * offset];
    let gap = ((formal[0] - seed[0]).powi(2) + (formal[1] - seed[1]).powi(2)).sqrt();
    let mismatch = (gap / offset).to_f64();
    let mut state = eq.point();
    for k in 0..4 {
        state[k] += cre(w[k] * offset);
    }
    Ok(Seed { state, t_seed, offset, mismatch })
}

fn check_mismatch(seed: &Seed<impl Real>, cfg: &ManifoldConfig) -> Result<()> {
    if !(seed.mismatch <= cfg.max_seed_mismatch) {
        return Err(Error::OffsetTooLarge(seed.mismatch));
    }
    Ok(())
}

struct Crossing<T> {
    elapsed: T,
    state: Vec<C<T>>,
    residual: T,
    samples: Vec<Sample<T>>,
    steps: usize,
}

/// Integrate in chunks until `y1` changes sign with `x1` inside `window`,
/// then refine the crossing time by Newton on the local Taylor polynomial.
fn section_search<T: Real>(
    field: &PolyField<T>,
    poly: &PhasePoly<T>,
    start: Vec<C<T>>,
    dir: T,
    limit: T,
    window: (T, T),
    cfg: &IntegratorConfig,
) -> Result<Crossing<T>> {
    let rec = IntegratorConfig { record_steps: true, ..cfg.clone() };
    let chunk = limit / T::from_f64(12.0);
    let in_window = |s: &Sample<T>| (s.state[0].re - window.0).abs() < window.1;
    let mut elapsed = T::zero();
    let mut x = start;
    let mut samples: Vec<Sample<T>> = Vec::new();
    let mut steps = 0;
    while elapsed < limit {
        let path = ComplexPath::real(dir * elapsed, dir * (elapsed + chunk))?;
        let traj = integrate_field(field, Some(poly), x, &path, &rec)?;
        steps += traj.steps;
        for (i, pair) in traj.samples.windows(2).enumerate() {
            let (a, b) = (&pair[0], &pair[1]);
            let (ya, yb) = (a.state[1].re, b.state[1].re);
            let sign_change = yb.is_zero() || (ya > T::zero()) != (yb > T::zero());
            if !sign_change || !(in_window(a) || in_window(b)) {
                continue;
            }
            let stepper = Stepper::new(field, &rec);
            let (step, _) = stepper.taylor(&a.state);
            let len = (b.t.re - a.t.re).abs();
            let mut s = if ya == yb { len } else { len * ya / (ya - yb) };
            let at = |s: T| C::new(dir * s, T::zero());
            for _ in 0..60 {
                let y = step.eval(at(s))[1].re;
                let dy = step.eval_derivative(at(s))[1].re * dir;
                if dy.is_zero() {
                    break;
                }
                let ds = y / dy;
                s -= ds;
                if ds.abs() <= T::epsilon() * (T::one() + s.abs()) * T::from_f64(4.0) {
                    break;
                }
            }
            let state = step.eval(at(s));
            let residual = state[1].re.abs();
            let t_cross = a.t.re.abs() + s;
            samples.extend(traj.samples[..=i].iter().cloned());
            return Ok(Crossing { elapsed: t_cross, state, residual, samples, steps });
        }
        elapsed += chunk;
        x = traj.last().state.clone();
        let keep = traj.samples.len() - 1;
        samples.extend(traj.samples.into_iter().take(keep));
    }
    Err(Error::NoCrossing(format!("y1 kept its sign for {} time units", limit.to_f64())))
}

/// Formal apex and the window around it in which a crossing counts as primary.
fn crossing_window<T: Real>(h: &PolyHamiltonian, mu: T, eq: &EquilibriumData<T>, order: usize) -> Result<(T, T)> {
    let (sep, eps) = formal_context(h, mu, order)?;
    let saddle = sep.x_at_profile(eps, T::zero(), order);
    let apex = sep.x_at_profile(eps, T::one(), order);
    let amplitude = (apex - saddle).abs();
    // the formal apex sits amplitude above the actual saddle
    Ok((eq.location[0] + (apex - saddle), amplitude * T::from_f64(0.5)))
}

fn max_energy_gap<T: Real>(poly: &PhasePoly<T>, reference: C<T>, samples: &[Sample<T>]) -> T {
    samples.iter().fold(T::zero(), |m, s| m.max(cabs(poly.eval(&s.point()) - reference)))
}

/// Seed on `side` and flow to the primary crossing of `y1 = 0`.
pub fn trace_separatrix<T: Real>(
    h: &PolyHamiltonian,
    mu: T,
    nu: T,
    eq: &EquilibriumData<T>,
    side: Side,
    cfg: &ManifoldConfig,
) -> Result<SeparatrixSolution<T>> {
    let seed = seed_separatrix(
        h,
        mu,
        eq,
        side,
        cfg.t_seed.map(T::from_f64),
        T::from_f64(cfg.offset),
        cfg.series_order,
    )?;
    check_mismatch(&seed, cfg)?;
    let poly = h.specialize(mu, nu);
    let field = PolyField::hamiltonian(&poly, 0);
    let window = crossing_window(h, mu, eq, cfg.series_order)?;
    let dir = side.direction::<T>();
    let limit = seed.t_seed * T::from_f64(cfg.search_factor);
    let found = section_search(&field, &poly, seed.state.to_vec(), dir, limit, window, &cfg.integrator)?;
    let reference = poly.eval(&seed.state);
    let mut samples = found.samples;
    let origin_state: PhasePoint<T> = [found.state[0], found.state[1], found.state[2], found.state[3]];
    samples.push(Sample { t: cre(dir * found.elapsed), state: found.state.clone(), energy: poly.eval(&origin_state) });
    let drift = max_energy_gap(&poly, reference, &samples);
    // shift times so the crossing sits at t = 0
    let offset = cre(dir * found.elapsed);
    for s in &mut samples {
        s.t -= offset;
    }
    let seed_time = -dir * found.elapsed;
    let path = ComplexPath::real(seed_time, T::zero())?;
    let trajectory = Trajectory { samples, energy_reference: reference, path, steps: found.steps };
    let tol = T::from_f64(cfg.integrator.abs_tol.max(cfg.integrator.rel_tol)).max(T::epsilon()) * T::from_f64(1e6);
    if !(found.residual <= tol) {
        return Err(Error::NewtonFailed { residual: found.residual.to_f64() });
    }
    Ok(SeparatrixSolution {
        side,
        seed_time,
        seed_state: seed.state,
        origin_state,
        section_residual: found.residual,
        seed_mismatch: seed.mismatch,
        time_shift: T::zero(),
        energy_drift: drift,
        trajectory,
    })
}

/// Row `u -> Omega(u, .)` of the pairing as a linear functional.
fn pairing_row<T: Real>(u: &PhasePoint<T>) -> Vec<C<T>> {
    vec![-u[1], u[0], -u[3], u[2]]
}

fn inf_norm<T: Real>(m: &[Vec<C<T>>]) -> f64 {
    m.iter().map(|r| r.iter().map(|v| cabs(*v).to_f64()).sum::<f64>()).fold(0.0, f64::max)
}

/// `xi4` with `Omega(xi1, xi4) = Omega(xi2, xi4) = 0`, `Omega(xi3, xi4) = 1`
/// and `xi3 . xi4 = 0`, plus the condition number of that system.
fn complete_basis<T: Real>(xi1: &PhasePoint<T>, xi2: &PhasePoint<T>, xi3: &PhasePoint<T>) -> Result<(PhasePoint<T>, f64)> {
    let m = vec![pairing_row(xi1), pairing_row(xi2), pairing_row(xi3), xi3.to_vec()];
    let mut inverse = vec![vec![C::<T>::zero(); 4]; 4];
    for j in 0..4 {
        let mut e = vec![C::<T>::zero(); 4];
        e[j] = cre(T::one());
        let col = solve(m.clone(), e).ok_or(Error::IllConditioned(f64::INFINITY))?;
        for i in 0..4 {
            inverse[i][j] = col[i];
        }
    }
    let condition = inf_norm(&m) * inf_norm(&inverse);
    if !(condition < 1e12) {
        return Err(Error::IllConditioned(condition));
    }
    // the solution is real since xi1 = conj xi2
    let xi4 = [0, 1, 2, 3].map(|i| cre(inverse[i][2].re));
    Ok((xi4, condition))
}

/// Transport `xi2 = e^{i omega t} v` and its conjugate from the seed of the
/// unstable solution to `t = 0` and complete the basis there.
pub fn build_variational_basis<T: Real>(
    h: &PolyHamiltonian,
    mu: T,
    nu: T,
    x_minus: &SeparatrixSolution<T>,
    eq: &EquilibriumData<T>,
    cfg: &ManifoldConfig,
) -> Result<VariationalBasis<T>> {
    if x_minus.side != Side::Unstable {
        return Err(Error::Precondition("the basis is built along the unstable solution".into()));
    }
    let poly = h.specialize(mu, nu);
    let field = PolyField::hamiltonian(&poly, 2);
    let phase = cexp(C::new(T::zero(), eq.omega * x_minus.seed_time));
    let xi2: PhasePoint<T> = eq.v.map(|c| c * phase);
    let xi1: PhasePoint<T> = xi2.map(|c| c.conj());
    let mut start = x_minus.seed_state.to_vec();
    start.extend_from_slice(&xi1);
    start.extend_from_slice(&xi2);
    let path = ComplexPath::real(x_minus.seed_time, T::zero())?;
    let run = integrate_field(&field, Some(&poly), start, &path, &cfg.integrator)?;
    let end = run.last();
    let xi1 = end.variation(0);
    let xi2 = end.variation(1);
    let xi3 = poly.vector_field(&x_minus.origin_state);
    let (xi4, condition) = complete_basis(&xi1, &xi2, &xi3)?;
    let mut basis = VariationalBasis {
        xi: [xi1, xi2, xi3, xi4],
        base: end.point(),
        pairings: [T::zero(); 6],
        condition,
        energy_drift: crate::ode::energy_drift(&run),
    };
    basis.pairings = six_pairings(&basis.real_basis());
    Ok(basis)
}

fn flow_by<T: Real>(field: &PolyField<T>, x: PhasePoint<T>, dt: T, cfg: &IntegratorConfig) -> Result<PhasePoint<T>> {
    if dt.is_zero() {
        return Ok(x);
    }
    let path = ComplexPath::real(T::zero(), dt)?;
    let traj = integrate_field(field, None, x.to_vec(), &path, cfg)?;
    Ok(traj.final_point())
}

/// Shift the stable origin along its orbit until `Omega(delta(0), xi4) = 0`,
/// which removes the tangential component of the splitting. Returns the shift.
pub fn normalize_time_origin<T: Real>(
    h: &PolyHamiltonian,
    mu: T,
    nu: T,
    x_plus: &mut SeparatrixSolution<T>,
    x_minus: &SeparatrixSolution<T>,
    basis: &VariationalBasis<T>,
    cfg: &ManifoldConfig,
) -> Result<T> {
    let poly = h.specialize(mu, nu);
    let field = PolyField::hamiltonian(&poly, 0);
    let xi4 = &basis.xi[3];
    let mut x = x_plus.origin_state;
    let mut shift = x_plus.time_shift;
    let floor = T::from_f64(cfg.integrator.abs_tol).max(T::epsilon()) * T::from_f64(10.0);
    let mut converged = false;
    let mut last = f64::INFINITY;
    for _ in 0..30 {
        let delta: Vec<C<T>> = (0..4).map(|k| x[k] - x_minus.origin_state[k]).collect();
        let value = symplectic_pair(&delta, xi4).re;
        let slope = symplectic_pair(&poly.vector_field(&x), xi4).re;
        if slope.is_zero() {
            break;
        }
        let dt = -value / slope;
        last = dt.to_f64();
        if dt.abs() <= floor {
            converged = true;
            break;
        }
        x = flow_by(&field, x, dt, &cfg.integrator)?;
        shift += dt;
    }
    if !converged {
        return Err(Error::NewtonFailed { residual: last.abs() });
    }
    x_plus.origin_state = x;
    x_plus.time_shift = shift;
    Ok(shift)
}

/// Sample times `0, W/n, ..., W` and the same to the left.
fn window_paths<T: Real>(half_width: T, points: usize) -> Result<[ComplexPath<T>; 2]> {
    let n = points.max(1);
    let side = |sign: T| -> Result<ComplexPath<T>> {
        let v = (0..=n).map(|j| cre(sign * half_width * T::from_f64(j as f64 / n as f64))).collect();
        ComplexPath::new(v)
    };
    Ok([side(T::one())?, side(-T::one())?])
}

/// Projections of `delta(0)` on the basis, `E_e1 = 2 |theta1|^2`, and the drift of
/// `theta1` over `|t| <= 1/lambda`.
pub fn measure_splitting<T: Real>(
    h: &PolyHamiltonian,
    mu: T,
    nu: T,
    x_plus: &SeparatrixSolution<T>,
    x_minus: &SeparatrixSolution<T>,
    basis: &VariationalBasis<T>,
    eq: &EquilibriumData<T>,
    cfg: &ManifoldConfig,
) -> Result<SplittingMeasurement<T>> {
    let two_i = C::new(T::zero(), T::from_f64(2.0));
    let delta0: PhasePoint<T> = [0, 1, 2, 3].map(|k| x_plus.origin_state[k] - x_minus.origin_state[k]);
    let [xi1, xi2, xi3, xi4] = &basis.xi;
    let theta = [
        symplectic_pair(&delta0, xi2) / two_i,
        -symplectic_pair(&delta0, xi1) / two_i,
        symplectic_pair(&delta0, xi4),
        -symplectic_pair(&delta0, xi3),
    ];
    let e_e1 = cabs(theta[0]).powi(2) * T::from_f64(2.0);
    let delta_norm = delta0.iter().fold(T::zero(), |m, z| m.max(cabs(*z)));

    let poly = h.specialize(mu, nu);
    let with_basis = PolyField::hamiltonian(&poly, 2);
    let bare = PolyField::hamiltonian(&poly, 0);
    let mut theta1_drift = T::zero();
    let mut drift = x_plus.energy_drift.max(x_minus.energy_drift).max(basis.energy_drift);
    for path in window_paths(T::one() / eq.lambda, cfg.window_points)? {
        let mut start = x_minus.origin_state.to_vec();
        start.extend_from_slice(xi1);
        start.extend_from_slice(xi2);
        let minus = integrate_field(&with_basis, Some(&poly), start, &path, &cfg.integrator)?;
        let plus = integrate_field(&bare, Some(&poly), x_plus.origin_state.to_vec(), &path, &cfg.integrator)?;
        drift = drift.max(crate::ode::energy_drift(&minus)).max(crate::ode::energy_drift(&plus));
        for (a, b) in minus.samples.iter().zip(&plus.samples) {
            let d: Vec<C<T>> = (0..4).map(|k| b.state[k] - a.state[k]).collect();
            let th = symplectic_pair(&d, &a.variation(1)) / two_i;
            theta1_drift = theta1_drift.max(cabs(th - theta[0]));
        }
    }
    let energy_mismatch = cabs(poly.eval(&x_plus.origin_state) - poly.eval(&x_minus.origin_state));
    let tol = T::from_f64(cfg.integrator.abs_tol);
    let noise = drift.max(energy_mismatch).max(tol);
    let upper_bound = e_e1 < noise * noise * T::from_f64(1e3);
    let e_e1_error = T::from_f64(4.0) * cabs(theta[0]) * (noise + delta_norm * delta_norm);
    Ok(SplittingMeasurement {
        mu,
        nu,
        lambda: eq.lambda,
        omega: eq.omega,
        delta0,
        theta,
        e_e1,
        e_e1_error,
        delta_norm,
        theta1_drift,
        energy_drift: drift,
        energy_mismatch,
        noise,
        upper_bound,
        time_shift: x_plus.time_shift,
        t_seed: -x_minus.seed_time,
        seed_mismatch: x_minus.seed_mismatch.max(x_plus.seed_mismatch),
        section_residual: x_minus.section_residual.max(x_plus.section_residual),
    })
}

/// Saddle-center at `(mu, nu)` from the cubic-truncation guess.
pub fn equilibrium<T: Real>(h: &PolyHamiltonian, mu: T, nu: T) -> Result<EquilibriumData<T>> {
    let tol = T::epsilon() * T::from_f64(1e3);
    find_equilibrium(h, mu, nu, default_guess(h, mu)?, tol)
}

/// The whole measurement at one parameter point.
pub fn split<T: Real>(h: &PolyHamiltonian, mu: T, nu: T, cfg: &ManifoldConfig) -> Result<SplitRun<T>> {
    let eq = equilibrium(h, mu, nu)?;
    let (_, eps) = formal_context(h, mu, cfg.series_order)?;
    let unstable = trace_separatrix(h, mu, nu, &eq, Side::Unstable, cfg)?;
    let mut stable = trace_separatrix(h, mu, nu, &eq, Side::Stable, cfg)?;
    let basis = build_variational_basis(h, mu, nu, &unstable, &eq, cfg)?;
    normalize_time_origin(h, mu, nu, &mut stable, &unstable, &basis, cfg)?;
    let measurement = measure_splitting(h, mu, nu, &stable, &unstable, &basis, &eq, cfg)?;
    Ok(SplitRun { equilibrium: eq, eps, unstable, stable, basis, measurement })
}

/// Largest change of the six basis pairings along the unstable solution over `|t| <= half_width`.
pub fn pairing_drift<T: Real>(
    h: &PolyHamiltonian,
    mu: T,
    nu: T,
    basis: &VariationalBasis<T>,
    half_width: T,
    cfg: &IntegratorConfig,
) -> Result<T> {
    let poly = h.specialize(mu, nu);
    let field = PolyField::hamiltonian(&poly, 4);
    let rec = IntegratorConfig { record_steps: true, ..cfg.clone() };
    let mut start = basis.base.to_vec();
    for v in basis.real_basis() {
        start.extend_from_slice(&v);
    }
    let mut worst = T::zero();
    for end in [half_width, -half_width] {
        let path = ComplexPath::real(T::zero(), end)?;
        let run = integrate_field(&field, Some(&poly), start.clone(), &path, &rec)?;
        for s in &run.samples {
            let b = [s.variation(0), s.variation(1), s.variation(2), s.variation(3)];
            let p = six_pairings(&b);
            for (now, then) in p.iter().zip(&basis.pairings) {
                worst = worst.max((*now - *then).abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests;
