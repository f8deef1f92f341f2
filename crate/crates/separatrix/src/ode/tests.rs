use num_rational::BigRational;
use num_traits::{One, Zero};

use super::*;
use crate::hamiltonian::{symplectic_pair, PolyHamiltonian};
use crate::numeric::{cexp, cf64, cre, Dd, Qd};

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn elliptic() -> PolyHamiltonian {
    let mut h = PolyHamiltonian::new();
    h.insert([0, 0, 2, 0, 0, 0], r(1, 2)).unwrap();
    h.insert([0, 0, 0, 2, 0, 0], r(1, 2)).unwrap();
    h
}

fn cubic() -> PolyHamiltonian {
    PolyHamiltonian::cubic_model(r(1, 1), r(1, 1), r(0, 1), r(1, 1))
}

fn dd_cfg(tol: f64) -> IntegratorConfig {
    IntegratorConfig { precision_bits: 106, ..IntegratorConfig::with_tol(tol) }
}

fn apex<T: Real>(mu: T) -> PhasePoint<T> {
    let s = mu.sqrt();
    [cre(T::from_f64(2.0) * s), C::zero(), C::zero(), C::zero()]
}

#[test]
fn elliptic_period() {
    let tol = 1e-25;
    let start: PhasePoint<Dd> = [C::zero(), C::zero(), cf64(0.3, 0.0), cf64(-0.2, 0.0)];
    let path = ComplexPath::real(Dd::zero(), Dd::pi() + Dd::pi()).unwrap();
    let traj = integrate_flow(&elliptic(), Dd::zero(), Dd::zero(), start, &path, &dd_cfg(tol)).unwrap();
    let end = traj.final_point();
    for k in 0..4 {
        assert!(cabs(end[k] - start[k]).to_f64() < 10.0 * tol);
    }
}

#[test]
fn linear_saddle_growth() {
    let mut h = PolyHamiltonian::new();
    h.insert([1, 1, 0, 0, 0, 0], r(1, 2)).unwrap();
    let start: PhasePoint<Dd> = [cf64(1e-3, 0.0), cf64(2e-3, 0.0), C::zero(), C::zero()];
    let path = ComplexPath::real(Dd::zero(), Dd::from_f64(6.0)).unwrap();
    let traj = integrate_flow(&h, Dd::zero(), Dd::zero(), start, &path, &dd_cfg(1e-26)).unwrap();
    let want = Dd::from_f64(1e-3) * Dd::from_f64(3.0).exp();
    assert!(((traj.final_point()[0].re - want) / want).abs().to_f64() < 1e-24);
}

#[test]
fn homoclinic_orbit_and_energy() {
    let mu = Qd::from_f64(0.01);
    let h = cubic();
    let path = ComplexPath::real(Qd::zero(), Qd::from_f64(20.0)).unwrap();
    let cfg = IntegratorConfig { record_steps: true, ..IntegratorConfig::with_tol(1e-30) };
    let traj = integrate_flow(&h, mu, Qd::zero(), apex(mu), &path, &cfg).unwrap();
    let drift = energy_drift(&traj).to_f64();
    assert!(drift < 1e-25, "drift {drift:e}");
    // H on the loop equals the saddle energy (2/3) mu^{3/2}
    let sq = mu.sqrt();
    let e_saddle = Qd::from_f64(2.0) / Qd::from_f64(3.0) * mu * sq;
    assert!((traj.energy_reference.re - e_saddle).abs().to_f64() < 1e-60);
    let lambda = (Qd::from_f64(4.0) * mu).sqrt().sqrt();
    for s in traj.samples.iter().step_by(7) {
        let c = (lambda * s.t.re * Qd::from_f64(0.5)).exp();
        let sech = Qd::from_f64(2.0) / (c + Qd::one() / c);
        let exact = -sq + Qd::from_f64(3.0) * sq * sech * sech;
        assert!((s.state[0].re - exact).abs().to_f64() < 1e-27);
    }
}

#[test]
fn coarse_tolerance_is_visible_in_drift() {
    let mu = 0.01f64;
    let path = ComplexPath::real(0.0, 20.0).unwrap();
    let cfg = IntegratorConfig { precision_bits: 53, record_steps: true, ..IntegratorConfig::with_tol(1e-6) };
    let traj = integrate_flow(&cubic(), mu, 0.0, apex(mu), &path, &cfg).unwrap();
    assert!(energy_drift(&traj) > 1e-12);
}

#[test]
fn equilibrium_has_no_drift() {
    let mu = Dd::from_f64(0.04);
    let start: PhasePoint<Dd> = [cre(-mu.sqrt()), C::zero(), C::zero(), C::zero()];
    let path = ComplexPath::real(Dd::zero(), Dd::from_f64(5.0)).unwrap();
    let traj = integrate_flow(&cubic(), mu, Dd::zero(), start, &path, &dd_cfg(1e-25)).unwrap();
    assert!(energy_drift(&traj).is_zero());
}

#[test]
fn path_independence() {
    let mu = Dd::from_f64(0.01);
    let tol = 1e-26;
    let end = cf64::<Dd>(4.0, 1.0);
    let direct = ComplexPath::segment(C::zero(), end).unwrap();
    let bent = ComplexPath::new(vec![C::zero(), cf64(0.0, -0.5), cf64(4.0, -0.5), end]).unwrap();
    let a = integrate_flow(&cubic(), mu, Dd::zero(), apex(mu), &direct, &dd_cfg(tol)).unwrap();
    let b = integrate_flow(&cubic(), mu, Dd::zero(), apex(mu), &bent, &dd_cfg(tol)).unwrap();
    for k in 0..4 {
        assert!(cabs(a.final_point()[k] - b.final_point()[k]).to_f64() < 10.0 * tol);
    }
}

#[test]
fn variational_tangent_and_pairing() {
    let mu = Dd::from_f64(0.01);
    let nu = Dd::from_f64(0.05);
    let h = PolyHamiltonian::parse(crate::hamiltonian::CUBIC_MODEL).unwrap();
    let poly = h.specialize(mu, nu);
    let start: PhasePoint<Dd> = [cf64(0.15, 0.0), cf64(0.01, 0.0), cf64(0.02, 0.0), cf64(-0.01, 0.0)];
    let path = ComplexPath::new(vec![C::zero(), cf64(3.0, 0.5), cf64(6.0, 0.0)]).unwrap();
    let cfg = IntegratorConfig { record_steps: true, ..dd_cfg(1e-26) };
    let base = integrate_flow(&h, mu, nu, start, &path, &cfg).unwrap();
    let other: PhasePoint<Dd> = [cf64(0.0, 0.0), cf64(0.0, 0.0), cf64(1.0, 0.0), cf64(0.0, 1.0)];
    let var = integrate_variational(&h, mu, nu, &base, &[poly.vector_field(&start), other], &cfg).unwrap();
    let p0 = symplectic_pair(&var.samples[0].variation(0), &var.samples[0].variation(1));
    for s in &var.samples {
        let f = poly.vector_field(&s.point());
        let xi = s.variation(0);
        for k in 0..4 {
            assert!(cabs(xi[k] - f[k]).to_f64() < 1e-22);
        }
        let p = symplectic_pair(&s.variation(0), &s.variation(1));
        assert!(cabs(p - p0).to_f64() < 1e-22);
    }
}

#[test]
fn elliptic_variation_is_a_phase() {
    let start: PhasePoint<Dd> = [C::zero(), C::zero(), cf64(0.1, 0.0), C::zero()];
    let path = ComplexPath::real(Dd::zero(), Dd::from_f64(2.5)).unwrap();
    let cfg = dd_cfg(1e-26);
    let base = integrate_flow(&elliptic(), Dd::zero(), Dd::zero(), start, &path, &cfg).unwrap();
    let xi: PhasePoint<Dd> = [C::zero(), C::zero(), cf64(1.0, 0.0), cf64(0.0, 1.0)];
    let var = integrate_variational(&elliptic(), Dd::zero(), Dd::zero(), &base, &[xi], &cfg).unwrap();
    let phase = cexp(cf64::<Dd>(0.0, 2.5));
    let got = var.last().variation(0);
    for k in 0..4 {
        assert!(cabs(got[k] - xi[k] * phase).to_f64() < 1e-24);
    }
}

fn fixed_step_error(method: Method, h: f64) -> f64 {
    let start: PhasePoint<Dd> = [C::zero(), C::zero(), cf64(1.0, 0.0), C::zero()];
    let path = ComplexPath::real(Dd::zero(), Dd::from_f64(4.0)).unwrap();
    let cfg = IntegratorConfig { method, fixed_step: Some(h), taylor_order: Some(8), ..dd_cfg(1e-20) };
    let traj = integrate_flow(&elliptic(), Dd::zero(), Dd::zero(), start, &path, &cfg).unwrap();
    let (s, c) = Dd::from_f64(4.0).sin_cos();
    let end = traj.final_point();
    (cabs(end[2] - cre(c)) + cabs(end[3] + cre(s))).to_f64()
}

#[test]
fn empirical_order() {
    for method in [Method::Taylor, Method::Extrapolation] {
        let e1 = fixed_step_error(method, 0.5);
        let e2 = fixed_step_error(method, 0.25);
        let order = (e1 / e2).log2();
        assert!(order >= 7.0, "{method:?} order {order}");
    }
}

#[test]
fn extrapolation_agrees_with_taylor() {
    let mu = Dd::from_f64(0.01);
    let path = ComplexPath::real(Dd::zero(), Dd::from_f64(10.0)).unwrap();
    let a = integrate_flow(&cubic(), mu, Dd::zero(), apex(mu), &path, &dd_cfg(1e-24)).unwrap();
    let cfg = IntegratorConfig { method: Method::Extrapolation, ..dd_cfg(1e-16) };
    let b = integrate_flow(&cubic(), mu, Dd::zero(), apex(mu), &path, &cfg).unwrap();
    for k in 0..4 {
        assert!(cabs(a.final_point()[k] - b.final_point()[k]).to_f64() < 1e-14);
    }
}

#[test]
fn escape_is_reported() {
    let start: PhasePoint<f64> = [cf64(-1.0, 0.0), cf64(-1.0, 0.0), C::zero(), C::zero()];
    let path = ComplexPath::real(0.0, 10.0).unwrap();
    let cfg = IntegratorConfig { precision_bits: 53, ..IntegratorConfig::with_tol(1e-10) };
    let err = integrate_flow(&cubic(), 0.01, 0.0, start, &path, &cfg).unwrap_err();
    assert!(matches!(err, Error::BlowUp { .. } | Error::Singularity { .. }), "{err:?}");
}

#[test]
fn tolerance_below_precision_is_rejected() {
    let path = ComplexPath::real(0.0, 1.0).unwrap();
    let cfg = IntegratorConfig { precision_bits: 53, ..IntegratorConfig::with_tol(1e-20) };
    let start: PhasePoint<f64> = [C::zero(); 4];
    assert!(matches!(integrate_flow(&cubic(), 0.01, 0.0, start, &path, &cfg), Err(Error::Precision(_))));
    let cfg = IntegratorConfig::with_tol(1e-20);
    assert!(matches!(integrate_flow(&cubic(), 0.01, 0.0, start, &path, &cfg), Err(Error::Precision(_))));
}
