use num_rational::BigRational;
use num_traits::One;

use super::*;
use crate::melnikov::{monomial_perturbation, stokes_derivative};
use crate::numeric::{cexp, Dd, Qd};

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `y1^2/2 + I - x1^3 + nu x1 x2`.
fn pure_cubic() -> PolyHamiltonian {
    PolyHamiltonian::cubic_model(r(1, 1), r(-3, 1), r(0, 1), r(1, 1)).with_perturbation(&monomial_perturbation(1, r(1, 1)))
}

fn predicted(nu: f64) -> f64 {
    let d = stokes_derivative::<Dd>(&monomial_perturbation(1, r(1, 1)), Dd::one()).unwrap();
    d.pairing_per_nu.re.to_f64() * nu
}

fn run(nu: f64, cfg: &StokesConfig) -> StokesResult<Dd> {
    stokes(&pure_cubic(), Dd::from_f64(nu), cfg).unwrap()
}

#[test]
fn no_coupling_no_constant() {
    let res = run(0.0, &StokesConfig::default());
    assert!(res.b0.is_zero());
    assert!(res.pairing_samples.iter().all(|(_, v)| v.is_zero()));
    assert!(res.upper_bound);
    assert!(res.an.iter().all(|a| a.is_zero()));
    assert!(res.bn.iter().all(|b| b.is_zero()));
}

#[test]
fn pure_cubic_inner_solution_is_exact() {
    let h0 = inner_hamiltonian(&pure_cubic());
    let cfg = StokesConfig::default();
    let series = inner_series(&h0, Dd::zero(), &cfg).unwrap();
    assert_eq!(series.kappa, Dd::from_f64(2.0));
    for side in [Side::Unstable, Side::Stable] {
        let sol = solve_inner(&h0, Dd::zero(), side, &series, &cfg).unwrap();
        for (t, x) in sol.depths.iter().zip(&sol.states) {
            let w = C::new(Dd::one(), Dd::zero()) / C::new(Dd::zero(), Dd::from_f64(-t));
            let exact = [w * w * cre(Dd::from_f64(2.0)), w * w * w * cre(Dd::from_f64(-4.0))];
            assert!(cabs(x[0] - exact[0]).to_f64() < 1e-24 && cabs(x[1] - exact[1]).to_f64() < 1e-24, "T {t}");
            assert!(x[2].is_zero() && x[3].is_zero());
        }
    }
}

#[test]
fn decoupled_eta_is_pure_rotation() {
    let h0 = inner_hamiltonian(&pure_cubic());
    let cfg = StokesConfig::default();
    let series = inner_series(&h0, Dd::zero(), &cfg).unwrap();
    let (_, eta) = solve_eta0(&h0, Dd::zero(), &series, &cfg).unwrap();
    let i = C::new(Dd::zero(), Dd::one());
    for (t, e) in eta.depths.iter().zip(&eta.states) {
        let phase = cexp(i * C::new(Dd::zero(), Dd::from_f64(-t)));
        assert!(e[0].is_zero() && e[1].is_zero());
        assert!((cabs(e[2] - phase) / cabs(phase)).to_f64() < 1e-24);
        assert!((cabs(e[3] - i * phase) / cabs(phase)).to_f64() < 1e-24);
    }
}

#[test]
fn an_arithmetic() {
    let a = assemble_an(&[C::new(1.0, 1.0)]);
    assert_eq!(a, vec![1.0]);
    let a = assemble_an(&[C::new(1.0, 0.0), C::new(0.0, 1.0)]);
    assert_eq!(a, vec![0.5, 0.0]);
}

#[test]
fn constant_matches_melnikov_derivative() {
    let nu = 0.01;
    let res = run(nu, &StokesConfig::default());
    let want = predicted(nu);
    assert!(res.reliable && !res.upper_bound);
    assert!(((res.b0.re.to_f64() - want) / want).abs() < 1e-3, "{} vs {want}", res.b0.re);
    assert!(res.b0.im.abs().to_f64() < 1e-3 * want);
    let fit = res.fit.unwrap();
    assert!((fit.rate - 1.0).abs() < 0.2, "{fit:?}");
    assert!((res.an[0] - res.b0.norm_sqr() * Dd::from_f64(0.5)).abs().to_f64() < 1e-30);
    // no mu at order eps^2: b1 vanishes and a1 with it
    assert_eq!(res.bn.len(), 2);
    assert!(res.bn[1].is_zero() && res.an[1].is_zero());
}

#[test]
fn defect_shrinks_with_nu() {
    let defects: Vec<f64> = [0.01, 0.005, 0.0025]
        .iter()
        .map(|&nu| (run(nu, &StokesConfig::default()).b0.re.to_f64() / predicted(nu) - 1.0).abs())
        .collect();
    assert!(defects[1] < defects[0] && defects[2] < defects[1], "{defects:?}");
}

#[test]
fn descent_invariants() {
    let res = run(0.01, &StokesConfig::default());
    let depths: Vec<f64> = res.pairing_samples.iter().map(|(t, _)| -t).collect();
    for k in 1..depths.len() {
        let dt = depths[k] - depths[k - 1];
        assert!(res.delta_norms[k] < res.delta_norms[k - 1] * (-dt / 2.0).exp());
    }
    let products: Vec<f64> = res.delta_norms.iter().zip(&res.eta_norms).map(|(d, e)| d * e).collect();
    let (lo, hi) = products.iter().fold((f64::MAX, 0.0f64), |(a, b), p| (a.min(*p), b.max(*p)));
    assert!(hi / lo < 10.0, "{products:?}");
    let diffs: Vec<f64> = res.pairing_samples.windows(2).map(|w| cabs(w[1].1 - w[0].1).to_f64()).collect();
    for k in 1..diffs.len() {
        assert!(diffs[k] <= diffs[k - 1] * 2.0 / (depths[k + 1] - depths[k]).exp(), "{diffs:?}");
    }
    assert!(res.eta_partner_drift < 1e-20);
}

#[test]
fn matching_residual_power_law() {
    // nonterminating inner series: add x1^4 to the pure cubic
    let mut h = PolyHamiltonian::cubic_model(r(1, 1), r(-3, 1), r(0, 1), r(1, 1));
    h.accumulate([4, 0, 0, 0, 0, 0], r(1, 1));
    let cfg = StokesConfig::default();
    let series = inner_series(&h, Qd::zero(), &cfg).unwrap();
    let poly = h.specialize(Qd::zero(), Qd::zero());
    let dir = cexp(C::new(Qd::zero(), Qd::from_f64(-0.75 * std::f64::consts::PI)));
    for m in [2, 3, 4] {
        let cut = 2 * m + 2;
        let res: Vec<(f64, f64)> = [10.0, 20.0, 40.0]
            .iter()
            .map(|&rad| {
                let tau = dir * cre(Qd::from_f64(rad));
                let x = series.eval_x_to(tau, cut);
                let dx = series.eval_x_derivative_to(tau, cut);
                let f = poly.vector_field(&x);
                let e = (0..4).fold(0.0f64, |a, k| a.max(cabs(dx[k] - f[k]).to_f64()));
                (rad.ln(), e.ln())
            })
            .collect();
        let slope = (res[2].1 - res[0].1) / (res[2].0 - res[0].0);
        let want = -(2.0 * m as f64 + 3.0);
        assert!((slope - want).abs() < 0.25, "M {m}: slope {slope}");
    }
}

#[test]
fn constant_is_stable_under_setup_changes() {
    let base = run(0.01, &StokesConfig::default());
    let tol = 2.0 * base.fit.unwrap().residual * cabs(base.b0).to_f64();
    let longer = run(0.01, &StokesConfig { tau_match: 60.0, ..StokesConfig::default() });
    assert!(cabs(longer.b0 - base.b0).to_f64() < tol);
    let shifted = run(0.01, &StokesConfig { t_min: 3.5, ..StokesConfig::default() });
    assert!(cabs(shifted.b0 - base.b0).to_f64() < tol);
    let cfg = StokesConfig {
        integrator: IntegratorConfig { precision_bits: 212, abs_tol: 1e-40, rel_tol: 1e-40, blowup: 1e40, ..Default::default() },
        ..StokesConfig::default()
    };
    let fine = stokes(&pure_cubic(), Qd::from_f64(0.01), &cfg).unwrap();
    assert!((cabs(crate::numeric::cconv::<Qd, Dd>(fine.b0) - base.b0)).to_f64() < tol);
}

#[test]
fn double_precision_is_refused() {
    let err = stokes(&pure_cubic(), 0.01f64, &StokesConfig {
        integrator: IntegratorConfig { precision_bits: 53, abs_tol: 1e-12, rel_tol: 1e-12, blowup: 1e40, ..Default::default() },
        ..StokesConfig::default()
    });
    assert!(matches!(err, Err(Error::Precision(_))));
}

#[test]
fn sign_follows_the_cubic_coefficient() {
    let h = PolyHamiltonian::parse(crate::hamiltonian::CUBIC_MODEL).unwrap();
    let res = stokes(&h, Dd::from_f64(0.01), &StokesConfig::default()).unwrap();
    let want = -12.0 * std::f64::consts::PI * 0.01;
    assert!((res.b0.re.to_f64() / want - 1.0).abs() < 1e-3, "{}", res.b0.re);
}
