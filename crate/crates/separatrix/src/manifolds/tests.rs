use num_traits::Zero;

use super::*;
use crate::hamiltonian::CUBIC_MODEL;
use crate::melnikov::{melnikov_exact_residue, Frame, MelnikovProblem};
use crate::numeric::Dd;

fn cubic() -> PolyHamiltonian {
    PolyHamiltonian::parse(CUBIC_MODEL).unwrap()
}

fn dd_cfg(tol: f64) -> ManifoldConfig {
    ManifoldConfig::with_integrator(IntegratorConfig { precision_bits: 106, ..IntegratorConfig::with_tol(tol) })
}

#[test]
fn unstable_solution_reaches_the_apex() {
    let mu = Dd::from_f64(0.01);
    let h = cubic();
    let eq = equilibrium(&h, mu, Dd::zero()).unwrap();
    let sol = trace_separatrix(&h, mu, Dd::zero(), &eq, Side::Unstable, &dd_cfg(1e-24)).unwrap();
    let apex = Dd::from_f64(2.0) * mu.sqrt();
    assert!((sol.origin_state[0].re - apex).abs().to_f64() < 1e-16, "{}", sol.origin_state[0].re);
    assert!(sol.section_residual.to_f64() < 1e-20);
    assert!(sol.seed_mismatch < 1e-6);
    // decoupled and integrable: the seed stays in the (x1, y1) plane
    assert!(sol.seed_state[2].is_zero() && sol.seed_state[3].is_zero());
    assert!(sol.origin_state[2].is_zero() && sol.origin_state[3].is_zero());
    let dist = (0..4).fold(Dd::zero(), |m, k| m.max(cabs(sol.seed_state[k] - eq.point()[k])));
    assert!(dist.to_f64() <= 1.01e-10);
}

#[test]
fn integrable_case_has_no_splitting() {
    let run = split(&cubic(), Dd::from_f64(0.01), Dd::zero(), &dd_cfg(1e-24)).unwrap();
    let m = &run.measurement;
    assert!(m.e_e1.is_zero(), "{}", m.e_e1);
    assert!(m.upper_bound);
    assert!(m.delta_norm.to_f64() < 1e-18);
}

#[test]
fn basis_and_projection_identities() {
    let mu = Dd::from_f64(0.0025);
    let nu = Dd::from_f64(0.01);
    let run = split(&cubic(), mu, nu, &dd_cfg(1e-24)).unwrap();
    let m = &run.measurement;
    assert!(run.basis.normalization_error().to_f64() < 1e-20, "{:?}", run.basis.pairings);
    assert!(cabs(m.theta[1] - m.theta[0].conj()).to_f64() < 1e-22 + 1e-12 * cabs(m.theta[0]).to_f64());
    assert!(!m.upper_bound && m.e_e1 > Dd::zero());
    let d2 = m.delta_norm * m.delta_norm;
    assert!(cabs(m.theta[2]) < d2 * Dd::from_f64(1e3), "theta3 {}", m.theta[2]);
    assert!(cabs(m.theta[3]) < d2 * Dd::from_f64(1e3) + Dd::from_f64(1e-20), "theta4 {}", m.theta[3]);
    assert!(m.theta1_drift < cabs(m.theta[0]) * Dd::from_f64(0.1));
}

#[test]
fn splitting_matches_first_order_prediction() {
    let h = cubic();
    let problem = MelnikovProblem::from_model(&h, Frame::Original).unwrap();
    let eps = Dd::from_f64(0.45);
    let mu = problem.mu_for_eps(eps);
    let mel = melnikov_exact_residue(&problem, mu).unwrap();
    let mut ratios = Vec::new();
    for nu in [0.01, 0.005] {
        let nu = Dd::from_f64(nu);
        let run = split(&h, mu, nu, &dd_cfg(1e-24)).unwrap();
        let predicted = nu * nu * cabs(mel.m).powi(2) / Dd::from_f64(2.0);
        ratios.push((run.measurement.e_e1 / predicted).to_f64());
    }
    for r in &ratios {
        assert!((r - 1.0).abs() < 0.1, "{ratios:?}");
    }
    // E_e1 is even in nu, so halving nu roughly quarters the defect
    assert!((ratios[1] - 1.0).abs() < (ratios[0] - 1.0).abs(), "{ratios:?}");
}

