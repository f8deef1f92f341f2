use num_rational::BigRational;
use num_traits::One;

use super::*;
use crate::numeric::{Dd, Qd};

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn cubic() -> PolyHamiltonian {
    PolyHamiltonian::cubic_model(r(1, 1), r(1, 1), r(0, 1), r(1, 1))
}

fn problem(m: u32, frame: Frame) -> MelnikovProblem {
    MelnikovProblem::new(&cubic(), &monomial_perturbation(m, r(1, 1)), frame).unwrap()
}

fn mu_of(eps: f64) -> Dd {
    let e = Dd::from_f64(eps);
    e * e * e * e / Dd::from_f64(4.0)
}

fn rel(a: C<Dd>, b: C<Dd>) -> f64 {
    (cabs(a - b) / cabs(b)).to_f64()
}

#[test]
fn independent_values_for_linear_coupling() {
    // computed independently with mpmath for m = 1, omega = 1
    let want = [(0.3, 0.00106760337886), (0.4, 0.0146349182082), (0.5, 0.0704011779162)];
    for (eps, m) in want {
        let p = problem(1, Frame::Translated);
        let q = melnikov_quadrature(&p, mu_of(eps), &QuadratureConfig::default()).unwrap();
        assert!((q.eps.to_f64() - eps).abs() < 1e-15);
        assert!(q.m.re.abs().to_f64() < 1e-20);
        assert!((q.m.im.to_f64() - m).abs() < 1e-11 * m, "eps {eps}: {}", q.m);
        // closed form 6 pi omega / sinh(pi omega/eps)
        let exact = 6.0 * std::f64::consts::PI / (std::f64::consts::PI / eps).sinh();
        assert!((q.m.im.to_f64() - exact).abs() < 1e-12 * exact);
    }
}

#[test]
fn residue_matches_quadrature() {
    for m in 1..=3 {
        for frame in [Frame::Translated, Frame::Original] {
            let p = problem(m, frame);
            for eps in [0.3, 0.4, 0.5] {
                let q = melnikov_quadrature(&p, mu_of(eps), &QuadratureConfig::default()).unwrap();
                let e = melnikov_exact_residue(&p, mu_of(eps)).unwrap();
                assert!(rel(q.m, e.m) < 1e-10, "m {m} {frame:?} eps {eps}: {} vs {}", q.m, e.m);
                assert!(q.error < 1e-9 * cabs(q.m).to_f64());
            }
        }
    }
}

#[test]
fn frames_agree_for_linear_coupling() {
    let a = melnikov_exact_residue(&problem(1, Frame::Translated), mu_of(0.4)).unwrap();
    let b = melnikov_exact_residue(&problem(1, Frame::Original), mu_of(0.4)).unwrap();
    assert!(rel(a.m, b.m) < 1e-25);
}

#[test]
fn no_elliptic_dependence_gives_zero() {
    let mut rr = PolyHamiltonian::new();
    rr.accumulate([2, 1, 0, 0, 0, 0], r(1, 1));
    let p = MelnikovProblem::new(&cubic(), &rr, Frame::Original).unwrap();
    let q = melnikov_quadrature(&p, mu_of(0.4), &QuadratureConfig::default()).unwrap();
    assert!(q.m.is_zero());
}

#[test]
fn odd_in_x2() {
    let p = problem(2, Frame::Original);
    let n = MelnikovProblem::new(&cubic(), &monomial_perturbation(2, r(-1, 1)), Frame::Original).unwrap();
    let a = melnikov_quadrature(&p, mu_of(0.4), &QuadratureConfig::default()).unwrap();
    let b = melnikov_quadrature(&n, mu_of(0.4), &QuadratureConfig::default()).unwrap();
    assert!(cabs(a.m + b.m).to_f64() < 1e-12 * cabs(a.m).to_f64());
}

#[test]
fn linear_in_perturbation() {
    let mut sum = monomial_perturbation(1, r(2, 1));
    sum.accumulate([2, 0, 0, 1, 0, 0], r(-3, 1));
    sum.accumulate([0, 1, 1, 0, 0, 0], r(1, 2));
    let parts = [
        monomial_perturbation(1, r(2, 1)),
        {
            let mut h = PolyHamiltonian::new();
            h.accumulate([2, 0, 0, 1, 0, 0], r(-3, 1));
            h
        },
        {
            let mut h = PolyHamiltonian::new();
            h.accumulate([0, 1, 1, 0, 0, 0], r(1, 2));
            h
        },
    ];
    let mu = mu_of(0.45);
    let whole = melnikov_exact_residue(&MelnikovProblem::new(&cubic(), &sum, Frame::Original).unwrap(), mu).unwrap();
    let mut acc = C::<Dd>::zero();
    for part in &parts {
        acc += melnikov_exact_residue(&MelnikovProblem::new(&cubic(), part, Frame::Original).unwrap(), mu)
            .unwrap()
            .m;
    }
    assert!(rel(acc, whole.m) < 1e-28);
    let q = melnikov_quadrature(&MelnikovProblem::new(&cubic(), &sum, Frame::Original).unwrap(), mu, &Default::default())
        .unwrap();
    assert!(rel(q.m, whole.m) < 1e-10);
}

#[test]
fn displayed_formula_instances() {
    let eps = 0.4f64;
    let a = std::f64::consts::PI / eps;
    let m1 = melnikov_residue(1, 1.0, 1.0, eps);
    assert!((m1.re - 8.0 * std::f64::consts::PI / (a.exp() + (-a).exp())).abs() < 1e-15);
    let m2 = melnikov_residue(2, 1.0, 1.0, eps);
    // -2 pi 16/(3! 2 cosh) = -(8/3) pi / cosh
    assert!((m2.re + 8.0 / 3.0 * std::f64::consts::PI / a.cosh()).abs() < 1e-15);
    assert!(melnikov_residue(1, 1.0, 1.0, 0.05f64).re < 1e-25);
}

#[test]
fn exponentially_small_in_eps() {
    let p = problem(1, Frame::Original);
    let vals: Vec<f64> = [0.25, 0.3, 0.35, 0.4, 0.5]
        .iter()
        .map(|&eps| {
            let m = melnikov_exact_residue(&p, mu_of(eps)).unwrap().m;
            cabs(m).to_f64().ln() + std::f64::consts::PI / eps
        })
        .collect();
    let spread = vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 0.1, "{vals:?}");
}

#[test]
fn precision_limit_is_reported() {
    let p = problem(1, Frame::Original);
    let mu = 0.05f64.powi(4) / 4.0;
    assert!(matches!(melnikov_quadrature(&p, mu, &Default::default()), Err(Error::Precision(_))));
}

#[test]
fn nonterminating_potential_is_rejected() {
    let mut h = cubic();
    h.accumulate([4, 0, 0, 0, 0, 0], r(1, 4));
    assert!(MelnikovProblem::new(&h, &monomial_perturbation(1, r(1, 1)), Frame::Original).is_err());
}

#[test]
fn stokes_derivative_linear_coupling() {
    let d = stokes_derivative::<Qd>(&monomial_perturbation(1, r(1, 1)), Qd::one()).unwrap();
    let want = -2.0 * 2f64.sqrt() * std::f64::consts::PI;
    assert!((d.residue.re.to_f64() - want).abs() < 1e-14 && d.residue.im.abs().to_f64() < 1e-30);
    assert!((cabs(d.quadrature - d.residue) / cabs(d.residue)).to_f64() < 1e-20, "{}", d.quadrature);
    assert!((d.pairing_per_nu.re.to_f64() - 4.0 * std::f64::consts::PI).abs() < 1e-14);
    let d = stokes_derivative::<f64>(&monomial_perturbation(2, r(3, 1)), 1.5).unwrap();
    assert!((d.quadrature - d.residue).norm() < 1e-8 * d.residue.norm());
    let mut h = PolyHamiltonian::new();
    h.accumulate([1, 2, 0, 1, 0, 0], r(1, 1));
    let d = stokes_derivative::<f64>(&h, 1.0).unwrap();
    assert!((d.quadrature - d.residue).norm() < 1e-8 * d.residue.norm());
}

#[test]
fn stokes_derivative_without_dependence() {
    let mut h = PolyHamiltonian::new();
    h.accumulate([3, 0, 0, 0, 0, 0], r(1, 1));
    let d = stokes_derivative::<f64>(&h, 1.0).unwrap();
    assert!(d.residue.is_zero() && d.note.is_some());
}
