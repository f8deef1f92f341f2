//! Randomized checks of the structural invariants.

use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use separatrix::formal::{formal_separatrix, formal_separatrix_with, formal_u, reexpand_at_singularity, CoeffTable, Elimination};
use separatrix::hamiltonian::{default_guess, find_equilibrium, symplectic_pair, PhasePoint, PolyHamiltonian, CUBIC_MODEL};
use separatrix::melnikov::{melnikov_exact_residue, monomial_perturbation, Frame, MelnikovProblem};
use separatrix::numeric::{cabs, cf64, cre, Dd, Qd, Real, C};
use separatrix::ode::{energy_drift, integrate_flow, ComplexPath, IntegratorConfig};
use separatrix::stokes::assemble_an;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn small_point() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-8i32..=8).prop_map(|a| a.map(f64::from))
}

fn complexify(p: [f64; 4], q: [f64; 4]) -> PhasePoint<f64> {
    [0, 1, 2, 3].map(|k| C::new(p[k], q[k]))
}

/// Two coupled anharmonic oscillators with bounded level sets.
fn bounded_oscillators() -> PolyHamiltonian {
    let mut h = PolyHamiltonian::new();
    for e in [[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]] {
        h.insert([e[0], e[1], e[2], e[3], 0, 0], r(1, 2)).unwrap();
    }
    h.insert([4, 0, 0, 0, 0, 0], r(1, 4)).unwrap();
    h.insert([0, 0, 4, 0, 0, 0], r(1, 4)).unwrap();
    h.insert([2, 0, 2, 0, 0, 0], r(1, 2)).unwrap();
    h
}

fn random_potential() -> impl Strategy<Value = CoeffTable> {
    (1i64..=3, 1i64..=4, -3i64..=3, -3i64..=3).prop_map(|(a, b, c4, c12)| {
        let mut v = CoeffTable::new();
        v.insert((1, 1), r(-a, 1));
        v.insert((0, 3), r(1, b));
        if c4 != 0 {
            v.insert((0, 4), r(c4, 4));
        }
        if c12 != 0 {
            v.insert((1, 2), r(c12, 2));
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_is_antisymmetric_and_bilinear(
        u in small_point(), ui in small_point(),
        w in small_point(), wi in small_point(),
        z in small_point(), a in -5i32..=5, b in -5i32..=5,
    ) {
        let (u, w, z) = (complexify(u, ui), complexify(w, wi), complexify(z, [0.0; 4]));
        prop_assert_eq!(symplectic_pair(&u, &w), -symplectic_pair(&w, &u));
        prop_assert!(symplectic_pair(&u, &u).is_zero());
        let (a, b) = (f64::from(a), f64::from(b));
        let mix: Vec<C<f64>> = (0..4).map(|k| u[k] * a + w[k] * b).collect();
        prop_assert_eq!(symplectic_pair(&mix, &z), symplectic_pair(&u, &z) * a + symplectic_pair(&w, &z) * b);
    }

    #[test]
    fn vector_field_is_the_symplectic_gradient(
        p in prop::array::uniform4(-0.5f64..0.5),
        d in prop::array::uniform4(-1.0f64..1.0),
        mu in 0.001f64..0.05, nu in -0.1f64..0.1,
    ) {
        let poly = PolyHamiltonian::parse(CUBIC_MODEL).unwrap().specialize(Dd::from_f64(mu), Dd::from_f64(nu));
        let at = |t: Dd| -> PhasePoint<Dd> { [0, 1, 2, 3].map(|k| cre(Dd::from_f64(p[k]) + t * Dd::from_f64(d[k]))) };
        let h = Dd::from_f64(1e-8);
        let slope = (poly.eval(&at(h)) - poly.eval(&at(-h))) / (h + h);
        let dir: PhasePoint<Dd> = d.map(|x| cf64(x, 0.0));
        let dual = symplectic_pair(&poly.vector_field(&at(Dd::zero())), &dir);
        // central difference error is O(h^2) times third derivatives of order one
        prop_assert!(cabs(slope - dual).to_f64() < 1e-14, "{} vs {}", slope, dual);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn equilibrium_is_a_normalized_saddle_center(mu in 0.002f64..0.05, nu in -0.05f64..0.05) {
        let h = PolyHamiltonian::parse(CUBIC_MODEL).unwrap();
        let (mu, nu) = (Qd::from_f64(mu), Qd::from_f64(nu));
        let tol = Qd::from_f64(1e-55);
        let eq = find_equilibrium(&h, mu, nu, default_guess(&h, mu).unwrap(), tol).unwrap();
        let a = h.specialize(mu, nu).hamiltonian_matrix(&eq.point());
        let iw = C::new(Qd::zero(), eq.omega);
        let mut worst = Qd::zero();
        for i in 0..4 {
            let row = (0..4).fold(C::<Qd>::zero(), |s, j| s + a[i][j] * eq.v[j]);
            worst = worst.max(cabs(row - iw * eq.v[i]));
        }
        prop_assert!(worst <= tol * Qd::from_f64(10.0), "eigen residual {}", worst);
        let re: Vec<C<Qd>> = eq.v.iter().map(|z| cre(z.re)).collect();
        let im: Vec<C<Qd>> = eq.v.iter().map(|z| cre(z.im)).collect();
        let pairing = symplectic_pair(&re, &im);
        prop_assert!(cabs(pairing - cre(Qd::from_f64(1.0))).to_f64() < 1e-50, "{}", pairing);
        prop_assert!(eq.lambda > Qd::zero() && eq.omega > Qd::zero());
    }

    #[test]
    fn flow_conserves_energy_and_is_path_independent(
        start in prop::array::uniform4(-0.6f64..0.6),
        bend in -0.4f64..0.4,
    ) {
        let tol = 1e-24;
        let cfg = IntegratorConfig { precision_bits: 106, ..IntegratorConfig::with_tol(tol) };
        let h = bounded_oscillators();
        let x0: PhasePoint<Dd> = start.map(|x| cf64(x, 0.0));
        let straight = ComplexPath::real(Dd::zero(), Dd::from_f64(2.0)).unwrap();
        let traj = integrate_flow(&h, Dd::zero(), Dd::zero(), x0, &straight, &cfg).unwrap();
        let length = 2.0;
        prop_assert!(energy_drift(&traj).to_f64() <= 100.0 * tol * length);
        let detour = ComplexPath::new(vec![C::zero(), cf64(1.0, bend), cf64(2.0, 0.0)]).unwrap();
        let other = integrate_flow(&h, Dd::zero(), Dd::zero(), x0, &detour, &cfg).unwrap();
        let (a, b) = (traj.final_point(), other.final_point());
        let gap = (0..4).map(|k| cabs(a[k] - b[k]).to_f64()).fold(0.0, f64::max);
        prop_assert!(gap <= 10.0 * tol * (1.0 + length), "gap {gap:e}");
    }

    #[test]
    fn melnikov_integral_is_linear_in_the_perturbation(c1 in -4i64..=4, c2 in -4i64..=4, eps in 0.3f64..0.5) {
        let h0 = PolyHamiltonian::cubic_model(r(1, 1), r(1, 1), r(0, 1), r(1, 1));
        let one = monomial_perturbation(1, r(c1, 1));
        let two = monomial_perturbation(2, r(c2, 1));
        let mut both = one.clone();
        for (e, c) in two.terms() {
            both.accumulate(*e, c.clone());
        }
        let value = |rp: &PolyHamiltonian| -> C<Dd> {
            let p = MelnikovProblem::new(&h0, rp, Frame::Translated).unwrap();
            let mu = p.mu_for_eps(Dd::from_f64(eps));
            if rp.is_empty() { C::zero() } else { melnikov_exact_residue(&p, mu).unwrap().m }
        };
        let whole = value(&both);
        let parts = value(&one) + value(&two);
        prop_assert!(cabs(whole - parts).to_f64() <= 1e-28 * (1.0 + cabs(parts).to_f64()));
    }

    #[test]
    fn an_is_half_the_autocorrelation(re in prop::collection::vec(-2.0f64..2.0, 1..5), im in prop::collection::vec(-2.0f64..2.0, 4)) {
        let bn: Vec<C<Dd>> = re.iter().zip(&im).map(|(&a, &b)| cf64(a, b)).collect();
        let an = assemble_an(&bn);
        prop_assert_eq!(an.len(), bn.len());
        prop_assert!((an[0] - bn[0].norm_sqr() * Dd::from_f64(0.5)).abs().to_f64() < 1e-28);
        if bn.len() > 1 {
            let a1 = (bn[0] * bn[1].conj()).re;
            prop_assert!((an[1] - a1).abs().to_f64() < 1e-28);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn formal_recursion_is_unique_and_has_parity(v in random_potential()) {
        let top = formal_separatrix_with(&v, 5, Elimination::TopDown).unwrap();
        let dense = formal_separatrix_with(&v, 5, Elimination::DenseReversed).unwrap();
        prop_assert_eq!(&top, &dense);
        for (k, p) in top.p.iter().enumerate() {
            prop_assert!(p.degree() <= k);
        }
        let sep = formal_separatrix(&v, 14).unwrap();
        let coupling: CoeffTable = [((0, 0), r(1, 1)), ((0, 1), r(1, 2))].into_iter().collect();
        let lx = reexpand_at_singularity(&sep, &formal_u(&coupling, &sep), 1, 12).unwrap();
        for m in 0..2 {
            prop_assert!(lx.a[m].keys().all(|e| e % 2 == 0));
            prop_assert!(lx.b[m].keys().all(|e| e % 2 != 0));
            prop_assert!(lx.u[m].keys().all(|e| e % 2 != 0));
        }
    }

    #[test]
    fn mu_series_reproduces_lambda(mu in 1e-4f64..1e-2) {
        // eps = lambda_mu: the formal mu series inverts the hyperbolic exponent
        let h = PolyHamiltonian::parse(CUBIC_MODEL).unwrap();
        let sep = formal_separatrix(&h.potential_coeffs(), 6).unwrap();
        let mu = Qd::from_f64(mu);
        let eq = find_equilibrium(&h, mu, Qd::zero(), default_guess(&h, mu).unwrap(), Qd::from_f64(1e-55)).unwrap();
        let back = sep.mu_sum(eq.lambda, 6);
        prop_assert!(((back - mu) / mu).abs().to_f64() < 1e-40, "{}", back);
    }
}
