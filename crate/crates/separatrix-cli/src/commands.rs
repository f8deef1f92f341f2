use separatrix::formal::{formal_separatrix, formal_u, reexpand_at_singularity};
use separatrix::hamiltonian::PolyHamiltonian;
use separatrix::manifolds::{self, ManifoldConfig, Side};
use separatrix::melnikov::{melnikov_exact_residue, melnikov_quadrature, Frame, MelnikovProblem, QuadratureConfig};
use separatrix::numeric::{cabs, digits_of, rational_to_string, Real, C};
use separatrix::ode::IntegratorConfig;
use separatrix::stokes::{self, StokesConfig};
use separatrix::{sweep, Error};

use crate::table::Table;
use crate::{Failure, Settings, SideChoice, StokesArgs, TraceArgs};

fn num<T: Real>(x: T) -> String {
    x.to_sci(digits_of::<T>())
}

fn short(x: f64) -> String {
    format!("{x:.6e}")
}

fn parse_value<T: Real>(s: &str, what: &str) -> Result<T, Failure> {
    T::parse(s.trim()).ok_or_else(|| Failure::usage(format!("bad value `{s}` for --{what}")))
}

pub fn integrator<T: Real>(s: &Settings) -> IntegratorConfig {
    let tol = s.tol.unwrap_or(if T::BITS > 106 { 1e-30 } else { 1e-24 });
    IntegratorConfig { precision_bits: T::BITS, abs_tol: tol, rel_tol: tol, ..IntegratorConfig::default() }
}

/// The sweep points as `mu` values, from `--mu` or converted from `--eps`.
fn mu_points<T: Real>(h: &PolyHamiltonian, s: &Settings) -> Result<Vec<T>, Failure> {
    let mut pts: Vec<T> = if !s.eps.is_empty() {
        let order = s.order.unwrap_or(6);
        let sep = formal_separatrix(&h.potential_coeffs(), order).map_err(Failure::input)?;
        s.eps.iter().map(|e| parse_value::<T>(e, "eps").map(|e| sep.mu_sum(e, order + 1))).collect::<Result<_, _>>()?
    } else if !s.mu.is_empty() {
        s.mu.iter().map(|m| parse_value::<T>(m, "mu")).collect::<Result<_, _>>()?
    } else {
        return Err(Failure::usage("give the sweep with --mu or --eps".into()));
    };
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(pts)
}

fn nu<T: Real>(s: &Settings) -> Result<T, Failure> {
    parse_value(&s.nu, "nu")
}

/// Run the sweep on the worker pool, keeping the input order, and attach
/// a status column. The first failure is returned for the exit code.
fn sweep_rows<T: Real, F>(table: &mut Table, jobs: Option<usize>, points: Vec<T>, f: F) -> Option<Error>
where
    F: Fn(T) -> Result<Vec<String>, Error> + Sync + Send,
{
    let width = table.columns.len();
    let results = sweep::with_jobs(jobs, || sweep::map(points.clone(), &f));
    let mut first = None;
    for (mu, r) in points.into_iter().zip(results) {
        match r {
            Ok(mut row) => {
                row.push("ok".into());
                table.push(row);
            }
            Err(e) => {
                let mut row = vec![num(mu)];
                row.resize(width - 1, String::new());
                row.push(format!("{}: {e}", e.kind()));
                table.push(row);
                first.get_or_insert(e);
            }
        }
    }
    first
}

pub fn formal(h: &PolyHamiltonian, s: &Settings) -> Result<(Table, Option<Error>), Failure> {
    let order = s.order.unwrap_or(6);
    let sep = formal_separatrix(&h.potential_coeffs(), order).map_err(Failure::compute)?;
    let mut t = Table::new("formal", 0, &["k", "mu_k", "c_k", "p_k"]);
    let len = sep.mu.len().max(sep.c.len()).max(sep.p.len());
    for k in 0..len {
        let mu = sep.mu.get(k).map(rational_to_string).unwrap_or_default();
        let c = sep.c.get(k).map(rational_to_string).unwrap_or_default();
        let p = sep.p.get(k).map(|p| p.coeffs().iter().map(rational_to_string).collect::<Vec<_>>().join(" "));
        t.push(vec![k.to_string(), mu, c, p.unwrap_or_default()]);
    }
    Ok((t, None))
}

pub fn equilibrium<T: Real>(h: &PolyHamiltonian, s: &Settings) -> Result<(Table, Option<Error>), Failure> {
    let nu = nu::<T>(s)?;
    let pts = mu_points::<T>(h, s)?;
    let cols = ["mu", "nu", "x1", "y1", "x2", "y2", "lambda", "omega", "residual", "status"];
    let mut t = Table::new("equilibrium", T::BITS, &cols);
    let err = sweep_rows(&mut t, s.jobs, pts, |mu| {
        let eq = manifolds::equilibrium(h, mu, nu)?;
        let mut row = vec![num(mu), num(nu)];
        row.extend(eq.location.iter().map(|v| num(*v)));
        row.extend([num(eq.lambda), num(eq.omega), short(eq.residual.to_f64())]);
        Ok(row)
    });
    Ok((t, err))
}

fn manifold_config<T: Real>(s: &Settings, a: &TraceArgs) -> ManifoldConfig {
    let mut cfg = ManifoldConfig::with_integrator(integrator::<T>(s));
    if let Some(o) = a.offset {
        cfg.offset = o;
    }
    cfg.t_seed = a.t_seed;
    if let Some(n) = s.order {
        cfg.series_order = n;
    }
    cfg
}

pub fn trace<T: Real>(h: &PolyHamiltonian, s: &Settings, a: &TraceArgs) -> Result<(Table, Option<Error>), Failure> {
    let nu = nu::<T>(s)?;
    let pts = mu_points::<T>(h, s)?;
    let cfg = manifold_config::<T>(s, a);
    let sides: Vec<Side> = match a.side {
        SideChoice::Both => vec![Side::Unstable, Side::Stable],
        SideChoice::Unstable => vec![Side::Unstable],
        SideChoice::Stable => vec![Side::Stable],
    };
    let cols = [
        "mu", "nu", "side", "seed_time", "origin_x1", "origin_x2", "origin_y2", "section_residual", "seed_mismatch",
        "energy_drift", "status",
    ];
    let mut t = Table::new("trace", T::BITS, &cols);
    let jobs: Vec<(T, Side)> = pts.iter().flat_map(|m| sides.iter().map(move |sd| (*m, *sd))).collect();
    let results = sweep::with_jobs(s.jobs, || {
        sweep::map(jobs.clone(), |(mu, side)| {
            let eq = manifolds::equilibrium(h, mu, nu)?;
            manifolds::trace_separatrix(h, mu, nu, &eq, side, &cfg)
        })
    });
    let mut first = None;
    for ((mu, side), r) in jobs.into_iter().zip(results) {
        let name = match side {
            Side::Unstable => "unstable",
            Side::Stable => "stable",
        };
        let mut row = vec![num(mu), num(nu), name.to_string()];
        match r {
            Ok(sol) => {
                row.extend([
                    num(sol.seed_time),
                    num(sol.origin_state[0].re),
                    num(sol.origin_state[2].re),
                    num(sol.origin_state[3].re),
                    short(sol.section_residual.to_f64()),
                    short(sol.seed_mismatch),
                    short(sol.energy_drift.to_f64()),
                    "ok".into(),
                ]);
            }
            Err(e) => {
                row.resize(cols.len() - 1, String::new());
                row.push(format!("{}: {e}", e.kind()));
                first.get_or_insert(e);
            }
        }
        t.push(row);
    }
    Ok((t, first))
}

pub fn split<T: Real>(h: &PolyHamiltonian, s: &Settings, a: &TraceArgs) -> Result<(Table, Option<Error>), Failure> {
    let nu = nu::<T>(s)?;
    let pts = mu_points::<T>(h, s)?;
    let cfg = manifold_config::<T>(s, a);
    let cols = [
        "mu", "nu", "eps", "lambda", "omega", "e_e1", "e_e1_error", "noise", "upper_bound", "scaled_log", "theta1_re", "theta1_im",
        "theta1_drift", "energy_drift", "energy_mismatch", "seed_mismatch", "t_seed", "status",
    ];
    let mut t = Table::new("split", T::BITS, &cols);
    let err = sweep_rows(&mut t, s.jobs, pts, |mu| {
        let run = manifolds::split(h, mu, nu, &cfg)?;
        let m = &run.measurement;
        Ok(vec![
            num(mu),
            num(nu),
            num(run.eps),
            num(m.lambda),
            num(m.omega),
            num(m.e_e1),
            short(m.e_e1_error.to_f64()),
            short(m.noise.to_f64()),
            m.upper_bound.to_string(),
            if m.e_e1.is_zero() { String::new() } else { short(m.scaled_log()) },
            num(m.theta[0].re),
            num(m.theta[0].im),
            short(m.theta1_drift.to_f64()),
            short(m.energy_drift.to_f64()),
            short(m.energy_mismatch.to_f64()),
            short(m.seed_mismatch),
            num(m.t_seed),
        ])
    });
    Ok((t, err))
}

pub fn stokes_config<T: Real>(s: &Settings, a: &StokesArgs) -> StokesConfig {
    let mut integrator = integrator::<T>(s);
    integrator.blowup = 1e40;
    let mut cfg = StokesConfig::default().with_integrator(integrator);
    cfg.tau_match = a.tau_match;
    cfg.nu_order = a.nu_order;
    cfg.target_digits = a.target_digits;
    if !a.t_list.is_empty() {
        cfg.t_list = Some(a.t_list.clone());
    }
    if let Some(n) = s.order {
        cfg.series_terms = n as i32;
    }
    cfg
}

fn pair<T: Real>(z: C<T>) -> serde_json::Value {
    serde_json::json!([num(z.re), num(z.im)])
}

pub fn stokes_json<T: Real>(h: &PolyHamiltonian, s: &Settings, a: &StokesArgs) -> Result<serde_json::Value, Error> {
    let nu = T::parse(s.nu.trim()).ok_or_else(|| Error::Precondition(format!("bad nu `{}`", s.nu)))?;
    let cfg = stokes_config::<T>(s, a);
    let r = sweep::with_jobs(s.jobs, || stokes::stokes(h, nu, &cfg))?;
    let samples: Vec<serde_json::Value> = r
        .pairing_samples
        .iter()
        .map(|(im, v)| serde_json::json!({"im_tau": im, "value": pair(*v)}))
        .collect();
    let fit = r.fit.map(|f| {
        serde_json::json!({"rate": f.rate, "power": f.power, "amplitude": f.amplitude, "residual": f.residual})
    });
    Ok(serde_json::json!({
        "command": "stokes",
        "precision": T::BITS,
        "nu": num(nu),
        "omega0": num(r.omega0),
        "b0": pair(r.b0),
        "bn": r.bn.iter().map(|b| pair(*b)).collect::<Vec<_>>(),
        "a0": num(r.an[0]),
        "an": r.an.iter().map(|a| num(*a)).collect::<Vec<_>>(),
        "fit": fit,
        "samples": samples,
        "sensitivity": r.sensitivity,
        "noise": r.noise,
        "upper_bound": r.upper_bound,
        "reliable": r.reliable,
        "matching_residual": r.matching_residual,
        "eta_partner_drift": r.eta_partner_drift,
        "series_resonance": r.series_resonance,
    }))
}

pub fn melnikov<T: Real>(h: &PolyHamiltonian, s: &Settings) -> Result<(Table, Option<Error>), Failure> {
    let pts = mu_points::<T>(h, s)?;
    let problem = MelnikovProblem::from_model(h, Frame::Original).map_err(Failure::input)?;
    let cols = [
        "mu", "eps", "quadrature_re", "quadrature_im", "quadrature_error", "residue_re", "residue_im", "rel_diff",
        "status",
    ];
    let mut t = Table::new("melnikov", T::BITS, &cols);
    let qcfg = QuadratureConfig::default();
    let err = sweep_rows(&mut t, s.jobs, pts, |mu| {
        let q = melnikov_quadrature(&problem, mu, &qcfg)?;
        let (re, im, rel) = match melnikov_exact_residue(&problem, mu) {
            Ok(e) => {
                let rel = (cabs(q.m - e.m) / cabs(e.m)).to_f64();
                (num(e.m.re), num(e.m.im), short(rel))
            }
            Err(_) => (String::new(), String::new(), String::new()),
        };
        Ok(vec![num(mu), num(q.eps), num(q.m.re), num(q.m.im), short(q.error), re, im, rel])
    });
    Ok((t, err))
}

/// The invariant suite on the selected model: one row per check.
pub fn verify<T: Real>(h: &PolyHamiltonian, s: &Settings) -> Result<(Table, Option<Error>), Failure> {
    let mut t = Table::new("verify", T::BITS, &["check", "status", "detail"]);
    let mut failed = None;
    let mut record = |name: &str, outcome: Result<(bool, String), Error>| {
        let (status, detail) = match outcome {
            Ok((true, d)) => ("pass", d),
            Ok((false, d)) => ("fail", d),
            // a violated precondition means the check does not apply to this model
            Err(e @ Error::Precondition(_)) => ("skip", e.to_string()),
            Err(e) => ("fail", format!("{}: {e}", e.kind())),
        };
        if status == "fail" && failed.is_none() {
            failed = Some(Error::Unreliable(format!("check {name} failed")));
        }
        t.push(vec![name.to_string(), status.to_string(), detail]);
    };
    let v = h.potential_coeffs();
    let order = 6;

    record(
        "formal_residual_slope",
        (|| {
            let sep = formal_separatrix(&v, order)?;
            let res: Vec<f64> = [0.1, 0.05]
                .iter()
                .map(|&e| cabs(sep.ode_residual(&v, T::from_f64(e), C::new(T::one(), T::zero()), order)).to_f64())
                .collect();
            let floor = T::epsilon().to_f64() * 1e3;
            if res[0] < floor {
                return Ok((true, format!("series terminates, residual {:.3e}", res[0])));
            }
            let slope = (res[0] / res[1]).ln() / 2f64.ln();
            let want = 2.0 * order as f64 + 2.0;
            Ok(((slope - want).abs() <= 0.5, format!("slope {slope:.3}, expected {want}")))
        })(),
    );

    record(
        "laurent_first_order_vanishes",
        (|| {
            let sep = formal_separatrix(&v, 14)?;
            let u = formal_u(&h.action_coupling()?, &sep);
            let lx = reexpand_at_singularity(&sep, &u, 1, 12)?;
            let ok = lx.a[1].is_empty() && lx.b[1].is_empty();
            Ok((ok, format!("{} nonzero coefficients", lx.a[1].len() + lx.b[1].len())))
        })(),
    );

    let mu = T::from_f64(0.01);
    record(
        "saddle_center",
        manifolds::equilibrium(h, mu, T::zero()).map(|eq| {
            let ok = eq.lambda > T::zero() && eq.omega > T::zero() && eq.residual.to_f64() < 1e-20;
            (ok, format!("lambda {} omega {}", short(eq.lambda.to_f64()), short(eq.omega.to_f64())))
        }),
    );

    if !h.perturbation().is_empty() {
        record(
            "melnikov_quadrature_vs_residue",
            (|| {
                let p = MelnikovProblem::from_model(h, Frame::Original)?;
                let mu = p.mu_for_eps(T::from_f64(0.4));
                let q = melnikov_quadrature(&p, mu, &QuadratureConfig::default())?;
                let e = melnikov_exact_residue(&p, mu)?;
                let rel = (cabs(q.m - e.m) / cabs(e.m)).to_f64();
                Ok((rel <= 1e-8, format!("relative difference {rel:.3e}")))
            })(),
        );
    }

    let mcfg = ManifoldConfig::with_integrator(integrator::<T>(s));
    record(
        "integrable_split_null",
        manifolds::split(h, mu, T::zero(), &mcfg).map(|run| {
            let m = run.measurement;
            (m.e_e1.is_zero() || m.upper_bound, format!("E_e1 {} noise {}", short(m.e_e1.to_f64()), short(m.noise.to_f64())))
        }),
    );

    let a = StokesArgs::default();
    let cfg = stokes_config::<T>(s, &a);
    record(
        "integrable_stokes_null",
        stokes::stokes(h, T::zero(), &cfg).map(|r| (cabs(r.b0).is_zero(), format!("b0 {}", short(cabs(r.b0).to_f64())))),
    );
    if !h.perturbation().is_empty() {
        record(
            "stokes_convergence_rate",
            stokes::stokes(h, T::from_f64(0.01), &cfg).map(|r| {
                let rate = r.fit.map_or(f64::NAN, |f| f.rate);
                let w0 = r.omega0.to_f64();
                ((rate / w0 - 1.0).abs() <= 0.2 && r.reliable, format!("rate {rate:.4}, omega0 {w0}"))
            }),
        );
    }
    Ok((t, failed))
}
