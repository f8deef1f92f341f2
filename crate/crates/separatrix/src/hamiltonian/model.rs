use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::phase::PhasePoly;
use crate::error::{Error, Result};
use crate::numeric::{parse_rational, rational_to_string, Real};

/// Exponents of `(x1, y1, x2, y2, mu, nu)`.
pub type Exponents = [u32; 6];

pub const VARIABLE_NAMES: [&str; 6] = ["x1", "y1", "x2", "y2", "mu", "nu"];

/// Names accepted for model constants in a definition file.
pub const CONSTANT_NAMES: [&str; 4] = ["a", "b", "c", "omega0"];

/// Sparse polynomial Hamiltonian with exact rational coefficients, depending
/// polynomially on the parameters `mu` and `nu`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolyHamiltonian {
    terms: BTreeMap<Exponents, BigRational>,
    constants: BTreeMap<String, BigRational>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl PolyHamiltonian {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a monomial, rejecting a repeated multi-index.
    pub fn insert(&mut self, exps: Exponents, coeff: BigRational) -> Result<()> {
        if self.terms.contains_key(&exps) {
            return Err(Error::DuplicateTerm(exps));
        }
        self.terms.insert(exps, coeff);
        Ok(())
    }

    /// Add to a monomial, merging with any existing coefficient.
    pub fn accumulate(&mut self, exps: Exponents, coeff: BigRational) {
        let entry = self.terms.entry(exps).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn set_constant(&mut self, name: &str, value: BigRational) {
        self.constants.insert(name.to_string(), value);
    }

    pub fn constant(&self, name: &str) -> Option<&BigRational> {
        self.constants.get(name)
    }

    pub fn constants(&self) -> &BTreeMap<String, BigRational> {
        &self.constants
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &Exponents) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `y1^2/2 + omega0 I - a mu x1 + b x1^3/3 + c x1 I` with `I = (x2^2 + y2^2)/2`.
    pub fn cubic_model(a: BigRational, b: BigRational, c: BigRational, omega0: BigRational) -> Self {
        let mut h = PolyHamiltonian::new();
        let half = rat(1, 2);
        h.accumulate([0, 2, 0, 0, 0, 0], half.clone());
        h.accumulate([0, 0, 2, 0, 0, 0], &omega0 * &half);
        h.accumulate([0, 0, 0, 2, 0, 0], &omega0 * &half);
        h.accumulate([1, 0, 0, 0, 1, 0], -a.clone());
        h.accumulate([3, 0, 0, 0, 0, 0], &b / BigRational::from_integer(3.into()));
        h.accumulate([1, 0, 2, 0, 0, 0], &c * &half);
        h.accumulate([1, 0, 0, 2, 0, 0], &c * &half);
        h.set_constant("a", a);
        h.set_constant("b", b);
        h.set_constant("c", c);
        h.set_constant("omega0", omega0);
        h
    }

    /// Add `nu * r`, where `r` is given as a Hamiltonian in the same variables.
    pub fn with_perturbation(&self, r: &PolyHamiltonian) -> Self {
        let mut h = self.clone();
        for (e, c) in r.terms() {
            let mut e = *e;
            e[5] += 1;
            h.accumulate(e, c.clone());
        }
        h
    }

    /// Drop every term carrying a positive power of `mu`.
    pub fn at_mu_zero(&self) -> Self {
        let mut h = PolyHamiltonian { terms: BTreeMap::new(), constants: self.constants.clone() };
        for (e, c) in self.terms() {
            if e[4] == 0 {
                h.terms.insert(*e, c.clone());
            }
        }
        h
    }

    /// Drop every term carrying a positive power of `nu`.
    pub fn integrable_part(&self) -> Self {
        let mut h = PolyHamiltonian { terms: BTreeMap::new(), constants: self.constants.clone() };
        for (e, c) in self.terms() {
            if e[5] == 0 {
                h.terms.insert(*e, c.clone());
            }
        }
        h
    }

    /// Coefficient of `nu^1`, as a Hamiltonian without `nu`.
    pub fn perturbation(&self) -> Self {
        let mut h = PolyHamiltonian::new();
        for (e, c) in self.terms() {
            if e[5] == 1 {
                let mut e = *e;
                e[5] = 0;
                h.terms.insert(e, c.clone());
            }
        }
        h
    }

    /// Potential coefficients `v[(k, l)]` of `mu^k x1^l` at `nu = 0`.
    pub fn potential_coeffs(&self) -> BTreeMap<(u32, u32), BigRational> {
        let mut v = BTreeMap::new();
        for (e, c) in self.terms() {
            if e[1] == 0 && e[2] == 0 && e[3] == 0 && e[5] == 0 {
                v.insert((e[4], e[0]), c.clone());
            }
        }
        v
    }

    /// Coefficients `g[(k, l)]` of `mu^k x1^l I` at `nu = 0`, read from the
    /// `x2^2` terms and checked against the `y2^2` terms.
    pub fn action_coupling(&self) -> Result<BTreeMap<(u32, u32), BigRational>> {
        let mut g = BTreeMap::new();
        for (e, c) in self.terms() {
            if e[5] != 0 || e[1] != 0 {
                continue;
            }
            let key = (e[4], e[0]);
            if e[2] == 2 && e[3] == 0 {
                let other = self.coefficient(&[e[0], 0, 0, 2, e[4], 0]);
                if &other != c {
                    return Err(Error::Precondition(format!(
                        "x2^2 and y2^2 coefficients differ at x1^{} mu^{}: not a function of I",
                        e[0], e[4]
                    )));
                }
                g.insert(key, c * rat(2, 1));
            } else if e[2] == 0 && e[3] == 2 && self.coefficient(&[e[0], 0, 2, 0, e[4], 0]).is_zero() {
                return Err(Error::Precondition(format!(
                    "y2^2 term without matching x2^2 term at x1^{} mu^{}",
                    e[0], e[4]
                )));
            }
        }
        Ok(g)
    }

    /// Elliptic frequency at the origin: `dV/dI` at `x1 = mu = nu = 0`.
    pub fn omega0(&self) -> Result<BigRational> {
        if let Some(w) = self.constant("omega0") {
            return Ok(w.clone());
        }
        let g = self.action_coupling()?;
        g.get(&(0, 0))
            .cloned()
            .ok_or_else(|| Error::Precondition("no omega0 I term".into()))
    }

    /// Check `y1^2/2` is the only `y1`-dependence at `nu = 0`.
    pub fn check_mechanical(&self) -> Result<()> {
        for (e, c) in self.terms() {
            if e[5] == 0 && e[1] > 0 && !(*e == [0, 2, 0, 0, 0, 0] && *c == rat(1, 2)) {
                return Err(Error::Precondition(format!(
                    "unexpected y1 dependence in term {}",
                    monomial_string(e)
                )));
            }
        }
        if self.coefficient(&[0, 2, 0, 0, 0, 0]) != rat(1, 2) {
            return Err(Error::Precondition("kinetic term y1^2/2 missing".into()));
        }
        Ok(())
    }

    /// Specialize the parameters, giving a polynomial in the phase variables.
    pub fn specialize<T: Real>(&self, mu: T, nu: T) -> PhasePoly<T> {
        let mut acc: BTreeMap<[u32; 4], T> = BTreeMap::new();
        for (e, c) in self.terms() {
            let v = T::from_rational(c) * mu.powi(e[4] as i32) * nu.powi(e[5] as i32);
            let key = [e[0], e[1], e[2], e[3]];
            let slot = acc.entry(key).or_insert_with(T::zero);
            *slot += v;
        }
        PhasePoly::from_terms(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }

    /// Parse the definition-file format: `i1 j1 i2 j2 kmu knu coefficient`
    /// per monomial, `name = value` for constants, `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut h = PolyHamiltonian::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            if let Some((name, value)) = line.split_once('=') {
                let name = name.trim();
                let name = if name == "ω₀" || name == "omega_0" { "omega0" } else { name };
                if !CONSTANT_NAMES.contains(&name) {
                    return Err(perr(format!("unknown constant `{name}`")));
                }
                let value = parse_rational(value).ok_or_else(|| perr(format!("bad value `{}`", value.trim())))?;
                if h.constants.contains_key(name) {
                    return Err(perr(format!("constant `{name}` given twice")));
                }
                h.set_constant(name, value);
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 7 {
                return Err(perr(format!("expected 7 fields, found {}", fields.len())));
            }
            let mut exps = [0u32; 6];
            for (k, f) in fields[..6].iter().enumerate() {
                exps[k] = f.parse().map_err(|_| perr(format!("bad exponent `{f}`")))?;
            }
            let coeff = parse_rational(fields[6]).ok_or_else(|| perr(format!("bad coefficient `{}`", fields[6])))?;
            h.insert(exps, coeff).map_err(|e| perr(e.to_string()))?;
        }
        Ok(h)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (name, v) in &self.constants {
            let _ = writeln!(s, "{name} = {}", rational_to_string(v));
        }
        for (e, c) in self.terms() {
            let _ = writeln!(
                s,
                "{} {} {} {} {} {} {}",
                e[0],
                e[1],
                e[2],
                e[3],
                e[4],
                e[5],
                rational_to_string(c)
            );
        }
        s
    }

    /// Human-readable polynomial, for diagnostics.
    pub fn display(&self) -> String {
        let mut parts = Vec::new();
        for (e, c) in self.terms() {
            let m = monomial_string(e);
            let cs = rational_to_string(c);
            parts.push(if m.is_empty() {
                cs
            } else if c.is_one() {
                m
            } else if c.is_negative() && (-c).is_one() {
                format!("-{m}")
            } else {
                format!("{cs}*{m}")
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

fn monomial_string(e: &Exponents) -> String {
    let mut parts = Vec::new();
    for (k, &p) in e.iter().enumerate() {
        match p {
            0 => {}
            1 => parts.push(VARIABLE_NAMES[k].to_string()),
            _ => parts.push(format!("{}^{}", VARIABLE_NAMES[k], p)),
        }
    }
    parts.join("*")
}

/// The bundled cubic model file: `a = b = 1`, `c = 0`, `omega0 = 1`, with `R = x1 x2`.
pub const CUBIC_MODEL: &str = "\
# cubic saddle-center model, perturbed by nu*x1*x2
a = 1
b = 1
c = 0
omega0 = 1
0 2 0 0 0 0 1/2
0 0 2 0 0 0 1/2
0 0 0 2 0 0 1/2
1 0 0 0 1 0 -1
3 0 0 0 0 0 1/3
1 0 1 0 0 1 1
";
