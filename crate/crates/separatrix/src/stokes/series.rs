//! Formal inner solutions as double series in `nu` and `w = 1/tau`.
//!
//! At fixed `nu` the coupling feeds a `nu^2 x1` term back into the slow
//! equation, so a single series in `w` does not close order by order. Each
//! power of `nu` does: the slow block is a triangular recursion with a
//! resonance at `w^3` (the time shift, set to zero) and the elliptic block is
//! algebraic. Positive powers of `tau` appear from `nu^4` on, which is why
//! indices start below zero.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hamiltonian::PolyHamiltonian;
use crate::numeric::{cabs, cexp, cre, Real, C};

/// Index window `lo..=hi` in powers of `w` and the highest power of `nu`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub lo: i32,
    pub hi: i32,
    pub nu_order: usize,
}

impl Shape {
    fn width(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }
}

/// `sum_{j, n} c[j][n - lo] nu^j w^n`.
#[derive(Clone, Debug)]
pub struct DoubleSeries<T> {
    shape: Shape,
    c: Vec<Vec<C<T>>>,
}

impl<T: Real> DoubleSeries<T> {
    pub fn zeros(shape: Shape) -> Self {
        DoubleSeries { shape, c: vec![vec![C::zero(); shape.width()]; shape.nu_order + 1] }
    }

    pub fn constant(shape: Shape, v: C<T>) -> Self {
        let mut s = Self::zeros(shape);
        s.set(0, 0, v);
        s
    }

    pub fn get(&self, j: usize, n: i32) -> C<T> {
        if j > self.shape.nu_order || n < self.shape.lo || n > self.shape.hi {
            return C::zero();
        }
        self.c[j][(n - self.shape.lo) as usize]
    }

    pub fn set(&mut self, j: usize, n: i32, v: C<T>) {
        if j <= self.shape.nu_order && n >= self.shape.lo && n <= self.shape.hi {
            self.c[j][(n - self.shape.lo) as usize] = v;
        }
    }

    fn add_scaled(&mut self, o: &DoubleSeries<T>, k: C<T>, nu_shift: usize) {
        for j in 0..=self.shape.nu_order.saturating_sub(nu_shift) {
            if j + nu_shift > self.shape.nu_order {
                break;
            }
            for (dst, src) in self.c[j + nu_shift].iter_mut().zip(&o.c[j]) {
                *dst += *src * k;
            }
        }
    }

    /// Product truncated to the window; the top `|lo|`-ish indices are incomplete.
    pub fn mul(&self, o: &DoubleSeries<T>) -> DoubleSeries<T> {
        let s = self.shape;
        let mut out = Self::zeros(s);
        let w = s.width() as i32;
        for j1 in 0..=s.nu_order {
            for (i1, a) in self.c[j1].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for j2 in 0..=s.nu_order - j1 {
                    let row = &mut out.c[j1 + j2];
                    for (i2, b) in o.c[j2].iter().enumerate() {
                        // n = n1 + n2 maps to index i1 + i2 + lo
                        let idx = i1 as i32 + i2 as i32 + s.lo;
                        if idx < 0 {
                            continue;
                        }
                        if idx >= w {
                            break;
                        }
                        row[idx as usize] += *a * *b;
                    }
                }
            }
        }
        out
    }

    /// Keep only the powers of `nu` below `j`.
    pub fn below(&self, j: usize) -> DoubleSeries<T> {
        let mut out = self.clone();
        for row in out.c.iter_mut().skip(j) {
            row.iter_mut().for_each(|v| *v = C::zero());
        }
        out
    }

    /// `sum_j nu^j c[j][n]`.
    fn collapse(&self, nu: T, n: i32) -> C<T> {
        let mut acc = C::<T>::zero();
        let mut p = T::one();
        for j in 0..=self.shape.nu_order {
            acc += self.get(j, n) * cre(p);
            p *= nu;
        }
        acc
    }
}

/// Polynomial in `(x1, y1, x2, y2)` with coefficients carrying powers of `nu`.
#[derive(Clone, Debug)]
pub struct NuPoly<T> {
    terms: Vec<([u32; 4], u32, T)>,
}

impl<T: Real> NuPoly<T> {
    fn derivative(&self, var: usize) -> NuPoly<T> {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _, _)| e[var] > 0)
            .map(|(e, k, c)| {
                let mut e = *e;
                let f = T::from_f64(e[var] as f64);
                e[var] -= 1;
                (e, *k, *c * f)
            })
            .collect();
        NuPoly { terms }
    }

    fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, _, c)| c.is_zero())
    }

    fn eval(&self, x: &[DoubleSeries<T>; 4], shape: Shape) -> DoubleSeries<T> {
        let mut maxp = [0u32; 4];
        for (e, _, _) in &self.terms {
            for k in 0..4 {
                maxp[k] = maxp[k].max(e[k]);
            }
        }
        let one = DoubleSeries::constant(shape, cre(T::one()));
        let powers: Vec<Vec<DoubleSeries<T>>> = (0..4)
            .map(|k| {
                let mut v = vec![one.clone()];
                for p in 1..=maxp[k] as usize {
                    let next = v[p - 1].mul(&x[k]);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = DoubleSeries::zeros(shape);
        for (e, k, c) in &self.terms {
            if *k as usize > shape.nu_order {
                continue;
            }
            let mut m: Option<DoubleSeries<T>> = None;
            for var in 0..4 {
                if e[var] == 0 {
                    continue;
                }
                let f = &powers[var][e[var] as usize];
                m = Some(match m {
                    None => f.clone(),
                    Some(acc) => acc.mul(f),
                });
            }
            let m = m.unwrap_or_else(|| one.clone());
            out.add_scaled(&m, cre(*c), *k as usize);
        }
        out
    }
}

/// `x' = J grad H` at `mu = 0`, keeping `nu` symbolic.
pub fn inner_field<T: Real>(h: &PolyHamiltonian) -> [NuPoly<T>; 4] {
    let mut comps: [Vec<([u32; 4], u32, T)>; 4] = Default::default();
    for (e, c) in h.terms() {
        if e[4] != 0 {
            continue;
        }
        let c = T::from_rational(c);
        let mono = [e[0], e[1], e[2], e[3]];
        // (component, variable differentiated, sign)
        for (comp, var, sign) in [(0usize, 1usize, 1.0), (1, 0, -1.0), (2, 3, 1.0), (3, 2, -1.0)] {
            if mono[var] == 0 {
                continue;
            }
            let mut d = mono;
            d[var] -= 1;
            comps[comp].push((d, e[5], c * T::from_f64(sign * mono[var] as f64)));
        }
    }
    comps.map(|terms| NuPoly { terms })
}

/// Inner separatrix `X0` and the elliptic solution `eta0 = e^{i omega0 tau} zeta`
/// as double series, with the numerical `nu` they are summed at.
#[derive(Clone, Debug)]
pub struct InnerSeries<T> {
    pub shape: Shape,
    pub nu: T,
    pub omega0: T,
    /// Leading coefficient of `x1 ~ kappa tau^-2`.
    pub kappa: T,
    pub x: [DoubleSeries<T>; 4],
    pub zeta: [DoubleSeries<T>; 4],
    /// Largest numerator met at a resonant index; nonzero means log terms.
    pub resonance: f64,
    /// Largest violation of the elliptic solvability condition at `w^1`.
    pub solvability: f64,
    /// Highest index trusted after product truncation.
    pub usable: i32,
}

fn block_error(what: &str) -> Error {
    Error::Precondition(format!("inner linearization is not block diagonal: {what}"))
}

impl<T: Real> InnerSeries<T> {
    pub fn solve(h: &PolyHamiltonian, nu: T, shape: Shape) -> Result<Self> {
        h.check_mechanical()?;
        let field = inner_field::<T>(h);
        let omega0 = T::from_rational(&h.omega0()?);
        let v = h.potential_coeffs();
        let v03 = v.get(&(0, 3)).map(T::from_rational).unwrap_or_else(T::zero);
        if v03.is_zero() {
            return Err(Error::Precondition("inner problem needs a cubic term in the potential".into()));
        }
        let kappa = -T::from_f64(2.0) / v03;
        let potential: Vec<(u32, T)> =
            v.iter().filter(|((k, l), _)| *k == 0 && *l >= 3).map(|((_, l), c)| (*l, T::from_rational(c))).collect();
        let mut resonance = 0.0f64;

        // nu^0: planar solution of x1'' = -V0'(x1), x1 = sum p_k w^k from k = 2
        let hi = shape.hi;
        let mut p = vec![T::zero(); (hi + 3) as usize];
        p[2] = kappa;
        let coeff_of_power = |p: &[T], q: u32, idx: usize| -> T {
            // coefficient of w^idx in (sum p_k w^k)^q
            let mut cur = vec![T::zero(); idx + 1];
            cur[0] = T::one();
            for _ in 0..q {
                let mut next = vec![T::zero(); idx + 1];
                for (i, a) in cur.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (k, b) in p.iter().enumerate().take(idx + 1 - i) {
                        next[i + k] += *a * *b;
                    }
                }
                cur = next;
            }
            cur[idx]
        };
        for k in 3..=(hi as usize) {
            let mut s = T::zero();
            for (l, c) in &potential {
                s += *c * T::from_f64(*l as f64) * coeff_of_power(&p, l - 1, k + 2);
            }
            let den = T::from_f64((k * (k + 1)) as f64) - T::from_f64(12.0);
            if k == 3 {
                resonance = resonance.max(s.abs().to_f64());
                continue;
            }
            p[k] = -s / den;
        }
        let mut x: [DoubleSeries<T>; 4] = std::array::from_fn(|_| DoubleSeries::zeros(shape));
        for k in 2..=hi {
            x[0].set(0, k, cre(p[k as usize]));
            x[1].set(0, k + 1, cre(-T::from_f64(k as f64) * p[k as usize]));
        }

        // the nu^0 linearization along X0
        let zero_x = x.clone();
        let jac: Vec<Vec<NuPoly<T>>> = field.iter().map(|f| (0..4).map(|k| f.derivative(k)).collect()).collect();
        let a0: Vec<Vec<DoubleSeries<T>>> =
            jac.iter().map(|row| row.iter().map(|d| d.eval(&zero_x, shape).below(1)).collect()).collect();
        let tol = T::epsilon().to_f64() * 1e3;
        for i in 0..4 {
            for k in 0..4 {
                let allowed = matches!((i, k), (0, 1) | (1, 0) | (2, 3) | (3, 2));
                if !allowed && (shape.lo..=hi).any(|n| cabs(a0[i][k].get(0, n)).to_f64() > tol) {
                    return Err(block_error(&format!("entry ({i}, {k})")));
                }
            }
        }
        if (cabs(a0[0][1].get(0, 0) - cre(T::one()))).to_f64() > tol || (shape.lo..=hi).any(|n| n != 0 && cabs(a0[0][1].get(0, n)).to_f64() > tol) {
            return Err(block_error("x1' = y1"));
        }
        // y1' = -h x1 and x2' = g y2, y2' = -g x2
        let hcoef = |n: i32| -a0[1][0].get(0, n);
        let g = |n: i32| a0[2][3].get(0, n);
        if cabs(g(1)).to_f64() > tol || cabs(g(0) - cre(omega0)).to_f64() > tol {
            return Err(block_error("elliptic frequency along X0"));
        }
        let h2 = hcoef(2);
        let w0 = cre(omega0);
        let lo = shape.lo;

        for j in 1..=shape.nu_order {
            let trunc: [DoubleSeries<T>; 4] = std::array::from_fn(|k| x[k].below(j));
            let forcing: Vec<DoubleSeries<T>> = field.iter().map(|f| f.eval(&trunc, shape)).collect();
            let f = |c: usize, n: i32| forcing[c].get(j, n);
            // slow block
            for k in lo..=hi {
                let mut num = f(1, k + 2) - cre(T::from_f64((k + 1) as f64)) * f(0, k + 1);
                for m in 3..=(k + 2 - lo) {
                    num -= hcoef(m) * x[0].get(j, k + 2 - m);
                }
                let den = cre(T::from_f64((k * (k + 1)) as f64)) + h2;
                if k == 3 || k == -4 {
                    resonance = resonance.max(cabs(num).to_f64());
                    continue;
                }
                x[0].set(j, k, num / den);
            }
            for k in lo..=hi {
                let v = -cre(T::from_f64((k - 1) as f64)) * x[0].get(j, k - 1) - f(0, k);
                x[1].set(j, k, v);
            }
            // elliptic block
            for n in lo..=hi {
                let nm1 = cre(T::from_f64((n - 1) as f64));
                let mut s = -nm1 * x[2].get(j, n - 1) - f(2, n);
                let mut r = nm1 * x[3].get(j, n - 1) + f(3, n);
                for m in 2..=(n - lo) {
                    s -= g(m) * x[3].get(j, n - m);
                    r -= g(m) * x[2].get(j, n - m);
                }
                x[3].set(j, n, s / w0);
                x[2].set(j, n, r / w0);
            }
        }

        // eta0 = e^{i omega0 tau} zeta along the full X0
        let a_full: Vec<Vec<DoubleSeries<T>>> =
            jac.iter().map(|row| row.iter().map(|d| d.eval(&x, shape)).collect()).collect();
        let i = C::new(T::zero(), T::one());
        let mut zeta: [DoubleSeries<T>; 4] = std::array::from_fn(|_| DoubleSeries::zeros(shape));
        let mut solvability = 0.0f64;
        for j in 0..=shape.nu_order {
            let mut forcing: Vec<DoubleSeries<T>> = vec![DoubleSeries::zeros(shape); 4];
            if j > 0 {
                let trunc: Vec<DoubleSeries<T>> = zeta.iter().map(|z| z.below(j)).collect();
                for r in 0..4 {
                    for k in 0..4 {
                        if jac[r][k].is_zero() || a_full[r][k].c.iter().all(|row| row.iter().all(|v| v.is_zero())) {
                            continue;
                        }
                        let prod = a_full[r][k].mul(&trunc[k]);
                        forcing[r].add_scaled(&prod, cre(T::one()), 0);
                    }
                }
            }
            let gf = |c: usize, n: i32| forcing[c].get(j, n);
            // slow block
            for n in lo..=hi {
                let nm1 = cre(T::from_f64((n - 1) as f64));
                let mut ha = C::<T>::zero();
                for m in 2..=(n - lo) {
                    ha += hcoef(m) * zeta[0].get(j, n - m);
                }
                let rhs = gf(1, n) - ha + nm1 * zeta[1].get(j, n - 1) + i * w0 * nm1 * zeta[0].get(j, n - 1) + i * w0 * gf(0, n);
                let a = -rhs / (w0 * w0);
                let b = i * w0 * a - nm1 * zeta[0].get(j, n - 1) - gf(0, n);
                zeta[0].set(j, n, a);
                zeta[1].set(j, n, b);
            }
            // elliptic block in the basis (1, i), (1, -i)
            let width = shape.width();
            let mut alpha = vec![C::<T>::zero(); width];
            let mut beta = vec![C::<T>::zero(); width];
            let at = |v: &Vec<C<T>>, n: i32| if n < lo || n > hi { C::zero() } else { v[(n - lo) as usize] };
            if j == 0 {
                alpha[(0 - lo) as usize] = cre(T::one());
            }
            for n in lo..=hi {
                let nm1 = cre(T::from_f64((n - 1) as f64));
                let mut rc = gf(2, n) + nm1 * at(&beta, n - 1);
                let mut rd = gf(3, n) - i * nm1 * at(&beta, n - 1);
                for m in 2..=(n - lo) {
                    let (am, bm) = (at(&alpha, n - m), at(&beta, n - m));
                    let (cm, dm) = (am + bm, i * (am - bm));
                    rc += g(m) * dm;
                    rd -= g(m) * cm;
                }
                let cond = rc - i * rd;
                if n == 1 {
                    solvability = solvability.max(cabs(cond).to_f64());
                } else if n > lo {
                    let a = -cond / (cre(T::from_f64(2.0)) * nm1);
                    alpha[(n - 1 - lo) as usize] = a;
                    rc += nm1 * a;
                    rd += nm1 * i * a;
                }
                let rho = (rc + i * rd) / cre(T::from_f64(2.0));
                beta[(n - lo) as usize] = rho / (cre(T::from_f64(2.0)) * i * w0);
            }
            for n in lo..=hi {
                let (a, b) = (at(&alpha, n), at(&beta, n));
                zeta[2].set(j, n, a + b);
                zeta[3].set(j, n, i * (a - b));
            }
        }
        // products lose as many top indices as the series reach below zero
        let lowest = x
            .iter()
            .chain(zeta.iter())
            .filter_map(|s| (lo..=hi).find(|&n| (0..=shape.nu_order).any(|j| !s.get(j, n).is_zero())))
            .min()
            .unwrap_or(0)
            .min(0);
        let usable = hi - 4 * (-lowest) - 4;
        Ok(InnerSeries { shape, nu, omega0, kappa, x, zeta, resonance, solvability, usable })
    }

    /// Sum with optimal truncation: stop before the first index past `w^4`
    /// where the collapsed terms start to grow. Returns the sum and the last index used.
    fn sum(&self, comps: &[DoubleSeries<T>; 4], tau: C<T>, n_max: Option<i32>) -> ([C<T>; 4], i32) {
        let w = C::new(T::one(), T::zero()) / tau;
        let top = n_max.unwrap_or(self.usable).min(self.usable);
        let lo = self.shape.lo;
        let mut wp = C::new(T::one(), T::zero());
        for _ in 0..(-lo) {
            wp /= w;
        }
        let mut out = [C::<T>::zero(); 4];
        let mut prev = f64::INFINITY;
        let mut last = lo;
        for n in lo..=top {
            let terms: [C<T>; 4] = std::array::from_fn(|k| comps[k].collapse(self.nu, n) * wp);
            let size = terms.iter().fold(0.0f64, |m, t| m.max(cabs(*t).to_f64()));
            if n_max.is_none() && n > 4 && size > prev && size > 0.0 {
                break;
            }
            if size > 0.0 {
                prev = size;
            }
            for k in 0..4 {
                out[k] += terms[k];
            }
            last = n;
            wp *= w;
        }
        (out, last)
    }

    pub fn eval_x(&self, tau: C<T>) -> ([C<T>; 4], i32) {
        self.sum(&self.x, tau, None)
    }

    pub fn eval_x_to(&self, tau: C<T>, n_max: i32) -> [C<T>; 4] {
        self.sum(&self.x, tau, Some(n_max)).0
    }

    pub fn eval_eta(&self, tau: C<T>) -> ([C<T>; 4], i32) {
        let (z, n) = self.sum(&self.zeta, tau, None);
        let phase = cexp(C::new(T::zero(), self.omega0) * tau);
        (z.map(|v| v * phase), n)
    }

    /// Derivative of the truncated series in `tau`, term by term.
    pub fn eval_x_derivative_to(&self, tau: C<T>, n_max: i32) -> [C<T>; 4] {
        let mut d: [DoubleSeries<T>; 4] = std::array::from_fn(|_| DoubleSeries::zeros(self.shape));
        for k in 0..4 {
            for j in 0..=self.shape.nu_order {
                for n in self.shape.lo..=n_max.min(self.shape.hi - 1) {
                    // d/dtau w^n = -n w^{n+1}
                    d[k].set(j, n + 1, -cre(T::from_f64(n as f64)) * self.x[k].get(j, n));
                }
            }
        }
        self.sum(&d, tau, Some(n_max + 1)).0
    }
}
