use std::collections::HashMap;

use num_traits::Zero;

use crate::hamiltonian::PhasePoly;
use crate::numeric::{Real, C};

#[derive(Clone, Copy, Debug)]
enum Node {
    Var(usize),
    /// Product of an earlier node with a variable.
    Mul(usize, usize),
}

/// Polynomial vector field in `n` complex variables, stored as a DAG of
/// monomial products so that Taylor coefficients reuse shared prefixes.
#[derive(Clone, Debug)]
pub struct PolyField<T> {
    dim: usize,
    nodes: Vec<Node>,
    /// Per component: constant term and `(node, coefficient)` pairs.
    components: Vec<(C<T>, Vec<(usize, C<T>)>)>,
}

struct Builder {
    dim: usize,
    nodes: Vec<Node>,
    index: HashMap<Vec<u32>, usize>,
}

impl Builder {
    fn new(dim: usize) -> Self {
        let mut b = Builder { dim, nodes: Vec::new(), index: HashMap::new() };
        for j in 0..dim {
            let mut e = vec![0; dim];
            e[j] = 1;
            b.index.insert(e, j);
            b.nodes.push(Node::Var(j));
        }
        b
    }

    fn node(&mut self, e: &[u32]) -> usize {
        if let Some(&k) = self.index.get(e) {
            return k;
        }
        let j = (0..self.dim).rev().find(|&j| e[j] > 0).expect("constant monomial has no node");
        let mut rest = e.to_vec();
        rest[j] -= 1;
        let left = self.node(&rest);
        self.nodes.push(Node::Mul(left, j));
        let k = self.nodes.len() - 1;
        self.index.insert(e.to_vec(), k);
        k
    }
}

impl<T: Real> PolyField<T> {
    /// Build from components given as `(exponents, coefficient)` lists.
    pub fn new(dim: usize, components: &[Vec<(Vec<u32>, C<T>)>]) -> Self {
        assert_eq!(components.len(), dim);
        let mut b = Builder::new(dim);
        let comps = components
            .iter()
            .map(|terms| {
                let mut constant = C::<T>::zero();
                let mut acc: Vec<(usize, C<T>)> = Vec::new();
                for (e, c) in terms {
                    assert_eq!(e.len(), dim);
                    if c.is_zero() {
                        continue;
                    }
                    if e.iter().all(|&p| p == 0) {
                        constant += *c;
                    } else {
                        let k = b.node(e);
                        match acc.iter_mut().find(|(n, _)| *n == k) {
                            Some(slot) => slot.1 += *c,
                            None => acc.push((k, *c)),
                        }
                    }
                }
                (constant, acc)
            })
            .collect();
        PolyField { dim, nodes: b.nodes, components: comps }
    }

    /// Hamiltonian field `J grad H` co-integrated with `variations` copies of
    /// its linearization.
    pub fn hamiltonian(h: &PhasePoly<T>, variations: usize) -> Self {
        let dim = 4 * (1 + variations);
        let field = h.field_polys();
        let mut comps: Vec<Vec<(Vec<u32>, C<T>)>> = Vec::with_capacity(dim);
        let lift = |e: &[u32; 4]| -> Vec<u32> {
            let mut v = vec![0; dim];
            v[..4].copy_from_slice(e);
            v
        };
        for f in &field {
            comps.push(f.terms().iter().map(|(e, c)| (lift(e), C::new(*c, T::zero()))).collect());
        }
        for v in 0..variations {
            let base = 4 * (v + 1);
            for f in &field {
                let mut terms = Vec::new();
                for j in 0..4 {
                    for (e, c) in f.derivative(j).terms() {
                        let mut ex = lift(e);
                        ex[base + j] += 1;
                        terms.push((ex, C::new(*c, T::zero())));
                    }
                }
                comps.push(terms);
            }
        }
        PolyField::new(dim, &comps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn eval(&self, x: &[C<T>]) -> Vec<C<T>> {
        let mut vals: Vec<C<T>> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match *node {
                Node::Var(j) => x[j],
                Node::Mul(a, j) => vals[a] * x[j],
            };
            vals.push(v);
        }
        self.components
            .iter()
            .map(|(c0, terms)| terms.iter().fold(*c0, |acc, (k, c)| acc + *c * vals[*k]))
            .collect()
    }

    /// Taylor coefficients `a[k][i]`, `k = 0..=order`, of the solution through `x0`.
    pub fn taylor(&self, x0: &[C<T>], order: usize) -> Vec<Vec<C<T>>> {
        let n = self.nodes.len();
        let mut series: Vec<Vec<C<T>>> = vec![Vec::with_capacity(order + 1); n];
        let mut coeffs: Vec<Vec<C<T>>> = Vec::with_capacity(order + 1);
        coeffs.push(x0.to_vec());
        for k in 0..=order {
            for idx in 0..n {
                let v = match self.nodes[idx] {
                    Node::Var(j) => coeffs[k][j],
                    Node::Mul(a, j) => {
                        let mut acc = C::<T>::zero();
                        for i in 0..=k {
                            acc += series[a][i] * coeffs[k - i][j];
                        }
                        acc
                    }
                };
                series[idx].push(v);
            }
            if k == order {
                break;
            }
            let scale = T::one() / T::from_f64((k + 1) as f64);
            let next: Vec<C<T>> = self
                .components
                .iter()
                .map(|(c0, terms)| {
                    let mut acc = if k == 0 { *c0 } else { C::zero() };
                    for (idx, c) in terms {
                        acc += *c * series[*idx][k];
                    }
                    acc * scale
                })
                .collect();
            coeffs.push(next);
        }
        coeffs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::cf64;

    #[test]
    fn shared_monomials() {
        // x' = x^2 y, y' = x^2
        let c = cf64::<f64>(1.0, 0.0);
        let f = PolyField::new(2, &[vec![(vec![2, 1], c)], vec![(vec![2, 0], c)]]);
        assert_eq!(f.node_count(), 4);
        let v = f.eval(&[cf64(2.0, 0.0), cf64(3.0, 0.0)]);
        assert_eq!(v, vec![cf64(12.0, 0.0), cf64(4.0, 0.0)]);
    }

    #[test]
    fn taylor_of_riccati() {
        // x' = x^2, x(0) = 1 has x = 1/(1-t): all coefficients one
        let f = PolyField::new(1, &[vec![(vec![2], cf64::<f64>(1.0, 0.0))]]);
        let a = f.taylor(&[cf64(1.0, 0.0)], 12);
        for ak in &a {
            assert!((ak[0] - cf64(1.0, 0.0)).norm() < 1e-14);
        }
        // x' = 1 + x^2 has tan: coefficients 0, 1, 0, 1/3, 0, 2/15
        let f = PolyField::new(1, &[vec![(vec![0], cf64::<f64>(1.0, 0.0)), (vec![2], cf64(1.0, 0.0))]]);
        let a = f.taylor(&[cf64(0.0, 0.0)], 5);
        let want = [0.0, 1.0, 0.0, 1.0 / 3.0, 0.0, 2.0 / 15.0];
        for (ak, w) in a.iter().zip(want) {
            assert!((ak[0].re - w).abs() < 1e-15);
        }
    }
}
