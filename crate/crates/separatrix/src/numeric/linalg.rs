//! Dense complex linear algebra for the tiny systems that appear here.

use num_traits::Zero;

use super::{cabs, Real, C};

/// Solve `m x = rhs` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot vanishes.
pub fn solve<T: Real>(mut m: Vec<Vec<C<T>>>, mut rhs: Vec<C<T>>) -> Option<Vec<C<T>>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| {
            cabs(m[a][col]).partial_cmp(&cabs(m[b][col])).unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if cabs(m[piv][col]).is_zero() {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let v = m[col][c];
                m[r][c] -= f * v;
            }
            let v = rhs[col];
            rhs[r] -= f * v;
        }
    }
    let mut x = vec![C::<T>::zero(); n];
    for r in (0..n).rev() {
        let mut acc = rhs[r];
        for c in r + 1..n {
            acc -= m[r][c] * x[c];
        }
        x[r] = acc / m[r][r];
    }
    Some(x)
}

/// Null vector of a matrix with a one-dimensional kernel, by full pivoting.
/// The free coordinate is set to one.
pub fn null_vector<T: Real>(mut m: Vec<Vec<C<T>>>) -> Vec<C<T>> {
    let n = m.len();
    let mut cols: Vec<usize> = (0..n).collect();
    for k in 0..n - 1 {
        let mut best = (k, k);
        let mut best_abs = T::zero();
        for r in k..n {
            for c in k..n {
                let a = cabs(m[r][cols[c]]);
                if a > best_abs {
                    best_abs = a;
                    best = (r, c);
                }
            }
        }
        m.swap(k, best.0);
        cols.swap(k, best.1);
        let pc = cols[k];
        for r in k + 1..n {
            let f = m[r][pc] / m[k][pc];
            for &c in &cols[k..] {
                let v = m[k][c];
                m[r][c] -= f * v;
            }
        }
    }
    let mut x = vec![C::<T>::zero(); n];
    x[cols[n - 1]] = C::new(T::one(), T::zero());
    for k in (0..n - 1).rev() {
        let mut acc = C::<T>::zero();
        for &c in &cols[k + 1..] {
            acc -= m[k][c] * x[c];
        }
        x[cols[k]] = acc / m[k][cols[k]];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::cf64;

    #[test]
    fn solves_small_system() {
        let m = vec![
            vec![cf64::<f64>(2.0, 0.0), cf64(1.0, 1.0)],
            vec![cf64(0.0, 1.0), cf64(3.0, 0.0)],
        ];
        let x_true = vec![cf64(1.0, -2.0), cf64(0.5, 0.25)];
        let rhs: Vec<_> = m.iter().map(|row| row[0] * x_true[0] + row[1] * x_true[1]).collect();
        let x = solve(m, rhs).unwrap();
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn null_vector_of_rank_deficient() {
        let m = vec![
            vec![cf64::<f64>(1.0, 0.0), cf64(2.0, 0.0), cf64(3.0, 0.0)],
            vec![cf64(2.0, 0.0), cf64(4.0, 0.0), cf64(6.0, 0.0)],
            vec![cf64(0.0, 0.0), cf64(1.0, 0.0), cf64(1.0, 0.0)],
        ];
        let v = null_vector(m.clone());
        for row in &m {
            let r: C<f64> = row.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!(r.norm() < 1e-14);
        }
    }
}
