//! Lanczos with full reorthogonalisation for the lowest eigenpair of a Hermitian map.

use faer::MatRef;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tensor::{eigh, C64, ZERO};

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Lowest eigenvalue and normalized eigenvector of `apply` on a space of dimension `dim`.
/// Starts from `start` when given, else from a fixed pseudo-random vector.
pub fn lowest_eigenpair(
    dim: usize,
    apply: impl Fn(&[C64]) -> Vec<C64>,
    start: Option<&[C64]>,
    max_iter: usize,
    tol: f64,
) -> Result<(f64, Vec<C64>)> {
    if dim == 0 {
        return Err(Error::Dimension("empty Krylov space".into()));
    }
    let mut v0: Vec<C64> = match start {
        Some(s) if s.len() == dim && norm(s) > 1e-300 => s.to_vec(),
        Some(s) if s.len() != dim => {
            return Err(Error::Dimension(format!("start vector of length {} for dimension {dim}", s.len())))
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            (0..dim).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
        }
    };
    let n0 = norm(&v0);
    v0.iter_mut().for_each(|z| *z /= n0);

    let max_iter = max_iter.min(dim).max(1);
    let mut basis: Vec<Vec<C64>> = vec![v0];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut prev = f64::INFINITY;
    let mut result: Option<(f64, Vec<C64>)> = None;

    for k in 0..max_iter {
        let mut w = apply(&basis[k]);
        let a = dot(&basis[k], &w).re;
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let bnorm = norm(&w);

        let m = alpha.len();
        let mut t = vec![ZERO; m * m];
        for i in 0..m {
            t[i * m + i] = C64::new(alpha[i], 0.0);
            if i + 1 < m {
                t[i * m + i + 1] = C64::new(beta[i], 0.0);
                t[(i + 1) * m + i] = C64::new(beta[i], 0.0);
            }
        }
        let (vals, vecs) = eigh(MatRef::from_row_major_slice(&t, m, m))?;
        let e = vals[0];
        let resid = bnorm * vecs[(m - 1, 0)].norm();
        let done = resid < tol * e.abs().max(1.0) || (prev - e).abs() < tol * 1e-2 * e.abs().max(1.0) && resid < tol.sqrt()
            || bnorm < 1e-13
            || k + 1 == max_iter;
        prev = e;
        if done {
            let mut x = vec![ZERO; dim];
            for (j, b) in basis.iter().enumerate() {
                let c = vecs[(j, 0)];
                x.iter_mut().zip(b).for_each(|(xi, bi)| *xi += c * bi);
            }
            let nx = norm(&x);
            x.iter_mut().for_each(|z| *z /= nx);
            result = Some((e, x));
            break;
        }
        beta.push(bnorm);
        w.iter_mut().for_each(|z| *z /= bnorm);
        basis.push(w);
    }
    let (e, x) = result.ok_or_else(|| Error::Numeric("Lanczos produced no eigenpair".into()))?;
    if !e.is_finite() || x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numeric("Lanczos produced a non-finite eigenpair".into()));
    }
    Ok((e, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_operator() {
        let diag: Vec<f64> = (0..50).map(|i| (i as f64 - 7.3).powi(2)).collect();
        let (e, v) = lowest_eigenpair(50, |x| x.iter().zip(&diag).map(|(a, d)| a * d).collect(), None, 60, 1e-12).unwrap();
        assert!((e - 0.09).abs() < 1e-9);
        assert!(v[7].norm() > 1.0 - 1e-6);
    }
}
