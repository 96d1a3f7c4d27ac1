//! Matrix product operators with site tensors `(w_left, d_out, d_in, w_right)`.

use faer::MatRef;

use crate::error::{Error, Result};
use crate::mps::MatrixProductState;
use crate::tensor::{contract, DenseTensor, C64, ONE, ZERO};

/// Largest Hilbert-space dimension for which an MPO may be densified.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Clone, Debug)]
pub struct MatrixProductOperator {
    d: usize,
    tensors: Vec<DenseTensor>,
}

impl MatrixProductOperator {
    pub fn from_tensors(d: usize, tensors: Vec<DenseTensor>) -> Result<Self> {
        if tensors.is_empty() {
            return Err(Error::ChainLength { len: 0, reason: "empty operator".into() });
        }
        let n = tensors.len();
        for (i, t) in tensors.iter().enumerate() {
            let sh = t.shape();
            if sh.len() != 4 || sh[1] != d || sh[2] != d {
                return Err(Error::Dimension(format!("MPO site {i} has shape {sh:?}")));
            }
            if (i == 0 && sh[0] != 1) || (i == n - 1 && sh[3] != 1) {
                return Err(Error::Dimension("MPO boundary bonds must be 1".into()));
            }
            if i + 1 < n && sh[3] != tensors[i + 1].shape()[0] {
                return Err(Error::Dimension(format!("MPO bond mismatch after site {i}")));
            }
        }
        Ok(Self { d, tensors })
    }

    /// Bond-1 operator `coef * op_1 (x) ... (x) op_L` (None = identity).
    pub fn product(d: usize, ops: &[Option<Vec<C64>>], coef: f64) -> Result<Self> {
        let tensors = ops
            .iter()
            .enumerate()
            .map(|(k, op)| {
                let scale = if k == 0 { coef } else { 1.0 };
                DenseTensor::from_fn(&[1, d, d, 1], |i| {
                    let v = match op {
                        Some(m) => m[i[1] * d + i[2]],
                        None if i[1] == i[2] => ONE,
                        None => ZERO,
                    };
                    v * scale
                })
            })
            .collect();
        Self::from_tensors(d, tensors)
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn tensors(&self) -> &[DenseTensor] {
        &self.tensors
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.tensors.iter().map(|t| t.shape()[0]).collect();
        v.push(1);
        v
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Operator sum as a direct sum of bonds.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() || self.d != other.d {
            return Err(Error::Dimension("adding operators of different shape".into()));
        }
        let n = self.len();
        let d = self.d;
        if n == 1 {
            let t = DenseTensor::from_fn(&[1, d, d, 1], |i| self.tensors[0].get(i) + other.tensors[0].get(i));
            return Self::from_tensors(d, vec![t]);
        }
        let tensors = (0..n)
            .map(|k| {
                let a = &self.tensors[k];
                let b = &other.tensors[k];
                let (al, ar) = (a.shape()[0], a.shape()[3]);
                let (bl, br) = (b.shape()[0], b.shape()[3]);
                let l = if k == 0 { 1 } else { al + bl };
                let r = if k == n - 1 { 1 } else { ar + br };
                DenseTensor::from_fn(&[l, d, d, r], |i| {
                    let (li, ri) = (i[0], i[3]);
                    let in_a = (k == 0 || li < al) && (k == n - 1 || ri < ar);
                    let in_b = (k == 0 || li >= al) && (k == n - 1 || ri >= ar);
                    let mut v = ZERO;
                    if in_a {
                        v += a.get(&[if k == 0 { 0 } else { li }, i[1], i[2], if k == n - 1 { 0 } else { ri }]);
                    }
                    if in_b {
                        let lb = if k == 0 { 0 } else { li - al };
                        let rb = if k == n - 1 { 0 } else { ri - ar };
                        v += b.get(&[lb, i[1], i[2], rb]);
                    }
                    v
                })
            })
            .collect();
        Self::from_tensors(d, tensors)
    }

    /// Dense row-major matrix `<s|H|s'>` with sites ordered most significant first.
    pub fn to_dense(&self) -> Result<Vec<C64>> {
        let n = self.len();
        let dim = self.d.checked_pow(n as u32).unwrap_or(usize::MAX);
        if dim > DENSE_LIMIT {
            return Err(Error::Capacity { what: format!("dense operator of dimension {dim}"), limit: DENSE_LIMIT.to_string() });
        }
        // acc[out..., in..., w]
        let mut acc = self.tensors[0].clone().reshape(&[self.d, self.d, self.tensors[0].shape()[3]])?;
        let mut cur = self.d;
        for t in &self.tensors[1..] {
            // (o, i, w) . (w, o', i', w') -> (o, i, o', i', w')
            let x = contract(&acc, &[2], t, &[0])?;
            let wr = t.shape()[3];
            let x = x.permute(&[0, 2, 1, 3, 4])?;
            cur *= self.d;
            acc = x.reshape(&[cur, cur, wr])?;
        }
        Ok(acc.into_data())
    }

    /// `<psi|H|psi> / <psi|psi>`.
    pub fn expectation(&self, psi: &MatrixProductState) -> Result<C64> {
        self.check_state(psi)?;
        let mut env = DenseTensor::from_fn(&[1, 1, 1], |_| ONE);
        for (a, w) in psi.tensors().iter().zip(&self.tensors) {
            env = Self::env_step(&env, a, w)?;
        }
        let nrm = psi.overlap(psi)?.re * (-2.0 * psi.norm_log()).exp();
        Ok(env.data()[0] / nrm)
    }

    fn check_state(&self, psi: &MatrixProductState) -> Result<()> {
        if psi.len() != self.len() || psi.d() != self.d {
            return Err(Error::Dimension(format!(
                "operator on {} sites (d={}) applied to state on {} sites (d={})",
                self.len(),
                self.d,
                psi.len(),
                psi.d()
            )));
        }
        Ok(())
    }

    /// `E'[b', v, b] = sum conj(A[a', s, b']) W[w, s, s', v] E[a', w, a] A[a, s', b]`.
    pub(crate) fn env_step(env: &DenseTensor, a: &DenseTensor, w: &DenseTensor) -> Result<DenseTensor> {
        let x = contract(env, &[2], a, &[0])?; // (a', w, s', b)
        let y = contract(&x, &[1, 2], w, &[0, 2])?; // (a', b, s, v)
        contract(&a.conj(), &[0, 1], &y, &[0, 2]) // (b', b, v)
            .and_then(|z| z.permute(&[0, 2, 1]))
    }

    /// Energy variance `<H^2> - <H>^2` of a state.
    pub fn variance(&self, psi: &MatrixProductState) -> Result<f64> {
        self.check_state(psi)?;
        let e = self.expectation(psi)?.re;
        let mut env = DenseTensor::from_fn(&[1, 1, 1, 1], |_| ONE);
        for (a, w) in psi.tensors().iter().zip(&self.tensors) {
            // env (a', u, v, a)
            let x = contract(&env, &[3], a, &[0])?; // (a', u, v, s'', b)
            let y = contract(&x, &[2, 3], w, &[0, 2])?; // (a', u, b, s', v')
            let z = contract(&y, &[1, 3], &w.conj(), &[0, 1])?; // (a', b, v', s, u') using conj(W[u, s', s, u'])
            let e2 = contract(&a.conj(), &[0, 1], &z, &[0, 3])?; // (b', b, v', u')
            env = e2.permute(&[0, 3, 2, 1])?;
        }
        let nrm = psi.overlap(psi)?.re * (-2.0 * psi.norm_log()).exp();
        Ok(env.data()[0].re / nrm - e * e)
    }

    /// Largest elementwise deviation from Hermiticity of the dense matrix.
    pub fn hermiticity_error(&self) -> Result<f64> {
        let m = self.to_dense()?;
        let dim = (m.len() as f64).sqrt().round() as usize;
        let mat = MatRef::from_row_major_slice(&m, dim, dim);
        let mut err: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                err = err.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
            }
        }
        Ok(err)
    }
}

/// One operator product on consecutive sites, used by [`OperatorSum`].
#[derive(Clone, Debug)]
struct Pattern {
    ops: Vec<Vec<C64>>,
    /// Coefficient for the instance starting at each site.
    coefs: Vec<f64>,
}

/// Sum of local operator products on consecutive sites, assembled into a
/// lower-triangular automaton MPO. Each pattern of range m uses m-1 internal
/// channels; coefficients may vary with the starting site.
#[derive(Clone, Debug)]
pub struct OperatorSum {
    d: usize,
    len: usize,
    patterns: Vec<Pattern>,
}

impl OperatorSum {
    pub fn new(d: usize, len: usize) -> Self {
        Self { d, len, patterns: Vec::new() }
    }

    /// Adds `sum_i coefs[i] * ops[0]_i ops[1]_{i+1} ...`; `coefs` has one entry per valid start site.
    pub fn add_pattern(&mut self, ops: Vec<Vec<C64>>, coefs: Vec<f64>) -> Result<()> {
        let m = ops.len();
        if m == 0 || m > self.len {
            return Err(Error::Parameter(format!("pattern of range {m} on {} sites", self.len)));
        }
        if coefs.len() != self.len + 1 - m {
            return Err(Error::Parameter(format!("{} coefficients for {} start sites", coefs.len(), self.len + 1 - m)));
        }
        if ops.iter().any(|o| o.len() != self.d * self.d) {
            return Err(Error::LocalDim("operator size".into()));
        }
        self.patterns.push(Pattern { ops, coefs });
        Ok(())
    }

    /// Uniform-coefficient convenience wrapper.
    pub fn add_uniform(&mut self, ops: Vec<Vec<C64>>, coef: f64) -> Result<()> {
        let n = self.len + 1 - ops.len().min(self.len);
        self.add_pattern(ops, vec![coef; n])
    }

    pub fn build(&self) -> Result<MatrixProductOperator> {
        let d = self.d;
        let n = self.len;
        // channel layout: 0 = not started, then internal channels, last = done
        let mut offsets = Vec::with_capacity(self.patterns.len());
        let mut next = 1;
        for p in &self.patterns {
            offsets.push(next);
            next += p.ops.len() - 1;
        }
        let w = next + 1;
        let done = w - 1;
        let ident: Vec<C64> = (0..d * d).map(|i| if i / d == i % d { ONE } else { ZERO }).collect();
        let mut tensors = Vec::with_capacity(n);
        for site in 0..n {
            let mut t = DenseTensor::zeros(&[w, d, d, w]);
            let put = |t: &mut DenseTensor, a: usize, b: usize, op: &[C64], c: f64| {
                for s in 0..d {
                    for sp in 0..d {
                        let v = t.get(&[a, s, sp, b]) + op[s * d + sp] * c;
                        t.set(&[a, s, sp, b], v);
                    }
                }
            };
            put(&mut t, 0, 0, &ident, 1.0);
            put(&mut t, done, done, &ident, 1.0);
            for (p, &off) in self.patterns.iter().zip(&offsets) {
                let m = p.ops.len();
                if m == 1 {
                    put(&mut t, 0, done, &p.ops[0], p.coefs[site]);
                    continue;
                }
                if site + m <= n {
                    put(&mut t, 0, off, &p.ops[0], p.coefs[site]);
                }
                for j in 1..m {
                    // the operator at offset j of an instance started at site - j
                    if site < j || site - j + m > n {
                        continue;
                    }
                    let from = off + j - 1;
                    let to = if j == m - 1 { done } else { off + j };
                    put(&mut t, from, to, &p.ops[j], 1.0);
                }
            }
            let t = if n == 1 {
                DenseTensor::from_fn(&[1, d, d, 1], |i| t.get(&[0, i[1], i[2], done]))
            } else if site == 0 {
                DenseTensor::from_fn(&[1, d, d, w], |i| t.get(&[0, i[1], i[2], i[3]]))
            } else if site == n - 1 {
                DenseTensor::from_fn(&[w, d, d, 1], |i| t.get(&[i[0], i[1], i[2], done]))
            } else {
                t
            };
            tensors.push(t);
        }
        MatrixProductOperator::from_tensors(d, tensors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::local_pauli;

    fn kron_term(d: usize, n: usize, ops: &[(usize, Vec<C64>)]) -> Vec<C64> {
        let dim = d.pow(n as u32);
        let mut m = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                let mut v = ONE;
                for site in 0..n {
                    let sr = (r / d.pow((n - 1 - site) as u32)) % d;
                    let sc = (c / d.pow((n - 1 - site) as u32)) % d;
                    let local = ops.iter().find(|(s, _)| *s == site).map(|(_, o)| o[sr * d + sc]);
                    v *= local.unwrap_or(if sr == sc { ONE } else { ZERO });
                }
                m[r * dim + c] = v;
            }
        }
        m
    }

    #[test]
    fn automaton_matches_kronecker_sum() {
        let (x, z) = (local_pauli(2, 1), local_pauli(2, 3));
        let n = 5;
        let mut sum = OperatorSum::new(2, n);
        sum.add_pattern(vec![z.clone(), z.clone()], vec![0.3, -1.0, 0.7, 0.2]).unwrap();
        sum.add_pattern(vec![z.clone(), x.clone(), z.clone()], vec![1.1, -0.4, 0.9]).unwrap();
        sum.add_uniform(vec![x.clone()], 0.25).unwrap();
        let mpo = sum.build().unwrap();
        assert_eq!(mpo.max_bond(), 5);
        let dense = mpo.to_dense().unwrap();
        let dim = 32;
        let mut expect = vec![ZERO; dim * dim];
        let mut acc = |m: Vec<C64>, c: f64| expect.iter_mut().zip(m).for_each(|(e, v)| *e += v * c);
        for (i, c) in [0.3, -1.0, 0.7, 0.2].iter().enumerate() {
            acc(kron_term(2, n, &[(i, z.clone()), (i + 1, z.clone())]), *c);
        }
        for (i, c) in [1.1, -0.4, 0.9].iter().enumerate() {
            acc(kron_term(2, n, &[(i, z.clone()), (i + 1, x.clone()), (i + 2, z.clone())]), *c);
        }
        for i in 0..n {
            acc(kron_term(2, n, &[(i, x.clone())]), 0.25);
        }
        let err = dense.iter().zip(&expect).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
        assert!(mpo.hermiticity_error().unwrap() < 1e-12);
    }

    #[test]
    fn direct_sum_adds_operators() {
        let z = local_pauli(2, 3);
        let a = MatrixProductOperator::product(2, &[Some(z.clone()), None, Some(z.clone())], 0.5).unwrap();
        let b = MatrixProductOperator::product(2, &[None, Some(local_pauli(2, 1)), None], -2.0).unwrap();
        let s = a.add(&b).unwrap().to_dense().unwrap();
        let (da, db) = (a.to_dense().unwrap(), b.to_dense().unwrap());
        for i in 0..s.len() {
            assert!((s[i] - da[i] - db[i]).norm() < 1e-14);
        }
    }
}
