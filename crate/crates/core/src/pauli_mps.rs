//! Pauli-vector MPS of a state and stabilizer Renyi entropies.
//!
//! The Pauli MPS of `|psi>` has amplitudes `<psi|P|psi> / sqrt(d^L)` on the
//! basis of Pauli strings. Raising every amplitude to the n-th power is done by
//! repeated application of the diagonal operator `W` whose diagonal is the Pauli
//! MPS itself; subsystem quantities are obtained by restricting sites outside
//! the region to the identity label.

use std::ops::Range;

use faer::MatRef;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mps::{normalize_windows, MatrixProductState};
use crate::partition::{Geometry, PartitionSpec, Region};
use crate::pauli::local_pauli;
use crate::tensor::{contract, gemm, svd_matrix_truncated, DenseTensor, TruncationPolicy, C64, ONE, ZERO};

/// Discarded weight above which a report carries a warning.
pub const DEFAULT_ALARM: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct PauliMps {
    /// Local dimension of the underlying state.
    d: usize,
    /// Site tensors `(l, q, r)` with `q = d^2` on free sites and `q = 1` on identity-only sites.
    tensors: Vec<DenseTensor>,
    free: Vec<bool>,
    order: usize,
    /// The represented vector is `exp(log_scale)` times the tensor contraction.
    log_scale: f64,
}

impl PauliMps {
    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn free_sites(&self) -> &[bool] {
        &self.free
    }

    pub fn tensors(&self) -> &[DenseTensor] {
        &self.tensors
    }

    pub fn max_bond(&self) -> usize {
        self.tensors.iter().map(|t| t.shape()[2]).max().unwrap_or(1)
    }

    /// Amplitude of one Pauli string given as per-site labels (0 on identity-only sites).
    pub fn amplitude(&self, labels: &[usize]) -> Result<C64> {
        if labels.len() != self.len() {
            return Err(Error::Dimension(format!("{} labels for {} sites", labels.len(), self.len())));
        }
        let mut v = vec![ONE];
        for (k, (t, &l)) in self.tensors.iter().zip(labels).enumerate() {
            let q = t.shape()[1];
            let slot = if self.free[k] {
                l
            } else if l == 0 {
                0
            } else {
                return Ok(ZERO);
            };
            if slot >= q {
                return Err(Error::LocalDim(format!("label {l} at site {k}")));
            }
            let (lb, rb) = (t.shape()[0], t.shape()[2]);
            let mut next = vec![ZERO; rb];
            for a in 0..lb {
                if v[a] == ZERO {
                    continue;
                }
                for b in 0..rb {
                    next[b] += v[a] * t.get(&[a, slot, b]);
                }
            }
            v = next;
        }
        Ok(v[0] * self.log_scale.exp())
    }

    /// `log2 <P|P>`, the squared norm of the represented vector.
    pub fn log2_norm_sqr(&self) -> f64 {
        let mut env = vec![ONE];
        for t in &self.tensors {
            let (l, q, r) = (t.shape()[0], t.shape()[1], t.shape()[2]);
            let x = gemm(MatRef::from_row_major_slice(&env, l, l), t.as_matrix(1));
            env = gemm(t.as_matrix(2).adjoint(), MatRef::from_row_major_slice(&x, l * q, r));
        }
        env[0].re.log2() + 2.0 * self.log_scale / std::f64::consts::LN_2
    }

    /// Copy with every site outside `free` reduced to its identity component.
    pub fn restrict(&self, free: &[bool]) -> Result<Self> {
        if free.len() != self.len() {
            return Err(Error::Dimension(format!("mask of length {} for {} sites", free.len(), self.len())));
        }
        if self.order != 1 {
            return Err(Error::Parameter("restriction applies to the order-1 Pauli MPS".into()));
        }
        let tensors = self
            .tensors
            .iter()
            .zip(free)
            .enumerate()
            .map(|(k, (t, &f))| {
                if f && !self.free[k] {
                    return Err(Error::Parameter(format!("site {k} is already identity-only")));
                }
                if f {
                    return Ok(t.clone());
                }
                let (l, r) = (t.shape()[0], t.shape()[2]);
                Ok(DenseTensor::from_fn(&[l, 1, r], |i| t.get(&[i[0], 0, i[2]])))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { d: self.d, tensors, free: free.to_vec(), order: 1, log_scale: self.log_scale })
    }
}

fn check_normalized(psi: &MatrixProductState) -> Result<()> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Parameter(format!("Pauli MPS needs a normalized state (norm {norm})")));
    }
    Ok(())
}

fn region_mask(n: usize, region: Option<&[Range<usize>]>) -> Result<Vec<bool>> {
    Ok(match region {
        None => vec![true; n],
        Some(w) => {
            let w = normalize_windows(w, n)?;
            if w.is_empty() {
                return Err(Error::Parameter("empty region".into()));
            }
            (0..n).map(|i| w.iter().any(|r| r.contains(&i))).collect()
        }
    })
}

/// Builds the order-1 Pauli MPS of a normalized state. Sites outside `region`
/// (when given) carry only the identity component.
pub fn build_pauli_mps(psi: &MatrixProductState, region: Option<&[Range<usize>]>) -> Result<PauliMps> {
    let n = psi.len();
    let d = psi.d();
    check_normalized(psi)?;
    let free = region_mask(n, region)?;
    let psi = if psi.ortho_center() == Some(0) { psi.clone() } else { psi.canonicalized(0)? };
    let inv_sqrt_d = 1.0 / (d as f64).sqrt();
    let ops: Vec<Vec<C64>> = (0..d * d).map(|a| local_pauli(d, a)).collect();
    let mut tensors = Vec::with_capacity(n);
    for k in 0..n {
        let a = psi.tensor(k);
        let (l, r) = (a.shape()[0], a.shape()[2]);
        let q = if free[k] { d * d } else { 1 };
        let abar = a.conj();
        let mut b = DenseTensor::zeros(&[l * l, q, r * r]);
        for (alpha, op) in ops.iter().enumerate().take(q) {
            // (P A)[a', s, b'] = sum_s' P[s, s'] A[a', s', b']
            let pa = DenseTensor::from_fn(&[l, d, r], |i| (0..d).map(|sp| op[i[1] * d + sp] * a.get(&[i[0], sp, i[2]])).sum());
            // conj(A)[a, s, b] . (PA)[a', s, b'] -> (a, b, a', b')
            let x = contract(&abar, &[1], &pa, &[1])?;
            for ia in 0..l {
                for ib in 0..r {
                    for ja in 0..l {
                        for jb in 0..r {
                            let v = x.get(&[ia, ib, ja, jb]) * inv_sqrt_d;
                            b.set(&[ia * l + ja, alpha, ib * r + jb], v);
                        }
                    }
                }
            }
        }
        tensors.push(b);
    }
    Ok(PauliMps { d, tensors, free, order: 1, log_scale: 0.0 })
}

/// A chain of site tensors that can be absorbed into boundary matrices, used by the zip compressor.
trait Chain: Sync {
    fn len(&self) -> usize;
    fn phys(&self, k: usize) -> usize;
    fn left_dim(&self, k: usize) -> usize;
    fn right_dim(&self, k: usize) -> usize;
    /// `(r x D_left) -> (r*q x D_right)`, row-major.
    fn absorb_left(&self, k: usize, r: usize, m: &[C64]) -> Vec<C64>;
    /// `(D_right x r) -> (D_left x q*r)`, row-major.
    fn absorb_right(&self, k: usize, r: usize, m: &[C64]) -> Vec<C64>;
}

struct Explicit<'a>(&'a [DenseTensor]);

impl Chain for Explicit<'_> {
    fn len(&self) -> usize {
        self.0.len()
    }
    fn phys(&self, k: usize) -> usize {
        self.0[k].shape()[1]
    }
    fn left_dim(&self, k: usize) -> usize {
        self.0[k].shape()[0]
    }
    fn right_dim(&self, k: usize) -> usize {
        self.0[k].shape()[2]
    }
    fn absorb_left(&self, k: usize, r: usize, m: &[C64]) -> Vec<C64> {
        let t = &self.0[k];
        gemm(MatRef::from_row_major_slice(m, r, t.shape()[0]), t.as_matrix(1))
    }
    fn absorb_right(&self, k: usize, r: usize, m: &[C64]) -> Vec<C64> {
        let t = &self.0[k];
        gemm(t.as_matrix(2), MatRef::from_row_major_slice(m, t.shape()[2], r))
    }
}

/// Order-1 Pauli chain evaluated from the state tensors without forming the
/// `chi^2`-bond site tensors: `B[(a, a'), alpha, (b, b')] = sum Gamma[alpha, (s, s')] conj(A[a, s, b]) A[a', s', b']`.
struct StateChain<'a> {
    a: &'a [DenseTensor],
    d: usize,
    /// Per-site `(q x d^2)` matrices `Gamma` (the identity row only on restricted sites).
    gamma: Vec<Vec<C64>>,
}

impl<'a> StateChain<'a> {
    fn new(psi: &'a MatrixProductState, free: &[bool]) -> Self {
        let d = psi.d();
        let inv = 1.0 / (d as f64).sqrt();
        let full: Vec<C64> = (0..d * d).flat_map(|a| local_pauli(d, a).into_iter().map(move |z| z * inv)).collect();
        let gamma = free.iter().map(|&f| if f { full.clone() } else { full[..d * d].to_vec() }).collect();
        Self { a: psi.tensors(), d, gamma }
    }

    fn q(&self, k: usize) -> usize {
        self.gamma[k].len() / (self.d * self.d)
    }
}

impl Chain for StateChain<'_> {
    fn len(&self) -> usize {
        self.a.len()
    }
    fn phys(&self, k: usize) -> usize {
        self.q(k)
    }
    fn left_dim(&self, k: usize) -> usize {
        self.a[k].shape()[0].pow(2)
    }
    fn right_dim(&self, k: usize) -> usize {
        self.a[k].shape()[2].pow(2)
    }
    fn absorb_left(&self, k: usize, r: usize, m: &[C64]) -> Vec<C64> {
        let a = &self.a[k];
        let (l, d, rb) = (a.shape()[0], a.shape()[1], a.shape()[2]);
        let q = self.q(k);
        // T1[r, a, s', b'] = sum_a' M[r, a, a'] A[a', s', b']
        let t1 = gemm(MatRef::from_row_major_slice(m, r * l, l), a.as_matrix(1));
        // (r, s', b', a) x conj(A)[a, (s, b)] -> (r, s', b', s, b)
        let t1 = DenseTensor::new(vec![r, l, d, rb], t1).expect("shape").permute(&[0, 2, 3, 1]).expect("rank 4");
        let t2 = gemm(MatRef::from_row_major_slice(t1.data(), r * d * rb, l), a.as_matrix(1).conjugate());
        // (r, b, b', s, s') x Gamma^T -> (r, b, b', alpha)
        let t2 = DenseTensor::new(vec![r, d, rb, d, rb], t2).expect("shape").permute(&[0, 4, 2, 3, 1]).expect("rank 5");
        let g = MatRef::from_row_major_slice(&self.gamma[k], q, d * d);
        let t3 = gemm(MatRef::from_row_major_slice(t2.data(), r * rb * rb, d * d), g.transpose());
        DenseTensor::new(vec![r, rb * rb, q], t3).expect("shape").permute(&[0, 2, 1]).expect("rank 3").into_data()
    }
    fn absorb_right(&self, k: usize, r: usize, m: &[C64]) -> Vec<C64> {
        let a = &self.a[k];
        let (l, d, rb) = (a.shape()[0], a.shape()[1], a.shape()[2]);
        let q = self.q(k);
        // T1[a, s, b', r] = sum_b conj(A[a, s, b]) M[b, b', r]
        let t1 = gemm(a.as_matrix(2).conjugate(), MatRef::from_row_major_slice(m, rb, rb * r));
        // (a, s, r, b') x A^T[b', (a', s')] -> (a, s, r, a', s')
        let t1 = DenseTensor::new(vec![l, d, rb, r], t1).expect("shape").permute(&[0, 1, 3, 2]).expect("rank 4");
        let t2 = gemm(MatRef::from_row_major_slice(t1.data(), l * d * r, rb), a.as_matrix(2).transpose());
        // (a, a', r, s, s') x Gamma^T -> (a, a', r, alpha) -> (a, a', alpha, r)
        let t2 = DenseTensor::new(vec![l, d, r, l, d], t2).expect("shape").permute(&[0, 3, 2, 1, 4]).expect("rank 5");
        let g = MatRef::from_row_major_slice(&self.gamma[k], q, d * d);
        let t3 = gemm(MatRef::from_row_major_slice(t2.data(), l * l * r, d * d), g.transpose());
        DenseTensor::new(vec![l * l, r, q], t3).expect("shape").permute(&[0, 2, 1]).expect("rank 3").into_data()
    }
}

/// Elementwise product chain `W (x) X` with combined bonds `(w, x)`, w major.
struct Product<'a> {
    w: &'a [DenseTensor],
    x: &'a [DenseTensor],
    /// W site tensors permuted to `(q, w, w')`.
    w_by_label: Vec<DenseTensor>,
}

impl<'a> Product<'a> {
    fn new(w: &'a [DenseTensor], x: &'a [DenseTensor]) -> Self {
        let w_by_label = w.iter().map(|t| t.permute(&[1, 0, 2]).expect("rank-3 tensor")).collect();
        Self { w, x, w_by_label }
    }
}

impl Chain for Product<'_> {
    fn len(&self) -> usize {
        self.x.len()
    }
    fn phys(&self, k: usize) -> usize {
        self.x[k].shape()[1]
    }
    fn left_dim(&self, k: usize) -> usize {
        self.w[k].shape()[0] * self.x[k].shape()[0]
    }
    fn right_dim(&self, k: usize) -> usize {
        self.w[k].shape()[2] * self.x[k].shape()[2]
    }
    fn absorb_left(&self, k: usize, r: usize, m: &[C64]) -> Vec<C64> {
        let (wl, q, wr) = (self.w[k].shape()[0], self.w[k].shape()[1], self.w[k].shape()[2]);
        let (xl, xr) = (self.x[k].shape()[0], self.x[k].shape()[2]);
        // T1[r, w, a, x'] = sum_x R[r, w, x] X[x, a, x']
        let t1 = gemm(MatRef::from_row_major_slice(m, r * wl, xl), self.x[k].as_matrix(1));
        let t1 = DenseTensor::new(vec![r, wl, q, xr], t1).expect("shape");
        // (a, r, x', w)
        let t1 = t1.permute(&[2, 0, 3, 1]).expect("rank 4");
        let mut out = vec![ZERO; r * q * wr * xr];
        let blk = r * xr * wl;
        for a in 0..q {
            let lhs = MatRef::from_row_major_slice(&t1.data()[a * blk..(a + 1) * blk], r * xr, wl);
            let wa = &self.w_by_label[k].data()[a * wl * wr..(a + 1) * wl * wr];
            let y = gemm(lhs, MatRef::from_row_major_slice(wa, wl, wr));
            // y[r, x', w'] -> out[r, a, w', x']
            for ir in 0..r {
                for ix in 0..xr {
                    for iw in 0..wr {
                        out[((ir * q + a) * wr + iw) * xr + ix] = y[(ir * xr + ix) * wr + iw];
                    }
                }
            }
        }
        out
    }
    fn absorb_right(&self, k: usize, r: usize, m: &[C64]) -> Vec<C64> {
        let (wl, q, wr) = (self.w[k].shape()[0], self.w[k].shape()[1], self.w[k].shape()[2]);
        let (xl, xr) = (self.x[k].shape()[0], self.x[k].shape()[2]);
        // m[w', x', r] -> (x', w', r)
        let lm = DenseTensor::new(vec![wr, xr, r], m.to_vec()).expect("shape").permute(&[1, 0, 2]).expect("rank 3");
        // T1[x, a, w', r] = sum_x' X[x, a, x'] Lm[x', w', r]
        let t1 = gemm(self.x[k].as_matrix(2), lm.as_matrix(1));
        let t1 = DenseTensor::new(vec![xl, q, wr, r], t1).expect("shape");
        // (a, w', x, r)
        let t1 = t1.permute(&[1, 2, 0, 3]).expect("rank 4");
        let mut out = vec![ZERO; wl * xl * q * r];
        let blk = wr * xl * r;
        for a in 0..q {
            let rhs = MatRef::from_row_major_slice(&t1.data()[a * blk..(a + 1) * blk], wr, xl * r);
            let wa = &self.w_by_label[k].data()[a * wl * wr..(a + 1) * wl * wr];
            let y = gemm(MatRef::from_row_major_slice(wa, wl, wr), rhs);
            // y[w, x, r] -> out[(w, x), a, r]
            for iw in 0..wl {
                for ix in 0..xl {
                    let src = &y[(iw * xl + ix) * r..(iw * xl + ix + 1) * r];
                    let o = ((iw * xl + ix) * q + a) * r;
                    out[o..o + r].copy_from_slice(src);
                }
            }
        }
        out
    }
}

struct Compressed {
    tensors: Vec<DenseTensor>,
    log_scale: f64,
    discarded: Vec<f64>,
}

/// Variational sweeps after the initial zip.
const FIT_SWEEPS: usize = 8;
/// Relative change of the fitted norm below which sweeping stops.
const FIT_TOL: f64 = 1e-9;

fn normalize_block(m: &mut [C64]) -> Result<f64> {
    let n = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::DegenerateState(format!("Pauli MPS block norm {n}")));
    }
    m.iter_mut().for_each(|z| *z /= n);
    Ok(n.ln())
}

/// `L'[r', D'] = sum conj(X[r, q, r']) (L T)[r, q, D']`, normalized.
fn left_env(chain: &dyn Chain, k: usize, x: &DenseTensor, env: &[C64]) -> Result<(Vec<C64>, f64)> {
    let (r, q, rr) = (x.shape()[0], x.shape()[1], x.shape()[2]);
    let m = chain.absorb_left(k, r, env);
    let mut out = gemm(x.as_matrix(2).adjoint(), MatRef::from_row_major_slice(&m, r * q, chain.right_dim(k)));
    debug_assert_eq!(out.len(), rr * chain.right_dim(k));
    let ls = normalize_block(&mut out)?;
    Ok((out, ls))
}

/// `E'[D, r] = sum (T E)[D, q, r'] conj(X[r, q, r'])`, normalized.
fn right_env(chain: &dyn Chain, k: usize, x: &DenseTensor, env: &[C64]) -> Result<(Vec<C64>, f64)> {
    let (q, rr) = (x.shape()[1], x.shape()[2]);
    let m = chain.absorb_right(k, rr, env);
    let mut out = gemm(MatRef::from_row_major_slice(&m, chain.left_dim(k), q * rr), x.as_matrix(1).adjoint());
    let ls = normalize_block(&mut out)?;
    Ok((out, ls))
}

/// Two-site projection `L T_k T_{k+1} E` as an `(r q1) x (q2 r')` matrix.
fn two_site(chain: &dyn Chain, k: usize, r: usize, lenv: &[C64], renv: &[C64], rr: usize) -> Vec<C64> {
    let (q1, q2) = (chain.phys(k), chain.phys(k + 1));
    let m1 = chain.absorb_left(k, r, lenv);
    let m2 = chain.absorb_left(k + 1, r * q1, &m1);
    let d = chain.right_dim(k + 1);
    gemm(MatRef::from_row_major_slice(&m2, r * q1 * q2, d), MatRef::from_row_major_slice(renv, d, rr))
}

/// Compresses a chain: a truncating zip from the left gives the initial guess,
/// then two-site variational sweeps maximize the overlap with the exact chain.
fn zip_compress(chain: &dyn Chain, policy: &TruncationPolicy) -> Result<Compressed> {
    let n = chain.len();
    let policy = TruncationPolicy { renormalize: false, ..*policy };
    let mut tensors: Vec<DenseTensor> = Vec::with_capacity(n);
    let mut discarded = vec![0.0f64; n.saturating_sub(1)];

    // initial guess, left-canonical with the weight on the last site
    let mut r = 1usize;
    let mut rm = vec![ONE];
    let mut log_scale = 0.0;
    for k in 0..n {
        let q = chain.phys(k);
        let dr = chain.right_dim(k);
        let m = chain.absorb_left(k, r, &rm);
        if k + 1 == n {
            let mut last = m;
            log_scale += normalize_block(&mut last)?;
            tensors.push(DenseTensor::new(vec![r, q, 1], last)?);
            break;
        }
        let (u, s, vh, _) = svd_matrix_truncated(MatRef::from_row_major_slice(&m, r * q, dr), &policy)?;
        let kk = s.len();
        tensors.push(DenseTensor::new(vec![r, q, kk], u)?);
        rm = vh.iter().enumerate().map(|(i, z)| z * s[i / dr]).collect();
        log_scale += normalize_block(&mut rm)?;
        r = kk;
    }
    if n < 2 {
        return Ok(Compressed { tensors, log_scale, discarded });
    }

    let one = (vec![ONE], 0.0);
    let mut lenv: Vec<(Vec<C64>, f64)> = vec![one.clone(); n + 1];
    let mut renv: Vec<(Vec<C64>, f64)> = vec![one.clone(); n + 1];
    for k in 0..n - 1 {
        lenv[k + 1] = left_env(chain, k, &tensors[k], &lenv[k].0)?;
        lenv[k + 1].1 += lenv[k].1;
    }

    let mut prev_norm = f64::NEG_INFINITY;
    for _ in 0..FIT_SWEEPS {
        let mut sweep_disc = vec![0.0f64; n - 1];
        // right to left
        for k in (0..n - 1).rev() {
            let (rl, rr) = (tensors[k].shape()[0], tensors[k + 1].shape()[2]);
            let (q1, q2) = (chain.phys(k), chain.phys(k + 1));
            let mut theta = two_site(chain, k, rl, &lenv[k].0, &renv[k + 2].0, rr);
            let ln = normalize_block(&mut theta)? + lenv[k].1 + renv[k + 2].1;
            let (u, s, vh, w) = svd_matrix_truncated(MatRef::from_row_major_slice(&theta, rl * q1, q2 * rr), &policy)?;
            let kk = s.len();
            sweep_disc[k] = sweep_disc[k].max(w);
            tensors[k + 1] = DenseTensor::new(vec![kk, q2, rr], vh)?;
            tensors[k] = DenseTensor::new(vec![rl, q1, kk], u.iter().enumerate().map(|(i, z)| z * s[i % kk]).collect())?;
            renv[k + 1] = right_env(chain, k + 1, &tensors[k + 1], &renv[k + 2].0)?;
            renv[k + 1].1 += renv[k + 2].1;
            log_scale = ln;
        }
        // left to right
        for k in 0..n - 1 {
            let (rl, rr) = (tensors[k].shape()[0], tensors[k + 1].shape()[2]);
            let (q1, q2) = (chain.phys(k), chain.phys(k + 1));
            let mut theta = two_site(chain, k, rl, &lenv[k].0, &renv[k + 2].0, rr);
            let ln = normalize_block(&mut theta)? + lenv[k].1 + renv[k + 2].1;
            let (u, s, vh, w) = svd_matrix_truncated(MatRef::from_row_major_slice(&theta, rl * q1, q2 * rr), &policy)?;
            let kk = s.len();
            sweep_disc[k] = sweep_disc[k].max(w);
            tensors[k] = DenseTensor::new(vec![rl, q1, kk], u)?;
            tensors[k + 1] = DenseTensor::new(vec![kk, q2, rr], vh.iter().enumerate().map(|(i, z)| z * s[i / (q2 * rr)]).collect())?;
            lenv[k + 1] = left_env(chain, k, &tensors[k], &lenv[k].0)?;
            lenv[k + 1].1 += lenv[k].1;
            log_scale = ln;
        }
        discarded = sweep_disc;
        if (log_scale - prev_norm).abs() < FIT_TOL {
            break;
        }
        prev_norm = log_scale;
    }
    // the last center carries the singular values of a unit-norm block
    Ok(Compressed { tensors, log_scale, discarded })
}

/// Compressed copy of an order-1 Pauli MPS (or any Pauli MPS).
pub fn compress_pauli_mps(p: &PauliMps, policy: &TruncationPolicy) -> Result<(PauliMps, Vec<f64>)> {
    let c = zip_compress(&Explicit(&p.tensors), policy)?;
    Ok((
        PauliMps { d: p.d, tensors: c.tensors, free: p.free.clone(), order: p.order, log_scale: p.log_scale + c.log_scale },
        c.discarded,
    ))
}

/// Outcome of raising a Pauli MPS to replica order n.
#[derive(Clone, Debug)]
pub struct ReplicaResult {
    pub pauli: PauliMps,
    /// Largest discarded weight of each application, in order.
    pub discarded: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Applies the diagonal replica operator built from `p` itself `n - 1` times,
/// compressing after each application.
pub fn apply_replica(p: &PauliMps, n: usize, policy: &TruncationPolicy, alarm: f64) -> Result<ReplicaResult> {
    if p.order != 1 {
        return Err(Error::Parameter("replica operator must be built from an order-1 Pauli MPS".into()));
    }
    if n < 2 {
        return Err(Error::Parameter(format!("replica order {n} < 2")));
    }
    let mut current = p.clone();
    let mut discarded = Vec::with_capacity(n - 1);
    let mut warnings = Vec::new();
    for step in 2..=n {
        let chain = Product::new(&p.tensors, &current.tensors);
        let c = zip_compress(&chain, policy)?;
        let worst = c.discarded.iter().copied().fold(0.0, f64::max);
        if worst > alarm {
            warnings.push(format!(
                "replica step {step}: discarded weight {worst:.3e} exceeds {alarm:.1e} at max bond {}",
                policy.max_bond
            ));
        }
        discarded.push(worst);
        current = PauliMps {
            d: p.d,
            tensors: c.tensors,
            free: p.free.clone(),
            order: step,
            log_scale: p.log_scale + current.log_scale + c.log_scale,
        };
    }
    Ok(ReplicaResult { pauli: current, discarded, warnings })
}

/// Settings for SRE evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SreSettings {
    pub n: usize,
    pub policy: TruncationPolicy,
    /// Discarded weight above which a warning is attached.
    pub alarm: f64,
}

impl SreSettings {
    pub fn new(n: usize, policy: TruncationPolicy) -> Self {
        Self { n, policy, alarm: DEFAULT_ALARM }
    }

    /// Default settings for a local dimension: n = 2, cutoff 1e-12, chi_P 64 (qubits) or 55 (qutrits).
    pub fn for_local_dim(d: usize) -> Self {
        let chi = if d <= 2 { 64 } else { 55 };
        Self::new(2, TruncationPolicy::new(chi, 1e-12))
    }

    /// Settings that drop only numerical zeros.
    pub fn exact(n: usize) -> Self {
        Self::new(n, TruncationPolicy::exact())
    }
}

/// Subsystem SRE of one region with the quantities it was assembled from.
#[derive(Clone, Debug)]
pub struct RegionSre {
    pub value: f64,
    pub log2_norm_n: f64,
    pub log2_norm_1: f64,
    pub chi_p: usize,
    pub max_discarded: f64,
    pub warnings: Vec<String>,
}

fn region_sre_from_state(psi: &MatrixProductState, free: &[bool], settings: &SreSettings) -> Result<RegionSre> {
    let n = settings.n;
    let d = psi.d();
    let c = zip_compress(&StateChain::new(psi, free), &settings.policy)?;
    let w1 = c.discarded;
    let pc = PauliMps { d, tensors: c.tensors, free: free.to_vec(), order: 1, log_scale: c.log_scale };
    let log2_norm_1 = pc.log2_norm_sqr();
    let rep = apply_replica(&pc, n, &settings.policy, settings.alarm)?;
    let log2_norm_n = rep.pauli.log2_norm_sqr();
    let len = psi.len() as f64;
    let value = (log2_norm_n - log2_norm_1) / (1.0 - n as f64) - len * (d as f64).log2();
    let max_discarded = w1.iter().chain(&rep.discarded).copied().fold(0.0, f64::max);
    let mut warnings = rep.warnings;
    let worst1 = w1.iter().copied().fold(0.0, f64::max);
    if worst1 > settings.alarm {
        warnings.push(format!("order-1 compression discarded weight {worst1:.3e}"));
    }
    Ok(RegionSre { value, log2_norm_n, log2_norm_1, chi_p: rep.pauli.max_bond().max(pc.max_bond()), max_discarded, warnings })
}

fn prepared(psi: &MatrixProductState) -> Result<MatrixProductState> {
    check_normalized(psi)?;
    if psi.ortho_center() == Some(0) {
        Ok(psi.clone())
    } else {
        psi.canonicalized(0)
    }
}

fn check_order(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Parameter(format!("replica order {n} < 2")));
    }
    Ok(())
}

/// Full-state SRE `M_n` in bits.
pub fn full_state_sre(psi: &MatrixProductState, settings: &SreSettings) -> Result<f64> {
    Ok(full_state_sre_detailed(psi, settings)?.value)
}

pub fn full_state_sre_detailed(psi: &MatrixProductState, settings: &SreSettings) -> Result<RegionSre> {
    check_order(settings.n)?;
    let psi = prepared(psi)?;
    region_sre_from_state(&psi, &vec![true; psi.len()], settings)
}

/// Mixed-state SRE of the reduced state on the union of `windows`, in bits.
pub fn subsystem_sre(psi: &MatrixProductState, windows: &[Range<usize>], settings: &SreSettings) -> Result<f64> {
    Ok(subsystem_sre_detailed(psi, windows, settings)?.value)
}

pub fn subsystem_sre_detailed(
    psi: &MatrixProductState,
    windows: &[Range<usize>],
    settings: &SreSettings,
) -> Result<RegionSre> {
    check_order(settings.n)?;
    let free = region_mask(psi.len(), Some(windows))?;
    region_sre_from_state(&prepared(psi)?, &free, settings)
}

#[derive(Clone, Debug)]
pub struct SreReport {
    pub geometry: Geometry,
    pub partition: PartitionSpec,
    pub n: usize,
    pub policy: TruncationPolicy,
    pub m_ab: f64,
    pub m_bc: f64,
    pub m_b: f64,
    pub m_abc: f64,
    pub m_topo: f64,
    pub regions: Vec<(Region, RegionSre)>,
    /// Largest bond dimension reached by any compressed Pauli MPS.
    pub chi_p: usize,
    pub max_discarded: f64,
    pub warnings: Vec<String>,
}

/// Topological SRE `-(M_AB + M_BC - M_B - M_ABC)` for a standard geometry.
pub fn topological_sre(psi: &MatrixProductState, geometry: Geometry, settings: &SreSettings) -> Result<SreReport> {
    let part = PartitionSpec::new(geometry, psi.len())?;
    topological_sre_with(psi, &part, settings)
}

/// Topological SRE for an explicit partition.
pub fn topological_sre_with(psi: &MatrixProductState, part: &PartitionSpec, settings: &SreSettings) -> Result<SreReport> {
    check_order(settings.n)?;
    if part.len != psi.len() {
        return Err(Error::ChainLength { len: psi.len(), reason: format!("partition covers {} sites", part.len) });
    }
    let psi = prepared(psi)?;
    let results: Vec<(Region, RegionSre)> = Region::ALL
        .par_iter()
        .map(|&reg| {
            Ok((reg, region_sre_from_state(&psi, &part.mask(reg), settings)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let get = |r: Region| results.iter().find(|(x, _)| *x == r).map(|(_, v)| v.value).expect("all regions");
    let (m_ab, m_bc, m_b, m_abc) = (get(Region::AB), get(Region::BC), get(Region::B), get(Region::ABC));
    let chi_p = results.iter().map(|(_, r)| r.chi_p).max().unwrap_or(1);
    let max_discarded = results.iter().map(|(_, r)| r.max_discarded).fold(0.0, f64::max);
    let warnings = results.iter().flat_map(|(reg, r)| r.warnings.iter().map(move |w| format!("{}: {w}", reg.name()))).collect();
    Ok(SreReport {
        geometry: part.geometry,
        partition: part.clone(),
        n: settings.n,
        policy: settings.policy,
        m_ab,
        m_bc,
        m_b,
        m_abc,
        m_topo: -(m_ab + m_bc - m_b - m_abc),
        regions: results,
        chi_p,
        max_discarded,
        warnings,
    })
}
