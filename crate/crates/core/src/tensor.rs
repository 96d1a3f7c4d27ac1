//! Dense complex tensors in row-major layout, with contraction, truncated SVD,
//! QR and Hermitian eigendecomposition built on faer kernels.

use faer::linalg::matmul::matmul;
use faer::traits::Conjugate;
use faer::{Accum, Mat, MatMut, MatRef, Par, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Relative gap below which neighbouring singular values count as one multiplet.
const DEGENERACY_RTOL: f64 = 1e-9;
/// Multiplets below this fraction of the largest singular value are never grouped.
const DEGENERACY_FLOOR: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<C64>,
}

impl DenseTensor {
    pub fn new(shape: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        let n: usize = shape.iter().product();
        if shape.iter().any(|&e| e == 0) {
            return Err(Error::Dimension(format!("zero extent in shape {shape:?}")));
        }
        if n != data.len() {
            return Err(Error::Dimension(format!(
                "shape {shape:?} needs {n} values, got {}",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let n = shape.iter().product();
        Self { shape: shape.to_vec(), data: vec![ZERO; n] }
    }

    pub fn scalar(value: C64) -> Self {
        Self { shape: vec![1], data: vec![value] }
    }

    /// Builds a tensor by evaluating `f` on every multi-index in row-major order.
    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> C64) -> Self {
        let n: usize = shape.iter().product();
        let mut idx = vec![0usize; shape.len()];
        let mut data = Vec::with_capacity(n);
        for _ in 0..n {
            data.push(f(&idx));
            for ax in (0..shape.len()).rev() {
                idx[ax] += 1;
                if idx[ax] < shape[ax] {
                    break;
                }
                idx[ax] = 0;
            }
        }
        Self { shape: shape.to_vec(), data }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &e)| {
            debug_assert!(i < e);
            acc * e + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: C64) {
        let o = self.offset(idx);
        self.data[o] = value;
    }

    /// Reinterprets the data under a new shape with the same number of values.
    pub fn reshape(mut self, shape: &[usize]) -> Result<Self> {
        let n: usize = shape.iter().product();
        if n != self.data.len() || shape.iter().any(|&e| e == 0) {
            return Err(Error::Dimension(format!(
                "cannot reshape {:?} into {shape:?}",
                self.shape
            )));
        }
        self.shape = shape.to_vec();
        Ok(self)
    }

    /// Returns a copy with axes reordered so that new axis `k` is old axis `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let r = self.rank();
        check_permutation(perm, r)?;
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            return Ok(self.clone());
        }
        let new_shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let mut old_strides = vec![1usize; r];
        for ax in (0..r.saturating_sub(1)).rev() {
            old_strides[ax] = old_strides[ax + 1] * self.shape[ax + 1];
        }
        let strides: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; r];
        let mut src = 0usize;
        for _ in 0..self.data.len() {
            data.push(self.data[src]);
            for ax in (0..r).rev() {
                idx[ax] += 1;
                src += strides[ax];
                if idx[ax] < new_shape[ax] {
                    break;
                }
                src -= strides[ax] * new_shape[ax];
                idx[ax] = 0;
            }
        }
        Ok(Self { shape: new_shape, data })
    }

    pub fn conj(&self) -> Self {
        Self { shape: self.shape.clone(), data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&mut self, factor: C64) {
        self.data.iter_mut().for_each(|z| *z *= factor);
    }

    pub fn scaled(mut self, factor: C64) -> Self {
        self.scale(factor);
        self
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Maximum elementwise modulus of the difference; shapes must agree.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape, other.shape, "shape mismatch in comparison");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Row-major matrix view grouping the first `split` axes as rows.
    pub fn as_matrix(&self, split: usize) -> MatRef<'_, C64> {
        let rows: usize = self.shape[..split].iter().product();
        let cols: usize = self.shape[split..].iter().product();
        MatRef::from_row_major_slice(&self.data, rows, cols)
    }

    pub fn from_matrix(m: MatRef<'_, C64>, shape: &[usize]) -> Result<Self> {
        let data = mat_to_row_major(m);
        Self::new(shape.to_vec(), data)
    }
}

fn check_permutation(perm: &[usize], rank: usize) -> Result<()> {
    if perm.len() != rank {
        return Err(Error::Axes(format!("permutation {perm:?} for rank {rank}")));
    }
    let mut seen = vec![false; rank];
    for &p in perm {
        if p >= rank || seen[p] {
            return Err(Error::Axes(format!("invalid permutation {perm:?}")));
        }
        seen[p] = true;
    }
    Ok(())
}

pub(crate) fn mat_to_row_major<T: Conjugate<Canonical = C64>>(m: MatRef<'_, T>) -> Vec<C64> {
    let m = m.to_owned();
    let (r, c) = m.shape();
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Row-major product `lhs * rhs`.
pub(crate) fn gemm<L, R>(lhs: MatRef<'_, L>, rhs: MatRef<'_, R>) -> Vec<C64>
where
    L: Conjugate<Canonical = C64>,
    R: Conjugate<Canonical = C64>,
{
    let (m, k) = lhs.shape();
    let (k2, n) = rhs.shape();
    assert_eq!(k, k2, "inner dimensions differ in gemm");
    let mut out = vec![ZERO; m * n];
    {
        let dst = MatMut::from_row_major_slice_mut(&mut out, m, n);
        matmul(dst, Accum::Replace, lhs, rhs, ONE, Par::Seq);
    }
    out
}

/// Contracts `axes1` of `t1` against `axes2` of `t2`. The result carries the
/// free axes of `t1` followed by the free axes of `t2`, each in original order.
pub fn contract(t1: &DenseTensor, axes1: &[usize], t2: &DenseTensor, axes2: &[usize]) -> Result<DenseTensor> {
    if axes1.len() != axes2.len() {
        return Err(Error::Axes(format!("contracting {} axes against {}", axes1.len(), axes2.len())));
    }
    let dup = |axes: &[usize], rank: usize| {
        let mut seen = vec![false; rank];
        for &a in axes {
            if a >= rank || seen[a] {
                return true;
            }
            seen[a] = true;
        }
        false
    };
    if dup(axes1, t1.rank()) || dup(axes2, t2.rank()) {
        return Err(Error::Axes(format!("axes {axes1:?} / {axes2:?} out of range or repeated")));
    }
    for (&a, &b) in axes1.iter().zip(axes2) {
        if t1.shape[a] != t2.shape[b] {
            return Err(Error::Dimension(format!(
                "axis {a} of extent {} against axis {b} of extent {}",
                t1.shape[a], t2.shape[b]
            )));
        }
    }
    let free1: Vec<usize> = (0..t1.rank()).filter(|a| !axes1.contains(a)).collect();
    let free2: Vec<usize> = (0..t2.rank()).filter(|a| !axes2.contains(a)).collect();

    let perm1: Vec<usize> = free1.iter().chain(axes1).copied().collect();
    let perm2: Vec<usize> = axes2.iter().chain(&free2).copied().collect();
    let a = t1.permute(&perm1)?;
    let b = t2.permute(&perm2)?;

    let m: usize = free1.iter().map(|&x| t1.shape[x]).product();
    let k: usize = axes1.iter().map(|&x| t1.shape[x]).product();
    let n: usize = free2.iter().map(|&x| t2.shape[x]).product();
    let am = MatRef::from_row_major_slice(&a.data, m, k);
    let bm = MatRef::from_row_major_slice(&b.data, k, n);
    let data = gemm(am, bm);

    let mut shape: Vec<usize> = free1.iter().map(|&x| t1.shape[x]).collect();
    shape.extend(free2.iter().map(|&x| t2.shape[x]));
    if shape.is_empty() {
        shape.push(1);
    }
    DenseTensor::new(shape, data)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    pub max_bond: usize,
    /// Discard squared singular values whose tail weight, relative to the total, stays below this.
    pub cutoff: f64,
    pub renormalize: bool,
}

impl TruncationPolicy {
    pub fn new(max_bond: usize, cutoff: f64) -> Self {
        Self { max_bond, cutoff, renormalize: false }
    }

    /// Keeps every singular value that is not a numerical zero.
    pub fn exact() -> Self {
        Self { max_bond: usize::MAX, cutoff: 1e-24, renormalize: false }
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { max_bond: 64, cutoff: 1e-12, renormalize: false }
    }
}

/// Chooses how many of the descending singular values `s` to keep, returning
/// the count and the discarded relative weight.
pub fn truncation_rank(s: &[f64], policy: &TruncationPolicy) -> (usize, f64) {
    if s.is_empty() {
        return (0, 0.0);
    }
    let total: f64 = s.iter().map(|x| x * x).sum();
    if total == 0.0 {
        return (1, 0.0);
    }
    let mut tail = vec![0.0; s.len() + 1];
    for i in (0..s.len()).rev() {
        tail[i] = tail[i + 1] + s[i] * s[i];
    }
    let limit = policy.max_bond.max(1).min(s.len());
    let mut k = (1..=s.len()).find(|&k| tail[k] <= policy.cutoff * total).unwrap_or(s.len());
    k = k.min(limit).max(1);

    let in_block = |k: usize| {
        k < s.len() && s[k - 1] >= DEGENERACY_FLOOR * s[0] && s[k - 1] - s[k] <= DEGENERACY_RTOL * s[k - 1]
    };
    if in_block(k) {
        let mut end = k;
        while in_block(end) {
            end += 1;
        }
        if end <= limit {
            k = end;
        } else {
            let mut start = k;
            while start > 1 && s[start - 2] - s[start - 1] <= DEGENERACY_RTOL * s[start - 2] {
                start -= 1;
            }
            if start > 1 {
                k = start - 1;
            }
        }
    }
    (k, tail[k] / total)
}

/// Thin SVD `m = U diag(S) Vh` of a matrix, with U and Vh row-major.
pub(crate) fn svd_matrix(m: MatRef<'_, C64>) -> Result<(Vec<C64>, Vec<f64>, Vec<C64>)> {
    let (r, c) = m.shape();
    let k = r.min(c);
    if !m.is_all_finite() {
        return Err(Error::Numeric("non-finite matrix passed to SVD".into()));
    }
    let svd = m
        .thin_svd()
        .map_err(|e| Error::Decomposition(format!("SVD of {r}x{c} matrix: {e:?}")))?;
    let s: Vec<f64> = (0..k).map(|i| svd.S().column_vector()[i].re).collect();
    let u = mat_to_row_major(svd.U());
    let vh = mat_to_row_major(svd.V().adjoint());
    Ok((u, s, vh))
}

/// Truncated SVD of a row-major matrix. Returns `(U, S, Vh, discarded)` with
/// `U` of shape rows×k and `Vh` of shape k×cols.
pub(crate) fn svd_matrix_truncated(
    m: MatRef<'_, C64>,
    policy: &TruncationPolicy,
) -> Result<(Vec<C64>, Vec<f64>, Vec<C64>, f64)> {
    let (r, c) = m.shape();
    let (u, mut s, vh) = svd_matrix(m)?;
    let kfull = s.len();
    let (k, discarded) = truncation_rank(&s, policy);
    let mut uk = Vec::with_capacity(r * k);
    for i in 0..r {
        uk.extend_from_slice(&u[i * kfull..i * kfull + k]);
    }
    let vk = vh[..k * c].to_vec();
    s.truncate(k);
    if policy.renormalize {
        let n = s.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            s.iter_mut().for_each(|x| *x /= n);
        }
    }
    Ok((uk, s, vk, discarded))
}

#[derive(Clone, Debug)]
pub struct SvdTruncation {
    pub u: DenseTensor,
    pub s: Vec<f64>,
    pub v: DenseTensor,
    pub discarded_weight: f64,
}

/// Truncated SVD of `t` viewed as a matrix with `row_axes` as rows and the
/// remaining axes (in order) as columns. `u` has shape `row dims + [k]`, `v`
/// has shape `[k] + column dims`.
pub fn svd_truncate(t: &DenseTensor, row_axes: &[usize], policy: &TruncationPolicy) -> Result<SvdTruncation> {
    if !t.is_finite() {
        return Err(Error::Numeric("non-finite tensor passed to svd_truncate".into()));
    }
    let col_axes: Vec<usize> = (0..t.rank()).filter(|a| !row_axes.contains(a)).collect();
    let perm: Vec<usize> = row_axes.iter().chain(&col_axes).copied().collect();
    let p = t.permute(&perm)?;
    let (u, s, vh, discarded_weight) = svd_matrix_truncated(p.as_matrix(row_axes.len()), policy)?;
    let k = s.len();
    let mut ushape: Vec<usize> = row_axes.iter().map(|&a| t.shape[a]).collect();
    ushape.push(k);
    let mut vshape = vec![k];
    vshape.extend(col_axes.iter().map(|&a| t.shape[a]));
    Ok(SvdTruncation {
        u: DenseTensor::new(ushape, u)?,
        s,
        v: DenseTensor::new(vshape, vh)?,
        discarded_weight,
    })
}

/// Thin QR of a row-major matrix: `(Q rows×k, R k×cols)` with k = min(rows, cols).
pub(crate) fn qr_matrix(m: MatRef<'_, C64>) -> (Vec<C64>, Vec<C64>) {
    let qr = m.qr();
    let q = qr.compute_thin_Q();
    let r = qr.thin_R();
    (mat_to_row_major(q.as_ref()), mat_to_row_major(r))
}

/// Eigendecomposition of a Hermitian row-major matrix: ascending eigenvalues and
/// eigenvectors stored as columns of a row-major matrix.
pub(crate) fn eigh(m: MatRef<'_, C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let n = m.nrows();
    let herm = Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let e = herm
        .self_adjoint_eigen(Side::Lower)
        .map_err(|err| Error::Decomposition(format!("Hermitian eigensolver on {n}x{n}: {err:?}")))?;
    let vals: Vec<f64> = (0..n).map(|i| e.S().column_vector()[i].re).collect();
    Ok((vals, e.U().to_owned()))
}

/// Von Neumann entropy in bits of a probability vector (entries below 1e-300 ignored).
pub fn entropy_bits(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 1e-300).map(|&x| -x * x.log2()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(shape: &[usize], rng: &mut ChaCha8Rng) -> DenseTensor {
        DenseTensor::from_fn(shape, |_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    #[test]
    fn identity_contraction_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let id = DenseTensor::from_fn(&[2, 2], |i| if i[0] == i[1] { ONE } else { ZERO });
        let m = random(&[2, 5], &mut rng);
        let r = contract(&id, &[1], &m, &[0]).unwrap();
        assert!(r.max_abs_diff(&m) < 1e-15);
    }

    #[test]
    fn z_eigenvector() {
        let v = DenseTensor::new(vec![2], vec![ONE, ZERO]).unwrap();
        let z = DenseTensor::new(vec![2, 2], vec![ONE, ZERO, ZERO, -ONE]).unwrap();
        let r = contract(&v, &[0], &z, &[0]).unwrap();
        assert_eq!(r.data(), &[ONE, ZERO]);
    }

    #[test]
    fn contraction_matches_loops() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random(&[4, 3, 2], &mut rng);
        let b = random(&[2, 3, 5], &mut rng);
        let r = contract(&a, &[1, 2], &b, &[1, 0]).unwrap();
        assert_eq!(r.shape(), &[4, 5]);
        for i in 0..4 {
            for l in 0..5 {
                let mut acc = ZERO;
                for j in 0..3 {
                    for k in 0..2 {
                        acc += a.get(&[i, j, k]) * b.get(&[k, j, l]);
                    }
                }
                assert!((acc - r.get(&[i, l])).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn contraction_rejects_mismatch() {
        let a = DenseTensor::zeros(&[2, 3]);
        let b = DenseTensor::zeros(&[2, 3]);
        assert!(matches!(contract(&a, &[1], &b, &[0]), Err(Error::Dimension(_))));
        assert!(matches!(contract(&a, &[0, 0], &b, &[0, 1]), Err(Error::Axes(_))));
    }

    #[test]
    fn contraction_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t1 = random(&[3, 4], &mut rng);
        let t2 = random(&[4, 5, 2], &mut rng);
        let t3 = random(&[2, 6], &mut rng);
        let left = contract(&contract(&t1, &[1], &t2, &[0]).unwrap(), &[2], &t3, &[0]).unwrap();
        let right = contract(&t1, &[1], &contract(&t2, &[2], &t3, &[0]).unwrap(), &[0]).unwrap();
        assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn permute_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = random(&[2, 3, 4, 5], &mut rng);
        let p = t.permute(&[2, 0, 3, 1]).unwrap();
        assert_eq!(p.shape(), &[4, 2, 5, 3]);
        assert_eq!(p.get(&[3, 1, 4, 2]), t.get(&[1, 2, 3, 4]));
        let back = p.permute(&[1, 3, 0, 2]).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn svd_rank_one() {
        let u = [C64::new(1.0, 0.5), C64::new(-0.3, 0.0), C64::new(0.2, 2.0)];
        let v = [C64::new(0.7, 0.0), C64::new(0.0, 1.0)];
        let t = DenseTensor::from_fn(&[3, 2], |i| u[i[0]] * v[i[1]]);
        let pol = TruncationPolicy::new(4, 1e-14);
        let r = svd_truncate(&t, &[0], &pol).unwrap();
        assert_eq!(r.s.len(), 1);
        assert!(r.discarded_weight < 1e-20);
    }

    #[test]
    fn svd_identity_keeps_degenerate_pair() {
        let t = DenseTensor::from_fn(&[2, 2], |i| if i[0] == i[1] { ONE } else { ZERO });
        let r = svd_truncate(&t, &[0], &TruncationPolicy::new(8, 0.0)).unwrap();
        assert_eq!(r.s.len(), 2);
        assert!((r.s[0] - 1.0).abs() < 1e-14 && (r.s[1] - 1.0).abs() < 1e-14);
        assert_eq!(r.discarded_weight, 0.0);
        // a bond cap of 1 would split the multiplet; it falls back to keeping one value
        let r1 = svd_truncate(&t, &[0], &TruncationPolicy::new(1, 0.0)).unwrap();
        assert_eq!(r1.s.len(), 1);
    }

    #[test]
    fn degenerate_block_dropped_together() {
        let s = [3.0, 1.0, 1.0, 0.5];
        let (k, w) = truncation_rank(&s, &TruncationPolicy::new(2, 0.0));
        assert_eq!(k, 1);
        assert!((w - 2.25 / 11.25).abs() < 1e-15);
        let (k, _) = truncation_rank(&s, &TruncationPolicy::new(3, 0.0));
        assert_eq!(k, 3);
    }

    #[test]
    fn truncated_reconstruction_matches_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = random(&[8, 8], &mut rng);
        let full = svd_truncate(&t, &[0], &TruncationPolicy::new(8, 0.0)).unwrap();
        let r = svd_truncate(&t, &[0], &TruncationPolicy::new(3, 0.0)).unwrap();
        let us = DenseTensor::from_fn(&[8, 3], |i| r.u.get(i) * r.s[i[1]]);
        let rec = contract(&us, &[1], &r.v, &[0]).unwrap();
        let err: f64 = rec.data().iter().zip(t.data()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let tail: f64 = full.s[3..].iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((err - tail).abs() < 1e-12);
        let total: f64 = full.s.iter().map(|x| x * x).sum();
        assert!((r.discarded_weight - tail * tail / total).abs() < 1e-12);
        assert!(r.s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn svd_lossless_and_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let t = random(&[3, 4, 5], &mut rng);
        let r = svd_truncate(&t, &[0, 2], &TruncationPolicy::new(100, 0.0)).unwrap();
        assert_eq!(r.u.shape(), &[3, 5, 4]);
        assert_eq!(r.v.shape(), &[4, 4]);
        let us = DenseTensor::from_fn(r.u.shape(), |i| r.u.get(i) * r.s[i[2]]);
        let rec = contract(&us, &[2], &r.v, &[0]).unwrap().permute(&[0, 2, 1]).unwrap();
        assert!(rec.max_abs_diff(&t) < 1e-12);
        let uu = contract(&r.u.conj(), &[0, 1], &r.u, &[0, 1]).unwrap();
        let vv = contract(&r.v, &[1], &r.v.conj(), &[1]).unwrap();
        for m in [uu, vv] {
            let id = DenseTensor::from_fn(m.shape(), |i| if i[0] == i[1] { ONE } else { ZERO });
            assert!(m.max_abs_diff(&id) < 1e-12);
        }
    }

    #[test]
    fn renormalized_spectrum_has_unit_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = random(&[6, 6], &mut rng);
        let pol = TruncationPolicy { max_bond: 2, cutoff: 0.0, renormalize: true };
        let r = svd_truncate(&t, &[0], &pol).unwrap();
        let n: f64 = r.s.iter().map(|x| x * x).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_rejected() {
        let mut t = DenseTensor::zeros(&[2, 2]);
        t.set(&[0, 0], C64::new(f64::NAN, 0.0));
        assert!(matches!(svd_truncate(&t, &[0], &TruncationPolicy::default()), Err(Error::Numeric(_))));
    }
}
