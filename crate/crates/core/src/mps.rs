//! Matrix product states on open chains.
//!
//! Site tensors have shape `(chi_left, d, chi_right)` with boundary bonds of
//! extent 1. The represented state is `exp(norm_log)` times the contraction of
//! the tensors.

use std::ops::Range;

use faer::MatRef;
use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{local_pauli, PauliString};
use crate::tensor::{
    eigh, entropy_bits, gemm, mat_to_row_major, qr_matrix, svd_matrix, svd_matrix_truncated, DenseTensor,
    TruncationPolicy, C64, ONE, ZERO,
};

/// Size limit for reduced density matrices of disconnected regions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EntropyBudget {
    /// Largest number of sites whose joint Hilbert space may be materialised.
    pub max_sites: usize,
}

impl EntropyBudget {
    pub fn for_local_dim(d: usize) -> Self {
        Self { max_sites: if d <= 2 { 14 } else { 9 } }
    }
}

/// Largest number of amplitudes materialised when contracting a disconnected segment.
const SEGMENT_ENTRY_LIMIT: usize = 1 << 26;

#[derive(Clone, Debug)]
pub struct MatrixProductState {
    d: usize,
    tensors: Vec<DenseTensor>,
    ortho_center: Option<usize>,
    norm_log: f64,
}

impl MatrixProductState {
    pub fn from_tensors(d: usize, tensors: Vec<DenseTensor>) -> Result<Self> {
        if tensors.is_empty() {
            return Err(Error::ChainLength { len: 0, reason: "empty chain".into() });
        }
        if d < 2 {
            return Err(Error::LocalDim(format!("local dimension {d}")));
        }
        let n = tensors.len();
        for (i, t) in tensors.iter().enumerate() {
            let sh = t.shape();
            if sh.len() != 3 || sh[1] != d {
                return Err(Error::Dimension(format!("site {i} has shape {sh:?}, expected (l, {d}, r)")));
            }
            if i == 0 && sh[0] != 1 {
                return Err(Error::Dimension("left boundary bond must be 1".into()));
            }
            if i == n - 1 && sh[2] != 1 {
                return Err(Error::Dimension("right boundary bond must be 1".into()));
            }
            if i + 1 < n && sh[2] != tensors[i + 1].shape()[0] {
                return Err(Error::Dimension(format!(
                    "bond between sites {i} and {} is {} vs {}",
                    i + 1,
                    sh[2],
                    tensors[i + 1].shape()[0]
                )));
            }
            if !t.is_finite() {
                return Err(Error::Numeric(format!("site {i} has non-finite entries")));
            }
        }
        Ok(Self { d, tensors, ortho_center: None, norm_log: 0.0 })
    }

    /// Product state from one local amplitude vector per site.
    pub fn product_state(d: usize, locals: &[Vec<C64>]) -> Result<Self> {
        let tensors = locals
            .iter()
            .map(|v| DenseTensor::new(vec![1, d, 1], v.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_tensors(d, tensors)
    }

    /// Computational basis state `|s_1 ... s_L>`.
    pub fn basis_state(d: usize, config: &[usize]) -> Result<Self> {
        let locals: Vec<Vec<C64>> = config
            .iter()
            .map(|&s| (0..d).map(|k| if k == s { ONE } else { ZERO }).collect())
            .collect();
        Self::product_state(d, &locals)
    }

    /// Random state with bonds `min(chi, d^k, d^(L-k))`, entries uniform in the unit square.
    pub fn random<R: Rng + ?Sized>(len: usize, d: usize, chi: usize, rng: &mut R) -> Result<Self> {
        let bond = |k: usize| -> usize {
            let cap = |n: usize| d.checked_pow(n as u32).unwrap_or(usize::MAX);
            chi.min(cap(k)).min(cap(len - k)).max(1)
        };
        let tensors = (0..len)
            .map(|i| {
                DenseTensor::from_fn(&[bond(i), d, bond(i + 1)], |_| {
                    C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
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

    pub fn tensor(&self, site: usize) -> &DenseTensor {
        &self.tensors[site]
    }

    pub fn ortho_center(&self) -> Option<usize> {
        self.ortho_center
    }

    pub fn norm_log(&self) -> f64 {
        self.norm_log
    }

    /// Bond extents including the two boundary bonds (length L+1).
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.tensors.iter().map(|t| t.shape()[0]).collect();
        v.push(1);
        v
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.len() {
            return Err(Error::SiteOutOfRange { site, len: self.len() });
        }
        Ok(())
    }

    /// Multiplies the represented state by a nonzero real factor.
    pub fn scale_by(&mut self, factor: f64) {
        self.norm_log += factor.abs().ln();
        if factor < 0.0 {
            let k = self.ortho_center.unwrap_or(0);
            self.tensors[k].scale(-ONE);
        }
    }

    pub(crate) fn add_norm_log(&mut self, x: f64) {
        self.norm_log += x;
    }

    fn left_orthonormalize(&mut self, k: usize) {
        let t = &self.tensors[k];
        let (l, d, r) = (t.shape()[0], t.shape()[1], t.shape()[2]);
        let (q, rm) = qr_matrix(t.as_matrix(2));
        let kdim = (l * d).min(r);
        self.tensors[k] = DenseTensor::new(vec![l, d, kdim], q).expect("QR shape");
        let next = &self.tensors[k + 1];
        let (d2, r2) = (next.shape()[1], next.shape()[2]);
        let data = gemm(MatRef::from_row_major_slice(&rm, kdim, r), next.as_matrix(1));
        self.tensors[k + 1] = DenseTensor::new(vec![kdim, d2, r2], data).expect("QR shape");
    }

    fn right_orthonormalize(&mut self, k: usize) {
        let t = &self.tensors[k];
        let (l, d, r) = (t.shape()[0], t.shape()[1], t.shape()[2]);
        // M = R^H Q^H from the QR of M^H
        let mh = t.as_matrix(1).adjoint().to_owned();
        let (q, rm) = qr_matrix(mh.as_ref());
        let kdim = l.min(d * r);
        let qh = MatRef::from_row_major_slice(&q, d * r, kdim).adjoint().to_owned();
        self.tensors[k] = DenseTensor::new(vec![kdim, d, r], mat_to_row_major(qh.as_ref())).expect("LQ shape");
        let rh = MatRef::from_row_major_slice(&rm, kdim, l).adjoint().to_owned();
        let prev = &self.tensors[k - 1];
        let (l0, d0) = (prev.shape()[0], prev.shape()[1]);
        let data = gemm(prev.as_matrix(2), rh.as_ref());
        self.tensors[k - 1] = DenseTensor::new(vec![l0, d0, kdim], data).expect("LQ shape");
    }

    /// Brings the state to mixed canonical form with orthogonality center `center`.
    pub fn canonicalize(&mut self, center: usize) -> Result<()> {
        self.check_site(center)?;
        let (lo, hi) = match self.ortho_center {
            Some(c) => (c.min(center), c.max(center)),
            None => (0, self.len() - 1),
        };
        for k in lo..center {
            self.left_orthonormalize(k);
        }
        for k in (center + 1..=hi).rev() {
            self.right_orthonormalize(k);
        }
        self.ortho_center = Some(center);
        Ok(())
    }

    /// Canonical copy with the given center.
    pub fn canonicalized(&self, center: usize) -> Result<Self> {
        let mut s = self.clone();
        s.canonicalize(center)?;
        Ok(s)
    }

    /// Norm of the represented state.
    pub fn norm(&self) -> f64 {
        let mut s = self.clone();
        let c = s.ortho_center.unwrap_or(0);
        s.canonicalize(c).expect("valid center");
        s.tensors[c].norm() * self.norm_log.exp()
    }

    /// Normalized copy in right-canonical form (center at site 0).
    pub fn normalize(&self) -> Result<Self> {
        let mut s = self.clone();
        s.normalize_in_place()?;
        Ok(s)
    }

    pub fn normalize_in_place(&mut self) -> Result<()> {
        let c = self.ortho_center.unwrap_or(0);
        self.canonicalize(c)?;
        let n = self.tensors[c].norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::DegenerateState(format!("state norm is {n}")));
        }
        self.tensors[c].scale(C64::new(1.0 / n, 0.0));
        self.norm_log = 0.0;
        if c != 0 {
            self.canonicalize(0)?;
        }
        Ok(())
    }

    /// Whether sites left of the center are left isometries and sites right of it right isometries.
    pub fn check_canonical(&self, tol: f64) -> bool {
        let Some(c) = self.ortho_center else { return false };
        let is_identity = |m: Vec<C64>, n: usize| {
            (0..n).all(|i| (0..n).all(|j| (m[i * n + j] - if i == j { ONE } else { ZERO }).norm() < tol))
        };
        for (k, t) in self.tensors.iter().enumerate() {
            if k < c {
                let a = t.as_matrix(2);
                if !is_identity(gemm(a.adjoint(), a), a.ncols()) {
                    return false;
                }
            } else if k > c {
                let a = t.as_matrix(1);
                if !is_identity(gemm(a, a.adjoint()), a.nrows()) {
                    return false;
                }
            }
        }
        true
    }

    /// Applies a `d x d` operator (row-major) to one site. Unitary operators keep
    /// the canonical form; pass `unitary = false` for anything else.
    pub fn apply_single_site(&mut self, site: usize, op: &[C64], unitary: bool) -> Result<()> {
        self.check_site(site)?;
        let d = self.d;
        if op.len() != d * d {
            return Err(Error::LocalDim(format!("operator with {} entries for d={d}", op.len())));
        }
        let t = &self.tensors[site];
        let (l, r) = (t.shape()[0], t.shape()[2]);
        let new = DenseTensor::from_fn(&[l, d, r], |i| (0..d).map(|s| op[i[1] * d + s] * t.get(&[i[0], s, i[2]])).sum());
        self.tensors[site] = new;
        if !unitary {
            self.ortho_center = None;
        }
        Ok(())
    }

    /// Applies `S(theta) = |0><0| + exp(i theta)|1><1|` on `site`.
    pub fn apply_phase_gate(&self, site: usize, theta: f64) -> Result<Self> {
        if self.d != 2 {
            return Err(Error::LocalDim("phase gates act on qubits".into()));
        }
        let mut s = self.clone();
        s.apply_single_site(site, &[ONE, ZERO, ZERO, C64::from_polar(1.0, theta)], true)?;
        Ok(s)
    }

    /// Applies a T gate (phase pi/4) on every listed site.
    pub fn dope_with_t_gates(&self, sites: &[usize]) -> Result<Self> {
        if self.d != 2 {
            return Err(Error::LocalDim("T gates act on qubits".into()));
        }
        let mut seen = vec![false; self.len()];
        let mut s = self.clone();
        let t = [ONE, ZERO, ZERO, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)];
        for &site in sites {
            self.check_site(site)?;
            if std::mem::replace(&mut seen[site], true) {
                return Err(Error::DuplicateSite(site));
            }
            s.apply_single_site(site, &t, true)?;
        }
        Ok(s)
    }

    /// Direct sum `self + other` as an MPS with summed bond dimensions.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() || self.d != other.d {
            return Err(Error::Dimension("adding states of different shape".into()));
        }
        let n = self.len();
        let d = self.d;
        let fa = C64::new(self.norm_log.exp(), 0.0);
        let fb = C64::new(other.norm_log.exp(), 0.0);
        if n == 1 {
            let t = DenseTensor::from_fn(&[1, d, 1], |i| fa * self.tensors[0].get(i) + fb * other.tensors[0].get(i));
            return Self::from_tensors(d, vec![t]);
        }
        let mut tensors = Vec::with_capacity(n);
        for k in 0..n {
            let a = &self.tensors[k];
            let b = &other.tensors[k];
            let (al, ar) = (a.shape()[0], a.shape()[2]);
            let (bl, br) = (b.shape()[0], b.shape()[2]);
            let t = if k == 0 {
                DenseTensor::from_fn(&[1, d, ar + br], |i| {
                    if i[2] < ar {
                        fa * a.get(&[0, i[1], i[2]])
                    } else {
                        fb * b.get(&[0, i[1], i[2] - ar])
                    }
                })
            } else if k == n - 1 {
                DenseTensor::from_fn(&[al + bl, d, 1], |i| {
                    if i[0] < al {
                        a.get(&[i[0], i[1], 0])
                    } else {
                        b.get(&[i[0] - al, i[1], 0])
                    }
                })
            } else {
                DenseTensor::from_fn(&[al + bl, d, ar + br], |i| {
                    if i[0] < al && i[2] < ar {
                        a.get(i)
                    } else if i[0] >= al && i[2] >= ar {
                        b.get(&[i[0] - al, i[1], i[2] - ar])
                    } else {
                        ZERO
                    }
                })
            };
            tensors.push(t);
        }
        Self::from_tensors(d, tensors)
    }

    /// Truncates every bond to `policy`, ending in right-canonical form with the
    /// norm preserved (or restored to 1 when `policy.renormalize`). Returns the
    /// discarded weight at each bond.
    pub fn compress(&mut self, policy: &TruncationPolicy) -> Result<Vec<f64>> {
        let n = self.len();
        self.canonicalize(n - 1)?;
        let mut discarded = vec![0.0; n.saturating_sub(1)];
        for k in (1..n).rev() {
            let t = &self.tensors[k];
            let (l, d, r) = (t.shape()[0], t.shape()[1], t.shape()[2]);
            let (u, s, vh, w) = svd_matrix_truncated(t.as_matrix(1), &TruncationPolicy { renormalize: false, ..*policy })?;
            let kdim = s.len();
            discarded[k - 1] = w;
            self.tensors[k] = DenseTensor::new(vec![kdim, d, r], vh)?;
            let us: Vec<C64> = u.iter().enumerate().map(|(i, z)| z * s[i % kdim]).collect();
            let prev = &self.tensors[k - 1];
            let (l0, d0) = (prev.shape()[0], prev.shape()[1]);
            let data = gemm(prev.as_matrix(2), MatRef::from_row_major_slice(&us, l, kdim));
            self.tensors[k - 1] = DenseTensor::new(vec![l0, d0, kdim], data)?;
        }
        self.ortho_center = Some(0);
        if policy.renormalize {
            self.normalize_in_place()?;
        }
        Ok(discarded)
    }

    /// Left environment step: `E'[b', b] = sum conj(A[a', s, b']) O[s, s'] E[a', a] A[a, s', b]`.
    fn transfer(env: &[C64], bra: &DenseTensor, ket: &DenseTensor, op: Option<&[C64]>) -> Vec<C64> {
        let (la, d, ra) = (ket.shape()[0], ket.shape()[1], ket.shape()[2]);
        let (lb, _rb) = (bra.shape()[0], bra.shape()[2]);
        let x = gemm(MatRef::from_row_major_slice(env, lb, la), ket.as_matrix(1));
        let y = match op {
            None => x,
            Some(o) => {
                let mut y = vec![ZERO; lb * d * ra];
                for a in 0..lb {
                    for s in 0..d {
                        for sp in 0..d {
                            let c = o[s * d + sp];
                            if c == ZERO {
                                continue;
                            }
                            let src = &x[(a * d + sp) * ra..(a * d + sp + 1) * ra];
                            let dst = &mut y[(a * d + s) * ra..(a * d + s + 1) * ra];
                            dst.iter_mut().zip(src).for_each(|(t, v)| *t += c * v);
                        }
                    }
                }
                y
            }
        };
        gemm(bra.as_matrix(2).adjoint(), MatRef::from_row_major_slice(&y, lb * d, ra))
    }

    /// `<self|other>` including both scale factors.
    pub fn overlap(&self, other: &Self) -> Result<C64> {
        if self.len() != other.len() || self.d != other.d {
            return Err(Error::Dimension("overlap of states of different shape".into()));
        }
        let mut env = vec![ONE];
        for (a, b) in self.tensors.iter().zip(&other.tensors) {
            env = Self::transfer(&env, a, b, None);
        }
        Ok(env[0] * (self.norm_log + other.norm_log).exp())
    }

    /// `<psi|P|psi> / <psi|psi>` by one left-to-right transfer sweep.
    pub fn expect_pauli(&self, p: &PauliString) -> Result<C64> {
        if p.d() != self.d {
            return Err(Error::LocalDim(format!("Pauli string for d={} on a d={} state", p.d(), self.d)));
        }
        let labels = p.labels(self.len())?;
        let ops: Vec<Option<Vec<C64>>> =
            labels.iter().map(|&l| if l == 0 { None } else { Some(local_pauli(self.d, l)) }).collect();
        self.expect_product(&ops)
    }

    /// Expectation of a product of single-site operators (None = identity), normalized.
    pub fn expect_product(&self, ops: &[Option<Vec<C64>>]) -> Result<C64> {
        if ops.len() != self.len() {
            return Err(Error::Dimension(format!("{} operators for {} sites", ops.len(), self.len())));
        }
        let mut env = vec![ONE];
        let mut norm = vec![ONE];
        for (t, op) in self.tensors.iter().zip(ops) {
            env = Self::transfer(&env, t, t, op.as_deref());
            norm = Self::transfer(&norm, t, t, None);
        }
        if norm[0].re <= 0.0 {
            return Err(Error::DegenerateState("zero-norm state".into()));
        }
        Ok(env[0] / norm[0].re)
    }

    /// Schmidt probabilities across the bond after `cut` sites (`1 <= cut < L`), descending.
    pub fn schmidt_spectrum(&self, cut: usize) -> Result<Vec<f64>> {
        if cut == 0 || cut >= self.len() {
            return Err(Error::SiteOutOfRange { site: cut, len: self.len() });
        }
        let s = self.canonicalized(cut - 1)?;
        let (_, sv, _) = svd_matrix(s.tensors[cut - 1].as_matrix(2))?;
        let total: f64 = sv.iter().map(|x| x * x).sum();
        if total <= 0.0 {
            return Err(Error::DegenerateState("zero-norm state".into()));
        }
        Ok(sv.iter().map(|x| x * x / total).collect())
    }

    /// Von Neumann entropy in bits across the bond after `cut` sites.
    pub fn entanglement_entropy(&self, cut: usize) -> Result<f64> {
        Ok(entropy_bits(&self.schmidt_spectrum(cut)?))
    }

    /// Von Neumann entropy in bits of the union of `windows` (0-based half-open
    /// ranges, at most two after merging).
    pub fn subsystem_entropy(&self, windows: &[Range<usize>], budget: &EntropyBudget) -> Result<f64> {
        let n = self.len();
        let region = normalize_windows(windows, n)?;
        let complement = complement_windows(&region, n);
        if region.is_empty() || complement.is_empty() {
            return Ok(0.0);
        }
        if region.len() > 2 {
            return Err(Error::Parameter(format!("region {region:?} has more than two windows")));
        }
        // the entropy of a pure state is shared by a region and its complement
        let single = if region.len() == 1 {
            Some(region[0].clone())
        } else if complement.len() == 1 {
            Some(complement[0].clone())
        } else {
            None
        };
        if let Some(w) = single {
            if w.start == 0 {
                return self.entanglement_entropy(w.end);
            }
            if w.end == n {
                return self.entanglement_entropy(w.start);
            }
            return self.window_entropy(w);
        }
        self.segment_entropy(&region, budget)
    }

    /// Entropy of an interior window from the Gram matrix of its boundary bonds.
    fn window_entropy(&self, w: Range<usize>) -> Result<f64> {
        let s = self.canonicalized(w.start)?;
        let chi_a = s.tensors[w.start].shape()[0];
        let mut t = DenseTensor::from_fn(&[chi_a, chi_a, chi_a, chi_a], |i| {
            if i[0] == i[2] && i[1] == i[3] {
                ONE
            } else {
                ZERO
            }
        });
        for k in w.clone() {
            let a = &s.tensors[k];
            // (a, a', x, x') . (x, s, y) -> (a, a', x', s, y)
            let u = crate::tensor::contract(&t, &[2], a, &[0])?;
            // (a, a', x', s, y) . conj(x', s, y') -> (a, a', y, y')
            t = crate::tensor::contract(&u, &[2, 3], &a.conj(), &[0, 1])?;
        }
        let chi_c = t.shape()[2];
        let k = t.permute(&[0, 2, 1, 3])?;
        let dim = chi_a * chi_c;
        let (vals, _) = eigh(MatRef::from_row_major_slice(k.data(), dim, dim))?;
        Ok(spectrum_entropy(&vals))
    }

    /// Entropy of a two-window region whose complement also has two windows, by
    /// materialising the amplitudes of the enclosing segment.
    fn segment_entropy(&self, region: &[Range<usize>], budget: &EntropyBudget) -> Result<f64> {
        let start = region[0].start;
        let end = region[region.len() - 1].end;
        let s = self.canonicalized(start)?;
        let d = self.d;
        let chi_a = s.tensors[start].shape()[0];
        let chi_c = s.tensors[end - 1].shape()[2];
        let span = end - start;
        let region_sites: usize = region.iter().map(|w| w.len()).sum();
        let other_sites = span - region_sites;
        let pow = |k: usize| d.checked_pow(k as u32).unwrap_or(usize::MAX);
        let rows = chi_a.saturating_mul(pow(other_sites)).saturating_mul(chi_c);
        let cols = pow(region_sites);
        let limit = pow(budget.max_sites);
        if rows.min(cols) > limit || rows.saturating_mul(cols) > SEGMENT_ENTRY_LIMIT {
            return Err(Error::Capacity {
                what: format!("reduced density matrix of {region_sites} sites (complement dimension {rows})"),
                limit: format!("{} sites, {} amplitudes", budget.max_sites, SEGMENT_ENTRY_LIMIT),
            });
        }
        // amplitudes X[a, s_start, ..., s_end-1, c]
        let mut x: Vec<C64> = (0..chi_a * chi_a).map(|i| if i / chi_a == i % chi_a { ONE } else { ZERO }).collect();
        let mut lead = chi_a;
        let mut bond = chi_a;
        for k in start..end {
            let t = &s.tensors[k];
            x = gemm(MatRef::from_row_major_slice(&x, lead, bond), t.as_matrix(1));
            lead *= d;
            bond = t.shape()[2];
        }
        let mut shape = vec![chi_a];
        shape.extend(std::iter::repeat(d).take(span));
        shape.push(chi_c);
        let amp = DenseTensor::new(shape, x)?;
        let in_region = |k: usize| region.iter().any(|w| w.contains(&(start + k)));
        let mut perm = vec![0];
        perm.extend((0..span).filter(|&k| !in_region(k)).map(|k| k + 1));
        perm.push(span + 1);
        perm.extend((0..span).filter(|&k| in_region(k)).map(|k| k + 1));
        let m = amp.permute(&perm)?;
        let mat = MatRef::from_row_major_slice(m.data(), rows, cols);
        let gram = if rows <= cols { gemm(mat, mat.adjoint()) } else { gemm(mat.adjoint(), mat) };
        let dim = rows.min(cols);
        let (vals, _) = eigh(MatRef::from_row_major_slice(&gram, dim, dim))?;
        Ok(spectrum_entropy(&vals))
    }
}

/// Entropy in bits of the normalized positive part of an eigenvalue list.
fn spectrum_entropy(vals: &[f64]) -> f64 {
    let total: f64 = vals.iter().filter(|&&v| v > 0.0).sum();
    let p: Vec<f64> = vals.iter().filter(|&&v| v > 0.0).map(|v| v / total).collect();
    entropy_bits(&p)
}

/// Sorts, validates and merges windows; empty windows are dropped.
pub fn normalize_windows(windows: &[Range<usize>], len: usize) -> Result<Vec<Range<usize>>> {
    let mut w: Vec<Range<usize>> = windows.iter().filter(|r| !r.is_empty()).cloned().collect();
    for r in &w {
        if r.end > len {
            return Err(Error::SiteOutOfRange { site: r.end - 1, len });
        }
    }
    w.sort_by_key(|r| r.start);
    let mut out: Vec<Range<usize>> = Vec::new();
    for r in w {
        match out.last_mut() {
            Some(last) if r.start <= last.end => last.end = last.end.max(r.end),
            _ => out.push(r),
        }
    }
    Ok(out)
}

/// Complement of merged windows within `0..len`.
pub fn complement_windows(windows: &[Range<usize>], len: usize) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut pos = 0;
    for w in windows {
        if w.start > pos {
            out.push(pos..w.start);
        }
        pos = w.end;
    }
    if pos < len {
        out.push(pos..len);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn canonical_forms_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let psi = MatrixProductState::random(7, 2, 5, &mut rng).unwrap();
        for c in 0..7 {
            let s = psi.canonicalized(c).unwrap();
            assert!(s.check_canonical(1e-10), "center {c}");
            let ov = s.overlap(&psi).unwrap();
            let nn = psi.overlap(&psi).unwrap();
            assert!((ov - nn).norm() < 1e-10 * nn.norm());
        }
    }

    #[test]
    fn normalize_scaled_product() {
        let three = C64::new(3.0, 0.0);
        let psi = MatrixProductState::product_state(2, &vec![vec![three, ZERO]; 4]).unwrap();
        let n = psi.normalize().unwrap();
        assert!((n.overlap(&n).unwrap() - ONE).norm() < 1e-12);
        assert!(n.check_canonical(1e-12));
    }

    #[test]
    fn zero_state_is_degenerate() {
        let psi = MatrixProductState::product_state(2, &vec![vec![ZERO, ZERO]; 3]).unwrap();
        assert!(matches!(psi.normalize(), Err(Error::DegenerateState(_))));
    }

    #[test]
    fn phase_gate_on_plus() {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let plus = MatrixProductState::product_state(2, &[vec![h, h]]).unwrap();
        let t = plus.apply_phase_gate(0, std::f64::consts::FRAC_PI_4).unwrap();
        let x = t.expect_pauli(&PauliString::qubit(&[(0, 'X')]).unwrap()).unwrap();
        assert!((x.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        assert!(matches!(plus.apply_phase_gate(3, 0.1), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(plus.dope_with_t_gates(&[0, 0]), Err(Error::DuplicateSite(0))));
    }

    #[test]
    fn compress_preserves_norm_and_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let psi = MatrixProductState::random(6, 2, 4, &mut rng).unwrap();
        let doubled = psi.add(&psi).unwrap();
        assert_eq!(doubled.max_bond(), 8);
        let mut c = doubled.clone();
        let w = c.compress(&TruncationPolicy::exact()).unwrap();
        assert!(w.iter().all(|&x| x < 1e-20));
        assert!(c.max_bond() <= 4);
        let a = c.overlap(&psi).unwrap();
        let b = psi.overlap(&psi).unwrap() * 2.0;
        assert!((a - b).norm() < 1e-10 * b.norm());
    }

    #[test]
    fn window_helpers() {
        let w = normalize_windows(&[4..6, 0..2, 2..3], 8).unwrap();
        assert_eq!(w, vec![0..3, 4..6]);
        assert_eq!(complement_windows(&w, 8), vec![3..4, 6..8]);
        assert!(normalize_windows(&[0..9], 8).is_err());
    }
}
