//! Brute-force references on dense statevectors: exact SRE by Pauli
//! enumeration, reduced density matrices, and exact ground states.

use std::ops::Range;

use faer::MatRef;

use crate::error::{Error, Result};
use crate::hamiltonians::{spin_one, ModelKind, ModelSpec};
use crate::mps::{normalize_windows, MatrixProductState};
use crate::pauli::local_pauli;
use crate::tensor::{eigh, entropy_bits, gemm, C64, ONE, ZERO};

/// Largest statevector length produced from an MPS.
pub const STATEVECTOR_LIMIT: usize = 1 << 14;
/// Largest dense Hamiltonian dimension diagonalised directly.
pub const DENSE_EIGEN_LIMIT: usize = 4096;

fn pow(d: usize, n: usize) -> usize {
    d.checked_pow(n as u32).unwrap_or(usize::MAX)
}

fn chain_len(len: usize, d: usize) -> Result<usize> {
    let mut n = 0;
    let mut m = 1;
    while m < len {
        m *= d;
        n += 1;
    }
    if m != len {
        return Err(Error::Dimension(format!("vector length {len} is not a power of {d}")));
    }
    Ok(n)
}

/// Dense normalized statevector with site 0 as the most significant digit.
pub fn statevector(psi: &MatrixProductState) -> Result<Vec<C64>> {
    let dim = pow(psi.d(), psi.len());
    if dim > STATEVECTOR_LIMIT {
        return Err(Error::Capacity { what: format!("statevector of length {dim}"), limit: STATEVECTOR_LIMIT.to_string() });
    }
    let mut v = vec![ONE];
    let mut lead = 1;
    for t in psi.tensors() {
        let l = t.shape()[0];
        v = gemm(MatRef::from_row_major_slice(&v, lead, l), t.as_matrix(1));
        lead *= psi.d();
    }
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::DegenerateState("zero statevector".into()));
    }
    v.iter_mut().for_each(|z| *z /= norm);
    Ok(v)
}

/// Reduced density matrix (row-major) of the sites flagged in `keep`, for a
/// statevector on `keep.len()` sites of dimension `d`.
pub fn reduced_density_matrix(vec: &[C64], d: usize, keep: &[bool]) -> Result<Vec<C64>> {
    let n = chain_len(vec.len(), d)?;
    if keep.len() != n {
        return Err(Error::Dimension(format!("mask of length {} for {n} sites", keep.len())));
    }
    let kept: Vec<usize> = (0..n).filter(|&i| keep[i]).collect();
    let traced: Vec<usize> = (0..n).filter(|&i| !keep[i]).collect();
    let (dk, dt) = (pow(d, kept.len()), pow(d, traced.len()));
    // psi as a (kept x traced) matrix
    let mut m = vec![ZERO; dk * dt];
    for (idx, amp) in vec.iter().enumerate() {
        let digit = |site: usize| (idx / pow(d, n - 1 - site)) % d;
        let r = kept.iter().fold(0, |acc, &s| acc * d + digit(s));
        let c = traced.iter().fold(0, |acc, &s| acc * d + digit(s));
        m[r * dt + c] = *amp;
    }
    let mm = MatRef::from_row_major_slice(&m, dk, dt);
    Ok(gemm(mm, mm.adjoint()))
}

/// Von Neumann entropy in bits of the union of `windows`.
pub fn rdm_entropy(vec: &[C64], d: usize, windows: &[Range<usize>]) -> Result<f64> {
    let n = chain_len(vec.len(), d)?;
    let w = normalize_windows(windows, n)?;
    let keep: Vec<bool> = (0..n).map(|i| w.iter().any(|r| r.contains(&i))).collect();
    let rho = reduced_density_matrix(vec, d, &keep)?;
    let dim = (rho.len() as f64).sqrt().round() as usize;
    let (vals, _) = eigh(MatRef::from_row_major_slice(&rho, dim, dim))?;
    let p: Vec<f64> = vals.into_iter().map(|v| v.max(0.0)).collect();
    Ok(entropy_bits(&p))
}

/// All Pauli expectations `Tr(P rho)` of a `d^n x d^n` density matrix, indexed by
/// the label string read as a base-`d^2` number (site 0 most significant).
pub fn pauli_spectrum(rho: &[C64], d: usize) -> Result<Vec<C64>> {
    let dim = (rho.len() as f64).sqrt().round() as usize;
    let n = chain_len(dim, d)?;
    let q = d * d;
    // ops[a][(i, j)] = P_a[j, i], so Tr(P rho) = sum_ij P[j, i] rho[i, j]
    let ops: Vec<Vec<C64>> = (0..q)
        .map(|a| {
            let p = local_pauli(d, a);
            (0..q).map(|ij| p[(ij % d) * d + ij / d]).collect()
        })
        .collect();
    // reorder rho[i_1..i_n, j_1..j_n] into pairs (i_1 j_1)(i_2 j_2)...
    let mut cur = vec![ZERO; rho.len()];
    for i in 0..dim {
        for j in 0..dim {
            let mut idx = 0;
            for site in 0..n {
                let p = pow(d, n - 1 - site);
                idx = idx * q + ((i / p) % d) * d + (j / p) % d;
            }
            cur[idx] = rho[i * dim + j];
        }
    }
    // per-site change of basis (i j) -> a
    for site in 0..n {
        let inner = pow(q, n - 1 - site);
        let outer = pow(q, site);
        let mut next = vec![ZERO; cur.len()];
        for o in 0..outer {
            for a in 0..q {
                let op = &ops[a];
                for ij in 0..q {
                    let c = op[ij];
                    if c == ZERO {
                        continue;
                    }
                    let src = (o * q + ij) * inner;
                    let dst = (o * q + a) * inner;
                    for t in 0..inner {
                        next[dst + t] += c * cur[src + t];
                    }
                }
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// Largest number of region sites enumerated by [`exact_sre`].
pub fn exact_sre_limit(d: usize) -> usize {
    if d <= 2 {
        10
    } else {
        7
    }
}

/// Stabilizer Renyi entropy in bits by enumeration of the (restricted) Pauli group.
/// Without a region this is the pure-state formula with normalization `d^L`;
/// with a region it is the mixed-state formula with the purity denominator.
pub fn exact_sre(vec: &[C64], d: usize, n: usize, region: Option<&[Range<usize>]>) -> Result<f64> {
    if n < 2 {
        return Err(Error::Parameter(format!("replica order {n} < 2")));
    }
    let len = chain_len(vec.len(), d)?;
    let keep: Vec<bool> = match region {
        None => vec![true; len],
        Some(w) => {
            let w = normalize_windows(w, len)?;
            (0..len).map(|i| w.iter().any(|r| r.contains(&i))).collect()
        }
    };
    let k = keep.iter().filter(|&&b| b).count();
    if k > exact_sre_limit(d) {
        return Err(Error::Capacity {
            what: format!("Pauli enumeration over {k} sites"),
            limit: format!("{} sites", exact_sre_limit(d)),
        });
    }
    if k == 0 {
        return Err(Error::Parameter("empty region".into()));
    }
    let rho = reduced_density_matrix(vec, d, &keep)?;
    let spec = pauli_spectrum(&rho, d)?;
    let num: f64 = spec.iter().map(|c| c.norm_sqr().powi(n as i32)).sum();
    let den = match region {
        None => pow(d, len) as f64,
        Some(_) => spec.iter().map(|c| c.norm_sqr()).sum(),
    };
    Ok((num / den).log2() / (1.0 - n as f64))
}

/// Sum of local terms, each a coefficient times single-site operators.
#[derive(Clone, Debug)]
pub struct SpinHamiltonian {
    pub d: usize,
    pub len: usize,
    pub terms: Vec<(f64, Vec<(usize, Vec<C64>)>)>,
}

impl SpinHamiltonian {
    pub fn new(d: usize, len: usize) -> Self {
        Self { d, len, terms: Vec::new() }
    }

    pub fn push(&mut self, coef: f64, ops: Vec<(usize, Vec<C64>)>) {
        if coef != 0.0 {
            self.terms.push((coef, ops));
        }
    }

    pub fn dim(&self) -> usize {
        pow(self.d, self.len)
    }

    /// `H v` without forming the matrix.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let d = self.d;
        let n = self.len;
        let dim = self.dim();
        let mut out = vec![ZERO; dim];
        for (coef, ops) in &self.terms {
            let mut cur = v.to_vec();
            for (site, op) in ops {
                let stride = pow(d, n - 1 - site);
                let mut next = vec![ZERO; dim];
                for idx in 0..dim {
                    let s_in = (idx / stride) % d;
                    let base = idx - s_in * stride;
                    let amp = cur[idx];
                    if amp == ZERO {
                        continue;
                    }
                    for s_out in 0..d {
                        let c = op[s_out * d + s_in];
                        if c != ZERO {
                            next[base + s_out * stride] += c * amp;
                        }
                    }
                }
                cur = next;
            }
            out.iter_mut().zip(cur).for_each(|(o, c)| *o += c * *coef);
        }
        out
    }

    /// Dense row-major matrix (Kronecker sum of the terms).
    pub fn to_dense(&self) -> Result<Vec<C64>> {
        let dim = self.dim();
        if dim > DENSE_EIGEN_LIMIT {
            return Err(Error::Capacity { what: format!("dense Hamiltonian of dimension {dim}"), limit: DENSE_EIGEN_LIMIT.to_string() });
        }
        let mut m = vec![ZERO; dim * dim];
        let mut e = vec![ZERO; dim];
        for c in 0..dim {
            e[c] = ONE;
            let col = self.apply(&e);
            e[c] = ZERO;
            for r in 0..dim {
                m[r * dim + c] = col[r];
            }
        }
        Ok(m)
    }
}

/// Explicit term list of a model Hamiltonian.
pub fn model_hamiltonian(spec: &ModelSpec) -> Result<SpinHamiltonian> {
    spec.validate()?;
    let n = spec.len;
    let (x, z) = (local_pauli(2, 1), local_pauli(2, 3));
    let mut h = SpinHamiltonian::new(spec.local_dim(), n);
    let zz = |i: usize| vec![(i, z.clone()), (i + 1, z.clone())];
    let zxz = |i: usize| vec![(i, z.clone()), (i + 1, x.clone()), (i + 2, z.clone())];
    match spec.kind {
        ModelKind::Tfim => {
            (0..n - 1).for_each(|i| h.push(-spec.j, zz(i)));
            (0..n).for_each(|i| h.push(-spec.h, vec![(i, x.clone())]));
        }
        ModelKind::ClusterIsing | ModelKind::ClusterIsingDisordered => {
            (0..n - 2).for_each(|i| h.push(spec.j, zxz(i)));
            (0..n).for_each(|i| h.push(spec.h, vec![(i, x.clone())]));
            if spec.kind == ModelKind::ClusterIsingDisordered {
                (0..n - 1).for_each(|i| h.push(spec.couplings[i], zz(i)));
            }
        }
        ModelKind::TriCriticalIsing => {
            let g = spec.g;
            (0..n - 1).for_each(|i| h.push(2.0 * (g * g - 1.0), zz(i)));
            (0..n).for_each(|i| h.push(-(g + 1.0) * (g + 1.0), vec![(i, x.clone())]));
            (0..n - 2).for_each(|i| h.push((g - 1.0) * (g - 1.0), zxz(i)));
        }
        ModelKind::AkltInterp => {
            // (S.S)^2 = sum_ab (S^a S^b) (x) (S^a S^b)
            let s = spin_one();
            let prod = |a: &[C64], b: &[C64]| -> Vec<C64> {
                (0..9).map(|ij| (0..3).map(|k| a[(ij / 3) * 3 + k] * b[k * 3 + ij % 3]).sum()).collect()
            };
            let w = 1.0 - spec.delta;
            for i in 0..n - 1 {
                for a in &s {
                    h.push(w, vec![(i, a.clone()), (i + 1, a.clone())]);
                }
                for a in &s {
                    for b in &s {
                        let ab = prod(a, b);
                        h.push(w / 3.0, vec![(i, ab.clone()), (i + 1, ab)]);
                    }
                }
            }
            let sz2 = prod(&s[2], &s[2]);
            (0..n).for_each(|i| h.push(spec.delta, vec![(i, sz2.clone())]));
        }
    }
    Ok(h)
}

#[derive(Clone, Debug)]
pub struct ExactGroundState {
    pub vector: Vec<C64>,
    pub energy: f64,
    /// Dimension of the lowest eigenspace (within 1e-8), when a full spectrum was computed.
    pub degeneracy: Option<usize>,
}

/// Lowest eigenpair of a dense Hermitian matrix (row-major).
pub fn exact_ground_state(h: &[C64]) -> Result<ExactGroundState> {
    let dim = (h.len() as f64).sqrt().round() as usize;
    if dim * dim != h.len() {
        return Err(Error::Dimension(format!("matrix with {} entries is not square", h.len())));
    }
    let (vals, vecs) = eigh(MatRef::from_row_major_slice(h, dim, dim))?;
    let e0 = vals[0];
    let degeneracy = vals.iter().take_while(|&&v| v - e0 < 1e-8 * e0.abs().max(1.0)).count();
    let vector = (0..dim).map(|i| vecs[(i, 0)]).collect();
    Ok(ExactGroundState { vector, energy: e0, degeneracy: Some(degeneracy) })
}

/// Ground state of a model: dense diagonalisation up to [`DENSE_EIGEN_LIMIT`],
/// Lanczos with full reorthogonalisation above it.
pub fn exact_model_ground_state(h: &SpinHamiltonian) -> Result<ExactGroundState> {
    if h.dim() <= DENSE_EIGEN_LIMIT {
        return exact_ground_state(&h.to_dense()?);
    }
    let (energy, vector) = crate::lanczos::lowest_eigenpair(h.dim(), |v| h.apply(v), None, 300, 1e-13)?;
    Ok(ExactGroundState { vector, energy, degeneracy: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{ghz_state, product_plus_state};

    #[test]
    fn basis_and_ghz_vectors() {
        let v = statevector(&MatrixProductState::basis_state(2, &[0, 0, 0]).unwrap()).unwrap();
        assert!((v[0] - ONE).norm() < 1e-15 && v[1..].iter().all(|z| z.norm() < 1e-15));
        let g = statevector(&ghz_state(3).unwrap()).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((g[0].re - r).abs() < 1e-14 && (g[7].re - r).abs() < 1e-14);
    }

    #[test]
    fn stabilizer_states_have_zero_sre() {
        for psi in [ghz_state(5).unwrap(), product_plus_state(4).unwrap()] {
            let v = statevector(&psi).unwrap();
            assert!(exact_sre(&v, 2, 2, None).unwrap().abs() < 1e-12);
            assert!(exact_sre(&v, 2, 3, Some(&[1..3])).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn single_t_gate() {
        let psi = product_plus_state(2).unwrap().dope_with_t_gates(&[0]).unwrap();
        let v = statevector(&psi).unwrap();
        let m = exact_sre(&v, 2, 2, None).unwrap();
        assert!((m - (4.0f64 / 3.0).log2()).abs() < 1e-12);
    }

    #[test]
    fn full_chain_region_matches_pure_formula() {
        let psi = ghz_state(5).unwrap().dope_with_t_gates(&[0, 2]).unwrap();
        let v = statevector(&psi).unwrap();
        let a = exact_sre(&v, 2, 2, None).unwrap();
        let b = exact_sre(&v, 2, 2, Some(&[0..5])).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn tfim_two_sites_degenerate() {
        let h = model_hamiltonian(&ModelSpec { len: 4, ..ModelSpec::tfim(4, 1.0, 0.0) }).unwrap();
        let gs = exact_model_ground_state(&h).unwrap();
        assert!((gs.energy + 3.0).abs() < 1e-12);
        assert_eq!(gs.degeneracy, Some(2));
    }

    #[test]
    fn capacity_limits() {
        let v = vec![ONE; 1 << 11];
        assert!(matches!(exact_sre(&v, 2, 2, None), Err(Error::Capacity { .. })));
    }
}
