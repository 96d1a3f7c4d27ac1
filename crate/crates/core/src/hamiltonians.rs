//! Model Hamiltonians as MPOs and exact MPS constructors for fixed-point states.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mpo::{MatrixProductOperator, OperatorSum};
use crate::mps::MatrixProductState;
use crate::pauli::local_pauli;
use crate::tensor::{DenseTensor, TruncationPolicy, C64, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Tfim,
    ClusterIsing,
    ClusterIsingDisordered,
    TriCriticalIsing,
    AkltInterp,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Tfim => "tfim",
            ModelKind::ClusterIsing => "cluster",
            ModelKind::ClusterIsingDisordered => "cluster-disordered",
            ModelKind::TriCriticalIsing => "tci",
            ModelKind::AkltInterp => "aklt",
        }
    }

    pub fn local_dim(self) -> usize {
        match self {
            ModelKind::AkltInterp => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "tfim" | "ising" => Ok(ModelKind::Tfim),
            "cluster" | "cluster-ising" => Ok(ModelKind::ClusterIsing),
            "cluster-disordered" | "cluster-ising-disordered" => Ok(ModelKind::ClusterIsingDisordered),
            "tci" | "tricritical-ising" => Ok(ModelKind::TriCriticalIsing),
            "aklt" | "aklt-interp" => Ok(ModelKind::AkltInterp),
            _ => Err(Error::Parse(format!("unknown model kind {s:?}"))),
        }
    }
}

/// Model kind, chain length and parameters. Unused parameters are ignored by the kind.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub len: usize,
    pub j: f64,
    pub h: f64,
    /// Disorder strength: couplings are drawn from `[-disorder, disorder]`.
    pub disorder: f64,
    pub disorder_seed: u64,
    /// Realized nearest-neighbour couplings, `len - 1` values.
    pub couplings: Vec<f64>,
    pub g: f64,
    pub delta: f64,
}

impl ModelSpec {
    fn base(kind: ModelKind, len: usize) -> Self {
        Self { kind, len, j: 1.0, h: 0.0, disorder: 0.0, disorder_seed: 0, couplings: Vec::new(), g: 0.0, delta: 0.0 }
    }

    pub fn tfim(len: usize, j: f64, h: f64) -> Self {
        Self { j, h, ..Self::base(ModelKind::Tfim, len) }
    }

    pub fn cluster_ising(len: usize, j: f64, h: f64) -> Self {
        Self { j, h, ..Self::base(ModelKind::ClusterIsing, len) }
    }

    pub fn cluster_ising_disordered(len: usize, j: f64, h: f64, disorder: f64, seed: u64) -> Self {
        let couplings = sample_disorder(disorder, len, seed);
        Self { j, h, disorder, disorder_seed: seed, couplings, ..Self::base(ModelKind::ClusterIsingDisordered, len) }
    }

    pub fn tci(len: usize, g: f64) -> Self {
        Self { g, ..Self::base(ModelKind::TriCriticalIsing, len) }
    }

    pub fn aklt(len: usize, delta: f64) -> Self {
        Self { delta, ..Self::base(ModelKind::AkltInterp, len) }
    }

    pub fn local_dim(&self) -> usize {
        self.kind.local_dim()
    }

    pub fn validate(&self) -> Result<()> {
        if self.len < 4 {
            return Err(Error::ChainLength { len: self.len, reason: "models need L >= 4".into() });
        }
        let finite = [self.j, self.h, self.disorder, self.g, self.delta].iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::Parameter("non-finite model parameter".into()));
        }
        if self.kind == ModelKind::ClusterIsingDisordered {
            if self.disorder < 0.0 {
                return Err(Error::Parameter(format!("disorder strength {} < 0", self.disorder)));
            }
            if self.couplings.len() != self.len - 1 {
                return Err(Error::Parameter(format!(
                    "{} disorder couplings for {} bonds",
                    self.couplings.len(),
                    self.len - 1
                )));
            }
            if let Some(c) = self.couplings.iter().find(|c| c.abs() > self.disorder) {
                return Err(Error::Parameter(format!("coupling {c} exceeds disorder strength {}", self.disorder)));
            }
        }
        Ok(())
    }

    /// Sets a scan parameter by name (`j`, `h`, `g`, `delta`, `disorder`).
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "j" | "J" => self.j = value,
            "h" => self.h = value,
            "g" => self.g = value,
            "delta" => self.delta = value,
            "disorder" | "Delta" => {
                self.disorder = value;
                self.couplings = sample_disorder(value, self.len, self.disorder_seed);
            }
            _ => return Err(Error::Parameter(format!("unknown model parameter {name:?}"))),
        }
        Ok(())
    }

    /// Resamples the disorder couplings with a new seed.
    pub fn reseed(&mut self, seed: u64) {
        self.disorder_seed = seed;
        self.couplings = sample_disorder(self.disorder, self.len, seed);
    }
}

/// `len - 1` couplings uniform in `[-disorder, disorder]`, reproducible from `seed`.
pub fn sample_disorder(disorder: f64, len: usize, seed: u64) -> Vec<f64> {
    let n = len.saturating_sub(1);
    if disorder == 0.0 {
        return vec![0.0; n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-disorder..=disorder)).collect()
}

/// Spin-1 operators in the basis `|+1>, |0>, |-1>`: `(Sx, Sy, Sz)`.
pub fn spin_one() -> [Vec<C64>; 3] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let i = C64::new(0.0, 1.0);
    let sx = vec![ZERO, r.into(), ZERO, r.into(), ZERO, r.into(), ZERO, r.into(), ZERO];
    let sy = vec![ZERO, -i * r, ZERO, i * r, ZERO, -i * r, ZERO, i * r, ZERO];
    let sz = vec![ONE, ZERO, ZERO, ZERO, ZERO, ZERO, ZERO, ZERO, -ONE];
    [sx, sy, sz]
}

fn matmul(d: usize, a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut c = vec![ZERO; d * d];
    for i in 0..d {
        for k in 0..d {
            for j in 0..d {
                c[i * d + j] += a[i * d + k] * b[k * d + j];
            }
        }
    }
    c
}

/// MPO of the model Hamiltonian.
pub fn build_mpo(spec: &ModelSpec) -> Result<MatrixProductOperator> {
    spec.validate()?;
    let n = spec.len;
    let (x, z) = (local_pauli(2, 1), local_pauli(2, 3));
    let mut sum = OperatorSum::new(spec.local_dim(), n);
    match spec.kind {
        ModelKind::Tfim => {
            sum.add_uniform(vec![z.clone(), z.clone()], -spec.j)?;
            sum.add_uniform(vec![x], -spec.h)?;
        }
        ModelKind::ClusterIsing => {
            sum.add_uniform(vec![z.clone(), x.clone(), z.clone()], spec.j)?;
            sum.add_uniform(vec![x], spec.h)?;
        }
        ModelKind::ClusterIsingDisordered => {
            sum.add_uniform(vec![z.clone(), x.clone(), z.clone()], spec.j)?;
            sum.add_uniform(vec![x], spec.h)?;
            sum.add_pattern(vec![z.clone(), z], spec.couplings.clone())?;
        }
        ModelKind::TriCriticalIsing => {
            let g = spec.g;
            sum.add_uniform(vec![z.clone(), z.clone()], 2.0 * (g * g - 1.0))?;
            sum.add_uniform(vec![x.clone()], -(g + 1.0) * (g + 1.0))?;
            sum.add_uniform(vec![z.clone(), x, z], (g - 1.0) * (g - 1.0))?;
        }
        ModelKind::AkltInterp => {
            let s = spin_one();
            let w = 1.0 - spec.delta;
            for a in &s {
                sum.add_uniform(vec![a.clone(), a.clone()], w)?;
            }
            for a in &s {
                for b in &s {
                    let ab = matmul(3, a, b);
                    sum.add_uniform(vec![ab.clone(), ab], w / 3.0)?;
                }
            }
            sum.add_uniform(vec![matmul(3, &s[2], &s[2])], spec.delta)?;
        }
    }
    sum.build()
}

/// Symmetry operators of the model used to split quasi-degenerate ground
/// spaces; each is a product of single-site operators commuting with H.
pub fn symmetry_operators(spec: &ModelSpec) -> Vec<Vec<Option<Vec<C64>>>> {
    let n = spec.len;
    let x = local_pauli(2, 1);
    let all_x: Vec<Option<Vec<C64>>> = vec![Some(x.clone()); n];
    match spec.kind {
        ModelKind::ClusterIsing => {
            let parity = |p: usize| (0..n).map(|i| (i % 2 == p).then(|| x.clone())).collect();
            vec![parity(0), parity(1)]
        }
        ModelKind::Tfim | ModelKind::TriCriticalIsing | ModelKind::ClusterIsingDisordered => vec![all_x],
        ModelKind::AkltInterp => {
            // exp(i pi S^x) and exp(i pi S^z) on every site
            let m = -ONE;
            let rx = vec![ZERO, ZERO, m, ZERO, m, ZERO, m, ZERO, ZERO];
            let rz = vec![m, ZERO, ZERO, ZERO, ONE, ZERO, ZERO, ZERO, m];
            vec![vec![Some(rx); n], vec![Some(rz); n]]
        }
    }
}

/// `H - eps * sum_k O_k` over the model's symmetry operators.
pub fn tilted_mpo(spec: &ModelSpec, eps: f64) -> Result<MatrixProductOperator> {
    let mut h = build_mpo(spec)?;
    if eps == 0.0 {
        return Ok(h);
    }
    for ops in symmetry_operators(spec) {
        h = h.add(&MatrixProductOperator::product(spec.local_dim(), &ops, -eps)?)?;
    }
    Ok(h)
}

fn plus() -> Vec<C64> {
    let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    vec![r, r]
}

/// `(|0...0> + |1...1>) / sqrt(2)` with bond dimension 2.
pub fn ghz_state(len: usize) -> Result<MatrixProductState> {
    if len < 2 {
        return Err(Error::ChainLength { len, reason: "GHZ needs at least two sites".into() });
    }
    let tensors = (0..len)
        .map(|k| {
            let l = if k == 0 { 1 } else { 2 };
            let r = if k == len - 1 { 1 } else { 2 };
            DenseTensor::from_fn(&[l, 2, r], |i| {
                let branch_l = if k == 0 { i[1] } else { i[0] };
                let branch_r = if k == len - 1 { i[1] } else { i[2] };
                if branch_l == i[1] && branch_r == i[1] {
                    ONE
                } else {
                    ZERO
                }
            })
        })
        .collect();
    let mut psi = MatrixProductState::from_tensors(2, tensors)?;
    psi.normalize_in_place()?;
    Ok(psi)
}

/// `|+>^L`.
pub fn product_plus_state(len: usize) -> Result<MatrixProductState> {
    let mut psi = MatrixProductState::product_state(2, &vec![plus(); len])?;
    psi.normalize_in_place()?;
    Ok(psi)
}

/// Unsymmetrized cluster MPS built from `M^0 = [[0,0],[1,1]]`, `M^1 = [[1,-1],[0,0]]`
/// with boundary vectors `(1,0)` and `(1,-1)^T`.
fn cluster_reference(len: usize) -> Result<MatrixProductState> {
    let m = |s: usize, a: usize, b: usize| -> C64 {
        let v = match (s, a, b) {
            (0, 1, _) => 1.0,
            (1, 0, 0) => 1.0,
            (1, 0, 1) => -1.0,
            _ => 0.0,
        };
        v.into()
    };
    let right = [1.0, -1.0];
    let tensors = (0..len)
        .map(|k| {
            let l = if k == 0 { 1 } else { 2 };
            let r = if k == len - 1 { 1 } else { 2 };
            DenseTensor::from_fn(&[l, 2, r], |i| {
                let a_range: Vec<usize> = if k == 0 { vec![0] } else { vec![i[0]] };
                let mut v = ZERO;
                for a in a_range {
                    if k == len - 1 {
                        for (b, rv) in right.iter().enumerate() {
                            v += m(i[1], a, b) * rv;
                        }
                    } else {
                        v += m(i[1], a, i[2]);
                    }
                }
                v
            })
        })
        .collect();
    MatrixProductState::from_tensors(2, tensors)
}

fn apply_x_on(psi: &MatrixProductState, parity: Option<usize>) -> Result<MatrixProductState> {
    let x = local_pauli(2, 1);
    let mut out = psi.clone();
    for k in 0..psi.len() {
        if parity.is_none_or(|p| k % 2 == p) {
            out.apply_single_site(k, &x, true)?;
        }
    }
    Ok(out)
}

/// Symmetrized cluster state: `(1 + X_e)(1 + X_o) |psi_0>` for even L and
/// `(1 + X_o X_e) |psi_0>` for odd L, normalized.
pub fn cluster_state(len: usize) -> Result<MatrixProductState> {
    if len < 4 {
        return Err(Error::ChainLength { len, reason: "cluster state needs L >= 4".into() });
    }
    let psi0 = cluster_reference(len)?;
    let mut sum = if len % 2 == 0 {
        let e = apply_x_on(&psi0, Some(1))?;
        let o = apply_x_on(&psi0, Some(0))?;
        let eo = apply_x_on(&psi0, None)?;
        psi0.add(&e)?.add(&o)?.add(&eo)?
    } else {
        psi0.add(&apply_x_on(&psi0, None)?)?
    };
    sum.compress(&TruncationPolicy::exact())?;
    sum.normalize_in_place()?;
    Ok(sum)
}

/// AKLT singlet `sum_s tr(A^{s_1} ... A^{s_L}) |s>` with `A^{+1} = sqrt(2/3) s+`,
/// `A^0 = -sqrt(1/3) sz`, `A^{-1} = -sqrt(2/3) s-`, normalized. It is the ground
/// state of the interpolating chain at delta = 0 in the sector where both
/// `prod exp(i pi S^x)` and `prod exp(i pi S^z)` equal +1.
pub fn aklt_state(len: usize) -> Result<MatrixProductState> {
    if len < 2 {
        return Err(Error::ChainLength { len, reason: "the AKLT state needs L >= 2".into() });
    }
    let (p, z) = ((2.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt());
    let a = |s: usize, i: usize, j: usize| -> C64 {
        match (s, i, j) {
            (0, 0, 1) => p.into(),
            (1, 0, 0) => (-z).into(),
            (1, 1, 1) => z.into(),
            (2, 1, 0) => (-p).into(),
            _ => ZERO,
        }
    };
    let branch = |b: usize| -> Result<MatrixProductState> {
        let tensors = (0..len)
            .map(|k| {
                let l = if k == 0 { 1 } else { 2 };
                let r = if k == len - 1 { 1 } else { 2 };
                DenseTensor::from_fn(&[l, 3, r], |i| {
                    let row = if k == 0 { b } else { i[0] };
                    let col = if k == len - 1 { b } else { i[2] };
                    a(i[1], row, col)
                })
            })
            .collect();
        MatrixProductState::from_tensors(3, tensors)
    };
    let mut psi = branch(0)?.add(&branch(1)?)?;
    psi.compress(&TruncationPolicy::exact())?;
    psi.normalize_in_place()?;
    Ok(psi)
}

/// `N_m = ((1+g)^L + (1-g)^L) / 2`.
pub fn tci_norm(len: usize, g: f64) -> f64 {
    ((1.0 + g).powi(len as i32) + (1.0 - g).powi(len as i32)) / 2.0
}

/// Unnormalized trace-closed TCI state `sum_s tr(A^{s_1} ... A^{s_L}) |s>` with
/// `A^0 = [[0,0],[1,1]]`, `A^1 = phase * [[1,g],[0,0]]`.
fn tci_trace_state(len: usize, g: f64, phase: C64) -> Result<MatrixProductState> {
    let a = |s: usize, i: usize, j: usize| -> C64 {
        match (s, i, j) {
            (0, 1, _) => ONE,
            (1, 0, 0) => phase,
            (1, 0, 1) => phase * g,
            _ => ZERO,
        }
    };
    let branch = |b: usize| -> Result<MatrixProductState> {
        let tensors = (0..len)
            .map(|k| {
                let l = if k == 0 { 1 } else { 2 };
                let r = if k == len - 1 { 1 } else { 2 };
                DenseTensor::from_fn(&[l, 2, r], |i| {
                    let row = if k == 0 { b } else { i[0] };
                    let col = if k == len - 1 { b } else { i[2] };
                    a(i[1], row, col)
                })
            })
            .collect();
        MatrixProductState::from_tensors(2, tensors)
    };
    branch(0)?.add(&branch(1)?)
}

/// Exact ground state of the tri-critical Ising chain (even L), optionally with
/// a T gate on every site. At g = 1, 0 and -1 (L divisible by 4) the undoped
/// state is checked against the paramagnet, GHZ and cluster constructions.
pub fn tci_ground_state(len: usize, g: f64, doped: bool) -> Result<MatrixProductState> {
    if len < 4 || len % 2 != 0 {
        return Err(Error::ChainLength { len, reason: "the TCI construction needs even L >= 4".into() });
    }
    if !g.is_finite() {
        return Err(Error::Parameter("non-finite g".into()));
    }
    let phase = if doped { C64::from_polar(1.0, std::f64::consts::FRAC_PI_4) } else { ONE };
    let raw = tci_trace_state(len, g, phase)?;
    let norm_sqr = raw.overlap(&raw)?.re;
    let expected = 2.0 * tci_norm(len, g);
    if (norm_sqr - expected).abs() > 1e-10 * expected.max(1.0) {
        return Err(Error::Construction(format!("TCI norm^2 {norm_sqr} differs from 2 N_m = {expected}")));
    }
    let mut psi = raw;
    psi.compress(&TruncationPolicy::exact())?;
    psi.normalize_in_place()?;
    if !doped {
        let reference = if g == 1.0 {
            Some(product_plus_state(len)?)
        } else if g == 0.0 {
            Some(ghz_state(len)?)
        } else if g == -1.0 && len % 4 == 0 {
            Some(cluster_state(len)?)
        } else {
            None
        };
        if let Some(r) = reference {
            let ov = psi.overlap(&r)?.norm();
            if (ov - 1.0).abs() > 1e-10 {
                return Err(Error::Construction(format!("TCI state at g={g} has overlap {ov} with its fixed point")));
            }
        }
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;

    #[test]
    fn disorder_is_reproducible_and_bounded() {
        assert_eq!(sample_disorder(0.0, 6, 3), vec![0.0; 5]);
        let a = sample_disorder(0.3, 20, 42);
        assert_eq!(a, sample_disorder(0.3, 20, 42));
        assert!(a.iter().all(|x| x.abs() <= 0.3));
        assert_ne!(a, sample_disorder(0.3, 20, 43));
    }

    #[test]
    fn bond_dimensions() {
        assert_eq!(build_mpo(&ModelSpec::tfim(6, 1.0, 0.5)).unwrap().max_bond(), 3);
        assert_eq!(build_mpo(&ModelSpec::cluster_ising(6, 1.0, 0.5)).unwrap().max_bond(), 4);
        assert!(build_mpo(&ModelSpec::cluster_ising_disordered(6, 1.0, 0.5, 0.2, 1)).unwrap().max_bond() <= 7);
        assert!(build_mpo(&ModelSpec::tci(6, 0.3)).unwrap().max_bond() <= 7);
        assert_eq!(build_mpo(&ModelSpec::aklt(6, 0.3)).unwrap().max_bond(), 14);
    }

    #[test]
    fn ghz_generators() {
        let psi = ghz_state(6).unwrap();
        for k in 0..5 {
            let p = PauliString::qubit(&[(k, 'Z'), (5, 'Z')]).unwrap();
            assert!((psi.expect_pauli(&p).unwrap() - ONE).norm() < 1e-12);
        }
        let all_x = PauliString::new(2, (0..6).map(|k| (k, 1))).unwrap();
        assert!((psi.expect_pauli(&all_x).unwrap() - ONE).norm() < 1e-12);
    }

    #[test]
    fn cluster_stabilizers() {
        for len in [6, 7, 8, 9] {
            let psi = cluster_state(len).unwrap();
            assert!(psi.max_bond() <= 4, "L={len} chi={}", psi.max_bond());
            for k in 0..len - 2 {
                let p = PauliString::qubit(&[(k, 'Z'), (k + 1, 'X'), (k + 2, 'Z')]).unwrap();
                let v = psi.expect_pauli(&p).unwrap();
                assert!((v + ONE).norm() < 1e-10, "L={len} k={k} <ZXZ>={v}");
            }
        }
    }

    #[test]
    fn tci_special_points() {
        for g in [1.0, 0.0, -1.0] {
            tci_ground_state(8, g, false).unwrap();
        }
        assert!(tci_ground_state(7, 0.2, false).is_err());
        let psi = tci_ground_state(8, 0.37, true).unwrap();
        assert!(psi.max_bond() <= 4, "chi={}", psi.max_bond());
    }

    #[test]
    fn aklt_singlet() {
        for len in [6, 9] {
            let psi = aklt_state(len).unwrap();
            let spec = ModelSpec::aklt(len, 0.0);
            let e = build_mpo(&spec).unwrap().expectation(&psi).unwrap().re;
            assert!((e + 2.0 / 3.0 * (len - 1) as f64).abs() < 1e-12, "L={len} E={e}");
            for ops in symmetry_operators(&spec) {
                assert!((psi.expect_product(&ops).unwrap() - ONE).norm() < 1e-12);
            }
        }
    }
}
