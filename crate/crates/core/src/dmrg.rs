//! Two-site DMRG for MPO Hamiltonians.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hamiltonians::{build_mpo, symmetry_operators, tilted_mpo, ModelSpec};
use crate::lanczos::lowest_eigenpair;
use crate::mpo::MatrixProductOperator;
use crate::mps::MatrixProductState;
use crate::tensor::{contract, svd_truncate, DenseTensor, TruncationPolicy, C64, ONE};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_bond: usize,
    pub cutoff: f64,
    pub max_sweeps: usize,
    /// Relative energy change between sweeps below which the run counts as converged.
    pub tol: f64,
    pub krylov_iters: usize,
    /// Strength of the symmetry-tilt field (0 disables it).
    pub tilt: f64,
    pub seed: u64,
}

impl SolverConfig {
    pub fn for_local_dim(d: usize) -> Self {
        Self {
            max_bond: if d <= 2 { 64 } else { 55 },
            cutoff: 1e-14,
            max_sweeps: 40,
            tol: 1e-10,
            krylov_iters: 40,
            tilt: 0.0,
            seed: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_bond < 2 {
            return Err(Error::Parameter(format!("max_bond {} < 2", self.max_bond)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Parameter(format!("tolerance {} must be positive", self.tol)));
        }
        if self.max_sweeps == 0 || self.krylov_iters == 0 {
            return Err(Error::Parameter("sweep and Krylov limits must be positive".into()));
        }
        if !(self.cutoff >= 0.0) || !self.tilt.is_finite() {
            return Err(Error::Parameter("cutoff and tilt must be finite and non-negative cutoff".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    /// Normalized, right-canonical at site 0.
    pub state: MatrixProductState,
    /// `<H>` of the returned state for the Hamiltonian that was optimized.
    pub energy: f64,
    pub converged: bool,
    pub variance: f64,
    /// Energy at the end of each full sweep.
    pub sweep_energies: Vec<f64>,
    pub max_discarded: f64,
}

fn boundary() -> DenseTensor {
    DenseTensor::from_fn(&[1, 1, 1], |_| ONE)
}

/// Right environment step: `E'[a', w, a] = sum conj(B[a', s, b']) W[w, s, s', v] B[a, s', b] E[b', v, b]`.
fn right_step(env: &DenseTensor, b: &DenseTensor, w: &DenseTensor) -> Result<DenseTensor> {
    let x = contract(b, &[2], env, &[2])?; // (a, s', b', v)
    let y = contract(&x, &[1, 3], w, &[2, 3])?; // (a, b', w, s)
    let z = contract(&b.conj(), &[1, 2], &y, &[3, 1])?; // (a', a, w)
    z.permute(&[0, 2, 1])
}

fn left_step(env: &DenseTensor, a: &DenseTensor, w: &DenseTensor) -> Result<DenseTensor> {
    MatrixProductOperator::env_step(env, a, w)
}

/// `H_eff x` for the two-site block `x[a, s1, s2, c]`.
fn apply_two_site(
    left: &DenseTensor,
    w1: &DenseTensor,
    w2: &DenseTensor,
    right: &DenseTensor,
    x: &DenseTensor,
) -> Result<DenseTensor> {
    let t = contract(left, &[2], x, &[0])?; // (a', w0, s1, s2, c)
    let t = contract(&t, &[1, 2], w1, &[0, 2])?; // (a', s2, c, s1', w1)
    let t = contract(&t, &[1, 4], w2, &[2, 0])?; // (a', c, s1', s2', w2)
    let t = contract(&t, &[1, 4], right, &[2, 1])?; // (a', s1', s2', c')
    Ok(t)
}

/// Two-site DMRG ground state of `h`. Starts from `initial` when given, else from a
/// seeded random state.
pub fn find_ground_state(
    h: &MatrixProductOperator,
    cfg: &SolverConfig,
    initial: Option<&MatrixProductState>,
) -> Result<GroundState> {
    cfg.validate()?;
    let len = h.len();
    let d = h.d();
    if len < 2 {
        return Err(Error::ChainLength { len, reason: "DMRG needs at least two sites".into() });
    }
    let mut psi = match initial {
        Some(p) => {
            if p.len() != len || p.d() != d {
                return Err(Error::ChainLength { len: p.len(), reason: format!("Hamiltonian has L={len}, d={d}") });
            }
            p.normalize()?
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            MatrixProductState::random(len, d, cfg.max_bond.min(8), &mut rng)?.normalize()?
        }
    };
    psi.canonicalize(0)?;
    let mut tensors: Vec<DenseTensor> = psi.tensors().to_vec();
    let ws = h.tensors();
    let policy = TruncationPolicy::new(cfg.max_bond, cfg.cutoff);

    let mut lenv: Vec<DenseTensor> = vec![boundary(); len + 1];
    let mut renv: Vec<DenseTensor> = vec![boundary(); len + 1];
    for i in (1..len).rev() {
        renv[i] = right_step(&renv[i + 1], &tensors[i], &ws[i])?;
    }

    let mut sweep_energies = Vec::new();
    let mut energy = f64::INFINITY;
    let mut converged = false;
    let mut max_discarded: f64 = 0.0;

    let optimize = |i: usize, lenv: &[DenseTensor], renv: &[DenseTensor], tensors: &[DenseTensor]| -> Result<(f64, DenseTensor)> {
        let theta = contract(&tensors[i], &[2], &tensors[i + 1], &[0])?;
        let shape = theta.shape().to_vec();
        let apply = |v: &[crate::C64]| {
            let x = DenseTensor::new(shape.clone(), v.to_vec()).expect("block shape");
            apply_two_site(&lenv[i], &ws[i], &ws[i + 1], &renv[i + 2], &x).expect("block contraction").into_data()
        };
        let (e, v) = lowest_eigenpair(theta.len(), apply, Some(theta.data()), cfg.krylov_iters, 1e-12)?;
        Ok((e, DenseTensor::new(shape, v)?))
    };

    for _sweep in 0..cfg.max_sweeps {
        let mut last = 0.0;
        for i in 0..len - 1 {
            let (e, theta) = optimize(i, &lenv, &renv, &tensors)?;
            last = e;
            let svd = svd_truncate(&theta, &[0, 1], &policy)?;
            max_discarded = max_discarded.max(svd.discarded_weight);
            let k = svd.s.len();
            tensors[i] = svd.u;
            let sv = DenseTensor::from_fn(svd.v.shape(), |ix| svd.v.get(ix) * svd.s[ix[0]]);
            tensors[i + 1] = sv;
            debug_assert_eq!(tensors[i].shape()[2], k);
            lenv[i + 1] = left_step(&lenv[i], &tensors[i], &ws[i])?;
        }
        for i in (0..len - 1).rev() {
            let (e, theta) = optimize(i, &lenv, &renv, &tensors)?;
            last = e;
            let svd = svd_truncate(&theta, &[0, 1], &policy)?;
            max_discarded = max_discarded.max(svd.discarded_weight);
            let us = DenseTensor::from_fn(svd.u.shape(), |ix| svd.u.get(ix) * svd.s[ix[2]]);
            tensors[i] = us;
            tensors[i + 1] = svd.v;
            renv[i + 1] = right_step(&renv[i + 2], &tensors[i + 1], &ws[i + 1])?;
        }
        let prev = energy;
        energy = last;
        sweep_energies.push(energy);
        log::debug!("sweep {} energy {energy:.14}", sweep_energies.len());
        if sweep_energies.len() >= 2 && (prev - energy).abs() <= cfg.tol * energy.abs().max(1.0) {
            converged = true;
            break;
        }
    }

    let state = MatrixProductState::from_tensors(d, tensors)?.normalize()?;
    let energy = h.expectation(&state)?.re;
    let variance = h.variance(&state)?;
    if !converged {
        log::warn!("DMRG not converged after {} sweeps (E = {energy})", cfg.max_sweeps);
    }
    Ok(GroundState { state, energy, converged, variance, sweep_energies, max_discarded })
}

/// Smallest squared norm of a symmetry projection that is still refined.
const SECTOR_WEIGHT: f64 = 1e-8;

/// Projections of `psi` onto the joint eigenspaces of commuting generators that
/// square to one, with their squared norms.
fn sector_projections(
    psi: &MatrixProductState,
    generators: &[Vec<Option<Vec<C64>>>],
    policy: &TruncationPolicy,
) -> Result<Vec<(f64, MatrixProductState)>> {
    let mut parts = vec![psi.clone()];
    for g in generators {
        let mut next = Vec::with_capacity(2 * parts.len());
        for p in parts {
            let mut gp = p.clone();
            for (site, op) in g.iter().enumerate() {
                if let Some(op) = op {
                    gp.apply_single_site(site, op, true)?;
                }
            }
            let plus = p.add(&gp)?;
            gp.scale_by(-1.0);
            next.push(plus);
            next.push(p.add(&gp)?);
        }
        parts = next;
    }
    let mut out = Vec::new();
    for mut p in parts {
        p.compress(policy)?;
        // (1 + g)/2 per generator
        let w = (p.norm() / (1u64 << generators.len()) as f64).powi(2);
        if w > SECTOR_WEIGHT {
            out.push((w, p.normalize()?));
        }
    }
    Ok(out)
}

/// Ground state of a model. A nonzero `cfg.tilt` optimizes the tilted Hamiltonian;
/// the reported energy and variance are always those of the untilted model.
/// Without a tilt, a state that mixes symmetry sectors is projected onto each
/// sector and the lowest one is refined.
pub fn solve_model(spec: &ModelSpec, cfg: &SolverConfig, initial: Option<&MatrixProductState>) -> Result<GroundState> {
    let h = build_mpo(spec)?;
    if cfg.tilt != 0.0 {
        let mut gs = find_ground_state(&tilted_mpo(spec, cfg.tilt)?, cfg, initial)?;
        gs.energy = h.expectation(&gs.state)?.re;
        gs.variance = h.variance(&gs.state)?;
        return Ok(gs);
    }
    let gs = find_ground_state(&h, cfg, initial)?;
    let policy = TruncationPolicy::new(cfg.max_bond, cfg.cutoff);
    let sectors = sector_projections(&gs.state, &symmetry_operators(spec), &policy)?;
    if sectors.len() < 2 {
        return Ok(gs);
    }
    let mut lowest: Option<(f64, MatrixProductState)> = None;
    for (_, p) in sectors {
        let e = h.expectation(&p)?.re;
        if lowest.as_ref().is_none_or(|(best, _)| e < *best) {
            lowest = Some((e, p));
        }
    }
    let (_, start) = lowest.expect("at least two sectors");
    let refined = find_ground_state(&h, cfg, Some(&start))?;
    Ok(if refined.energy < gs.energy { refined } else { gs })
}
