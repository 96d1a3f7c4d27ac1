//! Run configuration, read from TOML.

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use tsre::analytic::default_edge_string;
use tsre::dmrg::SolverConfig;
use tsre::hamiltonians::{ModelKind, ModelSpec};
use tsre::partition::{Geometry, PartitionSpec};
use tsre::pauli::PauliString;
use tsre::pauli_mps::SreSettings;
use tsre::TruncationPolicy;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub doping: DopingSection,
    #[serde(default)]
    pub sre: SreSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disorder: Option<DisorderSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: String,
    pub len: usize,
    #[serde(default = "one")]
    pub j: f64,
    #[serde(default)]
    pub h: f64,
    #[serde(default)]
    pub g: f64,
    #[serde(default)]
    pub delta: f64,
    /// Disorder strength for a single-point run of the disordered model.
    #[serde(default)]
    pub disorder: f64,
    #[serde(default)]
    pub disorder_seed: u64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    /// Defaults to 64 for qubits and 55 for spin 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_bond: Option<usize>,
    pub cutoff: f64,
    pub max_sweeps: usize,
    pub tol: f64,
    pub krylov_iters: usize,
    pub tilt: f64,
    pub seed: u64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let c = SolverConfig::for_local_dim(2);
        Self {
            max_bond: None,
            cutoff: c.cutoff,
            max_sweeps: c.max_sweeps,
            tol: c.tol,
            krylov_iters: c.krylov_iters,
            tilt: 1e-3,
            seed: c.seed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DopingPattern {
    None,
    All,
    FirstK,
    Sites,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DopingSection {
    pub pattern: DopingPattern,
    /// Number of T gates for `first-k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// 1-based sites for `sites`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sites: Vec<usize>,
}

impl Default for DopingSection {
    fn default() -> Self {
        Self { pattern: DopingPattern::All, count: None, sites: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SreSection {
    pub geometry: String,
    /// Explicit window lengths (A, B, D, C for quad; A, B, C for tri).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub windows: Option<Vec<usize>>,
    pub n: usize,
    /// Defaults to 64 for qubits and 55 for spin 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_bond: Option<usize>,
    pub cutoff: f64,
    /// Also report the topological entanglement entropy.
    pub entanglement: bool,
    /// 1-based Pauli string for the edge correlator, e.g. "Z1 Y2 X3 Y4 Z5".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_string: Option<String>,
}

impl Default for SreSection {
    fn default() -> Self {
        Self { geometry: "quad".into(), windows: None, n: 2, max_bond: None, cutoff: 1e-12, entanglement: true, edge_string: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub param: String,
    pub grid: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSection {
    pub strengths: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub base_seed: u64,
}

fn default_samples() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub csv: String,
    /// Store each ground state and reuse it as the starting point of later runs.
    pub checkpoints: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { csv: "results.csv".into(), checkpoints: false }
    }
}

/// Realization seed of sample `r`; shared across disorder strengths.
pub fn realization_seed(base: u64, r: usize) -> u64 {
    base.wrapping_add(r as u64)
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).context("config does not parse")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn override_seed(&mut self, seed: u64) {
        self.solver.seed = seed;
        self.model.disorder_seed = seed;
        if let Some(d) = &mut self.disorder {
            d.base_seed = seed;
        }
    }

    pub fn kind(&self) -> Result<ModelKind> {
        self.model.kind.parse().with_context(|| format!("model.kind: {:?}", self.model.kind))
    }

    /// Model at the base parameters of the config.
    pub fn base_model(&self) -> Result<ModelSpec> {
        let m = &self.model;
        let len = m.len;
        let mut spec = match self.kind()? {
            ModelKind::Tfim => ModelSpec::tfim(len, m.j, m.h),
            ModelKind::ClusterIsing => ModelSpec::cluster_ising(len, m.j, m.h),
            ModelKind::ClusterIsingDisordered => {
                ModelSpec::cluster_ising_disordered(len, m.j, m.h, m.disorder, m.disorder_seed)
            }
            ModelKind::TriCriticalIsing => ModelSpec::tci(len, m.g),
            ModelKind::AkltInterp => ModelSpec::aklt(len, m.delta),
        };
        spec.j = m.j;
        spec.h = m.h;
        spec.g = m.g;
        spec.delta = m.delta;
        Ok(spec)
    }

    pub fn solver(&self, d: usize) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            max_bond: s.max_bond.unwrap_or(SolverConfig::for_local_dim(d).max_bond),
            cutoff: s.cutoff,
            max_sweeps: s.max_sweeps,
            tol: s.tol,
            krylov_iters: s.krylov_iters,
            tilt: s.tilt,
            seed: s.seed,
        }
    }

    pub fn sre_settings(&self, d: usize) -> SreSettings {
        let chi = self.sre.max_bond.unwrap_or(SreSettings::for_local_dim(d).policy.max_bond);
        SreSettings::new(self.sre.n, TruncationPolicy::new(chi, self.sre.cutoff))
    }

    pub fn partition(&self) -> Result<PartitionSpec> {
        let geometry: Geometry = self.sre.geometry.parse().with_context(|| format!("sre.geometry: {:?}", self.sre.geometry))?;
        let len = self.model.len;
        let part = match (&self.sre.windows, geometry) {
            (None, _) => PartitionSpec::new(geometry, len).context("sre.geometry")?,
            (Some(w), Geometry::Quad) if w.len() == 4 => PartitionSpec::quad_windows(w[0], w[1], w[2], w[3]).context("sre.windows")?,
            (Some(w), Geometry::Tri) if w.len() == 3 => PartitionSpec::tri_windows(w[0], w[1], w[2]).context("sre.windows")?,
            (Some(w), g) => bail!("sre.windows: {} lengths given for geometry {g}", w.len()),
        };
        ensure!(part.len == len, "sre.windows: lengths sum to {} but model.len = {len}", part.len);
        Ok(part)
    }

    /// 0-based doped sites.
    pub fn doped_sites(&self) -> Result<Vec<usize>> {
        let len = self.model.len;
        let d = &self.doping;
        Ok(match d.pattern {
            DopingPattern::None => Vec::new(),
            DopingPattern::All => (0..len).collect(),
            DopingPattern::FirstK => {
                let k = d.count.context("doping.count is required for pattern first-k")?;
                ensure!(k <= len, "doping.count: N_T = {k} exceeds L = {len}");
                (0..k).collect()
            }
            DopingPattern::Sites => {
                let mut seen = vec![false; len];
                let mut out = Vec::with_capacity(d.sites.len());
                for &s in &d.sites {
                    ensure!((1..=len).contains(&s), "doping.sites: site {s} outside 1..={len}");
                    ensure!(!std::mem::replace(&mut seen[s - 1], true), "doping.sites: site {s} repeated");
                    out.push(s - 1);
                }
                out
            }
        })
    }

    pub fn edge_string(&self) -> Result<Option<PauliString>> {
        if self.kind()?.local_dim() != 2 {
            return Ok(None);
        }
        Ok(Some(match &self.sre.edge_string {
            Some(s) => {
                let p: PauliString = s.parse().with_context(|| format!("sre.edge_string: {s:?}"))?;
                p.labels(self.model.len).context("sre.edge_string")?;
                p
            }
            None => default_edge_string(self.model.len).context("sre.edge_string")?,
        }))
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.kind()?;
        let base = self.base_model()?;
        base.validate().context("model")?;
        self.solver(kind.local_dim()).validate().context("solver")?;
        let sites = self.doped_sites()?;
        ensure!(sites.is_empty() || kind.local_dim() == 2, "doping.pattern: T gates need a qubit model, use `none` for {kind}");
        ensure!(self.sre.n >= 2, "sre.n: replica order {} < 2", self.sre.n);
        ensure!(self.sre.cutoff >= 0.0 && self.sre.cutoff.is_finite(), "sre.cutoff: must be finite and non-negative");
        ensure!(self.sre.max_bond.is_none_or(|c| c >= 1), "sre.max_bond: must be positive");
        self.partition()?;
        self.edge_string()?;
        ensure!(!self.output.csv.trim().is_empty(), "output.csv: empty file name");
        if let Some(scan) = &self.scan {
            ensure!(!scan.grid.is_empty(), "scan.grid: empty");
            ensure!(scan.grid.iter().all(|x| x.is_finite()), "scan.grid: non-finite value");
            ensure!(scan.grid.windows(2).all(|w| w[0] < w[1]), "scan.grid: must be strictly increasing");
            ensure!(scan.param != "disorder", "scan.param: use a [disorder] section for disorder campaigns");
            let mut probe = base.clone();
            probe.set_param(&scan.param, scan.grid[0]).with_context(|| format!("scan.param: {:?}", scan.param))?;
        }
        if let Some(dis) = &self.disorder {
            ensure!(self.scan.is_none(), "disorder: cannot be combined with a [scan] section");
            ensure!(kind == ModelKind::ClusterIsingDisordered, "disorder: campaigns need model.kind = \"cluster-disordered\"");
            ensure!(!dis.strengths.is_empty(), "disorder.strengths: empty");
            ensure!(dis.strengths.iter().all(|x| x.is_finite() && *x >= 0.0), "disorder.strengths: values must be finite and >= 0");
            ensure!(dis.strengths.windows(2).all(|w| w[0] < w[1]), "disorder.strengths: must be strictly increasing");
            ensure!(dis.samples >= 1, "disorder.samples: must be at least 1");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[model]
kind = "cluster"
len = 8
h = 0.2
"#;

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::from_toml(BASE).unwrap();
        assert_eq!(c.doped_sites().unwrap(), (0..8).collect::<Vec<_>>());
        assert_eq!(c.solver(2).max_bond, 64);
        assert_eq!(c.sre_settings(2).policy.max_bond, 64);
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn errors_name_the_key() {
        let cases = [
            ("[doping]\npattern = \"first-k\"\ncount = 9\n", "doping.count"),
            ("[doping]\npattern = \"sites\"\nsites = [1, 1]\n", "doping.sites"),
            ("[scan]\nparam = \"h\"\ngrid = [0.3, 0.1]\n", "scan.grid"),
            ("[scan]\nparam = \"h\"\ngrid = []\n", "scan.grid"),
            ("[scan]\nparam = \"zeta\"\ngrid = [0.1]\n", "scan.param"),
            ("[sre]\ngeometry = \"tri\"\nn = 2\ncutoff = 1e-12\nentanglement = true\n", "sre.geometry"),
            ("[disorder]\nstrengths = [0.1]\n", "disorder"),
        ];
        for (extra, key) in cases {
            let err = RunConfig::from_toml(&format!("{BASE}{extra}")).unwrap_err();
            assert!(format!("{err:#}").contains(key), "{extra}: {err:#}");
        }
        let err = RunConfig::from_toml(&format!("{BASE}bogus = 1\n")).unwrap_err();
        assert!(format!("{err:#}").contains("bogus"), "{err:#}");
    }
}
