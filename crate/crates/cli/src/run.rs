//! Batch runs: task expansion, ordered CSV output, resume and disorder summaries.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, ensure, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tsre::analytic::edge_correlator;
use tsre::checkpoint::{load_mps, save_mps};
use tsre::dmrg::solve_model;
use tsre::entanglement::topological_ee_with;
use tsre::pauli_mps::topological_sre_with;
use tsre::{EntropyBudget, ModelSpec};

use crate::config::{realization_seed, RunConfig};

pub const CSV_MAGIC: &str = "# tsre-csv v1";
const CONFIG_PREFIX: &str = "# | ";

#[derive(Clone, Debug, PartialEq)]
pub struct Task {
    pub index: usize,
    pub point: usize,
    pub realization: usize,
    pub param: String,
    pub value: f64,
    pub seed: u64,
}

/// One output row. `timestamp` is the only column that differs between identical runs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Row {
    pub point: usize,
    pub realization: usize,
    pub param: String,
    pub value: f64,
    pub seed: u64,
    pub len: usize,
    pub n: usize,
    pub geometry: String,
    pub n_t: usize,
    pub energy: f64,
    pub variance: f64,
    pub converged: bool,
    pub sweeps: usize,
    pub m_ab: f64,
    pub m_bc: f64,
    pub m_b: f64,
    pub m_abc: f64,
    pub m_topo: f64,
    pub s_topo: f64,
    pub edge_corr: f64,
    pub chi_p: usize,
    pub max_discarded: f64,
    pub status: String,
    pub timestamp: u64,
}

pub const COLUMNS: [&str; 24] = [
    "point",
    "realization",
    "param",
    "value",
    "seed",
    "len",
    "n",
    "geometry",
    "n_t",
    "energy",
    "variance",
    "converged",
    "sweeps",
    "m_ab",
    "m_bc",
    "m_b",
    "m_abc",
    "m_topo",
    "s_topo",
    "edge_corr",
    "chi_p",
    "max_discarded",
    "status",
    "timestamp",
];

impl Row {
    fn is_usable(&self) -> bool {
        !self.status.starts_with("error")
    }
}

/// Expands the config into tasks in output order.
pub fn tasks(cfg: &RunConfig) -> Vec<Task> {
    let mut out = Vec::new();
    let mut push = |point, realization, param: &str, value, seed| {
        let index = out.len();
        out.push(Task { index, point, realization, param: param.to_string(), value, seed });
    };
    if let Some(dis) = &cfg.disorder {
        for (p, &v) in dis.strengths.iter().enumerate() {
            for r in 0..dis.samples {
                push(p, r, "disorder", v, realization_seed(dis.base_seed, r));
            }
        }
    } else if let Some(scan) = &cfg.scan {
        for (p, &v) in scan.grid.iter().enumerate() {
            push(p, 0, &scan.param, v, cfg.model.disorder_seed);
        }
    } else {
        push(0, 0, "none", 0.0, cfg.model.disorder_seed);
    }
    out
}

pub fn model_for(base: &ModelSpec, task: &Task) -> Result<ModelSpec> {
    let mut spec = base.clone();
    spec.reseed(task.seed);
    if task.param != "none" {
        spec.set_param(&task.param, task.value)?;
    }
    Ok(spec)
}

struct TaskContext {
    cfg: RunConfig,
    base: ModelSpec,
    checkpoint_dir: Option<PathBuf>,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn blank_row(cfg: &RunConfig, task: &Task, status: String) -> Row {
    let nan = f64::NAN;
    Row {
        point: task.point,
        realization: task.realization,
        param: task.param.clone(),
        value: task.value,
        seed: task.seed,
        len: cfg.model.len,
        n: cfg.sre.n,
        geometry: cfg.sre.geometry.clone(),
        n_t: 0,
        energy: nan,
        variance: nan,
        converged: false,
        sweeps: 0,
        m_ab: nan,
        m_bc: nan,
        m_b: nan,
        m_abc: nan,
        m_topo: nan,
        s_topo: nan,
        edge_corr: nan,
        chi_p: 0,
        max_discarded: nan,
        status,
        timestamp: now(),
    }
}

fn compute(ctx: &TaskContext, task: &Task) -> Row {
    match try_compute(ctx, task) {
        Ok(row) => row,
        Err(e) => {
            log::error!("task {} ({}={}, realization {}): {e:#}", task.index, task.param, task.value, task.realization);
            blank_row(&ctx.cfg, task, format!("error: {e:#}"))
        }
    }
}

fn try_compute(ctx: &TaskContext, task: &Task) -> Result<Row> {
    let cfg = &ctx.cfg;
    let spec = model_for(&ctx.base, task)?;
    let d = spec.local_dim();
    let ckpt = ctx.checkpoint_dir.as_ref().map(|dir| dir.join(format!("p{:04}_r{:04}.mps", task.point, task.realization)));
    let initial = match &ckpt {
        Some(p) if p.exists() => Some(load_mps(p).with_context(|| format!("reading checkpoint {}", p.display()))?),
        _ => None,
    };
    let gs = solve_model(&spec, &cfg.solver(d), initial.as_ref())?;
    if let Some(p) = &ckpt {
        save_mps(&gs.state, p).with_context(|| format!("writing checkpoint {}", p.display()))?;
    }
    let part = cfg.partition()?;
    let edge = match cfg.edge_string()? {
        Some(s) => edge_correlator(&gs.state, Some(&s))?,
        None => f64::NAN,
    };
    let s_topo = if cfg.sre.entanglement {
        topological_ee_with(&gs.state, &part, &EntropyBudget::for_local_dim(d))?.s_topo
    } else {
        f64::NAN
    };
    let sites = cfg.doped_sites()?;
    let doped = gs.state.dope_with_t_gates(&sites)?;
    let rep = topological_sre_with(&doped, &part, &cfg.sre_settings(d))?;
    for w in &rep.warnings {
        log::warn!("task {}: {w}", task.index);
    }
    let status = if !gs.converged {
        "not-converged"
    } else if !rep.warnings.is_empty() {
        "truncation-warning"
    } else {
        "ok"
    };
    Ok(Row {
        n_t: sites.len(),
        energy: gs.energy,
        variance: gs.variance,
        converged: gs.converged,
        sweeps: gs.sweep_energies.len(),
        m_ab: rep.m_ab,
        m_bc: rep.m_bc,
        m_b: rep.m_b,
        m_abc: rep.m_abc,
        m_topo: rep.m_topo,
        s_topo,
        edge_corr: edge,
        chi_p: rep.chi_p,
        max_discarded: rep.max_discarded.max(gs.max_discarded),
        ..blank_row(cfg, task, status.to_string())
    })
}

fn header(cfg: &RunConfig) -> String {
    let mut s = format!("{CSV_MAGIC}\n# config:\n");
    for line in cfg.to_toml().lines() {
        s.push_str(CONFIG_PREFIX);
        s.push_str(line);
        s.push('\n');
    }
    s.push_str(&COLUMNS.join(","));
    s.push('\n');
    s
}

/// Reads rows from a results file written by [`run`].
pub fn read_rows(path: &Path) -> Result<Vec<Row>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut rows = Vec::new();
    for r in rdr.deserialize() {
        rows.push(r.with_context(|| format!("parsing {}", path.display()))?);
    }
    Ok(rows)
}

/// Drops a trailing partial line left by an interrupted run; returns the completed rows.
fn prepare_resume(path: &Path, head: &str, tasks: &[Task]) -> Result<usize> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if !text.starts_with(head) {
        bail!(
            "{} was written by a different configuration; choose another --out-dir or remove the file",
            path.display()
        );
    }
    let keep = text.rfind('\n').map_or(0, |i| i + 1);
    if keep < text.len() {
        log::warn!("dropping incomplete last line of {}", path.display());
        OpenOptions::new().write(true).open(path)?.set_len(keep as u64)?;
    }
    let rows = read_rows(path)?;
    ensure!(rows.len() <= tasks.len(), "{} has more rows than the configuration produces", path.display());
    for (row, task) in rows.iter().zip(tasks) {
        ensure!(
            row.point == task.point && row.realization == task.realization,
            "{}: row order does not match the configuration",
            path.display()
        );
    }
    Ok(rows.len())
}

pub struct RunSummary {
    pub csv: PathBuf,
    pub summary: Option<PathBuf>,
    pub total: usize,
    pub skipped: usize,
    pub failed: usize,
}

pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    cfg.validate()?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let csv_path = out_dir.join(&cfg.output.csv);
    let all = tasks(cfg);
    let head = header(cfg);
    let done = if csv_path.exists() {
        prepare_resume(&csv_path, &head, &all)?
    } else {
        fs::write(&csv_path, &head).with_context(|| format!("writing {}", csv_path.display()))?;
        0
    };
    if done > 0 {
        log::info!("resuming: {done} of {} rows already present", all.len());
    }
    let checkpoint_dir = if cfg.output.checkpoints {
        let dir = out_dir.join("checkpoints");
        fs::create_dir_all(&dir)?;
        Some(dir)
    } else {
        None
    };
    let ctx = TaskContext { cfg: cfg.clone(), base: cfg.base_model()?, checkpoint_dir };
    let todo = &all[done..];

    let file = OpenOptions::new().append(true).open(&csv_path)?;
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    let mut failed = 0;
    let (tx, rx) = mpsc::channel::<(usize, Row)>();
    std::thread::scope(|s| -> Result<()> {
        let ctx = &ctx;
        s.spawn(move || {
            todo.par_iter().for_each_with(tx, |tx, task| {
                let row = compute(ctx, task);
                let _ = tx.send((task.index, row));
            });
        });
        let mut pending = BTreeMap::new();
        let mut next = done;
        for (i, row) in rx {
            pending.insert(i, row);
            while let Some(row) = pending.remove(&next) {
                if !row.is_usable() {
                    failed += 1;
                }
                log::info!(
                    "[{}/{}] {}={} r={} M_topo={:.6} status={}",
                    next + 1,
                    all.len(),
                    row.param,
                    row.value,
                    row.realization,
                    row.m_topo,
                    row.status
                );
                wtr.serialize(&row)?;
                wtr.flush()?;
                next += 1;
            }
        }
        ensure!(next == all.len(), "worker pool stopped after {next} of {} tasks", all.len());
        Ok(())
    })?;
    drop(wtr);

    let summary = if cfg.disorder.is_some() {
        let path = summary_path(&csv_path);
        write_disorder_summary(&read_rows(&csv_path)?, &path)?;
        Some(path)
    } else {
        None
    };
    Ok(RunSummary { csv: csv_path, summary, total: all.len(), skipped: done, failed })
}

pub fn summary_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    csv.with_file_name(format!("{stem}_summary.csv"))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SummaryRow {
    pub disorder: f64,
    pub samples: usize,
    pub m_topo_mean: f64,
    pub m_topo_stderr: f64,
    pub s_topo_mean: f64,
    pub s_topo_stderr: f64,
    pub edge_corr_mean: f64,
    pub edge_corr_stderr: f64,
    pub abs_edge_corr_mean: f64,
    pub abs_edge_corr_stderr: f64,
}

/// Sample mean and standard error of the mean (NaN for fewer than two samples).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Per-strength statistics over the usable rows.
pub fn disorder_summary(rows: &[Row]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<usize, Vec<&Row>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.is_usable()) {
        groups.entry(r.point).or_default().push(r);
    }
    groups
        .values()
        .map(|g| {
            let col = |f: fn(&Row) -> f64| g.iter().map(|r| f(r)).collect::<Vec<_>>();
            let (m_topo_mean, m_topo_stderr) = mean_stderr(&col(|r| r.m_topo));
            let (s_topo_mean, s_topo_stderr) = mean_stderr(&col(|r| r.s_topo));
            let (edge_corr_mean, edge_corr_stderr) = mean_stderr(&col(|r| r.edge_corr));
            let (abs_edge_corr_mean, abs_edge_corr_stderr) = mean_stderr(&col(|r| r.edge_corr.abs()));
            SummaryRow {
                disorder: g[0].value,
                samples: g.len(),
                m_topo_mean,
                m_topo_stderr,
                s_topo_mean,
                s_topo_stderr,
                edge_corr_mean,
                edge_corr_stderr,
                abs_edge_corr_mean,
                abs_edge_corr_stderr,
            }
        })
        .collect()
}

pub fn write_disorder_summary(rows: &[Row], path: &Path) -> Result<()> {
    let mut f = File::create(path).with_context(|| format!("writing {}", path.display()))?;
    writeln!(f, "{CSV_MAGIC}")?;
    let mut wtr = csv::Writer::from_writer(f);
    for s in disorder_summary(rows) {
        wtr.serialize(s)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats() {
        let (m, e) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((e - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(mean_stderr(&[1.0]).1.is_nan());
    }

    #[test]
    fn disorder_tasks_share_seeds_across_strengths() {
        let cfg = RunConfig::from_toml(
            "[model]\nkind = \"cluster-disordered\"\nlen = 8\nh = 0.24\n[disorder]\nstrengths = [0.5, 1.0]\nsamples = 3\nbase_seed = 10\n",
        )
        .unwrap();
        let t = tasks(&cfg);
        assert_eq!(t.len(), 6);
        assert_eq!(t[1].seed, t[4].seed);
        assert_eq!(t[5].point, 1);
        assert_eq!(t[5].realization, 2);
    }
}
