//! `tsre`: ground-state scans of stabilizer Renyi entropies for doped spin chains.

mod config;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use tsre::acceptance::{self, Golden, Level};
use tsre::analytic::{fixed_point_tables_csv, tci_l8_closed_form};
use tsre::dmrg::solve_model;
use tsre::entanglement::topological_ee_with;
use tsre::hamiltonians::tci_ground_state;
use tsre::oracle::{exact_model_ground_state, exact_sre, exact_sre_limit, model_hamiltonian, rdm_entropy, statevector};
use tsre::pauli_mps::topological_sre_with;
use tsre::{EntropyBudget, Geometry, Region, SreSettings};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "tsre", version, about = "Topological stabilizer Renyi entropy of doped spin chains")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for all output files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides every seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scan or disorder campaign of a configuration; resumes an interrupted run.
    Run,
    /// Run the acceptance criteria.
    Verify {
        #[arg(value_enum, default_value = "quick")]
        level: VerifyLevel,
        /// Reference values (`criterion,key,value`); defaults to the built-in set.
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Run only these criteria (1-9), overriding the level.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=9))]
        criterion: Vec<u8>,
    },
    /// Compare DMRG and the Pauli-MPS engine against exact diagonalization and enumeration.
    Oracle,
    /// Write the fixed-point tables, the L = 8 tri-critical curves and the golden values.
    Tables {
        /// Points on the g grid in [-1, 1].
        #[arg(long, default_value_t = 41)]
        points: usize,
        /// Also evaluate the curves with the Pauli-MPS engine.
        #[arg(long)]
        engine: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyLevel {
    Quick,
    Full,
    All,
}

impl From<VerifyLevel> for Level {
    fn from(v: VerifyLevel) -> Self {
        match v {
            VerifyLevel::Quick => Level::Quick,
            VerifyLevel::Full => Level::Full,
            VerifyLevel::All => Level::All,
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let path = cli.config.as_ref().context("--config is required for this command")?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg = RunConfig::from_toml(&text).with_context(|| format!("invalid config {}", path.display()))?;
    if let Some(seed) = cli.seed {
        cfg.override_seed(seed);
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("--threads")?;
    }
    match &cli.command {
        Command::Run => {
            let cfg = load_config(cli)?;
            let s = run::run(&cfg, &cli.out_dir)?;
            println!("wrote {} ({} rows, {} resumed, {} failed)", s.csv.display(), s.total, s.skipped, s.failed);
            if let Some(p) = s.summary {
                println!("wrote {}", p.display());
            }
            Ok(if s.failed > 0 { ExitCode::FAILURE } else { ExitCode::SUCCESS })
        }
        Command::Verify { level, golden, criterion } => {
            let ids = if criterion.is_empty() {
                Level::from(*level).criteria()
            } else {
                criterion.iter().map(|&c| c as usize).collect()
            };
            verify(&ids, golden.as_deref())
        }
        Command::Oracle => {
            let cfg = load_config(cli)?;
            oracle(&cfg, &cli.out_dir)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Tables { points, engine } => {
            tables(&cli.out_dir, *points, *engine)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn verify(ids: &[usize], golden: Option<&Path>) -> Result<ExitCode> {
    let golden = match golden {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Golden::parse(&text).with_context(|| format!("golden file {}", p.display()))?
        }
        None => Golden::default(),
    };
    let outcomes: Vec<_> = ids
        .iter()
        .map(|&id| {
            let o = acceptance::run_one(id, &golden);
            println!("{o}");
            o
        })
        .collect();
    let failed: Vec<_> = outcomes.iter().filter(|o| !o.passed).collect();
    println!("{} of {} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    if failed.is_empty() {
        return Ok(ExitCode::SUCCESS);
    }
    for o in &failed {
        eprintln!("FAILED: criterion {} ({})", o.id, o.title());
    }
    Ok(ExitCode::FAILURE)
}

#[derive(serde::Serialize)]
struct OracleRow {
    point: usize,
    realization: usize,
    param: String,
    value: f64,
    seed: u64,
    e_dmrg: f64,
    e_exact: f64,
    m_topo_engine: f64,
    m_topo_exact: f64,
    s_topo_engine: f64,
    s_topo_exact: f64,
}

fn oracle(cfg: &RunConfig, out_dir: &Path) -> Result<()> {
    let d = cfg.kind()?.local_dim();
    let part = cfg.partition()?;
    let limit = exact_sre_limit(d);
    if cfg.model.len > limit {
        bail!("model.len: the oracle enumerates at most {limit} sites for d = {d}");
    }
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join("oracle.csv");
    let mut wtr = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
    let base = cfg.base_model()?;
    let sites = cfg.doped_sites()?;
    let settings = cfg.sre_settings(d);
    let mut worst: f64 = 0.0;
    for task in run::tasks(cfg) {
        let spec = run::model_for(&base, &task)?;
        let gs = solve_model(&spec, &cfg.solver(d), None)?;
        let ed = exact_model_ground_state(&model_hamiltonian(&spec)?)?;
        let doped = gs.state.dope_with_t_gates(&sites)?;
        let engine = topological_sre_with(&doped, &part, &settings)?;
        let vec = statevector(&doped)?;
        let m = |r: Region| exact_sre(&vec, d, cfg.sre.n, Some(&part.windows(r)));
        let m_topo_exact = -(m(Region::AB)? + m(Region::BC)? - m(Region::B)? - m(Region::ABC)?);
        let s_topo_engine = topological_ee_with(&gs.state, &part, &EntropyBudget::for_local_dim(d))?.s_topo;
        let plain = statevector(&gs.state)?;
        let s = |r: Region| rdm_entropy(&plain, d, &part.windows(r));
        let s_topo_exact = s(Region::AB)? + s(Region::BC)? - s(Region::B)? - s(Region::ABC)?;
        let row = OracleRow {
            point: task.point,
            realization: task.realization,
            param: task.param.clone(),
            value: task.value,
            seed: task.seed,
            e_dmrg: gs.energy,
            e_exact: ed.energy,
            m_topo_engine: engine.m_topo,
            m_topo_exact,
            s_topo_engine,
            s_topo_exact,
        };
        let dev = (row.e_dmrg - row.e_exact)
            .abs()
            .max((row.m_topo_engine - row.m_topo_exact).abs())
            .max((row.s_topo_engine - row.s_topo_exact).abs());
        worst = worst.max(dev);
        println!(
            "{}={} r={}: dE={:.2e} dM={:.2e} dS={:.2e}",
            row.param,
            row.value,
            row.realization,
            row.e_dmrg - row.e_exact,
            row.m_topo_engine - row.m_topo_exact,
            row.s_topo_engine - row.s_topo_exact
        );
        wtr.serialize(&row)?;
    }
    wtr.flush()?;
    println!("largest deviation {worst:.3e}; wrote {}", path.display());
    Ok(())
}

fn tables(out_dir: &Path, points: usize, engine: bool) -> Result<()> {
    if points < 2 {
        bail!("--points: need at least 2");
    }
    fs::create_dir_all(out_dir)?;
    let fixed = out_dir.join("fixed_points.csv");
    fs::write(&fixed, fixed_point_tables_csv())?;
    print!("{}", fixed_point_tables_csv());

    let curve = out_dir.join("tci_l8.csv");
    let mut wtr = csv::Writer::from_path(&curve)?;
    let mut head = vec!["g", "m_topo_quad", "m_topo_tri"];
    if engine {
        head.extend(["m_topo_quad_engine", "m_topo_tri_engine"]);
    }
    wtr.write_record(&head)?;
    let tri = tsre::PartitionSpec::tri_windows(2, 4, 2)?;
    let quad = tsre::PartitionSpec::new(Geometry::Quad, 8)?;
    for i in 0..points {
        let g = -1.0 + 2.0 * i as f64 / (points - 1) as f64;
        let mut rec = vec![g, tci_l8_closed_form(g, Geometry::Quad)?, tci_l8_closed_form(g, Geometry::Tri)?];
        if engine {
            let psi = tci_ground_state(8, g, true)?;
            let s = SreSettings::exact(2);
            rec.push(topological_sre_with(&psi, &quad, &s)?.m_topo);
            rec.push(topological_sre_with(&psi, &tri, &s)?.m_topo);
        }
        wtr.write_record(rec.iter().map(|x| x.to_string()))?;
    }
    wtr.flush()?;

    let golden = out_dir.join("golden.csv");
    fs::write(&golden, Golden::default().to_csv())?;
    println!("wrote {}, {}, {}", fixed.display(), curve.display(), golden.display());
    Ok(())
}
