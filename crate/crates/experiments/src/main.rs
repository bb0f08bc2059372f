use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rlcompile::config::{InitMode, Precision};
use rlcompile::generalize::{run_generalization, GeneralizeSpec};
use rlcompile::instance::CellSeeds;
use rlcompile::output::{self, Failure, Manifest};
use rlcompile::sweep::{
    run_cells, variance_ratios, NoiseSweepSpec, SweepCell, SweepOutcome, SweepSpec,
};
use rlcompile::{ExpError, ExpResult, ExperimentConfig, Method};
use rlcompile_core::fidelity::{hoeffding_bound, hoeffding_required_m};

/// Compile a hidden shallow circuit with Gaussian-policy gradients and
/// benchmark against derivative-free optimizers.
#[derive(Parser)]
#[command(name = "rlcompile", version)]
struct Cli {
    /// Worker threads for concurrent cells and rollouts. Results do not
    /// depend on this.
    #[arg(long, global = true, env = "RLCOMPILE_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One training run; writes the per-iteration trace.
    Train {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value_t = Method::Pg)]
        method: Method,
        /// Seed index within the cell.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// DFO evaluation budget (defaults to the method's configured budget).
        #[arg(long)]
        budget: Option<u64>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Policy gradient against both DFO methods at an equal raw-evaluation
    /// budget.
    Compare {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Trainability sweep over qubit counts, repetitions and methods.
    Sweep {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        seeds: Option<u64>,
        /// Also write every per-iteration trace.
        #[arg(long)]
        traces: bool,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Noiseless and noisy runs side by side plus the variance-ratio table.
    NoiseSweep {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        seeds: Option<u64>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Train on nested training sets and score on held-out state families.
    Generalize {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        seeds: Option<u64>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Training-set size for a Hoeffding guarantee, or the bound for a given
    /// size.
    Hoeffding {
        #[arg(long)]
        epsilon: f64,
        #[arg(long, required_unless_present = "m", conflicts_with = "m")]
        delta: Option<f64>,
        #[arg(long)]
        m: Option<u64>,
    },
}

#[derive(Args)]
struct Io {
    /// JSON config file. Omitted means all defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (falls back to the config's `output`, then `results`).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Flags that override single config fields.
#[derive(Args, Default)]
struct Overrides {
    #[arg(long)]
    n_qubits: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    m_train: Option<usize>,
    #[arg(long)]
    rollouts: Option<usize>,
    #[arg(long)]
    iterations: Option<u64>,
    /// Shots per state; `--exact` switches back to exact mode.
    #[arg(long, conflicts_with = "exact")]
    shots: Option<u64>,
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    noise_p: Option<f64>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long, value_parser = parse_precision)]
    precision: Option<Precision>,
    #[arg(long, value_parser = parse_init)]
    init: Option<InitMode>,
    #[arg(long)]
    learn_sigma: bool,
    #[arg(long)]
    sample_one_state: bool,
    /// Record wall-clock columns (makes outputs run-dependent).
    #[arg(long)]
    timing: bool,
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    serde_json::from_value(serde_json::Value::String(s.into()))
        .map_err(|_| "expected f64 or f32".into())
}

fn parse_init(s: &str) -> Result<InitMode, String> {
    serde_json::from_value(serde_json::Value::String(s.into()))
        .map_err(|_| "expected random or target".into())
}

impl Overrides {
    fn apply(&self, c: &mut ExperimentConfig) -> ExpResult<()> {
        macro_rules! set {
            ($($f:ident),*) => {$(if let Some(v) = self.$f { c.$f = v; })*};
        }
        set!(
            n_qubits,
            rollouts,
            iterations,
            noise_p,
            master_seed,
            precision,
            init
        );
        if self.depth.is_some() {
            c.depth = self.depth;
        }
        if self.m_train.is_some() {
            c.m_train = self.m_train;
        }
        if self.shots.is_some() {
            c.shots = self.shots;
        }
        if self.exact {
            c.shots = None;
        }
        c.learn_sigma |= self.learn_sigma;
        c.sample_one_state |= self.sample_one_state;
        c.timing |= self.timing;
        c.validate()
    }
}

fn load_config(io: &Io, overrides: &Overrides) -> ExpResult<ExperimentConfig> {
    let mut c = match &io.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    overrides.apply(&mut c)?;
    Ok(c)
}

fn load_spec<S: Default>(io: &Io, load: impl FnOnce(&Path) -> ExpResult<S>) -> ExpResult<S> {
    io.config.as_deref().map_or_else(|| Ok(S::default()), load)
}

fn out_dir(io: &Io, config: &ExperimentConfig) -> ExpResult<PathBuf> {
    let dir = io
        .out
        .clone()
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("results"));
    output::ensure_dir(&dir)?;
    Ok(dir)
}

fn failures(outcome: &SweepOutcome) -> Vec<Failure> {
    outcome
        .rows
        .iter()
        .enumerate()
        .filter_map(|(row, r)| {
            r.error.as_ref().map(|e| Failure {
                row,
                error: e.clone(),
            })
        })
        .collect()
}

fn print_rows(outcome: &SweepOutcome) {
    for r in &outcome.rows {
        match r.j_inf {
            Some(j) => println!(
                "n={} reps={} p={} {:<11} seed {:>2}  J_inf = {:.4} ± {:.4}",
                r.n_qubits,
                r.repetitions,
                r.noise_p,
                r.method,
                r.seed,
                j,
                r.j_inf_std.unwrap_or(0.0)
            ),
            None => println!(
                "n={} reps={} p={} {:<11} seed {:>2}  failed: {}",
                r.n_qubits,
                r.repetitions,
                r.noise_p,
                r.method,
                r.seed,
                r.error.as_deref().unwrap_or("")
            ),
        }
    }
}

/// Writes the sweep table, optional traces and the manifest.
fn write_sweep<C: serde::Serialize>(
    dir: &Path,
    command: &str,
    config: C,
    outcome: &SweepOutcome,
    timing: bool,
    traces: bool,
) -> ExpResult<Manifest<C>> {
    let mut manifest = Manifest::new(command, config);
    output::write_sweep_csv(&dir.join("sweep.csv"), &outcome.rows, timing)?;
    manifest.outputs.push("sweep.csv".into());
    if traces {
        output::write_trace_csv(
            &dir.join("traces.csv"),
            outcome.traces.iter().flatten(),
            timing,
        )?;
        manifest.outputs.push("traces.csv".into());
    }
    manifest.seeds = outcome.seeds.clone();
    manifest.failures = failures(outcome);
    Ok(manifest)
}

fn run(cli: Cli) -> ExpResult<()> {
    match cli.command {
        Command::Train {
            io,
            method,
            seed,
            budget,
            overrides,
        } => {
            let config = load_config(&io, &overrides)?;
            let dir = out_dir(&io, &config)?;
            let cell = SweepCell {
                config: config.clone(),
                method,
                seed_index: seed,
                budget,
            };
            let outcome = run_cells(&[cell], true);
            if let Some(err) = &outcome.rows[0].error {
                return Err(ExpError::Runtime(err.clone()));
            }
            let mut manifest =
                write_sweep(&dir, "train", config.clone(), &outcome, config.timing, true)?;
            manifest.seeds = vec![CellSeeds::new(config.master_seed, config.n_qubits, seed)];
            manifest.write(&dir.join("manifest.json"))?;
            print_rows(&outcome);
            if let Some(t) = &outcome.traces[0] {
                println!("θ* training-set fidelity = {:.4}", t.theta_star_fidelity);
                if !t.flags.is_empty() {
                    println!("flags: {}", t.flags.join(", "));
                }
            }
        }
        Command::Compare {
            io,
            seeds,
            overrides,
        } => {
            let config = load_config(&io, &overrides)?;
            let dir = out_dir(&io, &config)?;
            let spec = SweepSpec {
                base: config.clone(),
                n_qubits: vec![config.n_qubits],
                repetitions: vec![match config.shots {
                    None => rlcompile::sweep::Repetitions::Exact,
                    Some(s) => rlcompile::sweep::Repetitions::Shots(s),
                }],
                noise_p: vec![config.noise_p],
                methods: Method::ALL.to_vec(),
                seeds,
                equal_budget: true,
            };
            let outcome = run_cells(&spec.cells(), true);
            write_sweep(&dir, "compare", spec, &outcome, config.timing, true)?
                .write(&dir.join("manifest.json"))?;
            print_rows(&outcome);
        }
        Command::Sweep {
            io,
            seeds,
            traces,
            overrides,
        } => {
            let mut spec = load_spec(&io, SweepSpec::load)?;
            overrides.apply(&mut spec.base)?;
            if let Some(s) = seeds {
                spec.seeds = s;
            }
            spec.validate()?;
            let dir = out_dir(&io, &spec.base)?;
            let outcome = run_cells(&spec.cells(), traces);
            let timing = spec.base.timing;
            write_sweep(&dir, "sweep", spec, &outcome, timing, traces)?
                .write(&dir.join("manifest.json"))?;
            print_rows(&outcome);
        }
        Command::NoiseSweep {
            io,
            seeds,
            overrides,
        } => {
            let mut spec = load_spec(&io, NoiseSweepSpec::load)?;
            overrides.apply(&mut spec.base)?;
            if let Some(s) = seeds {
                spec.seeds = s;
            }
            spec.validate()?;
            let dir = out_dir(&io, &spec.base)?;
            let outcome = run_cells(&spec.as_sweep().cells(), false);
            let ratios = variance_ratios(&outcome.rows, spec.noise_p);
            let timing = spec.base.timing;
            let mut manifest = write_sweep(&dir, "noise-sweep", spec, &outcome, timing, false)?;
            output::write_ratio_csv(&dir.join("variance_ratios.csv"), &ratios)?;
            manifest.outputs.push("variance_ratios.csv".into());
            manifest.write(&dir.join("manifest.json"))?;
            print_rows(&outcome);
            for r in &ratios {
                println!(
                    "n={} {} reps={}  seed-std ratio = {}  within-run ratio = {}",
                    r.n_qubits,
                    r.method,
                    r.repetitions,
                    r.seed_ratio.map_or("n/a".into(), |v| format!("{v:.3}")),
                    r.within_ratio.map_or("n/a".into(), |v| format!("{v:.3}")),
                );
            }
        }
        Command::Generalize {
            io,
            seeds,
            overrides,
        } => {
            let mut spec = load_spec(&io, GeneralizeSpec::load)?;
            overrides.apply(&mut spec.base)?;
            if let Some(s) = seeds {
                spec.seeds = s;
            }
            spec.validate()?;
            let dir = out_dir(&io, &spec.base)?;
            let outcome = run_generalization(&spec);
            output::write_generalize_csv(&dir.join("generalization.csv"), &outcome.rows)?;
            let mut manifest = Manifest::new("generalize", spec);
            manifest.outputs.push("generalization.csv".into());
            manifest.seeds = outcome.seeds;
            manifest.failures = outcome
                .rows
                .iter()
                .enumerate()
                .filter_map(|(row, r)| r.error.clone().map(|error| Failure { row, error }))
                .collect();
            manifest.write(&dir.join("manifest.json"))?;
            for r in &outcome.rows {
                println!(
                    "seed {:>2} m={:<5} {:<13} F = {}",
                    r.seed,
                    r.train_size,
                    r.set.name(),
                    r.fidelity.map_or("failed".into(), |v| format!("{v:.4}"))
                );
            }
        }
        Command::Hoeffding { epsilon, delta, m } => match (delta, m) {
            (Some(delta), _) => {
                let m = hoeffding_required_m(epsilon, delta)?;
                println!("m = {m}");
            }
            (None, Some(m)) => {
                let bound = hoeffding_bound(epsilon, m)?;
                println!("bound = {bound:e}");
            }
            (None, None) => unreachable!("clap requires --delta or --m"),
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build_global()
        {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": e.class(), "message": e.to_string() });
            eprintln!("{line}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
