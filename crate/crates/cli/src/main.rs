//! `skyrme`: runs scenario configs and writes their reports.
//!
//! Exit codes: 0 all assertions pass, 1 an assertion failed, 2 configuration
//! or I/O error, 3 the simulation diverged.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use skyrme_core::harness::{
    emit_report, expand_sweep, load_snapshot, parse_config, run_all, save_snapshot, write_index, RunReport,
    Scenario, ScenarioConfig,
};
use skyrme_core::{energy, evolve, sample_initial_data, Error, FieldState, Observer};

#[derive(Parser)]
#[command(name = "skyrme", version, about = "Radial Skyrme and Adkins-Nappi wave-map experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured data and write energy series and snapshots.
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Write a snapshot every this many records (0 writes only the final state).
        #[arg(long, default_value_t = 0)]
        snapshot_every: usize,
        /// Start from a saved snapshot instead of the configured data.
        #[arg(long, value_name = "PATH")]
        from: Option<PathBuf>,
    },
    /// Identity verification and energy conservation.
    Verify(Common),
    /// Exterior decay, integrability bound and anchored monotonicity.
    Decay(Common),
    /// Weighted-energy growth exponents.
    Growth(Common),
    /// Sign of the combined virial functionals.
    Virial(Common),
    /// Static Skyrmion by shooting.
    Skyrmion(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario config file (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Override a config key, e.g. `--set grid.cells=2048`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Run once per value, e.g. `--sweep data.amplitude=0.01,0.02`.
    #[arg(long, value_name = "KEY=V1,V2,...")]
    sweep: Option<String>,
    /// Output directory; takes precedence over the config and SKYRME_OUT_DIR.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

/// Why a command did not succeed; errors carry their printed message.
enum Failure {
    Assertions,
    Config(String),
    Diverged(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Assertions => 1,
            Failure::Config(_) => 2,
            Failure::Diverged(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Diverged { .. } => Failure::Diverged(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

fn allowed(command: &Command) -> &'static [Scenario] {
    use Scenario::*;
    match command {
        Command::Evolve { .. } => &[
            Conservation,
            IdentityVerification,
            ExteriorDecay,
            IntegrabilityBound,
            WeightedGrowth,
            VirialSign,
            AnchoredMonotone,
        ],
        Command::Verify(_) => &[IdentityVerification, Conservation],
        Command::Decay(_) => &[ExteriorDecay, IntegrabilityBound, AnchoredMonotone],
        Command::Growth(_) => &[WeightedGrowth],
        Command::Virial(_) => &[VirialSign],
        Command::Skyrmion(_) => &[Skyrmion],
    }
}

fn read_config_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))
}

fn check_scenario(config: &ScenarioConfig, command: &Command, name: &str) -> Result<(), Failure> {
    if allowed(command).contains(&config.scenario) {
        return Ok(());
    }
    let list: Vec<&str> = allowed(command).iter().map(|s| s.name()).collect();
    Err(Failure::Config(format!(
        "scenario {} cannot run under `{name}` (expected one of: {})",
        config.scenario,
        list.join(", ")
    )))
}

fn print_report(report: &RunReport, dir: &Path) {
    println!("{} ({}): {}", report.name, report.scenario(), if report.passed() { "PASS" } else { "FAIL" });
    for a in &report.assertions {
        println!("  {}", a.describe());
    }
    println!("  report: {}", dir.display());
}

fn run_report_command(common: &Common, command: &Command, name: &str) -> Result<(), Failure> {
    let text = read_config_text(&common.config)?;
    let base = parse_config(&text, &common.set)?;
    check_scenario(&base, command, name)?;
    let Some(sweep) = &common.sweep else {
        let dir = common.out.clone().unwrap_or_else(|| base.output_dir());
        let report = skyrme_core::harness::run_scenario(&base)?;
        emit_report(&report, &dir)?;
        print_report(&report, &dir);
        return if report.passed() { Ok(()) } else { Err(Failure::Assertions) };
    };
    let index_dir = common.out.clone().unwrap_or_else(|| base.output_dir());
    let mut points = expand_sweep(&text, &common.set, sweep)?;
    for p in &mut points {
        p.config.run.output_dir = Some(index_dir.join(p.config.name()));
    }
    let configs: Vec<ScenarioConfig> = points.iter().map(|p| p.config.clone()).collect();
    let results = run_all(&configs);
    // the exit status reflects the most severe outcome across points
    let mut worst: Option<Failure> = None;
    for (cfg, result) in configs.iter().zip(results.iter()) {
        let dir = cfg.run.output_dir.clone().expect("set above");
        let failure = match result {
            Ok(report) => {
                emit_report(report, &dir)?;
                print_report(report, &dir);
                (!report.passed()).then_some(Failure::Assertions)
            }
            Err(e @ Error::Diverged { .. }) => Some(Failure::Diverged(format!("{}: {e}", cfg.name()))),
            Err(e) => Some(Failure::Config(format!("{}: {e}", cfg.name()))),
        };
        if let Some(f) = failure {
            if let Failure::Config(m) | Failure::Diverged(m) = &f {
                eprintln!("error: {m}");
            }
            if worst.as_ref().is_none_or(|w| f.code() > w.code()) {
                worst = Some(f);
            }
        }
    }
    write_index(&index_dir, &points, &results)?;
    println!("index: {}", index_dir.join("index.csv").display());
    match worst {
        None => Ok(()),
        Some(f) => Err(f),
    }
}

/// Records energy and `max |u|`, keeping every `snapshot_every`-th state.
struct EnergyProbe<'a> {
    grid: &'a skyrme_core::RadialGrid,
    params: &'a skyrme_core::ModelParams,
    snapshot_every: usize,
    seen: usize,
}

impl Observer for EnergyProbe<'_> {
    type Record = (f64, f64, Option<FieldState>);
    fn observe(&mut self, state: &FieldState) -> Self::Record {
        let keep = self.snapshot_every > 0 && self.seen % self.snapshot_every == 0;
        self.seen += 1;
        (
            energy(state, self.grid, self.params),
            state.linf_u(),
            keep.then(|| state.clone()),
        )
    }
}

fn run_evolve(common: &Common, from: Option<&Path>, snapshot_every: usize) -> Result<(), Failure> {
    if common.sweep.is_some() {
        return Err(Failure::Config("`evolve` does not take --sweep".into()));
    }
    let text = read_config_text(&common.config)?;
    let config = parse_config(&text, &common.set)?;
    let dir = common.out.clone().unwrap_or_else(|| config.output_dir());
    let (initial, grid, params) = match from {
        Some(path) => {
            let snap = load_snapshot(path)?;
            (snap.state, snap.grid, snap.params)
        }
        None => {
            let grid = config.build_grid()?;
            (sample_initial_data(&config.data, &grid)?, grid, config.params()?)
        }
    };
    let mut observer = EnergyProbe {
        grid: &grid,
        params: &params,
        snapshot_every,
        seen: 0,
    };
    let mut integrator = config.integrator;
    if from.is_some() {
        integrator.t_end += initial.t;
    }
    let traj = evolve(&initial, &grid, &params, &integrator, &mut observer)?;
    std::fs::create_dir_all(&dir).map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))?;
    let mut csv = String::from("t,energy,linf_u\n");
    for rec in &traj.records {
        let (e, linf, state) = &rec.data;
        csv.push_str(&format!("{:e},{e:e},{linf:e}\n", rec.t));
        if let Some(state) = state {
            save_snapshot(state, &grid, &params, &dir.join(format!("snapshot_{:08}.csv", rec.step)))?;
        }
    }
    let series = dir.join("series.csv");
    std::fs::write(&series, csv).map_err(|e| Failure::Config(format!("{}: {e}", series.display())))?;
    save_snapshot(&traj.final_state, &grid, &params, &dir.join("final.csv"))?;
    let e0 = traj.records[0].data.0;
    let e1 = traj.records.last().map_or(e0, |r| r.data.0);
    println!(
        "evolved {} steps to t = {}: energy {e0:e} -> {e1:e}, max |u| {:e}",
        traj.steps,
        traj.final_state.t,
        traj.final_state.linf_u()
    );
    println!("output: {}", dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Evolve {
            common,
            snapshot_every,
            from,
        } => run_evolve(common, from.as_deref(), *snapshot_every),
        Command::Verify(c) => run_report_command(c, &cli.command, "verify"),
        Command::Decay(c) => run_report_command(c, &cli.command, "decay"),
        Command::Growth(c) => run_report_command(c, &cli.command, "growth"),
        Command::Virial(c) => run_report_command(c, &cli.command, "virial"),
        Command::Skyrmion(c) => run_report_command(c, &cli.command, "skyrmion"),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if let Failure::Config(m) | Failure::Diverged(m) = &f {
                eprintln!("error: {m}");
            }
            ExitCode::from(f.code())
        }
    }
}
