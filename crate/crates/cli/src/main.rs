//! `qboost` experiment runner.
//!
//! Every task writes `config.toml` (the fully resolved configuration) and
//! `metrics.json` into the output directory. Wall-clock figures live only
//! under the `timing` key of `metrics.json`; every other byte of output is a
//! function of the configuration. Failures exit nonzero and write an error
//! object to stderr and to `error.json`.

mod config;
mod tasks;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use qboost::boosting::SelectionMode;
use qboost::solvers::{SolverChoice, TabuParams};
use serde_json::json;

use config::{ExperimentConfig, Task};

#[derive(Parser, Debug)]
#[command(name = "qboost", version, about = "Boosting by discrete global optimization")]
struct Cli {
    #[command(subcommand)]
    task: Option<TaskArg>,
    /// TOML configuration; unspecified keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed, overriding the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, overriding the config file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    solver: Option<SolverArg>,
    #[arg(long, global = true)]
    mode: Option<ModeArg>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long, global = true)]
    print_defaults: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum TaskArg {
    /// Write the configured dataset as CSV.
    GenData,
    /// Train one classifier and write the model and per-iteration report.
    Train,
    /// QBoost outer loop against AdaBoost over several replicas.
    Compare,
    /// Test error and classifier size against class overlap.
    SweepOverlap,
    /// Spectrum, gap and curvature of one training instance.
    GapAnalysis,
    /// Mean curvature peak against qubit count.
    Scaling,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::GenData => Task::GenData,
            TaskArg::Train => Task::Train,
            TaskArg::Compare => Task::Compare,
            TaskArg::SweepOverlap => Task::SweepOverlap,
            TaskArg::GapAnalysis => Task::GapAnalysis,
            TaskArg::Scaling => Task::Scaling,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SolverArg {
    Tabu,
    Exhaustive,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ModeArg {
    Augment,
    ReplaceAll,
}

enum Failure {
    Config(Vec<String>),
    Runtime(String),
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Config(_) => "config",
            Failure::Runtime(_) => "runtime",
        }
    }

    fn messages(&self) -> Vec<String> {
        match self {
            Failure::Config(m) => m.clone(),
            Failure::Runtime(m) => vec![m.clone()],
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
            toml::from_str(&text).map_err(|e| Failure::Config(vec![format!("{}: {e}", path.display())]))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    match cli.solver {
        Some(SolverArg::Exhaustive) => cfg.train.qboost.solver = SolverChoice::Exhaustive,
        Some(SolverArg::Tabu) if cfg.train.qboost.solver == SolverChoice::Exhaustive => {
            cfg.train.qboost.solver = SolverChoice::Tabu(TabuParams::default());
        }
        _ => {}
    }
    if let Some(mode) = cli.mode {
        cfg.train.qboost.mode = match mode {
            ModeArg::Augment => SelectionMode::Augment,
            ModeArg::ReplaceAll => SelectionMode::ReplaceAll,
        };
    }
    Ok(cfg)
}

fn run(task: Task, cfg: &ExperimentConfig) -> Result<(), Failure> {
    let errors = cfg.validate(task);
    if !errors.is_empty() {
        return Err(Failure::Config(errors));
    }
    let out = cfg.out.as_path();
    std::fs::create_dir_all(out).map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", out.display())))?;
    // the copy is relative to its own directory, so identical runs give identical files
    let mut copy = cfg.clone();
    copy.out = PathBuf::from(".");
    let resolved = toml::to_string(&copy).map_err(|e| Failure::Runtime(e.to_string()))?;
    std::fs::write(out.join("config.toml"), resolved).map_err(|e| Failure::Runtime(format!("config.toml: {e}")))?;

    let start = Instant::now();
    let (results, timing) = match task {
        Task::GenData => tasks::gen_data(cfg, out),
        Task::Train => tasks::train(cfg, out),
        Task::Compare => tasks::compare(cfg, out),
        Task::SweepOverlap => tasks::sweep_overlap(cfg, out),
        Task::GapAnalysis => tasks::gap(cfg, out),
        Task::Scaling => tasks::scaling(cfg, out),
    }
    .map_err(Failure::Runtime)?;
    let metrics = json!({
        "task": task.name(),
        "seed": cfg.seed,
        "results": results,
        "timing": {
            "wall_time_s": start.elapsed().as_secs_f64(),
            "solver_time_s": timing.solver_time_s,
        },
    });
    tasks::write_json(&out.join("metrics.json"), &metrics).map_err(Failure::Runtime)
}

fn report(failure: &Failure, out: Option<&Path>) {
    let body = json!({
        "status": "error",
        "kind": failure.kind(),
        "messages": failure.messages(),
    });
    let text = serde_json::to_string_pretty(&body).expect("error serializes");
    eprintln!("{text}");
    if let Some(dir) = out {
        // best effort: the directory itself may be the problem
        if std::fs::create_dir_all(dir).is_ok() {
            let _ = std::fs::write(dir.join("error.json"), format!("{text}\n"));
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli) {
        Ok(cfg) => cfg,
        Err(f) => {
            report(&f, cli.out.as_deref());
            return ExitCode::from(f.exit_code());
        }
    };
    if cli.print_defaults {
        print!("{}", toml::to_string(&cfg).expect("config serializes"));
        return ExitCode::SUCCESS;
    }
    let Some(task) = cli.task else {
        report(
            &Failure::Config(vec!["no task given; run `qboost --help`".into()]),
            None,
        );
        return ExitCode::from(2);
    };
    match run(task.into(), &cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            report(&f, Some(&cfg.out));
            ExitCode::from(f.exit_code())
        }
    }
}
