use std::path::{Path, PathBuf};
use std::process::ExitCode;

use binogate::error::{Error, EXIT_USAGE};
use binogate::xp::{design, run_experiment, ExperimentConfig, ExperimentKind, Overrides};
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "binogate", version, about = "Geometric gates on a binomial-code cavity: design, simulate, reproduce")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// TOML parameter file, or a manifest.json from an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Base seed for noise streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Fock cutoff n_max.
    #[arg(long = "fock-cutoff", global = true)]
    fock_cutoff: Option<usize>,
    /// Fixed RK4 step count (rounded up to a multiple of 200).
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Run even if the regime check fails.
    #[arg(long, global = true)]
    force: bool,
    /// Treat quoted decoherence rates as linear frequencies (multiply by 2π).
    #[arg(long = "rates-angular", global = true)]
    rates_angular: bool,
    /// Shrink sweeps (11 ε points, 10 seeds, 3 rate points).
    #[arg(long, global = true)]
    fast: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the path, phase and drive design as JSON.
    Design,
    /// Run a single experiment (default: the config's, else gates_effective).
    Simulate {
        #[arg(long)]
        experiment: Option<String>,
    },
    /// Run a sweep: systematic, awgn_samples, awgn_sweep or decoherence.
    Sweep { name: String },
    /// Reproduce a figure: fig2, fig3a, fig3b, fig4, fig5a, fig5b, fig6, phases or all.
    Reproduce { figure: String },
}

fn overrides(g: &Global, experiment: Option<ExperimentKind>) -> Overrides {
    Overrides {
        experiment,
        seed: g.seed,
        n_max: g.fock_cutoff,
        steps: g.steps,
        force: g.force,
        rates_angular: g.rates_angular,
        fast: g.fast,
    }
}

fn load(g: &Global, experiment: Option<ExperimentKind>) -> Result<ExperimentConfig, Error> {
    let ov = overrides(g, experiment);
    match &g.config {
        Some(path) => ExperimentConfig::load(path, &ov),
        None => ExperimentConfig::from_toml_str("", &ov),
    }
}

fn parse_kind(s: &str) -> Result<ExperimentKind, Error> {
    ExperimentKind::parse(s).ok_or_else(|| Error::Config(format!("unknown experiment or figure {s:?}")))
}

/// Runs, writes, and reports; convergence failures still leave the outputs.
fn execute(cfg: &ExperimentConfig, dir: &Path) -> Result<(), Error> {
    let res = run_experiment(cfg)?;
    res.write(dir)?;
    eprintln!("{}: wrote {} files to {}", cfg.experiment.name(), res.manifest.outputs.len() + 1, dir.display());
    for (k, v) in &res.manifest.summary {
        eprintln!("  {k} = {v:.6e}");
    }
    res.status()
}

fn run(cli: Cli) -> Result<(), Error> {
    let g = &cli.global;
    match &cli.command {
        Command::Design => {
            let cfg = load(g, None)?;
            let report = design(&cfg)?;
            let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?;
            println!("{text}");
            Ok(())
        }
        Command::Simulate { experiment } => {
            let kind = experiment.as_deref().map(parse_kind).transpose()?;
            let cfg = load(g, kind)?;
            execute(&cfg, &g.out)
        }
        Command::Sweep { name } => {
            let kind = parse_kind(name)?;
            if !kind.is_sweep() {
                return Err(Error::Config(format!("{name} is not a sweep")));
            }
            let cfg = load(g, Some(kind))?;
            execute(&cfg, &g.out)
        }
        Command::Reproduce { figure } => {
            if figure == "all" {
                let mut first_err = None;
                for kind in ExperimentKind::ALL {
                    let cfg = load(g, Some(kind))?;
                    if let Err(e) = execute(&cfg, &cfg.subdir(&g.out)) {
                        eprintln!("{}: {e}", kind.figure());
                        first_err.get_or_insert(e);
                    }
                }
                return first_err.map_or(Ok(()), Err);
            }
            let kind = parse_kind(figure)?;
            let cfg = load(g, Some(kind))?;
            execute(&cfg, &g.out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
