use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ensemble_metrics::ehs::DistanceAlgorithm;
use ensemble_metrics_cli::selftest::{self, Level};
use ensemble_metrics_cli::{
    cmd_channel, cmd_dist, cmd_fid, cmd_povm, default_seed, CliError, Compare, Measure, Method, Report, Settings,
    WorstSettings, EXIT_FAILURE, EXIT_NOT_CONVERGED,
};

#[derive(Parser)]
#[command(name = "ensemble-metrics", version, about = "Distances and fidelities between ensembles of quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two ensemble files.
    Dist {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Fidelity between two ensemble files.
    Fid {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Compare two generalized measurements.
    Channel {
        m: PathBuf,
        n: PathBuf,
        #[arg(long, value_enum, default_value_t = CompareArg::Iso)]
        compare: CompareArg,
        #[arg(long, value_enum, default_value_t = MeasureArg::Dist)]
        measure: MeasureArg,
        /// Random starts of the worst-case search, besides the maximally entangled one.
        #[arg(long, default_value_t = WorstSettings::default().starts)]
        starts: usize,
        /// Ascent steps per start of the worst-case search.
        #[arg(long, default_value_t = WorstSettings::default().max_steps)]
        max_steps: usize,
        /// Ancilla dimension for the worst-case search (defaults to the system dimension).
        #[arg(long)]
        ancilla_dim: Option<usize>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Compare two POVMs.
    Povm {
        p: PathBuf,
        q: PathBuf,
        #[arg(long, value_enum, default_value_t = MeasureArg::Dist)]
        measure: MeasureArg,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Run the embedded property checks.
    Selftest {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Ehs)]
    method: MethodArg,
    #[arg(long, default_value_t = Settings::default().tol)]
    tol: f64,
    /// Defaults to $ENSEMBLE_METRICS_SEED, or 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = Settings::default().restarts)]
    restarts: usize,
    #[arg(long, default_value_t = Settings::default().max_iter)]
    max_iter: usize,
    /// Algorithm for the EHS distance.
    #[arg(long, value_enum, default_value_t = AlgorithmArg::CuttingPlane)]
    algorithm: AlgorithmArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Kantorovich,
    Ehs,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    CuttingPlane,
    Subgradient,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompareArg {
    Iso,
    Worst,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Dist,
    Fid,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

impl SolverArgs {
    fn settings(&self) -> Result<Settings, CliError> {
        Ok(Settings {
            method: match self.method {
                MethodArg::Kantorovich => Method::Kantorovich,
                MethodArg::Ehs => Method::Ehs,
            },
            tol: self.tol,
            seed: match self.seed {
                Some(s) => s,
                None => default_seed()?,
            },
            restarts: self.restarts,
            max_iter: self.max_iter,
            algorithm: match self.algorithm {
                AlgorithmArg::CuttingPlane => DistanceAlgorithm::CuttingPlane,
                AlgorithmArg::Subgradient => DistanceAlgorithm::ProjectedSubgradient,
            },
        })
    }
}

fn measure(m: MeasureArg) -> Measure {
    match m {
        MeasureArg::Dist => Measure::Distance,
        MeasureArg::Fid => Measure::Fidelity,
    }
}

fn run(cli: Cli) -> Result<Report, CliError> {
    match cli.command {
        Command::Dist { a, b, solver } => cmd_dist(&a, &b, &solver.settings()?),
        Command::Fid { a, b, solver } => cmd_fid(&a, &b, &solver.settings()?),
        Command::Channel { m, n, compare, measure: me, starts, max_steps, ancilla_dim, solver } => {
            let compare = match compare {
                CompareArg::Iso => Compare::Iso,
                CompareArg::Worst => Compare::Worst,
            };
            let worst = WorstSettings { starts, max_steps, ancilla_dim };
            cmd_channel(&m, &n, compare, measure(me), &solver.settings()?, &worst)
        }
        Command::Povm { p, q, measure: me, solver } => cmd_povm(&p, &q, measure(me), &solver.settings()?),
        Command::Selftest { .. } => unreachable!("handled in main"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Selftest { level, seed } = cli.command {
        let seed = match seed.map(Ok).unwrap_or_else(default_seed) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code() as u8);
            }
        };
        let level = match level {
            LevelArg::Quick => Level::Quick,
            LevelArg::Full => Level::Full,
        };
        let ok = selftest::run(level, seed, &mut std::io::stdout());
        return if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAILURE as u8) };
    }
    match run(cli) {
        Ok(report) => {
            print!("{}", report.to_json());
            if report.solver.converged {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_NOT_CONVERGED as u8)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
