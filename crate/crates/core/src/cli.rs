//! Command-line front end. `clustp --help` lists the subcommands.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error (parse, validation,
//! I/O), 3 infeasible input or oracle size cap.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{self, BenchError, TrialRunner, SWEEP_GAMMAS};
use crate::gen::{self, GenError};
use crate::instance::ClusteredInstance;
use crate::io;
use crate::nrga::{Nrga, NrgaError, NrgaParams};
use crate::objective::{check_feasible, total_cost};
use crate::oracle::{brute_force_optimum, OracleError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "clustp", version, about = "Clustered shortest-path tree solver and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Md,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the randomized greedy heuristic repeatedly on one instance
    Solve {
        instance: PathBuf,
        #[arg(long, default_value_t = 50.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 30)]
        runs: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        out: OutputFormat,
        /// Write the best tree found to this file
        #[arg(long)]
        solution_out: Option<PathBuf>,
        /// Score edges from every attached cluster each iteration (experimental)
        #[arg(long)]
        rescan_all: bool,
    },
    /// Run the same seeds under several gamma values
    Sweep {
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = SWEEP_GAMMAS.to_vec())]
        gammas: Vec<f64>,
        #[arg(long, default_value_t = 30)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        out: OutputFormat,
    },
    /// PI table of a results CSV against published baseline values
    Compare { results: PathBuf, baselines: PathBuf },
    /// Write a synthetic instance
    Generate {
        #[command(subcommand)]
        family: Family,
    },
    /// Exact optimum by exhaustive enumeration (tiny instances only)
    Oracle { instance: PathBuf },
    /// Verify a solution file against an instance
    Check { instance: PathBuf, solution: PathBuf },
}

#[derive(Debug, Args)]
struct GenCommon {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000.0)]
    extent: f64,
    /// Output file; standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Family {
    /// Uniform points clustered by grid cell
    Grid {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Gaussian clouds around random centres
    Clustered {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        spread: f64,
        #[command(flatten)]
        common: GenCommon,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<NrgaError> for Failure {
    fn from(e: NrgaError) -> Self {
        let code = match e {
            NrgaError::InvalidGamma(_) => EXIT_USAGE,
            NrgaError::DisconnectedClusters { .. } => EXIT_INFEASIBLE,
            _ => EXIT_DATA,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Nrga(inner) => inner.into(),
            BenchError::NoRuns | BenchError::NoGammas => Failure::new(EXIT_USAGE, e.to_string()),
            BenchError::Cost(_) => Failure::new(EXIT_INFEASIBLE, e.to_string()),
            _ => Failure::new(EXIT_DATA, e.to_string()),
        }
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        let code = match e {
            GenError::InvalidParameters(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::new(EXIT_INFEASIBLE, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_DATA, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<ClusteredInstance, Failure> {
    io::parse_instance(&read(path)?).map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", path.display())))
}

fn render(reports: &[bench::TrialReport], format: OutputFormat, sweep: bool) -> String {
    match format {
        OutputFormat::Csv => io::write_results_csv(reports),
        OutputFormat::Md if sweep => bench::render_sweep_markdown(reports),
        OutputFormat::Md => bench::render_markdown(reports),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
            s.push('\n');
            s
        }
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { instance, gamma, seed, runs, out, solution_out, rescan_all } => {
            let inst = load_instance(&instance)?;
            NrgaParams::new(gamma, seed)?;
            let solver = Nrga::new(&inst)?.rescan_all(rescan_all);
            let report = TrialRunner::from_env().run_with(&solver, gamma, runs, seed)?;
            if let Some(path) = solution_out {
                let best = report
                    .costs
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(i, _)| report.seeds[i])
                    .expect("at least one run");
                let tree = solver.run(&NrgaParams { gamma, seed: best })?;
                fs::write(&path, io::write_solution(&inst, &tree, report.best_found))?;
            }
            stdout.write_all(render(&[report], out, false).as_bytes())?;
        }
        Command::Sweep { instance, gammas, runs, seed, out } => {
            let inst = load_instance(&instance)?;
            for &g in &gammas {
                NrgaParams::new(g, seed)?;
            }
            let reports = TrialRunner::from_env().gamma_sweep(&inst, &gammas, runs, seed)?;
            stdout.write_all(render(&reports, out, true).as_bytes())?;
        }
        Command::Compare { results, baselines } => {
            let data = |p: &Path, e: io::ParseError| Failure::new(EXIT_DATA, format!("{}: {e}", p.display()));
            let ours = io::parse_results_csv(&read(&results)?).map_err(|e| data(&results, e))?;
            let published = io::parse_baselines_csv(&read(&baselines)?).map_err(|e| data(&baselines, e))?;
            let rows = bench::compare(&ours, &published)?;
            stdout.write_all(bench::render_pi_markdown(&rows).as_bytes())?;
        }
        Command::Generate { family } => {
            let (inst, common) = match family {
                Family::Grid { n, rows, cols, common } => {
                    (gen::generate_grid(n, rows, cols, common.extent, common.seed)?, common)
                }
                Family::Clustered { n, k, spread, common } => {
                    (gen::generate_clustered(n, k, spread, common.extent, common.seed)?, common)
                }
            };
            let text = io::write_instance(&inst);
            match common.out {
                Some(path) => fs::write(path, text)?,
                None => stdout.write_all(text.as_bytes())?,
            }
        }
        Command::Oracle { instance } => {
            let inst = load_instance(&instance)?;
            let sol = brute_force_optimum(&inst)?;
            stdout.write_all(io::write_solution(&inst, &sol.tree, sol.cost).as_bytes())?;
        }
        Command::Check { instance, solution } => {
            let inst = load_instance(&instance)?;
            let parsed =
                io::parse_solution(&read(&solution)?).map_err(|e| Failure::new(EXIT_DATA, format!("{}: {e}", solution.display())))?;
            if parsed.dimension != inst.num_vertices() {
                return Err(Failure::new(
                    EXIT_DATA,
                    format!("solution has dimension {}, instance has {}", parsed.dimension, inst.num_vertices()),
                ));
            }
            let violations = check_feasible(&parsed.tree, &inst);
            if !violations.is_empty() {
                writeln!(stdout, "infeasible")?;
                for v in &violations {
                    writeln!(stdout, "  {v}")?;
                }
                return Err(Failure::new(EXIT_INFEASIBLE, format!("{} violations", violations.len())));
            }
            let cost = total_cost(&parsed.tree, &inst).expect("feasible tree has a cost");
            writeln!(stdout, "feasible")?;
            writeln!(stdout, "cost: {cost}")?;
            if let Some(claimed) = parsed.cost {
                if (claimed - cost).abs() > 1e-6 * cost.abs().max(1.0) {
                    return Err(Failure::new(EXIT_DATA, format!("declared cost {claimed} differs from {cost}")));
                }
            }
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
