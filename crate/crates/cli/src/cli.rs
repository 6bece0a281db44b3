use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use densir::scoring::ScoringMethod;
use densir::textrep::{Smoothing, Weighting};
use densir::tomography::EstimatorConfig;
use densir::verify::VerifyConfig;

use crate::commands::{
    cmd_bloch, cmd_estimate, cmd_index, cmd_score, cmd_verify, EstimateArgs, RunConfig, Sweep,
};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "densir", version, about = "Density-matrix retrieval models: index, score, verify, estimate, bloch")]
pub struct Cli {
    /// Worker threads for parallel scoring (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index from a `doc_id<TAB>text` corpus.
    Index {
        corpus: PathBuf,
        /// Index file to write.
        #[arg(long)]
        out: PathBuf,
        /// Keep only the N most frequent terms.
        #[arg(long)]
        vocab_cap: Option<usize>,
    },
    /// Rank the indexed documents for each query and write a TREC run.
    Score {
        #[arg(long)]
        index: PathBuf,
        /// `query_id<TAB>text` file.
        #[arg(long)]
        queries: PathBuf,
        /// cosine, vsm-quantum, fidelity, ql-classical, ql-quantum, neg-kl or neg-vn.
        #[arg(long)]
        method: ScoringMethod,
        /// none, jm:<lambda> or dirichlet:<mu>.
        #[arg(long, default_value = "dirichlet:2000")]
        smoothing: Smoothing,
        /// tf or tfidf.
        #[arg(long, default_value = "tfidf")]
        weighting: Weighting,
        #[arg(long)]
        vocab_cap: Option<usize>,
        #[arg(long, default_value = "densir")]
        tag: String,
        /// Run file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seeded property suite; exit code 2 if any property fails.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Dimensions for the dimension-sweeping properties.
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 5, 20, 50])]
        sizes: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximum-likelihood density from an event file; exit code 3 on non-convergence.
    Estimate {
        events: PathBuf,
        /// Dimension of the term space (or take it from --index).
        #[arg(long)]
        dim: Option<usize>,
        /// Index whose vocabulary resolves term names in the event file.
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long)]
        vocab_cap: Option<usize>,
        #[arg(long, default_value_t = 500)]
        max_iterations: usize,
        #[arg(long, default_value_t = 1e-9)]
        rel_tolerance: f64,
        #[arg(long, default_value_t = 1e-9)]
        step_tolerance: f64,
        /// Initial dilution α in (0, 1].
        #[arg(long, default_value_t = 1.0)]
        dilution: f64,
        #[arg(long, default_value_t = 2000)]
        max_dim: usize,
        /// Density file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Iteration CSV (default: `<out>.iterations.csv`, or stderr without --out).
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Bloch coordinates of 2×2 densities and of the generated sweeps, as CSV.
    Bloch {
        densities: Option<PathBuf>,
        #[arg(long, value_enum)]
        sweep: Vec<Sweep>,
        /// Points per sweep.
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(CliError::io(path))
}

/// Runs `f` against the file at `path`, or against `fallback` when absent.
fn with_output<T>(
    path: Option<&Path>,
    fallback: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> CliResult<T>,
) -> CliResult<T> {
    match path {
        Some(p) => {
            let mut file = create(p)?;
            let result = f(&mut file);
            file.flush().map_err(CliError::io(p))?;
            result
        }
        None => f(fallback),
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Index { corpus, out, vocab_cap } => {
            cmd_index(&corpus, &out, vocab_cap, stdout, stderr).map(drop)
        }
        Command::Score {
            index,
            queries,
            method,
            smoothing,
            weighting,
            vocab_cap,
            tag,
            out,
        } => {
            let cfg = RunConfig {
                method,
                smoothing,
                weighting,
                vocab_cap,
                tag,
            };
            with_output(out.as_deref(), stdout, |w| cmd_score(&index, &queries, &cfg, w, stderr))
        }
        Command::Verify { seed, sizes, out } => {
            let cfg = VerifyConfig { seed, sizes };
            with_output(out.as_deref(), stdout, |w| cmd_verify(&cfg, w)).map(drop)
        }
        Command::Estimate {
            events,
            dim,
            index,
            vocab_cap,
            max_iterations,
            rel_tolerance,
            step_tolerance,
            dilution,
            max_dim,
            out,
            log,
        } => {
            let args = EstimateArgs {
                events: &events,
                dim,
                index: index.as_deref(),
                vocab_cap,
                config: EstimatorConfig {
                    max_iterations,
                    rel_tolerance,
                    step_tolerance,
                    dilution,
                    max_dim,
                },
            };
            let log = log.or_else(|| {
                out.as_ref().map(|o| {
                    let mut p = o.clone().into_os_string();
                    p.push(".iterations.csv");
                    PathBuf::from(p)
                })
            });
            let mut err_buf = Vec::new();
            let result = with_output(out.as_deref(), stdout, |dw| {
                with_output(log.as_deref(), stderr, |lw| cmd_estimate(&args, dw, lw, &mut err_buf))
            });
            let _ = stderr.write_all(&err_buf);
            result.map(drop)
        }
        Command::Bloch {
            densities,
            sweep,
            points,
            out,
        } => with_output(out.as_deref(), stdout, |w| {
            cmd_bloch(densities.as_deref(), &sweep, points, w, stderr)
        }),
    }
}

/// Executes a parsed command line and returns the process exit code.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => {
                // the pool needs Send captures; buffer the console streams
                let (mut out, mut err) = (Vec::new(), Vec::new());
                let command = cli.command;
                let r = pool.install(|| dispatch(command, &mut out, &mut err));
                let _ = stdout.write_all(&out);
                let _ = stderr.write_all(&err);
                r
            }
            Err(e) => Err(CliError::Usage(format!("cannot start thread pool: {e}"))),
        },
        None => dispatch(cli.command, stdout, stderr),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn run_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, stdout, stderr),
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            if e.use_stderr() {
                1
            } else {
                let _ = write!(stdout, "{}", e.render());
                0
            }
        }
    }
}

pub fn main_exit_code() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_args(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
