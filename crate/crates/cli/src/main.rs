use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use zecap_core::graph::{lovasz_theta_with, AdjacencyList, Graph, ThetaOptions, ThetaSolution};
use zecap_core::pipeline::{self, AnalyzeOptions, PipelineError, DEFAULT_SEED};
use zecap_core::spec::{builtin, ChannelSpec, BUILTIN_NAMES};
use zecap_core::DEFAULT_EPS_SUPPORT;

#[derive(Parser)]
#[command(name = "zecap", version, about = "Zero-error capacity bounds for noisy quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a channel spec and report what it contains.
    Validate {
        spec: PathBuf,
        #[arg(long = "allow-overcomplete")]
        allow_overcomplete: bool,
    },
    /// Graph, capacity bounds and a code for a channel spec.
    Analyze {
        spec: PathBuf,
        /// Outcomes with probability at or below this are outside the support.
        #[arg(long, default_value_t = DEFAULT_EPS_SUPPORT)]
        eps: f64,
        /// Largest block length for the independence-number bounds.
        #[arg(long = "n-max", default_value_t = 2)]
        n_max: usize,
        /// Tolerance of the theta SDP.
        #[arg(long = "theta-tol", default_value_t = 1e-12)]
        theta_tol: f64,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the confusability graph in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Search for the state set and measurement with the most distinguishable pairs.
    Search {
        spec: PathBuf,
        /// Outcomes with probability at or below this are outside the support.
        #[arg(long, default_value_t = DEFAULT_EPS_SUPPORT)]
        eps: f64,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Zero-error block code of length n with its decoder and certificate.
    Code {
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        /// Outcomes with probability at or below this are outside the support.
        #[arg(long, default_value_t = DEFAULT_EPS_SUPPORT)]
        eps: f64,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Lovász theta of a graph given as adjacency-list JSON.
    Theta {
        graph: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a built-in channel spec.
    #[command(after_help = "Names: identity-d<K>, depolarizing-p<P>, dephasing-p<P>, bitflip-p<P>, pentagon")]
    Builtin {
        name: String,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SearchArgs {
    /// Number of states (defaults to the dimension).
    #[arg(long = "M")]
    m: Option<usize>,
    /// Independent annealing runs, executed in parallel.
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    /// Annealing iterations per restart.
    #[arg(long, default_value_t = 2000)]
    iters: usize,
    #[arg(long, env = "ZECAP_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Search general POVMs instead of rank-one projective measurements.
    #[arg(long = "general-povm")]
    general_povm: bool,
    /// Outcome count for --general-povm (defaults to d^2).
    #[arg(long)]
    outcomes: Option<usize>,
    /// Allow more states than the dimension.
    #[arg(long = "allow-overcomplete")]
    allow_overcomplete: bool,
}

impl SearchArgs {
    fn options(&self, eps: f64) -> AnalyzeOptions {
        AnalyzeOptions {
            eps_support: eps,
            states: self.m,
            restarts: self.restarts,
            iterations: self.iters,
            seed: self.seed,
            general_povm: self.general_povm,
            outcomes: self.outcomes,
            allow_overcomplete: self.allow_overcomplete,
            ..AnalyzeOptions::default()
        }
    }
}

/// Exit code 1: invalid input; exit code 2: file trouble.
enum Failure {
    Invalid(String),
    File(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(m) | Failure::File(m) => f.write_str(m),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::File(format!("cannot read {}: {e}", path.display())))
}

fn read_spec(path: &Path) -> Result<ChannelSpec, Failure> {
    ChannelSpec::from_json(&read(path)?).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

/// Writes via a temporary file in the target directory and a rename.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let fail = |e: &dyn fmt::Display| Failure::File(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(&e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| fail(&e))?;
    tmp.persist(path).map_err(|e| fail(&e.error))?;
    Ok(())
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    match out {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ThetaOutput {
    vertex_count: usize,
    edge_count: usize,
    log2_theta: f64,
    #[serde(flatten)]
    solution: ThetaSolution,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate {
            spec,
            allow_overcomplete,
        } => {
            let s = read_spec(&spec)?;
            let problem = s
                .validate(allow_overcomplete).map_err(|e| Failure::Invalid(format!("{}: {e}", spec.display())))?;
            let pair = match &problem.fixed {
                Some((states, povm)) => format!("{} states, {} POVM outcomes", states.len(), povm.len()),
                None => "no states or POVM (analysis searches)".into(),
            };
            println!(
                "ok: {} (dim {}, {} Kraus operators; {pair})",
                problem.name,
                problem.channel.dim(),
                problem.channel.kraus().len()
            );
            Ok(())
        }
        Command::Analyze {
            spec,
            eps,
            n_max,
            theta_tol,
            out,
            dot,
            search,
        } => {
            let s = read_spec(&spec)?;
            let opts = AnalyzeOptions {
                n_max,
                theta_tol,
                ..search.options(eps)
            };
            let report = pipeline::analyze(&s, &opts)?;
            for f in &report.failures {
                eprintln!("warning: {f}");
            }
            if let Some(path) = dot {
                let g = Graph::try_from(&report.graph).expect("report graph is valid");
                let labels: Vec<String> = report
                    .supports
                    .iter()
                    .map(|a| format!("A = {a:?}"))
                    .collect();
                write_atomic(&path, &g.to_dot(&report.channel.name, Some(&labels)))?;
            }
            emit(&report, out.as_deref())?;
            if out.is_some() {
                eprintln!("{}", report.summary);
            }
            Ok(())
        }
        Command::Search { spec, eps, out, search } => {
            let s = read_spec(&spec)?;
            let report = pipeline::search(&s, &search.options(eps))?;
            emit(&report, out.as_deref())
        }
        Command::Code {
            spec,
            n,
            eps,
            out,
            search,
        } => {
            let s = read_spec(&spec)?;
            let report = pipeline::code(&s, n, &search.options(eps))?;
            if !report.code.verification.passed {
                eprintln!("warning: code failed zero-error verification");
            }
            emit(&report, out.as_deref())
        }
        Command::Theta { graph, tol, out } => {
            let text = read(&graph)?;
            let list: AdjacencyList =
                serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", graph.display())))?;
            let g = Graph::try_from(&list).map_err(|e| Failure::Invalid(format!("{}: {e}", graph.display())))?;
            let opts = ThetaOptions {
                tol,
                ..ThetaOptions::default()
            };
            let solution = lovasz_theta_with(&g, &opts).map_err(|e| Failure::Invalid(e.to_string()))?;
            emit(
                &ThetaOutput {
                    vertex_count: g.vertex_count(),
                    edge_count: g.edge_count(),
                    log2_theta: solution.theta.log2(),
                    solution,
                },
                out.as_deref(),
            )
        }
        Command::Builtin { name, out } => {
            let spec = builtin(&name)
                .map_err(|e| Failure::Invalid(format!("{e}; known: {}", BUILTIN_NAMES.join(", "))))?;
            emit(&spec, out.as_deref())
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("ZECAP_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Invalid(format!("ZECAP_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Invalid(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(match f {
                Failure::Invalid(_) => 1,
                Failure::File(_) => 2,
            })
        }
    }
}
