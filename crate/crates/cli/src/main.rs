use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use arcwalk::datasets::Builtin;
use arcwalk::operators::DEFAULT_DENSE_CAP;
use arcwalk::report::{
    run, Averaging, GraphSource, OutputFormat, RunConfig, RunError, Task, Threshold, DEFAULT_BINS,
};
use arcwalk::spectral::DEFAULT_DEGENERACY_TOL;
use arcwalk::CoinKind;
use clap::{Args, Parser, Subcommand};

/// Coined quantum walks on graphs and walk-based community detection.
#[derive(Debug, Parser)]
#[command(name = "arcwalk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transition probabilities p(i→l; t) and P(i→l; t) for t = 0..=T.
    Evolve(Common),
    /// Time-averaged transition matrix (heatmap).
    Average(Common),
    /// Eigenvalues, degeneracy report, argument histogram and IPR.
    Spectrum(Common),
    /// Threshold community detection.
    Detect(Common),
    /// Community counts and sizes over a list of thresholds.
    Sweep(Common),
    /// Classical random-walk baseline.
    Classical(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// builtin:NAME, edges:PATH or pajek:PATH
    #[arg(long, default_value = "builtin:three_community")]
    graph: GraphSource,
    /// fourier or grover
    #[arg(long, default_value = "fourier")]
    coin: CoinKind,
    /// average-finite or average-infinite (default: infinite when D <= 2000)
    #[arg(long, default_value = "auto")]
    mode: Averaging,
    /// 1-based start nodes, comma separated
    #[arg(long, value_delimiter = ',', default_value = "1")]
    start: Vec<usize>,
    #[arg(long, default_value_t = arcwalk::evolution::DEFAULT_STEPS)]
    steps: usize,
    /// q, or "auto" for 1/D
    #[arg(long, default_value = "auto")]
    threshold: Threshold,
    /// Ascending thresholds for sweep, comma separated
    #[arg(long, value_delimiter = ',')]
    q_list: Vec<f64>,
    /// Average over t = 0..T-1 instead of t = 1..T
    #[arg(long)]
    include_t0: bool,
    #[arg(long, default_value = "json")]
    format: OutputFormat,
    /// Write here (atomically) instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Largest arc count for which the dense operator may be built
    #[arg(long, env = "ARCWALK_DENSE_CAP", default_value_t = DEFAULT_DENSE_CAP)]
    dense_cap: usize,
    #[arg(long, default_value_t = DEFAULT_DEGENERACY_TOL)]
    degeneracy_tol: f64,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
}

fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = std::fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(contents.as_bytes()).and_then(|_| f.sync_all()))
        .and_then(|_| std::fs::rename(&tmp, path));
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}

fn execute(task: Task, args: Common) -> Result<(), RunError> {
    let mut config = RunConfig::new(GraphSource::Builtin(Builtin::ThreeCommunity), task);
    config.graph = args.graph;
    config.coin = args.coin;
    config.averaging = args.mode;
    config.start = args.start;
    config.steps = args.steps;
    config.include_initial = args.include_t0;
    config.threshold = args.threshold;
    config.q_list = args.q_list;
    config.dense_cap = args.dense_cap;
    config.degeneracy_tol = args.degeneracy_tol;
    config.bins = args.bins;

    let text = run(&config)?.render(args.format);
    match args.output {
        Some(path) => write_atomic(&path, &text)
            .map_err(|e| RunError::Data(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| RunError::Data(format!("cannot write output: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) if err.use_stderr() => {
            let msg = err.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("arcwalk: config error: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
        Err(err) => {
            let _ = err.print();
            return ExitCode::SUCCESS;
        }
    };
    let (task, args) = match cli.command {
        Command::Evolve(a) => (Task::Evolve, a),
        Command::Average(a) => (Task::Average, a),
        Command::Spectrum(a) => (Task::Spectrum, a),
        Command::Detect(a) => (Task::Detect, a),
        Command::Sweep(a) => (Task::Sweep, a),
        Command::Classical(a) => (Task::Classical, a),
    };
    match execute(task, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("arcwalk: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
