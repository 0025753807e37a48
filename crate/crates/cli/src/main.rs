//! Command-line pipeline: point cloud -> interval events -> sweep ->
//! Reeb graph, with optional brute-force verification, plus subcommands
//! for the scaling harness and the shape experiments.
//!
//! Exit codes for `run`: 0 success, 2 malformed input, 3 verification
//! mismatch, 4 dimension mismatch.

use std::fs;
use std::io::BufReader;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use reebsweep::approx::{self, ExperimentConfig, Shape, ShapeSampler};
use reebsweep::bench::{self, Regime};
use reebsweep::error::InputError;
use reebsweep::geometry::{build_inputs, AffineFunctional};
use reebsweep::input::{read_points_csv, read_points_json, PointFormat};
use reebsweep::oracle;
use reebsweep::reeb::{self, betti, extract};
use reebsweep::sweep::{Sweep, SweepOptions};

#[derive(Parser)]
#[command(name = "reebsweep", version, about = "Reeb graphs of thickened point clouds under affine functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the Reeb graph of the eps-thickening of a point cloud.
    Run(RunArgs),
    /// Random-instance scaling runs with operation counters; emits CSV.
    Bench(BenchArgs),
    /// Shape reconstruction experiments with analytic ground truth.
    Approx(ApproxArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Point cloud file: CSV rows or a JSON array of coordinate arrays.
    input: PathBuf,
    /// Thickening radius.
    #[arg(long)]
    eps: f64,
    /// Gradient of the affine function, comma separated. Defaults to the
    /// last coordinate axis.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    direction: Option<Vec<f64>>,
    /// Offset of the affine function.
    #[arg(long, default_value_t = 0.0)]
    offset: f64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
    /// Verify the result against the brute-force reference construction.
    #[arg(long)]
    oracle_check: bool,
    /// Verify the full state invariants after every event.
    #[arg(long)]
    snapshots: bool,
    /// Write output here instead of stdout. With --format both, writes
    /// `<out>.json` and `<out>.dot`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accept a constant function (zero gradient).
    #[arg(long)]
    allow_constant: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Dot,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// Point counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "100,200,400,800")]
    ns: Vec<usize>,
    /// Overlap regimes to run.
    #[arg(long, value_delimiter = ',', default_value = "sparse,dense")]
    regimes: Vec<String>,
    /// Number of seeds per grid cell.
    #[arg(long, default_value_t = 3)]
    seeds: u64,
    /// Timing repetitions per run (best is kept).
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ApproxArgs {
    /// JSON experiment config (single object or array of objects).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in experiment set.
    #[arg(long, value_enum, default_value_t = Preset::All)]
    preset: Preset,
    /// Write the JSON reports here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Circle,
    Annulus,
    TwoClusters,
    FigureEight,
    All,
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => run_cmd(&args),
        Command::Bench(args) => bench_cmd(&args),
        Command::Approx(args) => approx_cmd(&args),
    };
    std::process::exit(code);
}

fn input_exit_code(err: &InputError) -> i32 {
    match err {
        InputError::DimensionMismatch { .. } | InputError::FunctionalDimension { .. } => 4,
        _ => 2,
    }
}

fn run_cmd(args: &RunArgs) -> i32 {
    let file = match fs::File::open(&args.input) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: cannot open {}: {e}", args.input.display());
            return 2;
        }
    };
    let format = match args.input_format {
        Some(InputFormat::Csv) => PointFormat::Csv,
        Some(InputFormat::Json) => PointFormat::Json,
        None => PointFormat::from_path(&args.input),
    };
    let points = match format {
        PointFormat::Csv => read_points_csv(BufReader::new(file)),
        PointFormat::Json => read_points_json(BufReader::new(file)),
    };
    let points = match points {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return input_exit_code(&e);
        }
    };

    let dim = points.first().map_or(1, |p| p.dim());
    let gradient = args.direction.clone().unwrap_or_else(|| {
        let mut g = vec![0.0; dim];
        g[dim - 1] = 1.0;
        g
    });
    if !points.is_empty() && gradient.len() != dim {
        eprintln!(
            "error: direction has {} components but the points have {dim}",
            gradient.len()
        );
        return 4;
    }
    let f = match AffineFunctional::new(gradient, args.offset) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return input_exit_code(&e);
        }
    };
    if f.is_constant() && !args.allow_constant {
        eprintln!("error: {}", InputError::ConstantFunctional);
        return 2;
    }

    let (balls, pairs) = match build_inputs(&points, args.eps, &f) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return input_exit_code(&e);
        }
    };
    log::info!("n={} t={} events sorted", balls.len(), pairs.len());

    let mut sweep = match Sweep::new(&balls, &pairs, SweepOptions::default()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    loop {
        match sweep.step() {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        }
        if args.snapshots {
            let report = oracle::check_state(sweep.state(), sweep.processed());
            if !report.all_pass() {
                eprintln!("snapshot check failed after {} events:", sweep.processed().len());
                eprintln!("{}", report.to_json());
                return 3;
            }
        }
    }
    let state = sweep.state();
    let graph = extract(state);

    if args.oracle_check {
        let reference = oracle::naive_reeb(&balls, &pairs);
        if let Err(m) = oracle::compare_graphs(&graph, &reference) {
            eprintln!("oracle mismatch: {m}");
            return 3;
        }
    }

    let (b0, b1) = betti(&graph);
    let criticals = graph
        .critical_values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",");
    eprintln!(
        "n={} t={} cells={} b0={} b1={} critical=[{}]",
        balls.len(),
        pairs.len(),
        state.cell_count(),
        b0,
        b1,
        criticals
    );

    let json = reeb::to_json(&graph);
    let dot = reeb::to_dot(&graph);
    match (&args.out, args.format) {
        (None, OutputFormat::Json) => println!("{json}"),
        (None, OutputFormat::Dot) => print!("{dot}"),
        (None, OutputFormat::Both) => {
            println!("{json}");
            print!("{dot}");
        }
        (Some(path), fmt) => {
            let write = |p: &PathBuf, data: &str| -> std::io::Result<()> { fs::write(p, data) };
            let result = match fmt {
                OutputFormat::Json => write(path, &json),
                OutputFormat::Dot => write(path, &dot),
                OutputFormat::Both => {
                    let mut j = path.clone();
                    j.as_mut_os_string().push(".json");
                    let mut d = path.clone();
                    d.as_mut_os_string().push(".dot");
                    write(&j, &json).and_then(|_| write(&d, &dot))
                }
            };
            if let Err(e) = result {
                eprintln!("error: cannot write output: {e}");
                return 2;
            }
        }
    }
    0
}

fn bench_cmd(args: &BenchArgs) -> i32 {
    let mut regimes = Vec::new();
    for r in &args.regimes {
        match r.as_str() {
            "sparse" => regimes.push(Regime::Sparse),
            "dense" => regimes.push(Regime::Dense),
            other => {
                eprintln!("error: unknown regime {other:?} (expected sparse or dense)");
                return 2;
            }
        }
    }
    let seeds: Vec<u64> = (0..args.seeds).collect();
    let records = bench::run_grid(&args.ns, &regimes, &seeds, args.reps);
    let csv = bench::write_csv(&records);
    if let Some(path) = &args.out {
        if let Err(e) = fs::write(path, &csv) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 2;
        }
    } else {
        print!("{csv}");
    }
    let slope = bench::loglog_slope(&records);
    let ratios: Vec<f64> = records.iter().map(|r| r.ratio).collect();
    let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    eprintln!(
        "runs={} uf-ops/(n(n+t)) in [{min:.3}, {max:.3}] loglog-slope={slope:.3}",
        records.len()
    );
    0
}

fn preset_configs(preset: Preset) -> Vec<ExperimentConfig> {
    let mk = |shape, samples, noise, seed, eps| ExperimentConfig {
        sampler: ShapeSampler { shape, samples, noise, seed },
        eps,
        direction: vec![0.0, 1.0],
        offset: 0.0,
    };
    match preset {
        Preset::Circle => vec![mk(Shape::Circle { radius: 1.0 }, 60, 0.0, 1, 0.2)],
        Preset::Annulus => vec![mk(Shape::Annulus { inner: 0.5, outer: 1.0 }, 300, 0.0, 4, 0.15)],
        Preset::TwoClusters => vec![mk(Shape::TwoClusters { separation: 2.0 }, 10, 0.02, 3, 0.2)],
        Preset::FigureEight => vec![mk(Shape::FigureEight, 160, 0.0, 2, 0.12)],
        Preset::All => [Preset::Circle, Preset::Annulus, Preset::TwoClusters, Preset::FigureEight]
            .into_iter()
            .flat_map(preset_configs)
            .collect(),
    }
}

fn approx_cmd(args: &ApproxArgs) -> i32 {
    let configs: Vec<ExperimentConfig> = match &args.config {
        Some(path) => {
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    return 2;
                }
            };
            match serde_json::from_str::<Vec<ExperimentConfig>>(&text)
                .or_else(|_| serde_json::from_str::<ExperimentConfig>(&text).map(|c| vec![c]))
            {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: bad experiment config: {e}");
                    return 2;
                }
            }
        }
        None => preset_configs(args.preset),
    };
    let mut reports = Vec::new();
    for config in &configs {
        match approx::run_experiment(config) {
            Ok(r) => reports.push(r),
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        }
    }
    eprint!("{}", approx::summary_table(&reports));
    let json = serde_json::to_string_pretty(&reports).expect("reports serialize");
    if let Some(path) = &args.out {
        if let Err(e) = fs::write(path, &json) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 2;
        }
    } else {
        println!("{json}");
    }
    if reports.iter().any(|r| r.verdict == Some(false)) {
        1
    } else {
        0
    }
}
