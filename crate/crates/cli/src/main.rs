use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use multistab_core::pipeline::{
    benchmark, plot_benchmark, plot_summary, save_results, BenchmarkOptions, BenchmarkReport,
};
use multistab_core::{
    load_graph, multiscale_sbm, run_scan, ConstructorKind, Error, ErrorCategory, SbmParams,
    ScanConfig, ScanResult,
};

#[derive(Parser)]
#[command(name = "multistab", version, about = "Multiscale community detection with Markov Stability")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a graph over a range of Markov times.
    Run(RunArgs),
    /// Time each pipeline stage on SBM graphs of growing size.
    Benchmark(BenchmarkArgs),
    /// Generate a hierarchical stochastic block model graph.
    Sbm(SbmArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Edge list: `source,target[,weight]` per line.
    #[arg(long)]
    graph: PathBuf,
    /// Constructor name, e.g. continuous_normalized or linearized.
    #[arg(long)]
    constructor: Option<String>,
    /// `key = value` config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    min_scale: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    max_scale: Option<f64>,
    #[arg(long)]
    n_scale: Option<usize>,
    #[arg(long)]
    n_tries: Option<usize>,
    #[arg(long)]
    n_nvi: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    no_postprocessing: bool,
    #[arg(long)]
    no_scale_selection: bool,
    #[arg(long)]
    teleportation_lambda: Option<f64>,
    /// Worker threads (default: MULTISTAB_WORKERS, else all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Results file (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary figure (SVG).
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[arg(long, default_value = "linearized")]
    constructor: ConstructorKind,
    /// Graph sizes, multiples of 90.
    #[arg(long, value_delimiter = ',', default_value = "270,540,1080")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    runs_per_scale: usize,
    #[arg(long, default_value_t = 10)]
    n_scales: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report file (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Log-log stage-time figure (SVG).
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct SbmArgs {
    #[arg(long, default_value_t = 270)]
    nodes: usize,
    /// Block counts per level, finest first.
    #[arg(long, value_delimiter = ',', default_value = "27,9,3")]
    blocks: Vec<usize>,
    /// Within-block edge probability per level; derived from the block
    /// sizes when omitted.
    #[arg(long, value_delimiter = ',')]
    p_levels: Option<Vec<f64>>,
    #[arg(long)]
    p_out: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth labels per level (CSV).
    #[arg(long)]
    truth: Option<PathBuf>,
}

fn exit_code(error: &Error) -> u8 {
    match error.category() {
        ErrorCategory::Config => 2,
        ErrorCategory::Input => 3,
        ErrorCategory::Numeric => 4,
        ErrorCategory::Io => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Benchmark(args) => bench(args),
        Command::Sbm(args) => sbm(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn scan_config(args: &RunArgs) -> multistab_core::Result<ScanConfig> {
    let mut config = match &args.config {
        Some(path) => ScanConfig::load(path)?,
        None => ScanConfig::default(),
    };
    if let Some(c) = &args.constructor {
        config.constructor = c.clone();
    }
    if let Some(v) = args.min_scale {
        config.min_scale = v;
    }
    if let Some(v) = args.max_scale {
        config.max_scale = v;
    }
    if let Some(v) = args.n_scale {
        config.n_scale = v;
    }
    if let Some(v) = args.n_tries {
        config.n_tries = v;
    }
    if let Some(v) = args.n_nvi {
        config.n_nvi = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if args.no_postprocessing {
        config.with_postprocessing = false;
    }
    if args.no_scale_selection {
        config.with_scale_selection = false;
    }
    if let Some(v) = args.teleportation_lambda {
        config.constructor_options.teleportation_lambda = v;
    }
    if args.workers.is_some() {
        config.workers = args.workers;
    }
    config.validate()?;
    Ok(config)
}

fn run(args: RunArgs) -> multistab_core::Result<()> {
    let config = scan_config(&args)?;
    let graph = load_graph(&args.graph).map_err(|e| match e {
        Error::Io(io) => Error::InvalidGraph(format!("{}: {io}", args.graph.display())),
        other => other,
    })?;
    let scan = run_scan(&graph, &config)?;
    print_scan(&scan);
    if let Some(path) = &args.out {
        save_results(&scan, path)?;
    }
    if let Some(path) = &args.plot {
        plot_summary(&scan, path)?;
    }
    Ok(())
}

fn print_scan(scan: &ScanResult) {
    println!("{:>5} {:>9} {:>12} {:>12} {:>8}", "index", "log10_t", "communities", "quality", "nvi_t");
    for (i, s) in scan.scales.iter().enumerate() {
        let mark = if scan.selection.selected.contains(&i) { "*" } else { " " };
        println!(
            "{mark}{i:>4} {:>9.4} {:>12} {:>12.6} {:>8.4}",
            s.log_scale,
            s.n_communities(),
            s.best_quality,
            s.nvi
        );
    }
    if scan.selection.selected.is_empty() {
        println!("no scales selected");
    } else if scan.selection.fallback {
        println!("selected (fallback, Block NVI has no local minimum): {:?}", scan.selection.selected);
    } else {
        println!("selected: {:?}", scan.selection.selected);
    }
}

fn bench(args: BenchmarkArgs) -> multistab_core::Result<()> {
    let options = BenchmarkOptions {
        runs_per_scale: args.runs_per_scale,
        n_scales: args.n_scales,
        seed: args.seed,
        ..BenchmarkOptions::default()
    };
    let report = benchmark(args.constructor, &args.sizes, &options)?;
    print_report(&report);
    if let Some(path) = &args.out {
        let out = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(out, &report).map_err(|e| Error::Io(e.into()))?;
    }
    if let Some(path) = &args.plot {
        plot_benchmark(&report, path)?;
    }
    Ok(())
}

fn print_report(report: &BenchmarkReport) {
    println!(
        "{:>7} {:>8} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "nodes", "edges", "build", "expm", "louvain", "nvi", "postproc"
    );
    for r in &report.rows {
        let t = &r.times;
        let expm = t.exponential.map_or("-".to_string(), |v| format!("{v:.4}"));
        println!(
            "{:>7} {:>8} {:>10.4} {:>10} {:>10.4} {:>10.4} {:>10.4}",
            r.n_nodes, r.n_edges, t.build, expm, t.louvain, t.nvi, t.postprocess
        );
    }
    if let Some(slope) = report.louvain_slope {
        println!("louvain time ~ E^{slope:.3}");
    }
}

fn sbm(args: SbmArgs) -> multistab_core::Result<()> {
    let mut params = SbmParams::with_default_densities(args.nodes, args.blocks);
    if let Some(p) = args.p_levels {
        params.p_levels = p;
    }
    if let Some(p) = args.p_out {
        params.p_out = p;
    }
    let (graph, truth) = multiscale_sbm(&params, args.seed)?;
    multistab_core::graph::write_edge_list(&graph, BufWriter::new(File::create(&args.out)?))?;
    if let Some(path) = &args.truth {
        truth.write_csv(BufWriter::new(File::create(path)?))?;
    }
    eprintln!("{} nodes, {} edges", graph.n_nodes(), graph.n_edges());
    Ok(())
}
