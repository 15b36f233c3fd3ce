use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use diledge::bench::{compare_runs, sweep, write_report, SweepConfig};
use diledge::imgproc::{load_gray, save_edges, save_plane};
use diledge::kernels::{catalog_entries, catalog_get, dilate};
use diledge::pipelines::{normalize_key, parse_key_values, ParamMap, Pipeline, PIPELINE_IDS};
use diledge::write_atomic;

type CliResult<T = ()> = Result<T, String>;

/// Dilated classical edge detectors and a boundary benchmark.
#[derive(Debug, Parser)]
#[command(name = "diledge", version)]
struct Cli {
    /// Raise log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one pipeline on one image.
    Detect(DetectArgs),
    /// Inspect the kernel catalog.
    #[command(subcommand)]
    Kernels(KernelsCommand),
    /// Dataset evaluation.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Same as `bench sweep`.
    Sweep(SweepArgs),
    /// Same as `bench compare`.
    Compare(CompareArgs),
}

#[derive(Debug, Subcommand)]
enum KernelsCommand {
    /// Print a kernel grid as tab-separated values.
    Dump {
        name: String,
        size: usize,
        #[arg(long, default_value_t = 0)]
        dilate: usize,
    },
    /// List catalog names with their sizes.
    List,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum BenchCommand {
    /// Evaluate one parameter setting on a dataset.
    Run(RunArgs),
    /// Evaluate every combination of a parameter grid.
    Sweep(SweepArgs),
    /// Side-by-side table of two report directories.
    Compare(CompareArgs),
}

/// Pipeline parameters. Each flag overrides the same key from `--config`.
#[derive(Debug, Args, Default)]
struct ParamFlags {
    /// first-order, compass, frei-chen, laplace, log, marr-hildreth, canny, shen-castan or ed.
    #[arg(long)]
    pipeline: Option<String>,
    /// Flat key=value parameter file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    operator: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    size: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dilate: Option<String>,
    /// Magnitude mode (exact|approx); for frei-chen, the subspace (edge|line).
    #[arg(long)]
    mode: Option<String>,
    /// Laplace variant (v1..v5, or bli for shen-castan).
    #[arg(long)]
    variant: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    threshold: Option<String>,
    /// Minimum zero-crossing contrast (marr-hildreth).
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    low: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    high: Option<String>,
    /// ISEF smoothing constant (shen-castan).
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    ratio: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    thinning: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    laplace_threshold: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gauss_size: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    grad_thr: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    anchor_thr: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    scan_interval: Option<String>,
    /// Extra key=value pair; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Accept values outside the swept ranges.
    #[arg(long)]
    unsafe_params: bool,
}

#[derive(Debug, Args)]
struct DetectArgs {
    #[command(flatten)]
    params: ParamFlags,
    /// Also write the response plane (.tif/.tiff as float TIFF, otherwise a text grid).
    #[arg(long)]
    dump_response: Option<PathBuf>,
    input: PathBuf,
    /// Edge map output (.png or .pgm); the resolved parameters go to `<output>.params.txt`.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args, Default)]
struct EvalFlags {
    /// union or best_annotator.
    #[arg(long)]
    policy: Option<String>,
    /// exact or greedy.
    #[arg(long)]
    matcher: Option<String>,
    /// Matching radius in pixels; defaults to 0.0075 of the image diagonal.
    #[arg(long)]
    max_dist: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "DILEDGE_WORKERS")]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    params: ParamFlags,
    #[command(flatten)]
    eval: EvalFlags,
    /// Directory holding images/ and gt/.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Report directory.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Sweep file: pipeline, dataset and one value list per swept key.
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    eval: EvalFlags,
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    unsafe_params: bool,
}

#[derive(Debug, Args)]
struct CompareArgs {
    run_a: PathBuf,
    run_b: PathBuf,
    /// Write the table here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

impl ParamFlags {
    /// Config file first, then explicit flags, then `--set` pairs.
    fn layered(&self) -> CliResult<ParamMap> {
        let mut map = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                parse_key_values(&text).map_err(err)?
            }
            None => ParamMap::new(),
        };
        let pipeline = self.pipeline.clone().or_else(|| map.get("pipeline").cloned());
        let mode_key = match pipeline.as_deref().map(normalize_key).as_deref() {
            Some("frei-chen") => "mode",
            _ => "magnitude",
        };
        let flags = [
            ("pipeline", &self.pipeline),
            ("operator", &self.operator),
            ("size", &self.size),
            ("dilate", &self.dilate),
            (mode_key, &self.mode),
            ("variant", &self.variant),
            ("sigma", &self.sigma),
            ("threshold", &self.threshold),
            ("delta", &self.delta),
            ("low", &self.low),
            ("high", &self.high),
            ("b", &self.b),
            ("window", &self.window),
            ("ratio", &self.ratio),
            ("thinning", &self.thinning),
            ("laplace-threshold", &self.laplace_threshold),
            ("gauss-size", &self.gauss_size),
            ("grad-thr", &self.grad_thr),
            ("anchor-thr", &self.anchor_thr),
            ("scan-interval", &self.scan_interval),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                map.insert(k.to_string(), v.clone());
            }
        }
        for pair in &self.set {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| format!("--set expects KEY=VALUE, got {pair:?}"))?;
            map.insert(normalize_key(k), v.trim().to_string());
        }
        Ok(map)
    }

    fn resolve(&self) -> CliResult<Pipeline> {
        let mut map = self.layered()?;
        let id = map
            .remove("pipeline")
            .ok_or_else(|| format!("no pipeline given; choose one of {}", PIPELINE_IDS.join(", ")))?;
        let p = Pipeline::from_params(&id, &map).map_err(err)?;
        check(&p, self.unsafe_params)?;
        Ok(p)
    }
}

fn check(p: &Pipeline, unsafe_params: bool) -> CliResult {
    match p.check_ranges() {
        Ok(()) => Ok(()),
        Err(e) if unsafe_params => {
            log::warn!("{e} (accepted because of --unsafe-params)");
            Ok(())
        }
        Err(e) => Err(format!("{e}; pass --unsafe-params to run anyway")),
    }
}

impl EvalFlags {
    fn apply(&self, map: &mut ParamMap) {
        let pairs = [
            ("policy", self.policy.clone()),
            ("matcher", self.matcher.clone()),
            ("max-dist", self.max_dist.clone()),
            ("workers", self.workers.map(|w| w.to_string())),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                map.insert(k.to_string(), v);
            }
        }
    }
}

fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".params.txt");
    PathBuf::from(s)
}

fn detect(args: &DetectArgs) -> CliResult {
    let pipeline = args.params.resolve()?;
    let gray = load_gray(&args.input).map_err(err)?;
    let edges = pipeline.run(&gray).map_err(err)?;
    save_edges(&args.output, &edges).map_err(err)?;
    write_atomic(&sidecar_path(&args.output), pipeline.to_sidecar().as_bytes()).map_err(err)?;
    if let Some(path) = &args.dump_response {
        save_plane(path, &pipeline.response(&gray).map_err(err)?).map_err(err)?;
    }
    log::info!("{} edge pixels written to {}", edges.count(), args.output.display());
    Ok(())
}

fn run_config(cfg: &SweepConfig, unsafe_params: bool) -> CliResult {
    for p in cfg.pipelines().map_err(err)? {
        check(&p, unsafe_params)?;
    }
    let table = sweep(cfg).map_err(err)?;
    write_report(&cfg.output, &table).map_err(err)?;
    let best = table.best_row();
    let params: Vec<String> = best.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let s = best.report.score;
    println!(
        "{} images, best {}: P={:.6} R={:.6} F1={:.6}",
        best.report.rows.len(),
        params.join(" "),
        s.precision,
        s.recall,
        s.f1
    );
    println!("report written to {}", cfg.output.display());
    Ok(())
}

fn bench_run(args: &RunArgs) -> CliResult {
    // A run is a sweep whose every axis holds a single value.
    let mut map = args.params.layered()?;
    args.eval.apply(&mut map);
    if let Some(d) = &args.dataset {
        map.insert("dataset".into(), d.display().to_string());
    }
    if let Some(o) = &args.output {
        map.insert("output".into(), o.display().to_string());
    }
    let cfg = SweepConfig::from_map(map).map_err(err)?;
    if cfg.grid.values().any(|v| v.len() != 1) {
        return Err("bench run takes one value per parameter; use bench sweep for grids".into());
    }
    run_config(&cfg, args.params.unsafe_params)
}

fn bench_sweep(args: &SweepArgs) -> CliResult {
    let text = std::fs::read_to_string(&args.config).map_err(|e| format!("{}: {e}", args.config.display()))?;
    let mut map = parse_key_values(&text).map_err(err)?;
    args.eval.apply(&mut map);
    if let Some(d) = &args.dataset {
        map.insert("dataset".into(), d.display().to_string());
    }
    if let Some(o) = &args.output {
        map.insert("output".into(), o.display().to_string());
    }
    let cfg = SweepConfig::from_map(map).map_err(err)?;
    log::info!("{} combinations", cfg.combinations().len());
    run_config(&cfg, args.unsafe_params)
}

fn compare(args: &CompareArgs) -> CliResult {
    let table = compare_runs(&args.run_a, &args.run_b).map_err(err)?;
    match &args.output {
        Some(p) => write_atomic(p, table.as_bytes()).map_err(err),
        None => {
            print!("{table}");
            Ok(())
        }
    }
}

fn kernels(cmd: &KernelsCommand) -> CliResult {
    match cmd {
        KernelsCommand::Dump { name, size, dilate: f } => {
            let k = catalog_get(name, *size).map_err(err)?;
            print!("{}", dilate(&k, *f).to_tsv());
        }
        KernelsCommand::List => {
            for (name, sizes) in catalog_entries() {
                let sizes: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
                println!("{name}\t{}", sizes.join(","));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let outcome = match &cli.command {
        Command::Detect(a) => detect(a),
        Command::Kernels(k) => kernels(k),
        Command::Bench(BenchCommand::Run(a)) => bench_run(a),
        Command::Bench(BenchCommand::Sweep(a)) | Command::Sweep(a) => bench_sweep(a),
        Command::Bench(BenchCommand::Compare(a)) | Command::Compare(a) => compare(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
