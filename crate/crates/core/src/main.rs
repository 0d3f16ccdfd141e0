//! Command-line interface for the random-walk kernel test.
//!
//! Exit codes: 0 success, 2 degenerate statistic, 3 no admissible
//! bandwidth, 4 I/O or unusable input, 5 configuration error.

use clap::{Args, Parser, Subcommand};
use rwkernel::bootstrap::{BootstrapSpec, Innovation};
use rwkernel::experiments::{
    run_data_analysis, run_power_table, run_size_table, AltFamily, AnalysisOptions,
    DfCalibration, ExperimentConfig,
};
use rwkernel::output::{
    curve_csv, power_table_csv, power_table_json, power_table_markdown, power_table_plotdata,
    report_json, report_markdown, Format,
};
use rwkernel::{
    bandwidth_ladder, ingest_csv, select_bandwidth, simulate, write_csv, Bandwidth, Dgp, Error,
    Kernel, RngStream,
};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "rwkernel",
    about = "Nonparametric kernel test of a random-walk null against stationary alternatives",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test a CSV series for the random-walk null.
    Test(TestArgs),
    /// Simulate a path from one of the built-in data-generating processes.
    Simulate(SimulateArgs),
    /// Select the power-maximizing bandwidth under size control.
    Calibrate(CalibrateArgs),
    /// Reproduce the power tables (ladder statistics plus Dickey-Fuller).
    PowerTable(TableArgs),
    /// Reproduce the size tables under the null.
    SizeTable(TableArgs),
}

#[derive(Args)]
struct TestArgs {
    /// Input CSV: one observation per line, optional header.
    #[arg(long)]
    input: PathBuf,
    /// Fixed test bandwidth (mutually exclusive with --calibrate).
    #[arg(long, conflicts_with = "calibrate")]
    h: Option<f64>,
    /// Calibrate the bandwidth by size/power selection.
    #[arg(long)]
    calibrate: bool,
    #[arg(long, default_value = "uniform")]
    kernel: String,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Bootstrap resamples.
    #[arg(long, default_value_t = 99)]
    b: usize,
    /// Monte Carlo replications used when calibrating.
    #[arg(long, default_value_t = 200)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Innovation law: normal or resample.
    #[arg(long, default_value = "normal")]
    innovation: String,
    /// Calibration grid "lo:hi:n", or "auto".
    #[arg(long, default_value = "auto")]
    grid: String,
    /// Alternative drift for calibration: linear or nonlinear.
    #[arg(long)]
    alt: Option<String>,
    /// Drift coefficient for the calibration alternative.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Dickey-Fuller calibration: bootstrap or asymptotic.
    #[arg(long, default_value = "bootstrap")]
    df_critical: String,
    /// Use the literal resampling recursion (comparison mode).
    #[arg(long)]
    literal_recursion: bool,
    #[arg(long, default_value = "json")]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    /// rw, linear or nonlinear.
    #[arg(long)]
    dgp: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Innovation variance sigma_u^2.
    #[arg(long, default_value_t = 0.05)]
    sigma2: f64,
    #[arg(long)]
    t: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long)]
    t: usize,
    /// Null process (only "rw" is supported).
    #[arg(long, default_value = "rw")]
    null: String,
    /// Alternative drift: linear or nonlinear.
    #[arg(long, default_value = "linear")]
    alt: String,
    #[arg(long, default_value_t = -0.1, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 0.05)]
    sigma2: f64,
    /// Grid "lo:hi:n" or "auto".
    #[arg(long, default_value = "auto")]
    grid: String,
    #[arg(long, default_value_t = 200)]
    m: usize,
    #[arg(long, default_value_t = 99)]
    b: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "uniform")]
    kernel: String,
    #[arg(long, default_value = "normal")]
    innovation: String,
    /// Write the size/power curve CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct TableArgs {
    /// Flat key = value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Alternative family: linear or nonlinear (power tables only).
    #[arg(long)]
    alt: Option<String>,
    /// desk (M=200, B=99) or paper (M=1000, B=250).
    #[arg(long)]
    scale: Option<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
}

fn main() {
    // Usage errors map to the config exit code (5); clap's default of 2 is
    // reserved for degenerate statistics.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.exit_code() == 0 { 0 } else { 5 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let code = match run(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Test(args) => with_workers(args.workers, || cmd_test(&args)),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Calibrate(args) => with_workers(args.workers, || cmd_calibrate(&args)),
        Command::PowerTable(args) => with_workers(args.workers, || cmd_table(&args, false)),
        Command::SizeTable(args) => with_workers(args.workers, || cmd_table(&args, true)),
    }
}

/// Run a closure on a rayon pool with an explicit worker count; results are
/// identical for any count because randomness is stream-keyed.
fn with_workers<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> Result<T, Error> + Send,
) -> Result<T, Error> {
    match workers {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("could not build thread pool: {e}")))?
            .install(f),
    }
}

fn parse_innovation(s: &str) -> Result<Innovation, Error> {
    match s.to_ascii_lowercase().as_str() {
        "normal" | "standard-normal" => Ok(Innovation::StandardNormal),
        "resample" | "resampled-differences" => Ok(Innovation::ResampledDifferences),
        other => Err(Error::Config(format!(
            "unknown innovation '{other}' (expected 'normal' or 'resample')"
        ))),
    }
}

fn parse_alt(s: &str) -> Result<AltFamily, Error> {
    match s.to_ascii_lowercase().as_str() {
        "linear" => Ok(AltFamily::Linear),
        "nonlinear" => Ok(AltFamily::Nonlinear),
        other => Err(Error::Config(format!(
            "unknown alternative '{other}' (expected 'linear' or 'nonlinear')"
        ))),
    }
}

fn parse_df_calibration(s: &str) -> Result<DfCalibration, Error> {
    match s.to_ascii_lowercase().as_str() {
        "bootstrap" => Ok(DfCalibration::Bootstrap),
        "asymptotic" => Ok(DfCalibration::Asymptotic),
        other => Err(Error::Config(format!(
            "unknown df calibration '{other}' (expected 'bootstrap' or 'asymptotic')"
        ))),
    }
}

/// Parse a "lo:hi:n" grid, or None for "auto".
fn parse_grid(s: &str) -> Result<Option<Vec<f64>>, Error> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(None);
    }
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "grid must be 'lo:hi:n' or 'auto', got '{s}'"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Config(format!("bad grid lower bound '{}'", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Config(format!("bad grid upper bound '{}'", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| Error::Config(format!("bad grid count '{}'", parts[2])))?;
    if !(lo > 0.0 && hi > lo && n >= 1) {
        return Err(Error::Config(format!("invalid grid '{s}'")));
    }
    if n == 1 {
        return Ok(Some(vec![lo]));
    }
    Ok(Some(
        (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect(),
    ))
}

fn parse_dgp(name: &str, beta: f64, gamma: f64, sigma_u: f64) -> Result<Dgp, Error> {
    match name.to_ascii_lowercase().as_str() {
        "rw" | "random-walk" => Ok(Dgp::RandomWalk { sigma_u }),
        "linear" => Ok(Dgp::LinearShift { beta, sigma_u }),
        "nonlinear" => Ok(Dgp::NonlinearShift {
            beta,
            gamma,
            sigma_u,
        }),
        other => Err(Error::Config(format!(
            "unknown dgp '{other}' (expected 'rw', 'linear' or 'nonlinear')"
        ))),
    }
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match path {
        Some(p) => {
            fs::write(p, content)?;
            Ok(())
        }
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
            Ok(())
        }
    }
}

fn cmd_test(args: &TestArgs) -> Result<(), Error> {
    let file = fs::File::open(&args.input)?;
    let series = ingest_csv(file)?;
    let kernel = Kernel::from_str(&args.kernel)?;
    let spec = BootstrapSpec {
        b: args.b,
        m: args.m,
        alpha: args.alpha,
        innovation: parse_innovation(&args.innovation)?,
        master_seed: args.seed,
        literal_recursion: args.literal_recursion,
    };
    let calibration_alt = match &args.alt {
        None => None,
        Some(name) => {
            let family = parse_alt(name)?;
            let beta = args.beta.unwrap_or(-0.1);
            let sigma = rwkernel::sigma_u_hat(&series);
            Some(family.dgp(beta, args.gamma, sigma))
        }
    };
    let opts = AnalysisOptions {
        kernel,
        h: if args.calibrate { None } else { args.h },
        grid: parse_grid(&args.grid)?,
        calibration_alt,
        spec,
        df_calibration: parse_df_calibration(&args.df_critical)?,
    };
    if opts.h.is_none() && !args.calibrate {
        return Err(Error::Config(
            "provide --h <bandwidth> or --calibrate".into(),
        ));
    }
    let report = run_data_analysis(&series, &args.input.display().to_string(), &opts)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let rendered = match Format::from_str(&args.format)? {
        Format::Json => report_json(&report)?,
        Format::Markdown => report_markdown(&report),
        _ => {
            return Err(Error::Config(
                "test reports support only json or markdown".into(),
            ))
        }
    };
    write_or_print(&args.out, &rendered)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Error> {
    let sigma_u = if args.sigma2 >= 0.0 {
        args.sigma2.sqrt()
    } else {
        return Err(Error::Config(format!(
            "sigma2 must be nonnegative, got {}",
            args.sigma2
        )));
    };
    let dgp = parse_dgp(&args.dgp, args.beta, args.gamma, sigma_u)?;
    if let Some(w) = dgp.stationarity_warning() {
        eprintln!("warning: {w}");
    }
    let series = simulate(&dgp, args.t, &RngStream::new(args.seed).child(5))?;
    let mut buf = Vec::new();
    write_csv(&series, &mut buf)?;
    fs::write(&args.out, buf)?;
    Ok(())
}

fn cmd_calibrate(args: &CalibrateArgs) -> Result<(), Error> {
    if !args.null.eq_ignore_ascii_case("rw") {
        return Err(Error::Config(format!(
            "only the random-walk null is supported, got '{}'",
            args.null
        )));
    }
    let sigma_u = args.sigma2.sqrt();
    let kernel = Kernel::from_str(&args.kernel)?;
    let null = Dgp::RandomWalk { sigma_u };
    let alt = parse_dgp(&args.alt, args.beta, args.gamma, sigma_u)?;
    if let Some(w) = alt.stationarity_warning() {
        eprintln!("warning: {w}");
    }
    let grid_values = match parse_grid(&args.grid)? {
        Some(g) => g,
        None => rwkernel::experiments::default_calibration_grid(args.t)?,
    };
    let grid: Vec<Bandwidth> = grid_values
        .into_iter()
        .map(Bandwidth::new)
        .collect::<Result<_, _>>()?;
    let spec = BootstrapSpec {
        b: args.b,
        m: args.m,
        alpha: args.alpha,
        innovation: parse_innovation(&args.innovation)?,
        master_seed: args.seed,
        literal_recursion: false,
    };
    let selection = select_bandwidth(&null, &alt, args.t, kernel, &grid, &spec)?;
    println!("h_test = {}", selection.h_test.get());
    println!(
        "ladder = {:?}",
        bandwidth_ladder(selection.h_test).map(|b| b.get())
    );
    let csv = curve_csv(&selection.curve);
    match &args.out {
        Some(p) => fs::write(p, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

/// Flat `key = value` config file; '#' starts a comment.
fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>, Error> {
    let text = fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "{}:{}: expected 'key = value', got '{raw}'",
                path.display(),
                i + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn config_parse<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, Error> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|_| Error::Config(format!("could not parse config key '{key}' = '{raw}'"))),
    }
}

fn config_parse_list<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<Vec<T>>, Error> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<T>()
                    .map_err(|_| Error::Config(format!("could not parse '{part}' in '{key}'")))
            })
            .collect::<Result<Vec<T>, Error>>()
            .map(Some),
    }
}

/// Build the experiment configuration from a config file plus flag
/// overrides.
fn build_experiment_config(args: &TableArgs) -> Result<(ExperimentConfig, AltFamily, PathBuf, Format), Error> {
    let map = match &args.config {
        Some(path) => parse_config_file(path)?,
        None => BTreeMap::new(),
    };

    let mut config = ExperimentConfig::default();
    if let Some(t) = config_parse_list::<usize>(&map, "t")? {
        config.t_values = t;
    }
    if let Some(beta) = config_parse_list::<f64>(&map, "beta")? {
        config.beta_values = beta;
    }
    if let Some(g) = config_parse::<f64>(&map, "gamma")? {
        config.gamma = g;
    }
    if let Some(s) = config_parse::<f64>(&map, "sigma2")? {
        config.sigma_u_sq = s;
    }
    if let Some(a) = config_parse::<f64>(&map, "alpha")? {
        config.spec.alpha = a;
    }
    if let Some(m) = config_parse::<usize>(&map, "m")? {
        config.spec.m = m;
    }
    if let Some(b) = config_parse::<usize>(&map, "b")? {
        config.spec.b = b;
    }
    if let Some(seed) = config_parse::<u64>(&map, "seed")? {
        config.spec.master_seed = seed;
    }
    if let Some(name) = map.get("kernel") {
        config.kernel = Kernel::from_str(name)?;
    }
    if let Some(name) = map.get("innovation") {
        config.spec.innovation = parse_innovation(name)?;
    }
    if let Some(name) = map.get("df_critical") {
        config.df_calibration = parse_df_calibration(name)?;
    }
    for (key, value) in &map {
        if let Some(t_str) = key.strip_prefix("h_test.") {
            let t: usize = t_str
                .parse()
                .map_err(|_| Error::Config(format!("bad sample size in '{key}'")))?;
            let h: f64 = value
                .parse()
                .map_err(|_| Error::Config(format!("bad bandwidth in '{key}'")))?;
            config.h_test_overrides.push((t, h));
        }
    }

    // Scale: config key, then flag override.
    let scale = args
        .scale
        .clone()
        .or_else(|| map.get("scale").cloned())
        .unwrap_or_else(|| "desk".to_string());
    match scale.to_ascii_lowercase().as_str() {
        "desk" => {}
        "paper" => {
            config.spec.m = 1000;
            config.spec.b = 250;
        }
        other => {
            return Err(Error::Config(format!(
                "unknown scale '{other}' (expected 'desk' or 'paper')"
            )))
        }
    }
    // Explicit m/b from config keep priority over the scale presets when the
    // scale itself came from the config file.
    if args.scale.is_none() {
        if let Some(m) = config_parse::<usize>(&map, "m")? {
            config.spec.m = m;
        }
        if let Some(b) = config_parse::<usize>(&map, "b")? {
            config.spec.b = b;
        }
    }
    if let Some(seed) = args.seed {
        config.spec.master_seed = seed;
    }

    let alt = match args.alt.clone().or_else(|| map.get("alt").cloned()) {
        Some(name) => parse_alt(&name)?,
        None => AltFamily::Nonlinear,
    };
    let out_dir = args
        .out_dir
        .clone()
        .or_else(|| map.get("out_dir").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let format = match args.format.clone().or_else(|| map.get("format").cloned()) {
        Some(f) => Format::from_str(&f)?,
        None => Format::Csv,
    };
    Ok((config, alt, out_dir, format))
}

fn cmd_table(args: &TableArgs, size_table: bool) -> Result<(), Error> {
    let (config, alt, out_dir, format) = build_experiment_config(args)?;
    for w in config.window_warnings() {
        eprintln!("warning: {w}");
    }
    let tables = if size_table {
        run_size_table(&config)?
    } else {
        run_power_table(&config, alt)?
    };
    fs::create_dir_all(&out_dir)?;
    let stem = if size_table { "size_table" } else { "power_table" };
    for table in &tables {
        let (ext, content) = match format {
            Format::Csv => ("csv", power_table_csv(table)),
            Format::Json => ("json", power_table_json(table)?),
            Format::Markdown => ("md", power_table_markdown(table)),
            Format::Plotdata => ("plotdata.csv", power_table_plotdata(table)),
        };
        let path = out_dir.join(format!("{stem}_T{}.{ext}", table.t));
        fs::write(&path, &content)?;
        println!("wrote {}", path.display());
        if format != Format::Markdown {
            print!("{}", power_table_markdown(table));
        }
    }
    Ok(())
}
