use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use icmn_core::analysis::{self, AnalyticalResult};
use icmn_core::experiment::{emit_report, run_experiment, ExperimentConfig};
use icmn_core::meeting::{estimate_beta, MeetingSchedule};
use icmn_core::mobility::{
    expected_relative_speed, extract_meetings, generate_rd, generate_rwp, import_ns2, Boundary,
    DurationDist, MobilityKind, RdConfig, RelativeSpeed, RwpConfig, SpeedModel, Trace,
    DEFAULT_TRAVEL_TIME_MEAN,
};
use icmn_core::params::NetworkParams;
use icmn_core::routing::{simulate, TrafficParams};
use icmn_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "icmn",
    version,
    about = "Two-hop relay routing in intermittently connected mobile networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one routing simulation and print its report.
    Simulate(SimulateArgs),
    /// Run a parameter sweep from a config file.
    Sweep(SweepArgs),
    /// Generate, import or post-process mobility traces.
    #[command(subcommand)]
    Trace(TraceCommand),
    /// Evaluate closed-form results.
    #[command(subcommand)]
    Calc(CalcCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Poisson,
    Rwp,
    Rd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Rwp,
    Rd,
}

impl Model {
    fn kind(self) -> MobilityKind {
        match self {
            Model::Rwp => MobilityKind::RandomWaypoint,
            Model::Rd => MobilityKind::RandomDirection,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Reflect,
    Wrap,
}

#[derive(Args)]
struct SpeedArgs {
    /// Node speed in m/s, or the lower bound with --speed-max.
    #[arg(long, default_value_t = 40.0)]
    speed: f64,
    /// Upper bound of a uniform speed distribution.
    #[arg(long)]
    speed_max: Option<f64>,
}

impl SpeedArgs {
    fn model(&self) -> SpeedModel {
        match self.speed_max {
            Some(max) => SpeedModel::Uniform {
                min: self.speed,
                max,
            },
            None => SpeedModel::Constant(self.speed),
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value = "poisson")]
    mobility: Source,
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Pairwise meeting rate; required for the poisson source.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 2000.0)]
    side: f64,
    #[arg(long, default_value_t = 20.0)]
    range: f64,
    #[command(flatten)]
    speed: SpeedArgs,
    /// System load λ/μ.
    #[arg(long, default_value_t = 0.8)]
    rho: f64,
    #[arg(long, default_value_t = 1e7)]
    horizon: f64,
    /// Defaults to a tenth of the horizon.
    #[arg(long)]
    warmup: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Replay a saved meeting schedule instead of generating one.
    #[arg(long)]
    meetings: Option<PathBuf>,
    /// Write per-packet delays as CSV.
    #[arg(long)]
    delays: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override a config key, e.g. `--set seeds=1,2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TraceCommand {
    /// Generate a mobility trace.
    Gen(TraceGenArgs),
    /// Extract meetings from a trace.
    Extract(ExtractArgs),
    /// Convert an NS-2 movement file into a trace.
    ImportNs2(ImportArgs),
}

#[derive(Args)]
struct TraceGenArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 2000.0)]
    side: f64,
    #[command(flatten)]
    speed: SpeedArgs,
    /// Constant pause after each leg, in seconds.
    #[arg(long, default_value_t = 0.0)]
    pause: f64,
    #[arg(long, default_value_t = DEFAULT_TRAVEL_TIME_MEAN)]
    travel_time_mean: f64,
    #[arg(long, value_enum, default_value = "reflect")]
    boundary: BoundaryArg,
    #[arg(long)]
    horizon: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long, default_value_t = 20.0)]
    range: f64,
    /// Seed for the transmitter coin.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct ImportArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    side: f64,
    /// Defaults to the end of the last movement.
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct RateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    beta: f64,
}

#[derive(Subcommand)]
enum CalcCommand {
    /// Throughput capacity nβ/4.
    Capacity(RateArgs),
    /// Expected end-to-end delay of two-hop relaying.
    Delay {
        #[command(flatten)]
        rate: RateArgs,
        #[arg(long, conflicts_with = "rho", required_unless_present = "rho")]
        lambda: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Lower bound on delay over throughput.
    Bound(RateArgs),
    /// Meeting rate of a mobility model.
    Beta {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long, default_value_t = 2000.0)]
        side: f64,
        #[arg(long, default_value_t = 20.0)]
        range: f64,
        #[command(flatten)]
        speed: SpeedArgs,
        /// Use this average relative speed instead of deriving it.
        #[arg(long)]
        relative_speed: Option<f64>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Trace(TraceCommand::Gen(args)) => cmd_trace_gen(args),
        Command::Trace(TraceCommand::Extract(args)) => cmd_extract(args),
        Command::Trace(TraceCommand::ImportNs2(args)) => cmd_import(args),
        Command::Calc(calc) => cmd_calc(calc),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    // One sweep point of a throughput scenario carries all the settings.
    let mut map = BTreeMap::new();
    let mut set = |k: &str, v: String| {
        map.insert(k.to_string(), v);
    };
    set("scenario", "throughput-vs-load".into());
    set(
        "mobility",
        match args.mobility {
            Source::Poisson => "poisson",
            Source::Rwp => "rwp",
            Source::Rd => "rd",
        }
        .into(),
    );
    set("sweep", args.rho.to_string());
    set("n", args.n.to_string());
    if let Some(b) = args.beta {
        set("beta", b.to_string());
    }
    set("side", args.side.to_string());
    set("range", args.range.to_string());
    set("speed", args.speed.speed.to_string());
    if let Some(m) = args.speed.speed_max {
        set("speed_max", m.to_string());
    }
    set("horizon", args.horizon.to_string());
    if let Some(w) = args.warmup {
        set("warmup", w.to_string());
    }
    set("seeds", args.seed.to_string());
    let config = ExperimentConfig::from_map(&map)?;

    let beta = config.theory_beta(config.range)?;
    let mu = analysis::capacity(config.n, beta)?;
    let lambda = args.rho * mu;
    let schedule = match &args.meetings {
        Some(path) => MeetingSchedule::read_from(open(path)?)?,
        None => config.schedule(args.seed)?,
    };
    let params = NetworkParams::new(config.n, config.side, config.range, beta)?;
    let traffic = TrafficParams::random(config.n, lambda, args.seed)?;
    let stats = simulate(&params, &traffic, &schedule, config.warmup)?;

    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "beta = {beta}")?;
    writeln!(out, "mu = {mu}")?;
    writeln!(out, "rho = {}", args.rho)?;
    if let Ok(d) = analysis::expected_delay(config.n, beta, lambda) {
        writeln!(out, "theory_delay = {}", d.total)?;
    }
    stats.write_report(&mut out)?;
    if let Some(path) = &args.delays {
        let mut w = create(path)?;
        stats.write_delays_csv(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let mut text = std::fs::read_to_string(&args.config)?;
    // Overrides replace earlier lines with the same key.
    let mut overrides = BTreeMap::new();
    for item in &args.overrides {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected KEY=VALUE, found `{item}`")))?;
        overrides.insert(k.trim().to_string(), v.trim().to_string());
    }
    if let Some(out) = &args.output {
        overrides.insert("output".into(), out.display().to_string());
    }
    if !overrides.is_empty() {
        text = text
            .lines()
            .filter(|line| {
                let key = line
                    .split('#')
                    .next()
                    .unwrap()
                    .split('=')
                    .next()
                    .unwrap()
                    .trim();
                !overrides.contains_key(key)
            })
            .map(|line| format!("{line}\n"))
            .collect();
        for (k, v) in &overrides {
            text.push_str(&format!("{k} = {v}\n"));
        }
    }
    let config = ExperimentConfig::parse(&text)?;
    let rows = run_experiment(&config)?;
    let files = emit_report(&rows, &config)?;
    println!("wrote {}", files.results.display());
    println!("wrote {}", files.config_echo.display());
    println!("wrote {}", files.plot_script.display());
    Ok(())
}

fn cmd_trace_gen(args: TraceGenArgs) -> Result<()> {
    let pause = if args.pause > 0.0 {
        DurationDist::Constant(args.pause)
    } else {
        DurationDist::Zero
    };
    let trace = match args.model {
        Model::Rwp => generate_rwp(
            args.n,
            args.side,
            &RwpConfig {
                speed: args.speed.model(),
                pause,
            },
            args.horizon,
            args.seed,
        )?,
        Model::Rd => generate_rd(
            args.n,
            args.side,
            &RdConfig {
                speed: args.speed.model(),
                pause,
                travel_time: DurationDist::Exponential {
                    mean: args.travel_time_mean,
                },
                boundary: match args.boundary {
                    BoundaryArg::Reflect => Boundary::Reflect,
                    BoundaryArg::Wrap => Boundary::Wrap,
                },
            },
            args.horizon,
            args.seed,
        )?,
    };
    write_trace(&trace, &args.out)
}

fn write_trace(trace: &Trace, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    trace.write_to(&mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_extract(args: ExtractArgs) -> Result<()> {
    let trace = Trace::read_from(open(&args.trace)?)?;
    let schedule = extract_meetings(&trace, args.range, args.seed)?;
    let mut w = create(&args.out)?;
    schedule.write_to(&mut w)?;
    w.flush()?;
    let est = estimate_beta(&schedule);
    println!("meetings = {}", schedule.len());
    println!("beta = {}", est.beta);
    Ok(())
}

fn cmd_import(args: ImportArgs) -> Result<()> {
    let trace = import_ns2(open(&args.input)?, args.side, args.horizon)?;
    write_trace(&trace, &args.out)?;
    println!("nodes = {}", trace.node_count());
    println!("horizon = {}", trace.horizon);
    Ok(())
}

fn cmd_calc(calc: CalcCommand) -> Result<()> {
    match calc {
        CalcCommand::Capacity(r) => println!("{}", analysis::capacity(r.n, r.beta)?),
        CalcCommand::Bound(r) => println!("{}", analysis::tradeoff_bound(r.n, r.beta)?),
        CalcCommand::Delay { rate, lambda, rho } => {
            let mu = analysis::capacity(rate.n, rate.beta)?;
            let lambda = lambda.unwrap_or_else(|| rho.unwrap_or_default() * mu);
            let result = AnalyticalResult::evaluate(rate.n, rate.beta, Some(lambda))?;
            match result.expected_delay {
                Some(d) => println!("{}", d.total),
                None => return Err(Error::Unstable { lambda, mu }),
            }
        }
        CalcCommand::Beta {
            model,
            side,
            range,
            speed,
            relative_speed,
        } => {
            let ev = match relative_speed {
                Some(v) => RelativeSpeed::new(v)?,
                None => expected_relative_speed(&speed.model())?,
            };
            if !(side > 0.0 && range > 0.0) {
                return Err(Error::Parameter("side and range must be positive".into()));
            }
            println!("{}", model.kind().beta(side, range, ev));
        }
    }
    Ok(())
}
