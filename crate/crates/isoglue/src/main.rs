use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use isoglue::config::{Settings, SEED_ENV};
use isoglue::error::{CliError, UsageError};

#[derive(Parser)]
#[command(name = "isoglue", version, about = "Exact verification campaigns for a torus glued to a cylinder")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// `key=value` file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads; reports do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(flatten)]
    keys: Keys,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Sample triples and check the metric axioms.
    VerifyMetric,
    /// Exhibit the triangle failure when 2R < M.
    Counterexample,
    /// Nearest-point maps against brute-force grids.
    Nearest,
    /// Lift line isometries and check them; reject impostor maps.
    IsometryCheck,
    /// Tabulate lifts of random line isometries.
    Lift,
    /// Approximate targets by orbit points.
    Density,
    /// Certify a target off the orbit and approximate it anyway.
    NonClosure,
    /// Compare d(t, s) with the subgroup distance near the diagonal.
    LocalIsometry,
    /// The isometry group of a circle glued to the line.
    X1Group,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::VerifyMetric => "verify-metric",
            Command::Counterexample => "counterexample",
            Command::Nearest => "nearest",
            Command::IsometryCheck => "isometry-check",
            Command::Lift => "lift",
            Command::Density => "density",
            Command::NonClosure => "non-closure",
            Command::LocalIsometry => "local-isometry",
            Command::X1Group => "x1-group",
        }
    }
}

#[derive(Args)]
struct Keys {
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Accept 2R < M, where the distance is not a metric.
    #[arg(long, global = true)]
    allow_invalid_metric: bool,
    #[arg(long, global = true)]
    axis: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    basepoint: Option<String>,
    #[arg(long, global = true)]
    budget: Option<String>,
    #[arg(long, global = true)]
    convergents: Option<String>,
    #[arg(long, global = true)]
    d: Option<String>,
    #[arg(long, global = true)]
    epsilon: Option<String>,
    #[arg(long, global = true)]
    epsilons: Option<String>,
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    gram: Option<String>,
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long, global = true)]
    k_range: Option<String>,
    #[arg(long = "M", global = true, allow_hyphen_values = true)]
    m: Option<String>,
    #[arg(long, global = true)]
    mode: Option<String>,
    #[arg(long = "R", global = true, allow_hyphen_values = true)]
    r: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    s: Option<String>,
    #[arg(long, global = true)]
    samples: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    space: Option<String>,
    #[arg(long, global = true)]
    strategy: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long, global = true)]
    t_grid: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    target: Option<String>,
    #[arg(long, global = true)]
    targets: Option<String>,
}

impl Keys {
    fn settings(&self) -> Settings {
        let pairs = [
            ("alpha", &self.alpha),
            ("axis", &self.axis),
            ("basepoint", &self.basepoint),
            ("budget", &self.budget),
            ("convergents", &self.convergents),
            ("d", &self.d),
            ("epsilon", &self.epsilon),
            ("epsilons", &self.epsilons),
            ("format", &self.format),
            ("gram", &self.gram),
            ("grid", &self.grid),
            ("k-range", &self.k_range),
            ("M", &self.m),
            ("mode", &self.mode),
            ("R", &self.r),
            ("s", &self.s),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("space", &self.space),
            ("strategy", &self.strategy),
            ("t", &self.t),
            ("t-grid", &self.t_grid),
            ("target", &self.target),
            ("targets", &self.targets),
        ];
        let mut out: Settings = pairs.iter().filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))).collect();
        if self.allow_invalid_metric {
            out.insert("allow-invalid-metric".into(), "true".into());
        }
        out
    }
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let threads = match cli.threads {
        Some(0) => return Err(UsageError::new("threads", "must be positive".into()).into()),
        Some(n) => n,
        None => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| UsageError::new("threads", e.to_string()))?;
    let env_seed = std::env::var(SEED_ENV).ok();
    let flags = cli.keys.settings();
    let rendered = pool.install(|| isoglue::execute(cli.command.name(), &flags, env_seed.as_deref(), cli.config.as_deref()))?;
    match &cli.output {
        Some(path) => fs::write(path, &rendered.text)?,
        None => print!("{}", rendered.text),
    }
    Ok(rendered.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
