use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use weyl_core::classes::{kappa, kappa_prime, make_test_symbol, n_p, ClassSpec, TestKind};
use weyl_core::grid::PhaseGrid;
use weyl_core::io::{read_binary, write_binary, Precision, Stored};
use weyl_core::quantization::build_kernel;
use weyl_core::schatten::{schatten_norm, singular_values};
use weyl_core::verify::{compare_thresholds, parse_exponent, run_suite, suites, ExperimentConfig, GridSpec};

mod emit;

#[derive(Parser)]
#[command(name = "weyl", version, about = "Discrete Weyl quantization and Schatten-class experiments")]
struct Cli {
    /// Worker threads for suite evaluation.
    #[arg(long, env = "WEYL_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite, or `list` them.
    Verify(VerifyArgs),
    /// Evaluate both sufficient conditions for a symbol class.
    Thresholds {
        /// `n:r,s,rho..,delta..` (the `n:` prefix may be dropped for n = 1).
        #[arg(long, allow_hyphen_values = true)]
        spec: String,
        #[arg(long, default_value = "1")]
        p: String,
    },
    /// Threshold integers κ_p, κ'_p, n_p.
    Kappa {
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Sample a test symbol of a class onto a grid and store it.
    Symbol {
        #[arg(long, allow_hyphen_values = true)]
        spec: String,
        /// plain | oscillatory | truncated
        #[arg(long, default_value = "plain")]
        kind: String,
        /// `n,L,N`
        #[arg(long, value_parser = parse_grid)]
        grid: GridSpec,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        single: bool,
    },
    /// Schatten norms of a stored symbol (through Op_t) or kernel.
    Schatten {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,2,inf")]
        p: Vec<String>,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `list`.
    suite: String,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// `n,L,N`
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridSpec>,
    #[arg(long)]
    cases: Option<usize>,
    /// Largest dense kernel side allowed.
    #[arg(long)]
    kernel_cap: Option<usize>,
    /// Write CSV tables and a ratio plot into this directory.
    #[arg(long)]
    emit_csv: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_grid(text: &str) -> std::result::Result<GridSpec, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err("expected n,L,N".into());
    }
    Ok(GridSpec {
        n: parts[0].parse().map_err(|_| "bad n")?,
        half_width: parts[1].parse().map_err(|_| "bad L")?,
        points: parts[2].parse().map_err(|_| "bad N")?,
    })
}

fn verify(args: VerifyArgs) -> Result<bool> {
    if args.suite == "list" {
        for s in suites() {
            let (n, l, pts) = s.grid;
            println!("{:<26} n={n} L={l} N={pts}  {}", s.name, s.statement);
        }
        return Ok(true);
    }
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let c: ExperimentConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            if c.suite != args.suite {
                bail!("config is for suite `{}`, not `{}`", c.suite, args.suite);
            }
            c
        }
        None => ExperimentConfig::default_for(&args.suite)?,
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(grid) = args.grid {
        config.grid = grid;
    }
    if args.cases.is_some() {
        config.cases = args.cases;
    }
    if args.kernel_cap.is_some() {
        config.kernel_cap = args.kernel_cap;
    }
    let report = run_suite(&config)?;
    let json = report.to_json()?;
    match &args.out {
        Some(path) => std::fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?,
        None => println!("{json}"),
    }
    if let Some(dir) = &args.emit_csv {
        emit::write_all(dir, &report)?;
    }
    for v in &report.verdicts {
        let mark = match (v.passed, v.hard) {
            (true, _) => "pass",
            (false, true) => "FAIL",
            (false, false) => "warn",
        };
        eprintln!("{mark}  {}  [{}]", v.name, v.invariant);
    }
    eprintln!("{}: {} in {:.2}s", report.suite, if report.passed() { "ok" } else { "failed" }, report.wall_time.as_secs_f64());
    Ok(report.passed())
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global()?;
    }
    match cli.command {
        Command::Verify(args) => verify(args),
        Command::Thresholds { spec, p } => {
            let spec: ClassSpec = spec.parse()?;
            let c = compare_thresholds(&spec, parse_exponent(&p)?)?;
            println!("{}", serde_json::to_string_pretty(&c)?);
            Ok(true)
        }
        Command::Kappa { p, n } => {
            let p = parse_exponent(&p)?;
            let kp = match kappa_prime(p, n) {
                Ok(k) => k.to_string(),
                Err(_) => "undefined".into(),
            };
            let np = match n_p(p, n) {
                Ok(k) => k.to_string(),
                Err(_) => "undefined".into(),
            };
            println!("kappa={} kappa'={kp} n_p={np}", kappa(p, n)?);
            Ok(true)
        }
        Command::Symbol { spec, kind, grid, out, single } => {
            let spec: ClassSpec = spec.parse()?;
            let grid = PhaseGrid::new(grid.n, grid.half_width, grid.points)?;
            let a = make_test_symbol(grid, &spec, kind.parse::<TestKind>()?)?;
            let precision = if single { Precision::Single } else { Precision::Double };
            write_binary(&out, &Stored::Symbol(a), precision)?;
            Ok(true)
        }
        Command::Schatten { input, p, t } => {
            let kernel = match read_binary(&input)? {
                Stored::Symbol(a) => build_kernel(&a, t)?,
                Stored::Kernel(k) => k,
                Stored::Function(_) => bail!("{} holds a function, not a symbol or kernel", input.display()),
            };
            let spectrum = singular_values(&kernel)?;
            for text in &p {
                println!("s_{text} = {:.12e}", schatten_norm(&spectrum, parse_exponent(text)?)?);
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
