use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fqmci::bench::{find_crossover, fit_slope, parse_csv, run_sweep, Crossover, Method, SweepConfig};
use fqmci::estimators::{classical_mci, default_scale, plan_allocation, FourierQmci, RescaledQmci};
use fqmci::{QaeMethod, Result, ShotSampler};

#[derive(Parser)]
#[command(name = "fqmci", version, about = "Fourier quantum Monte-Carlo integration benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one estimator once and print its report.
    Estimate {
        /// Sweep config supplying distribution, function and estimator settings.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "fourier")]
        method: String,
        /// Total uses of P.
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a full RMSE sweep and write the CSV.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config's output path; `-` writes to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fit log-log slopes per method from a sweep CSV.
    Slope { csv: PathBuf },
    /// Print the brute-force expectation.
    Oracle {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load(config: Option<PathBuf>) -> Result<SweepConfig> {
    match config {
        Some(path) => SweepConfig::load(path),
        None => Ok(SweepConfig::default()),
    }
}

fn estimate(cfg: &SweepConfig, method: &str, budget: u64) -> Result<()> {
    let dist = cfg.load_distribution()?;
    let f = cfg.function_spec(&dist)?;
    let oracle = dist.expectation(cfg.axis, |x| f.eval(x))?;
    let qae = QaeMethod::from_name(&cfg.qae)?;
    let mut sampler = ShotSampler::new(cfg.seed, 0);
    let report = match Method::from_name(method)? {
        Method::Fourier => {
            let cap = plan_allocation(budget as f64, qae.lambda(), cfg.delta)?.n_max;
            let est = FourierQmci::new(&dist, cfg.axis, &f, cfg.stretch, cap)?;
            let q0 = est.q0_for_budget(budget, qae.lambda(), cfg.delta)?;
            est.run(&plan_allocation(q0, qae.lambda(), cfg.delta)?, &qae, &sampler)?
        }
        Method::Rescaled => {
            let scale = default_scale(cfg.scale_constant)(budget);
            RescaledQmci::new(&dist, cfg.axis, scale)?.run(budget, &qae, &mut sampler)?
        }
        Method::Classical => classical_mci(&dist, cfg.axis, &f, budget, &mut sampler)?,
    };
    println!("method         {method}");
    println!("estimate       {}", report.estimate);
    println!("oracle         {oracle}");
    println!("error          {:e}", report.estimate - oracle);
    println!("queries_total  {}", report.queries_total);
    println!("queries_used   {}", report.queries_used);
    println!("max_depth      {}", report.max_depth);
    if method == "fourier" {
        println!("q0             {}", report.q0);
        println!("n_max          {}", report.n_max);
    }
    Ok(())
}

fn sweep(mut cfg: SweepConfig, output: Option<PathBuf>, runs: Option<usize>, seed: Option<u64>) -> Result<()> {
    if let Some(r) = runs {
        cfg.runs = r;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let report = run_sweep(&cfg)?;
    let csv = report.to_csv();
    match output.or(cfg.output.clone()) {
        Some(path) if path.as_os_str() != "-" => std::fs::write(&path, &csv)?,
        _ => print!("{csv}"),
    }
    eprintln!("oracle {}", report.oracle);
    for m in &cfg.methods {
        if let Ok(s) = report.slope(m) {
            eprintln!("slope {m} {s:.4}");
        }
    }
    for m in cfg.methods.iter().filter(|m| *m != "classical") {
        if cfg.methods.iter().any(|c| c == "classical") {
            match find_crossover(&report.rows, m, "classical") {
                Ok(Crossover::At { budget, degenerate, depth }) => {
                    let note = if degenerate { " (already below at the smallest budget)" } else { "" };
                    eprintln!("crossover {m} vs classical at q = {budget:.0}, depth {depth}{note}");
                }
                Ok(Crossover::NoneInRange) => eprintln!("crossover {m} vs classical: none in range"),
                Err(e) => eprintln!("crossover {m} vs classical: {e}"),
            }
        }
    }
    Ok(())
}

fn slope(csv: PathBuf) -> Result<()> {
    let rows = parse_csv(&std::fs::read_to_string(csv)?)?;
    let mut methods: Vec<&str> = Vec::new();
    for r in &rows {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }
    for m in methods {
        let points: Vec<(f64, f64)> = rows.iter().filter(|r| r.method == m).map(|r| (r.q as f64, r.rmse)).collect();
        println!("{m} {:.4}", fit_slope(&points)?);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate { config, method, budget, seed } => load(config).and_then(|mut cfg| {
            if let Some(s) = seed {
                cfg.seed = s;
            }
            estimate(&cfg, &method, budget)
        }),
        Command::Sweep { config, output, runs, seed } => load(config).and_then(|cfg| sweep(cfg, output, runs, seed)),
        Command::Slope { csv } => slope(csv),
        Command::Oracle { config } => load(config).and_then(|cfg| {
            let dist = cfg.load_distribution()?;
            let f = cfg.function_spec(&dist)?;
            println!("{}", dist.expectation(cfg.axis, |x| f.eval(x))?);
            Ok(())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
