mod config;
mod golden;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use verma_core::algebra::{build_from_catalog, CATALOG};

use config::{PartialConfig, RunConfig, UsageError};
use golden::GoldenOutcome;

#[derive(Parser)]
#[command(name = "verma-critical", version, about = "Verification suites for Verma modules at the critical level")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and write a report.
    Run(RunArgs),
    /// Compare a report with a golden file, or regenerate the golden file.
    Golden {
        report: PathBuf,
        golden: PathBuf,
        #[arg(long)]
        regenerate: bool,
    },
    /// Print catalog algebras as JSON.
    Catalog {
        #[arg(long)]
        algebra: Option<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    algebra: Option<String>,
    /// `critical` or a rational level.
    #[arg(long, allow_hyphen_values = true)]
    level: Option<String>,
    /// Finite part of lambda, comma separated rationals.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Value of lambda on D.
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    /// Deformation direction on [h.., K, D], comma separated.
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    #[arg(long)]
    smax: Option<i64>,
    #[arg(long)]
    hmax: Option<i64>,
    /// Suites to run (repeatable or comma separated), or `all`.
    #[arg(long)]
    suite: Vec<String>,
    /// Largest delta-degree for the determinant table.
    #[arg(long)]
    nu_max_delta: Option<i64>,
    /// Output directory for report.json and summary.txt.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn partial(&self) -> PartialConfig {
        PartialConfig {
            algebra: self.algebra.clone(),
            level: self.level.clone(),
            lambda: self.lambda.clone(),
            d: self.d.clone(),
            xi: self.xi.clone(),
            smax: self.smax,
            hmax: self.hmax,
            suites: (!self.suite.is_empty()).then(|| self.suite.clone()),
            nu_max_delta: self.nu_max_delta,
            out: self.out.clone(),
            threads: self.threads,
        }
    }
}

fn run(args: RunArgs) -> anyhow::Result<bool> {
    let file = match &args.config {
        Some(p) => PartialConfig::from_file(p).map_err(|e| UsageError(e.to_string()))?,
        None => PartialConfig::default(),
    };
    let cfg = RunConfig::resolve(args.partial().over(file), std::env::var("VERMA_CRITICAL_THREADS").ok())?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build()?;
    let ctx = suites::Context::new(&cfg);
    let sections: Vec<(String, suites::Section)> = pool.install(|| {
        cfg.suites
            .par_iter()
            .map(|name| {
                let t = Instant::now();
                let s = suites::run_suite(name, &ctx);
                eprintln!("{name}: {:.2}s", t.elapsed().as_secs_f64());
                (name.clone(), s)
            })
            .collect()
    });
    let echo = cfg.echo();
    let rep = report::assemble(echo.clone(), &sections);
    let text = report::summary(&echo, &sections);
    print!("{text}");
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), report::to_stable_string(&rep))?;
        std::fs::write(dir.join("summary.txt"), &text)?;
    }
    Ok(rep["pass"].as_bool().unwrap_or(false))
}

fn golden_cmd(report: PathBuf, golden: PathBuf, regenerate: bool) -> anyhow::Result<bool> {
    let text = std::fs::read_to_string(&report).map_err(|e| UsageError(format!("{}: {e}", report.display())))?;
    let rep: serde_json::Value = serde_json::from_str(&text)?;
    match golden::compare(&rep, &golden, regenerate)? {
        GoldenOutcome::Match => {
            println!("golden match");
            Ok(true)
        }
        GoldenOutcome::Written => {
            println!("golden written to {}", golden.display());
            Ok(true)
        }
        GoldenOutcome::Differs(d) => {
            for p in &d {
                println!("differs at {p}");
            }
            Ok(false)
        }
    }
}

fn catalog(name: Option<String>) -> anyhow::Result<bool> {
    let names: Vec<String> = match name {
        Some(n) => vec![n],
        None => CATALOG.iter().map(|s| s.to_string()).collect(),
    };
    let mut out = Vec::new();
    for n in names {
        let alg = build_from_catalog(&n).map_err(|e| UsageError(format!("UnknownAlgebra: {e}")))?;
        alg.validate()?;
        out.push(alg.to_json());
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Golden { report, golden, regenerate } => golden_cmd(report, golden, regenerate),
        Command::Catalog { algebra } => catalog(algebra),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
